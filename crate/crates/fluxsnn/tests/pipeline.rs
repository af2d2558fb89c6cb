//! Whole-pipeline integration checks on a full-size synthetic corpus:
//! learned structure, checkpoint/eval consistency, snapshot cadence, and
//! artifact export.

use std::sync::OnceLock;

use fluxsnn::config::RunConfig;
use fluxsnn::data::{
    format_checkpoint, load_idx, parse_checkpoint, select_subset, weight_maps_pgm, Split,
};
use fluxsnn::encoding::PixelImage;
use fluxsnn::network::{run_experiment, ExperimentResult, Network};
use fluxsnn::rng::make_rng;

struct Pools {
    train: Vec<(PixelImage, u8)>,
    test: Vec<(PixelImage, u8)>,
}

fn pools() -> &'static Pools {
    static POOLS: OnceLock<Pools> = OnceLock::new();
    POOLS.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let spec = fluxsnn_testdata::CorpusSpec::standard(20260809);
        let files = fluxsnn_testdata::write_corpus(dir.path(), &spec).unwrap();
        let filter = |items: Vec<(PixelImage, u8)>| {
            items
                .into_iter()
                .filter(|(_, l)| *l <= 1)
                .collect::<Vec<_>>()
        };
        Pools {
            train: filter(load_idx(&files.train_images, &files.train_labels).unwrap()),
            test: filter(load_idx(&files.test_images, &files.test_labels).unwrap()),
        }
    })
}

fn reference_run() -> &'static ExperimentResult {
    static RUN: OnceLock<ExperimentResult> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = RunConfig {
            seed: 7,
            ..RunConfig::default()
        };
        run_experiment(&cfg, &pools().train, &pools().test).unwrap()
    })
}

#[test]
fn class_mean_weight_vectors_separate() {
    // After one 633-image epoch the per-class mean weight vectors must
    // not be near-parallel. Without weight normalization, synapses of
    // never-active background pixels keep their uniform random levels
    // (expected weight 0.5), a large component shared by both classes, so
    // the comparison centers on the deviation from that initial mean.
    let result = reference_run();
    let net = &result.network;
    let mut means = [vec![0.0f64; net.k()], vec![0.0f64; net.k()]];
    let mut counts = [0usize; 2];
    for neuron in 0..net.n() {
        if let Some(class) = result.labels.label(neuron) {
            let column = net.synapses().column_weights(neuron);
            for (acc, w) in means[class as usize].iter_mut().zip(column) {
                *acc += w - 0.5;
            }
            counts[class as usize] += 1;
        }
    }
    assert!(counts[0] > 0 && counts[1] > 0, "both classes must be represented");
    for (mean, count) in means.iter_mut().zip(counts) {
        mean.iter_mut().for_each(|v| *v /= count as f64);
    }
    let dot: f64 = means[0].iter().zip(&means[1]).map(|(a, b)| a * b).sum();
    let n0 = means[0].iter().map(|a| a * a).sum::<f64>().sqrt();
    let n1 = means[1].iter().map(|a| a * a).sum::<f64>().sqrt();
    let cosine = dot / (n0 * n1);
    assert!(
        cosine < 0.9,
        "class-mean learned-weight vectors too similar: cosine {cosine:.3}"
    );
}

#[test]
fn snapshots_cover_one_third_marks_of_the_full_run() {
    let result = reference_run();
    let iters: Vec<usize> = result.snapshots.iter().map(|s| s.iteration).collect();
    assert_eq!(iters, vec![0, 211, 422, 633]);
    for snap in &result.snapshots {
        assert!(snap.matrix.levels().iter().all(|&l| l <= 15));
    }
}

#[test]
fn checkpoint_reload_reproduces_evaluation() {
    let result = reference_run();
    let cfg = result.network.config().clone();
    let text = format_checkpoint(&cfg, result.network.synapses());
    let ckpt = parse_checkpoint(&text).unwrap();
    let mut restored = Network::from_checkpoint(&ckpt).unwrap();

    // Re-derive labels on the training subset and evaluate the test
    // subset; both must match the original run exactly.
    let shuffle = make_rng(cfg.seed, "data-shuffle").unwrap();
    let train_ds = select_subset(&pools().train, Split::Train, &shuffle).unwrap();
    let test_ds = select_subset(&pools().test, Split::Test, &shuffle).unwrap();
    let labels = restored.assign_labels(&train_ds).unwrap();
    assert_eq!(labels, result.labels);
    let stats = restored.evaluate(&labels, &test_ds).unwrap();
    assert_eq!(stats, result.test_stats);
}

#[test]
fn trained_weight_maps_export_as_valid_pgm() {
    let result = reference_run();
    let bytes = weight_maps_pgm(result.network.synapses(), 14).unwrap();
    let header = b"P5\n134 14\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 134 * 14);
    // A trained map is not blank.
    assert!(bytes[header.len()..].iter().any(|&b| b > 128));
}

#[test]
fn accuracy_report_fields_are_consistent() {
    let result = reference_run();
    for stats in [&result.train_stats, &result.test_stats] {
        assert_eq!(
            stats.per_class_total.iter().sum::<usize>(),
            stats.total
        );
        assert_eq!(
            stats.per_class_correct.iter().sum::<usize>(),
            stats.correct
        );
        assert!(stats.correct + stats.abstained <= stats.total);
        assert!((0.0..=1.0).contains(&stats.accuracy()));
    }
    assert_eq!(result.train_stats.total, 633);
    assert_eq!(result.test_stats.total, 105);
}
