//! Regenerates the checked-in fuzz corpus seeds.
//!
//! Usage: `cargo run -p fluxsnn --bin gen-fuzz-corpus [corpus-root]`
//! (default root: `fuzz/corpus`).

use std::path::{Path, PathBuf};

use fluxsnn::config::RunConfig;
use fluxsnn::data::{format_checkpoint, IMAGES_MAGIC, LABELS_MAGIC};
use fluxsnn::plasticity::SynapseMatrix;
use fluxsnn::rng::make_rng;

fn write(root: &Path, target: &str, name: &str, bytes: &[u8]) {
    let dir = root.join(target);
    std::fs::create_dir_all(&dir).expect("create corpus dir");
    std::fs::write(dir.join(name), bytes).expect("write seed");
    println!("wrote {}/{}/{name} ({} bytes)", root.display(), target, bytes.len());
}

fn idx_images(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    out.extend_from_slice(&count.to_be_bytes());
    out.extend_from_slice(&rows.to_be_bytes());
    out.extend_from_slice(&cols.to_be_bytes());
    out.extend_from_slice(pixels);
    out
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fuzz/corpus"));

    // IDX image seeds: a small valid file, an empty one, and mutated
    // variants that exercise each failure class.
    let gradient: Vec<u8> = (0..3 * 4 * 4).map(|v| (v * 5) as u8).collect();
    let valid = idx_images(3, 4, 4, &gradient);
    write(&root, "idx_images", "valid_3x4x4", &valid);
    write(&root, "idx_images", "valid_empty", &idx_images(0, 28, 28, &[]));
    let mut bad_magic = valid.clone();
    bad_magic[3] = 0x01;
    write(&root, "idx_images", "bad_magic", &bad_magic);
    write(&root, "idx_images", "truncated", &valid[..valid.len() - 7]);
    let mut trailing = valid.clone();
    trailing.extend_from_slice(&[0, 1, 2]);
    write(&root, "idx_images", "trailing", &trailing);

    // IDX label seeds.
    write(&root, "idx_labels", "valid_digits", &idx_labels(&[0, 1, 2, 9, 1, 0]));
    write(&root, "idx_labels", "valid_empty", &idx_labels(&[]));
    write(&root, "idx_labels", "truncated", &idx_labels(&[0, 1, 2])[..9]);

    // Checkpoint seeds: small valid files plus header mutations.
    let cfg = RunConfig {
        input_side: 2,
        n_excitatory: 2,
        ..RunConfig::default()
    };
    let mut matrix = SynapseMatrix::new(4, 2, cfg.weight_levels).unwrap();
    matrix.init_uniform(&mut make_rng(1, "weight-init").unwrap());
    let valid = format_checkpoint(&cfg, &matrix);
    write(&root, "checkpoint", "valid_2x2", valid.as_bytes());
    let bigger_cfg = RunConfig {
        input_side: 3,
        n_excitatory: 4,
        seed: 42,
        ..RunConfig::default()
    };
    let mut bigger = SynapseMatrix::new(9, 4, bigger_cfg.weight_levels).unwrap();
    bigger.init_uniform(&mut make_rng(2, "weight-init").unwrap());
    write(
        &root,
        "checkpoint",
        "valid_3x4",
        format_checkpoint(&bigger_cfg, &bigger).as_bytes(),
    );
    write(
        &root,
        "checkpoint",
        "wrong_version",
        valid.replacen("FLUXSNN 1", "FLUXSNN 9", 1).as_bytes(),
    );
    write(
        &root,
        "checkpoint",
        "level_out_of_range",
        valid.replacen("\n1", "\n16", 1).as_bytes(),
    );

    // Run-config seeds.
    write(&root, "run_config", "valid_empty", b"{}");
    write(
        &root,
        "run_config",
        "valid_defaults",
        RunConfig::default().to_json().as_bytes(),
    );
    write(
        &root,
        "run_config",
        "valid_partial",
        br#"{"n_excitatory": 4, "seed": 7, "dt_ps": 0.5}"#,
    );
    write(
        &root,
        "run_config",
        "unknown_key",
        br#"{"theta_spikez": 8}"#,
    );
}
