//! Two-layer network: a fully connected input->excitatory synapse matrix,
//! winner-take-all competition via transient lateral inhibition, the
//! clocked training/inference loops, the spike-count readout, and the
//! hardware cost estimator.
//!
//! Step order inside one clock tick is fixed: (1) all membranes leak;
//! (2) arriving input spikes apply depression against post-traces from
//! strictly earlier steps, then refresh their pre-traces; (3) weighted
//! drive integrates; (4) neurons at or above threshold become candidates;
//! (5) the candidate with the largest membrane fires (ties break to the
//! lowest index), everyone else is laterally inhibited; (6) when training,
//! the fire potentiates against pre-traces including this step's spikes
//! (a same-step pairing counts as causal) and then refreshes the
//! post-trace. With the lateral coupling set to zero there is no
//! competition at all: every candidate fires, and the network degrades to
//! independent neurons.
//!
//! During training each fire additionally raises the firing neuron's
//! effective threshold by the self-inhibition magnitude, decaying with
//! its own slow constant (`tau_theta_ps`) and carried across images. A
//! neuron that just claimed a few exposures is throttled for the next
//! several, which keeps single neurons from monopolizing the winner slot
//! in place of weight normalization. Frozen (non-training) presentations
//! never touch the adaptation, so labeling and evaluation stay pure
//! per-image functions.

use crate::clock::{decay_factor, SimClock};
use crate::config::{ConfigError, RunConfig};
use crate::data::{select_subset, Checkpoint, DataError, Dataset, Split};
use crate::encoding::{downscale, encode, EncodingError, PixelImage, SpikeTrain};
use crate::neuron::{NeuronError, NeuronParams, NeuronState};
use crate::plasticity::{PlasticityError, StdpParams, SynapseMatrix, TraceState};
use crate::rng::{make_rng, RngError, RngStream};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Neuron(#[from] NeuronError),
    #[error(transparent)]
    Plasticity(#[from] PlasticityError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Rng(#[from] RngError),
    #[error("spike train is {got_sources} x {got_steps}, network expects {expected_sources} x {expected_steps}")]
    TrainDimensions {
        expected_sources: usize,
        expected_steps: usize,
        got_sources: usize,
        got_steps: usize,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset label {0} is not a binary digit label")]
    InvalidLabel(u8),
    #[error("untrained network: no neuron emitted any spike during labeling")]
    UntrainedNetwork,
    #[error("no assigned neurons available for prediction")]
    NoAssignedNeurons,
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),
    #[error("estimator needs K >= 1 and N >= 1, got K = {k}, N = {n}")]
    InvalidCounts { k: usize, n: usize },
}

// Encoding-stream fork tags: every image presentation draws from the
// substream (pass, split, index), so any pass can be reproduced in
// isolation (an eval run re-derives exactly the draws of the original).
const PASS_TRAIN: u64 = 0;
const PASS_ASSIGN: u64 = 1;
const PASS_EVAL: u64 = 2;

/// The two-layer network plus its run configuration.
#[derive(Debug, Clone)]
pub struct Network {
    cfg: RunConfig,
    k: usize,
    n: usize,
    n_steps: usize,
    decay_mem: f64,
    decay_theta: f64,
    synapses: SynapseMatrix,
    params: Vec<NeuronParams>,
    states: Vec<NeuronState>,
    // Training-time threshold adaptation, in weight units above theta.
    adapt: Vec<f64>,
    pre_trace: TraceState,
    post_trace: TraceState,
    stdp: StdpParams,
    lateral_inhibition: f64,
    // Per-step scratch, reused across the hot loop.
    drive: Vec<f64>,
    candidates: Vec<usize>,
    fired: Vec<usize>,
}

impl Network {
    /// Build a network with all-zero weights from a validated config.
    pub fn new(cfg: &RunConfig) -> Result<Self, NetworkError> {
        cfg.validate()?;
        let params = NeuronParams::from_config(cfg);
        params.validate()?;
        let k = cfg.input_count();
        let n = cfg.n_excitatory;
        let window = cfg.trace_window_steps();
        Ok(Self {
            cfg: cfg.clone(),
            k,
            n,
            n_steps: cfg.n_steps(),
            decay_mem: decay_factor(cfg.tau_mem_ps, cfg.dt_ps).map_err(NeuronError::from)?,
            decay_theta: decay_factor(cfg.tau_theta_ps, cfg.dt_ps).map_err(NeuronError::from)?,
            synapses: SynapseMatrix::new(k, n, cfg.weight_levels)?,
            params: vec![params; n],
            states: vec![NeuronState::new(cfg.resting); n],
            adapt: vec![0.0; n],
            pre_trace: TraceState::new(k, window),
            post_trace: TraceState::new(n, window),
            stdp: StdpParams::from_config(cfg),
            lateral_inhibition: cfg.lateral_inhibition_spikes,
            drive: vec![0.0; n],
            candidates: Vec::with_capacity(n),
            fired: Vec::with_capacity(n),
        })
    }

    /// Rebuild a network from a parsed checkpoint.
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self, NetworkError> {
        let mut net = Self::new(&ckpt.config)?;
        for source in 0..ckpt.k {
            for neuron in 0..ckpt.n {
                net.synapses
                    .set_level(source, neuron, ckpt.levels[source * ckpt.n + neuron])?;
            }
        }
        Ok(net)
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn synapses(&self) -> &SynapseMatrix {
        &self.synapses
    }

    pub fn synapses_mut(&mut self) -> &mut SynapseMatrix {
        &mut self.synapses
    }

    pub fn neuron_state(&self, neuron: usize) -> &NeuronState {
        &self.states[neuron]
    }

    /// Neurons that fired during the most recent step.
    pub fn last_fired(&self) -> &[usize] {
        &self.fired
    }

    /// Current threshold adaptation of one neuron (nonzero only while a
    /// training pass is in flight).
    pub fn adaptation(&self, neuron: usize) -> f64 {
        self.adapt[neuron]
    }

    /// Draw every synapse level uniformly at random.
    pub fn init_weights(&mut self, rng: &mut RngStream) {
        self.synapses.init_uniform(rng);
    }

    /// Advance one clock step. Returns the winning neuron, if any fired.
    ///
    /// With lateral inhibition enabled at most one neuron fires per step;
    /// with it set to zero every at-threshold neuron fires and the
    /// returned index is the would-be winner (largest membrane).
    pub fn step(&mut self, input_spikes: &[usize], t: u64, training: bool) -> Option<usize> {
        let resting = self.cfg.resting;
        let dt_ps = self.cfg.dt_ps;

        for state in &mut self.states {
            state.decay(self.decay_mem, resting);
        }
        for a in &mut self.adapt {
            *a *= self.decay_theta;
        }

        if training {
            for &source in input_spikes {
                self.synapses
                    .on_pre_spike(source, &self.post_trace, t, &self.stdp, dt_ps);
            }
        }
        for &source in input_spikes {
            self.pre_trace
                .record_spike(source, t)
                .expect("input spike source within layer bounds");
        }

        self.drive.iter_mut().for_each(|d| *d = 0.0);
        for &source in input_spikes {
            let row = self.synapses.row(source);
            for (acc, &level) in self.drive.iter_mut().zip(row) {
                *acc += level as f64;
            }
        }
        let inv_max = 1.0 / self.synapses.max_level() as f64;
        for (state, &sum) in self.states.iter_mut().zip(&self.drive) {
            state.integrate(sum * inv_max);
        }

        self.candidates.clear();
        let mut winner: Option<usize> = None;
        let mut best = f64::NEG_INFINITY;
        for (i, state) in self.states.iter().enumerate() {
            if state.membrane >= self.params[i].theta + self.adapt[i] {
                self.candidates.push(i);
                if state.membrane > best {
                    best = state.membrane;
                    winner = Some(i);
                }
            }
        }

        self.fired.clear();
        if let Some(w) = winner {
            if self.lateral_inhibition == 0.0 {
                for idx in 0..self.candidates.len() {
                    let i = self.candidates[idx];
                    self.states[i].fire(&self.params[i], t);
                    self.fired.push(i);
                }
            } else {
                self.states[w].fire(&self.params[w], t);
                self.fired.push(w);
                for i in 0..self.n {
                    if i != w {
                        self.states[i]
                            .apply_inhibition(self.lateral_inhibition)
                            .expect("lateral inhibition is non-negative");
                    }
                }
            }
            if training {
                for idx in 0..self.fired.len() {
                    let i = self.fired[idx];
                    self.adapt[i] += self.params[i].self_inhibition;
                    self.synapses
                        .on_post_fire(i, &self.pre_trace, t, &self.stdp, dt_ps);
                    self.post_trace
                        .record_spike(i, t)
                        .expect("neuron index within layer bounds");
                }
            }
        }
        winner
    }

    /// One exposure on a continuing clock; no reset afterwards.
    fn run_exposure(
        &mut self,
        train: &SpikeTrain,
        training: bool,
        clock: &mut SimClock,
    ) -> Result<(), NetworkError> {
        if train.n_sources() != self.k || train.n_steps() != self.n_steps {
            return Err(NetworkError::TrainDimensions {
                expected_sources: self.k,
                expected_steps: self.n_steps,
                got_sources: train.n_sources(),
                got_steps: train.n_steps(),
            });
        }
        let mut spikes: Vec<usize> = Vec::with_capacity(self.k.min(64));
        for step_idx in 0..self.n_steps {
            spikes.clear();
            spikes.extend(train.sources_at(step_idx));
            self.step(&spikes, clock.step(), training);
            clock.tick();
        }
        Ok(())
    }

    fn reset_exposure_state(&mut self) {
        let resting = self.cfg.resting;
        for state in &mut self.states {
            state.reset(resting);
        }
        self.pre_trace.clear();
        self.post_trace.clear();
    }

    /// Drive the network with one spike train for a full exposure, then
    /// reset membranes and traces (synapse levels persist). Returns the
    /// per-neuron output spike counts.
    pub fn present_image(
        &mut self,
        train: &SpikeTrain,
        training: bool,
    ) -> Result<Vec<u32>, NetworkError> {
        let mut clock = SimClock::new(self.cfg.dt_ps).expect("validated dt");
        self.run_exposure(train, training, &mut clock)?;
        let counts = self.states.iter().map(|s| s.fire_count).collect();
        self.reset_exposure_state();
        Ok(counts)
    }

    fn prepared(&self, image: &PixelImage) -> Result<PixelImage, NetworkError> {
        Ok(downscale(image, self.cfg.input_side, self.cfg.input_side)?)
    }

    /// One unsupervised epoch: uniform random weight init, then every
    /// image once in dataset order with plasticity on. No weight
    /// normalization anywhere; levels only ever clip to their range.
    /// Weight snapshots are taken at iterations 0, ceil(T/3), ceil(2T/3)
    /// and T.
    ///
    /// Training streams the exposures back to back on one continuous
    /// clock: membranes, spike traces and the threshold adaptation carry
    /// across image boundaries exactly as they would in hardware fed at
    /// the exposure cadence. All state except the weights is cleared once
    /// at the end.
    pub fn train(&mut self, dataset: &Dataset) -> Result<Vec<WeightSnapshot>, NetworkError> {
        if dataset.is_empty() {
            return Err(NetworkError::EmptyDataset);
        }
        let mut init_rng = make_rng(self.cfg.seed, "weight-init")?;
        self.synapses.init_uniform(&mut init_rng);

        let total = dataset.len();
        let mut marks = vec![0, total.div_ceil(3), (2 * total).div_ceil(3), total];
        marks.dedup();
        let mut snapshots = Vec::with_capacity(marks.len());

        let enc_parent = make_rng(self.cfg.seed, "encoding")?;
        let mut clock = SimClock::new(self.cfg.dt_ps).expect("validated dt");
        for (i, (image, _)) in dataset.items.iter().enumerate() {
            if marks.binary_search(&i).is_ok() {
                snapshots.push(WeightSnapshot {
                    iteration: i,
                    matrix: self.synapses.clone(),
                });
            }
            let mut rng = enc_parent.fork(&[PASS_TRAIN, dataset.split.tag(), i as u64]);
            let prepared = self.prepared(image)?;
            let spikes = encode(&prepared, &self.cfg, &mut rng)?;
            self.run_exposure(&spikes, true, &mut clock)?;
        }
        snapshots.push(WeightSnapshot {
            iteration: total,
            matrix: self.synapses.clone(),
        });
        // The adaptation is a training-loop quantity; the frozen network
        // evaluates without it.
        self.reset_exposure_state();
        self.adapt.fill(0.0);
        Ok(snapshots)
    }

    /// Replay the training set with plasticity off and label each neuron
    /// with the class it spiked most for. Neurons that never spiked stay
    /// unassigned and are excluded from prediction.
    pub fn assign_labels(&mut self, dataset: &Dataset) -> Result<LabelAssignment, NetworkError> {
        if dataset.is_empty() {
            return Err(NetworkError::EmptyDataset);
        }
        let mut totals = vec![[0u64; 2]; self.n];
        let enc_parent = make_rng(self.cfg.seed, "encoding")?;
        for (i, (image, label)) in dataset.items.iter().enumerate() {
            if *label > 1 {
                return Err(NetworkError::InvalidLabel(*label));
            }
            let mut rng = enc_parent.fork(&[PASS_ASSIGN, dataset.split.tag(), i as u64]);
            let prepared = self.prepared(image)?;
            let spikes = encode(&prepared, &self.cfg, &mut rng)?;
            let counts = self.present_image(&spikes, false)?;
            for (neuron, &count) in counts.iter().enumerate() {
                totals[neuron][*label as usize] += count as u64;
            }
        }
        // Zeros carry roughly twice the ink of ones, so raw counts skew
        // toward class 0 for every neuron. Compare each neuron's share of
        // a class's total activity instead of raw counts.
        let class_sums = totals.iter().fold([0u64; 2], |mut acc, t| {
            acc[0] += t[0];
            acc[1] += t[1];
            acc
        });
        let share = |count: u64, class: usize| {
            if class_sums[class] == 0 {
                0.0
            } else {
                count as f64 / class_sums[class] as f64
            }
        };
        let labels: Vec<Option<u8>> = totals
            .iter()
            .map(|&[zero, one]| {
                if zero == 0 && one == 0 {
                    None
                } else if share(one, 1) > share(zero, 0) {
                    Some(1)
                } else {
                    Some(0)
                }
            })
            .collect();
        if labels.iter().all(Option::is_none) {
            return Err(NetworkError::UntrainedNetwork);
        }
        let n_images = dataset.len() as f64;
        let baseline = totals
            .iter()
            .map(|&[zero, one]| (zero + one) as f64 / n_images)
            .collect();
        Ok(LabelAssignment {
            labels,
            totals,
            baseline,
        })
    }

    /// Classify one image by rate vote. Each class's population is scored
    /// by its pooled spike count relative to its usual training-time
    /// rate, which cancels the ink advantage heavier digits have in raw
    /// counts. Class 0 wins ties, a class with no assigned neurons scores
    /// 0, and a fully silent network abstains.
    pub fn predict(
        &mut self,
        labels: &LabelAssignment,
        image: &PixelImage,
        rng: &mut RngStream,
    ) -> Result<Prediction, NetworkError> {
        if labels.assigned() == 0 {
            return Err(NetworkError::NoAssignedNeurons);
        }
        let prepared = self.prepared(image)?;
        let spikes = encode(&prepared, &self.cfg, rng)?;
        let counts = self.present_image(&spikes, false)?;
        if counts.iter().all(|&c| c == 0) {
            return Ok(Prediction::Abstain);
        }
        let mut sums = [0.0f64; 2];
        let mut norms = [0.0f64; 2];
        for (neuron, &count) in counts.iter().enumerate() {
            if let Some(class) = labels.label(neuron) {
                sums[class as usize] += count as f64;
                norms[class as usize] += labels.baseline(neuron);
            }
        }
        let score = |c: usize| if norms[c] > 0.0 { sums[c] / norms[c] } else { 0.0 };
        Ok(Prediction::Class(if score(1) > score(0) { 1 } else { 0 }))
    }

    /// Accuracy over a dataset; abstentions count as incorrect.
    pub fn evaluate(
        &mut self,
        labels: &LabelAssignment,
        dataset: &Dataset,
    ) -> Result<EvalStats, NetworkError> {
        if dataset.is_empty() {
            return Err(NetworkError::EmptyDataset);
        }
        let mut stats = EvalStats::default();
        let enc_parent = make_rng(self.cfg.seed, "encoding")?;
        for (i, (image, label)) in dataset.items.iter().enumerate() {
            if *label > 1 {
                return Err(NetworkError::InvalidLabel(*label));
            }
            let mut rng = enc_parent.fork(&[PASS_EVAL, dataset.split.tag(), i as u64]);
            let prediction = self.predict(labels, image, &mut rng)?;
            stats.total += 1;
            stats.per_class_total[*label as usize] += 1;
            match prediction {
                Prediction::Class(c) if c == *label => {
                    stats.correct += 1;
                    stats.per_class_correct[*label as usize] += 1;
                }
                Prediction::Class(_) => {}
                Prediction::Abstain => stats.abstained += 1,
            }
        }
        Ok(stats)
    }
}

/// Weight matrix captured at a training iteration.
#[derive(Debug, Clone)]
pub struct WeightSnapshot {
    pub iteration: usize,
    pub matrix: SynapseMatrix,
}

/// Per-neuron class labels derived from training-set spike totals.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelAssignment {
    labels: Vec<Option<u8>>,
    totals: Vec<[u64; 2]>,
    baseline: Vec<f64>,
}

impl LabelAssignment {
    pub fn label(&self, neuron: usize) -> Option<u8> {
        self.labels[neuron]
    }

    pub fn labels(&self) -> &[Option<u8>] {
        &self.labels
    }

    /// Per-class spike totals the label was derived from.
    pub fn totals(&self, neuron: usize) -> [u64; 2] {
        self.totals[neuron]
    }

    /// Mean spikes per image this neuron emitted while being labeled.
    pub fn baseline(&self, neuron: usize) -> f64 {
        self.baseline[neuron]
    }

    pub fn assigned(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Class(u8),
    Abstain,
}

/// Classification tallies for one dataset pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalStats {
    pub total: usize,
    pub correct: usize,
    pub abstained: usize,
    pub per_class_total: [usize; 2],
    pub per_class_correct: [usize; 2],
}

impl EvalStats {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    pub fn per_class_accuracy(&self, class: usize) -> f64 {
        self.per_class_correct[class] as f64 / self.per_class_total[class] as f64
    }
}

/// Hardware cost model: junction count grows with the synapse fan-in
/// (`c_syn * K * N`) plus the all-to-all winner-take-all coupling
/// (`c_quad * N^2`).
#[derive(Debug, Clone, PartialEq)]
pub struct JjCostModel {
    pub c_syn_per_synapse: f64,
    pub c_quad_per_neuron_pair: f64,
}

impl Default for JjCostModel {
    /// Coefficients solve the two 14x14-input reference points exactly:
    /// `c_syn * 784 + c_quad * 16 = 31_000` and
    /// `c_syn * 1764 + c_quad * 81 = 85_000`. A purely linear-in-N model
    /// has no positive solution, which is what motivates the quadratic
    /// coupling term.
    fn default() -> Self {
        Self {
            c_syn_per_synapse: 28_775.0 / 882.0,
            c_quad_per_neuron_pair: 3_050.0 / 9.0,
        }
    }
}

/// Estimated junction count for a K-input, N-neuron network.
pub fn estimate_jj(k: usize, n: usize, model: &JjCostModel) -> Result<u64, NetworkError> {
    if k == 0 || n == 0 {
        return Err(NetworkError::InvalidCounts { k, n });
    }
    let syn = model.c_syn_per_synapse;
    let quad = model.c_quad_per_neuron_pair;
    if !(syn > 0.0 && syn.is_finite() && quad > 0.0 && quad.is_finite()) {
        return Err(NetworkError::InvalidCostModel(format!(
            "coefficients must be positive and finite, got {syn} and {quad}"
        )));
    }
    let total = syn * (k as f64) * (n as f64) + quad * (n as f64) * (n as f64);
    Ok(total.round() as u64)
}

/// Everything one full experiment produces.
#[derive(Debug)]
pub struct ExperimentResult {
    pub network: Network,
    pub labels: LabelAssignment,
    pub snapshots: Vec<WeightSnapshot>,
    pub train_stats: EvalStats,
    pub test_stats: EvalStats,
}

/// The end-to-end pipeline: draw both 5% subsets, train one epoch, label
/// neurons on the training set, and evaluate both splits.
pub fn run_experiment(
    cfg: &RunConfig,
    train_pool: &[(PixelImage, u8)],
    test_pool: &[(PixelImage, u8)],
) -> Result<ExperimentResult, NetworkError> {
    cfg.validate()?;
    let shuffle = make_rng(cfg.seed, "data-shuffle")?;
    let train_ds = select_subset(train_pool, Split::Train, &shuffle)?;
    let test_ds = select_subset(test_pool, Split::Test, &shuffle)?;
    let mut network = Network::new(cfg)?;
    let snapshots = network.train(&train_ds)?;
    let labels = network.assign_labels(&train_ds)?;
    let train_stats = network.evaluate(&labels, &train_ds)?;
    let test_stats = network.evaluate(&labels, &test_ds)?;
    Ok(ExperimentResult {
        network,
        labels,
        snapshots,
        train_stats,
        test_stats,
    })
}
