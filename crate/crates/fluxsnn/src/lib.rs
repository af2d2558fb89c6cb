//! Picosecond-clocked simulator of a superconducting two-layer spiking
//! neural network.
//!
//! Input pixels are rate-coded into Poisson spike trains, weighted by a
//! 4-bit synapse matrix, and integrated by leaky integrate-and-fire
//! neurons whose post-fire hyperpolarization acts as a dynamic threshold.
//! A winner-take-all feedback keeps at most one excitatory neuron firing
//! per step. Training is online and unsupervised: a quantized
//! spike-trace STDP rule steps synapse levels up on causal pre/post
//! pairings and down on anti-causal ones, with hard clipping and no
//! weight normalization. The crate also ships the dataset plumbing
//! (IDX parsing, the 5% digit-0/1 subset rule), checkpointing, weight-map
//! export, and a junction-count estimator for sizing the hardware.
//!
//! Everything is deterministic given a `RunConfig` and its seed: all
//! randomness flows through named substreams, so a run reproduces
//! bit-identically.

pub mod clock;
pub mod config;
pub mod data;
pub mod encoding;
pub mod event;
pub mod network;
pub mod neuron;
pub mod plasticity;
pub mod rng;

pub use clock::{decay_factor, SimClock};
pub use config::RunConfig;
pub use data::{load_idx, select_subset, Dataset, Split};
pub use encoding::{downscale, encode, PixelImage, SpikeTrain};
pub use event::SpikeEvent;
pub use network::{
    estimate_jj, run_experiment, EvalStats, ExperimentResult, JjCostModel, LabelAssignment,
    Network, NetworkError, Prediction, WeightSnapshot,
};
pub use neuron::{NeuronParams, NeuronState};
pub use plasticity::{continuous_dw, StdpParams, SynapseMatrix, TraceState};
pub use rng::{make_rng, RngStream};
