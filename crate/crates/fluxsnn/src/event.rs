//! A single spike: a unit pulse from one source at one clock step.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpikeEvent {
    pub source: usize,
    pub step: u64,
}
