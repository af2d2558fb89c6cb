//! Spike traces and the quantized, windowed STDP engine.
//!
//! A trace is a 1-bit record of recent activity: a spike overwrites the
//! stored timestamp (reset-then-set, never accumulate) and the trace then
//! reads active for exactly `window_steps` steps. Weight updates are
//! single-shot level steps gated by those windows: a post-synaptic fire
//! adds `dw_plus_levels` to every synapse whose pre-trace is active, and a
//! pre-synaptic spike removes `dw_minus_levels` from every synapse whose
//! post-trace is active. Levels clip to `{0..max_level}`.
//!
//! [`continuous_dw`] is the smooth asymmetric curve the window quantizes;
//! it is a reference for testing, not part of the training path.

use crate::config::RunConfig;
use crate::rng::RngStream;
use rand::RngExt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlasticityError {
    #[error("source index {index} out of bounds for trace over {len} sources")]
    SourceOutOfBounds { index: usize, len: usize },
    #[error("weight change is undefined at delta_t = 0")]
    ZeroDeltaT,
    #[error("invalid plasticity parameters: {0}")]
    InvalidParams(String),
    #[error("level {level} out of range, maximum is {max_level}")]
    LevelOutOfRange { level: u8, max_level: u8 },
}

/// Per-source binary spike trace with refresh-on-spike expiry.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceState {
    last_spike_step: Vec<Option<u64>>,
    window_steps: u64,
}

impl TraceState {
    pub fn new(n_sources: usize, window_steps: u64) -> Self {
        Self {
            last_spike_step: vec![None; n_sources],
            window_steps,
        }
    }

    pub fn len(&self) -> usize {
        self.last_spike_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.last_spike_step.is_empty()
    }

    pub fn window_steps(&self) -> u64 {
        self.window_steps
    }

    /// Overwrite the source's timestamp with this spike (refresh, never
    /// accumulate: a burst does not extend activity past the last spike's
    /// window).
    pub fn record_spike(&mut self, source: usize, step: u64) -> Result<(), PlasticityError> {
        let len = self.last_spike_step.len();
        let slot = self
            .last_spike_step
            .get_mut(source)
            .ok_or(PlasticityError::SourceOutOfBounds { index: source, len })?;
        *slot = Some(step);
        Ok(())
    }

    /// Steps since the source last spiked, if it ever did and `step` is
    /// not before that spike.
    pub fn offset(&self, source: usize, step: u64) -> Option<u64> {
        match self.last_spike_step[source] {
            Some(last) if step >= last => Some(step - last),
            _ => None,
        }
    }

    /// Windowed 1-bit readout: active exactly for offsets
    /// `0..window_steps` after the most recent spike (inclusive at 0,
    /// exclusive at the window end).
    pub fn active(&self, source: usize, step: u64) -> bool {
        matches!(self.offset(source, step), Some(off) if off < self.window_steps)
    }

    pub fn clear(&mut self) {
        self.last_spike_step.fill(None);
    }
}

/// An additional readout window with its own level deltas, used when the
/// update resolution is more than one bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StdpTap {
    pub tau_trace_ps: f64,
    pub dw_plus_levels: u8,
    pub dw_minus_levels: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StdpParams {
    pub dw_plus_levels: u8,
    pub dw_minus_levels: u8,
    pub tau_trace_ps: f64,
    /// Extra windows for multi-bit update resolution; empty by default.
    pub extra_taps: Vec<StdpTap>,
    // Continuous reference curve only; unused by the engine.
    pub a_pot: f64,
    pub a_dep: f64,
    pub tau_pot_ps: f64,
    pub tau_dep_ps: f64,
}

impl StdpParams {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            dw_plus_levels: cfg.dw_plus_levels,
            dw_minus_levels: cfg.dw_minus_levels,
            tau_trace_ps: cfg.tau_trace_ps,
            extra_taps: Vec::new(),
            a_pot: cfg.dw_plus_levels as f64,
            a_dep: -(cfg.dw_minus_levels as f64),
            tau_pot_ps: cfg.tau_trace_ps,
            tau_dep_ps: cfg.tau_trace_ps,
        }
    }
}

/// The smooth asymmetric learning curve: potentiation `A_pot e^{-dt/tau}`
/// for a causal pair, depression `A_dep e^{+dt/tau}` for an anti-causal
/// one (`A_dep` carries the negative sign). Undefined at `delta_t = 0`.
pub fn continuous_dw(delta_t_ps: f64, p: &StdpParams) -> Result<f64, PlasticityError> {
    if delta_t_ps == 0.0 || delta_t_ps.is_nan() {
        return Err(PlasticityError::ZeroDeltaT);
    }
    if !p.tau_pot_ps.is_finite()
        || p.tau_pot_ps <= 0.0
        || !p.tau_dep_ps.is_finite()
        || p.tau_dep_ps <= 0.0
    {
        return Err(PlasticityError::InvalidParams(
            "tau_pot_ps and tau_dep_ps must be positive".into(),
        ));
    }
    if delta_t_ps > 0.0 {
        Ok(p.a_pot * (-delta_t_ps / p.tau_pot_ps).exp())
    } else {
        Ok(p.a_dep * (delta_t_ps / p.tau_dep_ps).exp())
    }
}

/// K x N integer synapse levels; effective weight is `level / max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynapseMatrix {
    k: usize,
    n: usize,
    max_level: u8,
    // Row-major by source so per-spike integration reads one contiguous row.
    levels: Vec<u8>,
}

impl SynapseMatrix {
    pub fn new(k: usize, n: usize, weight_levels: u8) -> Result<Self, PlasticityError> {
        if weight_levels < 2 {
            return Err(PlasticityError::InvalidParams(format!(
                "weight_levels must be at least 2, got {weight_levels}"
            )));
        }
        Ok(Self {
            k,
            n,
            max_level: weight_levels - 1,
            levels: vec![0; k * n],
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_level(&self) -> u8 {
        self.max_level
    }

    /// Draw every level independently and uniformly from `{0..max_level}`.
    pub fn init_uniform(&mut self, rng: &mut RngStream) {
        for level in &mut self.levels {
            *level = rng.random_range(0..=self.max_level);
        }
    }

    pub fn level(&self, source: usize, neuron: usize) -> u8 {
        assert!(source < self.k && neuron < self.n);
        self.levels[source * self.n + neuron]
    }

    pub fn set_level(&mut self, source: usize, neuron: usize, level: u8) -> Result<(), PlasticityError> {
        if level > self.max_level {
            return Err(PlasticityError::LevelOutOfRange {
                level,
                max_level: self.max_level,
            });
        }
        assert!(source < self.k && neuron < self.n);
        self.levels[source * self.n + neuron] = level;
        Ok(())
    }

    pub fn weight(&self, source: usize, neuron: usize) -> f64 {
        self.level(source, neuron) as f64 / self.max_level as f64
    }

    /// All levels for one source, indexed by neuron.
    pub fn row(&self, source: usize) -> &[u8] {
        &self.levels[source * self.n..(source + 1) * self.n]
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    /// Column `neuron` as a per-source weight vector.
    pub fn column_weights(&self, neuron: usize) -> Vec<f64> {
        (0..self.k).map(|j| self.weight(j, neuron)).collect()
    }

    fn plus_levels_at(offset: u64, trace_window: u64, p: &StdpParams, dt_ps: f64) -> u8 {
        let mut dw = if offset < trace_window { p.dw_plus_levels } else { 0 };
        for tap in &p.extra_taps {
            let window = (tap.tau_trace_ps / dt_ps).round() as u64;
            if offset < window {
                dw = dw.saturating_add(tap.dw_plus_levels);
            }
        }
        dw
    }

    fn minus_levels_at(offset: u64, trace_window: u64, p: &StdpParams, dt_ps: f64) -> u8 {
        let mut dw = if offset < trace_window { p.dw_minus_levels } else { 0 };
        for tap in &p.extra_taps {
            let window = (tap.tau_trace_ps / dt_ps).round() as u64;
            if offset < window {
                dw = dw.saturating_add(tap.dw_minus_levels);
            }
        }
        dw
    }

    /// Potentiate on a post-synaptic fire: every input whose pre-trace is
    /// active steps up, clipped at `max_level`. Touches only column
    /// `neuron`.
    pub fn on_post_fire(
        &mut self,
        neuron: usize,
        pre_trace: &TraceState,
        step: u64,
        p: &StdpParams,
        dt_ps: f64,
    ) {
        assert!(neuron < self.n);
        for source in 0..self.k {
            if let Some(offset) = pre_trace.offset(source, step) {
                let dw = Self::plus_levels_at(offset, pre_trace.window_steps(), p, dt_ps);
                if dw > 0 {
                    let slot = &mut self.levels[source * self.n + neuron];
                    *slot = slot.saturating_add(dw).min(self.max_level);
                }
            }
        }
    }

    /// Depress on a pre-synaptic spike: every neuron whose post-trace is
    /// active steps down, clipped at 0. Touches only row `source`.
    pub fn on_pre_spike(
        &mut self,
        source: usize,
        post_trace: &TraceState,
        step: u64,
        p: &StdpParams,
        dt_ps: f64,
    ) {
        assert!(source < self.k);
        for neuron in 0..self.n {
            if let Some(offset) = post_trace.offset(neuron, step) {
                let dw = Self::minus_levels_at(offset, post_trace.window_steps(), p, dt_ps);
                if dw > 0 {
                    let slot = &mut self.levels[source * self.n + neuron];
                    *slot = slot.saturating_sub(dw);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_rng;

    fn params() -> StdpParams {
        StdpParams::from_config(&RunConfig::default())
    }

    fn matrix_with(level: u8) -> SynapseMatrix {
        let mut m = SynapseMatrix::new(1, 1, 16).unwrap();
        m.set_level(0, 0, level).unwrap();
        m
    }

    #[test]
    fn spike_opens_a_window() {
        let mut trace = TraceState::new(1, 10);
        trace.record_spike(0, 5).unwrap();
        for t in 5..15 {
            assert!(trace.active(0, t), "inactive at {t}");
        }
        assert!(!trace.active(0, 15));
        assert!(!trace.active(0, 4));
    }

    #[test]
    fn refresh_never_extends_additively() {
        let mut trace = TraceState::new(1, 10);
        trace.record_spike(0, 5).unwrap();
        assert!(trace.active(0, 8));
        trace.record_spike(0, 9).unwrap();
        for t in 9..19 {
            assert!(trace.active(0, t));
        }
        assert!(!trace.active(0, 19));
    }

    #[test]
    fn empty_trace_is_never_active() {
        let trace = TraceState::new(3, 10);
        for t in 0..100 {
            assert!(!trace.active(1, t));
        }
    }

    #[test]
    fn wide_window_readout() {
        // A 25-step window still reads at offset 15.
        let mut trace = TraceState::new(1, 25);
        trace.record_spike(0, 5).unwrap();
        assert!(trace.active(0, 20));
        assert!(!trace.active(0, 30));
    }

    #[test]
    fn out_of_bounds_source_rejected() {
        let mut trace = TraceState::new(2, 10);
        assert_eq!(
            trace.record_spike(2, 0),
            Err(PlasticityError::SourceOutOfBounds { index: 2, len: 2 })
        );
    }

    #[test]
    fn clear_erases_all_activity() {
        let mut trace = TraceState::new(2, 10);
        trace.record_spike(0, 3).unwrap();
        trace.clear();
        assert!(!trace.active(0, 3));
    }

    #[test]
    fn potentiation_steps_and_clips() {
        let p = params();
        let mut pre = TraceState::new(1, 10);
        pre.record_spike(0, 4).unwrap();

        let mut m = matrix_with(7);
        m.on_post_fire(0, &pre, 6, &p, 1.0);
        assert_eq!(m.level(0, 0), 9);

        let mut m = matrix_with(15);
        m.on_post_fire(0, &pre, 6, &p, 1.0);
        assert_eq!(m.level(0, 0), 15);

        // Inactive trace: no change.
        let mut m = matrix_with(7);
        m.on_post_fire(0, &pre, 30, &p, 1.0);
        assert_eq!(m.level(0, 0), 7);
    }

    #[test]
    fn depression_steps_and_clips() {
        let p = params();
        let mut post = TraceState::new(1, 10);
        post.record_spike(0, 4).unwrap();

        let mut m = matrix_with(7);
        m.on_pre_spike(0, &post, 6, &p, 1.0);
        assert_eq!(m.level(0, 0), 6);

        let mut m = matrix_with(0);
        m.on_pre_spike(0, &post, 6, &p, 1.0);
        assert_eq!(m.level(0, 0), 0);

        let mut m = matrix_with(7);
        m.on_pre_spike(0, &post, 30, &p, 1.0);
        assert_eq!(m.level(0, 0), 7);
    }

    #[test]
    fn updates_are_local_to_one_column_or_row() {
        let p = params();
        let mut m = SynapseMatrix::new(4, 3, 16).unwrap();
        for j in 0..4 {
            for i in 0..3 {
                m.set_level(j, i, 8).unwrap();
            }
        }
        let mut pre = TraceState::new(4, 10);
        for j in 0..4 {
            pre.record_spike(j, 0).unwrap();
        }
        let before = m.clone();
        m.on_post_fire(1, &pre, 0, &p, 1.0);
        for j in 0..4 {
            for i in 0..3 {
                if i == 1 {
                    assert_eq!(m.level(j, i), 10);
                } else {
                    assert_eq!(m.level(j, i), before.level(j, i));
                }
            }
        }

        let mut post = TraceState::new(3, 10);
        for i in 0..3 {
            post.record_spike(i, 0).unwrap();
        }
        let before = m.clone();
        m.on_pre_spike(2, &post, 0, &p, 1.0);
        for j in 0..4 {
            for i in 0..3 {
                if j == 2 {
                    assert_eq!(m.level(j, i), before.level(j, i) - 1);
                } else {
                    assert_eq!(m.level(j, i), before.level(j, i));
                }
            }
        }
    }

    #[test]
    fn continuous_curve_closed_forms() {
        let mut p = params();
        p.a_pot = 2.0;
        p.a_dep = -1.0;
        p.tau_pot_ps = 10.0;
        p.tau_dep_ps = 10.0;

        let dw = continuous_dw(10.0, &p).unwrap();
        assert!((dw - 0.7357588823428847).abs() < 1e-15);
        let dw = continuous_dw(-10.0, &p).unwrap();
        assert!((dw - (-0.36787944117144233)).abs() < 1e-15);
        let dw = continuous_dw(1e6, &p).unwrap();
        assert!(dw.abs() < 1e-300);
        assert_eq!(continuous_dw(0.0, &p), Err(PlasticityError::ZeroDeltaT));
    }

    #[test]
    fn multi_window_taps_sum_their_levels() {
        let mut p = params();
        p.extra_taps.push(StdpTap {
            tau_trace_ps: 25.0,
            dw_plus_levels: 1,
            dw_minus_levels: 0,
        });
        let mut pre = TraceState::new(1, 10);
        pre.record_spike(0, 0).unwrap();

        // Offset 5: inside both windows, +2 + 1.
        let mut m = matrix_with(0);
        m.on_post_fire(0, &pre, 5, &p, 1.0);
        assert_eq!(m.level(0, 0), 3);

        // Offset 15: only the 25 ps tap is open.
        let mut m = matrix_with(0);
        m.on_post_fire(0, &pre, 15, &p, 1.0);
        assert_eq!(m.level(0, 0), 1);

        // Offset 30: everything expired.
        let mut m = matrix_with(0);
        m.on_post_fire(0, &pre, 30, &p, 1.0);
        assert_eq!(m.level(0, 0), 0);
    }

    #[test]
    fn levels_stay_in_range_under_random_update_storm() {
        let p = params();
        let mut m = SynapseMatrix::new(8, 4, 16).unwrap();
        let mut rng = make_rng(99, "weight-init").unwrap();
        m.init_uniform(&mut rng);
        let mut pre = TraceState::new(8, 10);
        let mut post = TraceState::new(4, 10);
        for step in 0..20_000u64 {
            let source = rng.random_range(0..8);
            let neuron = rng.random_range(0..4);
            match rng.random_range(0..4u8) {
                0 => pre.record_spike(source, step).unwrap(),
                1 => post.record_spike(neuron, step).unwrap(),
                2 => m.on_post_fire(neuron, &pre, step, &p, 1.0),
                _ => m.on_pre_spike(source, &post, step, &p, 1.0),
            }
            debug_assert!(m.levels().iter().all(|&l| l <= 15));
        }
        assert!(m.levels().iter().all(|&l| l <= 15));
    }

    #[test]
    fn uniform_init_covers_all_levels() {
        let mut m = SynapseMatrix::new(50, 40, 16).unwrap();
        let mut rng = make_rng(5, "weight-init").unwrap();
        m.init_uniform(&mut rng);
        let mut seen = [0usize; 16];
        for &l in m.levels() {
            seen[l as usize] += 1;
        }
        // 2000 draws over 16 bins: every bin occupied, roughly uniform.
        for (level, &count) in seen.iter().enumerate() {
            assert!(count > 60, "level {level} drawn only {count} times");
        }
    }
}
