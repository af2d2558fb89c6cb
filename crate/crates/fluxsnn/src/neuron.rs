//! Leaky integrate-and-fire neuron with a dynamic threshold realized as
//! post-fire hyperpolarization.
//!
//! Firing resets the membrane to `resting - self_inhibition` instead of
//! just `resting`, so immediately after a spike the neuron needs extra
//! drive to fire again; the deficit then leaks away with the ordinary
//! membrane time constant. The membrane is a real value in weight units
//! (1.0 = one maximum-weight input spike) and may sit below resting.

use crate::clock::{decay_factor, ClockError};
use crate::config::RunConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NeuronError {
    #[error("weighted input must be finite and non-negative, got {0}")]
    InvalidInput(f64),
    #[error("inhibition amount must be finite and non-negative, got {0}")]
    InvalidInhibition(f64),
    #[error("invalid neuron parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Clock(#[from] ClockError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuronParams {
    /// Firing threshold in weight units.
    pub theta: f64,
    pub tau_mem_ps: f64,
    /// Depth of the post-fire dip below resting; 0 degrades to a plain
    /// reset-to-resting LIF neuron.
    pub self_inhibition: f64,
    pub resting: f64,
}

impl NeuronParams {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            theta: cfg.theta_spikes,
            tau_mem_ps: cfg.tau_mem_ps,
            self_inhibition: cfg.self_inhibition_spikes,
            resting: cfg.resting,
        }
    }

    pub fn validate(&self) -> Result<(), NeuronError> {
        if !self.theta.is_finite() || !self.resting.is_finite() || self.theta <= self.resting {
            return Err(NeuronError::InvalidParams(format!(
                "theta ({}) must exceed resting ({})",
                self.theta, self.resting
            )));
        }
        if !self.tau_mem_ps.is_finite() || self.tau_mem_ps <= 0.0 {
            return Err(NeuronError::InvalidParams(format!(
                "tau_mem_ps must be positive, got {}",
                self.tau_mem_ps
            )));
        }
        if !self.self_inhibition.is_finite() || self.self_inhibition < 0.0 {
            return Err(NeuronError::InvalidParams(format!(
                "self_inhibition must be non-negative, got {}",
                self.self_inhibition
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuronState {
    pub membrane: f64,
    /// Output spikes emitted during the current exposure.
    pub fire_count: u32,
    pub last_fire_step: Option<u64>,
}

impl NeuronState {
    pub fn new(resting: f64) -> Self {
        Self {
            membrane: resting,
            fire_count: 0,
            last_fire_step: None,
        }
    }

    /// Leak toward resting by a precomputed per-step factor.
    pub fn decay(&mut self, factor: f64, resting: f64) {
        self.membrane = resting + (self.membrane - resting) * factor;
    }

    /// Add feed-forward drive for this step.
    pub fn integrate(&mut self, weighted_input: f64) {
        self.membrane += weighted_input;
    }

    /// Emit a spike: reset below resting and record the step.
    pub fn fire(&mut self, params: &NeuronParams, step: u64) {
        self.membrane = params.resting - params.self_inhibition;
        self.fire_count += 1;
        self.last_fire_step = Some(step);
    }

    /// One full clock step of an isolated neuron: leak, integrate, and
    /// fire when the membrane reaches threshold. Returns whether the
    /// neuron fired (at most one spike per step).
    pub fn step(
        &mut self,
        weighted_input: f64,
        params: &NeuronParams,
        dt_ps: f64,
        step: u64,
    ) -> Result<bool, NeuronError> {
        if !weighted_input.is_finite() || weighted_input < 0.0 {
            return Err(NeuronError::InvalidInput(weighted_input));
        }
        let factor = decay_factor(params.tau_mem_ps, dt_ps)?;
        self.decay(factor, params.resting);
        self.integrate(weighted_input);
        if self.membrane >= params.theta {
            self.fire(params, step);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Subtract lateral (or any external) inhibition; there is no floor,
    /// the membrane may fall below `resting - self_inhibition`.
    pub fn apply_inhibition(&mut self, amount: f64) -> Result<(), NeuronError> {
        if !amount.is_finite() || amount < 0.0 {
            return Err(NeuronError::InvalidInhibition(amount));
        }
        self.membrane -= amount;
        Ok(())
    }

    /// Inter-image reset: membrane back to resting, counters cleared.
    pub fn reset(&mut self, resting: f64) {
        self.membrane = resting;
        self.fire_count = 0;
        self.last_fire_step = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_params() -> NeuronParams {
        NeuronParams::from_config(&RunConfig::default())
    }

    #[test]
    fn resting_is_a_fixed_point() {
        let params = default_params();
        let mut state = NeuronState::new(params.resting);
        let fired = state.step(0.0, &params, 1.0, 0).unwrap();
        assert!(!fired);
        assert_eq!(state.membrane, 0.0);
    }

    #[test]
    fn eight_simultaneous_unit_spikes_fire_and_hyperpolarize() {
        let params = default_params();
        let mut state = NeuronState::new(0.0);
        let fired = state.step(8.0, &params, 1.0, 0).unwrap();
        assert!(fired);
        assert_eq!(state.membrane, -32.0);
        assert_eq!(state.fire_count, 1);
        assert_eq!(state.last_fire_step, Some(0));
    }

    #[test]
    fn subthreshold_membrane_decays_exponentially() {
        // 7.5 * exp(-1) after one 25 ps step at tau 25, frozen closed form.
        let params = default_params();
        let mut state = NeuronState::new(0.0);
        state.membrane = 7.5;
        let fired = state.step(0.0, &params, 25.0, 0).unwrap();
        assert!(!fired);
        let expected = 7.5 * (-1.0_f64).exp();
        assert!((state.membrane - expected).abs() < 1e-12);
        assert!((expected - 2.7590958087858173).abs() < 1e-15);
    }

    #[test]
    fn widely_spaced_spikes_never_reach_a_two_spike_threshold() {
        // Two unit spikes 75 ps apart with tau 25: the first has decayed
        // to exp(-3) when the second arrives, so theta = 2 is unreachable.
        let params = NeuronParams {
            theta: 2.0,
            tau_mem_ps: 25.0,
            self_inhibition: 32.0,
            resting: 0.0,
        };
        let mut state = NeuronState::new(0.0);
        for t in 0..=75u64 {
            let input = if t == 0 || t == 75 { 1.0 } else { 0.0 };
            let fired = state.step(input, &params, 1.0, t).unwrap();
            assert!(!fired, "unexpected fire at {t}");
        }
        let expected = (-3.0_f64).exp() + 1.0;
        assert!((state.membrane - expected).abs() < 1e-12);
    }

    #[test]
    fn inhibition_examples() {
        let mut state = NeuronState::new(0.0);
        state.membrane = 5.0;
        state.apply_inhibition(0.0).unwrap();
        assert_eq!(state.membrane, 5.0);
        state.apply_inhibition(32.0).unwrap();
        assert_eq!(state.membrane, -27.0);
        assert!(state.apply_inhibition(-1.0).is_err());
    }

    #[test]
    fn hyperpolarized_membrane_recovers_toward_resting() {
        // -27 * exp(-70/25) after 70 one-ps steps, frozen closed form.
        let params = default_params();
        let mut state = NeuronState::new(0.0);
        state.membrane = -27.0;
        for t in 0..70 {
            let fired = state.step(0.0, &params, 1.0, t).unwrap();
            assert!(!fired);
        }
        let expected = -27.0 * (-70.0_f64 / 25.0).exp();
        assert!((state.membrane - expected).abs() < expected.abs() * 1e-12);
        assert!((expected - (-1.6418716908808852)).abs() < 1e-15);
    }

    #[test]
    fn membrane_magnitude_never_grows_without_input() {
        let params = default_params();
        for start in [-40.0, -3.0, 0.5, 7.9] {
            let mut state = NeuronState::new(0.0);
            state.membrane = start;
            let mut prev = state.membrane.abs();
            for t in 0..200 {
                state.step(0.0, &params, 1.0, t).unwrap();
                assert!(state.membrane.abs() <= prev);
                prev = state.membrane.abs();
            }
        }
    }

    #[test]
    fn refire_needs_threshold_plus_remaining_hyperpolarization() {
        // After a fire the membrane sits at -32; one step later it has
        // recovered to -32 * exp(-1/25), so the drive needed to refire is
        // theta + 32 * exp(-1/25).
        let params = default_params();
        let needed = params.theta + 32.0 * (-1.0_f64 / 25.0).exp();
        for (input, expect_fire) in [(needed - 1e-9, false), (needed + 1e-9, true)] {
            let mut state = NeuronState::new(0.0);
            assert!(state.step(8.0, &params, 1.0, 0).unwrap());
            let fired = state.step(input, &params, 1.0, 1).unwrap();
            assert_eq!(fired, expect_fire, "input {input}");
        }
    }

    #[test]
    fn zero_self_inhibition_is_plain_reset_lif() {
        let params = NeuronParams {
            self_inhibition: 0.0,
            ..default_params()
        };
        let mut state = NeuronState::new(0.0);
        assert!(state.step(9.0, &params, 1.0, 0).unwrap());
        assert_eq!(state.membrane, 0.0);
    }

    #[test]
    fn non_finite_input_rejected() {
        let params = default_params();
        let mut state = NeuronState::new(0.0);
        assert!(state.step(f64::NAN, &params, 1.0, 0).is_err());
        assert!(state.step(f64::INFINITY, &params, 1.0, 0).is_err());
        assert!(state.step(-1.0, &params, 1.0, 0).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = default_params();
        p.validate().unwrap();
        p.theta = 0.0;
        assert!(p.validate().is_err());
        let mut p = default_params();
        p.tau_mem_ps = 0.0;
        assert!(p.validate().is_err());
        let mut p = default_params();
        p.self_inhibition = -1.0;
        assert!(p.validate().is_err());
    }
}
