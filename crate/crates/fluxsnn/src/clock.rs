//! Discrete simulation clock and the exponential leak shared by membranes
//! and spike traces.
//!
//! All times are picosecond-denominated reals; the clock advances in fixed
//! steps of `dt_ps`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClockError {
    #[error("step duration must be positive, got {0} ps")]
    NonPositiveDt(f64),
    #[error("decay time constant must be positive, got {0} ps")]
    NonPositiveTau(f64),
    #[error("elapsed time must be non-negative, got {0} ps")]
    NegativeElapsed(f64),
}

/// Monotonic step counter over a fixed step duration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimClock {
    step: u64,
    dt_ps: f64,
}

impl SimClock {
    pub fn new(dt_ps: f64) -> Result<Self, ClockError> {
        if !dt_ps.is_finite() || dt_ps <= 0.0 {
            return Err(ClockError::NonPositiveDt(dt_ps));
        }
        Ok(Self { step: 0, dt_ps })
    }

    /// Advance by exactly one step.
    pub fn tick(&mut self) {
        self.step += 1;
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn dt_ps(&self) -> f64 {
        self.dt_ps
    }

    pub fn now_ps(&self) -> f64 {
        self.step as f64 * self.dt_ps
    }
}

/// Per-step multiplier `exp(-dt/tau)` for an exponentially leaking state.
///
/// `dt_ps = 0` is allowed and yields 1.0 (no time elapsed); negative elapsed
/// time and non-positive time constants are rejected.
pub fn decay_factor(tau_ps: f64, dt_ps: f64) -> Result<f64, ClockError> {
    if !tau_ps.is_finite() || tau_ps <= 0.0 {
        return Err(ClockError::NonPositiveTau(tau_ps));
    }
    if !dt_ps.is_finite() || dt_ps < 0.0 {
        return Err(ClockError::NegativeElapsed(dt_ps));
    }
    Ok((-dt_ps / tau_ps).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_identity_at_zero_elapsed() {
        assert_eq!(decay_factor(25.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn decay_closed_form() {
        // exp(-1) and exp(-0.1), frozen from the closed form.
        let f = decay_factor(25.0, 25.0).unwrap();
        assert!((f - 0.36787944117144233).abs() < 1e-15);
        let f = decay_factor(10.0, 1.0).unwrap();
        assert!((f - 0.9048374180359595).abs() < 1e-15);
    }

    #[test]
    fn decay_rejects_bad_durations() {
        assert_eq!(decay_factor(0.0, 1.0), Err(ClockError::NonPositiveTau(0.0)));
        assert_eq!(decay_factor(-5.0, 1.0), Err(ClockError::NonPositiveTau(-5.0)));
        assert_eq!(
            decay_factor(25.0, -1.0),
            Err(ClockError::NegativeElapsed(-1.0))
        );
        assert!(decay_factor(f64::NAN, 1.0).is_err());
        assert!(decay_factor(25.0, f64::NAN).is_err());
    }

    #[test]
    fn clock_is_monotone() {
        let mut clock = SimClock::new(1.0).unwrap();
        let mut prev = clock.now_ps();
        for _ in 0..100 {
            clock.tick();
            assert!(clock.now_ps() > prev);
            prev = clock.now_ps();
        }
        assert_eq!(clock.step(), 100);
        assert_eq!(clock.now_ps(), 100.0);
    }

    #[test]
    fn clock_rejects_non_positive_dt() {
        assert!(SimClock::new(0.0).is_err());
        assert!(SimClock::new(-1.0).is_err());
        assert!(SimClock::new(f64::NAN).is_err());
    }
}
