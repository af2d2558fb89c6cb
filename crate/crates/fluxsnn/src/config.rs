//! Run configuration: every experiment hyperparameter plus the run seed,
//! serialized as one flat JSON object.
//!
//! Unknown keys are rejected (catches typos); absent keys take defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Simulation step in picoseconds.
    pub dt_ps: f64,
    /// How long each image drives the input layer.
    pub exposure_ps: f64,
    /// Membrane leak time constant.
    pub tau_mem_ps: f64,
    /// Spike-trace window length.
    pub tau_trace_ps: f64,
    /// Firing threshold in weight units (1.0 = one maximum-weight spike).
    pub theta_spikes: f64,
    /// Membrane resting level.
    pub resting: f64,
    /// Post-fire hyperpolarization depth, in weight units; during
    /// training the same magnitude feeds the slow threshold adaptation.
    pub self_inhibition_spikes: f64,
    /// Decay time of the training-time threshold adaptation. Long
    /// relative to one exposure, so a busy neuron stays throttled across
    /// several images and quieter neurons get their chance to fire.
    pub tau_theta_ps: f64,
    /// Membrane subtraction applied to peers when a neuron wins a step.
    pub lateral_inhibition_spikes: f64,
    /// Synapse levels added on a causal pre->post pairing.
    pub dw_plus_levels: u8,
    /// Synapse levels removed on an anti-causal pairing.
    pub dw_minus_levels: u8,
    /// Number of synaptic stages (16 = 4-bit weights).
    pub weight_levels: u8,
    /// Firing rate of a full-intensity pixel, per picosecond. The
    /// default is calibrated so a typical digit drives an untrained
    /// neuron to a few output spikes per exposure.
    pub max_rate_per_ps: f64,
    /// Excitatory (output) neuron count.
    pub n_excitatory: usize,
    /// Side of the square input layer after downscaling.
    pub input_side: usize,
    /// Run seed; all randomness derives from it via named substreams.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dt_ps: 1.0,
            exposure_ps: 100.0,
            tau_mem_ps: 25.0,
            tau_trace_ps: 10.0,
            theta_spikes: 8.0,
            resting: 0.0,
            self_inhibition_spikes: 32.0,
            tau_theta_ps: 700.0,
            lateral_inhibition_spikes: 32.0,
            dw_plus_levels: 2,
            dw_minus_levels: 1,
            weight_levels: 16,
            max_rate_per_ps: 0.08,
            n_excitatory: 9,
            input_side: 14,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")))
            }
        }
        fn non_negative(name: &str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!(
                    "{name} must be non-negative, got {v}"
                )))
            }
        }

        positive("dt_ps", self.dt_ps)?;
        positive("exposure_ps", self.exposure_ps)?;
        positive("tau_mem_ps", self.tau_mem_ps)?;
        positive("tau_trace_ps", self.tau_trace_ps)?;
        positive("tau_theta_ps", self.tau_theta_ps)?;
        positive("theta_spikes", self.theta_spikes)?;
        positive("max_rate_per_ps", self.max_rate_per_ps)?;
        if !self.resting.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "resting must be finite, got {}",
                self.resting
            )));
        }
        if self.theta_spikes <= self.resting {
            return Err(ConfigError::Invalid(format!(
                "theta_spikes ({}) must exceed resting ({})",
                self.theta_spikes, self.resting
            )));
        }
        non_negative("self_inhibition_spikes", self.self_inhibition_spikes)?;
        non_negative("lateral_inhibition_spikes", self.lateral_inhibition_spikes)?;
        if self.weight_levels < 2 {
            return Err(ConfigError::Invalid(format!(
                "weight_levels must be at least 2, got {}",
                self.weight_levels
            )));
        }
        let p_max = self.max_rate_per_ps * self.dt_ps;
        if !(p_max > 0.0 && p_max <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "max_rate_per_ps * dt_ps must lie in (0, 1], got {p_max}"
            )));
        }
        if self.n_excitatory == 0 {
            return Err(ConfigError::Invalid("n_excitatory must be at least 1".into()));
        }
        if self.input_side == 0 {
            return Err(ConfigError::Invalid("input_side must be at least 1".into()));
        }
        if self.n_steps() == 0 {
            return Err(ConfigError::Invalid(format!(
                "exposure_ps ({}) shorter than one step ({} ps)",
                self.exposure_ps, self.dt_ps
            )));
        }
        Ok(())
    }

    /// Parse from a flat JSON object; absent keys take defaults, unknown
    /// keys are an error, and the result is validated.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Compact single-line JSON with a stable field order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("RunConfig serializes")
    }

    /// Steps per image exposure.
    pub fn n_steps(&self) -> usize {
        (self.exposure_ps / self.dt_ps).round() as usize
    }

    /// Spike-trace window in steps.
    pub fn trace_window_steps(&self) -> u64 {
        (self.tau_trace_ps / self.dt_ps).round() as u64
    }

    /// Input layer size (pixels after downscaling).
    pub fn input_count(&self) -> usize {
        self.input_side * self.input_side
    }

    /// Largest representable synapse level.
    pub fn max_level(&self) -> u8 {
        self.weight_levels - 1
    }
}
