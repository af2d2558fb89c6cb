//! Machine-readable run report plus its human-readable table rendering.
//!
//! The JSON layout is documented by `docs/report.schema.json` in the
//! repository root. `wall_clock_seconds` is the one field excluded from
//! byte-for-byte reproducibility claims.

use fluxsnn::config::RunConfig;
use fluxsnn::network::{EvalStats, LabelAssignment};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<SplitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<SplitReport>,
    pub neurons: Vec<NeuronReport>,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    pub snapshots: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitReport {
    pub split: String,
    pub total: usize,
    pub correct: usize,
    pub abstained: usize,
    pub accuracy: f64,
    pub per_class: Vec<ClassReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: u8,
    pub total: usize,
    pub correct: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeuronReport {
    pub neuron: usize,
    pub label: Option<u8>,
    pub spike_totals: [u64; 2],
}

pub fn split_report(split: &str, stats: &EvalStats) -> SplitReport {
    SplitReport {
        split: split.to_string(),
        total: stats.total,
        correct: stats.correct,
        abstained: stats.abstained,
        accuracy: stats.accuracy(),
        per_class: (0..2)
            .map(|c| ClassReport {
                class: c as u8,
                total: stats.per_class_total[c],
                correct: stats.per_class_correct[c],
                accuracy: (stats.per_class_total[c] > 0)
                    .then(|| stats.per_class_correct[c] as f64 / stats.per_class_total[c] as f64),
            })
            .collect(),
    }
}

pub fn neuron_reports(labels: &LabelAssignment) -> Vec<NeuronReport> {
    labels
        .labels()
        .iter()
        .enumerate()
        .map(|(neuron, label)| NeuronReport {
            neuron,
            label: *label,
            spike_totals: labels.totals(neuron),
        })
        .collect()
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Render the human-readable summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out += &format!(
            "run: {} (seed {}, {} neurons, {} inputs)\n",
            self.command,
            self.seed,
            self.config.n_excitatory,
            self.config.input_count()
        );
        for split in [&self.train, &self.test].into_iter().flatten() {
            out += &format!(
                "  {:<5}  accuracy {:6.2}%  ({}/{} correct, {} abstained)\n",
                split.split,
                split.accuracy * 100.0,
                split.correct,
                split.total,
                split.abstained
            );
            for class in &split.per_class {
                let acc = class
                    .accuracy
                    .map(|a| format!("{:6.2}%", a * 100.0))
                    .unwrap_or_else(|| "     -".to_string());
                out += &format!(
                    "         class {}: {acc}  ({}/{})\n",
                    class.class, class.correct, class.total
                );
            }
        }
        out += "  neurons:";
        for neuron in &self.neurons {
            let label = neuron
                .label
                .map(|l| l.to_string())
                .unwrap_or_else(|| "-".to_string());
            out += &format!(
                " [{}:{} {}|{}]",
                neuron.neuron, label, neuron.spike_totals[0], neuron.spike_totals[1]
            );
        }
        out += &format!("\n  wall clock: {:.2}s\n", self.wall_clock_seconds);
        out
    }
}
