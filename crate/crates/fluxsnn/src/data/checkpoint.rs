//! Versioned plain-text checkpoint: human-diffable and bit-exact.
//!
//! Line 1: `FLUXSNN <version> <K> <N>`
//! Line 2: the run config as one JSON object
//! Lines 3..N+2: one neuron per line, K space-separated integer levels.

use std::path::Path;

use super::DataError;
use crate::config::RunConfig;
use crate::plasticity::SynapseMatrix;

pub const CHECKPOINT_MAGIC: &str = "FLUXSNN";
pub const CHECKPOINT_VERSION: u32 = 1;

/// A parsed checkpoint; `levels` is row-major by source
/// (`levels[source * n + neuron]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: RunConfig,
    pub k: usize,
    pub n: usize,
    pub levels: Vec<u8>,
}

/// Render a checkpoint to its canonical text form.
pub fn format_checkpoint(config: &RunConfig, matrix: &SynapseMatrix) -> String {
    let k = matrix.k();
    let n = matrix.n();
    let mut out = String::new();
    out.push_str(&format!("{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION} {k} {n}\n"));
    out.push_str(&config.to_json());
    out.push('\n');
    for neuron in 0..n {
        let mut line = String::with_capacity(k * 3);
        for source in 0..k {
            if source > 0 {
                line.push(' ');
            }
            line.push_str(&matrix.level(source, neuron).to_string());
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parse and fully validate checkpoint text.
pub fn parse_checkpoint(text: &str) -> Result<Checkpoint, DataError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| DataError::BadHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(DataError::BadHeader(format!(
            "expected `{CHECKPOINT_MAGIC} <version> <K> <N>`, got `{header}`"
        )));
    }
    if fields[0] != CHECKPOINT_MAGIC {
        return Err(DataError::BadHeader(format!(
            "bad magic `{}`, expected `{CHECKPOINT_MAGIC}`",
            fields[0]
        )));
    }
    let version: u32 = fields[1]
        .parse()
        .map_err(|_| DataError::BadHeader(format!("unparsable version `{}`", fields[1])))?;
    if version != CHECKPOINT_VERSION {
        return Err(DataError::UnsupportedVersion {
            found: version,
            supported: CHECKPOINT_VERSION,
        });
    }
    let k: usize = fields[2]
        .parse()
        .map_err(|_| DataError::BadHeader(format!("unparsable K `{}`", fields[2])))?;
    let n: usize = fields[3]
        .parse()
        .map_err(|_| DataError::BadHeader(format!("unparsable N `{}`", fields[3])))?;

    let config_line = lines
        .next()
        .ok_or_else(|| DataError::BadHeader("missing config line".into()))?;
    let config = RunConfig::from_json(config_line)?;
    if config.input_count() != k {
        return Err(DataError::DimensionMismatch(format!(
            "header K = {k} but config input_side {} implies {}",
            config.input_side,
            config.input_count()
        )));
    }
    if config.n_excitatory != n {
        return Err(DataError::DimensionMismatch(format!(
            "header N = {n} but config n_excitatory = {}",
            config.n_excitatory
        )));
    }

    let max_level = config.max_level();
    let mut levels = vec![0u8; k * n];
    let mut neuron = 0usize;
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if neuron >= n {
            return Err(DataError::DimensionMismatch(format!(
                "more than {n} weight rows"
            )));
        }
        let mut count = 0usize;
        for token in line.split_whitespace() {
            let value: u32 = token.parse().map_err(|_| DataError::BadLevel {
                token: token.to_string(),
                line: line_no + 3,
            })?;
            if value > max_level as u32 {
                return Err(DataError::LevelOutOfRange {
                    level: value,
                    max_level,
                });
            }
            if count >= k {
                return Err(DataError::DimensionMismatch(format!(
                    "row {} has more than {k} columns",
                    neuron + 1
                )));
            }
            levels[count * n + neuron] = value as u8;
            count += 1;
        }
        if count != k {
            return Err(DataError::DimensionMismatch(format!(
                "row {} has {count} columns, expected {k}",
                neuron + 1
            )));
        }
        neuron += 1;
    }
    if neuron != n {
        return Err(DataError::DimensionMismatch(format!(
            "found {neuron} weight rows, expected {n}"
        )));
    }
    Ok(Checkpoint {
        config,
        k,
        n,
        levels,
    })
}

pub fn save_checkpoint(
    path: &Path,
    config: &RunConfig,
    matrix: &SynapseMatrix,
) -> Result<(), DataError> {
    std::fs::write(path, format_checkpoint(config, matrix)).map_err(|source| DataError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_checkpoint(&text)
}
