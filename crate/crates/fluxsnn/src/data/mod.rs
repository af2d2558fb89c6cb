//! Dataset ingestion and artifact persistence: IDX parsing, the 5%
//! digit-0/1 subset rule, the text checkpoint format, and weight-map
//! export.
//!
//! Parsing is total: any byte stream either yields valid data or one of
//! the classified errors below — partial reads never surface as data.

mod checkpoint;
mod idx;
mod pgm;
mod subset;

pub use checkpoint::{
    format_checkpoint, load_checkpoint, parse_checkpoint, save_checkpoint, Checkpoint,
    CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels, IdxImages, IMAGES_MAGIC, LABELS_MAGIC};
pub use pgm::{weight_maps_pgm, write_weight_maps};
pub use subset::{select_subset, subset_size, Dataset, Split, SUBSET_FRACTION};

use crate::config::ConfigError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("wrong magic in {what}: expected {expected:#010x}, found {found:#010x}")]
    WrongMagic {
        what: &'static str,
        expected: u32,
        found: u32,
    },
    #[error("truncated {what}: need {needed} bytes, got {got}")]
    Truncated {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("{extra} trailing bytes after {what} payload")]
    TrailingBytes { what: &'static str, extra: usize },
    #[error("image/label count mismatch: {images} images vs {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("image payload size overflows ({count} x {rows} x {cols})")]
    PayloadOverflow { count: u64, rows: u64, cols: u64 },
    #[error("too few usable items: {filtered} after filtering to digits 0/1")]
    TooFewItems { filtered: usize },
    #[error("bad checkpoint header: {0}")]
    BadHeader(String),
    #[error("unsupported checkpoint version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad level token `{token}` on checkpoint line {line}")]
    BadLevel { token: String, line: usize },
    #[error("level {level} out of range, maximum is {max_level}")]
    LevelOutOfRange { level: u32, max_level: u8 },
    #[error(transparent)]
    BadConfig(#[from] ConfigError),
}
