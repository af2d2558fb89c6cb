//! The digit-0/1 subset rule: filter to labels {0, 1}, then draw a
//! uniform 5% sample without replacement using the seeded data-shuffle
//! stream.
//!
//! 5% is truncated, not rounded: standard MNIST filters to 12,665
//! train and 2,115 test items, which must yield exactly 633 and 105.

use rand::RngExt;

use super::DataError;
use crate::encoding::PixelImage;
use crate::rng::RngStream;

/// Which half of the corpus a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    /// Stable tag for deriving per-split random streams.
    pub fn tag(self) -> u64 {
        match self {
            Split::Train => 0,
            Split::Test => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// A labeled image subset in sampled order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub items: Vec<(PixelImage, u8)>,
    pub split: Split,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Fraction of the 0/1-filtered pool that is kept.
pub const SUBSET_FRACTION: f64 = 0.05;

/// Sample size for a filtered pool: 5% truncated.
pub fn subset_size(filtered: usize) -> usize {
    filtered / 20
}

/// Filter to digits 0/1 and draw the 5% sample. The result order is the
/// sampled order; identical `(seed, split)` yields an identical dataset.
pub fn select_subset(
    all_items: &[(PixelImage, u8)],
    split: Split,
    rng: &RngStream,
) -> Result<Dataset, DataError> {
    let mut indices: Vec<usize> = all_items
        .iter()
        .enumerate()
        .filter_map(|(i, (_, label))| (*label <= 1).then_some(i))
        .collect();
    let take = subset_size(indices.len());
    if take == 0 {
        return Err(DataError::TooFewItems {
            filtered: indices.len(),
        });
    }
    // Partial Fisher-Yates over the filtered pool, per-split stream.
    let mut stream = rng.fork(&[split.tag()]);
    for i in 0..take {
        let j = i + stream.random_range(0..indices.len() - i);
        indices.swap(i, j);
    }
    let items = indices[..take]
        .iter()
        .map(|&i| all_items[i].clone())
        .collect();
    Ok(Dataset { items, split })
}
