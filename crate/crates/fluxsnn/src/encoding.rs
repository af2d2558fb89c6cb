//! Rate coding: pixel intensities become Bernoulli-thinned Poisson spike
//! trains over the exposure window.

use rand::RngExt;

use crate::config::RunConfig;
use crate::event::SpikeEvent;
use crate::rng::RngStream;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("image data has {got} values, expected {expected} for {width}x{height}")]
    SizeMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
    #[error("intensity at index {index} is {value}, outside [0, 1]")]
    IntensityOutOfRange { index: usize, value: f64 },
    #[error("cannot downscale {in_width}x{in_height} to {out_width}x{out_height}: sides must divide evenly")]
    NotDownscalable {
        in_width: usize,
        in_height: usize,
        out_width: usize,
        out_height: usize,
    },
    #[error("per-step spike probability {0} exceeds 1")]
    RateTooHigh(f64),
}

/// Grayscale image with row-major intensities in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PixelImage {
    width: usize,
    height: usize,
    intensities: Vec<f64>,
}

impl PixelImage {
    pub fn new(width: usize, height: usize, intensities: Vec<f64>) -> Result<Self, EncodingError> {
        if intensities.len() != width * height {
            return Err(EncodingError::SizeMismatch {
                width,
                height,
                expected: width * height,
                got: intensities.len(),
            });
        }
        for (index, &value) in intensities.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(EncodingError::IntensityOutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            intensities,
        })
    }

    /// Build from raw bytes, normalizing 0-255 to [0, 1].
    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self, EncodingError> {
        if bytes.len() != width * height {
            return Err(EncodingError::SizeMismatch {
                width,
                height,
                expected: width * height,
                got: bytes.len(),
            });
        }
        let intensities = bytes.iter().map(|&b| b as f64 / 255.0).collect();
        Ok(Self {
            width,
            height,
            intensities,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.intensities[y * self.width + x]
    }
}

/// Shrink by averaging equal-size pixel blocks (28x28 -> 14x14 uses 2x2
/// blocks). Both sides must divide evenly.
pub fn downscale(
    image: &PixelImage,
    out_width: usize,
    out_height: usize,
) -> Result<PixelImage, EncodingError> {
    if out_width == 0
        || out_height == 0
        || !image.width.is_multiple_of(out_width)
        || !image.height.is_multiple_of(out_height)
    {
        return Err(EncodingError::NotDownscalable {
            in_width: image.width,
            in_height: image.height,
            out_width,
            out_height,
        });
    }
    let bx = image.width / out_width;
    let by = image.height / out_height;
    let block = (bx * by) as f64;
    let mut out = Vec::with_capacity(out_width * out_height);
    for oy in 0..out_height {
        for ox in 0..out_width {
            let mut sum = 0.0;
            for dy in 0..by {
                for dx in 0..bx {
                    sum += image.get(ox * bx + dx, oy * by + dy);
                }
            }
            out.push(sum / block);
        }
    }
    PixelImage::new(out_width, out_height, out)
}

/// Boolean spike occupancy over (source, step), immutable once generated.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    n_sources: usize,
    n_steps: usize,
    // Step-major so the per-step scan in the network loop is contiguous.
    bits: Vec<bool>,
}

impl SpikeTrain {
    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn is_set(&self, source: usize, step: usize) -> bool {
        self.bits[step * self.n_sources + source]
    }

    /// Sources that spike at the given step.
    pub fn sources_at(&self, step: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.bits[step * self.n_sources..(step + 1) * self.n_sources];
        row.iter()
            .enumerate()
            .filter_map(|(s, &on)| if on { Some(s) } else { None })
    }

    pub fn count(&self, source: usize) -> usize {
        (0..self.n_steps).filter(|&t| self.is_set(source, t)).count()
    }

    pub fn total(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn events(&self) -> impl Iterator<Item = SpikeEvent> + '_ {
        (0..self.n_steps).flat_map(move |t| {
            self.sources_at(t).map(move |source| SpikeEvent {
                source,
                step: t as u64,
            })
        })
    }
}

/// Encode an image as independent per-step Bernoulli spikes with
/// probability `intensity * max_rate_per_ps * dt_ps` per source.
///
/// Exactly one uniform draw is consumed per (source, step) cell in
/// source-major order, regardless of intensity, so a fixed stream couples
/// monotonically: raising an intensity can only add spikes.
pub fn encode(
    image: &PixelImage,
    cfg: &RunConfig,
    rng: &mut RngStream,
) -> Result<SpikeTrain, EncodingError> {
    let p_max = cfg.max_rate_per_ps * cfg.dt_ps;
    if p_max > 1.0 {
        return Err(EncodingError::RateTooHigh(p_max));
    }
    let n_sources = image.width * image.height;
    let n_steps = cfg.n_steps();
    let mut bits = vec![false; n_sources * n_steps];
    for (source, &intensity) in image.intensities.iter().enumerate() {
        let p = intensity * p_max;
        for step in 0..n_steps {
            let u: f64 = rng.random();
            if u < p {
                bits[step * n_sources + source] = true;
            }
        }
    }
    Ok(SpikeTrain {
        n_sources,
        n_steps,
        bits,
    })
}
