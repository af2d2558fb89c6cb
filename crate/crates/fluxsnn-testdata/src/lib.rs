//! Deterministic synthetic handwritten-digit corpus for tests.
//!
//! Renders MNIST-style 28x28 grayscale digits 0 (elliptic rings) and 1
//! (slanted strokes, optional flag/base serifs) with randomized geometry,
//! amplitude and speckle, and writes them as standard IDX file pairs.
//! Per-class counts default to the standard MNIST distribution so subset
//! arithmetic behaves exactly as with the real files. Classes 2-9 are
//! written as blank filler: pipelines under test filter to digits 0/1
//! before ever looking at them.
//!
//! Everything is a pure function of the spec (counts + seed).

use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIDE: usize = 28;
pub const PIXELS: usize = SIDE * SIDE;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// Per-class item counts of the standard MNIST train split.
pub const MNIST_TRAIN_COUNTS: [usize; 10] =
    [5923, 6742, 5958, 6131, 5842, 5421, 5918, 6265, 5851, 5949];
/// Per-class item counts of the standard MNIST test split.
pub const MNIST_TEST_COUNTS: [usize; 10] =
    [980, 1135, 1032, 1010, 982, 892, 958, 1028, 974, 1009];

/// What to generate: per-class counts for both splits plus the seed.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub train_counts: [usize; 10],
    pub test_counts: [usize; 10],
    pub seed: u64,
}

impl CorpusSpec {
    /// The standard MNIST distribution (60,000 train / 10,000 test).
    pub fn standard(seed: u64) -> Self {
        Self {
            train_counts: MNIST_TRAIN_COUNTS,
            test_counts: MNIST_TEST_COUNTS,
            seed,
        }
    }

    /// A small binary-only corpus for fast tests: `n0` zeros and `n1`
    /// ones per split.
    pub fn binary(n0: usize, n1: usize, seed: u64) -> Self {
        let mut train = [0usize; 10];
        train[0] = n0;
        train[1] = n1;
        Self {
            train_counts: train,
            test_counts: train,
            seed,
        }
    }
}

/// The four files a generated corpus consists of.
#[derive(Debug, Clone)]
pub struct CorpusFiles {
    pub dir: PathBuf,
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
}

fn dist_to_segment(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

fn finish(values: &mut [f64], rng: &mut impl Rng) -> Vec<u8> {
    let amplitude = rng.random_range(0.88..1.0);
    values
        .iter()
        .map(|&v| {
            let speckle = rng.random_range(0.94..1.06);
            let v = (v * amplitude * speckle).clamp(0.0, 1.0);
            if v < 0.09 {
                0
            } else {
                (v * 255.0).round() as u8
            }
        })
        .collect()
}

/// Render one digit "0": an elliptic ring with jittered center, radii,
/// rotation and stroke width.
pub fn render_zero(rng: &mut impl Rng) -> Vec<u8> {
    // Jitter stays small: MNIST digits are center-of-mass centered.
    let cx = 13.5 + rng.random_range(-1.0..1.0);
    let cy = 13.5 + rng.random_range(-1.0..1.0);
    let rx = rng.random_range(4.8..7.2);
    let ry = rng.random_range(6.8..9.8);
    let phi: f64 = rng.random_range(-0.35..0.35);
    let thickness = rng.random_range(2.1..3.1);
    let sigma = thickness * 0.5;
    let r_mean = 0.5 * (rx + ry);
    let (sin, cos) = phi.sin_cos();

    let mut values = vec![0.0f64; PIXELS];
    for y in 0..SIDE {
        for x in 0..SIDE {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            let u = dx * cos + dy * sin;
            let v = -dx * sin + dy * cos;
            let q = ((u / rx).powi(2) + (v / ry).powi(2)).sqrt();
            let dist_px = (q - 1.0).abs() * r_mean;
            values[y * SIDE + x] = (-{ dist_px * dist_px } / (2.0 * sigma * sigma)).exp();
        }
    }
    finish(&mut values, rng)
}

/// Render one digit "1": a slanted vertical stroke, sometimes with a top
/// flag and a base bar.
pub fn render_one(rng: &mut impl Rng) -> Vec<u8> {
    let x_mid = rng.random_range(12.5..15.0);
    let slant = rng.random_range(-0.22..0.22);
    let y_top = rng.random_range(3.5..6.5);
    let y_bot = rng.random_range(21.5..24.5);
    let thickness = rng.random_range(1.9..2.8);
    let sigma = thickness * 0.5;
    let x_at = |y: f64| x_mid + slant * (y - 13.5);

    let mut segments: Vec<(f64, f64, f64, f64)> =
        vec![(x_at(y_top), y_top, x_at(y_bot), y_bot)];
    // Most MNIST ones are plain strokes; serifs are the exception.
    if rng.random_range(0.0..1.0) < 0.25 {
        let flag_len = rng.random_range(2.0..3.5);
        let flag_drop = rng.random_range(1.5..3.0);
        segments.push((
            x_at(y_top) - flag_len,
            y_top + flag_drop,
            x_at(y_top),
            y_top,
        ));
    }
    if rng.random_range(0.0..1.0) < 0.15 {
        let half = rng.random_range(2.0..3.0);
        segments.push((x_at(y_bot) - half, y_bot, x_at(y_bot) + half, y_bot));
    }

    let mut values = vec![0.0f64; PIXELS];
    for y in 0..SIDE {
        for x in 0..SIDE {
            let mut dist = f64::MAX;
            for &(ax, ay, bx, by) in &segments {
                dist = dist.min(dist_to_segment(x as f64, y as f64, ax, ay, bx, by));
            }
            values[y * SIDE + x] = (-(dist * dist) / (2.0 * sigma * sigma)).exp();
        }
    }
    finish(&mut values, rng)
}

/// Serialize images into IDX bytes (big-endian magic/count/rows/cols).
pub fn idx_images_bytes(count: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), count * PIXELS);
    let mut out = Vec::with_capacity(16 + pixels.len());
    out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    out.extend_from_slice(&(count as u32).to_be_bytes());
    out.extend_from_slice(&(SIDE as u32).to_be_bytes());
    out.extend_from_slice(&(SIDE as u32).to_be_bytes());
    out.extend_from_slice(pixels);
    out
}

/// Serialize labels into IDX bytes.
pub fn idx_labels_bytes(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

fn generate_split(
    counts: &[usize; 10],
    rng: &mut ChaCha8Rng,
) -> (Vec<u8>, Vec<u8>) {
    // Lay out the label sequence, then shuffle it so classes interleave
    // the way a real corpus does.
    let mut labels: Vec<u8> = counts
        .iter()
        .enumerate()
        .flat_map(|(class, &n)| std::iter::repeat_n(class as u8, n))
        .collect();
    for i in (1..labels.len()).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    let mut pixels = Vec::with_capacity(labels.len() * PIXELS);
    for &label in &labels {
        let image = match label {
            0 => render_zero(rng),
            1 => render_one(rng),
            // Filler classes get blank images; they are filtered out
            // before any pixel is read.
            _ => vec![0u8; PIXELS],
        };
        pixels.extend_from_slice(&image);
    }
    (pixels, labels)
}

/// Generate and write the four IDX files under `dir` using the standard
/// MNIST file names.
pub fn write_corpus(dir: &Path, spec: &CorpusSpec) -> io::Result<CorpusFiles> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let files = CorpusFiles {
        dir: dir.to_path_buf(),
        train_images: dir.join("train-images-idx3-ubyte"),
        train_labels: dir.join("train-labels-idx1-ubyte"),
        test_images: dir.join("t10k-images-idx3-ubyte"),
        test_labels: dir.join("t10k-labels-idx1-ubyte"),
    };
    let (pixels, labels) = generate_split(&spec.train_counts, &mut rng);
    std::fs::write(&files.train_images, idx_images_bytes(labels.len(), &pixels))?;
    std::fs::write(&files.train_labels, idx_labels_bytes(&labels))?;
    let (pixels, labels) = generate_split(&spec.test_counts, &mut rng);
    std::fs::write(&files.test_images, idx_images_bytes(labels.len(), &pixels))?;
    std::fs::write(&files.test_labels, idx_labels_bytes(&labels))?;
    Ok(files)
}

/// Render a digit image as ASCII for eyeballing in test output.
pub fn ascii_art(pixels: &[u8]) -> String {
    let shades = [' ', '.', ':', 'o', 'O', '#'];
    let mut out = String::with_capacity(PIXELS + SIDE);
    for y in 0..SIDE {
        for x in 0..SIDE {
            let v = pixels[y * SIDE + x] as usize;
            out.push(shades[(v * (shades.len() - 1) + 127) / 255]);
        }
        out.push('\n');
    }
    out
}

/// Convenience: draw `n` samples of one class for statistical checks.
pub fn sample_digits(class: u8, n: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| match class {
            0 => render_zero(&mut rng),
            1 => render_one(&mut rng),
            _ => panic!("only digits 0 and 1 render"),
        })
        .collect()
}

/// Deterministic bytes helper for fuzz-corpus seeds.
pub fn seeded_bytes(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0u8; len];
    rng.fill_bytes(&mut out);
    out
}
