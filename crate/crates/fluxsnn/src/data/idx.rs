//! IDX container parsing (the standard MNIST file layout): big-endian
//! 32-bit magic, counts, then raw bytes.

use std::path::Path;

use super::DataError;
use crate::encoding::PixelImage;

/// Magic number of an IDX image file (`0x00000803`).
pub const IMAGES_MAGIC: u32 = 0x0000_0803;
/// Magic number of an IDX label file (`0x00000801`).
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Raw decoded image payload, one `rows * cols` block per image.
#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Decode an IDX image file from raw bytes.
pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages, DataError> {
    const WHAT: &str = "idx image file";
    if bytes.len() < 16 {
        return Err(DataError::Truncated {
            what: WHAT,
            needed: 16,
            got: bytes.len(),
        });
    }
    let magic = be_u32(bytes, 0);
    if magic != IMAGES_MAGIC {
        return Err(DataError::WrongMagic {
            what: WHAT,
            expected: IMAGES_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4) as u64;
    let rows = be_u32(bytes, 8) as u64;
    let cols = be_u32(bytes, 12) as u64;
    let payload = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .filter(|&v| v <= usize::MAX as u64 - 16)
        .ok_or(DataError::PayloadOverflow { count, rows, cols })? as usize;
    let body = &bytes[16..];
    if body.len() < payload {
        return Err(DataError::Truncated {
            what: WHAT,
            needed: 16 + payload,
            got: bytes.len(),
        });
    }
    if body.len() > payload {
        return Err(DataError::TrailingBytes {
            what: WHAT,
            extra: body.len() - payload,
        });
    }
    Ok(IdxImages {
        count: count as usize,
        rows: rows as usize,
        cols: cols as usize,
        pixels: body.to_vec(),
    })
}

/// Decode an IDX label file from raw bytes.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, DataError> {
    const WHAT: &str = "idx label file";
    if bytes.len() < 8 {
        return Err(DataError::Truncated {
            what: WHAT,
            needed: 8,
            got: bytes.len(),
        });
    }
    let magic = be_u32(bytes, 0);
    if magic != LABELS_MAGIC {
        return Err(DataError::WrongMagic {
            what: WHAT,
            expected: LABELS_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4) as usize;
    let body = &bytes[8..];
    if body.len() < count {
        return Err(DataError::Truncated {
            what: WHAT,
            needed: 8 + count,
            got: bytes.len(),
        });
    }
    if body.len() > count {
        return Err(DataError::TrailingBytes {
            what: WHAT,
            extra: body.len() - count,
        });
    }
    Ok(body.to_vec())
}

/// Load a paired image/label file set, preserving order, with intensities
/// normalized to [0, 1].
pub fn load_idx(
    images_path: &Path,
    labels_path: &Path,
) -> Result<Vec<(PixelImage, u8)>, DataError> {
    let image_bytes = std::fs::read(images_path).map_err(|source| DataError::Read {
        path: images_path.to_path_buf(),
        source,
    })?;
    let label_bytes = std::fs::read(labels_path).map_err(|source| DataError::Read {
        path: labels_path.to_path_buf(),
        source,
    })?;
    let images = parse_idx_images(&image_bytes)?;
    let labels = parse_idx_labels(&label_bytes)?;
    if images.count != labels.len() {
        return Err(DataError::CountMismatch {
            images: images.count,
            labels: labels.len(),
        });
    }
    let stride = images.rows * images.cols;
    let mut items = Vec::with_capacity(images.count);
    for (i, &label) in labels.iter().enumerate() {
        let block = &images.pixels[i * stride..(i + 1) * stride];
        let image = PixelImage::from_bytes(images.cols, images.rows, block)
            .map_err(|e| DataError::DimensionMismatch(e.to_string()))?;
        items.push((image, label));
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent byte-level builder used as the reference encoder.
    fn build_images(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        out.extend_from_slice(&count.to_be_bytes());
        out.extend_from_slice(&rows.to_be_bytes());
        out.extend_from_slice(&cols.to_be_bytes());
        out.extend_from_slice(pixels);
        out
    }

    fn build_labels(labels: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
        out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        out.extend_from_slice(labels);
        out
    }

    #[test]
    fn three_image_fixture_round_trips_byte_for_byte() {
        // 3 images of 2x2; decoded pixels must match a hand decoding of
        // the very bytes we assembled.
        let pixels: Vec<u8> = (0..12).map(|v| (v * 20) as u8).collect();
        let bytes = build_images(3, 2, 2, &pixels);
        let parsed = parse_idx_images(&bytes).unwrap();
        assert_eq!(parsed.count, 3);
        assert_eq!(parsed.rows, 2);
        assert_eq!(parsed.cols, 2);
        // Hand decoding: payload starts at offset 16, image i at 16 + 4i.
        for i in 0..3 {
            for p in 0..4 {
                assert_eq!(parsed.pixels[i * 4 + p], bytes[16 + i * 4 + p]);
            }
        }
    }

    #[test]
    fn zero_item_pair_yields_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("images");
        let lp = dir.path().join("labels");
        std::fs::write(&ip, build_images(0, 28, 28, &[])).unwrap();
        std::fs::write(&lp, build_labels(&[])).unwrap();
        let items = load_idx(&ip, &lp).unwrap();
        assert!(items.is_empty());
    }

    #[test]
    fn labels_magic_on_images_is_wrong_magic() {
        let mut bytes = build_images(1, 1, 1, &[7]);
        bytes[0..4].copy_from_slice(&LABELS_MAGIC.to_be_bytes());
        match parse_idx_images(&bytes) {
            Err(DataError::WrongMagic { found, expected, .. }) => {
                assert_eq!(found, LABELS_MAGIC);
                assert_eq!(expected, IMAGES_MAGIC);
            }
            other => panic!("expected WrongMagic, got {other:?}"),
        }
    }

    #[test]
    fn truncation_and_trailing_are_distinct() {
        let bytes = build_images(2, 2, 2, &[0; 8]);
        assert!(matches!(
            parse_idx_images(&bytes[..bytes.len() - 1]),
            Err(DataError::Truncated { .. })
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(
            parse_idx_images(&extra),
            Err(DataError::TrailingBytes { extra: 1, .. })
        ));
        assert!(matches!(
            parse_idx_images(&bytes[..10]),
            Err(DataError::Truncated { .. })
        ));
    }

    #[test]
    fn label_file_variants() {
        let good = build_labels(&[0, 1, 2]);
        assert_eq!(parse_idx_labels(&good).unwrap(), vec![0, 1, 2]);
        let mut bad_magic = good.clone();
        bad_magic[3] = 0x03;
        assert!(matches!(
            parse_idx_labels(&bad_magic),
            Err(DataError::WrongMagic { .. })
        ));
        assert!(matches!(
            parse_idx_labels(&good[..9]),
            Err(DataError::Truncated { .. })
        ));
    }

    #[test]
    fn count_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("images");
        let lp = dir.path().join("labels");
        std::fs::write(&ip, build_images(2, 1, 1, &[1, 2])).unwrap();
        std::fs::write(&lp, build_labels(&[0])).unwrap();
        assert!(matches!(
            load_idx(&ip, &lp),
            Err(DataError::CountMismatch { images: 2, labels: 1 })
        ));
    }

    #[test]
    fn normalization_divides_by_255() {
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("images");
        let lp = dir.path().join("labels");
        std::fs::write(&ip, build_images(1, 1, 2, &[0, 255])).unwrap();
        std::fs::write(&lp, build_labels(&[1])).unwrap();
        let items = load_idx(&ip, &lp).unwrap();
        assert_eq!(items[0].0.intensities(), &[0.0, 1.0]);
        assert_eq!(items[0].1, 1);
    }

    #[test]
    fn oversized_header_is_rejected_without_allocating() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&u32::MAX.to_be_bytes());
        bytes.extend_from_slice(&u32::MAX.to_be_bytes());
        bytes.extend_from_slice(&u32::MAX.to_be_bytes());
        assert!(matches!(
            parse_idx_images(&bytes),
            Err(DataError::PayloadOverflow { .. })
        ));
    }
}
