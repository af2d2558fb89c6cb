//! Weight-map export: every neuron's level grid as one binary PGM tile.
//!
//! Each neuron's `side x side` grid maps level -> `round(level / max * 255)`
//! and the grids are laid out left to right with a one-pixel black
//! separator column, giving an image of `(side * n + (n - 1)) x side`.

use std::path::Path;

use super::DataError;
use crate::plasticity::SynapseMatrix;

/// Render the weight maps as PGM (P5, maxval 255) bytes.
pub fn weight_maps_pgm(matrix: &SynapseMatrix, side: usize) -> Result<Vec<u8>, DataError> {
    if side * side != matrix.k() {
        return Err(DataError::DimensionMismatch(format!(
            "matrix has {} inputs, not a {side}x{side} grid",
            matrix.k()
        )));
    }
    let n = matrix.n();
    let width = side * n + (n - 1);
    let height = side;
    let max_level = matrix.max_level() as f64;
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.reserve(width * height);
    for y in 0..height {
        for neuron in 0..n {
            if neuron > 0 {
                out.push(0);
            }
            for x in 0..side {
                let level = matrix.level(y * side + x, neuron) as f64;
                out.push((level / max_level * 255.0).round() as u8);
            }
        }
    }
    Ok(out)
}

pub fn write_weight_maps(
    path: &Path,
    matrix: &SynapseMatrix,
    side: usize,
) -> Result<(), DataError> {
    let bytes = weight_maps_pgm(matrix, side)?;
    std::fs::write(path, bytes).map_err(|source| DataError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_zero_image_of_right_size() {
        let m = SynapseMatrix::new(196, 9, 16).unwrap();
        let bytes = weight_maps_pgm(&m, 14).unwrap();
        let header = b"P5\n134 14\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let data = &bytes[header.len()..];
        assert_eq!(data.len(), 134 * 14);
        assert!(data.iter().all(|&b| b == 0));
    }

    #[test]
    fn level_bytes_follow_the_rounding_rule() {
        let mut m = SynapseMatrix::new(4, 1, 16).unwrap();
        m.set_level(0, 0, 15).unwrap();
        m.set_level(1, 0, 7).unwrap();
        let bytes = weight_maps_pgm(&m, 2).unwrap();
        let header_len = b"P5\n2 2\n255\n".len();
        assert_eq!(bytes[header_len], 255);
        // round(7 / 15 * 255) = 119
        assert_eq!(bytes[header_len + 1], 119);
    }

    #[test]
    fn separator_columns_are_black() {
        let mut m = SynapseMatrix::new(4, 3, 16).unwrap();
        for s in 0..4 {
            for i in 0..3 {
                m.set_level(s, i, 15).unwrap();
            }
        }
        let bytes = weight_maps_pgm(&m, 2).unwrap();
        let header_len = b"P5\n8 2\n255\n".len();
        let data = &bytes[header_len..];
        // Row layout: [n0 n0] 0 [n1 n1] 0 [n2 n2]
        for row in data.chunks(8) {
            assert_eq!(row, &[255, 255, 0, 255, 255, 0, 255, 255]);
        }
    }

    #[test]
    fn non_square_input_rejected() {
        let m = SynapseMatrix::new(10, 2, 16).unwrap();
        assert!(weight_maps_pgm(&m, 3).is_err());
    }
}
