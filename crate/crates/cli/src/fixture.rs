//! Bundled 3 ⊗ 4 state whose partial transpose has six negative eigenvalues.
//!
//! The file stores the entries both as floats and as the integer numerators
//! they came from; a SHA-256 pin catches accidental edits.

use sha2::{Digest, Sha256};

use crate::format::{FormatError, MatrixFile};

pub const PAPER_3X4_JSON: &str = include_str!("../fixtures/paper_3x4.json");
pub const PAPER_3X4_SHA256: &str = "0eeb18229dc8452029b471823c338598ddd2e691dda8490be9840161a8342a2f";

/// Six negative eigenvalues of the partial transpose, each twice, to four digits.
pub const PAPER_3X4_NEGATIVES: [f64; 3] = [-0.0204, -0.0159, -0.0105];

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads the bundled fixture after checking its checksum.
pub fn paper_3x4() -> Result<MatrixFile, FormatError> {
    let digest = sha256_hex(PAPER_3X4_JSON.as_bytes());
    if digest != PAPER_3X4_SHA256 {
        return Err(FormatError(format!("fixture checksum mismatch: {digest}")));
    }
    MatrixFile::from_json(PAPER_3X4_JSON)
}

/// Integer numerators and denominator recorded in the fixture metadata.
pub fn numerators(file: &MatrixFile) -> Option<(Vec<Vec<i64>>, i64)> {
    let den = file.metadata.get("denominator")?.as_i64()?;
    let rows = file.metadata.get("numerators")?.as_array()?;
    let grid = rows
        .iter()
        .map(|r| {
            r.as_str()?
                .split_whitespace()
                .map(|t| t.parse().ok())
                .collect::<Option<Vec<i64>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((grid, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_matches() {
        assert!(paper_3x4().is_ok());
    }

    #[test]
    fn floats_equal_numerators_over_denominator() {
        let file = paper_3x4().unwrap();
        let (grid, den) = numerators(&file).unwrap();
        assert_eq!(den, 34);
        assert_eq!(grid.len(), 12);
        for (r, row) in grid.iter().enumerate() {
            assert_eq!(row.len(), 12);
            for (c, &k) in row.iter().enumerate() {
                let z = file.matrix[(r, c)];
                assert_eq!(z.re.to_bits(), (k as f64 / den as f64).to_bits());
                assert_eq!(z.im, 0.0);
            }
        }
        let diag: i64 = (0..12).map(|i| grid[i][i]).sum();
        assert_eq!(diag, den);
    }

    #[test]
    fn reserializes_byte_identically() {
        let file = paper_3x4().unwrap();
        assert_eq!(file.to_json(), PAPER_3X4_JSON);
    }
}
