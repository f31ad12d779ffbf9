//! JSON matrix documents.
//!
//! ```text
//! {
//!   "m": 2,
//!   "n": 2,
//!   "kind": "operator",
//!   "matrix": [
//!     [[re, im], [re, im], ...],
//!     ...
//!   ],
//!   "metadata": { ... }
//! }
//! ```
//!
//! `operator` documents hold an `mn × mn` matrix in the product basis
//! `|j⟩|k⟩ ↦ j·n + k`. `vectors` documents hold one vector of length `mn`
//! per row. Numbers are written with 17 significant digits so every `f64`
//! survives a round trip unchanged.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nptspace::{BipartiteDims, ComplexMatrix, C64};
use serde::Deserialize;
use serde_json::Value;

pub const BASIS_ORDERING: &str = "product basis |j>|k> at index j*n + k (first factor major)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Kind {
    #[default]
    Operator,
    Vectors,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Operator => "operator",
            Kind::Vectors => "vectors",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub kind: Kind,
    pub matrix: ComplexMatrix,
    pub metadata: BTreeMap<String, Value>,
}

#[derive(Debug)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    m: usize,
    n: usize,
    #[serde(default)]
    kind: Option<String>,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

impl MatrixFile {
    /// Operator document with the standard metadata keys filled in.
    pub fn operator(dims: BipartiteDims, matrix: ComplexMatrix) -> Self {
        Self::with_kind(dims, Kind::Operator, matrix)
    }

    /// One vector per row.
    pub fn vectors(dims: BipartiteDims, vectors: &[Vec<C64>]) -> Self {
        let total = dims.total();
        let matrix = ComplexMatrix::from_fn(vectors.len(), total, |r, c| vectors[r][c]);
        Self::with_kind(dims, Kind::Vectors, matrix)
    }

    fn with_kind(dims: BipartiteDims, kind: Kind, matrix: ComplexMatrix) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("basis_ordering".into(), Value::from(BASIS_ORDERING));
        metadata.insert("tool_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        Self {
            m: dims.m(),
            n: dims.n(),
            kind,
            matrix,
            metadata,
        }
    }

    pub fn dims(&self) -> Result<BipartiteDims, FormatError> {
        BipartiteDims::new(self.m, self.n).map_err(|e| FormatError(e.to_string()))
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"m\": {},", self.m);
        let _ = writeln!(s, "  \"n\": {},", self.n);
        let _ = writeln!(s, "  \"kind\": \"{}\",", self.kind.as_str());
        let _ = writeln!(s, "  \"matrix\": [");
        let rows = self.matrix.rows();
        for r in 0..rows {
            s.push_str("    [");
            for (c, z) in self.matrix.row(r).iter().enumerate() {
                if c > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "[{}, {}]", fmt17(z.re), fmt17(z.im));
            }
            s.push(']');
            if r + 1 < rows {
                s.push(',');
            }
            s.push('\n');
        }
        let _ = writeln!(s, "  ],");
        let meta = serde_json::to_string_pretty(&self.metadata).expect("metadata is plain JSON");
        let meta = meta.replace('\n', "\n  ");
        let _ = writeln!(s, "  \"metadata\": {meta}");
        s.push_str("}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let raw: RawFile = serde_json::from_str(text).map_err(|e| FormatError(format!("invalid matrix file: {e}")))?;
        let dims = BipartiteDims::new(raw.m, raw.n).map_err(|e| FormatError(e.to_string()))?;
        let kind = match raw.kind.as_deref() {
            None | Some("operator") => Kind::Operator,
            Some("vectors") => Kind::Vectors,
            Some(other) => return Err(FormatError(format!("unknown kind {other:?}"))),
        };
        let total = dims.total();
        let rows = raw.matrix.len();
        if kind == Kind::Operator && rows != total {
            return Err(FormatError(format!(
                "expected {total} rows for m={}, n={}, found {rows}",
                raw.m, raw.n
            )));
        }
        let mut data = Vec::with_capacity(rows * total);
        for (r, row) in raw.matrix.iter().enumerate() {
            if row.len() != total {
                return Err(FormatError(format!(
                    "row {r} has {} entries, expected {total}",
                    row.len()
                )));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(FormatError(format!("non-finite entry in row {r}")));
                }
                data.push(C64::new(re, im));
            }
        }
        let matrix = ComplexMatrix::new(rows, total, data).map_err(|e| FormatError(e.to_string()))?;
        Ok(Self {
            m: raw.m,
            n: raw.n,
            kind,
            matrix,
            metadata: raw.metadata,
        })
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| FormatError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// `x` with 17 significant digits, e.g. `2.6470588235294118e-1`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `x` with 6 significant digits for human-readable summaries.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}
