//! JSON matrix documents: `{"rows": r, "cols": c, "data": [[[re, im], …], …]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::numerics::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs.
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixDocument {
            rows: m.nrows(),
            cols: m.ncols(),
            data: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(PtError::Parse(format!(
                "data shape does not match declared {}x{}",
                self.rows, self.cols
            )));
        }
        let entries: Vec<Complex64> = self.data.iter().flatten().map(|p| Complex64::new(p[0], p[1])).collect();
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PtError::Parse("matrix entries must be finite".into()));
        }
        ComplexMatrix::from_rows(self.rows, self.cols, &entries).map_err(|e| PtError::Parse(e.to_string()))
    }
}

impl From<&ComplexMatrix> for MatrixDocument {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixDocument::from_matrix(m)
    }
}
