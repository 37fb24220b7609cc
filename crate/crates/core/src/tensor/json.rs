//! The JSON matrix interchange format:
//! `{"rows": n, "cols": m, "data": [[re, im], ...], "spaces": [{"name": .., "dim": ..}]}`.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use super::spaces::{check_spaces, SpaceLabel};
use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
    #[serde(default)]
    pub spaces: Vec<SpaceLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix, spaces: &[SpaceLabel]) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
            spaces: spaces.to_vec(),
            kind: None,
        }
    }

    pub fn with_kind(mut self, kind: &str) -> Self {
        self.kind = Some(kind.to_string());
        self
    }

    /// Decode, checking the shape and, when labels are present, their product.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let m = ComplexMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        )?;
        if !self.spaces.is_empty() {
            check_spaces(&self.spaces, &m)?;
        }
        Ok(m)
    }
}
