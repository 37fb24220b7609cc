use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depolarizing strengths attached after gates: `p1` per 1-qubit gate, `p3` per CSWAP.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p3: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p3: f64) -> Result<Self> {
        for p in [p1, p3] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(Self { p1, p3 })
    }

    /// 1% after single-qubit gates, 3% after each CSWAP.
    pub fn reference() -> Self {
        Self { p1: 0.01, p3: 0.03 }
    }

    pub fn uniform(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p3 == 0.0
    }
}
