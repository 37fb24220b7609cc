use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::choi_from_kraus;
use crate::error::{Error, Result};
use crate::random;
use crate::tensor::{
    hermitian_eigen, link, permute_spaces, ComplexMatrix, LabeledOperator, MatrixJson, SpaceLabel,
    C64, DEFAULT_TOL,
};

/// Name of the control space in switch processes.
pub const CONTROL: &str = "C";

/// Process operator over labeled party and global-future spaces, in link-product form.
///
/// Probabilities are full link products with the parties' Choi operators:
/// `P = W ⋆ X = Tr[Wᵀ X]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix {
    op: LabeledOperator,
}

impl ProcessMatrix {
    pub fn new(matrix: ComplexMatrix, spaces: Vec<SpaceLabel>) -> Result<Self> {
        Ok(Self {
            op: LabeledOperator::new(matrix, spaces)?,
        })
    }

    pub fn from_labeled(op: LabeledOperator) -> Self {
        Self { op }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.op.matrix
    }

    pub fn spaces(&self) -> &[SpaceLabel] {
        &self.op.spaces
    }

    pub fn labeled(&self) -> &LabeledOperator {
        &self.op
    }

    pub fn names(&self) -> Vec<&str> {
        self.op.names()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_labeled(LabeledOperator {
            matrix: self.op.matrix.scale_real(s),
            spaces: self.op.spaces.clone(),
        })
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.op.matrix, &self.op.spaces).with_kind("process")
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        if j.spaces.is_empty() {
            return Err(Error::InvalidArgument(
                "process matrix JSON needs space labels".into(),
            ));
        }
        Self::new(j.to_matrix()?, j.spaces.clone())
    }
}

/// The identity effect `I` on one space (discarding it).
pub fn identity_effect(space: &SpaceLabel) -> LabeledOperator {
    LabeledOperator {
        matrix: ComplexMatrix::identity(space.dim),
        spaces: vec![space.clone()],
    }
}

/// Choi of the effect `E` on one space, `Eᵀ`.
pub fn effect_on(e: &ComplexMatrix, space: &SpaceLabel) -> Result<LabeledOperator> {
    LabeledOperator::new(e.transpose(), vec![space.clone()])
}

fn check_coverage(w: &ProcessMatrix, effects: &[LabeledOperator]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for e in effects {
        for s in &e.spaces {
            let ws = w
                .spaces()
                .iter()
                .find(|t| t.name == s.name)
                .ok_or_else(|| Error::UnknownLabel(s.name.clone()))?;
            if ws.dim != s.dim {
                return Err(Error::DimensionMismatch {
                    context: "effect space",
                    expected: ws.dim,
                    found: s.dim,
                });
            }
            if seen.contains(&s.name.as_str()) {
                return Err(Error::DoublyCovered(s.name.clone()));
            }
            seen.push(&s.name);
        }
    }
    if let Some(s) = w.spaces().iter().find(|s| !seen.contains(&s.name.as_str())) {
        return Err(Error::UncoveredSpace(s.name.clone()));
    }
    Ok(())
}

/// Unclamped full contraction `Tr[Wᵀ X]` with `X` the tensor product of `effects`.
pub fn contract(w: &ProcessMatrix, effects: &[LabeledOperator]) -> Result<C64> {
    check_coverage(w, effects)?;
    let mut x = LabeledOperator::scalar_one();
    for e in effects {
        x = x.tensor(e)?;
    }
    let x = permute_spaces(&x.matrix, &x.spaces, &w.names())?;
    Ok(w.matrix()
        .data()
        .iter()
        .zip(x.data())
        .map(|(a, b)| a * b)
        .sum())
}

/// Generalized Born rule. Every space of `w` must be covered exactly once.
///
/// Values within `DEFAULT_TOL` of `[0, 1]` are clamped; anything further out is an error.
pub fn born_probability(w: &ProcessMatrix, effects: &[LabeledOperator]) -> Result<f64> {
    let p = contract(w, effects)?;
    if p.im.abs() > DEFAULT_TOL || p.re < -DEFAULT_TOL || p.re > 1.0 + DEFAULT_TOL {
        return Err(Error::InvalidProbability(p.re));
    }
    Ok(p.re.clamp(0.0, 1.0))
}

/// `A ⋆ B` over the labels they share; no shared labels gives `A ⊗ B`.
pub fn link_product(a: &ProcessMatrix, b: &ProcessMatrix) -> Result<ProcessMatrix> {
    Ok(ProcessMatrix::from_labeled(link(&a.op, &b.op)?))
}

/// Largest entry magnitude in the blocks off-diagonal in the control index.
pub fn interference_norm(w: &ProcessMatrix) -> Result<f64> {
    let c = w
        .spaces()
        .iter()
        .find(|s| s.name == CONTROL)
        .ok_or(Error::MissingControl)?;
    let dc = c.dim;
    let mut order: Vec<&str> = w.names().into_iter().filter(|n| *n != CONTROL).collect();
    order.push(CONTROL);
    let m = permute_spaces(w.matrix(), w.spaces(), &order)?;
    let mut best: f64 = 0.0;
    for r in 0..m.rows() {
        for col in 0..m.cols() {
            if r % dc != col % dc {
                best = best.max(m[(r, col)].norm());
            }
        }
    }
    Ok(best)
}

pub const VALIDATION_TRIALS: usize = 20;
const VALIDATION_SEED: u64 = 0x005E_ED0F_CA05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessValidation {
    pub psd_ok: bool,
    pub min_eigenvalue: f64,
    pub normalization_ok: bool,
    /// Largest `|total probability − 1|` over the random contractions.
    pub max_normalization_error: f64,
    pub trials: usize,
    pub parties: Vec<String>,
}

impl ProcessValidation {
    pub fn is_valid(&self) -> bool {
        self.psd_ok && self.normalization_ok
    }
}

/// Party prefixes `X` for which both `X_I` and `X_O` are present.
pub fn parties(w: &ProcessMatrix) -> Vec<String> {
    let names = w.names();
    names
        .iter()
        .filter_map(|n| n.strip_suffix("_I"))
        .filter(|p| names.contains(&format!("{p}_O").as_str()))
        .map(str::to_string)
        .collect()
}

/// PSD check plus operational normalization: random CPTP maps at every party and
/// identity effects elsewhere must give total probability 1 within `tol`.
pub fn validate_process(w: &ProcessMatrix, tol: f64) -> ProcessValidation {
    let min_eigenvalue = match hermitian_eigen(w.matrix(), tol) {
        Ok(e) => e.min_value(),
        Err(_) => f64::NEG_INFINITY,
    };
    let parties = parties(w);
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let mut max_err: f64 = 0.0;
    for _ in 0..VALIDATION_TRIALS {
        let mut effects = Vec::new();
        let mut covered: Vec<String> = Vec::new();
        for p in &parties {
            let (i, o) = (format!("{p}_I"), format!("{p}_O"));
            let si = w.spaces().iter().find(|s| s.name == i).unwrap().clone();
            let so = w.spaces().iter().find(|s| s.name == o).unwrap().clone();
            let kraus = random::cptp_kraus(si.dim, so.dim, 2, &mut rng);
            let j = choi_from_kraus(&kraus, si, so).expect("shapes match labels");
            effects.push(j.to_labeled());
            covered.push(i);
            covered.push(o);
        }
        for s in w.spaces() {
            if !covered.contains(&s.name) {
                effects.push(identity_effect(s));
            }
        }
        let err = match contract(w, &effects) {
            Ok(total) => (total - C64::new(1.0, 0.0)).norm(),
            Err(_) => f64::INFINITY,
        };
        max_err = max_err.max(err);
    }
    ProcessValidation {
        psd_ok: min_eigenvalue >= -tol,
        min_eigenvalue,
        normalization_ok: max_err <= tol,
        max_normalization_error: max_err,
        trials: VALIDATION_TRIALS,
        parties,
    }
}
