use serde::{Deserialize, Serialize};

use super::choi::{validate_state, ChoiKind, ChoiOperator};
use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigen, ComplexMatrix, MatrixJson, SpaceLabel, DEFAULT_TOL, ONE};

/// Measure-and-prepare instrument `I(ρ) = Σ_k Tr[M_k ρ] σ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    povm: Vec<ComplexMatrix>,
    outputs: Vec<ComplexMatrix>,
    space: SpaceLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub prob: f64,
    pub state: ComplexMatrix,
}

/// Checks PSD elements summing to the identity.
pub fn validate_povm(povm: &[ComplexMatrix], dim: usize) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::Empty("POVM"));
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for m in povm {
        if !m.is_square() || m.rows() != dim {
            return Err(Error::DimensionMismatch {
                context: "POVM element",
                expected: dim,
                found: m.rows(),
            });
        }
        let e = hermitian_eigen(m, DEFAULT_TOL)?;
        if e.min_value() < -DEFAULT_TOL {
            return Err(Error::NotPsd(e.min_value()));
        }
        sum.add_assign_scaled(m, ONE);
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if dev > DEFAULT_TOL {
        return Err(Error::InvalidArgument(format!(
            "POVM sums to identity only within {dev:.3e}"
        )));
    }
    Ok(())
}

impl Instrument {
    pub fn new(
        povm: Vec<ComplexMatrix>,
        outputs: Vec<ComplexMatrix>,
        space: SpaceLabel,
    ) -> Result<Self> {
        if povm.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                context: "instrument povm/outputs length",
                expected: povm.len(),
                found: outputs.len(),
            });
        }
        validate_povm(&povm, space.dim)?;
        for s in &outputs {
            validate_state(s)?;
        }
        Ok(Self {
            povm,
            outputs,
            space,
        })
    }

    /// Projective measurement in the computational basis, re-preparing the observed basis state.
    pub fn computational(space: SpaceLabel) -> Self {
        let d = space.dim;
        let projs: Vec<_> = (0..d)
            .map(|k| ComplexMatrix::basis_projector(d, k))
            .collect();
        Self::new(projs.clone(), projs, space).expect("valid by construction")
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn outputs(&self) -> &[ComplexMatrix] {
        &self.outputs
    }

    pub fn space(&self) -> &SpaceLabel {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povm.is_empty()
    }

    /// Choi `M_kᵀ ⊗ σ_k` of branch `k`.
    pub fn branch_choi(
        &self,
        k: usize,
        in_space: SpaceLabel,
        out_space: SpaceLabel,
    ) -> Result<ChoiOperator> {
        let j = self.povm[k].transpose().kron(&self.outputs[k]);
        ChoiOperator::new(j, in_space, out_space, ChoiKind::Effect)
    }

    /// Outcome-summed channel, Choi `Σ_k M_kᵀ ⊗ σ_k`.
    pub fn channel(&self, in_space: SpaceLabel, out_space: SpaceLabel) -> Result<ChoiOperator> {
        let d = self.space.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for (m, s) in self.povm.iter().zip(&self.outputs) {
            j.add_assign_scaled(&m.transpose().kron(s), ONE);
        }
        ChoiOperator::new(j, in_space, out_space, ChoiKind::Cptp)
    }

    /// `Σ_k Tr[M_k ρ] σ_k`
    pub fn unconditional(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.space.dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for b in apply_instrument(self, rho)? {
            out.add_assign_scaled(&b.state, crate::tensor::C64::new(b.prob, 0.0));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> InstrumentJson {
        InstrumentJson {
            kind: "instrument".into(),
            space: self.space.clone(),
            povm: self
                .povm
                .iter()
                .map(|m| MatrixJson::from_matrix(m, &[]))
                .collect(),
            outputs: self
                .outputs
                .iter()
                .map(|m| MatrixJson::from_matrix(m, &[]))
                .collect(),
        }
    }

    pub fn from_json(j: &InstrumentJson) -> Result<Self> {
        if j.kind != "instrument" {
            return Err(Error::InvalidArgument(format!(
                "expected kind `instrument`, found `{}`",
                j.kind
            )));
        }
        let povm = j
            .povm
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<_>>()?;
        let outputs = j
            .outputs
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<_>>()?;
        Self::new(povm, outputs, j.space.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstrumentJson {
    pub kind: String,
    pub space: SpaceLabel,
    pub povm: Vec<MatrixJson>,
    pub outputs: Vec<MatrixJson>,
}

/// Branch `k` carries `Tr[M_k ρ]` and `σ_k`.
pub fn apply_instrument(inst: &Instrument, rho: &ComplexMatrix) -> Result<Vec<Branch>> {
    if !rho.is_square() || rho.rows() != inst.space.dim {
        return Err(Error::DimensionMismatch {
            context: "instrument input",
            expected: inst.space.dim,
            found: rho.rows(),
        });
    }
    Ok(inst
        .povm
        .iter()
        .zip(&inst.outputs)
        .map(|(m, s)| Branch {
            prob: m.mul(rho).trace().re,
            state: s.clone(),
        })
        .collect())
}
