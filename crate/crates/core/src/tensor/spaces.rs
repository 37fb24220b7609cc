use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// A named tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceLabel {
    pub name: String,
    pub dim: usize,
}

impl SpaceLabel {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            dim,
        }
    }

    pub fn qubit(name: impl Into<String>) -> Self {
        Self::new(name, 2)
    }
}

pub fn total_dim(spaces: &[SpaceLabel]) -> usize {
    spaces.iter().map(|s| s.dim).product()
}

/// Checks name uniqueness, nonzero dims and the matrix size.
pub fn check_spaces(spaces: &[SpaceLabel], m: &ComplexMatrix) -> Result<()> {
    for (i, s) in spaces.iter().enumerate() {
        if s.dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "space `{}` has dim 0",
                s.name
            )));
        }
        if spaces[..i].iter().any(|t| t.name == s.name) {
            return Err(Error::DuplicateLabel(s.name.clone()));
        }
    }
    let d = total_dim(spaces);
    if !m.is_square() || m.rows() != d {
        return Err(Error::DimensionMismatch {
            context: "space labels",
            expected: d,
            found: m.rows(),
        });
    }
    Ok(())
}

fn position(spaces: &[SpaceLabel], name: &str) -> Result<usize> {
    spaces
        .iter()
        .position(|s| s.name == name)
        .ok_or_else(|| Error::UnknownLabel(name.to_string()))
}

/// Mixed-radix digits of `index` over `dims` (first dim most significant).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose_index(digits: &[usize], dims: &[usize], which: &[usize]) -> usize {
    which.iter().fold(0, |acc, &k| acc * dims[k] + digits[k])
}

/// For every full index, the index into the sub-product formed by `which`.
fn sub_indices(dims: &[usize], which: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let mut d = vec![0; dims.len()];
    (0..total)
        .map(|i| {
            digits(i, dims, &mut d);
            compose_index(&d, dims, which)
        })
        .collect()
}

/// Trace out every space whose name is not in `keep`. Kept factors retain their original order.
pub fn partial_trace(
    m: &ComplexMatrix,
    spaces: &[SpaceLabel],
    keep: &[&str],
) -> Result<ComplexMatrix> {
    check_spaces(spaces, m)?;
    for name in keep {
        position(spaces, name)?;
    }
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim).collect();
    let kept: Vec<usize> = (0..spaces.len())
        .filter(|&k| keep.contains(&spaces[k].name.as_str()))
        .collect();
    let traced: Vec<usize> = (0..spaces.len()).filter(|k| !kept.contains(k)).collect();
    let kept_idx = sub_indices(&dims, &kept);
    let traced_idx = sub_indices(&dims, &traced);
    let dk: usize = kept.iter().map(|&k| dims[k]).product();
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for r in 0..n {
        for c in 0..n {
            if traced_idx[r] == traced_idx[c] {
                out[(kept_idx[r], kept_idx[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Reorder tensor factors so the result is labeled by `order`.
pub fn permute_spaces(
    m: &ComplexMatrix,
    spaces: &[SpaceLabel],
    order: &[&str],
) -> Result<ComplexMatrix> {
    check_spaces(spaces, m)?;
    if order.len() != spaces.len() {
        return Err(Error::DimensionMismatch {
            context: "permute_spaces",
            expected: spaces.len(),
            found: order.len(),
        });
    }
    let perm: Vec<usize> = order
        .iter()
        .map(|name| position(spaces, name))
        .collect::<Result<_>>()?;
    for (i, p) in perm.iter().enumerate() {
        if perm[..i].contains(p) {
            return Err(Error::DuplicateLabel(spaces[*p].name.clone()));
        }
    }
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim).collect();
    let map = sub_indices(&dims, &perm);
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Transpose only the factors named in `names`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    spaces: &[SpaceLabel],
    names: &[&str],
) -> Result<ComplexMatrix> {
    check_spaces(spaces, m)?;
    let which: Vec<usize> = names
        .iter()
        .map(|name| position(spaces, name))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim).collect();
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut dr = vec![0; dims.len()];
    let mut dc = vec![0; dims.len()];
    let all: Vec<usize> = (0..dims.len()).collect();
    for r in 0..n {
        digits(r, &dims, &mut dr);
        for c in 0..n {
            digits(c, &dims, &mut dc);
            for &k in &which {
                std::mem::swap(&mut dr[k], &mut dc[k]);
            }
            let (r2, c2) = (
                compose_index(&dr, &dims, &all),
                compose_index(&dc, &dims, &all),
            );
            for &k in &which {
                std::mem::swap(&mut dr[k], &mut dc[k]);
            }
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// An operator together with the ordered labels of its tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator {
    pub matrix: ComplexMatrix,
    pub spaces: Vec<SpaceLabel>,
}

impl LabeledOperator {
    pub fn new(matrix: ComplexMatrix, spaces: Vec<SpaceLabel>) -> Result<Self> {
        check_spaces(&spaces, &matrix)?;
        Ok(Self { matrix, spaces })
    }

    /// The trivial operator `1` on no spaces.
    pub fn scalar_one() -> Self {
        Self {
            matrix: ComplexMatrix::identity(1),
            spaces: Vec::new(),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.spaces.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn space(&self, name: &str) -> Option<&SpaceLabel> {
        self.spaces.iter().find(|s| s.name == name)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut spaces = self.spaces.clone();
        spaces.extend(other.spaces.iter().cloned());
        Self::new(self.matrix.kron(&other.matrix), spaces)
    }

    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        let matrix = permute_spaces(&self.matrix, &self.spaces, order)?;
        let spaces = order
            .iter()
            .map(|n| self.space(n).cloned().expect("checked by permute_spaces"))
            .collect();
        Ok(Self { matrix, spaces })
    }

    pub fn traced_to(&self, keep: &[&str]) -> Result<Self> {
        let matrix = partial_trace(&self.matrix, &self.spaces, keep)?;
        let spaces = self
            .spaces
            .iter()
            .filter(|s| keep.contains(&s.name.as_str()))
            .cloned()
            .collect();
        Ok(Self { matrix, spaces })
    }

    pub fn renamed(mut self, from: &str, to: &str) -> Result<Self> {
        let k = position(&self.spaces, from)?;
        if from != to && self.spaces.iter().any(|s| s.name == to) {
            return Err(Error::DuplicateLabel(to.to_string()));
        }
        self.spaces[k].name = to.to_string();
        Ok(self)
    }
}

/// Link product over shared labels: `Tr_S[(A^{T_S} ⊗ 1)(1 ⊗ B)]`.
///
/// The result is labeled by A's private spaces followed by B's private spaces.
/// With no shared labels this is the tensor product.
pub fn link(a: &LabeledOperator, b: &LabeledOperator) -> Result<LabeledOperator> {
    let shared: Vec<&str> = a
        .spaces
        .iter()
        .filter(|s| b.space(&s.name).is_some())
        .map(|s| s.name.as_str())
        .collect();
    for name in &shared {
        let (da, db) = (a.space(name).unwrap().dim, b.space(name).unwrap().dim);
        if da != db {
            return Err(Error::DimensionMismatch {
                context: "link product shared space",
                expected: da,
                found: db,
            });
        }
    }
    if shared.is_empty() {
        return a.tensor(b);
    }
    let a_private: Vec<&str> = a
        .names()
        .into_iter()
        .filter(|n| !shared.contains(n))
        .collect();
    let b_private: Vec<&str> = b
        .names()
        .into_iter()
        .filter(|n| !shared.contains(n))
        .collect();

    let mut a_order = a_private.clone();
    a_order.extend(&shared);
    let mut b_order = shared.clone();
    b_order.extend(&b_private);
    let ap = a.permuted(&a_order)?;
    let bp = b.permuted(&b_order)?;

    let dx: usize = a_private.iter().map(|n| a.space(n).unwrap().dim).product();
    let ds: usize = shared.iter().map(|n| a.space(n).unwrap().dim).product();
    let dy: usize = b_private.iter().map(|n| b.space(n).unwrap().dim).product();

    // out[(x,y),(x',y')] = Σ_{s,s'} A[(x,s'),(x',s)] · B[(s',y),(s,y')]
    let mut out = ComplexMatrix::zeros(dx * dy, dx * dy);
    for x in 0..dx {
        for xp in 0..dx {
            for s in 0..ds {
                for sp in 0..ds {
                    let av = ap.matrix[(x * ds + sp, xp * ds + s)];
                    if av == ZERO {
                        continue;
                    }
                    for y in 0..dy {
                        for yp in 0..dy {
                            let bv = bp.matrix[(sp * dy + y, s * dy + yp)];
                            out[(x * dy + y, xp * dy + yp)] += av * bv;
                        }
                    }
                }
            }
        }
    }
    let mut spaces: Vec<SpaceLabel> = a_private
        .iter()
        .map(|n| a.space(n).unwrap().clone())
        .collect();
    spaces.extend(b_private.iter().map(|n| b.space(n).unwrap().clone()));
    LabeledOperator::new(out, spaces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::tensor::{C64, ONE};

    fn ab() -> Vec<SpaceLabel> {
        vec![SpaceLabel::qubit("A"), SpaceLabel::qubit("B")]
    }

    #[test]
    fn product_state_marginal() {
        let rho_a = ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => C64::new(0.7, 0.0),
            (1, 1) => C64::new(0.3, 0.0),
            (0, 1) => C64::new(0.1, 0.2),
            _ => C64::new(0.1, -0.2),
        });
        let rho_b = gates::plus();
        let out = partial_trace(&rho_a.kron(&rho_b), &ab(), &["A"]).unwrap();
        assert!(out.max_abs_diff(&rho_a) < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let bell = ComplexMatrix::projector(&gates::phi_plus(2)).scale_real(0.5);
        let out = partial_trace(&bell, &ab(), &["A"]).unwrap();
        assert!(out.max_abs_diff(&gates::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn keeping_everything_is_identity_op() {
        let m = ComplexMatrix::from_fn(4, 4, |r, c| C64::new(r as f64, c as f64));
        assert_eq!(partial_trace(&m, &ab(), &["A", "B"]).unwrap(), m);
    }

    #[test]
    fn partial_trace_errors() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &ab(), &["Q"]),
            Err(Error::UnknownLabel(_))
        ));
        let bad = vec![SpaceLabel::qubit("A"), SpaceLabel::new("B", 3)];
        assert!(matches!(
            partial_trace(&m, &bad, &["A"]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permute_swaps_factors() {
        let a = gates::ket0();
        let b = gates::plus();
        let out = permute_spaces(&a.kron(&b), &ab(), &["B", "A"]).unwrap();
        assert!(out.max_abs_diff(&b.kron(&a)) < 1e-15);
    }

    #[test]
    fn identity_wire_link_relabels_state() {
        // J_id on (in, out) linked with a state on `in` gives the state on `out`.
        let j = LabeledOperator::new(
            ComplexMatrix::projector(&gates::phi_plus(2)),
            vec![SpaceLabel::qubit("in"), SpaceLabel::qubit("out")],
        )
        .unwrap();
        let rho = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.6, 0.0),
                C64::new(0.1, 0.3),
                C64::new(0.1, -0.3),
                C64::new(0.4, 0.0),
            ],
        )
        .unwrap();
        let state = LabeledOperator::new(rho.clone(), vec![SpaceLabel::qubit("in")]).unwrap();
        let out = link(&j, &state).unwrap();
        assert_eq!(out.names(), vec!["out"]);
        assert!(out.matrix.max_abs_diff(&rho) < 1e-15);
        let out2 = link(&state, &j).unwrap();
        assert!(out2.matrix.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn link_without_shared_spaces_is_kron() {
        let a = LabeledOperator::new(gates::plus(), vec![SpaceLabel::qubit("A")]).unwrap();
        let b = LabeledOperator::new(gates::ket1(), vec![SpaceLabel::qubit("B")]).unwrap();
        let out = link(&a, &b).unwrap();
        assert_eq!(out.matrix, gates::plus().kron(&gates::ket1()));
    }

    #[test]
    fn full_contraction_is_elementwise_sum() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c| C64::new(r as f64 + 1.0, c as f64));
        let b = ComplexMatrix::from_fn(2, 2, |r, c| C64::new(c as f64, r as f64 - 1.0));
        let la = LabeledOperator::new(a.clone(), vec![SpaceLabel::qubit("S")]).unwrap();
        let lb = LabeledOperator::new(b.clone(), vec![SpaceLabel::qubit("S")]).unwrap();
        let out = link(&la, &lb).unwrap();
        let expected = a.transpose().mul(&b).trace();
        assert!((out.matrix[(0, 0)] - expected).norm() < 1e-14);
        assert_eq!(out.matrix.rows(), 1);
        let _ = ONE;
    }

    #[test]
    fn partial_transpose_on_all_is_transpose() {
        let m = ComplexMatrix::from_fn(4, 4, |r, c| C64::new((r * 4 + c) as f64, r as f64));
        let pt = partial_transpose(&m, &ab(), &["A", "B"]).unwrap();
        assert_eq!(pt, m.transpose());
    }
}
