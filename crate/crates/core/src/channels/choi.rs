use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates;
use crate::tensor::{
    hermitian_eigen, partial_trace, ComplexMatrix, LabeledOperator, MatrixJson, SpaceLabel, C64,
    ONE, ZERO,
};

/// Kraus eigenvectors with eigenvalue below this are dropped.
pub const KRAUS_CUTOFF: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChoiKind {
    /// Trace preserving.
    Cptp,
    /// Completely positive and trace non-increasing: POVM effects and instrument branches.
    Effect,
}

impl ChoiKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChoiKind::Cptp => "cptp",
            ChoiKind::Effect => "effect",
        }
    }
}

/// `J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)` on `in_space ⊗ out_space`, with unnormalized `|Φ+⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiOperator {
    pub matrix: ComplexMatrix,
    pub in_space: SpaceLabel,
    pub out_space: SpaceLabel,
    pub kind: ChoiKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpVerdict {
    pub psd_ok: bool,
    pub trace_ok: bool,
    /// Largest of `-λ_min` and `‖Tr_out J − I‖_max`.
    pub max_violation: f64,
}

impl CptpVerdict {
    pub fn is_cptp(&self) -> bool {
        self.psd_ok && self.trace_ok
    }
}

impl ChoiOperator {
    pub fn new(
        matrix: ComplexMatrix,
        in_space: SpaceLabel,
        out_space: SpaceLabel,
        kind: ChoiKind,
    ) -> Result<Self> {
        if in_space.name == out_space.name {
            return Err(Error::DuplicateLabel(in_space.name));
        }
        let d = in_space.dim * out_space.dim;
        if !matrix.is_square() || matrix.rows() != d {
            return Err(Error::DimensionMismatch {
                context: "Choi operator",
                expected: d,
                found: matrix.rows(),
            });
        }
        Ok(Self {
            matrix,
            in_space,
            out_space,
            kind,
        })
    }

    /// Choi of the functional `ρ ↦ Tr[Eρ]`, i.e. `Eᵀ` with a trivial output space.
    pub fn effect(e: &ComplexMatrix, space: SpaceLabel) -> Result<Self> {
        let out = SpaceLabel::new(format!("{}#", space.name), 1);
        Self::new(e.transpose(), space, out, ChoiKind::Effect)
    }

    pub fn d_in(&self) -> usize {
        self.in_space.dim
    }

    pub fn d_out(&self) -> usize {
        self.out_space.dim
    }

    pub fn with_spaces(mut self, in_name: &str, out_name: &str) -> Result<Self> {
        if in_name == out_name {
            return Err(Error::DuplicateLabel(in_name.to_string()));
        }
        self.in_space.name = in_name.to_string();
        self.out_space.name = out_name.to_string();
        Ok(self)
    }

    /// As a labeled operator for link products; dimension-one factors are dropped.
    pub fn to_labeled(&self) -> LabeledOperator {
        let spaces: Vec<SpaceLabel> = [&self.in_space, &self.out_space]
            .into_iter()
            .filter(|s| s.dim > 1)
            .cloned()
            .collect();
        LabeledOperator {
            matrix: self.matrix.clone(),
            spaces,
        }
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(
            &self.matrix,
            &[self.in_space.clone(), self.out_space.clone()],
        )
        .with_kind(self.kind.as_str())
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        let m = j.to_matrix()?;
        let [in_space, out_space] =
            <[SpaceLabel; 2]>::try_from(j.spaces.clone()).map_err(|_| {
                Error::InvalidArgument("a Choi operator needs exactly two spaces".into())
            })?;
        let kind = match j.kind.as_deref() {
            Some("cptp") | None => ChoiKind::Cptp,
            Some("effect") => ChoiKind::Effect,
            Some(other) => {
                return Err(Error::InvalidArgument(format!(
                    "unknown Choi kind `{other}`"
                )))
            }
        };
        Self::new(m, in_space, out_space, kind)
    }
}

fn kraus_sum(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let d_in = kraus[0].cols();
    let mut s = ComplexMatrix::zeros(d_in, d_in);
    for k in kraus {
        s.add_assign_scaled(&k.dagger().mul(k), ONE);
    }
    s
}

/// Max deviation of `Σ K†K` from the identity.
pub fn kraus_completeness_error(kraus: &[ComplexMatrix]) -> f64 {
    if kraus.is_empty() {
        return f64::INFINITY;
    }
    kraus_sum(kraus).max_abs_diff(&ComplexMatrix::identity(kraus[0].cols()))
}

fn check_kraus_shapes(kraus: &[ComplexMatrix]) -> Result<(usize, usize)> {
    let first = kraus.first().ok_or(Error::Empty("Kraus operators"))?;
    let (d_out, d_in) = (first.rows(), first.cols());
    for k in kraus {
        if k.rows() != d_out || k.cols() != d_in {
            return Err(Error::DimensionMismatch {
                context: "Kraus operator shape",
                expected: d_out * d_in,
                found: k.rows() * k.cols(),
            });
        }
    }
    Ok((d_out, d_in))
}

/// Kind is `Cptp` when `Σ K†K = I` within 1e-9, `Effect` otherwise.
pub fn choi_from_kraus(
    kraus: &[ComplexMatrix],
    in_space: SpaceLabel,
    out_space: SpaceLabel,
) -> Result<ChoiOperator> {
    let (d_out, d_in) = check_kraus_shapes(kraus)?;
    if in_space.dim != d_in || out_space.dim != d_out {
        return Err(Error::DimensionMismatch {
            context: "Kraus operators vs space labels",
            expected: in_space.dim * out_space.dim,
            found: d_in * d_out,
        });
    }
    let d = d_in * d_out;
    let mut j = ComplexMatrix::zeros(d, d);
    for k in kraus {
        // v[i*d_out + o] = K[o, i]
        let v: Vec<C64> = (0..d).map(|idx| k[(idx % d_out, idx / d_out)]).collect();
        j.add_assign_scaled(&ComplexMatrix::projector(&v), ONE);
    }
    let kind = if kraus_completeness_error(kraus) <= 1e-9 {
        ChoiKind::Cptp
    } else {
        ChoiKind::Effect
    };
    ChoiOperator::new(j, in_space, out_space, kind)
}

/// Kraus operators from the spectral decomposition of `J`.
pub fn kraus_from_choi(j: &ChoiOperator, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let e = hermitian_eigen(&j.matrix, tol)?;
    if e.min_value() < -tol {
        return Err(Error::NotPsd(e.min_value()));
    }
    let (d_in, d_out) = (j.d_in(), j.d_out());
    let kraus = e
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= KRAUS_CUTOFF)
        .map(|(k, &l)| {
            let v = e.vector(k);
            let s = l.sqrt();
            ComplexMatrix::from_fn(d_out, d_in, |o, i| v[i * d_out + o] * s)
        })
        .collect::<Vec<_>>();
    if kraus.is_empty() {
        return Ok(vec![ComplexMatrix::zeros(d_out, d_in)]);
    }
    Ok(kraus)
}

pub fn is_cptp(j: &ChoiOperator, tol: f64) -> CptpVerdict {
    let neg = match hermitian_eigen(&j.matrix, tol) {
        Ok(e) => (-e.min_value()).max(0.0),
        Err(_) => f64::INFINITY,
    };
    let spaces = [j.in_space.clone(), j.out_space.clone()];
    let reduced = partial_trace(&j.matrix, &spaces, &[j.in_space.name.as_str()])
        .expect("labels valid by construction");
    let trace_dev = reduced.max_abs_diff(&ComplexMatrix::identity(j.d_in()));
    CptpVerdict {
        psd_ok: neg <= tol,
        trace_ok: trace_dev <= tol,
        max_violation: neg.max(trace_dev),
    }
}

/// `E(ρ) = Tr_in[(ρᵀ ⊗ I) J]`
pub fn apply_channel(j: &ChoiOperator, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (d_in, d_out) = (j.d_in(), j.d_out());
    if !rho.is_square() || rho.rows() != d_in {
        return Err(Error::DimensionMismatch {
            context: "channel input",
            expected: d_in,
            found: rho.rows(),
        });
    }
    let mut out = ComplexMatrix::zeros(d_out, d_out);
    for i in 0..d_in {
        for ip in 0..d_in {
            let r = rho[(i, ip)];
            if r == ZERO {
                continue;
            }
            for o in 0..d_out {
                for op in 0..d_out {
                    out[(o, op)] += r * j.matrix[(i * d_out + o, ip * d_out + op)];
                }
            }
        }
    }
    Ok(out)
}

/// `E(ρ)/Tr[E(ρ)]`; fails when the normalization is at most `tol`.
pub fn conditional_state(j: &ChoiOperator, rho: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let out = apply_channel(j, rho)?;
    let t = out.trace().re;
    if t <= tol {
        return Err(Error::VanishingNormalization(t));
    }
    Ok(out.scale_real(1.0 / t))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

fn qubit_register_spaces(n_qubits: usize) -> (SpaceLabel, SpaceLabel) {
    let d = 1usize << n_qubits;
    (SpaceLabel::new("in", d), SpaceLabel::new("out", d))
}

/// `D_p(ρ) = (1−p)ρ + p·I/2ⁿ`, built as `(1−p)|Φ+⟩⟨Φ+| + p·I⊗I/2ⁿ`.
pub fn depolarizing(p: f64, n_qubits: usize) -> Result<ChoiOperator> {
    check_probability(p)?;
    let d = 1usize << n_qubits;
    let phi = ComplexMatrix::projector(&gates::phi_plus(d));
    let mixed = ComplexMatrix::identity(d * d).scale_real(p / d as f64);
    let j = phi.scale_real(1.0 - p).add(&mixed)?;
    let (i, o) = qubit_register_spaces(n_qubits);
    ChoiOperator::new(j, i, o, ChoiKind::Cptp)
}

/// Pauli-twirl Kraus form of `D_p` on `n` qubits: identity weight `1 − p + p/4ⁿ`,
/// every other Pauli string `p/4ⁿ`. Zero-weight operators are omitted.
pub fn depolarizing_kraus(p: f64, n_qubits: usize) -> Result<Vec<ComplexMatrix>> {
    check_probability(p)?;
    let n_strings = 1usize << (2 * n_qubits);
    let w_other = p / n_strings as f64;
    let paulis = gates::paulis();
    let mut out = Vec::new();
    for s in 0..n_strings {
        let w = if s == 0 { 1.0 - p + w_other } else { w_other };
        if w <= 0.0 {
            continue;
        }
        let mut k = ComplexMatrix::identity(1);
        for q in (0..n_qubits).rev() {
            k = k.kron(&paulis[(s >> (2 * q)) & 3]);
        }
        out.push(k.scale_real(w.sqrt()));
    }
    Ok(out)
}

fn check_state(sigma: &ComplexMatrix, tol: f64) -> Result<()> {
    if !sigma.is_square() {
        return Err(Error::InvalidState("not square".into()));
    }
    let t = sigma.trace();
    if (t.re - 1.0).abs() > tol || t.im.abs() > tol {
        return Err(Error::InvalidState(format!("trace {t}")));
    }
    let e = hermitian_eigen(sigma, tol).map_err(|_| Error::InvalidState("not Hermitian".into()))?;
    if e.min_value() < -tol {
        return Err(Error::InvalidState(format!(
            "min eigenvalue {:.3e}",
            e.min_value()
        )));
    }
    Ok(())
}

pub(crate) fn validate_state(sigma: &ComplexMatrix) -> Result<()> {
    check_state(sigma, crate::tensor::DEFAULT_TOL)
}

/// Replacement channel `ρ ↦ Tr[ρ]·σ` with Choi `I ⊗ σ`.
pub fn do_intervention(
    sigma: &ComplexMatrix,
    in_space: SpaceLabel,
    out_space: SpaceLabel,
) -> Result<ChoiOperator> {
    validate_state(sigma)?;
    if sigma.rows() != out_space.dim {
        return Err(Error::DimensionMismatch {
            context: "do-intervention state",
            expected: out_space.dim,
            found: sigma.rows(),
        });
    }
    let j = ComplexMatrix::identity(in_space.dim).kron(sigma);
    ChoiOperator::new(j, in_space, out_space, ChoiKind::Cptp)
}

/// Choi of `E₂ ∘ E₁`, labeled `j1.in_space → j2.out_space`.
pub fn compose(j2: &ChoiOperator, j1: &ChoiOperator) -> Result<ChoiOperator> {
    if j1.d_out() != j2.d_in() {
        return Err(Error::DimensionMismatch {
            context: "channel composition",
            expected: j1.d_out(),
            found: j2.d_in(),
        });
    }
    let (di, dm, d_o) = (j1.d_in(), j1.d_out(), j2.d_out());
    let mut out = ComplexMatrix::zeros(di * d_o, di * d_o);
    // J[(i,o),(i',o')] = Σ_{m,m'} J1[(i,m),(i',m')] J2[(m,o),(m',o')]
    for i in 0..di {
        for ip in 0..di {
            for m in 0..dm {
                for mp in 0..dm {
                    let a = j1.matrix[(i * dm + m, ip * dm + mp)];
                    if a == ZERO {
                        continue;
                    }
                    for o in 0..d_o {
                        for op in 0..d_o {
                            out[(i * d_o + o, ip * d_o + op)] +=
                                a * j2.matrix[(m * d_o + o, mp * d_o + op)];
                        }
                    }
                }
            }
        }
    }
    let kind = if j1.kind == ChoiKind::Cptp && j2.kind == ChoiKind::Cptp {
        ChoiKind::Cptp
    } else {
        ChoiKind::Effect
    };
    let mut out_space = j2.out_space.clone();
    if out_space.name == j1.in_space.name {
        out_space.name.push('\'');
    }
    ChoiOperator::new(out, j1.in_space.clone(), out_space, kind)
}

/// Unitary channel `ρ ↦ UρU†` on qubit-style labels `in`/`out`.
pub fn unitary_channel(u: &ComplexMatrix) -> Result<ChoiOperator> {
    choi_from_kraus(
        std::slice::from_ref(u),
        SpaceLabel::new("in", u.cols()),
        SpaceLabel::new("out", u.rows()),
    )
}

pub fn kraus_channel(kraus: &[ComplexMatrix]) -> Result<ChoiOperator> {
    let (d_out, d_in) = check_kraus_shapes(kraus)?;
    choi_from_kraus(
        kraus,
        SpaceLabel::new("in", d_in),
        SpaceLabel::new("out", d_out),
    )
}

/// `Σ_a K_a ρ K_a†`
pub fn apply_kraus(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let d = kraus[0].rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in kraus {
        out.add_assign_scaled(&k.conjugate(rho), ONE);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(name: &str) -> SpaceLabel {
        SpaceLabel::qubit(name)
    }

    fn identity_choi() -> ChoiOperator {
        unitary_channel(&ComplexMatrix::identity(2)).unwrap()
    }

    #[test]
    fn identity_choi_entries() {
        let j = identity_choi();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if [0, 3].contains(&r) && [0, 3].contains(&c) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(j.matrix[(r, c)], C64::new(expect, 0.0));
            }
        }
        assert_eq!(j.kind, ChoiKind::Cptp);
    }

    #[test]
    fn pauli_x_choi_is_relabeled_identity() {
        let ix = ComplexMatrix::identity(2).kron(&gates::x());
        let expect = ix.conjugate(&identity_choi().matrix);
        assert!(
            unitary_channel(&gates::x())
                .unwrap()
                .matrix
                .max_abs_diff(&expect)
                < 1e-15
        );
    }

    #[test]
    fn fully_depolarizing_from_kraus() {
        let ks = depolarizing_kraus(1.0, 1).unwrap();
        let j = kraus_channel(&ks).unwrap();
        let expect = ComplexMatrix::identity(4).scale_real(0.5);
        assert!(j.matrix.max_abs_diff(&expect) < 1e-15);
        assert!(j.matrix.max_abs_diff(&depolarizing(1.0, 1).unwrap().matrix) < 1e-15);
    }

    #[test]
    fn kraus_errors() {
        assert!(matches!(kraus_channel(&[]), Err(Error::Empty(_))));
        let bad = [ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(kraus_channel(&bad).is_err());
    }

    #[test]
    fn kraus_from_identity_choi() {
        let ks = kraus_from_choi(&identity_choi(), 1e-9).unwrap();
        assert_eq!(ks.len(), 1);
        let phase = ks[0][(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(
            ks[0]
                .scale(phase.conj())
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-12
        );
    }

    #[test]
    fn kraus_round_trip_depolarizing() {
        let j = depolarizing(1.0, 1).unwrap();
        let ks = kraus_from_choi(&j, 1e-9).unwrap();
        assert_eq!(ks.len(), 4);
        let back = choi_from_kraus(&ks, j.in_space.clone(), j.out_space.clone()).unwrap();
        assert!(back.matrix.max_abs_diff(&j.matrix) < 1e-9);
    }

    #[test]
    fn kraus_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let j = kraus_channel(&random::cptp_kraus(2, 2, 3, &mut rng)).unwrap();
            let back = kraus_channel(&kraus_from_choi(&j, 1e-9).unwrap()).unwrap();
            assert!(back.matrix.max_abs_diff(&j.matrix) <= 1e-8);
        }
    }

    #[test]
    fn cptp_verdicts() {
        assert!(is_cptp(&identity_choi(), 1e-9).is_cptp());
        let mut twice = identity_choi();
        twice.matrix = twice.matrix.scale_real(2.0);
        let v = is_cptp(&twice, 1e-9);
        assert!(v.psd_ok && !v.trace_ok);
        let eff = ChoiOperator::new(
            gates::ket0().kron(&ComplexMatrix::identity(2)),
            q("in"),
            q("out"),
            ChoiKind::Effect,
        )
        .unwrap();
        let v = is_cptp(&eff, 1e-9);
        assert!(v.psd_ok && !v.trace_ok);
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random::density_matrix(2, &mut rng);
        assert!(
            apply_channel(&identity_choi(), &rho)
                .unwrap()
                .max_abs_diff(&rho)
                < 1e-15
        );
        let out = apply_channel(&depolarizing(1.0, 1).unwrap(), &gates::ket0()).unwrap();
        assert!(out.max_abs_diff(&gates::maximally_mixed(2)) < 1e-15);
        let out = apply_channel(&unitary_channel(&gates::x()).unwrap(), &gates::ket0()).unwrap();
        assert!(out.max_abs_diff(&gates::ket1()) < 1e-15);
        assert!(apply_channel(&identity_choi(), &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn choi_and_kraus_application_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let ks = random::cptp_kraus(2, 3, 2, &mut rng);
            let rho = random::density_matrix(2, &mut rng);
            let via_choi = apply_channel(&kraus_channel(&ks).unwrap(), &rho).unwrap();
            assert!(via_choi.max_abs_diff(&apply_kraus(&ks, &rho)) < 1e-10);
        }
    }

    #[test]
    fn conditional_state_examples() {
        let ch = depolarizing(0.3, 1).unwrap();
        let c = conditional_state(&ch, &gates::plus(), 1e-12).unwrap();
        assert!(c.max_abs_diff(&apply_channel(&ch, &gates::plus()).unwrap()) < 1e-15);

        // Lüders projection onto |0⟩ fires with probability 1/2 on |+⟩.
        let proj = kraus_channel(&[gates::ket0()]).unwrap();
        assert_eq!(proj.kind, ChoiKind::Effect);
        let raw = apply_channel(&proj, &gates::plus()).unwrap();
        assert!((raw.trace().re - 0.5).abs() < 1e-15);
        let c = conditional_state(&proj, &gates::plus(), 1e-12).unwrap();
        assert!(c.max_abs_diff(&raw.scale_real(2.0)) < 1e-15);

        assert!(matches!(
            conditional_state(&proj, &gates::ket1(), 1e-12),
            Err(Error::VanishingNormalization(_))
        ));
    }

    #[test]
    fn depolarizing_examples() {
        assert!(
            depolarizing(0.0, 1)
                .unwrap()
                .matrix
                .max_abs_diff(&identity_choi().matrix)
                < 1e-15
        );
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random::density_matrix(4, &mut rng);
        let out = apply_channel(&depolarizing(1.0, 2).unwrap(), &rho).unwrap();
        assert!(out.max_abs_diff(&gates::maximally_mixed(4)) < 1e-15);

        let j = depolarizing(0.03, 3).unwrap();
        assert!((j.matrix.trace().re - 8.0).abs() < 1e-12);
        assert!(hermitian_eigen(&j.matrix, 1e-9).unwrap().min_value() >= -1e-12);
        assert!(is_cptp(&j, 1e-9).is_cptp());
        assert!(depolarizing(1.5, 1).is_err());
        assert!(depolarizing(-0.1, 1).is_err());
    }

    #[test]
    fn depolarizing_kraus_matches_choi() {
        for n in 1..=3 {
            for p in [0.0, 0.01, 0.5, 1.0] {
                let ks = depolarizing_kraus(p, n).unwrap();
                assert!(kraus_completeness_error(&ks) < 1e-12);
                let j = kraus_channel(&ks).unwrap();
                assert!(j.matrix.max_abs_diff(&depolarizing(p, n).unwrap().matrix) < 1e-12);
            }
        }
    }

    #[test]
    fn depolarizing_is_linear_in_p() {
        let j0 = depolarizing(0.0, 1).unwrap().matrix;
        let j1 = depolarizing(1.0, 1).unwrap().matrix;
        for p in [0.1, 0.37, 0.9] {
            let mix = j0.scale_real(1.0 - p).add(&j1.scale_real(p)).unwrap();
            assert!(depolarizing(p, 1).unwrap().matrix.max_abs_diff(&mix) < 1e-15);
        }
    }

    #[test]
    fn do_intervention_examples() {
        let d = do_intervention(&gates::ket0(), q("in"), q("out")).unwrap();
        assert!(
            apply_channel(&d, &gates::ket1())
                .unwrap()
                .max_abs_diff(&gates::ket0())
                < 1e-15
        );
        assert!(is_cptp(&d, 1e-9).is_cptp());
        let mixed = do_intervention(&gates::maximally_mixed(2), q("in"), q("out")).unwrap();
        assert!(
            mixed
                .matrix
                .max_abs_diff(&depolarizing(1.0, 1).unwrap().matrix)
                < 1e-15
        );
        assert!(do_intervention(&ComplexMatrix::diag(&[1.0, 1.0]), q("in"), q("out")).is_err());
        assert!(do_intervention(&ComplexMatrix::diag(&[1.5, -0.5]), q("in"), q("out")).is_err());
    }

    #[test]
    fn compose_examples() {
        let x = unitary_channel(&gates::x()).unwrap();
        assert!(
            compose(&x, &x)
                .unwrap()
                .matrix
                .max_abs_diff(&identity_choi().matrix)
                < 1e-15
        );
        assert!(
            compose(&identity_choi(), &x)
                .unwrap()
                .matrix
                .max_abs_diff(&x.matrix)
                < 1e-15
        );
        let d = do_intervention(&gates::plus(), q("in"), q("out")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let j = kraus_channel(&random::cptp_kraus(2, 2, 2, &mut rng)).unwrap();
            assert!(compose(&d, &j).unwrap().matrix.max_abs_diff(&d.matrix) < 1e-12);
        }
        let three = kraus_channel(&[ComplexMatrix::identity(3)]).unwrap();
        assert!(compose(&three, &x).is_err());
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = kraus_channel(&random::cptp_kraus(2, 3, 2, &mut rng)).unwrap();
        let b = kraus_channel(&random::cptp_kraus(3, 2, 2, &mut rng)).unwrap();
        let rho = random::density_matrix(2, &mut rng);
        let seq = apply_channel(&b, &apply_channel(&a, &rho).unwrap()).unwrap();
        let ab = compose(&b, &a).unwrap();
        assert!(apply_channel(&ab, &rho).unwrap().max_abs_diff(&seq) < 1e-12);
        assert!(is_cptp(&ab, 1e-9).is_cptp());
    }

    #[test]
    fn effect_choi_is_transpose() {
        let e = ChoiOperator::effect(&gates::plus(), q("F")).unwrap();
        let p = apply_channel(&e, &gates::ket0()).unwrap();
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-15);
        assert_eq!(e.to_labeled().names(), vec!["F"]);
    }

    #[test]
    fn json_round_trip() {
        let j = depolarizing(0.2, 1)
            .unwrap()
            .with_spaces("A_I", "A_O")
            .unwrap();
        let text = serde_json::to_string(&j.to_json()).unwrap();
        assert!(text.contains("\"kind\":\"cptp\""));
        let back = ChoiOperator::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, j);
    }
}
