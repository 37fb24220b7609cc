use serde::{Deserialize, Serialize};

use super::matrix::{ProcessMatrix, CONTROL};
use crate::channels::{kraus_completeness_error, validate_state};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, SpaceLabel, ONE};

pub const A_I: &str = "A_I";
pub const A_O: &str = "A_O";
pub const B_I: &str = "B_I";
pub const B_O: &str = "B_O";
pub const FUTURE: &str = "F";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalOrder {
    #[serde(rename = "A<B")]
    AB,
    #[serde(rename = "B<A")]
    BA,
}

impl CausalOrder {
    /// Order selected by control basis state `q` in the switch.
    pub fn for_control(q: usize) -> Self {
        if q == 0 {
            CausalOrder::AB
        } else {
            CausalOrder::BA
        }
    }
}

/// `[A_I, A_O, B_I, B_O, F]`, each of dimension `d`.
pub fn party_spaces(d: usize) -> Vec<SpaceLabel> {
    [A_I, A_O, B_I, B_O, FUTURE]
        .into_iter()
        .map(|n| SpaceLabel::new(n, d))
        .collect()
}

/// Indices `(row, weight 1)` of the wiring vector `|w_p⟩` over `[A_I, A_O, B_I, B_O, F]`.
///
/// A≺B: `|p⟩_{A_I} |1⟩⟩_{A_O B_I} |1⟩⟩_{B_O F}`;
/// B≺A: `|p⟩_{B_I} |1⟩⟩_{B_O A_I} |1⟩⟩_{A_O F}`.
fn wiring_support(order: CausalOrder, p: usize, d: usize) -> Vec<usize> {
    let idx = |ai: usize, ao: usize, bi: usize, bo: usize, f: usize| {
        (((ai * d + ao) * d + bi) * d + bo) * d + f
    };
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            out.push(match order {
                CausalOrder::AB => idx(p, m, m, n, n),
                CausalOrder::BA => idx(m, n, p, m, n),
            });
        }
    }
    out
}

/// Definite-order process `Σ ρ_{pp'} |w_p⟩⟨w_p'|`; global input feeds the first party,
/// the last party's output is the future `F`.
pub fn fixed_order_process(rho_in: &ComplexMatrix, order: CausalOrder) -> Result<ProcessMatrix> {
    validate_state(rho_in)?;
    let d = rho_in.rows();
    let n = d.pow(5);
    let mut w = ComplexMatrix::zeros(n, n);
    for p in 0..d {
        let rows = wiring_support(order, p, d);
        for pp in 0..d {
            let coef = rho_in[(p, pp)];
            for &r in &rows {
                for &c in &wiring_support(order, pp, d) {
                    w[(r, c)] += coef;
                }
            }
        }
    }
    ProcessMatrix::new(w, party_spaces(d))
}

/// Switch process on `[A_I, A_O, B_I, B_O, F, C]`:
/// `Σ (ρ_t)_{pp'} (ρ_c)_{qq'} |w_p^{(q)}⟩|q⟩ ⟨w_{p'}^{(q')}|⟨q'|` where control `|0⟩` wires A≺B
/// and `|1⟩` wires B≺A.
pub fn switch_process_matrix(
    control_prep: &ComplexMatrix,
    target_prep: &ComplexMatrix,
) -> Result<ProcessMatrix> {
    validate_state(control_prep)?;
    validate_state(target_prep)?;
    if control_prep.rows() != 2 {
        return Err(Error::DimensionMismatch {
            context: "switch control",
            expected: 2,
            found: control_prep.rows(),
        });
    }
    let d = target_prep.rows();
    let n = d.pow(5) * 2;
    let mut w = ComplexMatrix::zeros(n, n);
    let support: Vec<Vec<Vec<usize>>> = (0..2)
        .map(|q| {
            (0..d)
                .map(|p| wiring_support(CausalOrder::for_control(q), p, d))
                .collect()
        })
        .collect();
    for q in 0..2 {
        for qq in 0..2 {
            let cc = control_prep[(q, qq)];
            for p in 0..d {
                for pp in 0..d {
                    let coef = cc * target_prep[(p, pp)];
                    if coef.norm() == 0.0 {
                        continue;
                    }
                    for &r in &support[q][p] {
                        for &c in &support[qq][pp] {
                            w[(r * 2 + q, c * 2 + qq)] += coef;
                        }
                    }
                }
            }
        }
    }
    let mut spaces = party_spaces(d);
    spaces.push(SpaceLabel::qubit(CONTROL));
    ProcessMatrix::new(w, spaces)
}

/// Switch output on target ⊗ control for arbitrary CP maps given as Kraus sets:
/// `Σ_ij K_ij ρ K_ij†` with `K_ij = B_j A_i ⊗ |0⟩⟨0| + A_i B_j ⊗ |1⟩⟨1|`.
pub(crate) fn switch_output_unchecked(
    a: &[ComplexMatrix],
    b: &[ComplexMatrix],
    target: &ComplexMatrix,
    control: &ComplexMatrix,
) -> ComplexMatrix {
    let p0 = ComplexMatrix::basis_projector(2, 0);
    let p1 = ComplexMatrix::basis_projector(2, 1);
    let rho = target.kron(control);
    let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for ai in a {
        for bj in b {
            let k = bj
                .mul(ai)
                .kron(&p0)
                .add(&ai.mul(bj).kron(&p1))
                .expect("equal shapes");
            out.add_assign_scaled(&k.conjugate(&rho), ONE);
        }
    }
    out
}

/// The quantum switch as a supermap on CPTP channels `A`, `B`.
pub fn switch_supermap(
    a: &[ComplexMatrix],
    b: &[ComplexMatrix],
    target: &ComplexMatrix,
    control: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    for ks in [a, b] {
        let err = kraus_completeness_error(ks);
        if err > crate::tensor::DEFAULT_TOL {
            return Err(Error::NotTracePreserving(err));
        }
        if ks[0].rows() != target.rows() || ks[0].cols() != target.rows() {
            return Err(Error::DimensionMismatch {
                context: "switch channel",
                expected: target.rows(),
                found: ks[0].rows(),
            });
        }
    }
    validate_state(target)?;
    validate_state(control)?;
    Ok(switch_output_unchecked(a, b, target, control))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_kraus, unitary_channel};
    use crate::gates;
    use crate::process::{
        born_probability, effect_on, identity_effect, interference_norm, validate_process,
    };
    use crate::random;
    use crate::tensor::{is_psd, partial_trace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: &str) -> SpaceLabel {
        SpaceLabel::qubit(n)
    }

    fn party(u: &ComplexMatrix, name: &str) -> crate::tensor::LabeledOperator {
        unitary_channel(u)
            .unwrap()
            .with_spaces(&format!("{name}_I"), &format!("{name}_O"))
            .unwrap()
            .to_labeled()
    }

    fn future_prob(
        w: &ProcessMatrix,
        a: &ComplexMatrix,
        b: &ComplexMatrix,
        e: &ComplexMatrix,
    ) -> f64 {
        born_probability(
            w,
            &[
                party(a, "A"),
                party(b, "B"),
                effect_on(e, &q(FUTURE)).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fixed_order_pass_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::density_matrix(2, &mut rng);
        let w = fixed_order_process(&rho, CausalOrder::AB).unwrap();
        let id = ComplexMatrix::identity(2);
        for m in gates::x_basis() {
            let p = future_prob(&w, &id, &id, &m);
            assert!((p - m.mul(&rho).trace().re).abs() < 1e-14);
        }
    }

    #[test]
    fn fixed_order_single_flip() {
        let w = fixed_order_process(&gates::ket0(), CausalOrder::AB).unwrap();
        let p = future_prob(&w, &gates::x(), &ComplexMatrix::identity(2), &gates::ket1());
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_order_h_then_x() {
        let w = fixed_order_process(&gates::ket0(), CausalOrder::AB).unwrap();
        let out = gates::x().mul(&gates::h()).conjugate(&gates::ket0());
        for (k, e) in gates::z_basis().iter().enumerate() {
            let p = future_prob(&w, &gates::h(), &gates::x(), e);
            assert!((p - out[(k, k)].re).abs() < 1e-14);
            assert!((p - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn fixed_orders_are_valid_processes() {
        for order in [CausalOrder::AB, CausalOrder::BA] {
            let w = fixed_order_process(&gates::plus(), order).unwrap();
            let v = validate_process(&w, 1e-9);
            assert!(v.is_valid(), "{v:?}");
            assert_eq!(v.parties, vec!["A".to_string(), "B".to_string()]);
        }
    }

    #[test]
    fn ba_order_applies_b_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, b) = (random::unitary(2, &mut rng), random::unitary(2, &mut rng));
        let rho = random::density_matrix(2, &mut rng);
        let w = fixed_order_process(&rho, CausalOrder::BA).unwrap();
        let out = a.mul(&b).conjugate(&rho);
        let p = future_prob(&w, &a, &b, &gates::ket0());
        assert!((p - out[(0, 0)].re).abs() < 1e-12);
    }

    #[test]
    fn switch_with_identity_channels_is_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random::density_matrix(2, &mut rng);
        let c = random::density_matrix(2, &mut rng);
        let id = [ComplexMatrix::identity(2)];
        let out = switch_supermap(&id, &id, &t, &c).unwrap();
        assert!(out.max_abs_diff(&t.kron(&c)) < 1e-14);
    }

    #[test]
    fn switch_definite_controls() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random::cptp_kraus(2, 2, 2, &mut rng);
        let b = random::cptp_kraus(2, 2, 3, &mut rng);
        let t = random::density_matrix(2, &mut rng);
        let out0 = switch_supermap(&a, &b, &t, &gates::ket0()).unwrap();
        let ba = apply_kraus(&b, &apply_kraus(&a, &t));
        assert!(out0.max_abs_diff(&ba.kron(&gates::ket0())) < 1e-13);
        let out1 = switch_supermap(&a, &b, &t, &gates::ket1()).unwrap();
        let ab = apply_kraus(&a, &apply_kraus(&b, &t));
        assert!(out1.max_abs_diff(&ab.kron(&gates::ket1())) < 1e-13);
    }

    #[test]
    fn switch_definite_order_marginal() {
        let out =
            switch_supermap(&[gates::h()], &[gates::x()], &gates::ket0(), &gates::ket0()).unwrap();
        let spaces = [q("T"), q("C")];
        let t = partial_trace(&out, &spaces, &["T"]).unwrap();
        assert!((t[(0, 0)].re - 0.5).abs() < 1e-15 && (t[(1, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn switch_rejects_non_cptp() {
        let r = switch_supermap(
            &[gates::ket0()],
            &[gates::x()],
            &gates::ket0(),
            &gates::plus(),
        );
        assert!(matches!(r, Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn switch_process_is_psd_and_normalized() {
        let w = switch_process_matrix(&gates::plus(), &gates::ket0()).unwrap();
        assert!(is_psd(w.matrix(), 1e-9));
        assert!(validate_process(&w, 1e-9).is_valid());
        // Tr W = d_{A_O} d_{B_O}
        assert!((w.matrix().trace().re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn decohered_switch_splits_into_fixed_orders() {
        let t = gates::plus();
        let w = switch_process_matrix(&gates::maximally_mixed(2), &t).unwrap();
        let ab = fixed_order_process(&t, CausalOrder::AB)
            .unwrap()
            .matrix()
            .kron(&gates::ket0());
        let ba = fixed_order_process(&t, CausalOrder::BA)
            .unwrap()
            .matrix()
            .kron(&gates::ket1());
        let mix = ab.add(&ba).unwrap().scale_real(0.5);
        assert!(w.matrix().max_abs_diff(&mix) < 1e-15);
        assert_eq!(interference_norm(&w).unwrap(), 0.0);
    }

    #[test]
    fn coherent_switch_has_interference() {
        let w = switch_process_matrix(&gates::plus(), &gates::ket0()).unwrap();
        assert!(interference_norm(&w).unwrap() > 0.1);
    }

    #[test]
    fn fixed_order_with_diagonal_control_has_no_interference() {
        let w = fixed_order_process(&gates::plus(), CausalOrder::AB).unwrap();
        for c in [gates::ket0(), gates::maximally_mixed(2)] {
            let mut spaces = w.spaces().to_vec();
            spaces.push(q(CONTROL));
            let wc = ProcessMatrix::new(w.matrix().kron(&c), spaces).unwrap();
            assert_eq!(interference_norm(&wc).unwrap(), 0.0);
        }
    }

    #[test]
    fn switch_control_zero_matches_fixed_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random::density_matrix(2, &mut rng);
        for (ctrl, order) in [
            (gates::ket0(), CausalOrder::AB),
            (gates::ket1(), CausalOrder::BA),
        ] {
            let ws = switch_process_matrix(&ctrl, &t).unwrap();
            let wf = fixed_order_process(&t, order).unwrap();
            for _ in 0..5 {
                let (a, b) = (random::unitary(2, &mut rng), random::unitary(2, &mut rng));
                for e in gates::z_basis() {
                    let ps = born_probability(
                        &ws,
                        &[
                            party(&a, "A"),
                            party(&b, "B"),
                            effect_on(&e, &q(FUTURE)).unwrap(),
                            identity_effect(&q(CONTROL)),
                        ],
                    )
                    .unwrap();
                    assert!((ps - future_prob(&wf, &a, &b, &e)).abs() < 1e-12);
                }
            }
        }
    }
}
