//! Seeded random operators and scenarios for property tests and process validation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::Instrument;
use crate::process::{CausalOrder, InterventionSite, OutcomeSite, SwitchScenario, Wiring};
use crate::sim::NoiseModel;
use crate::tensor::{hermitian_eigen, ComplexMatrix, SpaceLabel, C64, DEFAULT_TOL};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    ComplexMatrix::from_fn(dim, dim, |r, c| (g[(r, c)] + g[(c, r)].conj()) * 0.5)
}

/// Haar-distributed unitary via Gram-Schmidt on a Ginibre matrix.
pub fn unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|r| g[(r, c)]).collect();
        for u in &cols {
            let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= overlap * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

pub fn pure_state(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    ComplexMatrix::projector(&v).scale_real(1.0 / norm)
}

/// Full-rank mixed state `GG†/Tr(GG†)`.
pub fn density_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let m = g.mul(&g.dagger());
    let t = m.trace().re;
    m.scale_real(1.0 / t)
}

/// Kraus set `G_k S^{-1/2}` with `S = Σ G_k†G_k`, so `Σ K_k†K_k = I`.
pub fn cptp_kraus(
    d_in: usize,
    d_out: usize,
    n_kraus: usize,
    rng: &mut impl Rng,
) -> Vec<ComplexMatrix> {
    let gs: Vec<ComplexMatrix> = (0..n_kraus).map(|_| ginibre(d_out, d_in, rng)).collect();
    let mut s = ComplexMatrix::zeros(d_in, d_in);
    for g in &gs {
        s.add_assign_scaled(&g.dagger().mul(g), C64::new(1.0, 0.0));
    }
    let inv_sqrt = hermitian_eigen(&s, DEFAULT_TOL)
        .expect("Gram matrix is Hermitian")
        .map_spectrum(|x| 1.0 / x.sqrt());
    gs.iter().map(|g| g.mul(&inv_sqrt)).collect()
}

/// POVM `{K_k†K_k}` from a random Kraus set; sums to the identity.
pub fn povm(dim: usize, n_outcomes: usize, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
    cptp_kraus(dim, dim, n_outcomes, rng)
        .iter()
        .map(|k| k.dagger().mul(k))
        .collect()
}

/// Instrument with a random POVM and random re-prepared states.
pub fn instrument(space: SpaceLabel, n_outcomes: usize, rng: &mut impl Rng) -> Instrument {
    let d = space.dim;
    let m = povm(d, n_outcomes, rng);
    let outputs = (0..n_outcomes).map(|_| density_matrix(d, rng)).collect();
    Instrument::new(m, outputs, space).expect("valid by construction")
}

/// Qubit scenario with random channels, states, effects, wiring, sites and noise.
pub fn switch_scenario(rng: &mut impl Rng) -> SwitchScenario {
    let channel_a = cptp_kraus(2, 2, rng.gen_range(1..=3), rng);
    let channel_b = cptp_kraus(2, 2, rng.gen_range(1..=3), rng);
    let wiring = match rng.gen_range(0..4) {
        0 => Wiring::Fixed(CausalOrder::AB),
        1 => Wiring::Fixed(CausalOrder::BA),
        _ => Wiring::Switch {
            control_prep: density_matrix(2, rng),
        },
    };
    let noise = rng.gen_bool(0.5).then(|| {
        NoiseModel::new(rng.gen_range(0.0..0.2), rng.gen_range(0.0..0.2)).expect("in range")
    });
    SwitchScenario {
        channel_a,
        channel_b,
        target_prep: density_matrix(2, rng),
        wiring,
        site: if rng.gen_bool(0.5) {
            InterventionSite::AtA
        } else {
            InterventionSite::TargetInput
        },
        outcome_effects: povm(2, rng.gen_range(2..=3), rng),
        outcome_site: if rng.gen_bool(0.5) {
            OutcomeSite::AfterB
        } else {
            OutcomeSite::Future
        },
        noise,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..6 {
            let u = unitary(dim, &mut rng);
            assert!(
                u.dagger()
                    .mul(&u)
                    .max_abs_diff(&ComplexMatrix::identity(dim))
                    < 1e-12
            );
        }
    }

    #[test]
    fn kraus_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ks = cptp_kraus(2, 3, 4, &mut rng);
        let mut s = ComplexMatrix::zeros(2, 2);
        for k in &ks {
            s.add_assign_scaled(&k.dagger().mul(k), C64::new(1.0, 0.0));
        }
        assert!(s.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn states_have_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((density_matrix(4, &mut rng).trace().re - 1.0).abs() < 1e-14);
        assert!((pure_state(3, &mut rng).trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn generated_scenarios_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            switch_scenario(&mut rng).validate().unwrap();
            let m = povm(2, 3, &mut rng);
            crate::channels::validate_povm(&m, 2).unwrap();
        }
    }
}
