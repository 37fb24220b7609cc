use serde::{Deserialize, Serialize};

use super::builders::{
    fixed_order_process, switch_output_unchecked, switch_process_matrix, CausalOrder, A_I, A_O,
    B_I, B_O, FUTURE,
};
use super::matrix::{born_probability, effect_on, identity_effect, ProcessMatrix, CONTROL};
use crate::channels::{
    apply_kraus, choi_from_kraus, depolarizing_kraus, do_intervention, kraus_completeness_error,
    kraus_from_choi, validate_povm, validate_state, Instrument,
};
use crate::error::{Error, Result};
use crate::sim::NoiseModel;
use crate::tensor::{psd_sqrt, ComplexMatrix, SpaceLabel, DEFAULT_TOL};

/// Where the observe/do pair acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterventionSite {
    /// Replaces A's operation inside the process.
    AtA,
    /// Acts on the target before it enters the process.
    TargetInput,
}

/// Which measurement produces `O_B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeSite {
    /// Lüders instrument on B's output with Kraus `√E_o B_j`; `F` is discarded.
    AfterB,
    /// Effects on the global future `F`.
    Future,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Wiring {
    Switch { control_prep: ComplexMatrix },
    Fixed(CausalOrder),
}

/// Arm of an intervention pair.
#[derive(Clone, Copy, Debug)]
pub enum Arm<'a> {
    /// No intervention.
    Natural,
    /// Instrument applied with its outcomes summed.
    Observe(&'a Instrument),
    /// Replacement channel preparing the given state.
    Do(&'a ComplexMatrix),
}

/// Two parties A and B with qubit-sized channels, wired through the switch or in a fixed order.
///
/// Noise, when present, follows the switch circuit qubit by qubit: `D_{p1}` after A and B,
/// `D_{p1}` then `D_{p3}` on the control preparation, `D_{p3}` on the target preparation, and
/// `D_{p3}` on the final control and future effects in Heisenberg form. Single-qubit
/// depolarizers stand in for the circuit's joint three-qubit one.
#[derive(Clone, Debug)]
pub struct SwitchScenario {
    pub channel_a: Vec<ComplexMatrix>,
    pub channel_b: Vec<ComplexMatrix>,
    pub target_prep: ComplexMatrix,
    pub wiring: Wiring,
    pub site: InterventionSite,
    pub outcome_effects: Vec<ComplexMatrix>,
    pub outcome_site: OutcomeSite,
    pub noise: Option<NoiseModel>,
}

/// Everything the two evaluation routes need, after arms and noise are folded in.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub wiring: Wiring,
    pub a: Vec<ComplexMatrix>,
    /// Kraus set of B for each outcome (one shared entry for `OutcomeSite::Future`).
    pub b: Vec<Vec<ComplexMatrix>>,
    /// Effect on `F` for each outcome.
    pub future_effects: Vec<ComplexMatrix>,
    pub target: ComplexMatrix,
    pub control: Option<ComplexMatrix>,
    control_noise: f64,
}

fn depolarize_kraus_after(p: f64, ks: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    if p == 0.0 {
        return ks.to_vec();
    }
    let d = depolarizing_kraus(p, 1).expect("validated probability");
    d.iter()
        .flat_map(|dk| ks.iter().map(move |k| dk.mul(k)))
        .collect()
}

fn depolarize_state(p: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    if p == 0.0 {
        return rho.clone();
    }
    let d = rho.rows() as f64;
    let mixed = ComplexMatrix::identity(rho.rows()).scale_real(p * rho.trace().re / d);
    rho.scale_real(1.0 - p).add(&mixed).expect("same shape")
}

/// Heisenberg-picture `D_p†(E) = (1−p)E + p·Tr(E)/d·I`; `D_p` is self-adjoint.
fn depolarize_effect(p: f64, e: &ComplexMatrix) -> ComplexMatrix {
    depolarize_state(p, e)
}

impl SwitchScenario {
    pub fn n_outcomes(&self) -> usize {
        self.outcome_effects.len()
    }

    pub fn control_prep(&self) -> Option<&ComplexMatrix> {
        match &self.wiring {
            Wiring::Switch { control_prep } => Some(control_prep),
            Wiring::Fixed(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for ks in [&self.channel_a, &self.channel_b] {
            let err = kraus_completeness_error(ks);
            if err > DEFAULT_TOL {
                return Err(Error::NotTracePreserving(err));
            }
            if ks[0].rows() != 2 || ks[0].cols() != 2 {
                return Err(Error::DimensionMismatch {
                    context: "scenario channel",
                    expected: 2,
                    found: ks[0].rows(),
                });
            }
        }
        validate_state(&self.target_prep)?;
        if self.target_prep.rows() != 2 {
            return Err(Error::DimensionMismatch {
                context: "target preparation",
                expected: 2,
                found: self.target_prep.rows(),
            });
        }
        if let Some(c) = self.control_prep() {
            validate_state(c)?;
        }
        validate_povm(&self.outcome_effects, 2)
    }

    fn arm_kraus_at_a(&self, arm: Arm<'_>) -> Result<Vec<ComplexMatrix>> {
        let (i, o) = (SpaceLabel::qubit(A_I), SpaceLabel::qubit(A_O));
        match arm {
            Arm::Natural => Ok(self.channel_a.clone()),
            Arm::Observe(inst) => kraus_from_choi(&inst.channel(i, o)?, DEFAULT_TOL),
            Arm::Do(sigma) => kraus_from_choi(&do_intervention(sigma, i, o)?, DEFAULT_TOL),
        }
    }

    /// Fold the intervention arm and the noise model into concrete ingredients.
    pub fn resolve(&self, arm: Arm<'_>) -> Result<Resolved> {
        self.validate()?;
        let noise = self.noise.unwrap_or(NoiseModel { p1: 0.0, p3: 0.0 });

        let a = match self.site {
            InterventionSite::AtA => self.arm_kraus_at_a(arm)?,
            InterventionSite::TargetInput => self.channel_a.clone(),
        };
        let a = depolarize_kraus_after(noise.p1, &a);
        let b_full = depolarize_kraus_after(noise.p1, &self.channel_b);

        let mut target = match (self.site, arm) {
            (InterventionSite::TargetInput, Arm::Observe(inst)) => {
                inst.unconditional(&self.target_prep)?
            }
            (InterventionSite::TargetInput, Arm::Do(sigma)) => {
                validate_state(sigma)?;
                (*sigma).clone()
            }
            _ => self.target_prep.clone(),
        };
        target = depolarize_state(noise.p3, &target);

        let control = self
            .control_prep()
            .map(|c| depolarize_state(noise.p3, &depolarize_state(noise.p1, c)));

        let (b, future_effects) = match self.outcome_site {
            OutcomeSite::Future => (
                vec![b_full],
                self.outcome_effects
                    .iter()
                    .map(|e| depolarize_effect(noise.p3, e))
                    .collect(),
            ),
            OutcomeSite::AfterB => {
                let mut branches = Vec::with_capacity(self.n_outcomes());
                for e in &self.outcome_effects {
                    let root = psd_sqrt(e, DEFAULT_TOL)?;
                    branches.push(b_full.iter().map(|k| root.mul(k)).collect());
                }
                (
                    branches,
                    vec![ComplexMatrix::identity(2); self.n_outcomes()],
                )
            }
        };

        Ok(Resolved {
            wiring: self.wiring.clone(),
            a,
            b,
            future_effects,
            target,
            control,
            control_noise: noise.p3,
        })
    }
}

impl Resolved {
    pub fn n_outcomes(&self) -> usize {
        self.future_effects.len()
    }

    fn b_for(&self, o: usize) -> &[ComplexMatrix] {
        if self.b.len() == 1 {
            &self.b[0]
        } else {
            &self.b[o]
        }
    }

    /// Control effect after the final noise layer; `None` discards the control.
    fn control_effect(&self, m: Option<&ComplexMatrix>) -> Result<Option<ComplexMatrix>> {
        match (m, &self.control) {
            (None, _) => Ok(None),
            (Some(_), None) => Err(Error::MissingControl),
            (Some(m), Some(_)) => Ok(Some(depolarize_effect(self.control_noise, m))),
        }
    }

    /// The switch process matrix or fixed-order process for these ingredients.
    pub fn process(&self) -> Result<ProcessMatrix> {
        match (&self.wiring, &self.control) {
            (Wiring::Switch { .. }, Some(c)) => switch_process_matrix(c, &self.target),
            (Wiring::Fixed(order), _) => fixed_order_process(&self.target, *order),
            (Wiring::Switch { .. }, None) => Err(Error::MissingControl),
        }
    }
}

/// `P(o, c)` for every outcome `o` by applying the Kraus-form supermap (or the two channels in
/// sequence for a fixed order) and measuring.
pub fn supermap_joint(r: &Resolved, control_effect: Option<&ComplexMatrix>) -> Result<Vec<f64>> {
    let m = r.control_effect(control_effect)?;
    (0..r.n_outcomes())
        .map(|o| {
            let b = r.b_for(o);
            let f = &r.future_effects[o];
            let p = match (&r.wiring, &r.control) {
                (Wiring::Switch { .. }, Some(c)) => {
                    let out = switch_output_unchecked(&r.a, b, &r.target, c);
                    let m = m.clone().unwrap_or_else(|| ComplexMatrix::identity(2));
                    f.kron(&m).mul(&out).trace().re
                }
                (Wiring::Fixed(order), _) => {
                    let out = match order {
                        CausalOrder::AB => apply_kraus(b, &apply_kraus(&r.a, &r.target)),
                        CausalOrder::BA => apply_kraus(&r.a, &apply_kraus(b, &r.target)),
                    };
                    f.mul(&out).trace().re
                }
                (Wiring::Switch { .. }, None) => return Err(Error::MissingControl),
            };
            Ok(p)
        })
        .collect()
}

/// `P(o, c)` for every outcome `o` from the generalized Born rule on the process matrix.
pub fn born_joint(r: &Resolved, control_effect: Option<&ComplexMatrix>) -> Result<Vec<f64>> {
    let m = r.control_effect(control_effect)?;
    let w = r.process()?;
    let q = SpaceLabel::qubit;
    let ja = choi_from_kraus(&r.a, q(A_I), q(A_O))?.to_labeled();
    let c_effect = match (&r.control, &m) {
        (None, _) => None,
        (Some(_), Some(m)) => Some(effect_on(m, &q(CONTROL))?),
        (Some(_), None) => Some(identity_effect(&q(CONTROL))),
    };
    (0..r.n_outcomes())
        .map(|o| {
            let jb = choi_from_kraus(r.b_for(o), q(B_I), q(B_O))?.to_labeled();
            let mut effects = vec![ja.clone(), jb, effect_on(&r.future_effects[o], &q(FUTURE))?];
            effects.extend(c_effect.clone());
            born_probability(&w, &effects)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn coherent(site: InterventionSite, outcome_site: OutcomeSite) -> SwitchScenario {
        SwitchScenario {
            channel_a: vec![gates::h()],
            channel_b: vec![gates::x()],
            target_prep: gates::ket0(),
            wiring: Wiring::Switch {
                control_prep: gates::plus(),
            },
            site,
            outcome_effects: gates::z_basis(),
            outcome_site,
            noise: None,
        }
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn routes_agree_for_every_site_and_arm() {
        let inst = Instrument::computational(SpaceLabel::qubit("A"));
        let sigma = gates::ket0();
        for site in [InterventionSite::AtA, InterventionSite::TargetInput] {
            for os in [OutcomeSite::AfterB, OutcomeSite::Future] {
                for noise in [None, Some(NoiseModel::reference())] {
                    let mut s = coherent(site, os);
                    s.noise = noise;
                    for arm in [Arm::Natural, Arm::Observe(&inst), Arm::Do(&sigma)] {
                        let r = s.resolve(arm).unwrap();
                        for m in [None, Some(gates::ket0()), Some(gates::plus())] {
                            let a = supermap_joint(&r, m.as_ref()).unwrap();
                            let b = born_joint(&r, m.as_ref()).unwrap();
                            assert!(close(&a, &b, 1e-12), "{site:?} {os:?} {a:?} {b:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coherent_do_at_target_input_is_deterministic_given_plus() {
        let s = coherent(InterventionSite::TargetInput, OutcomeSite::Future);
        let sigma = gates::ket0();
        let r = s.resolve(Arm::Do(&sigma)).unwrap();
        let joint = supermap_joint(&r, Some(&gates::plus())).unwrap();
        // control |+⟩ found with probability 1/2, then F = 0 with certainty
        assert!(close(&joint, &[0.5, 0.0], 1e-14));
    }

    #[test]
    fn fixed_wiring_rejects_control_effect() {
        let mut s = coherent(InterventionSite::AtA, OutcomeSite::AfterB);
        s.wiring = Wiring::Fixed(CausalOrder::AB);
        let r = s.resolve(Arm::Natural).unwrap();
        assert!(matches!(
            supermap_joint(&r, Some(&gates::ket0())),
            Err(Error::MissingControl)
        ));
        let p = supermap_joint(&r, None).unwrap();
        assert!(close(&p, &[0.5, 0.5], 1e-14));
        assert!(close(&born_joint(&r, None).unwrap(), &p, 1e-14));
    }

    #[test]
    fn noisy_joint_sums_to_one() {
        let mut s = coherent(InterventionSite::TargetInput, OutcomeSite::Future);
        s.noise = Some(NoiseModel::uniform(0.2).unwrap());
        let r = s.resolve(Arm::Natural).unwrap();
        let total: f64 = [gates::ket0(), gates::ket1()]
            .iter()
            .flat_map(|m| supermap_joint(&r, Some(m)).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_catches_bad_inputs() {
        let mut s = coherent(InterventionSite::AtA, OutcomeSite::Future);
        s.outcome_effects = vec![gates::ket0()];
        assert!(s.resolve(Arm::Natural).is_err());
        let mut s = coherent(InterventionSite::AtA, OutcomeSite::Future);
        s.channel_a = vec![gates::ket0()];
        assert!(matches!(
            s.resolve(Arm::Natural),
            Err(Error::NotTracePreserving(_))
        ));
    }
}
