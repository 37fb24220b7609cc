use serde::{Deserialize, Serialize};

use super::circuit::{BitRoles, Circuit, Op};
use super::noise::NoiseModel;
use super::sampling::{sample_shots, Counts};
use super::simulate::{simulate_exact, target_given_control, OutcomeDistribution};
use crate::error::Result;

pub const CONTROL_QUBIT: usize = 0;
pub const TARGET_QUBIT: usize = 1;
pub const ANCILLA_QUBIT: usize = 2;

/// Labels are `"<control><target>"`.
pub const SWITCH_BIT_ROLES: BitRoles = BitRoles {
    control: 0,
    target: 1,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlPreparation {
    /// `H` on the control: both orders in superposition.
    Plus,
    /// Control left in `|0⟩`: A-slot path only.
    Zero,
    /// `X` on the control: B-slot path only.
    One,
}

fn push_noise(c: &mut Circuit, p: Option<f64>, qubits: &[usize]) {
    if let Some(p) = p {
        c.push(Op::Depolarize {
            p,
            qubits: qubits.to_vec(),
        });
    }
}

/// Control q0, target q1, ancilla q2:
/// prep(q0); CSWAP(q0; q1, q2); H(q1); X(q2); CSWAP(q0; q1, q2); measure q0 → bit 0, q1 → bit 1.
/// With noise, `D_{p1}` follows each single-qubit gate and `D_{p3}` on all three qubits follows
/// each CSWAP.
pub fn build_switch_circuit_with(prep: ControlPreparation, noise: Option<NoiseModel>) -> Circuit {
    let p1 = noise.map(|n| n.p1);
    let p3 = noise.map(|n| n.p3);
    let (c, t, a) = (CONTROL_QUBIT, TARGET_QUBIT, ANCILLA_QUBIT);
    let mut circ = Circuit::new(3);
    circ.control_qubit = Some(c);
    circ.bit_roles = Some(SWITCH_BIT_ROLES);
    match prep {
        ControlPreparation::Plus => {
            circ.h(c);
            push_noise(&mut circ, p1, &[c]);
        }
        ControlPreparation::One => {
            circ.x(c);
            push_noise(&mut circ, p1, &[c]);
        }
        ControlPreparation::Zero => {}
    }
    circ.cswap(c, t, a);
    push_noise(&mut circ, p3, &[c, t, a]);
    circ.h(t);
    push_noise(&mut circ, p1, &[t]);
    circ.x(a);
    push_noise(&mut circ, p1, &[a]);
    circ.cswap(c, t, a);
    push_noise(&mut circ, p3, &[c, t, a]);
    circ.measure(c, 0).measure(t, 1);
    circ
}

pub fn build_switch_circuit(noise: Option<NoiseModel>) -> Circuit {
    build_switch_circuit_with(ControlPreparation::Plus, noise)
}

/// Joint counts plus `P(target | control)` estimated from them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwitchRun {
    pub exact: OutcomeDistribution,
    pub counts: Counts,
    /// Indexed by control value; `None` where no shot landed in that bin.
    pub conditional: [Option<[f64; 2]>; 2],
    pub exact_conditional: [Option<[f64; 2]>; 2],
}

/// Prepare the switch, run it `shots` times, record joint outcomes and the conditional table.
pub fn run_switch_experiment(shots: u64, seed: u64, noise: Option<NoiseModel>) -> Result<SwitchRun> {
    let circuit = build_switch_circuit(noise);
    let exact = simulate_exact(&circuit)?;
    let counts = sample_shots(&exact, shots, seed)?;
    let conditional = counts.conditional()?;
    let exact_conditional = target_given_control(&exact.joint_control_target()?);
    Ok(SwitchRun {
        exact,
        counts,
        conditional,
        exact_conditional,
    })
}

/// Total variation between `P(t | c=0)` and `P(t | c=1)`; `None` if either bin is empty.
pub fn conditional_tv(cond: &[Option<[f64; 2]>; 2]) -> Option<f64> {
    match cond {
        [Some(a), Some(b)] => Some(0.5 * ((a[0] - b[0]).abs() + (a[1] - b[1]).abs())),
        _ => None,
    }
}
