use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::circuit::{BitRoles, Circuit, Gate, Op};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64, ONE, ZERO};

/// Probabilities over classical bitstrings; label character `k` is bit `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
    pub bit_roles: Option<BitRoles>,
}

impl OutcomeDistribution {
    pub fn new(labels: Vec<String>, probs: Vec<f64>, bit_roles: Option<BitRoles>) -> Result<Self> {
        if labels.len() != probs.len() || labels.is_empty() {
            return Err(Error::LabelMismatch);
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -1e-12) {
            return Err(Error::InvalidProbability(*p));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(total));
        }
        Ok(Self {
            labels,
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
            bit_roles,
        })
    }

    pub fn prob(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.probs[k])
    }

    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// Entrywise `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect();
        Self::new(self.labels.clone(), probs, self.bit_roles)
    }

    /// Joint weight `P(c, t)` indexed by bit values, read through the bit roles.
    pub fn joint_control_target(&self) -> Result<[[f64; 2]; 2]> {
        let roles = self
            .bit_roles
            .ok_or_else(|| Error::InvalidArgument("distribution has no bit roles".into()))?;
        joint_from_weights(&self.labels, &self.probs, roles)
    }
}

pub(crate) fn joint_from_weights(
    labels: &[String],
    weights: &[f64],
    roles: BitRoles,
) -> Result<[[f64; 2]; 2]> {
    let mut out = [[0.0; 2]; 2];
    for (l, &p) in labels.iter().zip(weights) {
        let bits = l.as_bytes();
        let (c, t) = match (bits.get(roles.control), bits.get(roles.target)) {
            (Some(c), Some(t)) => ((c - b'0') as usize, (t - b'0') as usize),
            _ => return Err(Error::LabelMismatch),
        };
        out[c][t] += p;
    }
    Ok(out)
}

/// `P(t | c)` per control value, `None` where `P(c) = 0`.
pub fn target_given_control(joint: &[[f64; 2]; 2]) -> [Option<[f64; 2]>; 2] {
    joint.map(|row| {
        let m = row[0] + row[1];
        (m > 0.0).then(|| [row[0] / m, row[1] / m])
    })
}

fn terminal_distribution(c: &Circuit, diag: impl Fn(usize) -> f64) -> Result<OutcomeDistribution> {
    let meas = c.measurements();
    let n_bits = meas.len();
    let mut probs = vec![0.0; 1 << n_bits];
    for i in 0..1usize << c.n_qubits {
        let mut v = 0;
        for &(q, _) in &meas {
            v = (v << 1) | ((i >> q) & 1);
        }
        probs[v] += diag(i);
    }
    OutcomeDistribution::new(c.labels(), probs, c.bit_roles)
}

fn apply_gate_sv(psi: &mut [C64], g: Gate) {
    let n = psi.len();
    match g {
        Gate::H { qubit } => {
            let m = 1 << qubit;
            for i in (0..n).filter(|i| i & m == 0) {
                let (a, b) = (psi[i], psi[i | m]);
                psi[i] = (a + b) * FRAC_1_SQRT_2;
                psi[i | m] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Gate::X { qubit } => {
            let m = 1 << qubit;
            for i in (0..n).filter(|i| i & m == 0) {
                psi.swap(i, i | m);
            }
        }
        Gate::Cswap { control, a, b } => {
            for i in 0..n {
                let j = cswap_image(i, control, a, b);
                if j > i {
                    psi.swap(i, j);
                }
            }
        }
    }
}

fn cswap_image(i: usize, control: usize, a: usize, b: usize) -> usize {
    if (i >> control) & 1 == 1 && ((i >> a) & 1) != ((i >> b) & 1) {
        i ^ ((1 << a) | (1 << b))
    } else {
        i
    }
}

/// Pure-state simulation from `|0…0⟩`. Qubit `q` is bit `q` of the amplitude index.
pub fn simulate_statevector(c: &Circuit) -> Result<OutcomeDistribution> {
    c.validate()?;
    let mut psi = vec![ZERO; 1 << c.n_qubits];
    psi[0] = ONE;
    for op in &c.ops {
        match op {
            Op::Gate(g) => apply_gate_sv(&mut psi, *g),
            Op::Measure { .. } => {}
            _ => {
                return Err(Error::InvalidCircuit(
                    "statevector path cannot apply noise".into(),
                ))
            }
        }
    }
    terminal_distribution(c, |i| psi[i].norm_sqr())
}

fn apply_1q_both_sides(rho: &mut ComplexMatrix, u: &[[f64; 2]; 2], q: usize) {
    let n = rho.rows();
    let m = 1 << q;
    // rows: ρ ← Uρ
    for col in 0..n {
        for i in (0..n).filter(|i| i & m == 0) {
            let (a, b) = (rho[(i, col)], rho[(i | m, col)]);
            rho[(i, col)] = a * u[0][0] + b * u[0][1];
            rho[(i | m, col)] = a * u[1][0] + b * u[1][1];
        }
    }
    // columns: ρ ← ρU† (U real)
    for row in 0..n {
        for j in (0..n).filter(|j| j & m == 0) {
            let (a, b) = (rho[(row, j)], rho[(row, j | m)]);
            rho[(row, j)] = a * u[0][0] + b * u[0][1];
            rho[(row, j | m)] = a * u[1][0] + b * u[1][1];
        }
    }
}

/// `(1−p)ρ + p·Tr_S(ρ) ⊗ I_S/2^{|S|}`
fn depolarize_dm(rho: &ComplexMatrix, p: f64, qubits: &[usize]) -> ComplexMatrix {
    if p == 0.0 {
        return rho.clone();
    }
    let n = rho.rows();
    let mask: usize = qubits.iter().map(|q| 1 << q).sum();
    let subsets: Vec<usize> = (0..n).filter(|s| s & !mask == 0).collect();
    let weight = p / subsets.len() as f64;
    let mut out = rho.scale_real(1.0 - p);
    for i in 0..n {
        for j in 0..n {
            if i & mask != j & mask {
                continue;
            }
            let (bi, bj) = (i & !mask, j & !mask);
            let traced: C64 = subsets.iter().map(|s| rho[(bi | s, bj | s)]).sum();
            out[(i, j)] += traced * weight;
        }
    }
    out
}

/// Mixed-state simulation from `|0…0⟩⟨0…0|`, applying noise ops exactly.
pub fn simulate_density(c: &Circuit) -> Result<OutcomeDistribution> {
    c.validate()?;
    let n = 1 << c.n_qubits;
    let mut rho = ComplexMatrix::zeros(n, n);
    rho[(0, 0)] = ONE;
    let h = [
        [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ];
    let x = [[0.0, 1.0], [1.0, 0.0]];
    for op in &c.ops {
        match op {
            Op::Gate(Gate::H { qubit }) => apply_1q_both_sides(&mut rho, &h, *qubit),
            Op::Gate(Gate::X { qubit }) => apply_1q_both_sides(&mut rho, &x, *qubit),
            Op::Gate(Gate::Cswap { control, a, b }) => {
                let img: Vec<usize> = (0..n).map(|i| cswap_image(i, *control, *a, *b)).collect();
                rho = ComplexMatrix::from_fn(n, n, |i, j| rho[(img[i], img[j])]);
            }
            Op::Depolarize { p, qubits } => rho = depolarize_dm(&rho, *p, qubits),
            Op::Dephase { qubit } => {
                let m = 1 << qubit;
                for i in 0..n {
                    for j in 0..n {
                        if (i & m) != (j & m) {
                            rho[(i, j)] = ZERO;
                        }
                    }
                }
            }
            Op::Measure { .. } => {}
        }
    }
    terminal_distribution(c, |i| rho[(i, i)].re)
}

/// Statevector path for noiseless circuits, density-matrix path otherwise.
pub fn simulate_exact(c: &Circuit) -> Result<OutcomeDistribution> {
    if c.has_noise() {
        simulate_density(c)
    } else {
        simulate_statevector(c)
    }
}
