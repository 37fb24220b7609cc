use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    H { qubit: usize },
    X { qubit: usize },
    Cswap { control: usize, a: usize, b: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { qubit } | Gate::X { qubit } => vec![qubit],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Op {
    Gate(Gate),
    /// Joint depolarizing channel on the listed qubits.
    Depolarize {
        p: f64,
        qubits: Vec<usize>,
    },
    /// Full dephasing in the computational basis.
    Dephase {
        qubit: usize,
    },
    Measure {
        qubit: usize,
        bit: usize,
    },
}

impl Op {
    pub fn is_noise(&self) -> bool {
        matches!(self, Op::Depolarize { .. } | Op::Dephase { .. })
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Op::Gate(g) => g.qubits(),
            Op::Depolarize { qubits, .. } => qubits.clone(),
            Op::Dephase { qubit } | Op::Measure { qubit, .. } => vec![*qubit],
        }
    }
}

/// Which classical bits carry the control and target outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitRoles {
    pub control: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
    /// Qubit holding the switch control, if any.
    pub control_qubit: Option<usize>,
    pub bit_roles: Option<BitRoles>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
            control_qubit: None,
            bit_roles: None,
        }
    }

    pub fn push(&mut self, op: Op) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn h(&mut self, qubit: usize) -> &mut Self {
        self.push(Op::Gate(Gate::H { qubit }))
    }

    pub fn x(&mut self, qubit: usize) -> &mut Self {
        self.push(Op::Gate(Gate::X { qubit }))
    }

    pub fn cswap(&mut self, control: usize, a: usize, b: usize) -> &mut Self {
        self.push(Op::Gate(Gate::Cswap { control, a, b }))
    }

    pub fn measure(&mut self, qubit: usize, bit: usize) -> &mut Self {
        self.push(Op::Measure { qubit, bit })
    }

    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Gate(_))).count()
    }

    pub fn has_noise(&self) -> bool {
        self.ops.iter().any(Op::is_noise)
    }

    /// `(qubit, bit)` pairs in bit order.
    pub fn measurements(&self) -> Vec<(usize, usize)> {
        let mut m: Vec<(usize, usize)> = self
            .ops
            .iter()
            .filter_map(|o| match o {
                Op::Measure { qubit, bit } => Some((*qubit, *bit)),
                _ => None,
            })
            .collect();
        m.sort_by_key(|&(_, b)| b);
        m
    }

    pub fn n_bits(&self) -> usize {
        self.measurements().len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        if self.n_qubits == 0 || self.n_qubits > 12 {
            return bad(format!("{} qubits outside 1..=12", self.n_qubits));
        }
        let mut measured = false;
        let mut qubits_measured = Vec::new();
        for (k, op) in self.ops.iter().enumerate() {
            let qs = op.qubits();
            if let Some(q) = qs.iter().find(|&&q| q >= self.n_qubits) {
                return bad(format!("op {k}: qubit {q} out of range"));
            }
            for (i, q) in qs.iter().enumerate() {
                if qs[..i].contains(q) {
                    return bad(format!("op {k}: qubit {q} repeated"));
                }
            }
            match op {
                Op::Measure { qubit, .. } => {
                    measured = true;
                    if qubits_measured.contains(qubit) {
                        return bad(format!("op {k}: qubit {qubit} measured twice"));
                    }
                    qubits_measured.push(*qubit);
                }
                _ if measured => return bad(format!("op {k}: operation after a measurement")),
                Op::Depolarize { p, qubits } => {
                    if !(0.0..=1.0).contains(p) {
                        return Err(Error::InvalidProbability(*p));
                    }
                    if qubits.is_empty() {
                        return bad(format!("op {k}: depolarizing on no qubits"));
                    }
                }
                _ => {}
            }
        }
        let bits: Vec<usize> = self.measurements().iter().map(|&(_, b)| b).collect();
        if bits.iter().enumerate().any(|(i, &b)| b != i) {
            return bad("classical bits must be 0..n without gaps or repeats".into());
        }
        if let Some(c) = self.control_qubit {
            if c >= self.n_qubits {
                return bad(format!("control qubit {c} out of range"));
            }
        }
        if let Some(r) = self.bit_roles {
            if r.control >= bits.len() || r.target >= bits.len() || r.control == r.target {
                return bad("bit roles must name two distinct measured bits".into());
            }
        }
        Ok(())
    }

    /// Outcome labels in canonical order; bit 0 is the leftmost character.
    pub fn labels(&self) -> Vec<String> {
        bit_labels(self.n_bits())
    }
}

pub fn bit_labels(n_bits: usize) -> Vec<String> {
    (0..1usize << n_bits)
        .map(|v| {
            (0..n_bits)
                .map(|b| {
                    if (v >> (n_bits - 1 - b)) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect()
        })
        .collect()
}

/// Copy of `c` with full dephasing on the control right after its preparation: after the first
/// gate touching the control and any noise attached to that gate.
pub fn decohered_control_variant(c: &Circuit) -> Result<Circuit> {
    let q = c
        .control_qubit
        .ok_or_else(|| Error::InvalidCircuit("no control qubit designated".into()))?;
    let first = c
        .ops
        .iter()
        .position(|o| matches!(o, Op::Gate(g) if g.qubits().contains(&q)));
    let insert_at = match first {
        None => 0,
        Some(k) => {
            let mut at = k + 1;
            while at < c.ops.len() && c.ops[at].is_noise() {
                at += 1;
            }
            at
        }
    };
    let mut out = c.clone();
    out.ops.insert(insert_at, Op::Dephase { qubit: q });
    Ok(out)
}
