//! Standard qubit gates, states and effects.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::tensor::{ComplexMatrix, C64, ONE, ZERO};

pub fn h() -> ComplexMatrix {
    ComplexMatrix::from_real(
        2,
        2,
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    )
}

pub fn x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
    )
    .expect("static shape")
}

pub fn z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

pub fn paulis() -> [ComplexMatrix; 4] {
    [ComplexMatrix::identity(2), x(), y(), z()]
}

/// Unnormalized maximally entangled vector Σ_i |i⟩|i⟩.
pub fn phi_plus(dim: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = ONE;
    }
    v
}

pub fn ket0() -> ComplexMatrix {
    ComplexMatrix::basis_projector(2, 0)
}

pub fn ket1() -> ComplexMatrix {
    ComplexMatrix::basis_projector(2, 1)
}

/// |+⟩⟨+|
pub fn plus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5])
}

/// |−⟩⟨−|
pub fn minus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, 0.5])
}

pub fn maximally_mixed(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64)
}

/// {|0⟩⟨0|, |1⟩⟨1|}
pub fn z_basis() -> Vec<ComplexMatrix> {
    vec![ket0(), ket1()]
}

/// {|+⟩⟨+|, |−⟩⟨−|}
pub fn x_basis() -> Vec<ComplexMatrix> {
    vec![plus(), minus()]
}

/// Resolve a short gate or state name used by the CLI and scenario files.
pub fn named_unitary(name: &str) -> Option<ComplexMatrix> {
    match name.to_ascii_lowercase().as_str() {
        "i" | "id" | "identity" => Some(ComplexMatrix::identity(2)),
        "h" => Some(h()),
        "x" => Some(x()),
        "y" => Some(y()),
        "z" => Some(z()),
        _ => None,
    }
}

pub fn named_state(name: &str) -> Option<ComplexMatrix> {
    match name.to_ascii_lowercase().as_str() {
        "0" | "zero" => Some(ket0()),
        "1" | "one" => Some(ket1()),
        "+" | "plus" => Some(plus()),
        "-" | "minus" => Some(minus()),
        "mixed" => Some(maximally_mixed(2)),
        _ => None,
    }
}
