//! Cyclic Jacobi diagonalization for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real plane rotation that zeroes it. Sweeps stop
//! once the off-diagonal Frobenius norm falls below `OFF_DIAGONAL_THRESHOLD`
//! relative to the matrix norm.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted in descending order with eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows())
            .map(|r| self.vectors[(r, k)])
            .collect()
    }

    /// `V Λ V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// `V f(Λ) V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            out.add_assign_scaled(&ComplexMatrix::projector(&v), C64::new(f(lambda), 0.0));
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let asym = m.hermiticity_error();
    if asym > tol {
        return Err(Error::NotHermitian(asym));
    }
    let n = m.rows();
    // Symmetrize so roundoff in the input does not bias the rotations.
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_THRESHOLD * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U restricted to (p, q): [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;

                // A ← A U
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * u_pp + arq * u_qp;
                    a[(r, q)] = arp * u_pq + arq * u_qq;
                }
                // A ← U† A
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = u_pp.conj() * apc + u_qp.conj() * aqc;
                    a[(q, col)] = u_pq.conj() * apc + u_qq.conj() * aqc;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V ← V U
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * u_pp + vrq * u_qp;
                    v[(r, q)] = vrp * u_pq + vrq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Hermitian within `tol` and smallest eigenvalue at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() || !m.is_hermitian(tol) {
        return false;
    }
    match hermitian_eigen(m, tol) {
        Ok(e) => e.min_value() >= -tol,
        Err(_) => false,
    }
}

/// Principal square root of a PSD matrix (negative roundoff eigenvalues clamp to zero).
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let e = hermitian_eigen(m, tol)?;
    if e.min_value() < -tol {
        return Err(Error::NotPsd(e.min_value()));
    }
    Ok(e.map_spectrum(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn diagonal_spectrum() {
        let e = hermitian_eigen(&ComplexMatrix::diag(&[1.0, 2.0]), 1e-9).unwrap();
        assert!(close(&e.values, &[2.0, 1.0], 1e-15));
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = hermitian_eigen(&gates::x(), 1e-9).unwrap();
        assert!(close(&e.values, &[1.0, -1.0], 1e-14));
    }

    #[test]
    fn pauli_y_spectrum_complex_pivot() {
        let e = hermitian_eigen(&gates::y(), 1e-9).unwrap();
        assert!(close(&e.values, &[1.0, -1.0], 1e-14));
        assert!(e.reconstruct().max_abs_diff(&gates::y()) < 1e-14);
    }

    #[test]
    fn unnormalized_bell_projector_spectrum() {
        let m = ComplexMatrix::projector(&gates::phi_plus(2));
        let e = hermitian_eigen(&m, 1e-9).unwrap();
        assert!(close(&e.values, &[2.0, 0.0, 0.0, 0.0], 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_eigen(&m, 1e-9),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 1..=16 {
            let m = random::hermitian(dim, &mut rng);
            let e = hermitian_eigen(&m, 1e-9).unwrap();
            assert!(e.reconstruct().max_abs_diff(&m) <= 1e-9, "dim {dim}");
            let vdv = e.vectors.dagger().mul(&e.vectors);
            assert!(vdv.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-10);
        }
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&ComplexMatrix::identity(2), 1e-9));
        assert!(!is_psd(&ComplexMatrix::diag(&[1.0, -1.0]), 1e-9));
        assert!(is_psd(&ComplexMatrix::projector(&gates::phi_plus(2)), 1e-9));
        assert!(!is_psd(&ComplexMatrix::zeros(2, 3), 1e-9));
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random::density_matrix(4, &mut rng);
        let r = psd_sqrt(&s, 1e-9).unwrap();
        assert!(r.mul(&r).max_abs_diff(&s) < 1e-12);
    }
}
