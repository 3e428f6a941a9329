//! Density matrices on the truncated spin ⊗ Fock space and oscillator blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::{index, TruncatedOperator, DOWN, UP};
use crate::error::{Error, Result};

pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues above this are treated as round-off.
pub const EIGEN_FLOOR: f64 = -1e-8;
pub const TOP_FOCK_THRESHOLD: f64 = 1e-6;
/// Fraction of the highest Fock levels summed for the truncation check.
pub const TOP_FOCK_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub dim_fock: usize,
    pub matrix: DMatrix<Complex64>,
}

/// Hygiene numbers reported with every steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hygiene {
    pub trace: f64,
    pub hermitian_deviation: f64,
    pub min_eig: f64,
    pub top_fock_pop: f64,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl DensityMatrix {
    pub fn new(dim_fock: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = 2 * dim_fock;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        Ok(Self { dim_fock, matrix })
    }

    /// `|spin><spin| ⊗ rho_osc`.
    pub fn product(spin: usize, rho_osc: &DMatrix<Complex64>) -> Self {
        let n = rho_osc.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((spin * n, spin * n), (n, n)).copy_from(rho_osc);
        Self { dim_fock: n, matrix: m }
    }

    /// `|down, 0><down, 0|`.
    pub fn ground(dim_fock: usize) -> Self {
        Self::product(DOWN, &fock_projector(dim_fock, 0))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * c(0.5);
        let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Population of the highest `ceil(5% N)` Fock levels, both spins.
    pub fn top_fock_population(&self) -> f64 {
        let n = self.dim_fock;
        let levels = ((TOP_FOCK_FRACTION * n as f64).ceil() as usize).max(1);
        let mut p = 0.0;
        for s in [DOWN, UP] {
            for m in n - levels..n {
                let k = index(n, s, m);
                p += self.matrix[(k, k)].re;
            }
        }
        p
    }

    pub fn hygiene(&self) -> Hygiene {
        Hygiene {
            trace: self.trace().re,
            hermitian_deviation: self.hermitian_deviation(),
            min_eig: self.eigenvalues()[0],
            top_fock_pop: self.top_fock_population(),
        }
    }

    /// Hermitizes, normalizes the trace and clips round-off negative
    /// eigenvalues; fails on eigenvalues below `EIGEN_FLOOR`.
    pub fn sanitize(mut self) -> Result<Self> {
        let h = (&self.matrix + self.matrix.adjoint()) * c(0.5);
        let tr = h.trace().re;
        if !(tr.abs() > 0.0) || !tr.is_finite() {
            return Err(Error::NotPositive { min_eigenvalue: f64::NAN });
        }
        let h = h / c(tr);
        let eig = h.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        self.matrix = if min < 0.0 {
            let clipped = eig.eigenvalues.map(|x| x.max(0.0));
            let total: f64 = clipped.iter().sum();
            let d = DMatrix::from_diagonal(&clipped.map(|x| c(x / total)));
            &eig.eigenvectors * d * eig.eigenvectors.adjoint()
        } else {
            h
        };
        // The reconstruction can leave round-off asymmetry.
        self.matrix = (&self.matrix + self.matrix.adjoint()) * c(0.5);
        Ok(self)
    }

    /// Fails with `TruncationUnsafe` when the top Fock levels are populated.
    pub fn check_truncation(&self) -> Result<f64> {
        let p = self.top_fock_population();
        if p > TOP_FOCK_THRESHOLD {
            return Err(Error::TruncationUnsafe {
                population: p,
                threshold: TOP_FOCK_THRESHOLD,
            });
        }
        Ok(p)
    }
}

/// `|m><m|` on `dim_fock` levels.
pub fn fock_projector(dim_fock: usize, m: usize) -> DMatrix<Complex64> {
    let mut r = DMatrix::zeros(dim_fock, dim_fock);
    r[(m, m)] = c(1.0);
    r
}

/// Truncated coherent state `|beta><beta|`, renormalized on `dim_fock` levels.
pub fn coherent(dim_fock: usize, beta: Complex64) -> DMatrix<Complex64> {
    let mut v = nalgebra::DVector::zeros(dim_fock);
    let mut amp = c((-0.5 * beta.norm_sqr()).exp());
    for m in 0..dim_fock {
        v[m] = amp;
        amp *= beta / c(((m + 1) as f64).sqrt());
    }
    let norm = v.norm();
    v /= c(norm);
    &v * v.adjoint()
}

/// `<down| rho |down>`, not renormalized.
pub fn project_spin_down(rho: &DensityMatrix) -> DMatrix<Complex64> {
    let n = rho.dim_fock;
    rho.matrix.view((0, 0), (n, n)).into_owned()
}

/// `Tr(rho op)`.
pub fn expectation(rho: &DensityMatrix, op: &TruncatedOperator) -> Result<Complex64> {
    if op.dim_fock != rho.dim_fock {
        return Err(Error::DimensionMismatch {
            expected: rho.dim_fock,
            found: op.dim_fock,
        });
    }
    Ok(op.matrix.iter().map(|(r, col, v)| v * rho.matrix[(col, r)]).sum())
}

/// `Tr(rho_osc op)` for oscillator-only matrices.
pub fn oscillator_expectation(rho_osc: &DMatrix<Complex64>, op: &DMatrix<Complex64>) -> Complex64 {
    (rho_osc * op).trace()
}

/// Trace distance `1/2 ||a - b||_1` of Hermitian matrices.
pub fn trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let d = a - b;
    let h = (&d + d.adjoint()) * c(0.5);
    0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projection_of_products() {
        let osc = coherent(6, Complex64::new(0.4, -0.2));
        let down = DensityMatrix::product(DOWN, &osc);
        assert_eq!(project_spin_down(&down), osc);
        let up = DensityMatrix::product(UP, &osc);
        assert_eq!(project_spin_down(&up), DMatrix::zeros(6, 6));
    }

    #[test]
    fn expectations_of_simple_states() {
        let g = DensityMatrix::ground(5);
        assert_abs_diff_eq!(expectation(&g, &TruncatedOperator::identity(5)).unwrap().re, 1.0);
        assert_abs_diff_eq!(expectation(&g, &TruncatedOperator::number(5)).unwrap().norm(), 0.0);
        assert!(expectation(&g, &TruncatedOperator::number(4)).is_err());

        let beta = Complex64::new(0.7, 0.3);
        let s = DensityMatrix::product(UP, &coherent(30, beta));
        let a = expectation(&s, &TruncatedOperator::annihilation(30)).unwrap();
        assert!((a - beta).norm() < 1e-12);
        assert_abs_diff_eq!(expectation(&s, &TruncatedOperator::sigma_z(30)).unwrap().re, 1.0);
    }

    #[test]
    fn sanitize_clips_round_off_only() {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.7), c(0.3 + 5e-9), c(-5e-9), c(0.0)]));
        m[(0, 1)] = Complex64::new(0.0, 1e-12);
        let r = DensityMatrix::new(2, m).unwrap().sanitize().unwrap();
        let h = r.hygiene();
        assert!(h.min_eig >= -1e-15);
        assert_abs_diff_eq!(h.trace, 1.0, epsilon = 1e-14);
        assert!(h.hermitian_deviation < 1e-15);

        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1), c(-0.1), c(0.0), c(0.0)]));
        assert!(matches!(
            DensityMatrix::new(2, bad).unwrap().sanitize(),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn truncation_flag() {
        assert!(DensityMatrix::ground(20).check_truncation().is_ok());
        let hot = DensityMatrix::product(DOWN, &fock_projector(20, 19));
        assert_abs_diff_eq!(hot.top_fock_population(), 1.0);
        assert!(matches!(hot.check_truncation(), Err(Error::TruncationUnsafe { .. })));
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        assert_abs_diff_eq!(trace_distance(&fock_projector(3, 0), &fock_projector(3, 1)), 1.0, epsilon = 1e-14);
        let r = coherent(10, Complex64::new(0.5, 0.0));
        assert_abs_diff_eq!(trace_distance(&r, &r), 0.0);
    }
}
