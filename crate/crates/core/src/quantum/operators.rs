//! Operators on the truncated spin ⊗ Fock space.
//!
//! Basis index `k = s * N + n` for spin `s` (0 = down, 1 = up) and Fock level
//! `n < N`.

use num_complex::Complex64;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub dim_fock: usize,
    pub matrix: SparseMatrix,
}

pub const DOWN: usize = 0;
pub const UP: usize = 1;

pub fn index(dim_fock: usize, spin: usize, n: usize) -> usize {
    spin * dim_fock + n
}

/// `(spin, n)` of a basis index.
pub fn split(dim_fock: usize, k: usize) -> (usize, usize) {
    (k / dim_fock, k % dim_fock)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl TruncatedOperator {
    fn from_triplets(dim_fock: usize, t: Vec<(usize, usize, Complex64)>) -> Self {
        let d = 2 * dim_fock;
        Self {
            dim_fock,
            matrix: SparseMatrix::from_triplets(d, d, t),
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_fock
    }

    pub fn identity(dim_fock: usize) -> Self {
        Self::from_triplets(dim_fock, (0..2 * dim_fock).map(|k| (k, k, re(1.0))).collect())
    }

    /// Cavity annihilation operator `a ⊗ 1`.
    pub fn annihilation(dim_fock: usize) -> Self {
        let mut t = Vec::new();
        for s in [DOWN, UP] {
            for n in 1..dim_fock {
                t.push((index(dim_fock, s, n - 1), index(dim_fock, s, n), re((n as f64).sqrt())));
            }
        }
        Self::from_triplets(dim_fock, t)
    }

    pub fn creation(dim_fock: usize) -> Self {
        Self::annihilation(dim_fock).adjoint()
    }

    pub fn number(dim_fock: usize) -> Self {
        let t = (0..2 * dim_fock)
            .map(|k| (k, k, re(split(dim_fock, k).1 as f64)))
            .collect();
        Self::from_triplets(dim_fock, t)
    }

    pub fn sigma_z(dim_fock: usize) -> Self {
        let t = (0..2 * dim_fock)
            .map(|k| (k, k, re(if split(dim_fock, k).0 == UP { 1.0 } else { -1.0 })))
            .collect();
        Self::from_triplets(dim_fock, t)
    }

    /// `sigma_+ = |up><down|`.
    pub fn sigma_plus(dim_fock: usize) -> Self {
        let t = (0..dim_fock)
            .map(|n| (index(dim_fock, UP, n), index(dim_fock, DOWN, n), re(1.0)))
            .collect();
        Self::from_triplets(dim_fock, t)
    }

    pub fn sigma_minus(dim_fock: usize) -> Self {
        Self::sigma_plus(dim_fock).adjoint()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim_fock: self.dim_fock,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.matrix.hermitian_deviation()
    }
}

/// `H = omega0 a^dag a + (Omega/2) sigma_z - lambda_r (a sigma_+ + a^dag sigma_-)
///      - lambda_cr (a sigma_- + a^dag sigma_+)`.
pub fn build_hamiltonian(p: &ModelParams, dim_fock: usize) -> Result<TruncatedOperator> {
    if dim_fock < 2 {
        return Err(Error::InvalidArgument(format!("Fock cutoff must be at least 2, got {dim_fock}")));
    }
    let idx = |s, n| index(dim_fock, s, n);
    let mut t = Vec::new();
    for n in 0..dim_fock {
        let e = p.omega0 * n as f64;
        t.push((idx(DOWN, n), idx(DOWN, n), re(e - 0.5 * p.omega)));
        t.push((idx(UP, n), idx(UP, n), re(e + 0.5 * p.omega)));
    }
    for n in 1..dim_fock {
        let sq = (n as f64).sqrt();
        // a sigma_+ : |n, down> -> |n-1, up>
        t.push((idx(UP, n - 1), idx(DOWN, n), re(-p.lambda_r * sq)));
        t.push((idx(DOWN, n), idx(UP, n - 1), re(-p.lambda_r * sq)));
        // a sigma_- : |n, up> -> |n-1, down>
        t.push((idx(DOWN, n - 1), idx(UP, n), re(-p.lambda_cr * sq)));
        t.push((idx(UP, n), idx(DOWN, n - 1), re(-p.lambda_cr * sq)));
    }
    Ok(TruncatedOperator::from_triplets(dim_fock, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn dense(o: &TruncatedOperator) -> DMatrix<Complex64> {
        o.matrix.to_dense()
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let h = build_hamiltonian(&ModelParams::new(1.0, 50.0, 0.0, 0.0, 0.5), 6).unwrap();
        assert_eq!(h.matrix.nnz(), 12);
        for k in 0..12 {
            let (s, n) = split(6, k);
            let want = n as f64 + if s == UP { 25.0 } else { -25.0 };
            assert_eq!(h.matrix.get(k, k), re(want));
        }
    }

    #[test]
    fn rejects_tiny_cutoff() {
        assert!(build_hamiltonian(&ModelParams::new(1.0, 1.0, 0.1, 0.1, 0.1), 1).is_err());
    }

    #[test]
    fn hamiltonian_from_operator_products() {
        let (n, p) = (7, ModelParams::new(1.3, 20.0, 0.7, 1.1, 0.5));
        let a = dense(&TruncatedOperator::annihilation(n));
        let ad = a.adjoint();
        let sp = dense(&TruncatedOperator::sigma_plus(n));
        let sm = sp.adjoint();
        let sz = dense(&TruncatedOperator::sigma_z(n));
        let want = &ad * &a * re(p.omega0) + &sz * re(0.5 * p.omega)
            - (&a * &sp + &ad * &sm) * re(p.lambda_r)
            - (&a * &sm + &ad * &sp) * re(p.lambda_cr);
        let got = dense(&build_hamiltonian(&p, n).unwrap());
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn jc_conserves_excitations() {
        let n = 12;
        let h = dense(&build_hamiltonian(&ModelParams::new(1.0, 30.0, 2.0, 0.0, 0.5), n).unwrap());
        let ntot = dense(&TruncatedOperator::number(n))
            + (dense(&TruncatedOperator::sigma_z(n)) + dense(&TruncatedOperator::identity(n))) * re(0.5);
        let c = &h * &ntot - &ntot * &h;
        // Only the truncation edge breaks the symmetry.
        for i in 0..2 * n {
            for j in 0..2 * n {
                let (_, ni) = split(n, i);
                let (_, nj) = split(n, j);
                if ni < n - 1 && nj < n - 1 {
                    assert!(c[(i, j)].norm() < 1e-10);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(w in 0.1f64..5.0, om in 0.1f64..300.0, lr in 0.0f64..10.0, lcr in 0.0f64..10.0, n in 2usize..30) {
            let h = build_hamiltonian(&ModelParams::new(w, om, lr, lcr, 0.1), n).unwrap();
            prop_assert!(h.hermitian_deviation() < 1e-12);
        }
    }
}
