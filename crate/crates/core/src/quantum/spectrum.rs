//! Shift-invert subspace iteration for a few eigenpairs of a sparse
//! generator near a complex shift.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::banded::BandedLu;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub subspace: usize,
    pub max_iter: usize,
    /// Residual tolerance relative to the largest diagonal magnitude.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            subspace: 3,
            max_iter: 60,
            rel_tol: 1e-13,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    /// `||A x - theta x||` with `||x|| = 1`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct RitzResult {
    /// Sorted by distance to the shift.
    pub pairs: Vec<RitzPair>,
    pub iterations: usize,
    pub converged: bool,
}

fn orthonormalize(cols: &mut [Vec<Complex64>]) {
    for j in 0..cols.len() {
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let proj: Complex64 = head[i].iter().zip(tail[0].iter()).map(|(q, v)| q.conj() * v).sum();
                for (v, q) in tail[0].iter_mut().zip(head[i].iter()) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
}

/// Eigenvector of a small matrix for a known eigenvalue, by inverse iteration.
fn small_eigenvector(t: &DMatrix<Complex64>, theta: Complex64) -> DVector<Complex64> {
    let p = t.nrows();
    let scale = t.norm().max(1e-300);
    let perturbed = theta + Complex64::new(1e-12 * scale, 1e-12 * scale);
    let lu = (t - DMatrix::identity(p, p) * perturbed).lu();
    let mut y = DVector::from_fn(p, |i, _| Complex64::new(1.0, 0.1 * i as f64));
    for _ in 0..3 {
        if let Some(z) = lu.solve(&y) {
            let n = z.norm();
            if n.is_finite() && n > 0.0 {
                y = z / Complex64::new(n, 0.0);
            }
        }
    }
    y
}

/// Eigenpairs of `a` nearest `shift`.
pub fn eigenpairs_near(a: &SparseMatrix, shift: Complex64, opts: &IterationOptions) -> Result<RitzResult> {
    let n = a.n_rows;
    let p = opts.subspace.min(n).max(1);
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let lu = BandedLu::factor(a, shift)?;
    let scale = (0..n).map(|i| a.get(i, i).norm()).fold(1.0, f64::max);
    let tol = opts.rel_tol * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<Vec<Complex64>> = (0..p)
        .map(|_| (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    orthonormalize(&mut q);

    let mut block = vec![Complex64::new(0.0, 0.0); n * p];
    let mut aq = vec![vec![Complex64::new(0.0, 0.0); n]; p];
    let mut result = RitzResult {
        pairs: Vec::new(),
        iterations: 0,
        converged: false,
    };
    for it in 1..=opts.max_iter {
        for (j, col) in q.iter().enumerate() {
            block[j * n..(j + 1) * n].copy_from_slice(col);
        }
        lu.solve_many(&mut block, p)?;
        for (j, col) in q.iter_mut().enumerate() {
            col.copy_from_slice(&block[j * n..(j + 1) * n]);
        }
        orthonormalize(&mut q);

        for (j, col) in q.iter().enumerate() {
            a.matvec(col, &mut aq[j])?;
        }
        let t = DMatrix::from_fn(p, p, |i, j| q[i].iter().zip(&aq[j]).map(|(x, y)| x.conj() * y).sum());
        let thetas = t
            .clone()
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::InvalidArgument("Schur decomposition did not converge".into()))?;
        let mut pairs: Vec<RitzPair> = thetas
            .iter()
            .map(|&theta| {
                let y = small_eigenvector(&t, theta);
                let mut x = vec![Complex64::new(0.0, 0.0); n];
                let mut ax = vec![Complex64::new(0.0, 0.0); n];
                for j in 0..p {
                    for i in 0..n {
                        x[i] += q[j][i] * y[j];
                        ax[i] += aq[j][i] * y[j];
                    }
                }
                let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let residual = x
                    .iter()
                    .zip(&ax)
                    .map(|(xi, axi)| (axi - theta * xi).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    / norm;
                for v in x.iter_mut() {
                    *v /= norm;
                }
                RitzPair {
                    value: theta,
                    vector: x,
                    residual,
                }
            })
            .collect();
        pairs.sort_by(|u, v| (u.value - shift).norm().total_cmp(&(v.value - shift).norm()));
        let converged = pairs[0].residual < tol;
        result = RitzResult {
            pairs,
            iterations: it,
            converged,
        };
        if converged {
            break;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_eigenvalues_of_tridiagonal() {
        // Non-normal tridiagonal with known spectrum: diag d_i, sub/super b, c
        // with b c > 0 has eigenvalues d + 2 sqrt(bc) cos(k pi / (n + 1)).
        let n = 10;
        let (d, b, cc) = (Complex64::new(-1.0, 0.5), 0.3, 0.7);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, d));
            if i + 1 < n {
                t.push((i + 1, i, Complex64::new(b, 0.0)));
                t.push((i, i + 1, Complex64::new(cc, 0.0)));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, t);
        let exact: Vec<Complex64> = (1..=n)
            .map(|k| d + 2.0 * (b * cc).sqrt() * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        let shift = Complex64::new(-0.2, 0.4);
        let r = eigenpairs_near(&a, shift, &IterationOptions::default()).unwrap();
        assert!(r.converged);
        let nearest = exact.iter().min_by(|x, y| (**x - shift).norm().total_cmp(&(**y - shift).norm())).unwrap();
        assert!((r.pairs[0].value - nearest).norm() < 1e-10);
    }
}
