//! Vectorized Lindblad generator
//! `L rho = -i[H, rho] + kappa D[a] rho + gamma D[sigma_-] rho`
//! with `D[c] rho = 2 c rho c^dag - c^dag c rho - rho c^dag c`.
//!
//! The Hamiltonian conserves the parity `(n + s) mod 2`, splitting the basis
//! into two chains. Both dissipators flip the parity of the row and column
//! together, so density-matrix entries with equal chains (`Even`) and unequal
//! chains (`Odd`) evolve independently. The steady state lives in `Even`.
//!
//! Sector vector index: `(n_k * N + n_l) * B + b`, where `b` labels the chain
//! pair and `B` is the number of chain pairs in the sector.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operators::{TruncatedOperator, UP};
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Even,
    Odd,
    Full,
}

fn chain(s: usize, n: usize) -> usize {
    (s + n) % 2
}

impl Sector {
    pub fn blocks(self) -> usize {
        match self {
            Sector::Even | Sector::Odd => 2,
            Sector::Full => 4,
        }
    }

    pub fn dim(self, dim_fock: usize) -> usize {
        dim_fock * dim_fock * self.blocks()
    }

    fn block(self, ck: usize, cl: usize) -> Option<usize> {
        match self {
            Sector::Even if ck == cl => Some(ck),
            Sector::Odd if ck != cl => Some(ck),
            Sector::Full => Some(2 * ck + cl),
            _ => None,
        }
    }

    fn chains(self, b: usize) -> (usize, usize) {
        match self {
            Sector::Even => (b, b),
            Sector::Odd => (b, 1 - b),
            Sector::Full => (b / 2, b % 2),
        }
    }
}

/// Maps between `2N x 2N` matrices and sector vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorLayout {
    pub dim_fock: usize,
    pub sector: Sector,
}

impl SectorLayout {
    pub fn new(dim_fock: usize, sector: Sector) -> Self {
        Self { dim_fock, sector }
    }

    pub fn dim(&self) -> usize {
        self.sector.dim(self.dim_fock)
    }

    /// Sector position of matrix entry `(k, l)`, if it belongs to the sector.
    pub fn position(&self, k: usize, l: usize) -> Option<usize> {
        let n = self.dim_fock;
        let (sk, nk) = (k / n, k % n);
        let (sl, nl) = (l / n, l % n);
        let b = self.sector.block(chain(sk, nk), chain(sl, nl))?;
        Some((nk * n + nl) * self.sector.blocks() + b)
    }

    /// Matrix entry `(k, l)` stored at sector position `i`.
    pub fn entry(&self, i: usize) -> (usize, usize) {
        let n = self.dim_fock;
        let bl = self.sector.blocks();
        let (b, q) = (i % bl, i / bl);
        let (nk, nl) = (q / n, q % n);
        let (ck, cl) = self.sector.chains(b);
        let (sk, sl) = ((ck + nk) % 2, (cl + nl) % 2);
        (sk * n + nk, sl * n + nl)
    }

    /// Gathers the sector entries of `rho`.
    pub fn pack(&self, rho: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
        let d = 2 * self.dim_fock;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        Ok((0..self.dim()).map(|i| rho[self.entry(i)]).collect())
    }

    /// Largest entry of `rho` outside the sector.
    pub fn leakage(&self, rho: &DMatrix<Complex64>) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 0..rho.ncols() {
            for k in 0..rho.nrows() {
                if self.position(k, l).is_none() {
                    worst = worst.max(rho[(k, l)].norm());
                }
            }
        }
        worst
    }

    /// Scatters a sector vector into a `2N x 2N` matrix, zero elsewhere.
    pub fn unpack(&self, v: &[Complex64]) -> DMatrix<Complex64> {
        let d = 2 * self.dim_fock;
        let mut m = DMatrix::zeros(d, d);
        for (i, &x) in v.iter().enumerate() {
            m[self.entry(i)] = x;
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub layout: SectorLayout,
    pub matrix: SparseMatrix,
}

impl Liouvillian {
    pub fn dim_fock(&self) -> usize {
        self.layout.dim_fock
    }

    pub fn sector(&self) -> Sector {
        self.layout.sector
    }

    /// `L rho` for a full matrix `rho`; entries outside the sector are ignored.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let x = self.layout.pack(rho)?;
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.matrix.matvec(&x, &mut y)?;
        Ok(self.layout.unpack(&y))
    }
}

/// Full generator on all `(2N)^2` entries.
pub fn build_liouvillian(h: &TruncatedOperator, kappa: f64, gamma_spin: f64) -> Result<Liouvillian> {
    build_sector(h, kappa, gamma_spin, Sector::Full)
}

/// Generator restricted to one parity sector.
pub fn build_sector(h: &TruncatedOperator, kappa: f64, gamma_spin: f64, sector: Sector) -> Result<Liouvillian> {
    let n = h.dim_fock;
    let layout = SectorLayout::new(n, sector);
    let dim = layout.dim();
    // Column access to H through its adjoint: row k of H^dag holds conj(H[k', k]).
    let h_adj = h.matrix.adjoint();
    let i = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut t = Vec::with_capacity(dim * 8);
    let target = |k: usize, l: usize| {
        layout
            .position(k, l)
            .ok_or_else(|| Error::InvalidArgument(format!("generator maps out of the {sector:?} sector at ({k}, {l})")))
    };

    for col in 0..dim {
        let (k, l) = layout.entry(col);
        let (sk, nk) = (k / n, k % n);
        let (sl, nl) = (l / n, l % n);

        for (_, kp, hc) in h_adj.iter_row(k) {
            t.push((target(kp, l)?, col, -i * hc.conj()));
        }
        for (_, lp, hv) in h.matrix.iter_row(l) {
            t.push((target(k, lp)?, col, i * hv));
        }

        let mut diag = -kappa * (nk + nl) as f64;
        if nk > 0 && nl > 0 && kappa != 0.0 {
            t.push((target(k - 1, l - 1)?, col, re(2.0 * kappa * ((nk * nl) as f64).sqrt())));
        }
        if gamma_spin != 0.0 {
            let (uk, ul) = ((sk == UP) as usize, (sl == UP) as usize);
            diag -= gamma_spin * (uk + ul) as f64;
            if uk == 1 && ul == 1 {
                t.push((target(k - n, l - n)?, col, re(2.0 * gamma_spin)));
            }
        }
        t.push((col, col, re(diag)));
    }
    Ok(Liouvillian {
        layout,
        matrix: SparseMatrix::from_triplets(dim, dim, t),
    })
}
