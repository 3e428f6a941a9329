//! Banded LU factorization through LAPACK `zgbtrf` / `zgbtrs`.

use std::os::raw::{c_char, c_int};

use lapack_sys::__BindgenComplex;
use num_complex::Complex64;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// LU factors of a square banded matrix in LAPACK band storage.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<c_int>,
}

impl BandedLu {
    /// Factors `a - shift * I`.
    pub fn factor(a: &SparseMatrix, shift: Complex64) -> Result<Self> {
        if a.n_rows != a.n_cols {
            return Err(Error::DimensionMismatch {
                expected: a.n_rows,
                found: a.n_cols,
            });
        }
        let n = a.n_rows;
        let (kl, ku) = a.bandwidths();
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![Complex64::new(0.0, 0.0); ldab * n];
        for (i, j, v) in a.iter() {
            ab[j * ldab + kl + ku + i - j] += v;
        }
        for j in 0..n {
            ab[j * ldab + kl + ku] -= shift;
        }
        let mut ipiv = vec![0 as c_int; n];
        let (ni, kli, kui, ldabi) = (n as c_int, kl as c_int, ku as c_int, ldab as c_int);
        let mut info: c_int = 0;
        // SAFETY: `ab` holds ldab * n entries, `ipiv` n entries; Complex64 and
        // the bindgen complex type are both `repr(C)` pairs of f64.
        unsafe {
            lapack_sys::zgbtrf_(
                &ni,
                &ni,
                &kli,
                &kui,
                ab.as_mut_ptr() as *mut __BindgenComplex<f64>,
                &ldabi,
                ipiv.as_mut_ptr(),
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Lapack { routine: "zgbtrf", info });
        }
        Ok(Self {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Bytes held by the factors.
    pub fn storage_bytes(&self) -> usize {
        self.ab.len() * std::mem::size_of::<Complex64>()
    }

    /// Solves in place for one right-hand side.
    pub fn solve(&self, b: &mut [Complex64]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        self.solve_many(b, 1)
    }

    /// Solves in place for `nrhs` column-major right-hand sides.
    pub fn solve_many(&self, b: &mut [Complex64], nrhs: usize) -> Result<()> {
        if b.len() != self.n * nrhs {
            return Err(Error::DimensionMismatch {
                expected: self.n * nrhs,
                found: b.len(),
            });
        }
        let trans = b'N' as c_char;
        let (ni, kli, kui, ldabi, nrhsi) = (
            self.n as c_int,
            self.kl as c_int,
            self.ku as c_int,
            self.ldab as c_int,
            nrhs as c_int,
        );
        let mut info: c_int = 0;
        // SAFETY: sizes checked above; layouts as in `factor`.
        unsafe {
            lapack_sys::zgbtrs_(
                &trans,
                &ni,
                &kli,
                &kui,
                &nrhsi,
                self.ab.as_ptr() as *const __BindgenComplex<f64>,
                &ldabi,
                self.ipiv.as_ptr(),
                b.as_mut_ptr() as *mut __BindgenComplex<f64>,
                &ni,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Lapack { routine: "zgbtrs", info });
        }
        Ok(())
    }
}
