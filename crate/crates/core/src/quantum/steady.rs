//! Steady state and low-lying spectrum of the Liouvillian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::{expectation, DensityMatrix, Hygiene};
use super::liouvillian::{build_sector, Liouvillian, Sector};
use super::operators::{build_hamiltonian, TruncatedOperator};
use super::spectrum::{eigenpairs_near, IterationOptions};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Null-space uniqueness: `|lambda_1| > RATIO * |lambda_0|`.
pub const UNIQUENESS_RATIO: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Real shift for the inverse iteration; slightly negative so the shifted
    /// generator stays invertible.
    pub shift: f64,
    pub iteration: IterationOptions,
    pub check_truncation: bool,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            shift: -1e-6,
            iteration: IterationOptions::default(),
            check_truncation: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub hygiene: Hygiene,
    /// Ritz values nearest zero, ascending in modulus.
    pub eigenvalues: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

impl SteadyState {
    /// `-Re lambda_1` of the computed sector.
    pub fn gap_estimate(&self) -> f64 {
        self.eigenvalues.get(1).map_or(f64::NAN, |l| -l.re)
    }

    pub fn diagnostics(&self) -> Result<Diagnostics> {
        let n = expectation(&self.rho, &TruncatedOperator::number(self.rho.dim_fock))?.re;
        Ok(Diagnostics {
            trace: self.hygiene.trace,
            min_eig: self.hygiene.min_eig,
            top_fock_pop: self.hygiene.top_fock_pop,
            n_expect: n,
            gap_estimate: self.gap_estimate(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub trace: f64,
    pub min_eig: f64,
    pub top_fock_pop: f64,
    pub n_expect: f64,
    pub gap_estimate: f64,
}

pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    steady_state_with(l, &SteadyOptions::default())
}

/// Null vector of `l` by shift-invert iteration. `l` must be the `Even` or
/// `Full` sector.
pub fn steady_state_with(l: &Liouvillian, opts: &SteadyOptions) -> Result<SteadyState> {
    if l.sector() == Sector::Odd {
        return Err(Error::InvalidArgument("the odd sector has no unit-trace states".into()));
    }
    let r = eigenpairs_near(&l.matrix, Complex64::new(opts.shift, 0.0), &opts.iteration)?;
    let eigenvalues: Vec<Complex64> = r.pairs.iter().map(|p| p.value).collect();
    if eigenvalues.len() > 1 {
        let ratio = eigenvalues[1].norm() / eigenvalues[0].norm();
        if !(ratio > UNIQUENESS_RATIO) {
            return Err(Error::DegenerateSteadyState { ratio });
        }
    }
    let null = &r.pairs[0];
    let raw = DensityMatrix::new(l.dim_fock(), l.layout.unpack(&null.vector))?;
    let tr = raw.trace();
    let normalized = DensityMatrix::new(l.dim_fock(), raw.matrix / tr)?;
    if opts.check_truncation {
        normalized.check_truncation()?;
    }
    let rho = normalized.sanitize()?;
    let hygiene = rho.hygiene();
    Ok(SteadyState {
        rho,
        hygiene,
        eigenvalues,
        residual: null.residual,
        iterations: r.iterations,
    })
}

/// Builds `H` and the even-sector generator and solves for the steady state.
pub fn solve(p: &ModelParams, dim_fock: usize, opts: &SteadyOptions) -> Result<SteadyState> {
    let h = build_hamiltonian(p, dim_fock)?;
    let l = build_sector(&h, p.kappa, p.gamma_spin, Sector::Even)?;
    steady_state_with(&l, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub eigenvalue_re: f64,
    pub eigenvalue_im: f64,
    pub residual: f64,
}

impl GapEstimate {
    pub fn rate(&self) -> f64 {
        -self.eigenvalue_re
    }
}

/// Liouvillian eigenvalue of the odd sector nearest `target`; the odd sector
/// carries the coherence `<a>`, so a target at the linearized cavity
/// eigenvalue picks out the low-frequency relaxation mode.
pub fn cavity_mode_eigenvalue(p: &ModelParams, dim_fock: usize, target: Complex64) -> Result<GapEstimate> {
    let h = build_hamiltonian(p, dim_fock)?;
    let l = build_sector(&h, p.kappa, p.gamma_spin, Sector::Odd)?;
    let r = eigenpairs_near(&l.matrix, target, &IterationOptions::default())?;
    let best = &r.pairs[0];
    Ok(GapEstimate {
        eigenvalue_re: best.value.re,
        eigenvalue_im: best.value.im,
        residual: best.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::trace_distance;
    use crate::quantum::liouvillian::build_liouvillian;

    #[test]
    fn decoupled_steady_state_is_ground() {
        let p = ModelParams::new(1.0, 10.0, 0.0, 0.0, 0.5).with_gamma_spin(0.2);
        let s = solve(&p, 8, &SteadyOptions::default()).unwrap();
        let g = DensityMatrix::ground(8);
        assert!((&s.rho.matrix - &g.matrix).norm() < 1e-10);
    }

    #[test]
    fn decoupled_without_spin_damping_is_degenerate() {
        let p = ModelParams::new(1.0, 10.0, 0.0, 0.0, 0.5);
        assert!(matches!(
            solve(&p, 6, &SteadyOptions::default()),
            Err(Error::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn full_and_even_sectors_agree() {
        let p = ModelParams::from_renormalized(0.5, 0.52, 0.5, 10.0);
        let n = 16;
        let h = build_hamiltonian(&p, n).unwrap();
        let full = steady_state(&build_liouvillian(&h, p.kappa, p.gamma_spin).unwrap()).unwrap();
        let even = solve(&p, n, &SteadyOptions::default()).unwrap();
        assert!(trace_distance(&full.rho.matrix, &even.rho.matrix) < 1e-9);
        let h = even.hygiene;
        assert!((h.trace - 1.0).abs() < 1e-10 && h.hermitian_deviation < 1e-10 && h.min_eig > -1e-8);
        assert!(even.residual < 1e-10);
    }

    #[test]
    fn odd_sector_rejected() {
        let p = ModelParams::new(1.0, 4.0, 0.3, 0.2, 0.5);
        let h = build_hamiltonian(&p, 4).unwrap();
        let l = build_sector(&h, p.kappa, 0.0, Sector::Odd).unwrap();
        assert!(steady_state(&l).is_err());
    }

    #[test]
    fn bare_cavity_mode() {
        // g = 0: <a> relaxes at -kappa - i omega0.
        let p = ModelParams::new(1.0, 10.0, 0.0, 0.0, 0.3);
        let g = cavity_mode_eigenvalue(&p, 6, Complex64::new(-0.25, -1.05)).unwrap();
        assert!((g.eigenvalue_re + 0.3).abs() < 1e-10 && (g.eigenvalue_im + 1.0).abs() < 1e-10, "{g:?}");
    }
}
