//! Time evolution `d rho / dt = L rho` with the three-stage Radau IIA method.
//!
//! For a linear autonomous system one Radau IIA step is `rho <- R(hL) rho`
//! with the stability function `R = P / Q`,
//! `P(z) = 1 + 2z/5 + z^2/20`, `Q(z) = 1 - 3z/5 + 3z^2/20 - z^3/60`.
//! Splitting `R` into partial fractions over the roots `z_j` of `Q` turns a
//! step into three shifted solves: `R(hL) = sum_j r_j (hL - z_j)^-1`.

use nalgebra::{Matrix3, DMatrix};
use num_complex::Complex64;

use super::banded::BandedLu;
use super::density::DensityMatrix;
use super::liouvillian::{build_sector, Liouvillian, Sector, SectorLayout};
use super::operators::build_hamiltonian;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Relative size of out-of-sector entries tolerated in an initial state.
const LEAKAGE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveControls {
    pub dt: f64,
    /// Steps grow geometrically by `growth` up to `dt_max`.
    pub growth: f64,
    pub dt_max: f64,
}

impl EvolveControls {
    pub fn fixed(dt: f64) -> Self {
        Self {
            dt,
            growth: 1.0,
            dt_max: dt,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.growth >= 1.0) || !(self.dt_max >= self.dt) {
            return Err(Error::InvalidArgument(format!("invalid step controls {self:?}")));
        }
        Ok(())
    }
}

impl Default for EvolveControls {
    fn default() -> Self {
        Self::fixed(0.01)
    }
}

fn poly_p(z: Complex64) -> Complex64 {
    1.0 + z * 0.4 + z * z / 20.0
}

fn poly_dq(z: Complex64) -> Complex64 {
    -0.6 + z * 0.3 - z * z / 20.0
}

/// Roots `z_j` of `Q` and residues `r_j = P(z_j) / Q'(z_j)`.
pub fn partial_fractions() -> [(Complex64, Complex64); 3] {
    // Q(z) * (-60) = z^3 - 9 z^2 + 36 z - 60.
    let companion = Matrix3::new(9.0, -36.0, 60.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let roots = companion.complex_eigenvalues();
    let mut out = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
    for (j, &z0) in roots.iter().enumerate() {
        let mut z = z0;
        for _ in 0..3 {
            let f = ((z - 9.0) * z + 36.0) * z - 60.0;
            let df = (3.0 * z - 18.0) * z + 36.0;
            z -= f / df;
        }
        out[j] = (z, poly_p(z) / poly_dq(z));
    }
    out
}

/// Factored step operator for one step size.
pub struct RadauStep {
    pub h: f64,
    terms: Vec<(Complex64, BandedLu)>,
}

impl RadauStep {
    pub fn new(l: &Liouvillian, h: f64) -> Result<Self> {
        let terms = partial_fractions()
            .iter()
            .map(|&(z, r)| Ok((r / h, BandedLu::factor(&l.matrix, z / h)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h, terms })
    }

    pub fn apply(&self, v: &mut [Complex64]) -> Result<()> {
        let mut acc = vec![Complex64::new(0.0, 0.0); v.len()];
        let mut work = vec![Complex64::new(0.0, 0.0); v.len()];
        for (coef, lu) in &self.terms {
            work.copy_from_slice(v);
            lu.solve(&mut work)?;
            for (a, w) in acc.iter_mut().zip(&work) {
                *a += coef * w;
            }
        }
        v.copy_from_slice(&acc);
        Ok(())
    }
}

/// Evolves a sector vector, calling `observe` at every time in `outputs`
/// (ascending, non-negative). Returns the vector at the last output.
pub fn evolve_vector<O>(
    l: &Liouvillian,
    v0: &[Complex64],
    outputs: &[f64],
    controls: &EvolveControls,
    mut observe: O,
) -> Result<Vec<Complex64>>
where
    O: FnMut(f64, &[Complex64]),
{
    controls.validate()?;
    let mut v = v0.to_vec();
    let mut t = 0.0;
    let mut h = controls.dt;
    let mut stepper: Option<RadauStep> = None;
    for &t_out in outputs {
        if !(t_out >= t) {
            return Err(Error::InvalidArgument(format!("output time {t_out} precedes {t}")));
        }
        while t_out - t > 1e-12 * t_out.max(1.0) {
            let step = h.min(t_out - t);
            let stale = stepper.as_ref().map_or(true, |s| (s.h - step).abs() > 1e-14 * step);
            if stale {
                stepper = Some(RadauStep::new(l, step)?);
            }
            stepper.as_ref().unwrap().apply(&mut v)?;
            t += step;
            if step == h {
                h = (h * controls.growth).min(controls.dt_max);
            }
        }
        t = t_out;
        observe(t, &v);
    }
    Ok(v)
}

/// `rho(t)` under `l`. Entries of `rho0` outside the sector of `l` must vanish.
pub fn time_evolve(rho0: &DensityMatrix, l: &Liouvillian, t: f64, controls: &EvolveControls) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    check_sector(&l.layout, &rho0.matrix)?;
    let v0 = l.layout.pack(&rho0.matrix)?;
    let v = evolve_vector(l, &v0, &[t], controls, |_, _| {})?;
    DensityMatrix::new(rho0.dim_fock, l.layout.unpack(&v))
}

fn check_sector(layout: &SectorLayout, rho: &DMatrix<Complex64>) -> Result<()> {
    let leak = layout.leakage(rho);
    if leak > LEAKAGE_TOL * rho.norm().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "initial state has entries of size {leak:e} outside the {:?} sector",
            layout.sector
        )));
    }
    Ok(())
}

/// Smallest sector that holds `rho`.
pub fn sector_for(rho: &DensityMatrix) -> Sector {
    let even = SectorLayout::new(rho.dim_fock, Sector::Even);
    if even.leakage(&rho.matrix) == 0.0 {
        Sector::Even
    } else {
        Sector::Full
    }
}

/// Builds the generator for `p` in the smallest sector holding `rho0` and
/// evolves to each of `times`.
pub fn evolve_model(
    p: &ModelParams,
    rho0: &DensityMatrix,
    times: &[f64],
    controls: &EvolveControls,
) -> Result<Vec<DensityMatrix>> {
    let h = build_hamiltonian(p, rho0.dim_fock)?;
    let l = build_sector(&h, p.kappa, p.gamma_spin, sector_for(rho0))?;
    check_sector(&l.layout, &rho0.matrix)?;
    let v0 = l.layout.pack(&rho0.matrix)?;
    let mut out = Vec::with_capacity(times.len());
    evolve_vector(&l, &v0, times, controls, |_, v| {
        out.push(DensityMatrix {
            dim_fock: rho0.dim_fock,
            matrix: l.layout.unpack(v),
        })
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::{coherent, expectation, trace_distance};
    use crate::quantum::operators::{TruncatedOperator, DOWN};

    #[test]
    fn stability_function_identities() {
        let pf = partial_fractions();
        let r = |z: Complex64| pf.iter().map(|&(zj, rj)| rj / (z - zj)).sum::<Complex64>();
        assert!((r(Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-14);
        // Fifth-order agreement with exp near the origin.
        let z = Complex64::new(-0.01, 0.02);
        assert!((r(z) - z.exp()).norm() < 1e-12);
        // L-stable: R vanishes at infinity.
        assert!(r(Complex64::new(-1e8, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn zero_time_is_identity() {
        let p = ModelParams::new(1.0, 5.0, 0.4, 0.3, 0.5);
        let rho0 = DensityMatrix::product(DOWN, &coherent(10, Complex64::new(0.5, 0.2)));
        let out = evolve_model(&p, &rho0, &[0.0], &EvolveControls::default()).unwrap();
        assert_eq!(out[0], rho0);
    }

    #[test]
    fn free_cavity_coherence_decays_exactly() {
        let (n, kappa) = (30, 0.4);
        let p = ModelParams::new(1.0, 10.0, 0.0, 0.0, kappa);
        let beta = Complex64::new(0.8, -0.3);
        let rho0 = DensityMatrix::product(DOWN, &coherent(n, beta));
        let a = TruncatedOperator::annihilation(n);
        let a0 = expectation(&rho0, &a).unwrap();
        let times = [0.5, 1.0, 2.0, 3.0];
        let out = evolve_model(&p, &rho0, &times, &EvolveControls::fixed(0.01)).unwrap();
        for (t, rho) in times.iter().zip(&out) {
            let want = a0 * (Complex64::new(-kappa, -1.0) * *t).exp();
            let got = expectation(rho, &a).unwrap();
            assert!((got - want).norm() < 1e-8, "t = {t}: {got} vs {want}");
        }
    }

    #[test]
    fn long_time_limit_is_steady_state() {
        let p = ModelParams::from_renormalized(0.5, 0.52, 0.5, 10.0);
        let n = 16;
        let ss = crate::quantum::steady::solve(&p, n, &Default::default()).unwrap();
        let controls = EvolveControls {
            dt: 0.05,
            growth: 1.5,
            dt_max: 200.0,
        };
        let out = evolve_model(&p, &DensityMatrix::ground(n), &[5000.0], &controls).unwrap();
        assert!(trace_distance(&out[0].matrix, &ss.rho.matrix) < 1e-8);
    }

    #[test]
    fn rejects_out_of_sector_state() {
        let p = ModelParams::new(1.0, 5.0, 0.4, 0.3, 0.5);
        let h = build_hamiltonian(&p, 6).unwrap();
        let l = build_sector(&h, p.kappa, 0.0, Sector::Even).unwrap();
        let rho0 = DensityMatrix::product(DOWN, &coherent(6, Complex64::new(0.5, 0.0)));
        assert!(time_evolve(&rho0, &l, 1.0, &EvolveControls::default()).is_err());
        assert!(time_evolve(&DensityMatrix::ground(6), &l, -1.0, &EvolveControls::default()).is_err());
    }
}
