//! Linearized quantum fluctuations around the mean-field steady states.
//!
//! All rates and energies are in units of `omega0`. Excitation numbers are the
//! fluctuation part only, i.e. measured in the displaced frame.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{self, MeanFieldSolution};
use crate::params::RenormalizedParams;
use crate::path::Line;

/// Below this magnitude an excitation-number denominator counts as zero.
pub const DIVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FluctuationPhase {
    #[serde(rename = "NP")]
    Np,
    #[serde(rename = "SP")]
    Sp,
}

impl FluctuationPhase {
    pub fn label(&self) -> &'static str {
        match self {
            FluctuationPhase::Np => "NP",
            FluctuationPhase::Sp => "SP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuationResult {
    /// `(l+, l-)` with `Re l- <= Re l+`.
    pub eigenvalues: (Complex64, Complex64),
    /// `-Re l+` when stable, otherwise 0.
    pub adr: f64,
    /// `+inf` when the phase is unstable at the point.
    pub excitation_number: f64,
    pub phase: FluctuationPhase,
}

impl FluctuationResult {
    pub fn stable(&self) -> bool {
        self.eigenvalues.0.re < 0.0
    }
}

fn csqrt(x: f64) -> Complex64 {
    Complex64::new(x, 0.0).sqrt()
}

fn pair(kappa_bar: f64, radicand: f64) -> (Complex64, Complex64) {
    let r = csqrt(radicand);
    (-kappa_bar + r, -kappa_bar - r)
}

/// Drift matrix of `(<a>, <a^dag>)` in the normal phase.
pub fn np_matrix(g_r: f64, g_cr: f64, kappa_bar: f64) -> Matrix2<Complex64> {
    let i = Complex64::i();
    let s = g_r * g_r + g_cr * g_cr;
    let c = 2.0 * g_r * g_cr;
    Matrix2::new(
        i * (s - 1.0) - kappa_bar,
        i * c,
        -i * c,
        i * (1.0 - s) - kappa_bar,
    )
}

pub fn np_eigenvalues_at(g_r: f64, g_cr: f64, kappa_bar: f64) -> (Complex64, Complex64) {
    pair(kappa_bar, kappa_bar * kappa_bar - meanfield::np_stability_a_at(g_r, g_cr, kappa_bar))
}

/// `l± = -kb ± sqrt(2 g^2 (1 + eps^2) - g^4 (1 - eps^2)^2 - 1)`.
pub fn np_eigenvalues(g: f64, epsilon: f64, kappa_bar: f64) -> (Complex64, Complex64) {
    np_eigenvalues_at(g, epsilon * g, kappa_bar)
}

/// Oscillator occupation of the normal-phase steady state, `2 g_r^2 g_cr^2 / A_NP`.
///
/// Returns `+inf` where the normal phase is unstable.
pub fn np_excitation_at(g_r: f64, g_cr: f64, kappa_bar: f64) -> Result<f64> {
    let den = meanfield::np_stability_a_at(g_r, g_cr, kappa_bar);
    if den.abs() < DIVERGENCE_TOL {
        return Err(Error::BoundaryDivergence {
            quantity: "np_excitation",
            denominator: den,
        });
    }
    if den < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (g_r * g_cr).powi(2) / den)
}

pub fn np_excitation(g: f64, epsilon: f64, kappa_bar: f64) -> Result<f64> {
    np_excitation_at(g, epsilon * g, kappa_bar)
}

/// Second-moment equations `d/dt (n, m, m*) = M (n, m, m*) + Y` with
/// `n = <a^dag a>` and `m = <a a>`.
pub fn np_second_moment_system(g_r: f64, g_cr: f64, kappa_bar: f64) -> (Matrix3<Complex64>, Vector3<Complex64>) {
    let l = np_matrix(g_r, g_cr, kappa_bar);
    let (l11, l12) = (l[(0, 0)], l[(0, 1)]);
    let z = Complex64::new(0.0, 0.0);
    let m = Matrix3::new(
        Complex64::new(-2.0 * kappa_bar, 0.0),
        l12.conj(),
        l12,
        2.0 * l12,
        2.0 * l11,
        z,
        2.0 * l12.conj(),
        z,
        2.0 * l11.conj(),
    );
    (m, Vector3::new(z, l12, l12.conj()))
}

/// Steady-state `(n, m, m*)` from `-M^{-1} Y`.
pub fn np_second_moments(g_r: f64, g_cr: f64, kappa_bar: f64) -> Result<Vector3<Complex64>> {
    let (m, y) = np_second_moment_system(g_r, g_cr, kappa_bar);
    m.lu()
        .solve(&(-y))
        .ok_or(Error::BoundaryDivergence {
            quantity: "np_second_moments",
            denominator: 0.0,
        })
}

pub fn np_result(g_r: f64, g_cr: f64, kappa_bar: f64) -> FluctuationResult {
    let eigenvalues = np_eigenvalues_at(g_r, g_cr, kappa_bar);
    let excitation_number = np_excitation_at(g_r, g_cr, kappa_bar).unwrap_or(f64::INFINITY);
    FluctuationResult {
        eigenvalues,
        adr: (-eigenvalues.0.re).max(0.0),
        excitation_number,
        phase: FluctuationPhase::Np,
    }
}

/// Coefficients of the quadratic superradiant-phase Hamiltonian
/// `P a^dag a + Q a a + Q* a^dag a^dag`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpCoefficients {
    pub xi: f64,
    pub u_bar: Complex64,
    pub v_bar: Complex64,
    pub w_bar: Complex64,
    pub p: f64,
    pub q: Complex64,
    pub s_z: f64,
    pub alpha_bar: Complex64,
}

impl SpCoefficients {
    /// Ground-energy offset in units of `omega0`; depends on `eta` explicitly.
    pub fn e_sp(&self, eta: f64) -> f64 {
        let a = self.s_z.abs();
        eta * self.alpha_bar.norm_sqr() - eta / (2.0 * a) - a * self.v_bar.norm_sqr()
    }

    /// `4|Q|^2 - P^2`.
    pub fn radicand(&self) -> f64 {
        4.0 * self.q.norm_sqr() - self.p * self.p
    }
}

/// Simplified closed forms of `(u, v)`, which only need `|s_z|`.
///
/// Written in coupling coordinates; requires `g_r > 0` and `g_cr > 0`. Also
/// valid as an analytic continuation for `|s_z| > 1`.
pub fn sp_uv_closed(g_r: f64, g_cr: f64, kappa_bar: f64, abs_sz: f64) -> (Complex64, Complex64) {
    let (r2, c2) = (g_r * g_r, g_cr * g_cr);
    let disc = (4.0 * r2 * c2 - kappa_bar * kappa_bar * (r2 - c2) * (r2 - c2)).max(0.0);
    let root = disc.sqrt();
    let (plus, minus) = (1.0 + abs_sz, 1.0 - abs_sz);
    let im = minus * kappa_bar * (r2 - c2) / 4.0;
    let u = Complex64::new(0.5 * (g_r * plus - minus * root / (2.0 * g_r)), im / g_r);
    let v = Complex64::new(0.5 * (g_cr * plus - minus * root / (2.0 * g_cr)), im / g_cr);
    (u, v)
}

/// General forms of `(u, v)` in terms of the mean-field coherence.
pub fn sp_uv_general(sol: &MeanFieldSolution, p: &RenormalizedParams) -> (Complex64, Complex64) {
    let alpha = sol.alpha_bar;
    let beta = p.g_r * alpha.conj() + p.g_cr * alpha;
    let xi = 1.0 + 4.0 * beta.norm_sqr();
    let sx = xi.sqrt();
    let off = (2.0 * beta) * (2.0 * beta) / (xi + sx);
    let u = 0.5 * (p.g_r * (1.0 + 1.0 / sx) - p.g_cr * off);
    let v = 0.5 * (p.g_cr * (1.0 + 1.0 / sx) - p.g_r * off);
    (u, v)
}

fn w_bar(alpha: Complex64, p: &RenormalizedParams, xi: f64) -> Complex64 {
    let beta = p.g_r * alpha.conj() + p.g_cr * alpha;
    let gamma = p.g_r * alpha + p.g_cr * alpha.conj();
    (p.g_r * beta + p.g_cr * gamma) / xi.sqrt()
}

fn coefficients(u: Complex64, v: Complex64, s_z: f64, alpha: Complex64, w_bar: Complex64) -> SpCoefficients {
    let a = s_z.abs();
    SpCoefficients {
        xi: 1.0 / (s_z * s_z),
        u_bar: u,
        v_bar: v,
        w_bar,
        p: 1.0 - a * (u.norm_sqr() + v.norm_sqr()),
        q: -a * u.conj() * v,
        s_z,
        alpha_bar: alpha,
    }
}

pub fn sp_coefficients_at(p: &RenormalizedParams, sign: i8) -> Result<SpCoefficients> {
    let sol = meanfield::sp_solution_at(p, sign)?;
    let (u, v) = sp_uv_closed(p.g_r, p.g_cr, p.kappa_bar, sol.s_z.abs());
    let xi = 1.0 / (sol.s_z * sol.s_z);
    Ok(coefficients(u, v, sol.s_z, sol.alpha_bar, w_bar(sol.alpha_bar, p, xi)))
}

pub fn sp_coefficients(g: f64, epsilon: f64, kappa_bar: f64, sign: i8) -> Result<SpCoefficients> {
    sp_coefficients_at(&RenormalizedParams::from_polar(g, epsilon, kappa_bar), sign)
}

/// Coefficients from the closed forms at an arbitrary `s_z`, with no
/// mean-field solution behind them. Used to continue the SP spectrum past
/// its existence boundary.
pub fn sp_coefficients_continued(p: &RenormalizedParams, s_z: f64) -> SpCoefficients {
    let (u, v) = sp_uv_closed(p.g_r, p.g_cr, p.kappa_bar, s_z.abs());
    let zero = Complex64::new(0.0, 0.0);
    coefficients(u, v, s_z, zero, zero)
}

/// The branch root `s_z-` without the `(-1, 0)` range check.
pub fn sp_spin_z_unchecked(p: &RenormalizedParams) -> Option<f64> {
    let (r2, c2) = (p.g_r * p.g_r, p.g_cr * p.g_cr);
    let d = 4.0 * r2 * c2 - p.kappa_bar * p.kappa_bar * (r2 - c2) * (r2 - c2);
    (d >= 0.0).then(|| -(1.0 + p.kappa_bar * p.kappa_bar) / (r2 + c2 + d.sqrt()))
}

/// Drift matrix of `(<a>, <a^dag>)` for the quadratic SP Hamiltonian.
pub fn sp_matrix(c: &SpCoefficients, kappa_bar: f64) -> Matrix2<Complex64> {
    let i = Complex64::i();
    Matrix2::new(
        -i * c.p - kappa_bar,
        -2.0 * i * c.q.conj(),
        2.0 * i * c.q,
        i * c.p - kappa_bar,
    )
}

/// `l± = -kb ± sqrt(4|Q|^2 - P^2)`.
pub fn sp_eigenvalues(c: &SpCoefficients, kappa_bar: f64) -> (Complex64, Complex64) {
    pair(kappa_bar, c.radicand())
}

/// `2|Q|^2 / (P^2 - 4|Q|^2 + kappa^2)`, `kappa` in units of `omega0`.
pub fn sp_excitation(c: &SpCoefficients, kappa: f64) -> Result<f64> {
    let den = kappa * kappa - c.radicand();
    if den.abs() < DIVERGENCE_TOL {
        return Err(Error::BoundaryDivergence {
            quantity: "sp_excitation",
            denominator: den,
        });
    }
    if den < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * c.q.norm_sqr() / den)
}

pub fn sp_result(g_r: f64, g_cr: f64, kappa_bar: f64) -> Result<FluctuationResult> {
    let c = sp_coefficients_at(&RenormalizedParams::new(g_r, g_cr, kappa_bar), 1)?;
    let eigenvalues = sp_eigenvalues(&c, kappa_bar);
    let excitation_number = sp_excitation(&c, kappa_bar).unwrap_or(f64::INFINITY);
    Ok(FluctuationResult {
        eigenvalues,
        adr: (-eigenvalues.0.re).max(0.0),
        excitation_number,
        phase: FluctuationPhase::Sp,
    })
}

/// Asymptotic decay rate `-Re l+` of the given phase.
pub fn adr(g_r: f64, g_cr: f64, kappa_bar: f64, phase: FluctuationPhase) -> Result<f64> {
    let l = match phase {
        FluctuationPhase::Np => np_eigenvalues_at(g_r, g_cr, kappa_bar).0,
        FluctuationPhase::Sp => {
            let c = sp_coefficients_at(&RenormalizedParams::new(g_r, g_cr, kappa_bar), 1)?;
            sp_eigenvalues(&c, kappa_bar).0
        }
    };
    Ok(-l.re)
}

/// Line tangent to the normal-phase boundary `A_NP = 0` at `(g_r, g_cr)`,
/// parametrized by `g_r`.
pub fn np_tangent_line(g_r: f64, g_cr: f64) -> Line {
    let diff = g_r * g_r - g_cr * g_cr;
    let da_dr = -4.0 * g_r + 4.0 * g_r * diff;
    let da_dc = -4.0 * g_cr - 4.0 * g_cr * diff;
    let slope = -da_dr / da_dc;
    Line::affine(slope, g_cr - slope * g_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const KB: f64 = 0.5;

    /// Eigenvalues of `m` matched to the closed-form pair, whatever their order.
    fn eig_distance(m: Matrix2<Complex64>, want: (Complex64, Complex64)) -> f64 {
        let ev = m.schur().eigenvalues().unwrap();
        let d1 = (ev[0] - want.0).norm().max((ev[1] - want.1).norm());
        let d2 = (ev[1] - want.0).norm().max((ev[0] - want.1).norm());
        d1.min(d2)
    }

    #[test]
    fn decoupled_limits() {
        let m = np_matrix(0.0, 0.0, KB);
        assert_eq!(m[(0, 0)], Complex64::new(-KB, -1.0));
        assert_eq!(m[(1, 1)], Complex64::new(-KB, 1.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
        let (p, n) = np_eigenvalues(0.0, 0.7, KB);
        assert_abs_diff_eq!((p - Complex64::new(-KB, 1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((n - Complex64::new(-KB, -1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(np_excitation(0.0, 0.5, KB).unwrap(), 0.0);
        assert_eq!(np_excitation(0.4, 0.0, KB).unwrap(), 0.0);
    }

    #[test]
    fn np_reference_points() {
        let (p, _) = np_eigenvalues(1.0, 0.5, KB);
        assert!(p.re > 0.0);
        let (p, _) = np_eigenvalues(0.3, 1.0, KB);
        assert!(p.im.abs() > 0.0);
        assert_abs_diff_eq!(p.re, -KB, epsilon = 1e-15);
        let (m, pl) = meanfield::critical_couplings(0.5, KB).unwrap();
        assert_abs_diff_eq!(np_eigenvalues(m, 0.5, KB).0.re, 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(np_eigenvalues(pl, 0.5, KB).0.re, 0.0, epsilon = 1e-7);
    }

    #[test]
    fn np_excitation_diverges_at_boundary() {
        let (m, _) = meanfield::critical_couplings(0.5, KB).unwrap();
        assert!(np_excitation(m, 0.5, KB).is_err() || np_excitation(m, 0.5, KB).unwrap() > 1e10);
        assert_eq!(np_excitation(1.0, 0.5, KB).unwrap(), f64::INFINITY);
    }

    #[test]
    fn second_moments_match_closed_form() {
        for &(r, c) in &[(0.3, 0.5), (0.2, 0.3), (0.3, 2.0), (1.0, 2.8)] {
            assert!(meanfield::np_stability_a_at(r, c, KB) > 0.0);
            let n = np_excitation_at(r, c, KB).unwrap();
            let s = np_second_moments(r, c, KB).unwrap();
            assert_abs_diff_eq!(s[0].re, n, epsilon = 1e-10 * n.max(1.0));
            assert_abs_diff_eq!(s[0].im, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!((s[1] - s[2].conj()).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn sp_reference_point() {
        let q = RenormalizedParams::from_polar(1.0, 0.5, KB);
        let c = sp_coefficients_at(&q, 1).unwrap();
        assert_abs_diff_eq!(c.xi * c.s_z * c.s_z, 1.0, epsilon = 1e-12);
        let sol = meanfield::sp_solution_at(&q, 1).unwrap();
        let (u7, v7) = sp_uv_general(&sol, &q);
        assert!((u7 - c.u_bar).norm() < 1e-10);
        assert!((v7 - c.v_bar).norm() < 1e-10);

        let m = sp_coefficients_at(&q, -1).unwrap();
        assert_abs_diff_eq!(c.p, m.p, epsilon = 1e-15);
        assert_abs_diff_eq!(c.q.norm(), m.q.norm(), epsilon = 1e-15);

        let (l, _) = sp_eigenvalues(&c, KB);
        assert!(l.re < 0.0);
        let n = sp_excitation(&c, KB).unwrap();
        assert!(n.is_finite() && n > 0.0);
    }

    #[test]
    fn sp_spectrum_matches_meanfield_mu() {
        for &(g, e) in &[(1.0, 0.5), (2.0, 2.1), (0.9, 3.0), (1.2, 1.0)] {
            let c = sp_coefficients(g, e, KB, 1).unwrap();
            let sol = meanfield::sp_solution(g, e, KB, 1).unwrap();
            let target = KB * KB - sol.stability_a / sol.stability_b;
            assert_abs_diff_eq!(c.radicand(), target, epsilon = 1e-10);
        }
    }

    #[test]
    fn matrices_match_closed_forms() {
        for &(r, cr) in &[(0.3, 0.2), (0.43, 0.7), (1.0, 0.5), (1.0, 2.1), (0.8, 0.8)] {
            let d = eig_distance(np_matrix(r, cr, KB), np_eigenvalues_at(r, cr, KB));
            assert!(d < 1e-12, "{r} {cr}: {d}");
            if let Ok(c) = sp_coefficients_at(&RenormalizedParams::new(r, cr, KB), 1) {
                assert!(eig_distance(sp_matrix(&c, KB), sp_eigenvalues(&c, KB)) < 1e-12);
            }
        }
    }

    #[test]
    fn energy_offset_scales_with_eta() {
        let c = sp_coefficients(1.0, 0.5, KB, 1).unwrap();
        let d = c.e_sp(200.0) - c.e_sp(100.0);
        assert_abs_diff_eq!(d, 100.0 * (c.alpha_bar.norm_sqr() - 0.5 / c.s_z.abs()), epsilon = 1e-10);
    }

    #[test]
    fn tangent_line_touches_boundary() {
        let (gm, _) = meanfield::critical_couplings(0.5, KB).unwrap();
        let line = np_tangent_line(gm, 0.5 * gm);
        let (r, c) = line.point(gm);
        assert_abs_diff_eq!(r, gm, epsilon = 1e-15);
        assert_abs_diff_eq!(c, 0.5 * gm, epsilon = 1e-14);
        for dt in [-1e-3, 1e-3] {
            let (r, c) = line.point(gm + dt);
            assert!(meanfield::np_stability_a_at(r, c, KB) > 0.0);
        }
    }

    proptest! {
        #[test]
        fn closed_and_general_uv_agree(g in 0.3f64..3.0, e in 0.2f64..5.0, kb in 0.05f64..1.5) {
            let q = RenormalizedParams::from_polar(g, e, kb);
            if let Ok(sol) = meanfield::sp_solution_at(&q, 1) {
                let (u7, v7) = sp_uv_general(&sol, &q);
                let (u, v) = sp_uv_closed(q.g_r, q.g_cr, kb, sol.s_z.abs());
                prop_assert!((u7 - u).norm() < 1e-10 * (1.0 + g));
                prop_assert!((v7 - v).norm() < 1e-10 * (1.0 + g));
            }
        }

        #[test]
        fn np_denominator_vanishes_with_growth_rate(r in 0.0f64..3.0, c in 0.0f64..3.0, kb in 0.05f64..2.0) {
            let (l, _) = np_eigenvalues_at(r, c, kb);
            let a = meanfield::np_stability_a_at(r, c, kb);
            if a.abs() > 1e-9 {
                prop_assert_eq!(l.re < 0.0, a > 0.0);
            }
        }
    }
}
