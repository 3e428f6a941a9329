//! Mean-field steady states in the limit `eta -> inf`, their linear
//! stability and the resulting phase diagram.
//!
//! Internally everything is written in the canonical coordinates
//! `(g_r, g_cr)` with `a = g_r + g_cr` and `b = g_r - g_cr`. The closed forms
//! are rationalized so that the symmetric point `g_r = g_cr` and the anti-JC
//! axis `g_r = 0` need no special casing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bracket_roots;
use crate::params::RenormalizedParams;
use crate::path::Line;

/// Half-width of the band around `A = 0` that is labelled marginal.
pub const STABILITY_TOL: f64 = 1e-12;

/// Half-width of the band around `epsilon = 1` where `g_c+` is reported as infinite.
pub const SYMMETRIC_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    NpDown,
    NpUp,
    /// Physical superradiant branch `s_z-`; `sign` is the sign of `Re(alpha)`.
    SpMinus { sign: i8 },
    /// Second root `s_z+`, unstable wherever it is physical.
    SpPlus { sign: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn from_a(a: f64) -> Self {
        if a > STABILITY_TOL {
            Stability::Stable
        } else if a < -STABILITY_TOL {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldSolution {
    pub alpha_bar: Complex64,
    pub s_x: f64,
    pub s_y: f64,
    pub s_z: f64,
    pub branch: Branch,
    pub stable: bool,
    pub stability_a: f64,
    pub stability_b: f64,
}

impl MeanFieldSolution {
    fn build(alpha_bar: Complex64, s_x: f64, s_y: f64, s_z: f64, branch: Branch, p: &RenormalizedParams) -> Self {
        let (a, b) = stability_ab(alpha_bar, s_z, p);
        Self {
            alpha_bar,
            s_x,
            s_y,
            s_z,
            branch,
            stable: Stability::from_a(a) == Stability::Stable,
            stability_a: a,
            stability_b: b,
        }
    }

    pub fn stability(&self) -> Stability {
        Stability::from_a(self.stability_a)
    }

    pub fn spin_norm_sq(&self) -> f64 {
        self.s_x * self.s_x + self.s_y * self.s_y + self.s_z * self.s_z
    }

    /// `s_+ = (s_x + i s_y) / 2`.
    pub fn s_plus(&self) -> Complex64 {
        Complex64::new(self.s_x, self.s_y) * 0.5
    }

    /// Eigenvalues `mu / omega0 = -kappa_bar ± sqrt(kappa_bar^2 - A/B)` of the
    /// reduced cavity dynamics.
    pub fn mu(&self, kappa_bar: f64) -> (Complex64, Complex64) {
        let r = Complex64::new(kappa_bar * kappa_bar - self.stability_a / self.stability_b, 0.0).sqrt();
        (-kappa_bar + r, -kappa_bar - r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "NP")]
    Np,
    #[serde(rename = "SP")]
    Sp,
    Bistable,
    /// Some solution has `|A| <= STABILITY_TOL`.
    #[serde(rename = "boundary")]
    Boundary,
    /// No stable solution at all; not expected for physical parameters.
    #[serde(rename = "none")]
    Unstable,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::Np => "NP",
            Phase::Sp => "SP",
            Phase::Bistable => "Bistable",
            Phase::Boundary => "boundary",
            Phase::Unstable => "none",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub g_r: f64,
    pub g_cr: f64,
    pub kappa_bar: f64,
    pub phase: Phase,
    /// Stable solutions (NP down and/or both SP signs).
    pub solutions: Vec<MeanFieldSolution>,
    pub np_down: MeanFieldSolution,
    /// Reported but never part of the label.
    pub np_up: MeanFieldSolution,
    /// SP solution with positive `Re(alpha)`, when it exists.
    pub sp: Option<MeanFieldSolution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBoundaries {
    pub g_c_minus: Option<f64>,
    pub g_c_plus: Option<f64>,
    pub epsilon_min: f64,
    pub epsilon_max: f64,
    pub tricritical: [(f64, f64); 2],
}

/// Discriminant `g^4 [4 eps^2 - kb^2 (1 - eps^2)^2]` in coupling coordinates.
fn discriminant(p: &RenormalizedParams) -> f64 {
    let (r2, c2) = (p.g_r * p.g_r, p.g_cr * p.g_cr);
    4.0 * r2 * c2 - p.kappa_bar * p.kappa_bar * (r2 - c2) * (r2 - c2)
}

fn no_solution(p: &RenormalizedParams) -> Error {
    Error::NoSolution {
        g: p.g,
        epsilon: p.epsilon,
        kappa_bar: p.kappa_bar,
    }
}

/// Both roots `(s_z-, s_z+)` of the fixed-point condition, without range checks.
fn spin_z_roots(p: &RenormalizedParams) -> Option<(f64, f64)> {
    let d = discriminant(p);
    if d < 0.0 || !d.is_finite() {
        return None;
    }
    let sum = p.g_r * p.g_r + p.g_cr * p.g_cr;
    let num = 1.0 + p.kappa_bar * p.kappa_bar;
    let root = d.sqrt();
    Some((-num / (sum + root), -num / (sum - root)))
}

/// `s_z` of the physical SP branch.
pub fn spin_z_minus(p: &RenormalizedParams) -> Result<f64> {
    match spin_z_roots(p) {
        Some((sz, _)) if sz > -1.0 && sz < 0.0 => Ok(sz),
        _ => Err(no_solution(p)),
    }
}

/// `s_z` of the second (unstable) SP branch.
pub fn spin_z_plus(p: &RenormalizedParams) -> Result<f64> {
    match spin_z_roots(p) {
        Some((_, sz)) if sz > -1.0 && sz < 0.0 => Ok(sz),
        _ => Err(no_solution(p)),
    }
}

/// `s_z` of the SP branch at `(g, epsilon, kappa_bar)`.
///
/// The rationalized form is exact at `epsilon = 1`, where it reduces to
/// `-(1 + kb^2) / (4 g^2)`.
pub fn sp_spin_z(g: f64, epsilon: f64, kappa_bar: f64) -> Result<f64> {
    spin_z_minus(&RenormalizedParams::from_polar(g, epsilon, kappa_bar))
}

/// Fixed point on the branch with spin `s_z`; `sign` picks `sign(Re alpha)`.
fn fixed_point(p: &RenormalizedParams, s_z: f64, sign: f64) -> (Complex64, f64, f64) {
    let a = p.g_r + p.g_cr;
    let b = p.g_r - p.g_cr;
    let (a2, b2) = (a * a, b * b);
    let kb = p.kappa_bar;
    let fa = 1.0 + a2 * s_z;
    let fb = 1.0 + b2 * s_z;
    let pre = (1.0 - s_z * s_z) / (4.0 * s_z * s_z);
    // (1 + a^2 s_z) x = -kb y and (1 + b^2 s_z) y = kb x; divide by the larger factor.
    let (x, y) = if fb.abs() >= fa.abs() {
        let x = sign * (pre / (a2 + kb * kb * b2 / (fb * fb))).sqrt();
        (x, kb * x / fb)
    } else {
        let y = sign * (pre / (b2 + kb * kb * a2 / (fa * fa))).sqrt();
        (-kb * y / fa, y)
    };
    let s_x = -2.0 * a * x * s_z;
    let s_y = 2.0 * b * y * s_z;
    (Complex64::new(x, y), s_x, s_y)
}

fn sign_of(sign: i8) -> Result<f64> {
    match sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::InvalidArgument(format!("branch sign must be ±1, got {sign}"))),
    }
}

/// Stable-branch SP solution at the coupling point `p`.
pub fn sp_solution_at(p: &RenormalizedParams, sign: i8) -> Result<MeanFieldSolution> {
    let s = sign_of(sign)?;
    let s_z = spin_z_minus(p)?;
    let (alpha, s_x, s_y) = fixed_point(p, s_z, s);
    Ok(MeanFieldSolution::build(alpha, s_x, s_y, s_z, Branch::SpMinus { sign }, p))
}

pub fn sp_solution(g: f64, epsilon: f64, kappa_bar: f64, sign: i8) -> Result<MeanFieldSolution> {
    sp_solution_at(&RenormalizedParams::from_polar(g, epsilon, kappa_bar), sign)
}

pub fn sp_plus_branch_at(p: &RenormalizedParams, sign: i8) -> Result<MeanFieldSolution> {
    let s = sign_of(sign)?;
    let s_z = spin_z_plus(p)?;
    let (alpha, s_x, s_y) = fixed_point(p, s_z, s);
    Ok(MeanFieldSolution::build(alpha, s_x, s_y, s_z, Branch::SpPlus { sign }, p))
}

pub fn sp_plus_branch(g: f64, epsilon: f64, kappa_bar: f64) -> Result<MeanFieldSolution> {
    sp_plus_branch_at(&RenormalizedParams::from_polar(g, epsilon, kappa_bar), 1)
}

/// Normal-phase solution with the spin down (`up = false`) or up.
pub fn np_solution(p: &RenormalizedParams, up: bool) -> MeanFieldSolution {
    let (s_z, branch) = if up { (1.0, Branch::NpUp) } else { (-1.0, Branch::NpDown) };
    MeanFieldSolution::build(Complex64::new(0.0, 0.0), 0.0, 0.0, s_z, branch, p)
}

fn stability_ab(alpha: Complex64, s_z: f64, p: &RenormalizedParams) -> (f64, f64) {
    let a2 = (p.g_r + p.g_cr).powi(2);
    let b2 = (p.g_r - p.g_cr).powi(2);
    let kb2 = p.kappa_bar * p.kappa_bar;
    let sum = p.g_r * p.g_r + p.g_cr * p.g_cr;
    let diff = p.g_r * p.g_r - p.g_cr * p.g_cr;
    let (x2, y2) = (alpha.re * alpha.re, alpha.im * alpha.im);
    let w = b2 * y2 + a2 * x2;
    let a = 1.0 + kb2 + 4.0 * (1.0 + kb2) * w + 2.0 * sum * s_z + diff * diff * (s_z * s_z + 4.0 * s_z * (x2 + y2));
    let b = 1.0 + 4.0 * w;
    (a, b)
}

/// Stability coefficients `(A, B)`; the fixed point is stable iff `A > 0`.
pub fn stability_coefficients(sol: &MeanFieldSolution, p: &RenormalizedParams) -> (f64, f64) {
    stability_ab(sol.alpha_bar, sol.s_z, p)
}

/// Max-norm residual of the three steady-state equations.
pub fn fixed_point_residual(sol: &MeanFieldSolution, p: &RenormalizedParams) -> f64 {
    let alpha = sol.alpha_bar;
    let sp = sol.s_plus();
    let beta = p.g_r * alpha.conj() + p.g_cr * alpha;
    let r1 = -(Complex64::new(1.0, -p.kappa_bar)) * alpha + p.g_r * sp.conj() + p.g_cr * sp;
    let r2 = sp + beta * sol.s_z;
    let r3 = (beta.conj() * sp).im;
    r1.norm().max(r2.norm()).max(r3.abs())
}

/// `A_NP = 1 + kb^2 - 2 (g_r^2 + g_cr^2) + (g_r^2 - g_cr^2)^2`.
pub fn np_stability_a_at(g_r: f64, g_cr: f64, kappa_bar: f64) -> f64 {
    let (r2, c2) = (g_r * g_r, g_cr * g_cr);
    1.0 + kappa_bar * kappa_bar - 2.0 * (r2 + c2) + (r2 - c2) * (r2 - c2)
}

pub fn np_stability_a(g: f64, epsilon: f64, kappa_bar: f64) -> f64 {
    np_stability_a_at(g, epsilon * g, kappa_bar)
}

/// Anisotropy window `(epsilon_min, epsilon_max)` in which an SP can exist.
pub fn epsilon_bounds(kappa_bar: f64) -> (f64, f64) {
    if kappa_bar <= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let r = (1.0 + kappa_bar * kappa_bar).sqrt();
    // epsilon_min = (r - 1)/kb written without cancellation.
    (kappa_bar / (r + 1.0), (1.0 + r) / kappa_bar)
}

/// Critical couplings `(g_c-, g_c+)` along the ray of anisotropy `epsilon`.
///
/// `g_c+` is `+inf` within [`SYMMETRIC_BAND`] of `epsilon = 1`; `None` outside
/// the anisotropy window.
pub fn critical_couplings(epsilon: f64, kappa_bar: f64) -> Option<(f64, f64)> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return None;
    }
    let e2 = epsilon * epsilon;
    let one_m = 1.0 - e2;
    let d = 4.0 * e2 - kappa_bar * kappa_bar * one_m * one_m;
    if d < 0.0 {
        return None;
    }
    let top = 1.0 + e2 + d.sqrt();
    let g_minus = ((1.0 + kappa_bar * kappa_bar) / top).sqrt();
    let g_plus = if (epsilon - 1.0).abs() < SYMMETRIC_BAND {
        f64::INFINITY
    } else {
        top.sqrt() / one_m.abs()
    };
    Some((g_minus, g_plus))
}

/// The two points where the second-order boundary meets the lines
/// `g_cr = epsilon_min g_r` and `g_cr = epsilon_max g_r`.
pub fn tricritical_points(kappa_bar: f64) -> [(f64, f64); 2] {
    let (lo, hi) = epsilon_bounds(kappa_bar);
    let at = |e: f64| {
        let g = (1.0 + e * e).sqrt() / (1.0 - e * e).abs();
        (g, e * g)
    };
    [at(lo), at(hi)]
}

pub fn phase_boundaries(epsilon: f64, kappa_bar: f64) -> PhaseBoundaries {
    let (epsilon_min, epsilon_max) = epsilon_bounds(kappa_bar);
    let cc = critical_couplings(epsilon, kappa_bar);
    PhaseBoundaries {
        g_c_minus: cc.map(|c| c.0),
        g_c_plus: cc.map(|c| c.1).filter(|g| g.is_finite()),
        epsilon_min,
        epsilon_max,
        tricritical: tricritical_points(kappa_bar),
    }
}

pub fn classify_phase(g_r: f64, g_cr: f64, kappa_bar: f64) -> PhasePoint {
    let p = RenormalizedParams::new(g_r, g_cr, kappa_bar);
    let np_down = np_solution(&p, false);
    let np_up = np_solution(&p, true);
    let sp = sp_solution_at(&p, 1).ok();

    let np_state = np_down.stability();
    let sp_state = sp.map(|s| s.stability());
    let mut solutions = Vec::new();
    if np_state == Stability::Stable {
        solutions.push(np_down);
    }
    if let Some(s) = sp.filter(|s| s.stable) {
        solutions.push(s);
        let mut mirror = s;
        mirror.alpha_bar = -s.alpha_bar;
        mirror.s_x = -s.s_x;
        mirror.s_y = -s.s_y;
        mirror.branch = Branch::SpMinus { sign: -1 };
        solutions.push(mirror);
    }

    let phase = if np_state == Stability::Marginal || sp_state == Some(Stability::Marginal) {
        Phase::Boundary
    } else {
        match (np_state == Stability::Stable, sp_state == Some(Stability::Stable)) {
            (true, false) => Phase::Np,
            (false, true) => Phase::Sp,
            (true, true) => Phase::Bistable,
            (false, false) => Phase::Unstable,
        }
    };

    PhasePoint {
        g_r,
        g_cr,
        kappa_bar,
        phase,
        solutions,
        np_down,
        np_up,
        sp,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LandmarkKind {
    /// `A_NP` changes sign.
    NpBoundary,
    /// The line leaves the anisotropy window, where the SP ceases to exist.
    SpExistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub t: f64,
    pub g_r: f64,
    pub g_cr: f64,
    pub kind: LandmarkKind,
}

/// Phase-boundary crossings along `line` for `t` in `[t_lo, t_hi]`, in order.
pub fn line_landmarks(line: &Line, kappa_bar: f64, t_lo: f64, t_hi: f64) -> Vec<Landmark> {
    const SAMPLES: usize = 4000;
    let mut out = Vec::new();
    let mk = |t: f64, kind| {
        let (g_r, g_cr) = line.point(t);
        Landmark { t, g_r, g_cr, kind }
    };
    let a_np = |t: f64| {
        let (r, c) = line.point(t);
        np_stability_a_at(r, c, kappa_bar)
    };
    for t in bracket_roots(a_np, t_lo, t_hi, SAMPLES, 1e-15) {
        out.push(mk(t, LandmarkKind::NpBoundary));
    }
    let disc = |t: f64| {
        let (r, c) = line.point(t);
        discriminant(&RenormalizedParams::new(r, c, kappa_bar))
    };
    for t in bracket_roots(disc, t_lo, t_hi, SAMPLES, 1e-15) {
        // Only crossings where the SP really appears or disappears.
        let h = 1e-7 * t.abs().max(1.0);
        let exists = |t: f64| {
            let (r, c) = line.point(t);
            spin_z_minus(&RenormalizedParams::new(r, c, kappa_bar)).is_ok()
        };
        if exists(t - h) != exists(t + h) {
            out.push(mk(t, LandmarkKind::SpExistence));
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    out
}
