//! Mean-field dynamics: the full finite-`eta` cavity-spin equations and the
//! cavity equation obtained by adiabatic elimination of the spin.
//!
//! Time is `t_bar = omega0 t`. The state vector layout is
//! `[Re alpha, Im alpha, s_x, s_y, s_z]`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield;
use crate::numeric::linspace;
use crate::ode::{self, Flow, Stats, Tolerances};
use crate::params::RenormalizedParams;
use crate::path::Line;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalState {
    pub alpha_bar: Complex64,
    pub s_x: f64,
    pub s_y: f64,
    pub s_z: f64,
    pub t_bar: f64,
}

impl SemiclassicalState {
    pub fn to_vec(&self) -> [f64; 5] {
        [self.alpha_bar.re, self.alpha_bar.im, self.s_x, self.s_y, self.s_z]
    }

    pub fn from_slice(t_bar: f64, v: &[f64]) -> Self {
        Self {
            alpha_bar: Complex64::new(v[0], v[1]),
            s_x: v[2],
            s_y: v[3],
            s_z: v[4],
            t_bar,
        }
    }

    pub fn spin_norm_sq(&self) -> f64 {
        self.s_x * self.s_x + self.s_y * self.s_y + self.s_z * self.s_z
    }

    /// Cavity coherence with the spin slaved to it on the `sz_sign` sheet.
    pub fn slaved(alpha_bar: Complex64, p: &RenormalizedParams, sz_sign: f64) -> Self {
        let beta = p.g_r * alpha_bar.conj() + p.g_cr * alpha_bar;
        let s_z = sz_sign / (1.0 + 4.0 * beta.norm_sqr()).sqrt();
        let s_plus = -beta * s_z;
        Self {
            alpha_bar,
            s_x: 2.0 * s_plus.re,
            s_y: 2.0 * s_plus.im,
            s_z,
            t_bar: 0.0,
        }
    }
}

/// Right-hand side of the full equations of motion.
pub fn full_rhs(v: &[f64], p: &RenormalizedParams, eta: f64, out: &mut [f64]) {
    let alpha = Complex64::new(v[0], v[1]);
    let s_plus = Complex64::new(v[2], v[3]) * 0.5;
    let s_minus = s_plus.conj();
    let s_z = v[4];
    let i = Complex64::i();
    let beta = p.g_r * alpha.conj() + p.g_cr * alpha;
    let da = -i * Complex64::new(1.0, -p.kappa_bar) * alpha + i * (p.g_r * s_minus + p.g_cr * s_plus);
    let ds = eta * i * (s_plus + beta * s_z);
    let dz = 2.0 * eta * (i * (beta.conj() * s_plus - beta * s_minus)).re;
    out[0] = da.re;
    out[1] = da.im;
    out[2] = 2.0 * ds.re;
    out[3] = 2.0 * ds.im;
    out[4] = dz;
}

/// Cavity equation with the spin adiabatically eliminated on the `sz_sign` sheet.
pub fn adiabatic_rhs(alpha: Complex64, p: &RenormalizedParams, sz_sign: f64) -> Complex64 {
    let i = Complex64::i();
    let beta = p.g_r * alpha.conj() + p.g_cr * alpha;
    let drive = (p.g_r * p.g_r + p.g_cr * p.g_cr) * alpha + 2.0 * p.g_r * p.g_cr * alpha.conj();
    -i * Complex64::new(1.0, -p.kappa_bar) * alpha - i * sz_sign * drive / (1.0 + 4.0 * beta.norm_sqr()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dynamics {
    /// Full equations at frequency ratio `eta`.
    Full { eta: f64 },
    /// Adiabatic cavity equation on the given spin sheet (`-1` or `+1`).
    Adiabatic { sz_sign: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    pub tolerances: Tolerances,
    /// Number of evenly spaced output samples including both ends.
    pub samples: usize,
    /// Distance to a fixed point that counts as arrived.
    pub proximity: f64,
    /// Fraction of the run, at the end, that must stay near the fixed point.
    pub dwell_fraction: f64,
    /// Variance of `|alpha|` over the dwell window above which a non-converged
    /// run is flagged as a possible limit cycle.
    pub cycle_variance: f64,
    /// Runs stop once `|alpha|` exceeds this cap.
    pub alpha_cap: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            samples: 1001,
            proximity: 1e-4,
            dwell_fraction: 0.1,
            cycle_variance: 1e-6,
            alpha_cap: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attractor {
    #[serde(rename = "NP_down")]
    NpDown,
    #[serde(rename = "NP_up")]
    NpUp,
    #[serde(rename = "SP")]
    Sp { sign: i8 },
    Unresolved,
}

impl Attractor {
    pub fn label(&self) -> &'static str {
        match self {
            Attractor::NpDown => "NP_down",
            Attractor::NpUp => "NP_up",
            Attractor::Sp { sign: 1 } => "SP+",
            Attractor::Sp { .. } => "SP-",
            Attractor::Unresolved => "unresolved",
        }
    }

    pub fn is_np(&self) -> bool {
        matches!(self, Attractor::NpDown | Attractor::NpUp)
    }

    pub fn is_sp(&self) -> bool {
        matches!(self, Attractor::Sp { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<SemiclassicalState>,
    pub attractor: Attractor,
    /// `|alpha|` hit the cap and the run was cut short.
    pub overflow: bool,
    /// Not converged and `|alpha|` still fluctuating over the dwell window.
    pub limit_cycle_suspect: bool,
    /// Largest `| |s|^2 - 1 |` along the run (full dynamics only).
    pub max_norm_drift: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn terminal(&self) -> &SemiclassicalState {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

/// Integrates from `initial` to `t_max` and classifies the end point.
pub fn integrate(
    initial: &SemiclassicalState,
    p: &RenormalizedParams,
    dynamics: Dynamics,
    t_max: f64,
    controls: &Controls,
) -> Result<Trajectory> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    let times = linspace(initial.t_bar, initial.t_bar + t_max, controls.samples.max(2));
    let cap = controls.alpha_cap;
    let mut samples = Vec::with_capacity(times.len());
    let mut overflow = false;
    let stats: Stats;
    match dynamics {
        Dynamics::Full { eta } => {
            if !(eta > 0.0) {
                return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
            }
            let y0 = initial.to_vec();
            let out = ode::integrate(
                |_, y, dy| full_rhs(y, p, eta, dy),
                times[0],
                &y0,
                &times,
                &controls.tolerances,
                |t, y| {
                    samples.push(SemiclassicalState::from_slice(t, y));
                    if y[0].hypot(y[1]) > cap {
                        overflow = true;
                        Flow::Stop
                    } else {
                        Flow::Continue
                    }
                },
            )?;
            stats = out.2;
        }
        Dynamics::Adiabatic { sz_sign } => {
            let y0 = [initial.alpha_bar.re, initial.alpha_bar.im];
            let out = ode::integrate(
                |_, y, dy| {
                    let d = adiabatic_rhs(Complex64::new(y[0], y[1]), p, sz_sign);
                    dy[0] = d.re;
                    dy[1] = d.im;
                },
                times[0],
                &y0,
                &times,
                &controls.tolerances,
                |t, y| {
                    let mut s = SemiclassicalState::slaved(Complex64::new(y[0], y[1]), p, sz_sign);
                    s.t_bar = t;
                    samples.push(s);
                    if y[0].hypot(y[1]) > cap {
                        overflow = true;
                        Flow::Stop
                    } else {
                        Flow::Continue
                    }
                },
            )?;
            stats = out.2;
        }
    }

    let max_norm_drift = samples
        .iter()
        .map(|s| (s.spin_norm_sq() - 1.0).abs())
        .fold(0.0, f64::max);
    let (attractor, limit_cycle_suspect) = if overflow {
        (Attractor::Unresolved, false)
    } else {
        classify(&samples, p, controls)
    };
    Ok(Trajectory {
        samples,
        attractor,
        overflow,
        limit_cycle_suspect,
        max_norm_drift,
        steps: stats.accepted,
    })
}

/// Known fixed points as `(attractor, alpha, s_z)`.
fn fixed_points(p: &RenormalizedParams) -> Vec<(Attractor, Complex64, f64)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![(Attractor::NpDown, zero, -1.0), (Attractor::NpUp, zero, 1.0)];
    for sign in [1i8, -1] {
        if let Ok(s) = meanfield::sp_solution_at(p, sign) {
            v.push((Attractor::Sp { sign }, s.alpha_bar, s.s_z));
        }
    }
    v
}

/// The attractor is decided on the cavity coherence and the sheet of `s_z`;
/// the fast spin precession of the full dynamics never settles completely.
fn classify(samples: &[SemiclassicalState], p: &RenormalizedParams, c: &Controls) -> (Attractor, bool) {
    let n = samples.len();
    let start = ((1.0 - c.dwell_fraction) * (n - 1) as f64).floor() as usize;
    let window = &samples[start.min(n - 1)..];
    let candidates = fixed_points(p);
    for (att, alpha, s_z) in &candidates {
        let near = window
            .iter()
            .all(|s| (s.alpha_bar - alpha).norm() < c.proximity && s.s_z.signum() == s_z.signum());
        if near {
            return (*att, false);
        }
    }
    let mags: Vec<f64> = window.iter().map(|s| s.alpha_bar.norm()).collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    let var = mags.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / mags.len() as f64;
    (Attractor::Unresolved, var > c.cycle_variance)
}

/// Random cavity coherence in the disk `|alpha| <= radius`, with the spin
/// slaved on the lower sheet.
pub fn sample_initial<R: Rng>(rng: &mut R, p: &RenormalizedParams, radius: f64) -> SemiclassicalState {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    SemiclassicalState::slaved(Complex64::from_polar(r, phi), p, -1.0)
}

/// Jacobian of the full dynamics in the coordinates `(Re alpha, Im alpha, s_x, s_y)`,
/// with `s_z` eliminated through the spin norm on the sheet of `state.s_z`.
pub fn reduced_jacobian(state: &SemiclassicalState, p: &RenormalizedParams, eta: f64) -> Matrix4<f64> {
    let sheet = state.s_z.signum();
    let f = |x: &[f64; 4]| {
        let s_z = sheet * (1.0 - x[2] * x[2] - x[3] * x[3]).max(0.0).sqrt();
        let mut out = [0.0; 5];
        full_rhs(&[x[0], x[1], x[2], x[3], s_z], p, eta, &mut out);
        [out[0], out[1], out[2], out[3]]
    };
    let x0 = [state.alpha_bar.re, state.alpha_bar.im, state.s_x, state.s_y];
    let mut j = Matrix4::zeros();
    for c in 0..4 {
        let h = 1e-6 * x0[c].abs().max(1e-3);
        let (mut xp, mut xm) = (x0, x0);
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..4 {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HysteresisPoint {
    pub t: f64,
    pub abs_alpha: f64,
    pub attractor: Attractor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hysteresis {
    pub forward: Vec<HysteresisPoint>,
    pub backward: Vec<HysteresisPoint>,
}

/// Quasi-static sweep of the adiabatic dynamics along `line` over the
/// ascending parameter values `ts`, then back down. Each point starts from the
/// previous end state; a `kick` is added to a vanishing coherence so that an
/// unstable normal state can be left.
pub fn hysteresis_scan(
    line: &Line,
    kappa_bar: f64,
    ts: &[f64],
    t_per_point: f64,
    kick: f64,
    controls: &Controls,
) -> Result<Hysteresis> {
    let mut alpha = Complex64::new(kick, kick);
    let run = |order: &mut dyn Iterator<Item = &f64>, alpha: &mut Complex64| -> Result<Vec<HysteresisPoint>> {
        let mut out = Vec::new();
        for &t in order {
            let (g_r, g_cr) = line.point(t);
            let p = RenormalizedParams::new(g_r, g_cr, kappa_bar);
            if alpha.norm() < kick {
                *alpha = Complex64::new(kick, kick);
            }
            let start = SemiclassicalState::slaved(*alpha, &p, -1.0);
            let traj = integrate(&start, &p, Dynamics::Adiabatic { sz_sign: -1.0 }, t_per_point, controls)?;
            *alpha = traj.terminal().alpha_bar;
            out.push(HysteresisPoint {
                t,
                abs_alpha: alpha.norm(),
                attractor: traj.attractor,
            });
        }
        Ok(out)
    };
    let forward = run(&mut ts.iter(), &mut alpha)?;
    let mut backward = run(&mut ts.iter().rev(), &mut alpha)?;
    backward.reverse();
    Ok(Hysteresis { forward, backward })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuations;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const KB: f64 = 0.5;

    fn rhs(s: &SemiclassicalState, p: &RenormalizedParams, eta: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        full_rhs(&s.to_vec(), p, eta, &mut out);
        out
    }

    #[test]
    fn normal_state_is_fixed() {
        let p = RenormalizedParams::new(0.7, 1.3, KB);
        let s = SemiclassicalState::slaved(Complex64::new(0.0, 0.0), &p, -1.0);
        assert_eq!(s.s_z, -1.0);
        assert!(rhs(&s, &p, 100.0).iter().all(|d| *d == 0.0));
    }

    #[test]
    fn superradiant_state_is_fixed() {
        let p = RenormalizedParams::from_polar(1.0, 0.5, KB);
        let sol = meanfield::sp_solution_at(&p, 1).unwrap();
        let s = SemiclassicalState {
            alpha_bar: sol.alpha_bar,
            s_x: sol.s_x,
            s_y: sol.s_y,
            s_z: sol.s_z,
            t_bar: 0.0,
        };
        let d = rhs(&s, &p, 1e4);
        assert!(d.iter().all(|x| x.abs() < 1e-6), "{d:?}");
        assert!(adiabatic_rhs(sol.alpha_bar, &p, -1.0).norm() < 1e-10);
    }

    #[test]
    fn rhs_conserves_spin_norm() {
        let p = RenormalizedParams::new(0.8, 1.9, KB);
        let mut s = SemiclassicalState::slaved(Complex64::new(0.2, -0.7), &p, -1.0);
        s.s_x += 0.1;
        let d = rhs(&s, &p, 50.0);
        let dn = 2.0 * (s.s_x * d[2] + s.s_y * d[3] + s.s_z * d[4]);
        assert_abs_diff_eq!(dn, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn slaved_spin_reference() {
        let p = RenormalizedParams::new(0.3, 2.0, KB);
        let s = SemiclassicalState::slaved(Complex64::new(0.3, 0.3), &p, -1.0);
        assert_abs_diff_eq!(s.s_x, 0.69, epsilon = 0.01);
        assert_abs_diff_eq!(s.s_y, 0.51, epsilon = 0.01);
        assert_abs_diff_eq!(s.s_z, -0.50, epsilon = 0.01);
        assert_abs_diff_eq!(s.spin_norm_sq(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn decoupled_oscillator_decays() {
        let p = RenormalizedParams::new(0.0, 0.0, KB);
        let a0 = Complex64::new(0.4, -0.2);
        let start = SemiclassicalState::slaved(a0, &p, -1.0);
        let c = Controls {
            samples: 11,
            ..Controls::default()
        };
        let tr = integrate(&start, &p, Dynamics::Full { eta: 10.0 }, 1.0, &c).unwrap();
        let want = a0 * Complex64::new(-KB, -1.0).exp();
        assert!((tr.terminal().alpha_bar - want).norm() < 1e-8);
    }

    #[test]
    fn adiabatic_linearization_is_np_matrix() {
        let p = RenormalizedParams::new(0.37, 0.81, KB);
        let h = 1e-6;
        let d_re = (adiabatic_rhs(Complex64::new(h, 0.0), &p, -1.0) - adiabatic_rhs(Complex64::new(-h, 0.0), &p, -1.0))
            / (2.0 * h);
        let d_im = (adiabatic_rhs(Complex64::new(0.0, h), &p, -1.0) - adiabatic_rhs(Complex64::new(0.0, -h), &p, -1.0))
            / (2.0 * h);
        // Wirtinger derivatives: d/dalpha and d/dalpha*.
        let i = Complex64::i();
        let d_a = 0.5 * (d_re - i * d_im);
        let d_ac = 0.5 * (d_re + i * d_im);
        let l = fluctuations::np_matrix(p.g_r, p.g_cr, KB);
        assert!((d_a - l[(0, 0)]).norm() < 1e-8);
        assert!((d_ac - l[(0, 1)]).norm() < 1e-8);
    }

    #[test]
    fn stability_matches_full_jacobian() {
        // Sign of A against the largest real part of the slow modes at large eta.
        let eta = 1e6;
        let mut checked = 0;
        for gr in [0.2, 0.6, 1.0, 1.4, 1.8, 2.2] {
            for gcr in [0.3, 0.7, 1.1, 1.5, 1.9, 2.3] {
                let p = RenormalizedParams::new(gr, gcr, KB);
                let pt = meanfield::classify_phase(gr, gcr, KB);
                let mut sols = vec![pt.np_down];
                sols.extend(pt.sp);
                sols.extend(meanfield::sp_plus_branch_at(&p, 1).ok());
                for sol in sols {
                    if sol.stability_a.abs() < 1e-3 {
                        continue;
                    }
                    let s = SemiclassicalState {
                        alpha_bar: sol.alpha_bar,
                        s_x: sol.s_x,
                        s_y: sol.s_y,
                        s_z: sol.s_z,
                        t_bar: 0.0,
                    };
                    let j = reduced_jacobian(&s, &p, eta);
                    let ev = j.complex_eigenvalues();
                    let slow = ev.iter().filter(|z| z.norm() < 1e3).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                    assert_eq!(slow < 0.0, sol.stability_a > 0.0, "({gr}, {gcr}) {:?}: {ev}", sol.branch);
                    checked += 1;
                }
            }
        }
        assert!(checked > 40);
    }

    #[test]
    fn sampled_initial_states_lie_in_disk() {
        let p = RenormalizedParams::new(1.0, 2.1, KB);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = sample_initial(&mut rng, &p, 0.5);
            assert!(s.alpha_bar.norm() <= 0.5);
            assert!(s.s_z < 0.0);
        }
    }
}
