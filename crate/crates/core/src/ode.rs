//! Adaptive Dormand-Prince 5(4) integrator for small real systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h_max: f64::INFINITY,
            max_steps: 200_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// What the observer wants after seeing an output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` and reports the state at every time in
/// `outputs` (ascending, each `>= t0`). Steps are shortened to land on the
/// output times exactly. Returns the final `(t, y)` reached.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    tol: &Tolerances,
    mut observe: O,
) -> Result<(f64, Vec<f64>, Stats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> Flow,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut stats = Stats::default();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    f(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut h = initial_step(&y, &k[0], tol);
    let mut err_prev: f64 = 1e-4;

    for &t_out in outputs {
        if t_out < t {
            return Err(Error::InvalidArgument(format!("output time {t_out} precedes {t}")));
        }
        while t < t_out {
            if stats.accepted + stats.rejected >= tol.max_steps {
                return Err(Error::InvalidArgument(format!("step limit {} reached at t = {t}", tol.max_steps)));
            }
            let mut step = h.min(tol.h_max);
            let last = t + step >= t_out;
            if last {
                step = t_out - t;
            }

            for i in 0..n {
                tmp[i] = y[i] + step * A21 * k[0][i];
            }
            f(t + C2 * step, &tmp, &mut k[1]);
            for i in 0..n {
                tmp[i] = y[i] + step * (A31 * k[0][i] + A32 * k[1][i]);
            }
            f(t + C3 * step, &tmp, &mut k[2]);
            for i in 0..n {
                tmp[i] = y[i] + step * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
            }
            f(t + C4 * step, &tmp, &mut k[3]);
            for i in 0..n {
                tmp[i] = y[i] + step * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
            }
            f(t + C5 * step, &tmp, &mut k[4]);
            for i in 0..n {
                tmp[i] = y[i]
                    + step * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
            }
            f(t + step, &tmp, &mut k[5]);
            for i in 0..n {
                y_new[i] = y[i] + step * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
            }
            f(t + step, &y_new, &mut k[6]);
            stats.evaluations += 6;

            let mut err = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite state at t = {t}")));
            }

            if err <= 1.0 {
                t = if last { t_out } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                stats.accepted += 1;
                // PI step-size control.
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                if !last {
                    h = step * fac.clamp(0.2, 10.0);
                } else {
                    h = h.max(step * fac.clamp(0.2, 10.0));
                }
                err_prev = err.max(1e-4);
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).max(0.2);
            }
        }
        if observe(t, &y) == Flow::Stop {
            break;
        }
    }
    Ok((t, y, stats))
}

fn initial_step(y: &[f64], dy: &[f64], tol: &Tolerances) -> f64 {
    let n = y.len() as f64;
    let (mut d0, mut d1) = (0.0, 0.0);
    for (yi, fi) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * yi.abs();
        d0 += (yi / sc) * (yi / sc);
        d1 += (fi / sc) * (fi / sc);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(tol.h_max)
}
