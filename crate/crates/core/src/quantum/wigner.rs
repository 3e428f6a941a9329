//! Wigner function of an oscillator density matrix.
//!
//! Convention: `W(alpha) = (2/pi) Tr[D(alpha)^dag rho D(alpha) Pi]` with `Pi`
//! the photon parity, so the vacuum peaks at `2/pi` and `W` integrates to
//! `Tr rho` over the complex plane `d^2 alpha`.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::linspace;

/// Default modality threshold relative to the global maximum.
pub const PEAK_FRACTION: f64 = 0.1;
/// Minimum drop from a peak to the saddle joining it to a higher peak,
/// relative to the global maximum. Suppresses grid aliasing on narrow ridges.
pub const PROMINENCE_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn square(extent: f64, n: usize) -> Self {
        Self {
            re_min: -extent,
            re_max: extent,
            im_min: -extent,
            im_max: extent,
            nx: n,
            ny: n,
        }
    }

    /// Square grid reaching `sqrt(<n> + 3 sd(n)) + 2.5` from the photon
    /// statistics of `rho_osc`, so distant lobes of mixtures stay inside.
    pub fn auto(rho_osc: &DMatrix<Complex64>, n: usize) -> Self {
        let pops: Vec<f64> = (0..rho_osc.nrows()).map(|m| rho_osc[(m, m)].re.max(0.0)).collect();
        let norm: f64 = pops.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let mean: f64 = pops.iter().enumerate().map(|(m, p)| m as f64 * p).sum::<f64>() / norm;
        let var: f64 = pops.iter().enumerate().map(|(m, p)| (m as f64 - mean).powi(2) * p).sum::<f64>() / norm;
        Self::square((mean + 3.0 * var.sqrt()).sqrt() + 2.5, n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[(iy, ix)]`.
    pub values: DMatrix<f64>,
}

/// Evaluates `W` at every grid point.
pub fn wigner(rho_osc: &DMatrix<Complex64>, grid: &Grid) -> Result<WignerGrid> {
    if rho_osc.nrows() != rho_osc.ncols() {
        return Err(Error::DimensionMismatch {
            expected: rho_osc.nrows(),
            found: rho_osc.ncols(),
        });
    }
    if grid.nx < 2 || grid.ny < 2 {
        return Err(Error::InvalidArgument("Wigner grid needs at least 2 points per axis".into()));
    }
    let re_axis = linspace(grid.re_min, grid.re_max, grid.nx);
    let im_axis = linspace(grid.im_min, grid.im_max, grid.ny);
    let m = effective_dim(rho_osc);
    let mut log_fact = vec![0.0; m.max(1)];
    for k in 1..m {
        log_fact[k] = log_fact[k - 1] + (k as f64).ln();
    }
    let values = DMatrix::from_fn(grid.ny, grid.nx, |iy, ix| {
        wigner_point(rho_osc, m, Complex64::new(re_axis[ix], im_axis[iy]), &log_fact)
    });
    Ok(WignerGrid {
        re_axis,
        im_axis,
        values,
    })
}

/// Drops trailing Fock levels whose rows and columns are exactly zero.
fn effective_dim(rho: &DMatrix<Complex64>) -> usize {
    let mut m = rho.nrows();
    while m > 1 && (0..rho.nrows()).all(|j| rho[(m - 1, j)] == Complex64::new(0.0, 0.0) && rho[(j, m - 1)] == Complex64::new(0.0, 0.0)) {
        m -= 1;
    }
    m
}

/// `W(alpha) = (2/pi) [sum_j rho_jj (-1)^j f_j^0(x)
///   + 2 Re sum_{m>0} e^{i m theta} sum_j rho_{j,j+m} (-1)^j f_j^m(x)]`
/// with `x = 4|alpha|^2`, `theta = arg alpha`, and the normalized Laguerre
/// functions `f_j^m(x) = sqrt(j!/(j+m)!) x^{m/2} e^{-x/2} L_j^m(x)`, which are
/// bounded by 1. The forward recurrence in `j` keeps round-off in `rho` from
/// being amplified at large `|alpha|`.
fn wigner_point(rho: &DMatrix<Complex64>, m_dim: usize, alpha: Complex64, log_fact: &[f64]) -> f64 {
    let x = 4.0 * alpha.norm_sqr();
    let theta = alpha.arg();
    let ln_x = x.ln();
    let mut total = 0.0;
    for m in 0..m_dim {
        // f_0^m = x^{m/2} e^{-x/2} / sqrt(m!)
        let ln_f0 = if m == 0 { -0.5 * x } else { 0.5 * m as f64 * ln_x - 0.5 * x - 0.5 * log_fact[m] };
        let mut f_prev = 0.0;
        let mut f = ln_f0.exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        let mf = m as f64;
        for j in 0..m_dim - m {
            if j > 0 {
                let jf = j as f64;
                let next = ((2.0 * jf - 1.0 + mf - x) * f - ((jf - 1.0) * (jf + mf - 1.0)).sqrt() * f_prev)
                    / (jf * (jf + mf)).sqrt();
                f_prev = f;
                f = next;
            }
            acc += rho[(j, j + m)] * (sign * f);
            sign = -sign;
        }
        if m == 0 {
            total += acc.re;
        } else {
            total += 2.0 * (acc * Complex64::from_polar(1.0, mf * theta)).re;
        }
    }
    2.0 / std::f64::consts::PI * total
}

impl WignerGrid {
    pub fn dx(&self) -> f64 {
        self.re_axis[1] - self.re_axis[0]
    }

    pub fn dy(&self) -> f64 {
        self.im_axis[1] - self.im_axis[0]
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        let (ny, nx) = self.values.shape();
        let mut s = 0.0;
        for iy in 0..ny {
            let wy = if iy == 0 || iy == ny - 1 { 0.5 } else { 1.0 };
            for ix in 0..nx {
                let wx = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
                s += wx * wy * self.values[(iy, ix)];
            }
        }
        s * self.dx() * self.dy()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    /// Interior grid points that exceed all eight neighbours and
    /// `fraction * max`, as `(re, im, w)` sorted by descending `w`.
    pub fn local_maxima(&self, fraction: f64) -> Vec<(f64, f64, f64)> {
        let (ny, nx) = self.values.shape();
        let floor = fraction * self.max();
        let mut out = Vec::new();
        for iy in 1..ny.saturating_sub(1) {
            for ix in 1..nx.saturating_sub(1) {
                let v = self.values[(iy, ix)];
                if v > floor && self.neighbours(iy, ix).all(|(jy, jx)| v > self.values[(jy, jx)]) {
                    out.push((self.re_axis[ix], self.im_axis[iy], v));
                }
            }
        }
        out.sort_by(|a, b| b.2.total_cmp(&a.2));
        out
    }

    fn neighbours(&self, iy: usize, ix: usize) -> impl Iterator<Item = (usize, usize)> {
        let (ny, nx) = self.values.shape();
        (-1i64..=1)
            .flat_map(move |dy| (-1i64..=1).map(move |dx| (iy as i64 + dy, ix as i64 + dx)))
            .filter(move |&(y, x)| (y, x) != (iy as i64, ix as i64) && y >= 0 && x >= 0 && y < ny as i64 && x < nx as i64)
            .map(|(y, x)| (y as usize, x as usize))
    }

    /// Peaks by topographic prominence: a flood from the top down merges
    /// regions at saddles; a peak survives when it is above `fraction * max`,
    /// off the grid edge, and at least `prominence * max` above the saddle
    /// that joins it to a higher peak. Returns `(re, im, w, prominence)`
    /// sorted by descending `w`.
    pub fn peaks(&self, fraction: f64, prominence: f64) -> Vec<(f64, f64, f64, f64)> {
        let (ny, nx) = self.values.shape();
        let top = self.max();
        let flat = |iy: usize, ix: usize| iy * nx + ix;
        let mut order: Vec<(usize, usize)> = (0..ny).flat_map(|iy| (0..nx).map(move |ix| (iy, ix))).collect();
        order.sort_by(|a, b| self.values[*b].total_cmp(&self.values[*a]));

        let mut parent: Vec<usize> = (0..ny * nx).collect();
        let mut active = vec![false; ny * nx];
        // Roots are always the first, hence highest, point of their region.
        let summit = |r: usize| (r / nx, r % nx);
        let mut prom: Vec<Option<f64>> = vec![None; ny * nx];
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }

        for &(iy, ix) in &order {
            let here = flat(iy, ix);
            let level = self.values[(iy, ix)];
            active[here] = true;
            let mut roots: Vec<usize> = self
                .neighbours(iy, ix)
                .filter(|&(jy, jx)| active[flat(jy, jx)])
                .map(|(jy, jx)| find(&mut parent, flat(jy, jx)))
                .collect();
            roots.sort_unstable();
            roots.dedup();
            if roots.is_empty() {
                continue;
            }
            let best = *roots.iter().max_by(|&&a, &&b| self.values[summit(a)].total_cmp(&self.values[summit(b)])).unwrap();
            for &r in &roots {
                if r != best {
                    prom[r] = Some(self.values[summit(r)] - level);
                    parent[r] = best;
                }
            }
            parent[here] = best;
        }

        // The surviving root never merged into a higher region.
        let apex = find(&mut parent, 0);
        prom[apex] = Some(top - self.min());
        let mut out = Vec::new();
        for iy in 1..ny.saturating_sub(1) {
            for ix in 1..nx.saturating_sub(1) {
                let v = self.values[(iy, ix)];
                if let Some(p) = prom[flat(iy, ix)] {
                    if v > fraction * top && p >= prominence * top {
                        out.push((self.re_axis[ix], self.im_axis[iy], v, p));
                    }
                }
            }
        }
        out.sort_by(|a, b| b.2.total_cmp(&a.2));
        out
    }

    /// Number of prominent peaks with the default thresholds.
    pub fn modality(&self) -> usize {
        self.peaks(PEAK_FRACTION, PROMINENCE_FRACTION).len()
    }

    /// Largest `|W(x, y) - W(-x, -y)|` on a grid symmetric about the origin.
    pub fn inversion_asymmetry(&self) -> f64 {
        let (ny, nx) = self.values.shape();
        let mut worst: f64 = 0.0;
        for iy in 0..ny {
            for ix in 0..nx {
                worst = worst.max((self.values[(iy, ix)] - self.values[(ny - 1 - iy, nx - 1 - ix)]).abs());
            }
        }
        worst
    }

    /// `re_alpha,im_alpha,w` rows, `re` varying fastest.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "re_alpha,im_alpha,w")?;
        for (iy, y) in self.im_axis.iter().enumerate() {
            for (ix, x) in self.re_axis.iter().enumerate() {
                writeln!(out, "{x:e},{y:e},{:e}", self.values[(iy, ix)])?;
            }
        }
        Ok(())
    }
}
