//! Power-law exponents from log-log least squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluctuations::{self, FluctuationPhase};
use crate::numeric::logspace;
use crate::params::RenormalizedParams;
use crate::path::Line;

/// Default window in `|g - g_c|`.
pub const DEFAULT_WINDOW: (f64, f64) = (1e-4, 1e-2);
pub const DEFAULT_SAMPLES: usize = 16;
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Below => -1.0,
            Side::Above => 1.0,
        }
    }
}

/// Whether the quantity vanishes (`~ |g - g_c|^nu`) or diverges
/// (`~ |g - g_c|^-nu`) at the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    Vanishing,
    Diverging,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub g_c: f64,
    pub side: Side,
    pub nu: f64,
    pub r2: f64,
    pub window: (f64, f64),
}

/// Fits `log(value)` against `log|g - g_c|`.
pub fn fit_exponent(samples: &[(f64, f64)], g_c: f64, side: Side, scaling: Scaling) -> Result<ExponentFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::FitDegenerate(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let mut xs = Vec::with_capacity(samples.len());
    let mut ys = Vec::with_capacity(samples.len());
    for &(g, v) in samples {
        let d = (g - g_c) * side.sign();
        if !(d > 0.0) {
            return Err(Error::FitDegenerate(format!("sample g = {g} is not on the {side:?} side of {g_c}")));
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::FitDegenerate(format!("non-positive value {v} at g = {g}")));
        }
        xs.push(d.ln());
        ys.push(v.ln());
    }
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo < std::f64::consts::LN_10 * (1.0 - 1e-9) {
        return Err(Error::FitDegenerate(format!(
            "samples span {:.3} decades, need at least 1",
            (hi - lo) / std::f64::consts::LN_10
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let nu = match scaling {
        Scaling::Vanishing => slope,
        Scaling::Diverging => -slope,
    };
    Ok(ExponentFit {
        g_c,
        side,
        nu,
        r2,
        window: (lo.exp(), hi.exp()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Adr,
    Excitation,
}

impl Observable {
    pub fn scaling(self) -> Scaling {
        match self {
            Observable::Adr => Scaling::Vanishing,
            Observable::Excitation => Scaling::Diverging,
        }
    }
}

/// Samples `observable` of `phase` along `line` at `t = t_c ± d`, with `d`
/// log-spaced over `window`.
pub fn sample_line(
    line: &Line,
    kappa_bar: f64,
    t_c: f64,
    side: Side,
    window: (f64, f64),
    n: usize,
    phase: FluctuationPhase,
    observable: Observable,
) -> Result<Vec<(f64, f64)>> {
    logspace(window.0, window.1, n)
        .into_iter()
        .map(|d| {
            let t = t_c + side.sign() * d;
            let (g_r, g_cr) = line.point(t);
            let value = match (phase, observable) {
                (FluctuationPhase::Np, Observable::Adr) => -fluctuations::np_eigenvalues_at(g_r, g_cr, kappa_bar).0.re,
                (FluctuationPhase::Np, Observable::Excitation) => fluctuations::np_excitation_at(g_r, g_cr, kappa_bar)?,
                (FluctuationPhase::Sp, obs) => {
                    let c = fluctuations::sp_coefficients_at(&RenormalizedParams::new(g_r, g_cr, kappa_bar), 1)?;
                    match obs {
                        Observable::Adr => -fluctuations::sp_eigenvalues(&c, kappa_bar).0.re,
                        Observable::Excitation => fluctuations::sp_excitation(&c, kappa_bar)?,
                    }
                }
            };
            Ok((t, value))
        })
        .collect()
}

/// Samples and fits in one go.
pub fn line_exponent(
    line: &Line,
    kappa_bar: f64,
    t_c: f64,
    side: Side,
    phase: FluctuationPhase,
    observable: Observable,
    window: (f64, f64),
    n: usize,
) -> Result<ExponentFit> {
    let samples = sample_line(line, kappa_bar, t_c, side, window, n, phase, observable)?;
    fit_exponent(&samples, t_c, side, observable.scaling())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn recovers_exact_power_law() {
        let s: Vec<_> = logspace(1e-4, 1e-2, 16)
            .into_iter()
            .map(|d| (2.0 - d, 3.0 * d.powf(1.5)))
            .collect();
        let f = fit_exponent(&s, 2.0, Side::Below, Scaling::Vanishing).unwrap();
        assert_abs_diff_eq!(f.nu, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.r2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.window.0, 1e-4, epsilon = 1e-15);

        let s: Vec<_> = s.iter().map(|&(g, v)| (g, 1.0 / v)).collect();
        let f = fit_exponent(&s, 2.0, Side::Below, Scaling::Diverging).unwrap();
        assert_abs_diff_eq!(f.nu, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let narrow: Vec<_> = logspace(1e-3, 5e-3, 10).into_iter().map(|d| (1.0 + d, d)).collect();
        assert!(matches!(
            fit_exponent(&narrow, 1.0, Side::Above, Scaling::Vanishing),
            Err(Error::FitDegenerate(_))
        ));
        let few: Vec<_> = logspace(1e-4, 1e-2, 5).into_iter().map(|d| (1.0 + d, d)).collect();
        assert!(fit_exponent(&few, 1.0, Side::Above, Scaling::Vanishing).is_err());
        let wrong_side: Vec<_> = logspace(1e-4, 1e-2, 10).into_iter().map(|d| (1.0 + d, d)).collect();
        assert!(fit_exponent(&wrong_side, 1.0, Side::Below, Scaling::Vanishing).is_err());
    }

    #[test]
    fn symmetric_point_second_order_exponent() {
        let kb = 0.5;
        let (gc, _) = meanfield::critical_couplings(1.0, kb).unwrap();
        let line = Line::ray(1.0);
        for obs in [Observable::Adr, Observable::Excitation] {
            let f = line_exponent(&line, kb, gc, Side::Below, FluctuationPhase::Np, obs, DEFAULT_WINDOW, DEFAULT_SAMPLES)
                .unwrap();
            assert!((f.nu - 1.0).abs() < 0.05, "{obs:?}: {}", f.nu);
        }
    }

    proptest! {
        #[test]
        fn fit_is_exact_for_power_laws(nu in 0.2f64..3.0, c in 0.1f64..10.0, gc in 0.5f64..3.0) {
            let s: Vec<_> = logspace(1e-4, 1e-2, 12).into_iter().map(|d| (gc + d, c * d.powf(nu))).collect();
            let f = fit_exponent(&s, gc, Side::Above, Scaling::Vanishing).unwrap();
            prop_assert!((f.nu - nu).abs() < 1e-6);
        }
    }
}
