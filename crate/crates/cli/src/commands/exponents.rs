use std::path::{Path, PathBuf};

use rabi_core::fit::{line_exponent, ExponentFit, Observable, Side};
use rabi_core::fluctuations::FluctuationPhase;
use rabi_core::meanfield::line_landmarks;
use rabi_core::Error as CoreError;
use serde::Serialize;

use crate::config::{Critical, ExponentRequest, ExponentsConfig};
use crate::error::{CliError, Result};
use crate::output::write_json;

#[derive(Debug, Clone, Serialize)]
pub struct FitRecord {
    pub name: String,
    pub observable: Observable,
    pub phase: FluctuationPhase,
    pub side: Side,
    pub t_c: f64,
    pub g_r: f64,
    pub g_cr: f64,
    pub nu: f64,
    pub r2: f64,
    pub window: (f64, f64),
}

#[derive(Serialize)]
struct Report {
    config_hash: String,
    kappa_bar: f64,
    fits: Vec<FitRecord>,
}

fn critical_value(req: &ExponentRequest, kappa_bar: f64) -> Result<f64> {
    match req.critical {
        Critical::At(t) => Ok(t),
        Critical::Landmark { t_lo, t_hi, index } => {
            let marks = line_landmarks(&req.line.line(), kappa_bar, t_lo, t_hi);
            marks.get(index).map(|m| m.t).ok_or_else(|| {
                CliError::Fit(format!(
                    "{}: line has {} boundary crossings on [{t_lo}, {t_hi}], none with index {index}",
                    req.name,
                    marks.len()
                ))
            })
        }
    }
}

/// Every failure to produce samples or a fit counts as a degenerate fit.
fn as_fit_error(name: &str, e: CoreError) -> CliError {
    CliError::Fit(format!("{name}: {e}"))
}

pub fn fit_all(cfg: &ExponentsConfig) -> Result<Vec<FitRecord>> {
    let mut fits = Vec::new();
    for req in &cfg.requests {
        let t_c = critical_value(req, cfg.kappa_bar)?;
        let line = req.line.line();
        let (g_r, g_cr) = line.point(t_c);
        for &obs in &req.observables {
            let fit: ExponentFit =
                line_exponent(&line, cfg.kappa_bar, t_c, req.side, req.phase, obs, cfg.window, cfg.samples)
                    .map_err(|e| as_fit_error(&req.name, e))?;
            fits.push(FitRecord {
                name: req.name.clone(),
                observable: obs,
                phase: req.phase,
                side: req.side,
                t_c,
                g_r,
                g_cr,
                nu: fit.nu,
                r2: fit.r2,
                window: fit.window,
            });
        }
    }
    Ok(fits)
}

pub fn run(cfg: &ExponentsConfig, hash: &str, out: &Path) -> Result<Vec<PathBuf>> {
    let report = Report {
        config_hash: hash.into(),
        kappa_bar: cfg.kappa_bar,
        fits: fit_all(cfg)?,
    };
    Ok(vec![write_json(&out.join("exponents.json"), &report)?])
}
