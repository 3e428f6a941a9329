use std::path::{Path, PathBuf};

use rabi_core::fluctuations::{np_eigenvalues_at, np_excitation_at, sp_coefficients_at, sp_eigenvalues, sp_excitation};
use rabi_core::meanfield::{classify_phase, line_landmarks, Landmark};
use rabi_core::semiclassical::{hysteresis_scan, Controls};
use rabi_core::{Complex64, Error as CoreError, RenormalizedParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::LineScanConfig;
use crate::error::Result;
use crate::output::{num, write_json, CsvWriter};

const NAN: Complex64 = Complex64::new(f64::NAN, f64::NAN);

/// Diverging excitation numbers are reported as `inf`.
fn excitation(r: std::result::Result<f64, CoreError>) -> f64 {
    match r {
        Ok(x) => x,
        Err(CoreError::BoundaryDivergence { .. }) => f64::INFINITY,
        Err(_) => f64::NAN,
    }
}

#[derive(Serialize)]
struct Landmarks {
    config_hash: String,
    landmarks: Vec<Landmark>,
}

pub fn run(cfg: &LineScanConfig, hash: &str, out: &Path) -> Result<Vec<PathBuf>> {
    let line = cfg.line.line();
    let kb = cfg.kappa_bar;
    let ts = cfg.t.values();

    let rows: Vec<Vec<String>> = ts
        .par_iter()
        .map(|&t| {
            let (g_r, g_cr) = line.point(t);
            let pt = classify_phase(g_r, g_cr, kb);
            let np_stable = pt.np_down.stable;
            let sp = pt.sp.filter(|s| s.stable);
            let l_np = np_eigenvalues_at(g_r, g_cr, kb).0;
            let coeffs = sp_coefficients_at(&RenormalizedParams::new(g_r, g_cr, kb), 1).ok();
            let l_sp = coeffs.map_or(NAN, |c| sp_eigenvalues(&c, kb).0);
            let n_sp = coeffs.map_or(f64::NAN, |c| excitation(sp_excitation(&c, kb)));
            vec![
                num(t),
                num(g_r),
                num(g_cr),
                pt.phase.label().into(),
                num(if np_stable { 0.0 } else { f64::NAN }),
                num(sp.map_or(f64::NAN, |s| s.alpha_bar.norm())),
                num(l_np.re),
                num(l_np.im),
                num(l_sp.re),
                num(l_sp.im),
                num(excitation(np_excitation_at(g_r, g_cr, kb))),
                num(n_sp),
            ]
        })
        .collect();

    let mut files = Vec::new();
    let mut csv = CsvWriter::create(
        &out.join("line_scan.csv"),
        hash,
        &[
            "t", "g_r", "g_cr", "phase", "abs_alpha_np", "abs_alpha_sp", "re_l_np", "im_l_np", "re_l_sp",
            "im_l_sp", "n_np", "n_sp",
        ],
    )?;
    for r in &rows {
        csv.row(r)?;
    }
    files.push(csv.finish()?);

    let landmarks = Landmarks {
        config_hash: hash.into(),
        landmarks: line_landmarks(&line, kb, cfg.t.min, cfg.t.max),
    };
    files.push(write_json(&out.join("landmarks.json"), &landmarks)?);

    if let Some(h) = &cfg.hysteresis {
        let scan = hysteresis_scan(&line, kb, &ts, h.t_per_point, h.kick, &Controls::default())?;
        let mut csv = CsvWriter::create(
            &out.join("hysteresis.csv"),
            hash,
            &["t", "abs_alpha_forward", "attractor_forward", "abs_alpha_backward", "attractor_backward"],
        )?;
        for (f, b) in scan.forward.iter().zip(&scan.backward) {
            csv.row(&[
                num(f.t),
                num(f.abs_alpha),
                f.attractor.label().into(),
                num(b.abs_alpha),
                b.attractor.label().into(),
            ])?;
        }
        files.push(csv.finish()?);
    }
    Ok(files)
}
