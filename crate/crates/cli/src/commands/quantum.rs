use std::path::{Path, PathBuf};

use rabi_core::fluctuations::np_eigenvalues_at;
use rabi_core::quantum::density::{project_spin_down, Hygiene};
use rabi_core::quantum::steady::{cavity_mode_eigenvalue, solve, GapEstimate, SteadyOptions};
use rabi_core::quantum::wigner::{wigner, Grid};
use rabi_core::Complex64;
use serde::Serialize;

use crate::config::{Projection, QuantumConfig};
use crate::error::{CliError, Result};
use crate::output::{num, write_json, CsvWriter};

#[derive(Serialize)]
struct Peak {
    re_alpha: f64,
    im_alpha: f64,
    w: f64,
    prominence: f64,
}

#[derive(Serialize)]
struct WignerSummary {
    config_hash: String,
    projection: Projection,
    /// Trace of the projected block before renormalization.
    projected_weight: f64,
    grid: Grid,
    modality: usize,
    peaks: Vec<Peak>,
    integral: f64,
    min: f64,
    max: f64,
    hygiene: Hygiene,
    residual: f64,
    iterations: usize,
    cavity_mode: Option<GapEstimate>,
}

pub fn run(cfg: &QuantumConfig, hash: &str, out: &Path) -> Result<Vec<PathBuf>> {
    let p = cfg.params.into_model();
    let opts = SteadyOptions {
        check_truncation: cfg.check_truncation,
        ..SteadyOptions::default()
    };
    let ss = solve(&p, cfg.dim_fock, &opts).map_err(CliError::Quantum)?;
    let diag = ss.diagnostics().map_err(CliError::Quantum)?;

    let n = cfg.dim_fock;
    let block = match cfg.projection {
        Projection::SpinDown => project_spin_down(&ss.rho),
        Projection::Reduced => {
            ss.rho.matrix.view((0, 0), (n, n)).into_owned() + ss.rho.matrix.view((n, n), (n, n))
        }
    };
    let weight = block.trace().re;
    if !(weight > 0.0) {
        return Err(CliError::Quantum(rabi_core::Error::NotPositive { min_eigenvalue: weight }));
    }
    let osc = block / Complex64::new(weight, 0.0);
    let grid = match cfg.extent {
        Some(e) => Grid::square(e, cfg.grid_points),
        None => Grid::auto(&osc, cfg.grid_points),
    };
    let w = wigner(&osc, &grid).map_err(CliError::Quantum)?;

    let cavity_mode = if cfg.cavity_mode {
        let r = p.renormalize()?;
        let target = np_eigenvalues_at(r.g_r, r.g_cr, r.kappa_bar).0 * p.omega0;
        Some(cavity_mode_eigenvalue(&p, n, target).map_err(CliError::Quantum)?)
    } else {
        None
    };

    let mut files = vec![write_json(&out.join("diagnostics.json"), &diag)?];
    let mut csv = CsvWriter::create(&out.join("wigner.csv"), hash, &["re_alpha", "im_alpha", "w"])?;
    for (iy, y) in w.im_axis.iter().enumerate() {
        for (ix, x) in w.re_axis.iter().enumerate() {
            csv.row(&[num(*x), num(*y), num(w.values[(iy, ix)])])?;
        }
    }
    files.push(csv.finish()?);

    let peaks = w
        .peaks(rabi_core::quantum::wigner::PEAK_FRACTION, rabi_core::quantum::wigner::PROMINENCE_FRACTION)
        .into_iter()
        .map(|(re_alpha, im_alpha, w, prominence)| Peak {
            re_alpha,
            im_alpha,
            w,
            prominence,
        })
        .collect::<Vec<_>>();
    let summary = WignerSummary {
        config_hash: hash.into(),
        projection: cfg.projection,
        projected_weight: weight,
        grid,
        modality: peaks.len(),
        peaks,
        integral: w.integral(),
        min: w.min(),
        max: w.max(),
        hygiene: ss.hygiene,
        residual: ss.residual,
        iterations: ss.iterations,
        cavity_mode,
    };
    files.push(write_json(&out.join("wigner_summary.json"), &summary)?);
    Ok(files)
}
