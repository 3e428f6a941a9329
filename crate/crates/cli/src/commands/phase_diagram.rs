use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rabi_core::meanfield::{
    classify_phase, epsilon_bounds, np_stability_a_at, spin_z_minus, tricritical_points,
};
use rabi_core::{Phase, RenormalizedParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PhaseDiagramConfig;
use crate::error::Result;
use crate::output::{num, write_json, CsvWriter};

struct Cell {
    phase: Phase,
    a_np: f64,
    sp_exists: bool,
    abs_alpha_sp: f64,
}

fn sp_exists(g_r: f64, g_cr: f64, kappa_bar: f64) -> bool {
    spin_z_minus(&RenormalizedParams::new(g_r, g_cr, kappa_bar)).is_ok()
}

#[derive(Serialize)]
struct Summary {
    config_hash: String,
    kappa_bar: f64,
    epsilon_min: f64,
    epsilon_max: f64,
    tricritical: [(f64, f64); 2],
    /// Grid points per phase label; a proxy for the area of each region.
    cell_counts: BTreeMap<&'static str, usize>,
}

pub fn run(cfg: &PhaseDiagramConfig, hash: &str, out: &Path) -> Result<Vec<PathBuf>> {
    let s = &cfg.sweep;
    let kb = s.kappa_bar;
    let xs = s.g_r.values();
    let ys = s.g_cr.values();
    let (nx, ny) = (xs.len(), ys.len());

    let cells: Vec<Cell> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (g_r, g_cr) = (xs[k / ny], ys[k % ny]);
            let pt = classify_phase(g_r, g_cr, kb);
            let stable_sp = pt.sp.filter(|sp| sp.stable);
            Cell {
                phase: pt.phase,
                a_np: np_stability_a_at(g_r, g_cr, kb),
                sp_exists: pt.sp.is_some(),
                abs_alpha_sp: stable_sp.map_or(f64::NAN, |sp| sp.alpha_bar.norm()),
            }
        })
        .collect();
    let at = |i: usize, j: usize| &cells[i * ny + j];

    let mut files = Vec::new();
    let mut grid = CsvWriter::create(
        &out.join("phase_diagram.csv"),
        hash,
        &["g_r", "g_cr", "phase", "a_np", "sp_exists", "abs_alpha_sp"],
    )?;
    let mut counts = BTreeMap::new();
    for i in 0..nx {
        for j in 0..ny {
            let c = at(i, j);
            *counts.entry(c.phase.label()).or_insert(0) += 1;
            grid.row(&[
                num(xs[i]),
                num(ys[j]),
                c.phase.label().into(),
                num(c.a_np),
                c.sp_exists.to_string(),
                num(c.abs_alpha_sp),
            ])?;
        }
    }
    files.push(grid.finish()?);

    // Boundary points on grid edges: linear interpolation of A_NP, bisection
    // of the SP existence flag.
    let mut points: Vec<(&str, f64, f64)> = Vec::new();
    let mut edge = |p0: (f64, f64), p1: (f64, f64), c0: &Cell, c1: &Cell| {
        if (c0.a_np > 0.0) != (c1.a_np > 0.0) {
            let w = c0.a_np / (c0.a_np - c1.a_np);
            points.push(("np_stability", p0.0 + w * (p1.0 - p0.0), p0.1 + w * (p1.1 - p0.1)));
        }
        if c0.sp_exists != c1.sp_exists {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                let q = (p0.0 + mid * (p1.0 - p0.0), p0.1 + mid * (p1.1 - p0.1));
                if sp_exists(q.0, q.1, kb) == c0.sp_exists {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let w = 0.5 * (lo + hi);
            points.push(("sp_existence", p0.0 + w * (p1.0 - p0.0), p0.1 + w * (p1.1 - p0.1)));
        }
    };
    for i in 0..nx {
        for j in 0..ny {
            if i + 1 < nx {
                edge((xs[i], ys[j]), (xs[i + 1], ys[j]), at(i, j), at(i + 1, j));
            }
            if j + 1 < ny {
                edge((xs[i], ys[j]), (xs[i], ys[j + 1]), at(i, j), at(i, j + 1));
            }
        }
    }
    points.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let mut bnd = CsvWriter::create(&out.join("boundaries.csv"), hash, &["kind", "g_r", "g_cr"])?;
    for (kind, r, c) in points {
        bnd.row(&[kind.into(), num(r), num(c)])?;
    }
    files.push(bnd.finish()?);

    let (epsilon_min, epsilon_max) = epsilon_bounds(kb);
    let summary = Summary {
        config_hash: hash.into(),
        kappa_bar: kb,
        epsilon_min,
        epsilon_max,
        tricritical: tricritical_points(kb),
        cell_counts: counts,
    };
    files.push(write_json(&out.join("tricritical.json"), &summary)?);
    Ok(files)
}
