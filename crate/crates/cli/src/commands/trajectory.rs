use std::path::{Path, PathBuf};

use rabi_core::semiclassical::{integrate, sample_initial, Controls, SemiclassicalState, Trajectory};
use rabi_core::{Complex64, RenormalizedParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{BasinConfig, TrajectoryConfig};
use crate::error::Result;
use crate::output::{num, CsvWriter};

/// Runs that ended `Unresolved`.
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub unresolved: usize,
}

fn starts(cfg: &TrajectoryConfig) -> Vec<(RenormalizedParams, SemiclassicalState)> {
    let kb = cfg.kappa_bar;
    let mut v: Vec<_> = cfg
        .runs
        .iter()
        .map(|r| {
            let p = RenormalizedParams::new(r.g_r, r.g_cr, kb);
            (p, SemiclassicalState::slaved(Complex64::new(r.alpha.0, r.alpha.1), &p, -1.0))
        })
        .collect();
    if let Some(r) = cfg.random {
        let p = RenormalizedParams::new(r.g_r, r.g_cr, kb);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        v.extend((0..r.count).map(|_| (p, sample_initial(&mut rng, &p, r.radius))));
    }
    v
}

pub fn run_trajectories(cfg: &TrajectoryConfig, hash: &str, out: &Path) -> Result<Outcome> {
    let controls = Controls {
        samples: cfg.samples,
        ..Controls::default()
    };
    let runs = starts(cfg);
    let trajs: Vec<Trajectory> = runs
        .par_iter()
        .map(|(p, s0)| integrate(s0, p, cfg.dynamics, cfg.t_max, &controls))
        .collect::<rabi_core::Result<_>>()?;

    let mut path = CsvWriter::create(
        &out.join("trajectory.csv"),
        hash,
        &["run", "t_bar", "re_alpha", "im_alpha", "s_x", "s_y", "s_z"],
    )?;
    let mut summary = CsvWriter::create(
        &out.join("attractors.csv"),
        hash,
        &[
            "run", "g_r", "g_cr", "re_alpha0", "im_alpha0", "attractor", "overflow", "limit_cycle_suspect",
            "max_norm_drift",
        ],
    )?;
    let mut unresolved = 0;
    for (k, ((p, s0), tr)) in runs.iter().zip(&trajs).enumerate() {
        for s in &tr.samples {
            path.row(&[
                k.to_string(),
                num(s.t_bar),
                num(s.alpha_bar.re),
                num(s.alpha_bar.im),
                num(s.s_x),
                num(s.s_y),
                num(s.s_z),
            ])?;
        }
        if !(tr.attractor.is_np() || tr.attractor.is_sp()) {
            unresolved += 1;
        }
        summary.row(&[
            k.to_string(),
            num(p.g_r),
            num(p.g_cr),
            num(s0.alpha_bar.re),
            num(s0.alpha_bar.im),
            tr.attractor.label().into(),
            tr.overflow.to_string(),
            tr.limit_cycle_suspect.to_string(),
            num(tr.max_norm_drift),
        ])?;
    }
    Ok(Outcome {
        files: vec![path.finish()?, summary.finish()?],
        unresolved,
    })
}

pub fn run_basin(cfg: &BasinConfig, hash: &str, out: &Path) -> Result<Outcome> {
    let p = RenormalizedParams::new(cfg.g_r, cfg.g_cr, cfg.kappa_bar);
    let xs = cfg.re_alpha.values();
    let ys = cfg.im_alpha.values();
    let controls = Controls::default();
    let trajs: Vec<Trajectory> = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| {
            let a0 = Complex64::new(xs[k / ys.len()], ys[k % ys.len()]);
            integrate(&SemiclassicalState::slaved(a0, &p, -1.0), &p, cfg.dynamics, cfg.t_max, &controls)
        })
        .collect::<rabi_core::Result<_>>()?;

    let mut csv = CsvWriter::create(
        &out.join("basin.csv"),
        hash,
        &["re_alpha0", "im_alpha0", "attractor", "re_alpha_end", "im_alpha_end"],
    )?;
    let mut unresolved = 0;
    for (k, tr) in trajs.iter().enumerate() {
        let end = tr.terminal().alpha_bar;
        if !(tr.attractor.is_np() || tr.attractor.is_sp()) {
            unresolved += 1;
        }
        csv.row(&[
            num(xs[k / ys.len()]),
            num(ys[k % ys.len()]),
            tr.attractor.label().into(),
            num(end.re),
            num(end.im),
        ])?;
    }
    Ok(Outcome {
        files: vec![csv.finish()?],
        unresolved,
    })
}
