//! Configuration, dispatch and output for the `rabi-dpt` command line.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::RunConfig;
pub use error::{CliError, Result};

pub struct Report {
    pub files: Vec<PathBuf>,
    /// Trajectories that reached no known fixed point.
    pub unresolved: usize,
}

/// Validates `cfg`, writes it to `out/config.json` and runs it.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Report> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let hash = cfg.hash();
    let mut files = vec![output::write_json(&out.join("config.json"), cfg)?];
    let mut unresolved = 0;
    let produced = match cfg {
        RunConfig::PhaseDiagram(c) => commands::phase_diagram::run(c, &hash, out)?,
        RunConfig::LineScan(c) => commands::line_scan::run(c, &hash, out)?,
        RunConfig::Exponents(c) => commands::exponents::run(c, &hash, out)?,
        RunConfig::Trajectory(c) => {
            let o = commands::trajectory::run_trajectories(c, &hash, out)?;
            unresolved = o.unresolved;
            o.files
        }
        RunConfig::Basin(c) => {
            let o = commands::trajectory::run_basin(c, &hash, out)?;
            unresolved = o.unresolved;
            o.files
        }
        RunConfig::Quantum(c) => commands::quantum::run(c, &hash, out)?,
    };
    files.extend(produced);
    Ok(Report { files, unresolved })
}
