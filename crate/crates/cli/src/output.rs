//! Output files. Numbers are written with `{:?}`, which is the shortest
//! representation that parses back to the same `f64` and never depends on
//! the locale.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
    columns: usize,
}

impl CsvWriter {
    /// Creates `path` and writes the `# config-hash:` line and the header.
    pub fn create(path: &Path, hash: &str, header: &[&str]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "# config-hash: {hash}")?;
        writeln!(out, "{}", header.join(","))?;
        Ok(Self {
            path: path.to_path_buf(),
            out,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        debug_assert_eq!(fields.len(), self.columns, "{}", self.path.display());
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush()?;
        Ok(self.path)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(path.to_path_buf())
}
