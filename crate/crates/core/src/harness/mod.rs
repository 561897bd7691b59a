//! Seeded experiment runner and output layer.

mod config;
mod experiments;
mod plot;
mod table;

use std::path::{Path, PathBuf};

pub use config::{parse_angle, Angle, BackendChoice, EnsembleConfig, ExperimentKind, OutputFormat, PmGrid};
pub use experiments::*;
pub use plot::{LinePlot, Series};
pub use table::{format_float, Cell, Table};

use crate::error::{Error, Result};

/// Writes every table in `format` and every plot as SVG under `dir`.
pub fn emit_outputs(output: &ExperimentOutput, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, table) in &output.tables {
        let path = match format {
            OutputFormat::Csv => dir.join(format!("{name}.csv")),
            OutputFormat::Json => dir.join(format!("{name}.json")),
        };
        match format {
            OutputFormat::Csv => table.write_csv(&path)?,
            OutputFormat::Json => table.write_json(&path)?,
        }
        written.push(path);
    }
    for (name, plot) in &output.plots {
        let path = dir.join(format!("{name}.svg"));
        std::fs::write(&path, plot.to_svg()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
