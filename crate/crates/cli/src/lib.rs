//! Batch front end for the `orientdecoh` toolkit: TOML-configured scenarios,
//! built-in figure presets and a self-test battery.

pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;
pub mod selftest;

use std::path::{Path, PathBuf};

pub use config::{Config, Format, Scenario};
pub use error::CliError;
pub use report::Report;

/// Serializes `report` in `format`.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Runs `cfg` and writes the result. Returns the output path, or `None`
/// when the report went to stdout. Non-converged points are written and
/// then reported as [`CliError::Numerical`].
pub fn execute(cfg: &Config, out_override: Option<&Path>) -> Result<Option<PathBuf>, CliError> {
    let report = scenarios::run(cfg)?;
    let text = render(&report, cfg.output.format);
    let path = out_override.map(Path::to_path_buf).or_else(|| cfg.output.path.clone());
    match &path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if report.unconverged > 0 {
        return Err(CliError::Numerical(format!(
            "{} points did not reach the quadrature tolerance",
            report.unconverged
        )));
    }
    Ok(path)
}

/// Writes the named preset into `dir` and returns the file path.
pub fn write_preset(scenario: Scenario, format: Format, dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut cfg = Config::preset(scenario);
    cfg.output.format = format;
    let path = dir.join(format!("{}.{}", scenario.name(), extension(format)));
    execute(&cfg, Some(&path))?;
    Ok(path)
}
