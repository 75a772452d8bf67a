//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or malformed config, 2 I/O, 3 numeric
//! failure (nothing is written in that case).

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config;
use crate::output::{self, OutputError, OutputTable};
use crate::scenarios::{builtin_figure, Figure, FigureKind, ScenarioConfig, TauGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ionbounds",
    version,
    about = "Bounds on hydrogen ionization probabilities in laser pulses"
)]
pub struct Cli {
    /// Quadrature tolerance (overrides the config / built-in value)
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Also write a gnuplot script for the produced CSV
    #[arg(long, global = true, value_name = "FILE")]
    pub plot_script: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regenerate the data behind a built-in figure as CSV
    Figure {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=10))]
        id: u32,
        /// Directory for figure<id>.csv
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate the bounds of a config and print them
    Bounds {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Evaluate a config with at least one sweep and write CSV
    Scan {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<OutputError> for CliError {
    fn from(e: OutputError) -> Self {
        match e {
            OutputError::NonFinite { .. } | OutputError::RowLength { .. } => CliError::Numeric(e.to_string()),
            OutputError::Io { .. } | OutputError::Csv(_) => CliError::Io(e.to_string()),
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Figure { id, out } => figure(cli, *id, out),
        Command::Bounds { config, out } => {
            let (scenario, cfg_out) = load(config, cli.tol)?;
            let table = evaluate(&scenario)?;
            print!("{}", table.to_text());
            if let Some(path) = out.as_ref().or(cfg_out.as_ref()) {
                write(cli, &table, path, &scenario)?;
            }
            Ok(())
        }
        Command::Scan { config, out } => {
            let (scenario, _) = load(config, cli.tol)?;
            if scenario.sweeps.is_empty() {
                return Err(CliError::Usage(format!(
                    "{}: scan needs at least one [sweep] section",
                    config.display()
                )));
            }
            let table = evaluate(&scenario)?;
            write(cli, &table, out, &scenario)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
            Ok(())
        }
    }
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

fn load(path: &Path, tol: Option<f64>) -> Result<(ScenarioConfig, Option<PathBuf>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let parsed = config::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut scenario = parsed.scenario;
    if let Some(tol) = tol {
        check_tol(tol)?;
        scenario.tol = tol;
    }
    Ok((scenario, parsed.output))
}

fn evaluate(scenario: &ScenarioConfig) -> Result<OutputTable, CliError> {
    let rows = scenario.run().map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(row) = rows.iter().find(|r| r.report.has_errors()) {
        let r = &row.report;
        let errors: Vec<String> = r.errors.iter().map(ToString::to_string).collect();
        return Err(CliError::Numeric(format!("tau = {}: {}", r.tau, errors.join("; "))));
    }
    let table = output::scenario_table(scenario, &rows);
    table.check()?;
    Ok(table)
}

fn write(cli: &Cli, table: &OutputTable, path: &Path, scenario: &ScenarioConfig) -> Result<(), CliError> {
    table.write_csv_atomic(path)?;
    if let Some(script) = &cli.plot_script {
        let x = output::abscissa(scenario).map_or("tau", |p| p.key());
        let group: Vec<&str> = scenario
            .sweep_params()
            .iter()
            .map(|p| p.key())
            .filter(|k| *k != x)
            .collect();
        let text = output::plot_script(
            table,
            &path.display().to_string(),
            x,
            &["P_l", "P_u", "P_lw", "P_uw"],
            &group,
        );
        output::write_atomic(script, text.as_bytes())?;
    }
    Ok(())
}

fn figure(cli: &Cli, id: u32, dir: &Path) -> Result<(), CliError> {
    let mut fig: Figure = builtin_figure(id).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(tol) = cli.tol {
        check_tol(tol)?;
        if let FigureKind::Bounds { series, .. } = &mut fig.kind {
            series.iter_mut().for_each(|s| s.config.tol = tol);
        }
    }
    let table = match &fig.kind {
        FigureKind::NormCurve { .. } => output::figure_table(&fig, &[], fig.norm_curve().as_deref()),
        FigureKind::Bounds { .. } => {
            let rows = fig.run().map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(sr) = rows.iter().find(|sr| sr.row.report.has_errors()) {
                let r = &sr.row.report;
                let errors: Vec<String> = r.errors.iter().map(ToString::to_string).collect();
                return Err(CliError::Numeric(format!(
                    "{} at tau = {}: {}",
                    sr.label,
                    r.tau,
                    errors.join("; ")
                )));
            }
            output::figure_table(&fig, &rows, None)
        }
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("figure{id}.csv"));
    table.write_csv_atomic(&path)?;
    if let Some(script) = &cli.plot_script {
        let csv_name = path.display().to_string();
        let text = match &fig.kind {
            FigureKind::NormCurve { .. } => output::plot_script(&table, &csv_name, "c", &["N"], &[]),
            FigureKind::Bounds { series, bounds } => {
                let first = &series[0].config;
                let x = match first.tau {
                    TauGrid::PulseEnd => output::abscissa(first).map_or("tau", |p| p.key()),
                    TauGrid::Values(_) => "tau",
                };
                let mut group: Vec<&str> = Vec::new();
                if series.len() > 1 {
                    group.push("series");
                }
                group.extend(first.sweep_params().iter().map(|p| p.key()).filter(|k| *k != x));
                let ys: Vec<&str> = bounds.iter().map(|b| b.column()).collect();
                output::plot_script(&table, &csv_name, x, &ys, &group)
            }
        };
        output::write_atomic(script, text.as_bytes())?;
    }
    eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_errors_map_to_usage() {
        assert_eq!(run(["ionbounds", "figure", "11"]), EXIT_USAGE);
        assert_eq!(run(["ionbounds", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["ionbounds", "--help"]), EXIT_OK);
    }

    #[test]
    fn tol_range_checked() {
        assert!(check_tol(1e-8).is_ok());
        for bad in [0.0, -1e-3, 1.5, f64::NAN] {
            assert!(check_tol(bad).is_err());
        }
    }

    #[test]
    fn missing_config_is_io() {
        assert_eq!(run(["ionbounds", "bounds", "--config", "/nonexistent/x.cfg"]), EXIT_IO);
    }
}
