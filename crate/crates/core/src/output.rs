//! Result tables and their CSV form.
//!
//! Files start with `#`-prefixed metadata lines, then a header row, then one
//! record per row. Numbers are written with 17 significant digits so that
//! parsing them back gives the same `f64`; absent values are empty fields.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::bounds::BoundsReport;
use crate::config;
use crate::khnorm::KhNormValue;
use crate::scenarios::{BoundKind, Figure, FigureKind, ScenarioConfig, ScenarioRow, SeriesRow, SweepParam, TauGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("row {row}, column '{column}': non-finite value {value}")]
    NonFinite { row: usize, column: String, value: f64 },
    #[error("row {row} has {got} fields, header has {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
    #[error("writing {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `(key, value)`; multi-line values become one metadata line each.
    pub metadata: Vec<(String, String)>,
}

impl OutputTable {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
            metadata: vec![("tool".into(), format!("ionbounds {}", env!("CARGO_PKG_VERSION")))],
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Header lengths match and every number is finite.
    pub fn check(&self) -> Result<(), OutputError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(OutputError::RowLength {
                    row: i,
                    got: row.len(),
                    expected: self.header.len(),
                });
            }
            for (cell, column) in row.iter().zip(&self.header) {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(OutputError::NonFinite {
                            row: i,
                            column: column.clone(),
                            value: *v,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), OutputError> {
        self.check()?;
        let io_err = |source| OutputError::Io {
            path: "<stream>".into(),
            source,
        };
        for (key, value) in &self.metadata {
            for line in value.lines() {
                writeln!(out, "# {key}: {line}").map_err(io_err)?;
            }
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush().map_err(io_err)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, OutputError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).unwrap_or_default())
    }

    /// Write next to the target and rename into place, so readers never see
    /// a partial file.
    pub fn write_csv_atomic(&self, path: &Path) -> Result<(), OutputError> {
        let text = self.to_csv_string()?;
        write_atomic(path, text.as_bytes())
    }

    /// Aligned plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| {
                        if let Cell::Num(v) = c {
                            format!("{v:.6e}")
                        } else {
                            c.render()
                        }
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = self
            .header
            .iter()
            .enumerate()
            .map(|(j, h)| cells.iter().map(|r| r[j].len()).chain([h.len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |fields: &[String], out: &mut String| {
            let padded: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:>w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&self.header, &mut out);
        for row in &cells {
            line(row, &mut out);
        }
        out
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let wrap = |source| OutputError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(bytes).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

/// Parse a CSV produced by [`OutputTable::write_csv`]; numbers come back as
/// [`Cell::Num`], empty fields as [`Cell::Empty`], anything else as text.
pub fn read_csv(text: &str) -> Result<OutputTable, OutputError> {
    let mut metadata = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix("# ") else { break };
        if let Some((k, v)) = rest.trim_end_matches(['\n', '\r']).split_once(": ") {
            metadata.push((k.to_string(), v.to_string()));
        }
        body_start += line.len();
    }
    let mut reader = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let row = record?
            .iter()
            .map(|f| match f {
                "" => Cell::Empty,
                "true" => Cell::Bool(true),
                "false" => Cell::Bool(false),
                _ => f.parse::<f64>().map_or_else(|_| Cell::Text(f.to_string()), Cell::Num),
            })
            .collect();
        rows.push(row);
    }
    Ok(OutputTable { header, rows, metadata })
}

fn tolerance_meta(table: &mut OutputTable, tol: f64) {
    table.meta(
        "tolerance",
        format!("{tol:e} (norm time integral, absolute and relative)"),
    );
}

/// Every column of a bounds report, for `bounds` and `scan`.
pub fn scenario_table(config: &ScenarioConfig, rows: &[ScenarioRow]) -> OutputTable {
    let sweeps = config.sweep_params();
    let mut header: Vec<String> = vec!["tau".into()];
    header.extend(sweeps.iter().map(|p| p.key().to_string()));
    header.extend(
        [
            "n",
            "b_tau",
            "c_tau",
            "norm_integral",
            "P_l",
            "P_u",
            "P_lw",
            "P_uw",
            "lower_valid",
            "upper_informative",
            "lower_informative",
            "reason",
        ]
        .map(String::from),
    );
    let mut table = OutputTable::new(header);
    table.meta("config", config::render(config));
    tolerance_meta(&mut table, config.tol);
    for row in rows {
        let r = &row.report;
        let mut cells = vec![Cell::Num(r.tau)];
        cells.extend(row.sweep_values.iter().map(|&(_, v)| Cell::Num(v)));
        cells.extend([
            Cell::Int(u64::from(r.state.n())),
            Cell::Num(r.b_tau),
            Cell::Num(r.c_tau),
            Cell::Num(r.norm_time_integral),
            Cell::opt(r.strong_lower),
            Cell::opt(r.strong_upper),
            Cell::opt(r.weak_lower),
            Cell::opt(r.weak_upper),
            Cell::Bool(r.lower_valid),
            Cell::Bool(r.upper_informative),
            Cell::Bool(r.lower_informative),
            Cell::Text(reasons(r)),
        ]);
        table.rows.push(cells);
    }
    table
}

fn reasons(r: &BoundsReport) -> String {
    let mut parts: Vec<String> = Vec::new();
    parts.extend(r.lower_invalid_reason.clone());
    parts.extend(r.strong_absent_reason.clone());
    parts.join("; ")
}

/// Sweep parameter plotted along the horizontal axis when every curve is
/// evaluated at a single duration.
pub fn abscissa(config: &ScenarioConfig) -> Option<SweepParam> {
    match config.tau {
        TauGrid::PulseEnd => config.sweeps.last().map(|s| s.param),
        TauGrid::Values(_) => None,
    }
}

pub fn norm_table(values: &[KhNormValue]) -> OutputTable {
    let mut table = OutputTable::new(vec!["c".into(), "N".into()]);
    table.rows = values
        .iter()
        .map(|v| vec![Cell::Num(v.c), Cell::Num(v.value)])
        .collect();
    table
}

/// Table for a built-in figure: `series` (when there is more than one),
/// `tau`, the swept parameters, the figure's bound columns and `valid`.
pub fn figure_table(figure: &Figure, rows: &[SeriesRow], norm: Option<&[KhNormValue]>) -> OutputTable {
    let mut table = match (&figure.kind, norm) {
        (FigureKind::NormCurve { .. }, Some(values)) => norm_table(values),
        (FigureKind::NormCurve { .. }, None) => norm_table(&[]),
        (FigureKind::Bounds { series, bounds }, _) => {
            let multi = series.len() > 1;
            let sweeps = series.first().map(|s| s.config.sweep_params()).unwrap_or_default();
            let mut header: Vec<String> = Vec::new();
            if multi {
                header.push("series".into());
            }
            header.push("tau".into());
            header.extend(sweeps.iter().map(|p| p.key().to_string()));
            header.extend(bounds.iter().map(|b| b.column().to_string()));
            header.push("valid".into());
            let mut table = OutputTable::new(header);
            for s in series {
                table.meta("series", s.label.clone());
                table.meta("config", config::render(&s.config));
            }
            if let Some(s) = series.first() {
                tolerance_meta(&mut table, s.config.tol);
            }
            for sr in rows {
                let r = &sr.row.report;
                let mut cells = Vec::new();
                if multi {
                    cells.push(Cell::Text(sr.label.clone()));
                }
                cells.push(Cell::Num(r.tau));
                cells.extend(sr.row.sweep_values.iter().map(|&(_, v)| Cell::Num(v)));
                cells.extend(bounds.iter().map(|b: &BoundKind| Cell::opt(b.value(r))));
                cells.push(Cell::Bool(r.lower_valid));
                table.rows.push(cells);
            }
            table
        }
    };
    table
        .metadata
        .insert(1, ("figure".into(), format!("{} ({})", figure.id, figure.title)));
    table
}

/// Gnuplot script drawing every curve of a table written to `csv_name`.
///
/// `x` names the abscissa column; rows are grouped into curves by the
/// `group` columns.
pub fn plot_script(table: &OutputTable, csv_name: &str, x: &str, ys: &[&str], group: &[&str]) -> String {
    let col = |name: &str| table.column(name).map(|i| i + 1);
    let mut keys: Vec<Vec<String>> = Vec::new();
    let group_idx: Vec<usize> = group.iter().filter_map(|g| table.column(g)).collect();
    let short = |c: &Cell| match c {
        Cell::Num(v) => v.to_string(),
        other => other.render(),
    };
    for row in &table.rows {
        let key: Vec<String> = group_idx.iter().map(|&i| short(&row[i])).collect();
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# plot with: gnuplot -p <this file>");
    let _ = writeln!(out, "set datafile separator comma");
    let _ = writeln!(out, "set datafile commentschars '#'");
    let _ = writeln!(out, "set key outside right");
    let _ = writeln!(out, "set xlabel '{x} (a.u.)'");
    let _ = writeln!(out, "set yrange [-0.1:1.1]");
    let Some(xc) = col(x) else { return out };
    let mut clauses = Vec::new();
    for y in ys {
        let Some(yc) = col(y) else { continue };
        for key in &keys {
            let mut tests = Vec::new();
            let mut title = vec![y.to_string()];
            for (&gi, value) in group_idx.iter().zip(key) {
                let c = gi + 1;
                let textual = table
                    .rows
                    .first()
                    .is_some_and(|r| matches!(r[gi], Cell::Text(_) | Cell::Bool(_)));
                let test = if textual {
                    format!("strcol({c}) eq '{value}'")
                } else {
                    format!("column({c}) == {value}")
                };
                tests.push(test);
                title.push(format!("{}={value}", table.header[gi]));
            }
            let using = if tests.is_empty() {
                format!("{xc}:{yc}")
            } else {
                format!("{xc}:({} ? column({yc}) : NaN)", tests.join(" && "))
            };
            clauses.push(format!(
                "'{csv_name}' using {using} with lines title '{}'",
                title.join(" ")
            ));
        }
    }
    if !clauses.is_empty() {
        let _ = writeln!(out, "plot {}", clauses.join(", \\\n     "));
    }
    out
}
