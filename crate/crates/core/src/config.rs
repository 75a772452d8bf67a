//! Scenario config files.
//!
//! ```text
//! # comment
//! [state]
//! n = 1
//!
//! [pulse]
//! shape = trapezoid          # static | monochromatic | trapezoid | sine_squared | sine_squared_ramps
//! E0 = 20
//! omega = 1.5
//! ramp_cycles = 1.25         # or ramp_T = <a.u.>
//! plateau_cycles = 12        # or total_tau0 = <a.u.>
//!
//! [tau]
//! at_pulse_end = true        # or values = 0.1, 0.2   or start/stop/count
//!
//! [sweep]                    # repeatable; product over all sweeps, first outermost
//! param = E0                 # E0 | omega | Omega | n
//! values = 5, 10, 20
//!
//! [run]
//! tol = 1e-10
//! output = bounds.csv
//! ```
//!
//! [`render`] writes a config back in the same grammar.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::hydrogen::BoundState;
use crate::scenarios::{Length, PulseShape, PulseSpec, ScenarioConfig, Sweep, SweepParam, TauGrid, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

/// A parsed config: the scenario plus the optional output path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub scenario: ScenarioConfig,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    State,
    Pulse,
    Tau,
    Sweep,
    Run,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::State => "state",
            Section::Pulse => "pulse",
            Section::Tau => "tau",
            Section::Sweep => "sweep",
            Section::Run => "run",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::State => &["n"],
            Section::Pulse => &[
                "shape",
                "E0",
                "omega",
                "Omega",
                "ramp_T",
                "ramp_cycles",
                "total_tau0",
                "plateau_cycles",
            ],
            Section::Tau => &["values", "start", "stop", "count", "at_pulse_end"],
            Section::Sweep => &["param", "values"],
            Section::Run => &["tol", "output"],
        }
    }
}

/// Key-value pairs of one section occurrence, with line numbers.
#[derive(Debug, Default)]
struct Block {
    header_line: usize,
    entries: HashMap<String, (usize, String)>,
}

impl Block {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key).map(|(line, v)| parse_number(line, key, v)).transpose()
    }

    fn require(&self, section: Section, key: &str) -> Result<(usize, &str), ConfigError> {
        self.get(key)
            .ok_or_else(|| ConfigError::at(self.header_line, format!("[{}] is missing '{key}'", section.name())))
    }
}

fn parse_number(line: usize, key: &str, text: &str) -> Result<f64, ConfigError> {
    let v: f64 = text
        .parse()
        .map_err(|_| ConfigError::at(line, format!("'{key}': '{text}' is not a number")))?;
    if !v.is_finite() {
        return Err(ConfigError::at(line, format!("'{key}': value must be finite")));
    }
    Ok(v)
}

fn parse_list(line: usize, key: &str, text: &str) -> Result<Vec<f64>, ConfigError> {
    if text.trim().is_empty() {
        return Err(ConfigError::at(line, format!("'{key}': empty list")));
    }
    text.split(',')
        .map(|item| parse_number(line, key, item.trim()))
        .collect()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_blocks(text: &str) -> Result<Vec<(Section, Block)>, ConfigError> {
    let mut blocks: Vec<(Section, Block)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line_no, format!("malformed section header '{line}'")))?
                .trim();
            let section = match name {
                "state" => Section::State,
                "pulse" => Section::Pulse,
                "tau" => Section::Tau,
                "sweep" => Section::Sweep,
                "run" => Section::Run,
                _ => return Err(ConfigError::at(line_no, format!("unknown section [{name}]"))),
            };
            if section != Section::Sweep && blocks.iter().any(|(s, _)| *s == section) {
                return Err(ConfigError::at(line_no, format!("section [{name}] appears twice")));
            }
            blocks.push((
                section,
                Block {
                    header_line: line_no,
                    entries: HashMap::new(),
                },
            ));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, format!("expected 'key = value', found '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let Some((section, block)) = blocks.last_mut() else {
            return Err(ConfigError::at(
                line_no,
                format!("'{key}' appears before any section header"),
            ));
        };
        if !section.keys().contains(&key) {
            return Err(ConfigError::at(
                line_no,
                format!(
                    "unknown key '{key}' in [{}] (expected one of {})",
                    section.name(),
                    section.keys().join(", ")
                ),
            ));
        }
        if block
            .entries
            .insert(key.to_string(), (line_no, value.to_string()))
            .is_some()
        {
            return Err(ConfigError::at(line_no, format!("duplicate key '{key}'")));
        }
    }
    Ok(blocks)
}

fn parse_state(block: Option<&Block>) -> Result<BoundState, ConfigError> {
    let Some(block) = block else {
        return Ok(BoundState::GROUND);
    };
    match block.get("n") {
        None => Ok(BoundState::GROUND),
        Some((line, v)) => {
            let n: u32 = v
                .parse()
                .map_err(|_| ConfigError::at(line, format!("'n': '{v}' is not a positive integer")))?;
            BoundState::new(n).map_err(|e| ConfigError::at(line, e.to_string()))
        }
    }
}

fn exclusive_length(block: &Block, time_key: &str, cycles_key: &str) -> Result<Option<(usize, Length)>, ConfigError> {
    match (block.get(time_key), block.get(cycles_key)) {
        (Some(_), Some((line, _))) => Err(ConfigError::at(
            line,
            format!("give either '{time_key}' or '{cycles_key}', not both"),
        )),
        (Some((line, v)), None) => Ok(Some((line, Length::Time(parse_number(line, time_key, v)?)))),
        (None, Some((line, v))) => Ok(Some((line, Length::Cycles(parse_number(line, cycles_key, v)?)))),
        (None, None) => Ok(None),
    }
}

fn parse_pulse(block: Option<&Block>) -> Result<PulseSpec, ConfigError> {
    let block = block.ok_or_else(|| ConfigError::global("missing [pulse] section"))?;
    let (line, shape) = block.require(Section::Pulse, "shape")?;
    let shape: PulseShape = shape.parse().map_err(|e: String| ConfigError::at(line, e))?;
    let (e0_line, e0) = block.require(Section::Pulse, "E0")?;
    let mut spec = PulseSpec::new(shape, parse_number(e0_line, "E0", e0)?);
    spec.omega = block.number("omega")?;
    spec.envelope_omega = block.number("Omega")?;
    let ramp = exclusive_length(block, "ramp_T", "ramp_cycles")?;
    spec.ramp = ramp.map(|(_, l)| l);
    match (block.get("total_tau0"), block.get("plateau_cycles")) {
        (Some(_), Some((line, _))) => {
            return Err(ConfigError::at(
                line,
                "give either 'total_tau0' or 'plateau_cycles', not both",
            ))
        }
        (Some((line, v)), None) => spec.total = Some(Length::Time(parse_number(line, "total_tau0", v)?)),
        (None, Some((line, v))) => spec.plateau = Some(Length::Cycles(parse_number(line, "plateau_cycles", v)?)),
        (None, None) => {}
    }

    let ramped = matches!(shape, PulseShape::Trapezoid | PulseShape::SineSquaredRamps);
    let unused = |key: &str| block.get(key).map(|(line, _)| line);
    let not_for_shape = |key: &str| -> Result<(), ConfigError> {
        match unused(key) {
            Some(line) => Err(ConfigError::at(
                line,
                format!("'{key}' does not apply to a {} pulse", shape.name()),
            )),
            None => Ok(()),
        }
    };
    if shape == PulseShape::Static {
        not_for_shape("omega")?;
    } else if spec.omega.is_none() {
        return Err(ConfigError::at(
            block.header_line,
            format!("a {} pulse needs 'omega'", shape.name()),
        ));
    }
    if shape == PulseShape::SineSquared {
        if spec.envelope_omega.is_none() {
            return Err(ConfigError::at(block.header_line, "a sine_squared pulse needs 'Omega'"));
        }
    } else {
        not_for_shape("Omega")?;
    }
    if ramped {
        if spec.ramp.is_none() {
            return Err(ConfigError::at(
                block.header_line,
                format!("a {} pulse needs 'ramp_T' or 'ramp_cycles'", shape.name()),
            ));
        }
        if spec.total.is_none() && spec.plateau.is_none() {
            return Err(ConfigError::at(
                block.header_line,
                format!("a {} pulse needs 'total_tau0' or 'plateau_cycles'", shape.name()),
            ));
        }
    } else {
        for key in ["ramp_T", "ramp_cycles", "total_tau0", "plateau_cycles"] {
            not_for_shape(key)?;
        }
    }
    Ok(spec)
}

fn parse_tau(block: Option<&Block>) -> Result<TauGrid, ConfigError> {
    let block = block.ok_or_else(|| ConfigError::global("missing [tau] section"))?;
    let at_end = match block.get("at_pulse_end") {
        Some((_, "true")) => true,
        Some((_, "false")) | None => false,
        Some((line, v)) => {
            return Err(ConfigError::at(
                line,
                format!("'at_pulse_end': expected true or false, found '{v}'"),
            ))
        }
    };
    let values = block.get("values");
    let range = ["start", "stop", "count"].map(|k| block.get(k));
    let given = usize::from(at_end) + usize::from(values.is_some()) + usize::from(range.iter().any(Option::is_some));
    if given != 1 {
        return Err(ConfigError::at(
            block.header_line,
            "[tau] needs exactly one of 'values', 'start/stop/count' or 'at_pulse_end = true'",
        ));
    }
    if at_end {
        return Ok(TauGrid::PulseEnd);
    }
    if let Some((line, v)) = values {
        return Ok(TauGrid::Values(parse_list(line, "values", v)?));
    }
    let (start_line, start) = block.require(Section::Tau, "start")?;
    let (stop_line, stop) = block.require(Section::Tau, "stop")?;
    let (count_line, count) = block.require(Section::Tau, "count")?;
    let count: usize = count
        .parse()
        .ok()
        .filter(|&c| c >= 1)
        .ok_or_else(|| ConfigError::at(count_line, format!("'count': '{count}' is not a positive integer")))?;
    Ok(TauGrid::linspace(
        parse_number(start_line, "start", start)?,
        parse_number(stop_line, "stop", stop)?,
        count,
    ))
}

fn parse_sweep(block: &Block) -> Result<Sweep, ConfigError> {
    let (line, param) = block.require(Section::Sweep, "param")?;
    let param: SweepParam = param.parse().map_err(|e: String| ConfigError::at(line, e))?;
    let (line, values) = block.require(Section::Sweep, "values")?;
    Ok(Sweep {
        param,
        values: parse_list(line, "values", values)?,
    })
}

/// Parse a config. Scenario-level consistency (grid ordering, sweep
/// applicability, pulse validity) is checked as well.
pub fn parse(text: &str) -> Result<ConfigFile, ConfigError> {
    let blocks = split_blocks(text)?;
    let find = |s: Section| blocks.iter().find(|(sec, _)| *sec == s).map(|(_, b)| b);
    let state = parse_state(find(Section::State))?;
    let pulse = parse_pulse(find(Section::Pulse))?;
    let tau = parse_tau(find(Section::Tau))?;
    let mut scenario = ScenarioConfig::new(state, pulse, tau);
    for (section, block) in &blocks {
        if *section == Section::Sweep {
            scenario.sweeps.push(parse_sweep(block)?);
        }
    }
    let mut output = None;
    if let Some(run) = find(Section::Run) {
        scenario.tol = run.number("tol")?.unwrap_or(DEFAULT_TOL);
        output = run.get("output").map(|(_, v)| PathBuf::from(v));
    }
    let line_of = |s: Section| find(s).map(|b| b.header_line);
    scenario.points().map_err(|e| {
        use crate::scenarios::ScenarioError as E;
        let line = match &e {
            E::TauGrid(_) => line_of(Section::Tau),
            E::Pulse(_) => line_of(Section::Pulse),
            E::Tolerance(_) => line_of(Section::Run),
            E::Sweep { param, .. } => blocks
                .iter()
                .filter(|(s, _)| *s == Section::Sweep)
                .find(|(_, b)| b.get("param").is_some_and(|(_, v)| v == param.key()))
                .map(|(_, b)| b.header_line),
            E::UnknownFigure(_) => None,
        };
        ConfigError {
            line,
            message: e.to_string(),
        }
    })?;
    Ok(ConfigFile { scenario, output })
}

fn number(v: f64) -> String {
    // shortest representation that parses back to the same value
    format!("{v:?}")
}

fn list(values: &[f64]) -> String {
    values.iter().map(|&v| number(v)).collect::<Vec<_>>().join(", ")
}

/// Write a scenario back in config grammar.
pub fn render(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    let p = &config.pulse;
    let _ = writeln!(out, "[state]\nn = {}\n", config.state.n());
    let _ = writeln!(
        out,
        "[pulse]\nshape = {}\nE0 = {}",
        p.shape.name(),
        number(p.field_strength)
    );
    if let Some(w) = p.omega {
        let _ = writeln!(out, "omega = {}", number(w));
    }
    if let Some(w) = p.envelope_omega {
        let _ = writeln!(out, "Omega = {}", number(w));
    }
    match p.ramp {
        Some(Length::Time(t)) => {
            let _ = writeln!(out, "ramp_T = {}", number(t));
        }
        Some(Length::Cycles(k)) => {
            let _ = writeln!(out, "ramp_cycles = {}", number(k));
        }
        None => {}
    }
    if let Some(total) = p.total {
        let v = match total {
            Length::Time(t) => t,
            Length::Cycles(k) => k * 2.0 * std::f64::consts::PI / p.omega.unwrap_or(1.0),
        };
        let _ = writeln!(out, "total_tau0 = {}", number(v));
    }
    if let Some(plateau) = p.plateau {
        let v = match plateau {
            Length::Cycles(k) => k,
            Length::Time(t) => t * p.omega.unwrap_or(1.0) / (2.0 * std::f64::consts::PI),
        };
        let _ = writeln!(out, "plateau_cycles = {}", number(v));
    }
    out.push_str("\n[tau]\n");
    match &config.tau {
        TauGrid::Values(v) => {
            let _ = writeln!(out, "values = {}", list(v));
        }
        TauGrid::PulseEnd => out.push_str("at_pulse_end = true\n"),
    }
    for sweep in &config.sweeps {
        let _ = writeln!(
            out,
            "\n[sweep]\nparam = {}\nvalues = {}",
            sweep.param.key(),
            list(&sweep.values)
        );
    }
    let _ = writeln!(out, "\n[run]\ntol = {}", number(config.tol));
    out
}
