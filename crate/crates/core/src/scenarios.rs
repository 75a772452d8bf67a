//! Scenario definitions: a state, a pulse, a grid of durations and optional
//! parameter sweeps. Built-in scenarios cover the ten reference figures.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds::{evaluate_scenario, BoundsReport};
use crate::hydrogen::BoundState;
use crate::khnorm::{norm_closed_100, KhNormValue};
use crate::pulses::Pulse;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown figure {0}; figures 1 to 10 are available")]
    UnknownFigure(u32),
    #[error("duration grid: {0}")]
    TauGrid(String),
    #[error("sweep over {param}: {reason}")]
    Sweep { param: SweepParam, reason: String },
    #[error("pulse: {0}")]
    Pulse(String),
    #[error("tolerance {0} must be positive and finite")]
    Tolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseShape {
    Static,
    Monochromatic,
    Trapezoid,
    SineSquared,
    SineSquaredRamps,
}

impl PulseShape {
    pub const ALL: [PulseShape; 5] = [
        PulseShape::Static,
        PulseShape::Monochromatic,
        PulseShape::Trapezoid,
        PulseShape::SineSquared,
        PulseShape::SineSquaredRamps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PulseShape::Static => "static",
            PulseShape::Monochromatic => "monochromatic",
            PulseShape::Trapezoid => "trapezoid",
            PulseShape::SineSquared => "sine_squared",
            PulseShape::SineSquaredRamps => "sine_squared_ramps",
        }
    }
}

impl FromStr for PulseShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PulseShape::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown pulse shape '{s}' (expected one of static, monochromatic, trapezoid, sine_squared, sine_squared_ramps)"))
    }
}

/// A duration given either in atomic units or in carrier cycles `2π/ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Time(f64),
    Cycles(f64),
}

impl Length {
    fn resolve(self, omega: f64) -> f64 {
        match self {
            Length::Time(t) => t,
            Length::Cycles(k) => k * 2.0 * PI / omega,
        }
    }
}

/// Pulse parameters as written in a config; resolved into a [`Pulse`] once
/// sweep values are substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub field_strength: f64,
    pub omega: Option<f64>,
    pub envelope_omega: Option<f64>,
    pub ramp: Option<Length>,
    pub plateau: Option<Length>,
    pub total: Option<Length>,
}

impl PulseSpec {
    pub fn new(shape: PulseShape, field_strength: f64) -> Self {
        Self {
            shape,
            field_strength,
            omega: None,
            envelope_omega: None,
            ramp: None,
            plateau: None,
            total: None,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn with_envelope_omega(mut self, envelope_omega: f64) -> Self {
        self.envelope_omega = Some(envelope_omega);
        self
    }

    /// Ramp, plateau, ramp in carrier cycles.
    pub fn with_cycles(mut self, ramp: f64, plateau: f64) -> Self {
        self.ramp = Some(Length::Cycles(ramp));
        self.plateau = Some(Length::Cycles(plateau));
        self
    }

    pub fn resolve(&self) -> Result<Pulse, ScenarioError> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| ScenarioError::Pulse(format!("shape {} needs {key}", self.shape.name())))
        };
        let e0 = self.field_strength;
        let pulse = match self.shape {
            PulseShape::Static => Pulse::Static { field_strength: e0 },
            PulseShape::Monochromatic => Pulse::Monochromatic {
                field_strength: e0,
                omega: need(self.omega, "omega")?,
            },
            PulseShape::SineSquared => Pulse::SineSquaredEnvelope {
                field_strength: e0,
                omega: need(self.omega, "omega")?,
                envelope_omega: need(self.envelope_omega, "Omega")?,
            },
            PulseShape::Trapezoid | PulseShape::SineSquaredRamps => {
                let omega = need(self.omega, "omega")?;
                let ramp = self
                    .ramp
                    .ok_or_else(|| {
                        ScenarioError::Pulse(format!("shape {} needs ramp_T or ramp_cycles", self.shape.name()))
                    })?
                    .resolve(omega);
                let duration = match (self.total, self.plateau) {
                    (Some(total), None) => total.resolve(omega),
                    (None, Some(plateau)) => 2.0 * ramp + plateau.resolve(omega),
                    _ => {
                        return Err(ScenarioError::Pulse(format!(
                            "shape {} needs exactly one of total_tau0 and plateau_cycles",
                            self.shape.name()
                        )))
                    }
                };
                if self.shape == PulseShape::Trapezoid {
                    Pulse::TrapezoidEnvelope {
                        field_strength: e0,
                        omega,
                        ramp,
                        duration,
                    }
                } else {
                    Pulse::SineSquaredRamps {
                        field_strength: e0,
                        omega,
                        ramp,
                        duration,
                    }
                }
            }
        };
        pulse.validate().map_err(|e| ScenarioError::Pulse(e.to_string()))?;
        Ok(pulse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    FieldStrength,
    Omega,
    EnvelopeOmega,
    PrincipalNumber,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::FieldStrength => "E0",
            SweepParam::Omega => "omega",
            SweepParam::EnvelopeOmega => "Omega",
            SweepParam::PrincipalNumber => "n",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E0" => Ok(SweepParam::FieldStrength),
            "omega" => Ok(SweepParam::Omega),
            "Omega" => Ok(SweepParam::EnvelopeOmega),
            "n" => Ok(SweepParam::PrincipalNumber),
            _ => Err(format!(
                "unknown sweep parameter '{s}' (expected E0, omega, Omega or n)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Durations at which the bounds are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum TauGrid {
    Values(Vec<f64>),
    /// End of the pulse: `total_tau0` for ramped pulses, half an envelope
    /// cycle `π/Ω` for the sine-squared envelope.
    PulseEnd,
}

impl TauGrid {
    /// `count` points evenly spaced on `[start, stop]`.
    pub fn linspace(start: f64, stop: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        TauGrid::Values(values)
    }

    fn check(&self) -> Result<(), ScenarioError> {
        if let TauGrid::Values(v) = self {
            if v.is_empty() {
                return Err(ScenarioError::TauGrid("no durations given".into()));
            }
            if let Some(bad) = v.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
                return Err(ScenarioError::TauGrid(format!("duration {bad} is not positive")));
            }
            if v.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ScenarioError::TauGrid("durations must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    fn resolve(&self, pulse: &Pulse) -> Result<Vec<f64>, ScenarioError> {
        match self {
            TauGrid::Values(v) => Ok(v.clone()),
            TauGrid::PulseEnd => match *pulse {
                Pulse::TrapezoidEnvelope { duration, .. } | Pulse::SineSquaredRamps { duration, .. } => {
                    Ok(vec![duration])
                }
                Pulse::SineSquaredEnvelope { envelope_omega, .. } => Ok(vec![PI / envelope_omega]),
                _ => Err(ScenarioError::TauGrid(format!(
                    "a {} pulse has no end",
                    pulse.shape_name()
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub state: BoundState,
    pub pulse: PulseSpec,
    pub tau: TauGrid,
    /// Cartesian product, first sweep outermost.
    pub sweeps: Vec<Sweep>,
    pub tol: f64,
}

impl ScenarioConfig {
    pub fn new(state: BoundState, pulse: PulseSpec, tau: TauGrid) -> Self {
        Self {
            state,
            pulse,
            tau,
            sweeps: Vec::new(),
            tol: DEFAULT_TOL,
        }
    }

    pub fn sweep(mut self, param: SweepParam, values: Vec<f64>) -> Self {
        self.sweeps.push(Sweep { param, values });
        self
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ScenarioError::Tolerance(self.tol));
        }
        self.tau.check()?;
        for sweep in &self.sweeps {
            let fail = |reason: &str| {
                Err(ScenarioError::Sweep {
                    param: sweep.param,
                    reason: reason.to_string(),
                })
            };
            if sweep.values.is_empty() {
                return fail("no values given");
            }
            if self.sweeps.iter().filter(|s| s.param == sweep.param).count() > 1 {
                return fail("swept more than once");
            }
            let applies = match sweep.param {
                SweepParam::FieldStrength | SweepParam::PrincipalNumber => true,
                SweepParam::Omega => self.pulse.shape != PulseShape::Static,
                SweepParam::EnvelopeOmega => self.pulse.shape == PulseShape::SineSquared,
            };
            if !applies {
                return fail(&format!("not a parameter of a {} pulse", self.pulse.shape.name()));
            }
            if sweep.param == SweepParam::PrincipalNumber
                && sweep
                    .values
                    .iter()
                    .any(|&v| !(v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX)))
            {
                return fail("values must be positive integers");
            }
        }
        Ok(())
    }

    /// Every combination of sweep values, first sweep outermost.
    fn combinations(&self) -> Vec<Vec<f64>> {
        let mut combos = vec![Vec::new()];
        for sweep in &self.sweeps {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    sweep.values.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push(v);
                        next
                    })
                })
                .collect();
        }
        combos
    }

    /// All evaluation points in output order.
    pub fn points(&self) -> Result<Vec<ScenarioPoint>, ScenarioError> {
        self.validate()?;
        let mut points = Vec::new();
        for combo in self.combinations() {
            let mut spec = self.pulse.clone();
            let mut state = self.state;
            for (sweep, &value) in self.sweeps.iter().zip(&combo) {
                match sweep.param {
                    SweepParam::FieldStrength => spec.field_strength = value,
                    SweepParam::Omega => spec.omega = Some(value),
                    SweepParam::EnvelopeOmega => spec.envelope_omega = Some(value),
                    // integrality checked in validate
                    SweepParam::PrincipalNumber => {
                        state = BoundState::new(value as u32).map_err(|e| ScenarioError::Sweep {
                            param: sweep.param,
                            reason: e.to_string(),
                        })?
                    }
                }
            }
            let pulse = spec.resolve()?;
            let sweep_values: Vec<(SweepParam, f64)> = self.sweeps.iter().map(|s| s.param).zip(combo).collect();
            for tau in self.tau.resolve(&pulse)? {
                points.push(ScenarioPoint {
                    state,
                    pulse,
                    tau,
                    sweep_values: sweep_values.clone(),
                });
            }
        }
        Ok(points)
    }

    pub fn run(&self) -> Result<Vec<ScenarioRow>, ScenarioError> {
        self.run_with(Execution::default())
    }

    pub fn run_with(&self, execution: Execution) -> Result<Vec<ScenarioRow>, ScenarioError> {
        let points = self.points()?;
        let tol = self.tol;
        Ok(execution.map(&points, |p| ScenarioRow {
            sweep_values: p.sweep_values.clone(),
            report: evaluate_scenario(p.state, &p.pulse, p.tau, tol),
        }))
    }

    /// Swept parameters in column order.
    pub fn sweep_params(&self) -> Vec<SweepParam> {
        self.sweeps.iter().map(|s| s.param).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPoint {
    pub state: BoundState,
    pub pulse: Pulse,
    pub tau: f64,
    pub sweep_values: Vec<(SweepParam, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub sweep_values: Vec<(SweepParam, f64)>,
    pub report: BoundsReport,
}

impl ScenarioRow {
    pub fn sweep_value(&self, param: SweepParam) -> Option<f64> {
        self.sweep_values.iter().find(|(p, _)| *p == param).map(|&(_, v)| v)
    }
}

/// How rows are evaluated. Output order never depends on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
        }
    }
}

/// Bound columns a figure reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    StrongLower,
    StrongUpper,
    WeakLower,
    WeakUpper,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::StrongLower,
        BoundKind::StrongUpper,
        BoundKind::WeakLower,
        BoundKind::WeakUpper,
    ];

    pub fn column(self) -> &'static str {
        match self {
            BoundKind::StrongLower => "P_l",
            BoundKind::StrongUpper => "P_u",
            BoundKind::WeakLower => "P_lw",
            BoundKind::WeakUpper => "P_uw",
        }
    }

    pub fn value(self, report: &BoundsReport) -> Option<f64> {
        match self {
            BoundKind::StrongLower => report.strong_lower,
            BoundKind::StrongUpper => report.strong_upper,
            BoundKind::WeakLower => report.weak_lower,
            BoundKind::WeakUpper => report.weak_upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureKind {
    /// `N(c, ψ_100)` on a grid of displacements.
    NormCurve { displacements: Vec<f64> },
    Bounds {
        series: Vec<Series>,
        bounds: Vec<BoundKind>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: u32,
    pub title: &'static str,
    pub kind: FigureKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub label: String,
    pub row: ScenarioRow,
}

impl Figure {
    pub fn norm_curve(&self) -> Option<Vec<KhNormValue>> {
        match &self.kind {
            FigureKind::NormCurve { displacements } => {
                Some(displacements.iter().map(|&c| norm_closed_100(c)).collect())
            }
            FigureKind::Bounds { .. } => None,
        }
    }

    /// Rows of every series in series order; empty for the norm curve.
    pub fn run_with(&self, execution: Execution) -> Result<Vec<SeriesRow>, ScenarioError> {
        let FigureKind::Bounds { series, .. } = &self.kind else {
            return Ok(Vec::new());
        };
        let mut jobs = Vec::new();
        for s in series {
            for point in s.config.points()? {
                jobs.push((s.label.clone(), s.config.tol, point));
            }
        }
        Ok(execution.map(&jobs, |(label, tol, p)| SeriesRow {
            label: label.clone(),
            row: ScenarioRow {
                sweep_values: p.sweep_values.clone(),
                report: evaluate_scenario(p.state, &p.pulse, p.tau, *tol),
            },
        }))
    }

    pub fn run(&self) -> Result<Vec<SeriesRow>, ScenarioError> {
        self.run_with(Execution::default())
    }
}

fn state(n: u32) -> BoundState {
    // built-in figures only use n ≥ 1
    BoundState::new(n).unwrap_or(BoundState::GROUND)
}

/// `count` points on `(0, stop]`.
fn open_grid(stop: f64, count: usize) -> TauGrid {
    TauGrid::linspace(stop / count as f64, stop, count)
}

const INTENSITIES: [f64; 3] = [5.0, 10.0, 20.0];

fn field_grid() -> Vec<f64> {
    (1..=50).map(f64::from).collect()
}

fn ramp_series(n: u32, omega: f64, triples: [(f64, f64); 3], names: [&str; 3]) -> Vec<Series> {
    let mut out = Vec::new();
    for ((ramp, plateau), name) in triples.into_iter().zip(names) {
        for (shape, tag) in [
            (PulseShape::Trapezoid, "trapezoid"),
            (PulseShape::SineSquaredRamps, "sine_squared"),
        ] {
            let spec = PulseSpec::new(shape, 1.0).with_omega(omega).with_cycles(ramp, plateau);
            out.push(Series {
                label: format!("{tag} {name}"),
                config: ScenarioConfig::new(state(n), spec, TauGrid::PulseEnd)
                    .sweep(SweepParam::FieldStrength, field_grid()),
            });
        }
    }
    out
}

/// Scenario set for figure `id`.
pub fn builtin_figure(id: u32) -> Result<Figure, ScenarioError> {
    let single = |label: &str, config: ScenarioConfig| {
        vec![Series {
            label: label.to_string(),
            config,
        }]
    };
    let figure = match id {
        1 => Figure {
            id,
            title: "norm of the KH potential difference on psi_100 versus displacement",
            kind: FigureKind::NormCurve {
                displacements: (0..=500).map(|i| 0.1 * f64::from(i)).collect(),
            },
        },
        2 => Figure {
            id,
            title: "strong bounds, psi_100, static field",
            kind: FigureKind::Bounds {
                series: single(
                    "static",
                    ScenarioConfig::new(state(1), PulseSpec::new(PulseShape::Static, 5.0), open_grid(1.0, 200))
                        .sweep(SweepParam::FieldStrength, INTENSITIES.to_vec()),
                ),
                bounds: vec![BoundKind::StrongLower, BoundKind::StrongUpper],
            },
        },
        3 => Figure {
            id,
            title: "strong bounds, psi_100, monochromatic field, omega = 1.5",
            kind: FigureKind::Bounds {
                series: single(
                    "monochromatic",
                    ScenarioConfig::new(
                        state(1),
                        PulseSpec::new(PulseShape::Monochromatic, 5.0).with_omega(1.5),
                        open_grid(1.0, 200),
                    )
                    .sweep(SweepParam::FieldStrength, INTENSITIES.to_vec()),
                ),
                bounds: vec![BoundKind::StrongLower, BoundKind::StrongUpper],
            },
        },
        4 => Figure {
            id,
            title: "weak lower bound, psi_10 00, monochromatic field, E0 = 2",
            kind: FigureKind::Bounds {
                series: single(
                    "monochromatic",
                    ScenarioConfig::new(
                        state(10),
                        PulseSpec::new(PulseShape::Monochromatic, 2.0).with_omega(0.4),
                        open_grid(16.0, 320),
                    )
                    .sweep(SweepParam::Omega, vec![0.4, 4.0]),
                ),
                bounds: vec![BoundKind::WeakLower],
            },
        },
        5 => Figure {
            id,
            title: "weak lower bound, psi_20 00, monochromatic field, omega = 1.5, E0 = 20",
            kind: FigureKind::Bounds {
                series: single(
                    "monochromatic",
                    ScenarioConfig::new(
                        state(20),
                        PulseSpec::new(PulseShape::Monochromatic, 20.0).with_omega(1.5),
                        open_grid(2.0, 200),
                    ),
                ),
                bounds: vec![BoundKind::WeakLower],
            },
        },
        6 => Figure {
            id,
            title: "weak lower bound at pulse end, psi_34 00, trapezoid vs sine-squared ramps, omega = 1.5",
            kind: FigureKind::Bounds {
                series: ramp_series(
                    34,
                    1.5,
                    [(1.25, 12.0), (2.25, 10.0), (4.25, 6.0)],
                    ["5/4-12-5/4", "9/4-10-9/4", "17/4-6-17/4"],
                ),
                bounds: vec![BoundKind::WeakLower],
            },
        },
        7 => Figure {
            id,
            title: "weak upper bound at pulse end, psi_34 00, trapezoid vs sine-squared ramps, omega = 1.5",
            kind: FigureKind::Bounds {
                series: ramp_series(
                    34,
                    1.5,
                    [(0.5, 6.0), (1.5, 4.0), (2.5, 2.0)],
                    ["1/2-6-1/2", "3/2-4-3/2", "5/2-2-5/2"],
                ),
                bounds: vec![BoundKind::WeakUpper],
            },
        },
        8 | 9 => {
            let config = ScenarioConfig::new(
                state(30),
                PulseSpec::new(PulseShape::SineSquared, 20.0)
                    .with_omega(0.2)
                    .with_envelope_omega(0.01),
                open_grid(100.0, 400),
            );
            let config = if id == 9 {
                config.sweep(SweepParam::FieldStrength, INTENSITIES.to_vec())
            } else {
                config
            };
            Figure {
                id,
                title: if id == 8 {
                    "weak lower bound, psi_30 00, sine-squared envelope, omega = 0.2, Omega = 0.01, E0 = 20"
                } else {
                    "weak lower bound, psi_30 00, sine-squared envelope, omega = 0.2, Omega = 0.01"
                },
                kind: FigureKind::Bounds {
                    series: single("sine_squared", config),
                    bounds: vec![BoundKind::WeakLower],
                },
            }
        }
        10 => Figure {
            id,
            title:
                "weak lower bound after half an envelope cycle, sine-squared envelope, omega = 0.8, Omega = omega/13.5",
            kind: FigureKind::Bounds {
                series: single(
                    "sine_squared",
                    ScenarioConfig::new(
                        state(30),
                        PulseSpec::new(PulseShape::SineSquared, 1.0)
                            .with_omega(0.8)
                            .with_envelope_omega(0.8 / 13.5),
                        TauGrid::PulseEnd,
                    )
                    .sweep(SweepParam::PrincipalNumber, vec![30.0, 35.0, 40.0])
                    .sweep(SweepParam::FieldStrength, field_grid()),
                ),
                bounds: vec![BoundKind::WeakLower],
            },
        },
        _ => return Err(ScenarioError::UnknownFigure(id)),
    };
    Ok(figure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn static_config() -> ScenarioConfig {
        ScenarioConfig::new(
            BoundState::GROUND,
            PulseSpec::new(PulseShape::Static, 20.0),
            TauGrid::Values(vec![0.25, 0.5]),
        )
    }

    #[test]
    fn unswept_rows_follow_tau() {
        let rows = static_config().run().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].report.tau, 0.25);
        assert_eq!(rows[1].report.tau, 0.5);
        assert!(rows[0].sweep_values.is_empty());
    }

    #[test]
    fn sweeps_form_a_product_in_order() {
        let config = static_config()
            .sweep(SweepParam::PrincipalNumber, vec![1.0, 2.0])
            .sweep(SweepParam::FieldStrength, vec![5.0, 10.0, 20.0]);
        let rows = config.run().unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(
            rows[0].sweep_values,
            vec![(SweepParam::PrincipalNumber, 1.0), (SweepParam::FieldStrength, 5.0)]
        );
        assert_eq!(rows[2].sweep_value(SweepParam::FieldStrength), Some(10.0));
        assert_eq!(rows[11].report.state.n(), 2);
        assert_eq!(rows[11].report.pulse.field_strength(), 20.0);
    }

    #[test]
    fn sequential_and_default_agree_bitwise() {
        let config = ScenarioConfig::new(
            BoundState::GROUND,
            PulseSpec::new(PulseShape::Monochromatic, 5.0).with_omega(1.5),
            TauGrid::linspace(0.05, 1.0, 20),
        )
        .sweep(SweepParam::FieldStrength, vec![5.0, 20.0]);
        let a = config.run_with(Execution::Sequential).unwrap();
        let b = config.run().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs() {
        let mut c = static_config();
        c.tau = TauGrid::Values(vec![0.5, 0.25]);
        assert!(matches!(c.validate(), Err(ScenarioError::TauGrid(_))));
        c.tau = TauGrid::Values(vec![0.0, 1.0]);
        assert!(matches!(c.validate(), Err(ScenarioError::TauGrid(_))));
        let c = static_config().sweep(SweepParam::Omega, vec![1.0]);
        assert!(matches!(c.validate(), Err(ScenarioError::Sweep { .. })));
        let c = static_config().sweep(SweepParam::FieldStrength, vec![]);
        assert!(matches!(c.validate(), Err(ScenarioError::Sweep { .. })));
        let c = static_config().sweep(SweepParam::PrincipalNumber, vec![1.5]);
        assert!(matches!(c.validate(), Err(ScenarioError::Sweep { .. })));
        let mut c = static_config();
        c.tau = TauGrid::PulseEnd;
        assert!(matches!(c.points(), Err(ScenarioError::TauGrid(_))));
    }

    #[test]
    fn cycle_lengths_resolve() {
        let spec = PulseSpec::new(PulseShape::Trapezoid, 1.0)
            .with_omega(1.5)
            .with_cycles(1.25, 12.0);
        let Pulse::TrapezoidEnvelope { ramp, duration, .. } = spec.resolve().unwrap() else {
            panic!()
        };
        let period = 2.0 * PI / 1.5;
        assert!((ramp - 1.25 * period).abs() < 1e-14);
        assert!((duration - 14.5 * period).abs() < 1e-12);
        let mut bad = spec.clone();
        bad.total = Some(Length::Time(1.0));
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn builtin_figures_exist() {
        assert!(matches!(builtin_figure(0), Err(ScenarioError::UnknownFigure(0))));
        assert!(matches!(builtin_figure(11), Err(ScenarioError::UnknownFigure(11))));
        let fig2 = builtin_figure(2).unwrap();
        let FigureKind::Bounds { series, .. } = &fig2.kind else {
            panic!()
        };
        assert_eq!(series[0].config.pulse.shape, PulseShape::Static);
        assert_eq!(series[0].config.sweeps[0].values, INTENSITIES.to_vec());
        let fig10 = builtin_figure(10).unwrap();
        let FigureKind::Bounds { series, .. } = &fig10.kind else {
            panic!()
        };
        assert_eq!(series[0].config.tau, TauGrid::PulseEnd);
        assert_eq!(series[0].config.sweeps[0].param, SweepParam::PrincipalNumber);
        let fig1 = builtin_figure(1).unwrap();
        assert!(fig1.run().unwrap().is_empty());
        assert_eq!(fig1.norm_curve().unwrap()[0].value, 0.0);
        for id in 1..=10 {
            let fig = builtin_figure(id).unwrap();
            if let FigureKind::Bounds { series, .. } = &fig.kind {
                for s in series {
                    assert!(s.config.points().is_ok(), "figure {id} {}", s.label);
                }
            }
        }
    }
}
