//! Upper and lower bounds on the ionization probability.
//!
//! For `ψ_100` the strong bounds use the exact norm `N(c)`:
//!
//! ```text
//! P_u = { ∫₀^τ N(c(t)) dt + |c|/√3 + |b| }²
//! P_l = 1 - { ∫₀^τ N(c(t)) dt + 2 N(c)/(b² - 1) + (2/√3) |b|/(b² - 1) }²     (b² > 1)
//! ```
//!
//! with `b = b(τ)`, `c = c(τ)`. For any `ψ_n00` the weak bounds replace `N` by
//! the constant `2 n^{-3/2}`:
//!
//! ```text
//! P_uw = { 2τ/n^{3/2} + |c|/(n√3) + n √((5n² + 1)/6) |b| }²
//! P_lw = 1 - { 2τ/n^{3/2} + 4/(n^{3/2} (b² - 1/n²)) + 2|b|/(n√3 (b² - 1/n²)) }²     (b² > 1/n²)
//! ```
//!
//! Values are reported as computed, outside `[0, 1]` included; the
//! `*_informative` flags say whether a bound actually constrains anything.

use thiserror::Error;

use crate::hydrogen::BoundState;
use crate::khnorm::{norm_closed_100, norm_weak_bound};
use crate::pulses::{quadrature_panels, Pulse, PulseError};
use crate::quad::{Integrator, QuadError};

pub const BELOW_THRESHOLD: &str = "momentum transfer below ionization threshold";
pub const STRONG_NEEDS_GROUND_STATE: &str = "strong bounds need the closed-form norm, available for n = 1 only";

/// Relative guard on the validity threshold `b² > 1/n²`.
pub const THRESHOLD_GUARD: f64 = 1e-9;

const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("duration tau = {0} must be positive and finite")]
    InvalidDuration(f64),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error("time integral of the norm failed: {0}")]
    Quadrature(#[from] QuadError),
}

fn check_tau(tau: f64) -> Result<(), BoundsError> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidDuration(tau))
    }
}

/// `b(τ)² > 1/n²`, with a relative guard against the degenerate threshold.
pub fn lower_bound_valid(state: BoundState, momentum_transfer: f64) -> bool {
    let n = f64::from(state.n());
    momentum_transfer * momentum_transfer > (1.0 + THRESHOLD_GUARD) / (n * n)
}

/// `∫₀^τ norm(c(t)) dt` by adaptive quadrature on panels no longer than half
/// a field period.
pub fn norm_time_integral<F: Fn(f64) -> f64>(pulse: &Pulse, tau: f64, norm: F, tol: f64) -> Result<f64, BoundsError> {
    check_tau(tau)?;
    pulse.validate()?;
    let kin = pulse.kinematics();
    let panels = quadrature_panels(pulse, tau);
    // per-panel share of the absolute tolerance
    let q = Integrator::new(tol / panels.len() as f64, tol);
    let mut total = 0.0;
    for (a, b) in panels {
        total += q.integrate(|t| norm(kin.displacement(t)), a, b)?.value;
    }
    Ok(total)
}

fn ground_norm(c: f64) -> f64 {
    norm_closed_100(c).value
}

/// Strong lower bound for `ψ_100`; `None` when `b(τ)² ≤ 1`.
pub fn strong_lower_100(pulse: &Pulse, tau: f64, tol: f64) -> Result<Option<f64>, BoundsError> {
    check_tau(tau)?;
    let (b, c) = pulse.kinematics().momentum_and_displacement(tau);
    if !lower_bound_valid(BoundState::GROUND, b) {
        return Ok(None);
    }
    let integral = norm_time_integral(pulse, tau, ground_norm, tol)?;
    Ok(Some(strong_lower_from_parts(integral, b, c)))
}

fn strong_lower_from_parts(integral: f64, b: f64, c: f64) -> f64 {
    let gap = b * b - 1.0;
    let bracket = integral + 2.0 * ground_norm(c) / gap + 2.0 * FRAC_1_SQRT_3 * b.abs() / gap;
    1.0 - bracket * bracket
}

/// Strong upper bound for `ψ_100`.
pub fn strong_upper_100(pulse: &Pulse, tau: f64, tol: f64) -> Result<f64, BoundsError> {
    let (b, c) = pulse.kinematics().momentum_and_displacement(tau);
    let integral = norm_time_integral(pulse, tau, ground_norm, tol)?;
    Ok(strong_upper_from_parts(integral, b, c))
}

fn strong_upper_from_parts(integral: f64, b: f64, c: f64) -> f64 {
    (integral + c.abs() * FRAC_1_SQRT_3 + b.abs()).powi(2)
}

fn weak_lower_from_parts(state: BoundState, tau: f64, b: f64) -> Option<f64> {
    if !lower_bound_valid(state, b) {
        return None;
    }
    let n = f64::from(state.n());
    let weak_norm = norm_weak_bound(state);
    let gap = b * b - 1.0 / (n * n);
    let bracket = weak_norm * tau + 2.0 * weak_norm / gap + 2.0 * FRAC_1_SQRT_3 * b.abs() / (n * gap);
    Some(1.0 - bracket * bracket)
}

fn weak_upper_from_parts(state: BoundState, tau: f64, b: f64, c: f64) -> f64 {
    let n = f64::from(state.n());
    let z_norm = state.constants().z_norm_sq.sqrt();
    let bracket = norm_weak_bound(state) * tau + c.abs() * FRAC_1_SQRT_3 / n + z_norm * b.abs();
    bracket * bracket
}

/// Weak lower bound for `ψ_n00`; `None` when `b(τ)² ≤ 1/n²`.
pub fn weak_lower_n00(state: BoundState, pulse: &Pulse, tau: f64) -> Result<Option<f64>, BoundsError> {
    check_tau(tau)?;
    pulse.validate()?;
    let b = pulse.kinematics().momentum_transfer(tau);
    Ok(weak_lower_from_parts(state, tau, b))
}

/// Weak upper bound for `ψ_n00`.
pub fn weak_upper_n00(state: BoundState, pulse: &Pulse, tau: f64) -> Result<f64, BoundsError> {
    check_tau(tau)?;
    pulse.validate()?;
    let (b, c) = pulse.kinematics().momentum_and_displacement(tau);
    Ok(weak_upper_from_parts(state, tau, b, c))
}

/// All four bounds for one `(state, pulse, τ)` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub pulse: Pulse,
    pub tau: f64,
    pub state: BoundState,
    pub strong_lower: Option<f64>,
    pub strong_upper: Option<f64>,
    pub weak_lower: Option<f64>,
    pub weak_upper: Option<f64>,
    pub b_tau: f64,
    pub c_tau: f64,
    /// `∫₀^τ N(c(t)) dt` with the exact norm for `n = 1`, with the weak
    /// constant `2 n^{-3/2}` otherwise.
    pub norm_time_integral: f64,
    pub lower_valid: bool,
    pub lower_invalid_reason: Option<String>,
    /// Why the strong bounds are absent, if they are.
    pub strong_absent_reason: Option<String>,
    /// The tightest available upper bound is `≤ 1`.
    pub upper_informative: bool,
    /// The tightest available lower bound is `≥ 0`.
    pub lower_informative: bool,
    pub errors: Vec<BoundsError>,
}

impl BoundsReport {
    pub fn tightest_upper(&self) -> Option<f64> {
        self.strong_upper.or(self.weak_upper)
    }

    pub fn tightest_lower(&self) -> Option<f64> {
        self.strong_lower.or(self.weak_lower)
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }
}

/// Evaluate every bound. Component failures are collected in
/// [`BoundsReport::errors`]; the remaining bounds are still filled in.
pub fn evaluate_scenario(state: BoundState, pulse: &Pulse, tau: f64, tol: f64) -> BoundsReport {
    let mut report = BoundsReport {
        pulse: *pulse,
        tau,
        state,
        strong_lower: None,
        strong_upper: None,
        weak_lower: None,
        weak_upper: None,
        b_tau: f64::NAN,
        c_tau: f64::NAN,
        norm_time_integral: f64::NAN,
        lower_valid: false,
        lower_invalid_reason: None,
        strong_absent_reason: None,
        upper_informative: false,
        lower_informative: false,
        errors: Vec::new(),
    };
    if let Err(e) = check_tau(tau) {
        report.errors.push(e);
        return report;
    }
    if let Err(e) = pulse.validate() {
        report.errors.push(e.into());
        return report;
    }

    let (b, c) = pulse.kinematics().momentum_and_displacement(tau);
    report.b_tau = b;
    report.c_tau = c;
    report.lower_valid = lower_bound_valid(state, b);
    if !report.lower_valid {
        report.lower_invalid_reason = Some(BELOW_THRESHOLD.to_string());
    }

    report.weak_upper = Some(weak_upper_from_parts(state, tau, b, c));
    report.weak_lower = weak_lower_from_parts(state, tau, b);
    report.norm_time_integral = norm_weak_bound(state) * tau;

    if state == BoundState::GROUND {
        match norm_time_integral(pulse, tau, ground_norm, tol) {
            Ok(integral) => {
                report.norm_time_integral = integral;
                report.strong_upper = Some(strong_upper_from_parts(integral, b, c));
                if report.lower_valid {
                    report.strong_lower = Some(strong_lower_from_parts(integral, b, c));
                }
            }
            Err(e) => {
                report.strong_absent_reason = Some(e.to_string());
                report.errors.push(e);
            }
        }
    } else {
        report.strong_absent_reason = Some(STRONG_NEEDS_GROUND_STATE.to_string());
    }

    report.upper_informative = report.tightest_upper().is_some_and(|u| u <= 1.0);
    report.lower_informative = report.tightest_lower().is_some_and(|l| l >= 0.0);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-10;

    fn static_field(e0: f64) -> Pulse {
        Pulse::Static { field_strength: e0 }
    }

    /// Composite trapezoid rule on `n` intervals.
    fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + h * i as f64)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn constant_norm_integrates_to_length() {
        let v = norm_time_integral(&static_field(10.0), 0.5, |_| 2.0, TOL).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn norm_integral_matches_dense_trapezoid() {
        let v = norm_time_integral(&static_field(10.0), 0.4, ground_norm, TOL).unwrap();
        let reference = trapezoid(|t| ground_norm(5.0 * t * t), 0.0, 0.4, 10_000);
        assert!((v - reference).abs() < 1e-6, "{v} vs {reference}");
    }

    #[test]
    fn norm_integral_vanishes_linearly() {
        let pulse = Pulse::Monochromatic {
            field_strength: 3.0,
            omega: 1.5,
        };
        let a = norm_time_integral(&pulse, 1e-3, ground_norm, 1e-14).unwrap();
        let b = norm_time_integral(&pulse, 2e-3, ground_norm, 1e-14).unwrap();
        assert!(a > 0.0 && a < 1e-3 && b < 2e-3);
    }

    #[test]
    fn strong_lower_static_regression() {
        let pulse = static_field(20.0);
        let v = strong_lower_100(&pulse, 0.5, TOL).unwrap().unwrap();
        let integral = trapezoid(|t| ground_norm(10.0 * t * t), 0.0, 0.5, 20_000);
        let direct = 1.0 - (integral + 2.0 * ground_norm(2.5) / 99.0 + 2.0 / 3f64.sqrt() * 10.0 / 99.0).powi(2);
        assert!((v - direct).abs() < 1e-7, "{v} vs {direct}");
        assert!((v - 0.683_073_050_197_795_1).abs() < 1e-10, "{v}");
    }

    #[test]
    fn strong_lower_gate() {
        assert_eq!(strong_lower_100(&static_field(1.0), 0.5, TOL).unwrap(), None);
        let cycle = Pulse::Monochromatic {
            field_strength: 2.0,
            omega: 1.0,
        };
        assert_eq!(strong_lower_100(&cycle, 2.0 * PI, TOL).unwrap(), None);
    }

    #[test]
    fn strong_upper_static_regression() {
        let v = strong_upper_100(&static_field(5.0), 0.2, TOL).unwrap();
        let integral = trapezoid(|t| ground_norm(2.5 * t * t), 0.0, 0.2, 20_000);
        let direct = (integral + 0.1 / 3f64.sqrt() + 1.0).powi(2);
        assert!((v - direct).abs() < 1e-7, "{v} vs {direct}");
        assert!((v - 1.247_149_322_714_900_9).abs() < 1e-10, "{v}");
        assert!(strong_upper_100(&static_field(5.0), 1e-6, TOL).unwrap() < 1e-10);
    }

    #[test]
    fn weak_upper_special_value() {
        // integer-cycle ramps and plateau leave b = c = 0 at the end of the pulse
        let omega = 1.5;
        let period = 2.0 * PI / omega;
        let pulse = Pulse::TrapezoidEnvelope {
            field_strength: 4.0,
            omega,
            ramp: period,
            duration: 3.0 * period,
        };
        let tau = 3.0 * period;
        let (b, c) = pulse.kinematics().momentum_and_displacement(tau);
        assert!(b.abs() < 1e-13 && c.abs() < 1e-12, "b = {b}, c = {c}");
        let state = BoundState::new(30).unwrap();
        let special = weak_upper_from_parts(state, 1.0, 0.0, 0.0);
        assert!((special - 4.0 / 27_000.0).abs() <= 4.0 * f64::EPSILON * special);
        let v = weak_upper_n00(BoundState::GROUND, &pulse, tau).unwrap();
        assert!((v - 4.0 * tau * tau).abs() < 1e-10 * v);
    }

    #[test]
    fn weak_bounds_are_weaker() {
        let pulse = static_field(20.0);
        let report = evaluate_scenario(BoundState::GROUND, &pulse, 0.5, TOL);
        assert!(report.weak_lower.unwrap() <= report.strong_lower.unwrap());
        assert!(report.strong_upper.unwrap() <= report.weak_upper.unwrap());
    }

    #[test]
    fn weak_lower_gate() {
        let cycle = Pulse::Monochromatic {
            field_strength: 2.0,
            omega: 1.0,
        };
        assert_eq!(weak_lower_n00(BoundState::GROUND, &cycle, 2.0 * PI).unwrap(), None);
        // b = 0.2 passes for n = 10 (threshold 0.01) but not for n = 1
        let weak = static_field(0.4);
        assert!(weak_lower_n00(BoundState::new(10).unwrap(), &weak, 0.5)
            .unwrap()
            .is_some());
        assert!(weak_lower_n00(BoundState::GROUND, &weak, 0.5).unwrap().is_none());
    }

    #[test]
    fn threshold_guard() {
        let n = BoundState::new(2).unwrap();
        assert!(!lower_bound_valid(n, 0.5));
        assert!(!lower_bound_valid(n, 0.5 * (1.0 + 1e-11)));
        assert!(lower_bound_valid(n, 0.5 * (1.0 + 1e-8)));
    }

    #[test]
    fn report_for_static_ground_state() {
        let r = evaluate_scenario(BoundState::GROUND, &static_field(20.0), 0.5, TOL);
        assert!(r.errors.is_empty());
        assert!(r.lower_valid && r.lower_invalid_reason.is_none());
        assert!(r.strong_lower.is_some() && r.strong_upper.is_some());
        assert!(r.weak_lower.is_some() && r.weak_upper.is_some());
        assert_eq!(r.b_tau, 10.0);
        assert!((r.c_tau - 2.5).abs() < 1e-15);
        assert!(!r.upper_informative);
        assert!(r.lower_informative);
    }

    #[test]
    fn report_for_full_cycle() {
        let cycle = Pulse::Monochromatic {
            field_strength: 2.0,
            omega: 1.0,
        };
        let r = evaluate_scenario(BoundState::GROUND, &cycle, 2.0 * PI, TOL);
        assert!(r.strong_lower.is_none() && r.weak_lower.is_none());
        assert!(r.strong_upper.is_some() && r.weak_upper.is_some());
        assert_eq!(r.lower_invalid_reason.as_deref(), Some(BELOW_THRESHOLD));
        assert!(!r.lower_informative);
    }

    #[test]
    fn report_for_half_cycle_trapezoid() {
        let omega = 1.5;
        let period = 2.0 * PI / omega;
        let pulse = Pulse::TrapezoidEnvelope {
            field_strength: 20.0,
            omega,
            ramp: 2.5 * period,
            duration: 9.0 * period,
        };
        let r = evaluate_scenario(BoundState::new(34).unwrap(), &pulse, 9.0 * period, TOL);
        assert!(r.b_tau.abs() < 1e-12);
        assert!(r.weak_lower.is_none() && r.strong_lower.is_none());
        assert_eq!(r.strong_absent_reason.as_deref(), Some(STRONG_NEEDS_GROUND_STATE));
        assert!(r.weak_upper.is_some());
    }

    #[test]
    fn report_records_bad_input() {
        let r = evaluate_scenario(BoundState::GROUND, &static_field(1.0), -1.0, TOL);
        assert!(matches!(r.errors.as_slice(), [BoundsError::InvalidDuration(_)]));
        let r = evaluate_scenario(BoundState::GROUND, &static_field(-1.0), 1.0, TOL);
        assert!(matches!(r.errors.as_slice(), [BoundsError::Pulse(_)]));
    }
}
