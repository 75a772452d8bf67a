//! Exponential integrals `Ei(x)` and `E1(x)` for positive real arguments.
//!
//! Two regimes are used for each function:
//!
//! * `Ei`: convergent power series `γ + ln x + Σ x^k / (k·k!)` for `x ≤ 40`,
//!   asymptotic series `e^x/x · Σ k!/x^k` (truncated at its smallest term) above.
//! * `E1`: alternating power series for `x ≤ 1`, modified Lentz evaluation of the
//!   classical continued fraction above.
//!
//! Negative arguments of `Ei` are not accepted; use `Ei(-x) = -E1(x)`.
//!
//! The scaled variants `e^{-x} Ei(x)` and `e^{x} E1(x)` stay finite for arguments
//! where the unscaled values overflow or underflow, and are what the
//! Kramers-Henneberger norm uses for large displacements.

use thiserror::Error;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EI_SERIES_LIMIT: f64 = 40.0;
const E1_SERIES_LIMIT: f64 = 1.0;
const MAX_ITER: usize = 500;

/// Below this magnitude `Ei` is considered to be in the neighbourhood of its real
/// zero, and the error estimate is reported against unit scale instead of `|Ei|`.
const EI_ZERO_WINDOW: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument {0} outside the domain x > 0 (finite)")]
    Domain(f64),
    #[error("no convergence after {0} iterations at x = {1}")]
    NoConvergence(usize, f64),
}

/// Value of a special function together with an a-priori error estimate.
///
/// `est_rel_error` is relative to `|value|`, except for `Ei` inside the
/// neighbourhood of its zero at `x ≈ 0.3725` where it is relative to unit scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EiResult {
    pub value: f64,
    pub est_rel_error: f64,
}

fn check_domain(x: f64) -> Result<(), SpecFunError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(SpecFunError::Domain(x))
    }
}

/// Sum `Σ_{k≥1} x^k / (k·k!)` and the sum of absolute term values.
fn ei_power_sum(x: f64) -> Result<(f64, usize), SpecFunError> {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=MAX_ITER {
        let kf = k as f64;
        term *= x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib <= sum * 1e-17 {
            return Ok((sum, k));
        }
    }
    Err(SpecFunError::NoConvergence(MAX_ITER, x))
}

/// `e^{-x} Ei(x)` from the asymptotic series, valid for large `x`.
fn ei_scaled_asymptotic(x: f64) -> (f64, f64) {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * k / x;
        if next >= term || next < f64::EPSILON * 1e-3 * sum {
            // truncation error is of the order of the first omitted term
            return (sum / x, next.min(term) / sum + 4.0 * f64::EPSILON);
        }
        term = next;
        sum += term;
        k += 1.0;
    }
}

/// Exponential integral `Ei(x) = -PV ∫_{-x}^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_ei(x: f64) -> Result<EiResult, SpecFunError> {
    check_domain(x)?;
    if x <= EI_SERIES_LIMIT {
        let (sum, terms) = ei_power_sum(x)?;
        let log_part = EULER_GAMMA + x.ln();
        let value = log_part + sum;
        let abs_err = f64::EPSILON * (log_part.abs() + (terms as f64).sqrt() * sum + 1.0);
        let scale = if value.abs() < EI_ZERO_WINDOW { 1.0 } else { value.abs() };
        Ok(EiResult {
            value,
            est_rel_error: abs_err / scale,
        })
    } else {
        let (scaled, rel) = ei_scaled_asymptotic(x);
        Ok(EiResult {
            value: scaled * x.exp(),
            est_rel_error: rel + 2.0 * f64::EPSILON,
        })
    }
}

/// Scaled exponential integral `e^{-x} Ei(x)` for `x > 0`; finite for all such `x`.
pub fn exp_integral_ei_scaled(x: f64) -> Result<EiResult, SpecFunError> {
    check_domain(x)?;
    if x <= EI_SERIES_LIMIT {
        let r = exp_integral_ei(x)?;
        Ok(EiResult {
            value: r.value * (-x).exp(),
            est_rel_error: r.est_rel_error + 2.0 * f64::EPSILON,
        })
    } else {
        let (value, est_rel_error) = ei_scaled_asymptotic(x);
        Ok(EiResult { value, est_rel_error })
    }
}

fn e1_series(x: f64) -> Result<EiResult, SpecFunError> {
    // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for k in 1..=MAX_ITER {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        abs_sum += contrib.abs();
        if contrib.abs() <= 1e-17 * abs_sum {
            let log_part = -EULER_GAMMA - x.ln();
            let value = log_part - sum;
            let abs_err = f64::EPSILON * (log_part.abs() + abs_sum);
            return Ok(EiResult {
                value,
                est_rel_error: abs_err / value.abs(),
            });
        }
    }
    Err(SpecFunError::NoConvergence(MAX_ITER, x))
}

/// `e^{x} E1(x)` via the continued fraction
/// `1/(x+1- 1/(x+3- 4/(x+5- ...)))`, modified Lentz.
fn e1_scaled_continued_fraction(x: f64) -> Result<EiResult, SpecFunError> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(EiResult {
                value: h,
                est_rel_error: f64::EPSILON * (i as f64).sqrt() * 2.0,
            });
        }
    }
    Err(SpecFunError::NoConvergence(MAX_ITER, x))
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<EiResult, SpecFunError> {
    check_domain(x)?;
    if x <= E1_SERIES_LIMIT {
        e1_series(x)
    } else {
        let r = e1_scaled_continued_fraction(x)?;
        Ok(EiResult {
            value: r.value * (-x).exp(),
            est_rel_error: r.est_rel_error + 2.0 * f64::EPSILON,
        })
    }
}

/// Scaled exponential integral `e^{x} E1(x)` for `x > 0`.
pub fn exp_integral_e1_scaled(x: f64) -> Result<EiResult, SpecFunError> {
    check_domain(x)?;
    if x <= E1_SERIES_LIMIT {
        let r = e1_series(x)?;
        Ok(EiResult {
            value: r.value * x.exp(),
            est_rel_error: r.est_rel_error + 2.0 * f64::EPSILON,
        })
    } else {
        e1_scaled_continued_fraction(x)
    }
}
