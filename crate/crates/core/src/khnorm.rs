//! Norm of the Kramers-Henneberger potential difference
//! `N(c, ψ) = ‖(V(x - c e_z) - V(x)) ψ‖` for Coulomb `V = -1/|x|` and s-states.
//!
//! Expanding the square gives
//!
//! ```text
//! N² = ⟨ψ, V² ψ⟩ + ⟨ψ, |x - c|⁻² ψ⟩ - 2 ⟨ψ, |x - c|⁻¹ |x|⁻¹ ψ⟩
//!    =  ⟨1/r²⟩   +   shifted-square   -   2 · mixed
//! ```
//!
//! Three routes are provided:
//!
//! * a closed form for `ψ_100` (mixed element `(1 - e^{-2c})/c`, shifted square
//!   through exponential integrals at argument `2c`),
//! * the log-kernel integral for the shifted square of `ψ_100`,
//! * the partial-wave (multipole) sums for any `ψ_n00`, with Richardson
//!   acceleration of the slowly converging `l`-sum.
//!
//! The two numerical routes share no code with the closed form beyond the
//! quadrature engine.

use thiserror::Error;

use crate::hydrogen::{radial_extent, radial_wavefunction_n0, state_constants, BoundState};
use crate::quad::{Integrator, QuadError};
use crate::specfun::{exp_integral_e1_scaled, exp_integral_ei_scaled, EULER_GAMMA};

/// `lim_{y→0} ⟨ψ_100, |x - y|⁻¹ |x|⁻¹ ψ_100⟩`.
pub const MIXED_ELEMENT_100_AT_ZERO: f64 = 2.0;

/// Below this displacement the closed form is replaced by its power series.
pub const SMALL_DISPLACEMENT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KhNormError {
    #[error("displacement {0} must be positive")]
    Domain(f64),
    #[error("at least {min} partial waves are required, got {got}")]
    TooFewPartialWaves { min: usize, got: usize },
    #[error("partial-wave sum not converged within l_max = {l_max}: partial sum {partial_sum}, last term {last_term:e}, extrapolation change {change:e}")]
    PartialWaveNonConvergence {
        l_max: usize,
        partial_sum: f64,
        last_term: f64,
        change: f64,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    ClosedForm,
    WeakBound,
    PartialWaveOracle,
    LogKernelOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KhNormValue {
    pub c: f64,
    pub value: f64,
    pub method: NormMethod,
}

/// `⟨ψ_100, |x - y|⁻¹ |x|⁻¹ ψ_100⟩ = (1 - e^{-2y})/y`.
pub fn mixed_element_100(y: f64) -> Result<f64, KhNormError> {
    if !(y.is_finite() && y > 0.0) {
        return Err(KhNormError::Domain(y));
    }
    if y < 1e-6 {
        return Ok(2.0 - 2.0 * y + 4.0 / 3.0 * y * y);
    }
    Ok(-(-2.0 * y).exp_m1() / y)
}

/// The two exponential-integral candidates for `⟨ψ_100, |x - y|⁻² ψ_100⟩`.
///
/// With `s` the Ei argument (`s = y` or `s = 2y`) both read
/// `(1 + 1/s) e^{-s} Ei(s) + (1 - 1/s) e^{s} Ei(-s)`. Only
/// [`ClosedFormCandidate::DoubledArgument`] reproduces the log-kernel integral;
/// the other is the same function at half the displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormCandidate {
    UnscaledArgument,
    DoubledArgument,
}

impl ClosedFormCandidate {
    pub fn label(self) -> &'static str {
        match self {
            ClosedFormCandidate::UnscaledArgument => "argument c, prefactors (1 +- 1/c)",
            ClosedFormCandidate::DoubledArgument => "argument 2c, prefactors (1 +- 1/(2c))",
        }
    }

    pub fn squared_element(self, y: f64) -> Result<f64, KhNormError> {
        if !(y.is_finite() && y > 0.0) {
            return Err(KhNormError::Domain(y));
        }
        let s = match self {
            ClosedFormCandidate::UnscaledArgument => y,
            ClosedFormCandidate::DoubledArgument => 2.0 * y,
        };
        let ei = exp_integral_ei_scaled(s).map_err(|_| KhNormError::Domain(y))?.value;
        let e1 = exp_integral_e1_scaled(s).map_err(|_| KhNormError::Domain(y))?.value;
        // e^{s} Ei(-s) = -e^{s} E1(s)
        Ok((ei - e1) + (ei + e1) / s)
    }
}

/// `⟨ψ_100, |x - y|⁻² ψ_100⟩` in closed form.
pub fn squared_element_100(y: f64) -> Result<f64, KhNormError> {
    ClosedFormCandidate::DoubledArgument.squared_element(y)
}

/// Power series of `N²(c, ψ_100)` about `c = 0`; coefficients are
/// `(a_k, b_k)` in `Σ c^k (a_k + b_k L)`, `L = γ + ln 2c`.
const SMALL_C_SERIES: [(f64, f64); 11] = [
    (4.0, 0.0),
    (-56.0 / 9.0, 8.0 / 3.0),
    (4.0 / 3.0, 0.0),
    (-608.0 / 225.0, 16.0 / 15.0),
    (8.0 / 45.0, 0.0),
    (-4636.0 / 11025.0, 16.0 / 105.0),
    (4.0 / 315.0, 0.0),
    (-29776.0 / 893_025.0, 32.0 / 2835.0),
    (8.0 / 14175.0, 0.0),
    (-172_966.0 / 108_056_025.0, 16.0 / 31185.0),
    (8.0 / 467_775.0, 0.0),
];

fn norm_sq_small_c(c: f64) -> f64 {
    let log_term = EULER_GAMMA + (2.0 * c).ln();
    let mut power = c;
    let mut sum = 0.0;
    for &(a, b) in &SMALL_C_SERIES {
        sum += power * (a + b * log_term);
        power *= c;
    }
    sum
}

/// `N²(c, ψ_100)` from the closed form.
pub fn norm_sq_closed_100(c: f64) -> f64 {
    let c = c.abs();
    if c == 0.0 {
        return 0.0;
    }
    if c < SMALL_DISPLACEMENT {
        return norm_sq_small_c(c);
    }
    // domain errors are impossible for c > 0
    let shifted = squared_element_100(c).unwrap_or(0.0);
    let mixed = mixed_element_100(c).unwrap_or(0.0);
    (2.0 + shifted - 2.0 * mixed).max(0.0)
}

/// `N(c, ψ_100)`; even in `c`, `N(0) = 0`, increasing to `√2`.
pub fn norm_closed_100(c: f64) -> KhNormValue {
    KhNormValue {
        c,
        value: norm_sq_closed_100(c).sqrt(),
        method: NormMethod::ClosedForm,
    }
}

/// The `c`-independent estimate `N(c, ψ_n00) ≤ √(2⟨V²⟩) = 2 n^{-3/2}`.
pub fn norm_weak_bound(state: BoundState) -> f64 {
    (2.0 * state_constants(state).v_sq_expectation).sqrt()
}

/// `⟨ψ_100, |x - y|⁻² ψ_100⟩` from the angular-averaged log kernel,
/// `(2/y) ∫₀^∞ r e^{-2r} ln|(y + r)/(y - r)| dr`, split at the singular point `r = y`.
pub fn squared_element_100_oracle(y: f64, tol: f64) -> Result<f64, KhNormError> {
    if !(y.is_finite() && y > 0.0) {
        return Err(KhNormError::Domain(y));
    }
    let q = Integrator::new(tol, tol);
    let inner = |r: f64| r * (-2.0 * r).exp() * (2.0 * r / (y - r)).ln_1p();
    let outer = |r: f64| r * (-2.0 * r).exp() * (2.0 * y / (r - y)).ln_1p();
    let mut total = q.integrate(inner, 0.0, y)?.value;
    if y < 400.0 {
        total += q.integrate_to_infinity(outer, y, 1.0)?.value;
    }
    Ok(2.0 / y * total)
}

/// `N(c, ψ_100)` with the shifted square taken from the log-kernel oracle.
pub fn norm_log_kernel_oracle_100(c: f64, tol: f64) -> Result<KhNormValue, KhNormError> {
    let y = c.abs();
    let shifted = squared_element_100_oracle(y, tol)?;
    let mixed = mixed_element_100(y)?;
    Ok(KhNormValue {
        c,
        value: (2.0 + shifted - 2.0 * mixed).max(0.0).sqrt(),
        method: NormMethod::LogKernelOracle,
    })
}

/// Integrals of `R_{n0}(r)² w(r)` over radial intervals, split geometrically
/// around the extent of the state so no panel misses the density.
struct RadialDensity {
    n: u32,
    q: Integrator,
}

impl RadialDensity {
    fn density(&self, r: f64) -> f64 {
        radial_wavefunction_n0(self.n, r).powi(2)
    }

    fn cuts(&self, a: f64, b: f64) -> Vec<f64> {
        let scale = f64::from(self.n * self.n);
        let mut pts = vec![a];
        let mut p = scale / 8.0;
        while p < b {
            if p > a {
                pts.push(p);
            }
            p *= 2.0;
        }
        pts.push(b);
        pts
    }

    fn integrate<W: Fn(f64) -> f64>(&self, weight: W, a: f64, b: f64) -> Result<f64, QuadError> {
        let b = b.min(radial_extent(self.n));
        if b <= a {
            return Ok(0.0);
        }
        let pts = self.cuts(a, b);
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += self.q.integrate(|r| self.density(r) * weight(r), w[0], w[1])?.value;
        }
        Ok(total)
    }

    fn integrate_from<W: Fn(f64) -> f64>(&self, weight: W, a: f64) -> Result<f64, QuadError> {
        self.integrate(weight, a, radial_extent(self.n))
    }
}

fn check_displacement(y: f64) -> Result<f64, KhNormError> {
    if y.is_finite() && y != 0.0 {
        Ok(y.abs())
    } else {
        Err(KhNormError::Domain(y))
    }
}

/// Mixed element `∫₀^y (r/y) R² dr + ∫_y^∞ R² dr` by quadrature.
pub fn mixed_element_partial_wave(state: BoundState, y: f64, tol: f64) -> Result<f64, KhNormError> {
    let y = check_displacement(y)?;
    let radial = RadialDensity {
        n: state.n(),
        q: Integrator::new(tol, tol),
    };
    Ok(radial.integrate(|r| r / y, 0.0, y)? + radial.integrate_from(|_| 1.0, y)?)
}

/// Multipole term `l` of the shifted square,
/// `(1/(2l+1)) [∫₀^y (r/y)^{2l+2} R² dr + ∫_y^∞ (y/r)^{2l} R² dr]`.
fn partial_wave_term(radial: &RadialDensity, y: f64, l: usize) -> Result<f64, QuadError> {
    let inner_power = (2 * l + 2) as i32;
    let outer_power = (2 * l) as i32;
    let inner = radial.integrate(|r| (r / y).powi(inner_power), 0.0, y)?;
    // (y/r)^{2l} is below 1e-300 past this radius
    let reach = if l == 0 {
        f64::INFINITY
    } else {
        y * (345.0 / l as f64).exp()
    };
    let outer = radial.integrate(|r| (y / r).powi(outer_power), y, reach)?;
    Ok((inner + outer) / (2 * l + 1) as f64)
}

/// Raw partial sums `Σ_{l=0}^{L}` of the multipole series for `L = 0..=l_max`.
pub fn squared_element_partial_sums(
    state: BoundState,
    y: f64,
    l_max: usize,
    tol: f64,
) -> Result<Vec<f64>, KhNormError> {
    let y = check_displacement(y)?;
    let radial = RadialDensity {
        n: state.n(),
        q: Integrator::new(tol, tol),
    };
    let mut sums = Vec::with_capacity(l_max + 1);
    let mut acc = 0.0;
    for l in 0..=l_max {
        acc += partial_wave_term(&radial, y, l)?;
        sums.push(acc);
    }
    Ok(sums)
}

/// Shifted square from the multipole series.
///
/// The terms decay like `1/l²`, so the partial sums `S_L` carry a tail with an
/// expansion in powers of `1/L`. Sums at `L = 8, 16, 32, ...` are
/// Richardson-extrapolated until successive diagonal entries agree to `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialWaveSum {
    pub value: f64,
    pub partial_sum: f64,
    pub terms: usize,
    pub last_term: f64,
    pub extrapolation_change: f64,
}

pub const MIN_PARTIAL_WAVES: usize = 8;

pub fn squared_element_partial_wave(
    state: BoundState,
    y: f64,
    l_max: usize,
    tol: f64,
) -> Result<PartialWaveSum, KhNormError> {
    if l_max < MIN_PARTIAL_WAVES {
        return Err(KhNormError::TooFewPartialWaves {
            min: MIN_PARTIAL_WAVES,
            got: l_max,
        });
    }
    let y = check_displacement(y)?;
    // the quadrature error of each term accumulates over the sum
    let radial = RadialDensity {
        n: state.n(),
        q: Integrator::new(tol * 1e-3, tol * 1e-3),
    };

    let mut acc = 0.0;
    let mut last_term = 0.0;
    let mut l = 0usize;
    let mut rung = MIN_PARTIAL_WAVES;
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut change = f64::INFINITY;
    while rung <= l_max {
        while l <= rung {
            last_term = partial_wave_term(&radial, y, l)?;
            acc += last_term;
            l += 1;
        }
        // Richardson row for the new rung
        let mut row = vec![acc];
        if let Some(prev) = table.last() {
            for k in 1..=prev.len() {
                let factor = (1u64 << k) as f64;
                let better = (factor * row[k - 1] - prev[k - 1]) / (factor - 1.0);
                row.push(better);
            }
        }
        let estimate = *row.last().unwrap_or(&acc);
        if let Some(prev) = table.last() {
            change = (estimate - prev.last().copied().unwrap_or(acc)).abs();
            if table.len() >= 2 && change < tol {
                return Ok(PartialWaveSum {
                    value: estimate,
                    partial_sum: acc,
                    terms: l,
                    last_term,
                    extrapolation_change: change,
                });
            }
        }
        table.push(row);
        rung *= 2;
    }
    Err(KhNormError::PartialWaveNonConvergence {
        l_max,
        partial_sum: acc,
        last_term,
        change,
    })
}

/// `N(y, ψ_n00)` from the multipole route.
pub fn norm_partial_wave_n00(state: BoundState, y: f64, l_max: usize, tol: f64) -> Result<KhNormValue, KhNormError> {
    let shifted = squared_element_partial_wave(state, y, l_max, tol)?;
    let mixed = mixed_element_partial_wave(state, y, tol * 1e-3)?;
    let v_sq = state_constants(state).v_sq_expectation;
    let value = (v_sq + shifted.value - 2.0 * mixed).max(0.0).sqrt();
    Ok(KhNormValue {
        c: y,
        value,
        method: NormMethod::PartialWaveOracle,
    })
}
