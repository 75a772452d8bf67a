//! Laser pulse shapes and their classical kinematics.
//!
//! For every pulse the field `E(t)`, the momentum transfer `b(t) = ∫₀ᵗ E` and
//! the displacement `c(t) = ∫₀ᵗ b` are available. Kinematics are evaluated
//! analytically by splitting the pulse into segments on which the field is a
//! sum of sinusoids or a linear ramp times a sinusoid. The sinusoid integrals
//! are written in terms of `sinc`-type kernels, so the apparent poles of the
//! textbook expressions (`ω = 2Ω` for the sine-squared envelope, `ω = π/T` for
//! sine-squared ramps) never appear.
//!
//! An independent quadrature route (`b = ∫ E`, `c = ∫ (t - s) E(s) ds`) is
//! available through [`KinematicsSource::Quadrature`].

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::quad::{Integrator, QuadError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PulseError {
    #[error("time {0} is negative")]
    NegativeTime(f64),
    #[error("invalid pulse parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("quadrature of the pulse kinematics failed at t = {t}: {source}")]
    Quadrature { t: f64, source: QuadError },
}

/// Pulse shapes, all linearly polarized along `z`, in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse {
    /// `E(t) = E0`.
    Static { field_strength: f64 },
    /// `E(t) = E0 sin(ωt)`.
    Monochromatic { field_strength: f64, omega: f64 },
    /// `E0 sin(ωt)` with linear ramps of length `ramp` at both ends of a pulse
    /// of total length `duration`.
    TrapezoidEnvelope {
        field_strength: f64,
        omega: f64,
        ramp: f64,
        duration: f64,
    },
    /// `E(t) = E0 sin²(Ωt) sin(ωt)`.
    SineSquaredEnvelope {
        field_strength: f64,
        omega: f64,
        envelope_omega: f64,
    },
    /// `E0 sin(ωt)` with `sin²(πt/2T)` ramps of length `ramp = T` at both ends.
    SineSquaredRamps {
        field_strength: f64,
        omega: f64,
        ramp: f64,
        duration: f64,
    },
}

impl Pulse {
    pub fn shape_name(&self) -> &'static str {
        match self {
            Pulse::Static { .. } => "static",
            Pulse::Monochromatic { .. } => "monochromatic",
            Pulse::TrapezoidEnvelope { .. } => "trapezoid",
            Pulse::SineSquaredEnvelope { .. } => "sine_squared",
            Pulse::SineSquaredRamps { .. } => "sine_squared_ramps",
        }
    }

    pub fn field_strength(&self) -> f64 {
        match *self {
            Pulse::Static { field_strength }
            | Pulse::Monochromatic { field_strength, .. }
            | Pulse::TrapezoidEnvelope { field_strength, .. }
            | Pulse::SineSquaredEnvelope { field_strength, .. }
            | Pulse::SineSquaredRamps { field_strength, .. } => field_strength,
        }
    }

    /// Carrier frequency, if the pulse has one.
    pub fn omega(&self) -> Option<f64> {
        match *self {
            Pulse::Static { .. } => None,
            Pulse::Monochromatic { omega, .. }
            | Pulse::TrapezoidEnvelope { omega, .. }
            | Pulse::SineSquaredEnvelope { omega, .. }
            | Pulse::SineSquaredRamps { omega, .. } => Some(omega),
        }
    }

    /// Intrinsic duration for ramped pulses; the field vanishes afterwards.
    pub fn duration(&self) -> Option<f64> {
        match *self {
            Pulse::TrapezoidEnvelope { duration, .. } | Pulse::SineSquaredRamps { duration, .. } => Some(duration),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        fn positive(name: &'static str, value: f64) -> Result<(), PulseError> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(PulseError::InvalidParameter {
                    name,
                    value,
                    reason: "must be positive and finite",
                })
            }
        }
        positive("E0", self.field_strength())?;
        match *self {
            Pulse::Static { .. } => Ok(()),
            Pulse::Monochromatic { omega, .. } => positive("omega", omega),
            Pulse::SineSquaredEnvelope {
                omega, envelope_omega, ..
            } => {
                positive("omega", omega)?;
                positive("Omega", envelope_omega)
            }
            Pulse::TrapezoidEnvelope {
                omega, ramp, duration, ..
            }
            | Pulse::SineSquaredRamps {
                omega, ramp, duration, ..
            } => {
                positive("omega", omega)?;
                positive("ramp_T", ramp)?;
                positive("total_tau0", duration)?;
                if 2.0 * ramp > duration * (1.0 + 4.0 * f64::EPSILON) {
                    return Err(PulseError::InvalidParameter {
                        name: "ramp_T",
                        value: ramp,
                        reason: "two ramps do not fit into total_tau0",
                    });
                }
                Ok(())
            }
        }
    }

    /// Field `E(t)` straight from the pulse definition; zero after a ramped
    /// pulse has ended.
    pub fn field(&self, t: f64) -> Result<f64, PulseError> {
        if t < 0.0 || t.is_nan() {
            return Err(PulseError::NegativeTime(t));
        }
        Ok(self.field_unchecked(t))
    }

    fn field_unchecked(&self, t: f64) -> f64 {
        match *self {
            Pulse::Static { field_strength } => field_strength,
            Pulse::Monochromatic { field_strength, omega } => field_strength * (omega * t).sin(),
            Pulse::SineSquaredEnvelope {
                field_strength,
                omega,
                envelope_omega,
            } => field_strength * (envelope_omega * t).sin().powi(2) * (omega * t).sin(),
            Pulse::TrapezoidEnvelope {
                field_strength,
                omega,
                ramp,
                duration,
            } => {
                let envelope = if t > duration {
                    0.0
                } else if t <= ramp {
                    t / ramp
                } else if t < duration - ramp {
                    1.0
                } else {
                    (duration - t) / ramp
                };
                field_strength * (omega * t).sin() * envelope
            }
            Pulse::SineSquaredRamps {
                field_strength,
                omega,
                ramp,
                duration,
            } => {
                let envelope = if t > duration {
                    0.0
                } else if t <= ramp {
                    (PI * t / (2.0 * ramp)).sin().powi(2)
                } else if t < duration - ramp {
                    1.0
                } else {
                    (PI * (duration - t) / (2.0 * ramp)).sin().powi(2)
                };
                field_strength * (omega * t).sin() * envelope
            }
        }
    }

    /// Points where the field or one of its derivatives is discontinuous.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Pulse::TrapezoidEnvelope { ramp, duration, .. } | Pulse::SineSquaredRamps { ramp, duration, .. } => {
                vec![ramp, duration - ramp, duration]
            }
            _ => Vec::new(),
        }
    }

    /// Largest angular frequency present in the field.
    fn max_frequency(&self) -> f64 {
        match *self {
            Pulse::Static { .. } => 0.0,
            Pulse::Monochromatic { omega, .. } | Pulse::TrapezoidEnvelope { omega, .. } => omega,
            Pulse::SineSquaredEnvelope {
                omega, envelope_omega, ..
            } => omega + 2.0 * envelope_omega,
            Pulse::SineSquaredRamps { omega, ramp, .. } => omega + PI / ramp,
        }
    }

    pub fn kinematics(&self) -> Kinematics {
        Kinematics::new(self)
    }
}

/// How a kinematic quantity was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KinematicsSource {
    Analytic,
    Quadrature { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldKinematics {
    pub t: f64,
    pub field: f64,
    pub momentum_transfer: f64,
    pub displacement: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub provenance: Provenance,
}

/// `sin(x)/x`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(x - sin x) / x²`.
fn kernel_g(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        // x/6 - x³/120 + x⁵/5040 - x⁷/362880 + x⁹/39916800 - x¹¹/6227020800
        x * (1.0 / 6.0
            - x2 * (1.0 / 120.0
                - x2 * (1.0 / 5040.0 - x2 * (1.0 / 362_880.0 - x2 * (1.0 / 39_916_800.0 - x2 / 6_227_020_800.0)))))
    } else {
        (x - x.sin()) / (x * x)
    }
}

/// `(1 - cos x) / x²`.
fn kernel_h(x: f64) -> f64 {
    0.5 * sinc(0.5 * x).powi(2)
}

/// `A sin(k u + φ)` in the segment-local time `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Sinusoid {
    amp: f64,
    k: f64,
    phase: f64,
}

impl Sinusoid {
    fn field(&self, u: f64) -> f64 {
        self.amp * (self.k * u + self.phase).sin()
    }

    /// `∫₀^u`.
    fn single(&self, u: f64) -> f64 {
        let half = 0.5 * self.k * u;
        self.amp * u * (self.phase + half).sin() * sinc(half)
    }

    /// `∫₀^u ∫₀^s`.
    fn double(&self, u: f64) -> f64 {
        let x = self.k * u;
        self.amp * u * u * (self.phase.cos() * kernel_g(x) + self.phase.sin() * kernel_h(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum SegmentShape {
    Sinusoids(Vec<Sinusoid>),
    /// `amp (offset + slope u) sin(ω u + phase)`.
    LinearRamp {
        amp: f64,
        offset: f64,
        slope: f64,
        omega: f64,
        phase: f64,
    },
    Free,
}

impl SegmentShape {
    fn field(&self, u: f64) -> f64 {
        match self {
            SegmentShape::Sinusoids(terms) => terms.iter().map(|s| s.field(u)).sum(),
            SegmentShape::LinearRamp {
                amp,
                offset,
                slope,
                omega,
                phase,
            } => amp * (offset + slope * u) * (omega * u + phase).sin(),
            SegmentShape::Free => 0.0,
        }
    }

    /// Increments `(Δb, Δc - b₀ u)` over local time `u`.
    fn increments(&self, u: f64) -> (f64, f64) {
        match self {
            SegmentShape::Sinusoids(terms) => terms
                .iter()
                .fold((0.0, 0.0), |(db, dc), s| (db + s.single(u), dc + s.double(u))),
            SegmentShape::LinearRamp {
                amp,
                offset,
                slope,
                omega,
                phase,
            } => {
                let w = *omega;
                let first = |v: f64| {
                    let arg = w * v + phase;
                    -(offset + slope * v) * arg.cos() / w + slope * arg.sin() / (w * w)
                };
                let second = |v: f64| {
                    let arg = w * v + phase;
                    -(offset + slope * v) * arg.sin() / (w * w) - 2.0 * slope * arg.cos() / (w * w * w)
                };
                let f0 = first(0.0);
                (amp * (first(u) - f0), amp * (second(u) - second(0.0) - f0 * u))
            }
            SegmentShape::Free => (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    start: f64,
    b0: f64,
    c0: f64,
    shape: SegmentShape,
}

/// Precomputed analytic evaluator for one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct Kinematics {
    segments: Vec<Segment>,
}

fn sine_squared_terms(amp: f64, omega: f64, twice_envelope: f64, phase: f64, sign: f64) -> Vec<Sinusoid> {
    // sin(ωu + φ)(½ ∓ ½ cos(Ku)) = ½ sin(ωu+φ) ∓ ¼ sin((ω+K)u+φ) ∓ ¼ sin((ω-K)u+φ)
    vec![
        Sinusoid {
            amp: 0.5 * amp,
            k: omega,
            phase,
        },
        Sinusoid {
            amp: -0.25 * sign * amp,
            k: omega + twice_envelope,
            phase,
        },
        Sinusoid {
            amp: -0.25 * sign * amp,
            k: omega - twice_envelope,
            phase,
        },
    ]
}

impl Kinematics {
    pub fn new(pulse: &Pulse) -> Self {
        let mut pieces: Vec<(f64, SegmentShape)> = Vec::new();
        match *pulse {
            Pulse::Static { field_strength } => pieces.push((
                0.0,
                SegmentShape::Sinusoids(vec![Sinusoid {
                    amp: field_strength,
                    k: 0.0,
                    phase: FRAC_PI_2,
                }]),
            )),
            Pulse::Monochromatic { field_strength, omega } => pieces.push((
                0.0,
                SegmentShape::Sinusoids(vec![Sinusoid {
                    amp: field_strength,
                    k: omega,
                    phase: 0.0,
                }]),
            )),
            Pulse::SineSquaredEnvelope {
                field_strength,
                omega,
                envelope_omega,
            } => pieces.push((
                0.0,
                SegmentShape::Sinusoids(sine_squared_terms(
                    field_strength,
                    omega,
                    2.0 * envelope_omega,
                    0.0,
                    1.0,
                )),
            )),
            Pulse::TrapezoidEnvelope {
                field_strength,
                omega,
                ramp,
                duration,
            } => {
                let down = duration - ramp;
                pieces.push((
                    0.0,
                    SegmentShape::LinearRamp {
                        amp: field_strength,
                        offset: 0.0,
                        slope: 1.0 / ramp,
                        omega,
                        phase: 0.0,
                    },
                ));
                if down > ramp {
                    pieces.push((
                        ramp,
                        SegmentShape::Sinusoids(vec![Sinusoid {
                            amp: field_strength,
                            k: omega,
                            phase: omega * ramp,
                        }]),
                    ));
                }
                pieces.push((
                    down,
                    SegmentShape::LinearRamp {
                        amp: field_strength,
                        offset: 1.0,
                        slope: -1.0 / ramp,
                        omega,
                        phase: omega * down,
                    },
                ));
                pieces.push((duration, SegmentShape::Free));
            }
            Pulse::SineSquaredRamps {
                field_strength,
                omega,
                ramp,
                duration,
            } => {
                let k = PI / ramp;
                let down = duration - ramp;
                pieces.push((
                    0.0,
                    SegmentShape::Sinusoids(sine_squared_terms(field_strength, omega, k, 0.0, 1.0)),
                ));
                if down > ramp {
                    pieces.push((
                        ramp,
                        SegmentShape::Sinusoids(vec![Sinusoid {
                            amp: field_strength,
                            k: omega,
                            phase: omega * ramp,
                        }]),
                    ));
                }
                // sin²(π(T - u)/2T) = ½ + ½ cos(π u / T)
                pieces.push((
                    down,
                    SegmentShape::Sinusoids(sine_squared_terms(field_strength, omega, k, omega * down, -1.0)),
                ));
                pieces.push((duration, SegmentShape::Free));
            }
        }

        let mut segments: Vec<Segment> = Vec::with_capacity(pieces.len());
        for (start, shape) in pieces {
            let (b0, c0) = match segments.last() {
                None => (0.0, 0.0),
                Some(prev) => {
                    let u = start - prev.start;
                    let (db, dc) = prev.shape.increments(u);
                    (prev.b0 + db, prev.c0 + prev.b0 * u + dc)
                }
            };
            segments.push(Segment { start, b0, c0, shape });
        }
        Self { segments }
    }

    fn segment(&self, t: f64) -> &Segment {
        let idx = self.segments.partition_point(|s| s.start <= t).max(1) - 1;
        &self.segments[idx]
    }

    /// `(b(t), c(t))`.
    pub fn momentum_and_displacement(&self, t: f64) -> (f64, f64) {
        let seg = self.segment(t);
        let u = t - seg.start;
        let (db, dc) = seg.shape.increments(u);
        (seg.b0 + db, seg.c0 + seg.b0 * u + dc)
    }

    pub fn momentum_transfer(&self, t: f64) -> f64 {
        self.momentum_and_displacement(t).0
    }

    pub fn displacement(&self, t: f64) -> f64 {
        self.momentum_and_displacement(t).1
    }

    /// Field evaluated from the segment representation.
    pub fn field(&self, t: f64) -> f64 {
        let seg = self.segment(t);
        seg.shape.field(t - seg.start)
    }

    pub fn at(&self, t: f64) -> Result<FieldKinematics, PulseError> {
        if t < 0.0 || t.is_nan() {
            return Err(PulseError::NegativeTime(t));
        }
        let (b, c) = self.momentum_and_displacement(t);
        Ok(FieldKinematics {
            t,
            field: self.field(t),
            momentum_transfer: b,
            displacement: c,
            provenance: Provenance::Analytic,
        })
    }
}

/// Split `[0, t]` at the pulse breakpoints and into chunks no longer than half
/// the shortest period in the field.
pub(crate) fn quadrature_panels(pulse: &Pulse, t: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = pulse.breakpoints().into_iter().filter(|&p| p > 0.0 && p < t).collect();
    cuts.push(t);
    let max_len = match pulse.max_frequency() {
        k if k > 0.0 => PI / k,
        _ => f64::INFINITY,
    };
    let mut panels = Vec::new();
    let mut lo = 0.0;
    for hi in cuts {
        let pieces = ((hi - lo) / max_len).ceil().max(1.0) as usize;
        let width = (hi - lo) / pieces as f64;
        for i in 0..pieces {
            let a = lo + width * i as f64;
            let b = if i + 1 == pieces { hi } else { a + width };
            panels.push((a, b));
        }
        lo = hi;
    }
    panels
}

/// Kinematics by direct quadrature of the field:
/// `b(t) = ∫₀ᵗ E(s) ds`, `c(t) = ∫₀ᵗ (t - s) E(s) ds`.
pub fn quadrature_kinematics(pulse: &Pulse, t: f64, tol: f64) -> Result<FieldKinematics, PulseError> {
    if t < 0.0 || t.is_nan() {
        return Err(PulseError::NegativeTime(t));
    }
    let q = Integrator::new(tol, tol);
    let mut b = 0.0;
    let mut c = 0.0;
    for (lo, hi) in quadrature_panels(pulse, t) {
        let wrap = |source| PulseError::Quadrature { t, source };
        b += q.integrate(|s| pulse.field_unchecked(s), lo, hi).map_err(wrap)?.value;
        c += q
            .integrate(|s| (t - s) * pulse.field_unchecked(s), lo, hi)
            .map_err(wrap)?
            .value;
    }
    Ok(FieldKinematics {
        t,
        field: pulse.field_unchecked(t),
        momentum_transfer: b,
        displacement: c,
        provenance: Provenance::Quadrature,
    })
}

/// `‖E‖_{L²[0,t]}` by quadrature.
pub fn field_l2_norm(pulse: &Pulse, t: f64, tol: f64) -> Result<f64, PulseError> {
    let q = Integrator::new(tol, tol);
    let mut total = 0.0;
    for (lo, hi) in quadrature_panels(pulse, t) {
        total += q
            .integrate(|s| pulse.field_unchecked(s).powi(2), lo, hi)
            .map_err(|source| PulseError::Quadrature { t, source })?
            .value;
    }
    Ok(total.sqrt())
}

pub fn kinematics(pulse: &Pulse, t: f64, source: KinematicsSource) -> Result<FieldKinematics, PulseError> {
    match source {
        KinematicsSource::Analytic => pulse.kinematics().at(t),
        KinematicsSource::Quadrature { tol } => quadrature_kinematics(pulse, t, tol),
    }
}

pub fn field(pulse: &Pulse, t: f64) -> Result<f64, PulseError> {
    pulse.field(t)
}

pub fn momentum_transfer(pulse: &Pulse, t: f64, source: KinematicsSource) -> Result<Evaluated, PulseError> {
    let k = kinematics(pulse, t, source)?;
    Ok(Evaluated {
        value: k.momentum_transfer,
        provenance: k.provenance,
    })
}

pub fn displacement(pulse: &Pulse, t: f64, source: KinematicsSource) -> Result<Evaluated, PulseError> {
    let k = kinematics(pulse, t, source)?;
    Ok(Evaluated {
        value: k.displacement,
        provenance: k.provenance,
    })
}

/// Closed-form `(b(τ₀), c(τ₀))` at the end of a trapezoidal pulse.
pub fn trapezoid_endpoint(field_strength: f64, omega: f64, ramp: f64, duration: f64) -> (f64, f64) {
    let (w, t, t0) = (omega, ramp, duration);
    let b = field_strength / (w * w * t) * ((w * t).sin() - (w * t0).sin() + (w * (t0 - t)).sin());
    let c = field_strength / (w.powi(3) * t)
        * (2.0 - 2.0 * (w * t).cos() + 2.0 * (w * t0).cos() - 2.0 * (w * (t0 - t)).cos() - w * t * (w * t).sin()
            + w * t0 * (w * t).sin()
            + w * t * (w * (t0 - t)).sin());
    (b, c)
}

/// Closed-form `(b(τ₀), c(τ₀))` at the end of a pulse with sine-squared ramps.
///
/// Both expressions have a removable pole at `ω T = π`.
pub fn sine_squared_ramps_endpoint(field_strength: f64, omega: f64, ramp: f64, duration: f64) -> (f64, f64) {
    let (w, t, t0) = (omega, ramp, duration);
    let pi2 = PI * PI;
    let wt2 = w * w * t * t;
    let b = field_strength * pi2 * (1.0 + (w * t).cos() - (w * (t - t0)).cos() - (w * t0).cos())
        / (2.0 * w * pi2 - 2.0 * w.powi(3) * t * t);
    let (cos_t, cos_d) = ((w * t).cos(), (w * (t - t0)).cos());
    let (sin_t, sin_d, sin_0) = ((w * t).sin(), (w * (t - t0)).sin(), (w * t0).sin());
    let bracket = w * pi2 * t0 - w.powi(3) * t * t * t0 - w * pi2 * t * cos_t
        + w.powi(3) * t.powi(3) * cos_t
        + w * pi2 * t0 * cos_t
        - w.powi(3) * t * t * t0 * cos_t
        - w * pi2 * t * cos_d
        + w.powi(3) * t.powi(3) * cos_d
        + pi2 * sin_t
        - 3.0 * wt2 * sin_t
        + pi2 * sin_d
        - 3.0 * wt2 * sin_d
        - pi2 * sin_0
        + 3.0 * wt2 * sin_0;
    let c = field_strength * pi2 / (2.0 * w * w * (pi2 - wt2).powi(2)) * bracket;
    (b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * PI;

    fn all_shapes() -> Vec<Pulse> {
        vec![
            Pulse::Static { field_strength: 5.0 },
            Pulse::Monochromatic {
                field_strength: 2.0,
                omega: 1.5,
            },
            Pulse::TrapezoidEnvelope {
                field_strength: 1.0,
                omega: 1.5,
                ramp: 1.25 * TAU / 1.5,
                duration: 8.0 * TAU / 1.5,
            },
            Pulse::SineSquaredEnvelope {
                field_strength: 3.0,
                omega: 0.8,
                envelope_omega: 0.8 / 13.5,
            },
            Pulse::SineSquaredRamps {
                field_strength: 1.0,
                omega: 1.5,
                ramp: 1.25 * TAU / 1.5,
                duration: 8.0 * TAU / 1.5,
            },
        ]
    }

    #[test]
    fn field_examples() {
        assert_eq!(Pulse::Static { field_strength: 5.0 }.field(0.3).unwrap(), 5.0);
        let m = Pulse::Monochromatic {
            field_strength: 2.0,
            omega: 4.0,
        };
        assert!(m.field(PI / 4.0).unwrap().abs() < 1e-15);
        let (w, ramp) = (1.5, 2.0);
        let trap = Pulse::TrapezoidEnvelope {
            field_strength: 1.0,
            omega: w,
            ramp,
            duration: 10.0,
        };
        assert!((trap.field(ramp).unwrap() - (w * ramp).sin()).abs() < 1e-15);
        assert_eq!(trap.field(11.0).unwrap(), 0.0);
        assert!(matches!(m.field(-1.0), Err(PulseError::NegativeTime(_))));
    }

    #[test]
    fn static_and_monochromatic_closed_forms() {
        let s = Pulse::Static { field_strength: 5.0 }.kinematics();
        assert!((s.momentum_transfer(1.0) - 5.0).abs() < 1e-15);
        assert!((s.displacement(2.0) - 10.0).abs() < 1e-14);
        let m = Pulse::Monochromatic {
            field_strength: 2.0,
            omega: 1.0,
        }
        .kinematics();
        assert!(m.momentum_transfer(TAU).abs() < 1e-14);
        let m = Pulse::Monochromatic {
            field_strength: 1.0,
            omega: 1.0,
        }
        .kinematics();
        assert!((m.displacement(TAU) - TAU).abs() < 1e-13);
        let (w, e0) = (1.7, 2.3);
        let m = Pulse::Monochromatic {
            field_strength: e0,
            omega: w,
        }
        .kinematics();
        for t in [0.1, 1.0, 3.3, 17.0] {
            assert!((m.momentum_transfer(t) - 2.0 * e0 / w * (w * t / 2.0).sin().powi(2)).abs() < 1e-13);
            assert!((m.displacement(t) - e0 / (w * w) * (w * t - (w * t).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn kinematics_start_at_rest() {
        for p in all_shapes() {
            let k = p.kinematics();
            assert_eq!(k.momentum_and_displacement(0.0), (0.0, 0.0), "{p:?}");
        }
    }

    #[test]
    fn segment_field_matches_definition() {
        for p in all_shapes() {
            let k = p.kinematics();
            for i in 0..400 {
                let t = i as f64 * 0.17;
                assert!((k.field(t) - p.field(t).unwrap()).abs() < 1e-12, "{p:?} at {t}");
            }
        }
    }

    #[test]
    fn analytic_matches_quadrature() {
        for p in all_shapes() {
            let k = p.kinematics();
            for t in [0.3, 2.0, 7.5, 20.0, 33.0, 40.0] {
                let q = quadrature_kinematics(&p, t, 1e-12).unwrap();
                let (b, c) = k.momentum_and_displacement(t);
                assert!(
                    (b - q.momentum_transfer).abs() < 1e-9,
                    "{p:?} b at {t}: {b} vs {}",
                    q.momentum_transfer
                );
                assert!(
                    (c - q.displacement).abs() < 1e-8,
                    "{p:?} c at {t}: {c} vs {}",
                    q.displacement
                );
            }
        }
    }

    #[test]
    fn derivative_consistency() {
        let h = 1e-4;
        for p in all_shapes() {
            let k = p.kinematics();
            for i in 1..60 {
                let t = 0.61 * i as f64;
                let db = (k.momentum_transfer(t + h) - k.momentum_transfer(t - h)) / (2.0 * h);
                let dc = (k.displacement(t + h) - k.displacement(t - h)) / (2.0 * h);
                let scale = p.field_strength().max(1.0);
                assert!((db - k.field(t)).abs() < 1e-5 * scale * 10.0, "{p:?} dE at {t}");
                assert!(
                    (dc - k.momentum_transfer(t)).abs() < 1e-5 * scale * 10.0,
                    "{p:?} db at {t}"
                );
            }
        }
    }

    #[test]
    fn sine_squared_envelope_near_double_envelope_frequency() {
        let p = Pulse::SineSquaredEnvelope {
            field_strength: 1.0,
            omega: 0.2,
            envelope_omega: 0.100_001,
        };
        let q = quadrature_kinematics(&p, 7.0, 1e-13).unwrap();
        let (b, c) = p.kinematics().momentum_and_displacement(7.0);
        assert!((b - q.momentum_transfer).abs() < 1e-8);
        assert!((c - q.displacement).abs() < 1e-8);
        // exactly on the pole
        let p = Pulse::SineSquaredEnvelope {
            field_strength: 1.0,
            omega: 0.2,
            envelope_omega: 0.1,
        };
        let (b, c) = p.kinematics().momentum_and_displacement(7.0);
        assert!(b.is_finite() && c.is_finite());
    }

    /// Sine-squared envelope kinematics in the expanded form with the
    /// `(ω - 2Ω)` and `(ω + 2Ω)` denominators.
    fn expanded_sine_squared(e0: f64, w: f64, om: f64, t: f64) -> (f64, f64) {
        let (wm, wp) = (w - 2.0 * om, w + 2.0 * om);
        let b = e0 / (16.0 * w * om * om - 4.0 * w.powi(3))
            * (8.0 * om * om + 2.0 * w * w * (w * t).cos()
                - 8.0 * om * om * (w * t).cos()
                - w * w * (wm * t).cos()
                - 2.0 * w * om * (wm * t).cos()
                - w * w * (wp * t).cos()
                + 2.0 * w * om * (wp * t).cos());
        let s = -wm;
        let c = e0 / (4.0 * w * w * wm * wm * wp * wp)
            * (-8.0 * w.powi(3) * om * om * t + 32.0 * w * om.powi(4) * t - 2.0 * w.powi(4) * (w * t).sin()
                + 16.0 * w * w * om * om * (w * t).sin()
                - 32.0 * om.powi(4) * (w * t).sin()
                - w.powi(4) * (s * t).sin()
                - 4.0 * w.powi(3) * om * (s * t).sin()
                - 4.0 * w * w * om * om * (s * t).sin()
                + w.powi(4) * (wp * t).sin()
                - 4.0 * w.powi(3) * om * (wp * t).sin()
                + 4.0 * w * w * om * om * (wp * t).sin());
        (b, c)
    }

    #[test]
    fn expanded_sine_squared_form_agrees_away_from_pole() {
        for &(w, om) in &[(0.2, 0.13), (0.8, 0.8 / 13.5), (1.5, 0.01)] {
            let k = Pulse::SineSquaredEnvelope {
                field_strength: 2.0,
                omega: w,
                envelope_omega: om,
            }
            .kinematics();
            for t in [0.5, 7.0, 40.0] {
                let (b, c) = expanded_sine_squared(2.0, w, om, t);
                let (bb, cc) = k.momentum_and_displacement(t);
                assert!((b - bb).abs() < 1e-9 * (1.0 + b.abs()), "b {w} {om} {t}");
                assert!((c - cc).abs() < 1e-9 * (1.0 + c.abs()), "c {w} {om} {t}");
            }
        }
    }

    #[test]
    fn endpoint_closed_forms_match_segments() {
        let w = 1.5;
        for (ramp_cycles, plateau_cycles) in [(1.25, 12.0), (2.25, 10.0), (4.25, 6.0), (0.5, 6.0), (1.3, 2.7)] {
            let ramp = ramp_cycles * TAU / w;
            let duration = 2.0 * ramp + plateau_cycles * TAU / w;
            let (b, c) = trapezoid_endpoint(1.0, w, ramp, duration);
            let k = Pulse::TrapezoidEnvelope {
                field_strength: 1.0,
                omega: w,
                ramp,
                duration,
            }
            .kinematics();
            let (bb, cc) = k.momentum_and_displacement(duration);
            assert!(
                (b - bb).abs() < 1e-11 && (c - cc).abs() < 1e-9,
                "trapezoid {ramp_cycles}"
            );
            if (w * ramp - PI).abs() < 1e-6 {
                // removable pole of the closed form
                continue;
            }
            let (b, c) = sine_squared_ramps_endpoint(1.0, w, ramp, duration);
            let k = Pulse::SineSquaredRamps {
                field_strength: 1.0,
                omega: w,
                ramp,
                duration,
            }
            .kinematics();
            let (bb, cc) = k.momentum_and_displacement(duration);
            assert!(
                (b - bb).abs() < 1e-11 && (c - cc).abs() < 1e-9,
                "sin² ramps {ramp_cycles}: {c} {cc}"
            );
        }
    }

    #[test]
    fn trapezoid_oracle_example() {
        let w = 1.5;
        let ramp = 1.25 * TAU / w;
        let duration = 8.0 * TAU / w;
        let p = Pulse::TrapezoidEnvelope {
            field_strength: 1.0,
            omega: w,
            ramp,
            duration,
        };
        let q = quadrature_kinematics(&p, duration, 1e-12).unwrap();
        let (_, c) = trapezoid_endpoint(1.0, w, ramp, duration);
        assert!((c - q.displacement).abs() < 1e-7);
        assert!((c - 2.181_909_252_397_362).abs() < 1e-10);
    }

    #[test]
    fn half_cycle_ramps_cancel_momentum() {
        let w = 1.5;
        for m in 0..=3 {
            let ramp = (m as f64 + 0.5) * TAU / w;
            let duration = 2.0 * ramp + 6.0 * TAU / w;
            let p = Pulse::TrapezoidEnvelope {
                field_strength: 1.0,
                omega: w,
                ramp,
                duration,
            };
            assert!(p.kinematics().momentum_transfer(duration).abs() <= 1e-12, "m = {m}");
        }
    }

    #[test]
    fn field_free_after_ramped_pulse() {
        let p = Pulse::SineSquaredRamps {
            field_strength: 1.0,
            omega: 1.5,
            ramp: 3.0,
            duration: 10.0,
        };
        let k = p.kinematics();
        let (b1, c1) = k.momentum_and_displacement(10.0);
        let (b2, c2) = k.momentum_and_displacement(13.0);
        assert!((b2 - b1).abs() < 1e-15);
        assert!((c2 - (c1 + 3.0 * b1)).abs() < 1e-12);
        assert_eq!(k.field(12.0), 0.0);
    }

    #[test]
    fn validation() {
        assert!(Pulse::Static { field_strength: 0.0 }.validate().is_err());
        assert!(Pulse::Monochromatic {
            field_strength: 1.0,
            omega: -1.0
        }
        .validate()
        .is_err());
        assert!(Pulse::TrapezoidEnvelope {
            field_strength: 1.0,
            omega: 1.0,
            ramp: 6.0,
            duration: 10.0
        }
        .validate()
        .is_err());
        assert!(Pulse::SineSquaredRamps {
            field_strength: 1.0,
            omega: 1.0,
            ramp: 5.0,
            duration: 10.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn kernels_are_smooth_across_switch() {
        for x in [0.499_999, 0.5, 0.500_001, -0.5] {
            let direct = (x - f64::sin(x)) / (x * x);
            assert!((kernel_g(x) - direct).abs() < 1e-14);
        }
        assert!((kernel_h(1e-3) - 0.5 * (1.0 - 1e-6 / 12.0)).abs() < 1e-14);
    }
}
