//! Hydrogen s-states `ψ_{n00}`: closed-form expectation values and radial
//! wavefunctions, all in atomic units.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("principal quantum number must be at least 1")]
pub struct InvalidQuantumNumber;

/// An s-state `ψ_{n00}` of hydrogen (`l = m = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundState {
    n: u32,
}

impl BoundState {
    pub const GROUND: BoundState = BoundState { n: 1 };

    pub fn new(n: u32) -> Result<Self, InvalidQuantumNumber> {
        if n == 0 {
            Err(InvalidQuantumNumber)
        } else {
            Ok(Self { n })
        }
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn constants(self) -> StateConstants {
        state_constants(self)
    }
}

impl std::fmt::Display for BoundState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "psi_{}00", self.n)
    }
}

/// Expectation values entering the ionization bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateConstants {
    /// Binding energy `E_n` (hartree).
    pub energy: f64,
    /// `‖p_z ψ‖²`.
    pub p_z_norm_sq: f64,
    /// `‖z ψ‖²`.
    pub z_norm_sq: f64,
    /// `⟨ψ, V² ψ⟩ = ⟨1/r²⟩`.
    pub v_sq_expectation: f64,
}

pub fn state_constants(state: BoundState) -> StateConstants {
    let n = f64::from(state.n);
    let n2 = n * n;
    StateConstants {
        energy: -0.5 / n2,
        p_z_norm_sq: 1.0 / (3.0 * n2),
        z_norm_sq: n2 * (5.0 * n2 + 1.0) / 6.0,
        // 1 / (n³ (l + 1/2)) with l = 0
        v_sq_expectation: 2.0 / (n2 * n),
    }
}

/// Normalized radial function `R_{n0}(r)`, `∫ R² r² dr = 1`.
///
/// `R_{n0}(r) = 2 n^{-5/2} e^{-r/n} L^{(1)}_{n-1}(2r/n)`. Returns 0 where the
/// exponential factor underflows.
pub fn radial_wavefunction_n0(n: u32, r: f64) -> f64 {
    debug_assert!(n >= 1 && r >= 0.0);
    let nf = f64::from(n);
    let decay = r / nf;
    if decay > 745.0 {
        return 0.0;
    }
    let x = 2.0 * decay;
    // L^{(1)}_k by upward recurrence
    let mut prev = 1.0;
    let mut cur = 2.0 - x;
    if n == 1 {
        cur = prev;
    } else {
        for k in 1..(n - 1) {
            let kf = f64::from(k);
            let next = ((2.0 * kf + 2.0 - x) * cur - (kf + 1.0) * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
        }
    }
    let value = 2.0 * nf.powf(-2.5) * cur * (-decay).exp();
    if value.is_finite() {
        value
    } else {
        0.0
    }
}

/// Radius beyond which `R_{n0}²` is negligible (below ~1e-300 of its scale).
pub fn radial_extent(n: u32) -> f64 {
    let nf = f64::from(n);
    nf * (2.0 * nf + 360.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Integrator;

    fn radial_integral(n: u32, weight: impl Fn(f64) -> f64) -> f64 {
        let extent = radial_extent(n);
        let q = Integrator::new(1e-13, 1e-12);
        // split at the classical turning region to keep panels balanced
        let mid = 2.0 * f64::from(n * n);
        let f = |r: f64| radial_wavefunction_n0(n, r).powi(2) * weight(r);
        q.integrate(f, 0.0, mid).unwrap().value + q.integrate(f, mid, extent).unwrap().value
    }

    #[test]
    fn ground_state_constants() {
        let c = state_constants(BoundState::GROUND);
        assert_eq!(c.energy, -0.5);
        assert!((c.p_z_norm_sq - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(c.z_norm_sq, 1.0);
        assert_eq!(c.v_sq_expectation, 2.0);
    }

    #[test]
    fn excited_state_constants() {
        let c = state_constants(BoundState::new(2).unwrap());
        assert_eq!(c.energy, -0.125);
        assert!((c.p_z_norm_sq - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(c.z_norm_sq, 14.0);
        assert_eq!(c.v_sq_expectation, 0.25);
        assert!((state_constants(BoundState::new(10).unwrap()).v_sq_expectation - 0.002).abs() < 1e-18);
    }

    #[test]
    fn constants_monotone_in_n() {
        let all: Vec<_> = (1..50).map(|n| state_constants(BoundState::new(n).unwrap())).collect();
        for w in all.windows(2) {
            assert!(w[1].energy.abs() < w[0].energy.abs());
            assert!(w[1].z_norm_sq > w[0].z_norm_sq);
        }
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(BoundState::new(0), Err(InvalidQuantumNumber));
    }

    #[test]
    fn ground_state_wavefunction() {
        assert_eq!(radial_wavefunction_n0(1, 0.0), 2.0);
        assert!((radial_wavefunction_n0(1, 1.5) - 2.0 * (-1.5f64).exp()).abs() < 1e-15);
        // R_20 = (1/√2)(1 - r/2) e^{-r/2}
        let r = 0.7;
        let expected = (1.0 - r / 2.0) * (-r / 2.0f64).exp() / 2.0f64.sqrt();
        assert!((radial_wavefunction_n0(2, r) - expected).abs() < 1e-15);
    }

    #[test]
    fn normalization() {
        for n in [1, 2, 5, 30] {
            let norm = radial_integral(n, |r| r * r);
            assert!((norm - 1.0).abs() < 1e-9, "n = {n}: {norm}");
        }
    }

    #[test]
    fn inverse_square_radius_matches_v_squared() {
        for n in [1, 2, 5] {
            let v2 = radial_integral(n, |_| 1.0);
            let expected = state_constants(BoundState::new(n).unwrap()).v_sq_expectation;
            assert!((v2 - expected).abs() < 1e-9 * expected, "n = {n}");
        }
    }

    #[test]
    fn node_count() {
        for n in 1..=10u32 {
            let extent = 4.0 * f64::from(n * n) + 20.0;
            let mut changes = 0;
            let mut last = radial_wavefunction_n0(n, 1e-9).signum();
            for i in 1..=200_000 {
                let v = radial_wavefunction_n0(n, extent * i as f64 / 200_000.0);
                if v != 0.0 && v.signum() != last {
                    changes += 1;
                    last = v.signum();
                }
            }
            assert_eq!(changes, n - 1, "n = {n}");
        }
    }

    #[test]
    fn orthogonality() {
        let q = Integrator::new(1e-12, 1e-12);
        for n in 1..=6u32 {
            for m in (n + 1)..=6 {
                let v = q
                    .integrate(
                        |r| radial_wavefunction_n0(n, r) * radial_wavefunction_n0(m, r) * r * r,
                        0.0,
                        400.0,
                    )
                    .unwrap()
                    .value;
                assert!(v.abs() < 1e-8, "({n}, {m}) overlap {v}");
            }
        }
    }

    #[test]
    fn far_tail_underflows_to_zero() {
        assert_eq!(radial_wavefunction_n0(40, 1e6), 0.0);
        assert!(radial_wavefunction_n0(40, 3000.0).is_finite());
    }
}
