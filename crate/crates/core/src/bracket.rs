//! Dirichlet–Neumann bracketing of the global counting function.
//!
//! Cutting the staircase along the vertical interfaces `x = aₖ` and imposing
//! Dirichlet (resp. Neumann) conditions there gives
//!
//! ```text
//! Σₖ N^D_{Qₖ}(E) ≤ N^D_Ω(E) ≤ Σₖ N^{DN}_{Qₖ}(E).
//! ```
//!
//! Only the first `n(E)` rectangles can carry an eigenvalue `≤ E`, so both
//! series are finite sums.

use serde::Serialize;

use crate::core_geometry::n_of_e;
use crate::domain::SimpleDomain;
use crate::error::{check_energy, Result};
use crate::rect::{count_dirichlet_box, count_mixed_box, rect_gap, BoxSpec};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BracketResult<T> {
    pub energy: T,
    pub lower: u64,
    pub upper: u64,
    pub gap: u64,
    /// `(√E/π) · Σ bₖ`, present only when the heights are certified summable.
    pub gap_certificate: Option<T>,
    /// `n(E)`: rectangles that carry at least one mixed eigenvalue.
    pub active_rectangles: usize,
}

impl<T: Real> BracketResult<T> {
    pub fn certificate_holds(&self) -> Option<bool> {
        self.gap_certificate
            .map(|c| T::from_u64_lossy(self.gap) <= c)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct BoxCounts {
    pub(crate) dirichlet: u64,
    pub(crate) mixed: u64,
    pub(crate) gap: u64,
}

/// Sums per-box counts over rectangles `1..=truncation`.
pub(crate) fn sum_counts<T: Real>(
    domain: &SimpleDomain<T>,
    e: T,
    truncation: usize,
) -> Result<BoxCounts> {
    let mut acc = BoxCounts::default();
    for (f, b) in domain.boxes(truncation)? {
        let bx = BoxSpec::new(f, b)?;
        acc.dirichlet += count_dirichlet_box(&bx, e)?;
        acc.mixed += count_mixed_box(&bx, e)?;
        acc.gap += rect_gap(b, e)?;
    }
    Ok(acc)
}

/// Sums over `k ≤ n(E) + 1`. The extra box is a guard against a boundary
/// misclassification of `n(E)`; it must contribute nothing.
fn active_counts<T: Real>(domain: &SimpleDomain<T>, e: T) -> Result<(usize, BoxCounts)> {
    check_energy(e)?;
    let n = n_of_e(domain, e)?;
    let counts = sum_counts(domain, e, n)?;
    if let Ok(b) = domain.b(n + 1) {
        let marginal = rect_gap(b, e)?;
        debug_assert_eq!(marginal, 0, "rectangle n(E)+1 carries a mode at E = {e}");
        if marginal > 0 {
            return Ok((n, sum_counts(domain, e, n + 1)?));
        }
    }
    Ok((n, counts))
}

/// `Σₖ N^D_{Qₖ}(E)`: lower bound on `N^D_Ω(E)`.
pub fn lower_count<T: Real>(domain: &SimpleDomain<T>, e: T) -> Result<u64> {
    Ok(active_counts(domain, e)?.1.dirichlet)
}

/// `Σₖ N^{DN}_{Qₖ}(E)`: upper bound on `N^D_Ω(E)`.
pub fn upper_count<T: Real>(domain: &SimpleDomain<T>, e: T) -> Result<u64> {
    Ok(active_counts(domain, e)?.1.mixed)
}

pub fn bracket<T: Real>(domain: &SimpleDomain<T>, e: T) -> Result<BracketResult<T>> {
    let (n, c) = active_counts(domain, e)?;
    debug_assert_eq!(c.mixed - c.dirichlet, c.gap);
    Ok(BracketResult {
        energy: e,
        lower: c.dirichlet,
        upper: c.mixed,
        gap: c.mixed - c.dirichlet,
        gap_certificate: domain.b_sum_estimate().map(|s| e.sqrt() / T::PI() * s),
        active_rectangles: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SequenceSpec;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_prefix() -> SimpleDomain<f64> {
        SimpleDomain::new(
            SequenceSpec::explicit(vec![1.0], Some(SequenceSpec::power(1e-3, -2.0))),
            SequenceSpec::explicit(vec![1.0], Some(SequenceSpec::power(1.0, 0.0))),
        )
        .unwrap()
    }

    #[test]
    fn example_below_ground_state() {
        let d = SimpleDomain::<f64>::example();
        assert_eq!(lower_count(&d, 5.0).unwrap(), 0);
        assert_eq!(upper_count(&d, 5.0).unwrap(), 0);
        assert_eq!(upper_count(&d, PI * PI * 0.99).unwrap(), 0);
        let r = bracket(&d, 5.0).unwrap();
        assert_eq!(r.active_rectangles, 0);
        assert_eq!((r.lower, r.upper, r.gap), (0, 0, 0));
    }

    #[test]
    fn single_rectangle_prefix() {
        let d = unit_prefix();
        assert_eq!(lower_count(&d, 20.0).unwrap(), 1);
        assert_eq!(upper_count(&d, 20.0).unwrap(), 2);
        let r = bracket(&d, 20.0).unwrap();
        assert_eq!(r.gap, 1);
        assert_eq!(r.active_rectangles, 1);
        assert!(r.certificate_holds().unwrap());
    }

    #[test]
    fn example_gap_at_twenty() {
        let d = SimpleDomain::<f64>::example();
        let r = bracket(&d, 20.0).unwrap();
        let expected: u64 = (1..=10u64)
            .map(|k| (20f64.sqrt() / (k * k) as f64 / PI).floor() as u64)
            .sum();
        assert_eq!(r.gap, expected);
        assert_eq!(r.upper - r.lower, r.gap);
        let cert = r.gap_certificate.unwrap();
        assert!((cert - 20f64.sqrt() / PI * PI * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_has_no_certificate() {
        let d = SimpleDomain::<f64>::harmonic();
        let r = bracket(&d, 1e4).unwrap();
        assert!(r.gap_certificate.is_none());
        assert!(r.certificate_holds().is_none());
        assert!(r.lower <= r.upper);
    }

    #[test]
    fn truncation_is_sound() {
        let d = SimpleDomain::<f64>::example();
        for e in [50.0, 1e3, 3.3e4, 1e6] {
            let n = n_of_e(&d, e).unwrap();
            let base = sum_counts(&d, e, n).unwrap();
            assert_eq!(base, sum_counts(&d, e, n + 10).unwrap());
            assert_eq!(base.dirichlet, lower_count(&d, e).unwrap());
        }
    }

    #[test]
    fn rejects_nonpositive_energy() {
        let d = SimpleDomain::<f64>::example();
        assert!(bracket(&d, 0.0).is_err());
        assert!(lower_count(&d, -3.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bracket_invariants(log_e in 1.0f64..6.5) {
            let d = SimpleDomain::<f64>::example();
            let e = 10f64.powf(log_e);
            let r = bracket(&d, e).unwrap();
            prop_assert!(r.lower <= r.upper);
            let floor_sum: u64 = (1..=r.active_rectangles)
                .map(|k| rect_gap(d.b(k).unwrap(), e).unwrap())
                .sum();
            prop_assert_eq!(r.gap, floor_sum);
            prop_assert!(r.certificate_holds().unwrap());
            let r2 = bracket(&d, e * 1.01).unwrap();
            prop_assert!(r.lower <= r2.lower && r.upper <= r2.upper);
        }
    }
}
