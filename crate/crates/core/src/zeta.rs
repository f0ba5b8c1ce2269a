//! Tails of p-series, `Σ_{k ≥ q} k^{-s}` for real `s > 1`.

use crate::scalar::{CompensatedSum, Real};

/// `B_{2j} / (2j)!` for j = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
];

const DIRECT_TERMS: u64 = 16;

/// Returns `(Σ_{k ≥ start} k^{-s}, bound on the truncation error)`.
///
/// Direct summation of the first terms, then Euler–Maclaurin from
/// `start + DIRECT_TERMS`. The error bound is the magnitude of the first
/// omitted correction, which dominates the remainder for real `s > 0`.
pub(crate) fn pseries_tail<T: Real>(s: T, start: u64) -> (T, T) {
    assert!(s > T::one(), "p-series diverges for s <= 1");
    assert!(start >= 1);
    let mut acc = CompensatedSum::new();
    for k in start..start + DIRECT_TERMS {
        acc.add(T::from_u64_lossy(k).powf(-s));
    }
    let n = T::from_u64_lossy(start + DIRECT_TERMS);
    acc.add(n.powf(T::one() - s) / (s - T::one()));
    acc.add(n.powf(-s) / T::lit(2.0));

    // rising factorial s(s+1)...(s+2j-2) times n^{-s-2j+1}
    let mut rising = s;
    let mut power = n.powf(-s - T::one());
    let mut last = T::zero();
    for (j, &c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = T::lit(c) * rising * power;
        if j + 1 == BERNOULLI_OVER_FACTORIAL.len() {
            last = term.abs();
            break;
        }
        acc.add(term);
        let m = T::lit((2 * j + 1) as f64);
        rising = rising * (s + m) * (s + m + T::one());
        power = power / (n * n);
    }
    (acc.value(), last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two_and_four() {
        let (z2, err) = pseries_tail(2.0_f64, 1);
        assert!(
            (z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15,
            "{z2}"
        );
        assert!(err < 1e-15);
        let (z4, _) = pseries_tail(4.0_f64, 1);
        assert!((z4 - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-15);
    }

    #[test]
    fn tail_matches_zeta_minus_prefix() {
        let (z3, _) = pseries_tail(3.0_f64, 1);
        let (tail, _) = pseries_tail(3.0_f64, 5);
        let prefix: f64 = (1..5).map(|k| (k as f64).powi(-3)).sum();
        assert!((z3 - prefix - tail).abs() < 1e-15);
        // Apéry's constant
        assert!((z3 - 1.202_056_903_159_594_3).abs() < 1e-15);
    }

    #[test]
    fn fractional_exponent() {
        // ζ(1.5) = 2.612375348685488...
        let (z, _) = pseries_tail(1.5_f64, 1);
        assert!((z - 2.612_375_348_685_488).abs() < 1e-13, "{z}");
    }
}
