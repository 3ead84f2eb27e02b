//! Gaussian density, distribution, and tail helpers, plus the confidence
//! interval utilities used by the Monte Carlo checks.
//!
//! The distribution function is evaluated through the complementary error
//! function, which keeps full relative accuracy deep into the tails.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function `P(Z <= x)`.
#[inline]
pub fn cdf(x: f64) -> f64 {
    // libm's erfc is correctly rounded to ~1.3 ulp, which the tight
    // reference-value tolerances require.
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `P(Z > x)`, accurate for large `x`.
#[inline]
pub fn tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `P(a < Z <= b)` computed tail-to-tail to limit cancellation.
#[inline]
pub fn interval_prob(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    // Using tails on the side away from zero keeps relative accuracy.
    if a >= 0.0 {
        tail(a) - tail(b)
    } else if b <= 0.0 {
        cdf(b) - cdf(a)
    } else {
        // Straddles zero; both terms are O(1), plain difference is fine.
        cdf(b) - cdf(a)
    }
}

/// Mean and standard error of a sample.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples");
    let mean = samples.iter().sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    let var = ss / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Two-sided Wilson score interval for a binomial proportion.
///
/// Behaves sensibly at 0 and n hits (never collapses to a point), which the
/// zero-hit Monte Carlo verdicts rely on.
pub fn wilson_ci(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Upper `level` quantile of the chi-squared distribution with `df` degrees
/// of freedom (e.g. `level = 0.99`).
pub fn chi_squared_quantile(df: f64, level: f64) -> f64 {
    ChiSquared::new(df)
        .expect("positive degrees of freedom")
        .inverse_cdf(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_and_tail_reference_values() {
        // Classical table values at full double precision.
        assert_relative_eq!(cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(tail(1.0), 0.15865525393145707, epsilon = 1e-14);
        assert_relative_eq!(cdf(1.959963984540054), 0.975, epsilon = 1e-12);
        assert_relative_eq!(tail(8.0), 6.220960574271786e-16, max_relative = 1e-10);
    }

    #[test]
    fn pdf_reference_values() {
        assert_relative_eq!(pdf(0.0), 0.3989422804014327, epsilon = 1e-15);
        assert_relative_eq!(pdf(1.0), 0.24197072451914337, epsilon = 1e-15);
    }

    #[test]
    fn tail_pdf_consistency_deep_tail() {
        // tail(x) ~ pdf(x)/x * (1 - 1/x^2 + 3/x^4 - ...) for large x.
        let x = 12.0;
        let asym = pdf(x) / x * (1.0 - 1.0 / (x * x) + 3.0 / (x * x * x * x));
        assert_relative_eq!(tail(x), asym, max_relative = 1e-4);
    }

    #[test]
    fn interval_prob_symmetric() {
        let p = interval_prob(-1.0, 1.0);
        assert_relative_eq!(p, 0.6826894921370859, epsilon = 1e-13);
        let deep = interval_prob(10.0, 11.0);
        assert!(deep > 0.0 && deep < tail(10.0));
    }

    #[test]
    fn wilson_interval_zero_hits_matches_rule_of_three() {
        let (lo, hi) = wilson_ci(0, 1000, 1.96);
        assert_eq!(lo, 0.0);
        // Rule of three: upper ≈ 3/n for 95%; Wilson is close but tighter.
        assert!(hi > 1.0e-3 && hi < 4.0e-3, "hi = {hi}");
        let (lo2, hi2) = wilson_ci(1000, 1000, 1.96);
        assert!(lo2 > 0.996 && hi2 == 1.0);
    }

    #[test]
    fn wilson_interval_covers_point_estimate() {
        let (lo, hi) = wilson_ci(437, 1000, 1.96);
        assert!(lo < 0.437 && 0.437 < hi);
        assert!(hi - lo < 0.07);
    }

    #[test]
    fn chi_squared_quantile_reference() {
        // df=9, p=0.99 from standard tables; the quantile is found by a
        // numeric root search, so only moderate accuracy is guaranteed.
        assert_relative_eq!(chi_squared_quantile(9.0, 0.99), 21.665994333461924, max_relative = 1e-4);
    }

    #[test]
    fn mean_se_simple() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(m, 2.5, epsilon = 1e-15);
        assert_relative_eq!(se, (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-15);
    }
}
