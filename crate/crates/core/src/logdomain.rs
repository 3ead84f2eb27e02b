//! Arithmetic on logarithms of positive quantities.
//!
//! Conventions: the logarithm of zero is `f64::NEG_INFINITY`; all functions
//! accept it and propagate it exactly. `NaN` inputs propagate as `NaN`.

/// `ln(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        return f64::NAN;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum_i exp(v_i))` over a slice; `NEG_INFINITY` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        if v > hi {
            hi = v;
        }
    }
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &v in values {
        acc += (v - hi).exp();
    }
    hi + acc.ln()
}

/// `ln(exp(a) - exp(b))` for `a >= b`; errors are signalled with `NaN` when
/// `a < b` (a negative quantity has no logarithm).
#[inline]
pub fn log_diff_exp(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() || a < b {
        return f64::NAN;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    // ln(e^a - e^b) = a + ln(1 - e^(b-a)); b - a < 0 here.
    a + ln_1m_exp(b - a)
}

/// `ln(1 + exp(x))` for any `x`, without overflow.
#[inline]
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(1 - exp(x))` for `x < 0`, stable for both tiny and large `|x|`.
#[inline]
pub fn ln_1m_exp(x: f64) -> f64 {
    debug_assert!(x < 0.0 || x.is_nan());
    if x < -std::f64::consts::LN_2 {
        // exp(x) small: ln(1 - e^x) via ln_1p of a small negative number.
        (-x.exp()).ln_1p()
    } else {
        // x close to 0: 1 - e^x = -(expm1(x)), use ln directly on it.
        (-x.exp_m1()).ln()
    }
}

/// Running accumulator for `ln(sum exp)` that avoids storing all terms.
#[derive(Debug, Clone, Copy)]
pub struct LogSumAcc {
    log_sum: f64,
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumAcc {
    pub fn new() -> Self {
        LogSumAcc {
            log_sum: f64::NEG_INFINITY,
        }
    }

    #[inline]
    pub fn add(&mut self, log_term: f64) {
        self.log_sum = log_add_exp(self.log_sum, log_term);
    }

    #[inline]
    pub fn log_total(&self) -> f64 {
        self.log_sum
    }

    /// `true` once at least one finite term has been added.
    #[inline]
    pub fn is_positive(&self) -> bool {
        self.log_sum > f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_add_exp_matches_direct_sum() {
        let a: f64 = 1.25_f64.ln();
        let b: f64 = 3.5_f64.ln();
        assert_relative_eq!(log_add_exp(a, b), (1.25_f64 + 3.5).ln(), epsilon = 1e-15);
    }

    #[test]
    fn log_add_exp_handles_extreme_spread() {
        // exp(1000) + exp(-1000) == exp(1000) at f64 resolution.
        assert_eq!(log_add_exp(1000.0, -1000.0), 1000.0);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
        assert_eq!(
            log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn log_sum_exp_matches_pairwise() {
        let terms = [0.3, -4.0, 2.2, 1.0, -30.0];
        let mut acc = f64::NEG_INFINITY;
        for &t in &terms {
            acc = log_add_exp(acc, t);
        }
        assert_relative_eq!(log_sum_exp(&terms), acc, epsilon = 1e-14);
        let direct: f64 = terms.iter().map(|t| t.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&terms), direct, epsilon = 1e-14);
    }

    #[test]
    fn log_diff_exp_basic_and_degenerate() {
        let a: f64 = 5.0_f64.ln();
        let b: f64 = 3.0_f64.ln();
        assert_relative_eq!(log_diff_exp(a, b), 2.0_f64.ln(), epsilon = 1e-14);
        assert_eq!(log_diff_exp(a, a), f64::NEG_INFINITY);
        assert!(log_diff_exp(b, a).is_nan());
        assert_relative_eq!(log_diff_exp(a, f64::NEG_INFINITY), a, epsilon = 1e-15);
    }

    #[test]
    fn log_diff_exp_close_arguments_stay_accurate() {
        // ln(e^a - e^b) with a - b = 1e-9: direct subtraction loses digits,
        // the log-domain form must not.
        let a = 10.0_f64;
        let b = 10.0 - 1e-9;
        // Compare against the closed form evaluated at the *rounded* gap, so
        // the test checks the function, not the decimal literal.
        let gap = b - a;
        let expected = a + (-(gap.exp_m1())).ln();
        assert_relative_eq!(log_diff_exp(a, b), expected, epsilon = 1e-13);
    }

    #[test]
    fn ln_1p_exp_both_branches() {
        assert_relative_eq!(ln_1p_exp(0.3), (1.0 + 0.3_f64.exp()).ln(), epsilon = 1e-15);
        assert_relative_eq!(ln_1p_exp(-0.3), (1.0 + (-0.3_f64).exp()).ln(), epsilon = 1e-15);
        assert_relative_eq!(ln_1p_exp(800.0), 800.0, epsilon = 1e-15);
        assert_relative_eq!(ln_1p_exp(-50.0), (-50.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn ln_1m_exp_both_branches() {
        assert_relative_eq!(ln_1m_exp(-50.0), (-(-50.0_f64).exp()).ln_1p(), epsilon = 1e-15);
        assert_relative_eq!(ln_1m_exp(-1e-12), (1e-12_f64).ln() + 0.0, epsilon = 1e-3);
        // Cross-check against high-precision value of ln(1 - e^{-0.1}).
        assert_relative_eq!(ln_1m_exp(-0.1), (1.0 - (-0.1_f64).exp()).ln(), epsilon = 1e-12);
    }

    #[test]
    fn accumulator_matches_slice_form() {
        let mut acc = LogSumAcc::new();
        assert!(!acc.is_positive());
        for v in [0.1, -2.0, 3.0] {
            acc.add(v);
        }
        assert!(acc.is_positive());
        assert_relative_eq!(acc.log_total(), log_sum_exp(&[0.1, -2.0, 3.0]), epsilon = 1e-14);
    }
}
