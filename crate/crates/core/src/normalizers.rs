//! Scale normalizers `b(t) = sqrt(t · lnln(1/t)) / h(1/t)` built from a
//! family of slowly varying tempering factors `h`, with exact log-domain
//! evaluation, a linear-in-log continuation near `t = 1`, and a bisection
//! inverse.
//!
//! Everything is computed in the coordinates that stay representable at
//! extreme scales: `log_t = ln t` (possibly around `-1e308`) and
//! `llx = ln ln(1/t)` (at most ~710). The tempering factor is specified as a
//! function of `llx`, which makes the families exactly invertible.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[path = "normalizers_conditions.rs"]
pub mod conditions;

/// Slowly varying tempering factor `h(x)`, parametrized by `llx = ln ln x`
/// (so callers never need `x` itself, which may be far beyond `f64`).
///
/// All families are nondecreasing in `x` for the validated parameter ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SlowFunction {
    /// `h(x) = value`, `value > 0`.
    Const { value: f64 },
    /// `h(x) = (ln ln x)^gamma`, `gamma > 0`.
    PowLogLog { gamma: f64 },
    /// `h(x) = (ln x)^gamma`, `gamma > 0`.
    PowLog { gamma: f64 },
    /// `h(x) = exp(scale · (ln ln x)^power)`, `scale > 0`, `0 < power < 1`.
    ExpLogLogPow { scale: f64, power: f64 },
    /// Pointwise product of factors.
    Product { factors: Vec<SlowFunction> },
}

impl SlowFunction {
    pub fn constant(value: f64) -> Self {
        SlowFunction::Const { value }
    }
    pub fn pow_log_log(gamma: f64) -> Self {
        SlowFunction::PowLogLog { gamma }
    }
    pub fn pow_log(gamma: f64) -> Self {
        SlowFunction::PowLog { gamma }
    }
    pub fn exp_log_log_pow(scale: f64, power: f64) -> Self {
        SlowFunction::ExpLogLogPow { scale, power }
    }

    /// Check parameter ranges (recursively for products).
    pub fn validate(&self) -> Result<()> {
        match self {
            SlowFunction::Const { value } => {
                if !(*value > 0.0 && value.is_finite()) {
                    return Err(Error::Domain(format!(
                        "constant tempering factor must be positive and finite, got {value}"
                    )));
                }
            }
            SlowFunction::PowLogLog { gamma } | SlowFunction::PowLog { gamma } => {
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::Domain(format!(
                        "tempering exponent must be positive and finite, got {gamma}"
                    )));
                }
            }
            SlowFunction::ExpLogLogPow { scale, power } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::Domain(format!(
                        "tempering scale must be positive and finite, got {scale}"
                    )));
                }
                if !(*power > 0.0 && *power < 1.0) {
                    return Err(Error::Domain(format!(
                        "tempering power must lie in (0, 1), got {power}"
                    )));
                }
            }
            SlowFunction::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::Domain(
                        "product tempering factor needs at least one factor".into(),
                    ));
                }
                for f in factors {
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    /// `ln h(x)` as a function of `llx = ln ln x`. Requires `llx > 0`
    /// (`x > e`); outside that domain the families involving `ln llx`
    /// return NaN, which callers treat as out of range.
    pub fn log_h(&self, llx: f64) -> f64 {
        match self {
            SlowFunction::Const { value } => value.ln(),
            SlowFunction::PowLogLog { gamma } => gamma * llx.ln(),
            SlowFunction::PowLog { gamma } => gamma * llx,
            SlowFunction::ExpLogLogPow { scale, power } => scale * llx.powf(*power),
            SlowFunction::Product { factors } => factors.iter().map(|f| f.log_h(llx)).sum(),
        }
    }

    /// Exact inverse: the `llx` with `log_h(llx) = log_h`. Errors for
    /// families that are not invertible (constants, products) or when the
    /// preimage would fall outside `llx > 0`.
    pub fn llx_from_log_h(&self, log_h: f64) -> Result<f64> {
        match self {
            SlowFunction::Const { .. } => Err(Error::Unsupported(
                "constant tempering factor has no inverse".into(),
            )),
            SlowFunction::Product { .. } => Err(Error::Unsupported(
                "product tempering factor has no closed-form inverse".into(),
            )),
            SlowFunction::PowLogLog { gamma } => Ok((log_h / gamma).exp()),
            SlowFunction::PowLog { gamma } => {
                let llx = log_h / gamma;
                if llx > 0.0 {
                    Ok(llx)
                } else {
                    Err(Error::Range(format!(
                        "no admissible scale has tempering log-value {log_h}"
                    )))
                }
            }
            SlowFunction::ExpLogLogPow { scale, power } => {
                if log_h > 0.0 {
                    Ok((log_h / scale).powf(1.0 / power))
                } else {
                    Err(Error::Range(format!(
                        "no admissible scale has tempering log-value {log_h}"
                    )))
                }
            }
        }
    }

    /// `ln llx` of the preimage, usable when `llx` itself would overflow.
    pub fn log_llx_from_log_h(&self, log_h: f64) -> Result<f64> {
        match self {
            SlowFunction::Const { .. } | SlowFunction::Product { .. } => {
                Err(Error::Unsupported("tempering factor has no inverse".into()))
            }
            SlowFunction::PowLogLog { gamma } => Ok(log_h / gamma),
            SlowFunction::PowLog { gamma } => {
                if log_h / gamma > 0.0 {
                    Ok((log_h / gamma).ln())
                } else {
                    Err(Error::Range(format!(
                        "no admissible scale has tempering log-value {log_h}"
                    )))
                }
            }
            SlowFunction::ExpLogLogPow { scale, power } => {
                if log_h > 0.0 {
                    Ok((log_h.ln() - scale.ln()) / power)
                } else {
                    Err(Error::Range(format!(
                        "no admissible scale has tempering log-value {log_h}"
                    )))
                }
            }
        }
    }

    /// Slow-variation defect under the probe `x -> x·exp((ln x)^tau)`:
    /// `|h(x')/h(x) - 1|` evaluated at `llx = ln ln x`, `tau < 1`.
    /// Vanishes as `llx -> inf` for every family here.
    pub fn variation_defect(&self, llx: f64, tau: f64) -> f64 {
        let shift = crate::logdomain::ln_1p_exp((tau - 1.0) * llx);
        let delta = self.log_h(llx + shift) - self.log_h(llx);
        delta.exp_m1().abs()
    }
}

impl std::fmt::Display for SlowFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SlowFunction::Const { value } => write!(f, "{value}"),
            SlowFunction::PowLogLog { gamma } => write!(f, "loglog^{gamma}"),
            SlowFunction::PowLog { gamma } => write!(f, "log^{gamma}"),
            SlowFunction::ExpLogLogPow { scale, power } => {
                write!(f, "exp({scale}·loglog^{power})")
            }
            SlowFunction::Product { factors } => {
                let parts: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join("·"))
            }
        }
    }
}

/// Default junction point `t0 = exp(-e²)`: the formula side is used for
/// `t <= t0`, where `llx = ln ln(1/t) >= 2`.
pub fn default_junction_log_t() -> f64 {
    -(std::f64::consts::E * std::f64::consts::E)
}

/// The scale normalizer `b(t)`:
///
/// * for `t <= t0`: `ln b = (ln t + ln llx)/2 - ln h`, with `llx = ln ln(1/t)`;
/// * for `t0 <= t <= 1`: linear interpolation of `ln b` in `ln t` between the
///   junction value and `b(1) = 1`, i.e. `ln b = slope · ln t`.
///
/// Construction validates that `b(t0) < 1` (so the continuation increases)
/// and that `b` is strictly increasing across the representable range.
#[derive(Debug, Clone)]
pub struct Normalizer {
    h: SlowFunction,
    log_t0: f64,
    llx0: f64,
    log_b_t0: f64,
    junction_slope: f64,
}

const MAX_LOG_MAG: f64 = 709.78; // ln of the largest finite f64, minus headroom

impl Normalizer {
    /// Build with the default junction `t0 = exp(-e²)`.
    pub fn new(h: SlowFunction) -> Result<Self> {
        Self::with_junction(h, default_junction_log_t())
    }

    /// Build with a custom junction `ln t0 < -1` (so `llx(t0) > 0`).
    pub fn with_junction(h: SlowFunction, log_t0: f64) -> Result<Self> {
        h.validate()?;
        if !(log_t0 < -1.0 && log_t0.is_finite()) {
            return Err(Error::Domain(format!(
                "junction ln t0 must be finite and below -1, got {log_t0}"
            )));
        }
        let llx0 = (-log_t0).ln();
        let log_b_t0 = 0.5 * (log_t0 + llx0.ln()) - h.log_h(llx0);
        if !log_b_t0.is_finite() {
            return Err(Error::Invariant(format!(
                "normalizer is not finite at the junction (ln b(t0) = {log_b_t0})"
            )));
        }
        if log_b_t0 >= 0.0 {
            return Err(Error::Invariant(format!(
                "normalizer junction value must stay below one, got ln b(t0) = {log_b_t0}; \
                 the tempering factor is too small at the junction scale"
            )));
        }
        let norm = Normalizer {
            h,
            log_t0,
            llx0,
            log_b_t0,
            junction_slope: log_b_t0 / log_t0,
        };
        norm.validate_monotone()?;
        Ok(norm)
    }

    fn validate_monotone(&self) -> Result<()> {
        // Formula side: ln b must strictly decrease as llx increases,
        // across the whole representable range of llx.
        let n = 400;
        let (lo, hi) = (self.llx0, 700.0_f64);
        let mut prev = self.log_b_t0;
        for i in 1..=n {
            let llx = lo * (hi / lo).powf(i as f64 / n as f64);
            let log_t = -llx.exp();
            let lb = self.log_eval_formula(log_t, llx);
            if !lb.is_finite() && lb != f64::NEG_INFINITY {
                return Err(Error::Invariant(format!(
                    "normalizer is not finite at ln t = {log_t}"
                )));
            }
            if lb >= prev {
                return Err(Error::Invariant(format!(
                    "normalizer fails to be strictly increasing near ln t = {log_t}"
                )));
            }
            prev = lb;
        }
        Ok(())
    }

    fn log_eval_formula(&self, log_t: f64, llx: f64) -> f64 {
        0.5 * (log_t + llx.ln()) - self.h.log_h(llx)
    }

    pub fn slow_factor(&self) -> &SlowFunction {
        &self.h
    }
    /// `ln t0` of the junction.
    pub fn junction_log_t(&self) -> f64 {
        self.log_t0
    }
    /// `ln b(t0)`.
    pub fn junction_log_value(&self) -> f64 {
        self.log_b_t0
    }
    /// Slope of `ln b` in `ln t` on the continuation `[t0, 1]`.
    pub fn junction_slope(&self) -> f64 {
        self.junction_slope
    }
    /// `llx = ln ln(1/t)` for a point on the formula side.
    pub fn llx_of(&self, log_t: f64) -> f64 {
        (-log_t).ln()
    }

    /// `ln b(t)` from `ln t`, for `t` in `(0, 1]`.
    pub fn log_eval(&self, log_t: f64) -> Result<f64> {
        if !(log_t <= 0.0) {
            return Err(Error::Domain(format!(
                "normalizer is defined for ln t <= 0, got {log_t}"
            )));
        }
        if log_t == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if log_t >= self.log_t0 {
            return Ok(self.junction_slope * log_t);
        }
        Ok(self.log_eval_formula(log_t, (-log_t).ln()))
    }

    /// `b(t)` in plain coordinates.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.log_eval(t.ln())?.exp())
    }

    /// `ln t` with `b(t) = x`, from `ln x <= 0`. On the continuation this is
    /// closed-form; on the formula side it is a bisection in `u = ln(-ln t)`
    /// that converges to full relative precision.
    pub fn log_invert(&self, log_x: f64) -> Result<f64> {
        if !(log_x <= 0.0) {
            return Err(Error::Domain(format!(
                "normalizer inverse is defined for ln x <= 0, got {log_x}"
            )));
        }
        if log_x == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if log_x >= self.log_b_t0 {
            return Ok(log_x / self.junction_slope);
        }
        // ln b(-exp(u)) is strictly decreasing in u on the formula side.
        let eval_u = |u: f64| self.log_eval_formula(-u.exp(), u);
        let mut u_lo = self.llx0;
        let mut u_hi = (self.llx0 + 1.0).min(MAX_LOG_MAG);
        while eval_u(u_hi) > log_x {
            if u_hi >= MAX_LOG_MAG {
                return Err(Error::Range(format!(
                    "no representable scale reaches ln b = {log_x}"
                )));
            }
            u_lo = u_hi;
            u_hi = (u_hi * 2.0).min(MAX_LOG_MAG);
        }
        for _ in 0..200 {
            let mid = 0.5 * (u_lo + u_hi);
            if mid <= u_lo || mid >= u_hi {
                break;
            }
            if eval_u(mid) > log_x {
                u_lo = mid;
            } else {
                u_hi = mid;
            }
        }
        Ok(-(0.5 * (u_lo + u_hi)).exp())
    }

    /// `t` with `b(t) = x`, in plain coordinates.
    pub fn invert(&self, x: f64) -> Result<f64> {
        Ok(self.log_invert(x.ln())?.exp())
    }
}

#[cfg(test)]
#[path = "normalizers_tests.rs"]
mod tests;
