//! Numerical toolkit for small-scale analysis of pure-jump processes.
//!
//! The crate is organized bottom-up:
//!
//! * [`logdomain`] — stable arithmetic on logarithms of positive quantities.
//! * [`nested`] — numbers of the form `exp(exp(·))` that overflow `f64`.
//! * [`rng`] — counter-based deterministic random streams and samplers.
//! * [`gauss`] — Gaussian density/tail helpers and confidence intervals.
//! * [`measures`] — jump measures on the unit ball and their truncated
//!   second-moment functionals.
//! * [`search`] — direction search on the unit sphere (used by the
//!   projected variance functional).
//! * [`normalizers`] — slowly-varying scale families, the scale normalizer
//!   `b(t)`, its inverse, and admissibility checks.
//! * [`divergence`] — classifiers that decide whether a series or integral
//!   trend diverges, with an explicit inconclusive band.
//! * [`integral`] — rate series built from variance profiles, the critical
//!   threshold estimate, and the scaling constant.
//! * [`cluster`] — construction of sparse atomic measures whose small-scale
//!   behavior realizes a prescribed cluster set, plus verification.
//! * [`simulate`] — increment and path simulation with compensated jumps.
//! * [`inequalities`] — Monte Carlo and exact checks of the concentration
//!   bounds used throughout.

pub mod logdomain;
pub mod nested;
pub mod rng;
pub mod gauss;
pub mod measures;
pub mod search;
pub mod normalizers;
pub mod divergence;
pub mod integral;
pub mod cluster;
pub mod simulate;
pub mod inequalities;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant of a constructed object fails.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A construction step is invalid; reports the first offending index pair.
    #[error("construction error at stage (k={k}, l={l}): {reason}")]
    Construction { k: u32, l: u32, reason: String },

    /// The requested operation is not supported for this variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A numeric result left the representable range unexpectedly.
    #[error("numeric range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

#[inline]
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

#[inline]
pub(crate) fn ensure_domain(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
