//! Trend classifiers that decide whether a positive series or integral
//! diverges, with an explicit inconclusive band.
//!
//! Two data shapes arise in this crate and get two different classifiers:
//!
//! * [`classify_series`] — a *densely sampled* series whose `n`-th term is
//!   `exp(-c_n)` for a smooth exponent profile `c_n`. The reference scale is
//!   the harmonic series (`c_n = ln n`). Two tiers:
//!   a **dead band** (windowed median of `(ln n - c_n)/ln ln n` at least
//!   `band_width` away from zero, sustained over the window) and, when the
//!   band is silent, a **trend fit** of `c_n` against `ln n` whose slope is
//!   compared against `1 ± trend_margin`. A slope within the margin — the
//!   harmonic boundary — stays inconclusive by design.
//! * [`classify_sum_trace`] — monotone partial sums of an integral split
//!   into geometric blocks. The statistic is the ratio of consecutive block
//!   increments: geometric collapse means a summable tail, ratios near one
//!   mean the contributions keep coming. This is the honest shape for
//!   integrals whose mass is concentrated at scattered scales, where no
//!   pointwise term-vs-`1/n` comparison is sound.
//!
//! Both emit verdicts about the *trend of the data given*: a finitely
//! truncated family is classified by how its blocks behave over the observed
//! range, which is exactly what a desk-scale computation can certify.

use crate::{Error, Result};

/// Outcome of a divergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Diverges => "diverges",
            Verdict::Converges => "converges",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// One sampled term of a positive series: term value = `exp(-c)`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSample {
    /// Index `n > 1`; samples must be strictly increasing in `n`.
    pub n: f64,
    /// Exponent `c_n = -ln(term_n)`; `+inf` encodes a zero term.
    pub c: f64,
}

/// Tuning for [`classify_series`].
#[derive(Debug, Clone)]
pub struct SeriesOptions {
    /// Dead-band half width in units of `ln ln n` (tier one).
    pub band_width: f64,
    /// Fraction of window samples that must sit beyond the band.
    pub sustained_fraction: f64,
    /// Slope margin `kappa` around 1 for the trend tier.
    pub trend_margin: f64,
    /// Band window: top fraction of the log-index range.
    pub band_window_fraction: f64,
    /// Trend window: top fraction of the log-index range.
    pub trend_window_fraction: f64,
    /// Minimum total samples for the band tier to be meaningful.
    pub min_band_samples: usize,
    /// Minimum total samples below which everything is inconclusive.
    pub min_trend_samples: usize,
    /// A convergence verdict is withheld when at least this fraction of the
    /// window has `c_n <= ln n` (terms at least harmonic size).
    pub guard_fraction: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            band_width: 2.0,
            sustained_fraction: 0.9,
            trend_margin: 0.04,
            band_window_fraction: 0.25,
            trend_window_fraction: 0.5,
            min_band_samples: 1000,
            min_trend_samples: 32,
            guard_fraction: 0.25,
        }
    }
}

/// Diagnostics of a series classification.
#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub verdict: Verdict,
    /// Windowed median of `(ln n - c_n)/ln ln n` (positive favors divergence).
    pub band_margin: f64,
    /// Fraction of band-window samples beyond the band on the median's side.
    pub band_beyond_fraction: f64,
    /// Fitted slope of `c_n` against `ln n` over the trend window.
    pub trend_slope: f64,
    pub trend_intercept: f64,
    /// `(ln n_lo, ln n_hi)` of the trend window.
    pub window_log_range: (f64, f64),
    pub samples_in_window: usize,
    /// Convergence was suppressed because window terms stayed harmonic-sized.
    pub guard_applied: bool,
    /// Fraction of trend-window samples with a zero term (`c = +inf`).
    pub infinite_fraction: f64,
}

fn median(values: &mut Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Classify a densely sampled positive series `sum exp(-c_n)`.
///
/// Samples must be strictly increasing in `n` with `n > 1`. The sampling may
/// be decimated (e.g. log-spaced) but is assumed to represent a smooth
/// profile; spiky profiles should be classified through their block sums
/// with [`classify_sum_trace`] instead.
pub fn classify_series(samples: &[SeriesSample], opts: &SeriesOptions) -> Result<SeriesReport> {
    if samples.len() < 2 {
        return Err(Error::Domain(format!(
            "series classification needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[1].n > w[0].n) {
            return Err(Error::Domain("series samples must be strictly increasing in n".into()));
        }
    }
    if !(samples[0].n > 1.0) {
        return Err(Error::Domain(format!(
            "series indices must exceed 1 (ln ln n must exist), got n = {}",
            samples[0].n
        )));
    }

    let l_lo = samples[0].n.ln();
    let l_hi = samples[samples.len() - 1].n.ln();
    let span = l_hi - l_lo;

    let trend_cut = l_hi - opts.trend_window_fraction * span;
    let band_cut = l_hi - opts.band_window_fraction * span;

    let trend_window: Vec<&SeriesSample> =
        samples.iter().filter(|s| s.n.ln() >= trend_cut).collect();
    let band_window: Vec<&SeriesSample> =
        samples.iter().filter(|s| s.n.ln() >= band_cut).collect();

    let infinite_in_window = trend_window.iter().filter(|s| s.c.is_infinite()).count();
    let infinite_fraction = infinite_in_window as f64 / trend_window.len().max(1) as f64;

    // Guard statistic: how much of the window still has terms >= 1/n.
    let harmonic_or_larger = trend_window
        .iter()
        .filter(|s| s.c <= s.n.ln())
        .count() as f64
        / trend_window.len().max(1) as f64;

    let mut report = SeriesReport {
        verdict: Verdict::Inconclusive,
        band_margin: f64::NAN,
        band_beyond_fraction: 0.0,
        trend_slope: f64::NAN,
        trend_intercept: f64::NAN,
        window_log_range: (trend_cut, l_hi),
        samples_in_window: trend_window.len(),
        guard_applied: false,
        infinite_fraction,
    };

    if samples.len() < opts.min_trend_samples {
        return Ok(report);
    }

    // --- Tier one: dead band on the normalized margin ---------------------
    if samples.len() >= opts.min_band_samples && !band_window.is_empty() {
        let mut margins: Vec<f64> = band_window
            .iter()
            .map(|s| {
                let ln_n = s.n.ln();
                (ln_n - s.c) / ln_n.ln()
            })
            .collect();
        let med = median(&mut margins.clone());
        report.band_margin = med;
        if med >= opts.band_width {
            let frac = margins.iter().filter(|&&m| m >= opts.band_width).count() as f64
                / margins.len() as f64;
            report.band_beyond_fraction = frac;
            if frac >= opts.sustained_fraction {
                report.verdict = Verdict::Diverges;
                return Ok(report);
            }
        } else if med <= -opts.band_width {
            let frac = margins.iter().filter(|&&m| m <= -opts.band_width).count() as f64
                / margins.len() as f64;
            report.band_beyond_fraction = frac;
            if frac >= opts.sustained_fraction {
                if harmonic_or_larger >= opts.guard_fraction {
                    report.guard_applied = true;
                    report.verdict = Verdict::Inconclusive;
                } else {
                    report.verdict = Verdict::Converges;
                }
                return Ok(report);
            }
        }
    }

    // --- Tier two: slope of c against ln n --------------------------------
    let finite: Vec<(f64, f64)> = trend_window
        .iter()
        .filter(|s| s.c.is_finite())
        .map(|s| (s.n.ln(), s.c))
        .collect();

    if finite.len() < 8 {
        // Nearly all terms are zero in the window: the partial sums have
        // stopped moving at sampling resolution.
        if infinite_fraction >= 0.75 {
            report.verdict = Verdict::Converges;
        }
        return Ok(report);
    }

    let n = finite.len() as f64;
    let mx = finite.iter().map(|p| p.0).sum::<f64>() / n;
    let my = finite.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = finite.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = finite.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Ok(report);
    }
    let slope = sxy / sxx;
    report.trend_slope = slope;
    report.trend_intercept = my - slope * mx;

    if slope <= 1.0 - opts.trend_margin {
        report.verdict = Verdict::Diverges;
    } else if slope >= 1.0 + opts.trend_margin {
        if harmonic_or_larger >= opts.guard_fraction {
            report.guard_applied = true;
            report.verdict = Verdict::Inconclusive;
        } else {
            report.verdict = Verdict::Converges;
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Partial-sum trace classifier
// ---------------------------------------------------------------------------

/// One geometric block of an integral: the increment of the partial sum over
/// `(x_prev, x]`, stored as a logarithm (`-inf` = empty block).
#[derive(Debug, Clone, Copy)]
pub struct BlockIncrement {
    pub x: f64,
    pub log_increment: f64,
}

/// Tuning for [`classify_sum_trace`].
#[derive(Debug, Clone)]
pub struct SumTraceOptions {
    /// Median increment ratio at or above this means the tail keeps coming.
    pub diverge_ratio: f64,
    /// Median increment ratio at or below this means geometric collapse.
    pub converge_ratio: f64,
    /// Trailing increments below `negligible_rel × total` count as zero.
    pub negligible_rel: f64,
    /// Number of trailing ratio pairs entering the median.
    pub ratio_window: usize,
    /// Fewer checkpoints than this is inconclusive.
    pub min_checkpoints: usize,
}

impl Default for SumTraceOptions {
    fn default() -> Self {
        SumTraceOptions {
            diverge_ratio: 0.8,
            converge_ratio: 0.55,
            negligible_rel: 1e-12,
            ratio_window: 8,
            min_checkpoints: 6,
        }
    }
}

/// Diagnostics of a partial-sum trace classification.
#[derive(Debug, Clone)]
pub struct SumTraceReport {
    pub verdict: Verdict,
    /// Median of consecutive increment ratios over the trailing window.
    pub ratio_median: f64,
    /// `ln` of the partial sum over all blocks.
    pub log_total: f64,
    /// `ln` of a geometric tail extrapolation (`+inf` when not collapsing).
    pub log_tail_estimate: f64,
    pub last_log_increment: f64,
    pub blocks: usize,
}

/// Classify the tail trend of a monotone sum split into geometric blocks.
pub fn classify_sum_trace(
    blocks: &[BlockIncrement],
    opts: &SumTraceOptions,
) -> Result<SumTraceReport> {
    if blocks.len() < 2 {
        return Err(Error::Domain(format!(
            "sum-trace classification needs at least 2 blocks, got {}",
            blocks.len()
        )));
    }
    for w in blocks.windows(2) {
        if !(w[1].x > w[0].x) {
            return Err(Error::Domain("block coordinates must be strictly increasing".into()));
        }
    }

    let log_total = crate::logdomain::log_sum_exp(
        &blocks.iter().map(|b| b.log_increment).collect::<Vec<_>>(),
    );
    let mut report = SumTraceReport {
        verdict: Verdict::Inconclusive,
        ratio_median: f64::NAN,
        log_total,
        log_tail_estimate: f64::INFINITY,
        last_log_increment: blocks.last().unwrap().log_increment,
        blocks: blocks.len(),
    };

    // Empty sum: nothing in any block.
    if log_total == f64::NEG_INFINITY {
        report.verdict = Verdict::Converges;
        report.log_tail_estimate = f64::NEG_INFINITY;
        return Ok(report);
    }

    let threshold = log_total + opts.negligible_rel.ln();
    let last_significant = blocks
        .iter()
        .rposition(|b| b.log_increment > threshold)
        .unwrap_or(0);

    // Saturated: at least the last two blocks contribute nothing measurable.
    if last_significant + 2 < blocks.len() {
        report.verdict = Verdict::Converges;
        report.log_tail_estimate = f64::NEG_INFINITY;
        return Ok(report);
    }

    if blocks.len() < opts.min_checkpoints {
        return Ok(report);
    }

    // Ratio statistics over the trailing window.
    let start = blocks.len().saturating_sub(opts.ratio_window + 1);
    let mut ratios: Vec<f64> = Vec::new();
    for w in blocks[start..].windows(2) {
        let (a, b) = (w[0].log_increment, w[1].log_increment);
        let r = if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            continue;
        } else if a == f64::NEG_INFINITY {
            // Revival after an empty block: strong non-collapse evidence.
            10.0
        } else if b == f64::NEG_INFINITY {
            0.0
        } else {
            (b - a).exp().min(10.0)
        };
        ratios.push(r);
    }
    if ratios.is_empty() {
        return Ok(report);
    }
    let med = median(&mut ratios);
    report.ratio_median = med;

    let last_negligible = report.last_log_increment <= threshold;
    if med >= opts.diverge_ratio && !last_negligible {
        report.verdict = Verdict::Diverges;
    } else if med <= opts.converge_ratio || last_negligible {
        report.verdict = Verdict::Converges;
    }
    if med < 1.0 {
        report.log_tail_estimate =
            report.last_log_increment + (med / (1.0 - med)).max(1e-300).ln();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_spaced_samples(n_lo: f64, n_hi: f64, count: usize, c_of_n: impl Fn(f64) -> f64) -> Vec<SeriesSample> {
        let (llo, lhi) = (n_lo.ln(), n_hi.ln());
        let mut prev = f64::MIN;
        let mut out = Vec::new();
        for i in 0..count {
            let ln_n = llo + (lhi - llo) * (i as f64) / ((count - 1) as f64);
            let n = ln_n.exp();
            if n > prev {
                out.push(SeriesSample { n, c: c_of_n(n) });
                prev = n;
            }
        }
        out
    }

    #[test]
    fn band_tier_fires_on_clear_divergence() {
        // c_n = 0.5 ln n: terms n^{-1/2}, clearly divergent.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| 0.5 * n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
        assert!(r.band_margin >= 2.0, "band margin {}", r.band_margin);
        assert!(r.band_beyond_fraction >= 0.9);
    }

    #[test]
    fn band_tier_fires_on_clear_convergence() {
        // c_n = 2 ln n: terms n^{-2}.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| 2.0 * n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
        assert!(r.band_margin <= -2.0);
        assert!(!r.guard_applied);
    }

    #[test]
    fn harmonic_boundary_stays_inconclusive() {
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!((r.trend_slope - 1.0).abs() < 1e-9);

        // Slightly tilted but inside the margin: still inconclusive.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| 1.03 * n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn trend_tier_resolves_near_harmonic_sides() {
        // Slope 0.93: divergent side, too close for the band.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| 0.93 * n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
        assert!((r.trend_slope - 0.93).abs() < 1e-9);

        // Slope 1.08: convergent side.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| 1.08 * n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
    }

    #[test]
    fn log_factor_families_classify_by_slope_drift() {
        // c = ln n + 3 ln ln n: sum 1/(n ln³ n) converges; local slope
        // 1 + 3/ln n stays above the margin over the window.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| n.ln() + 3.0 * n.ln().ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);

        // c = ln n - 2 ln ln n: sum ln² n / n diverges.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| n.ln() - 2.0 * n.ln().ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
    }

    #[test]
    fn guard_blocks_convergence_with_harmonic_sized_terms() {
        // Slope 1.1 but c_n <= ln n throughout the window (n <= e^30):
        // terms are at least 1/n there, so a convergence verdict would be
        // dishonest at this window; the guard must hold it back.
        let samples = log_spaced_samples(8.0, 1e6, 4096, |n| 1.1 * n.ln() - 3.0);
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.guard_applied);
    }

    #[test]
    fn zero_tail_series_converges() {
        // Terms vanish entirely beyond n = 100.
        let samples = log_spaced_samples(8.0, 1e6, 2048, |n| {
            if n <= 100.0 {
                0.2 * n.ln()
            } else {
                f64::INFINITY
            }
        });
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
        assert!(r.infinite_fraction > 0.9);
    }

    #[test]
    fn too_few_samples_is_inconclusive() {
        let samples = log_spaced_samples(8.0, 1e3, 10, |n| 0.5 * n.ln());
        let r = classify_series(&samples, &SeriesOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn series_input_validation() {
        assert!(classify_series(&[], &SeriesOptions::default()).is_err());
        let bad = vec![
            SeriesSample { n: 10.0, c: 1.0 },
            SeriesSample { n: 10.0, c: 1.0 },
        ];
        assert!(classify_series(&bad, &SeriesOptions::default()).is_err());
        let low = vec![
            SeriesSample { n: 0.5, c: 1.0 },
            SeriesSample { n: 10.0, c: 1.0 },
        ];
        assert!(classify_series(&low, &SeriesOptions::default()).is_err());
    }

    fn blocks_from(f: impl Fn(usize) -> f64, k: usize) -> Vec<BlockIncrement> {
        (0..k)
            .map(|i| BlockIncrement {
                x: (i + 1) as f64,
                log_increment: f(i),
            })
            .collect()
    }

    #[test]
    fn sum_trace_geometric_collapse_converges() {
        // Increments 0.3^k.
        let blocks = blocks_from(|i| (0.3_f64).ln() * i as f64, 14);
        let r = classify_sum_trace(&blocks, &SumTraceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
        assert!((r.ratio_median - 0.3).abs() < 1e-9);
        // Geometric tail estimate matches the true remainder 0.3^14·(0.3/0.7).
        let true_tail = (0.3_f64).powi(13) * 0.3 / 0.7;
        assert!((r.log_tail_estimate - true_tail.ln()).abs() < 1e-6);
    }

    #[test]
    fn sum_trace_constant_increments_diverge() {
        let blocks = blocks_from(|_| (2.5_f64).ln(), 16);
        let r = classify_sum_trace(&blocks, &SumTraceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
        assert!((r.ratio_median - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sum_trace_slow_decay_diverges() {
        // Harmonic-in-block increments 1/k: slower than geometric; trend-divergent.
        let blocks = blocks_from(|i| (1.0 / (i as f64 + 1.0)).ln(), 20);
        let r = classify_sum_trace(&blocks, &SumTraceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
        assert!(r.ratio_median > 0.8);
    }

    #[test]
    fn sum_trace_saturated_tail_converges() {
        let blocks: Vec<BlockIncrement> = (0..12)
            .map(|i| BlockIncrement {
                x: (i + 1) as f64,
                log_increment: if i < 6 { 0.0 } else { f64::NEG_INFINITY },
            })
            .collect();
        let r = classify_sum_trace(&blocks, &SumTraceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
        assert_eq!(r.log_tail_estimate, f64::NEG_INFINITY);
    }

    #[test]
    fn sum_trace_mid_band_is_inconclusive() {
        // Ratio 0.68 sits between the thresholds.
        let blocks = blocks_from(|i| (0.68_f64).ln() * i as f64, 14);
        let r = classify_sum_trace(&blocks, &SumTraceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn sum_trace_empty_sum_converges() {
        let blocks = blocks_from(|_| f64::NEG_INFINITY, 8);
        let r = classify_sum_trace(&blocks, &SumTraceOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Converges);
        assert_eq!(r.log_total, f64::NEG_INFINITY);
    }
}
