//! Conformance metrics between an observed first-digit distribution and
//! Benford's expected distribution.
//!
//! Pearson's r is the primary score. MAD and the chi-square statistic are
//! supplementary: at social-network sample sizes any goodness-of-fit test
//! rejects on negligible deviations, so chi-square is always paired with a
//! large-sample warning and never turned into a p-value.

use serde::{Deserialize, Serialize};

use crate::digits::{BenfordExpected, FsdHistogram, DIGITS};
use crate::error::StatsError;

/// Sample size above which the chi-square statistic is flagged as
/// uninformative.
pub const DEFAULT_CHI_WARN: u64 = 10_000;

/// Pearson product-moment correlation of two 9-vectors.
///
/// Returns `None` when either vector has zero variance, where the correlation
/// is undefined.
pub fn pearson_r(observed: &[f64; DIGITS], expected: &[f64; DIGITS]) -> Option<f64> {
    if is_constant(observed) || is_constant(expected) {
        return None;
    }
    let n = DIGITS as f64;
    let mx = observed.iter().sum::<f64>() / n;
    let my = expected.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in observed.iter().zip(expected.iter()) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let denom = (sxx * syy).sqrt();
    if denom.is_nan() || denom <= 0.0 {
        return None;
    }
    let r = sxy / denom;
    r.is_finite().then(|| r.clamp(-1.0, 1.0))
}

fn is_constant(v: &[f64; DIGITS]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Mean absolute deviation over the nine digit proportions.
pub fn mad(observed: &[f64; DIGITS], expected: &[f64; DIGITS]) -> f64 {
    observed
        .iter()
        .zip(expected.iter())
        .map(|(o, e)| (o - e).abs())
        .sum::<f64>()
        / DIGITS as f64
}

/// Percent deviation of each observed proportion from its expectation,
/// `100 * |obs - exp| / exp`.
pub fn deviation_pct(observed: &[f64; DIGITS], expected: &[f64; DIGITS]) -> [f64; DIGITS] {
    let mut out = [0.0; DIGITS];
    for ((slot, o), e) in out.iter_mut().zip(observed).zip(expected) {
        *slot = 100.0 * (o - e).abs() / e;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    /// Set when the sample is so large that any deviation would be
    /// "significant".
    pub large_n_warning: bool,
    pub warn_threshold: u64,
}

/// Chi-square statistic over the nine bins of `hist`, with the large-n warning
/// raised when `hist.total() > warn_threshold`.
pub fn chi_square(
    hist: &FsdHistogram,
    expected: &BenfordExpected,
    warn_threshold: u64,
) -> Result<ChiSquare, StatsError> {
    if hist.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = hist.total() as f64;
    let statistic = hist
        .counts()
        .iter()
        .zip(expected.as_array())
        .map(|(&c, &p)| {
            let e = n * p;
            let d = c as f64 - e;
            d * d / e
        })
        .sum();
    Ok(ChiSquare {
        statistic,
        large_n_warning: hist.total() > warn_threshold,
        warn_threshold,
    })
}

/// All conformance metrics for one histogram.
///
/// `pearson_r` is `None` (serialized as `null`) when the observed
/// distribution has zero variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub n: u64,
    pub excluded_zero: u64,
    pub counts: [u64; DIGITS],
    pub observed: [f64; DIGITS],
    pub expected: [f64; DIGITS],
    pub pearson_r: Option<f64>,
    pub mad: f64,
    pub chi_square: ChiSquare,
    pub deviation_pct: [f64; DIGITS],
}

impl ConformanceReport {
    /// Observed proportion for `digit` in 1..=9.
    pub fn observed(&self, digit: u8) -> f64 {
        self.observed[usize::from(digit - 1)]
    }

    pub fn deviation(&self, digit: u8) -> f64 {
        self.deviation_pct[usize::from(digit - 1)]
    }
}

pub fn conformance(hist: &FsdHistogram) -> Result<ConformanceReport, StatsError> {
    conformance_with(hist, DEFAULT_CHI_WARN)
}

pub fn conformance_with(
    hist: &FsdHistogram,
    chi_warn: u64,
) -> Result<ConformanceReport, StatsError> {
    let expected = BenfordExpected::new();
    let chi = chi_square(hist, &expected, chi_warn)?;
    let observed = hist.proportions();
    let exp = *expected.as_array();
    Ok(ConformanceReport {
        n: hist.total(),
        excluded_zero: hist.excluded_zero(),
        counts: *hist.counts(),
        observed,
        expected: exp,
        pearson_r: pearson_r(&observed, &exp),
        mad: mad(&observed, &exp),
        chi_square: chi,
        deviation_pct: deviation_pct(&observed, &exp),
    })
}
