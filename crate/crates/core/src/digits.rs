//! First-significant-digit extraction, the Benford reference distribution,
//! and the mergeable digit histogram.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Number of first-significant-digit bins (digits 1 through 9).
pub const DIGITS: usize = 9;

/// Leading decimal digit of a positive integer.
///
/// Computed with integer division only, so the result is exact over the whole
/// `u64` range.
pub fn fsd(value: u64) -> Result<u8, DomainError> {
    if value == 0 {
        return Err(DomainError::NoSignificantDigit);
    }
    let mut v = value;
    while v >= 10 {
        v /= 10;
    }
    Ok(v as u8)
}

/// Benford's expected first-digit probabilities, `log10(1 + 1/d)` for d = 1..9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenfordExpected {
    p: [f64; DIGITS],
}

impl BenfordExpected {
    pub fn new() -> Self {
        let mut p = [0.0; DIGITS];
        for (i, slot) in p.iter_mut().enumerate() {
            let d = (i + 1) as f64;
            *slot = (1.0 + 1.0 / d).log10();
        }
        Self { p }
    }

    /// Probability for `digit` in 1..=9.
    ///
    /// # Panics
    ///
    /// Panics if `digit` is outside 1..=9.
    pub fn prob(&self, digit: u8) -> f64 {
        assert!((1..=9).contains(&digit), "digit {digit} out of range");
        self.p[usize::from(digit - 1)]
    }

    /// The nine probabilities, index 0 holding digit 1.
    pub fn as_array(&self) -> &[f64; DIGITS] {
        &self.p
    }
}

impl Default for BenfordExpected {
    fn default() -> Self {
        Self::new()
    }
}

pub fn benford_expected() -> BenfordExpected {
    BenfordExpected::new()
}

/// Counts of leading digits 1..9 over a value population.
///
/// Zeros have no significant digit; they are tallied in `excluded_zero` and do
/// not contribute to `total`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FsdHistogram {
    counts: [u64; DIGITS],
    excluded_zero: u64,
    total: u64,
}

impl FsdHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a histogram from explicit digit counts (index 0 is digit 1).
    pub fn from_counts(counts: [u64; DIGITS], excluded_zero: u64) -> Self {
        Self {
            counts,
            excluded_zero,
            total: counts.iter().sum(),
        }
    }

    pub fn accumulate(&mut self, value: u64) {
        match fsd(value) {
            Ok(d) => {
                self.counts[usize::from(d - 1)] += 1;
                self.total += 1;
            }
            Err(_) => self.excluded_zero += 1,
        }
    }

    /// Adds every other tally into `self`. Merge is associative and
    /// commutative, so shards may be combined in any order.
    pub fn merge(&mut self, other: &FsdHistogram) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self.excluded_zero += other.excluded_zero;
        self.total += other.total;
    }

    pub fn merged(mut self, other: &FsdHistogram) -> Self {
        self.merge(other);
        self
    }

    /// Count for `digit` in 1..=9.
    ///
    /// # Panics
    ///
    /// Panics if `digit` is outside 1..=9.
    pub fn count(&self, digit: u8) -> u64 {
        assert!((1..=9).contains(&digit), "digit {digit} out of range");
        self.counts[usize::from(digit - 1)]
    }

    pub fn counts(&self) -> &[u64; DIGITS] {
        &self.counts
    }

    pub fn excluded_zero(&self) -> u64 {
        self.excluded_zero
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Observed proportions; all zeros when the histogram is empty.
    pub fn proportions(&self) -> [f64; DIGITS] {
        let mut out = [0.0; DIGITS];
        if self.total == 0 {
            return out;
        }
        let n = self.total as f64;
        for (o, &c) in out.iter_mut().zip(self.counts.iter()) {
            *o = c as f64 / n;
        }
        out
    }
}

impl Extend<u64> for FsdHistogram {
    fn extend<I: IntoIterator<Item = u64>>(&mut self, iter: I) {
        for v in iter {
            self.accumulate(v);
        }
    }
}

impl FromIterator<u64> for FsdHistogram {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut h = FsdHistogram::new();
        h.extend(iter);
        h
    }
}
