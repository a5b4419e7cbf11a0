use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled real-valued time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    /// Checked constructor: non-empty, finite samples and `fs > 0`.
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidRate(fs));
        }
        if samples.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Signal { samples, fs })
    }

    /// Used internally where the values are finite by construction.
    pub(crate) fn from_raw(samples: Vec<f64>, fs: f64) -> Self {
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        Signal { samples, fs }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    pub fn variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        self.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
    }

    pub(crate) fn require_len(&self, min: usize) -> Result<()> {
        if self.samples.len() < min {
            return Err(Error::TooShort {
                len: self.samples.len(),
                min,
            });
        }
        Ok(())
    }
}

/// Complex-valued series sharing a sampling rate, e.g. an analytic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    pub values: Vec<Complex64>,
    pub fs: f64,
}

impl ComplexSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A frequency band `(lo, hi)` in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Band { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.lo && f <= self.hi
    }

    /// `0 <= lo < hi < fs/2`.
    pub fn validate(&self, fs: f64) -> Result<()> {
        let ok = self.lo.is_finite()
            && self.hi.is_finite()
            && self.lo >= 0.0
            && self.lo < self.hi
            && self.hi < fs / 2.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBand {
                lo: self.lo,
                hi: self.hi,
                fs,
            })
        }
    }
}

/// Half-open sample interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub const fn new(start: usize, end: usize) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, n: usize) -> bool {
        n >= self.start && n < self.end
    }

    pub fn overlap(&self, other: &Interval) -> usize {
        let s = self.start.max(other.start);
        let e = self.end.min(other.end);
        e.saturating_sub(s)
    }

    /// Intersection over union.
    pub fn jaccard(&self, other: &Interval) -> f64 {
        let inter = self.overlap(other);
        let union = self.len() + other.len() - inter;
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// Per-sample membership mask of a set of intervals.
pub fn interval_mask(intervals: &[Interval], len: usize) -> Vec<bool> {
    let mut mask = vec![false; len];
    for iv in intervals {
        let end = iv.end.min(len);
        for m in &mut mask[iv.start.min(end)..end] {
            *m = true;
        }
    }
    mask
}

/// True when intervals are non-empty, sorted and pairwise disjoint.
pub fn intervals_are_canonical(intervals: &[Interval]) -> bool {
    intervals.iter().all(|iv| !iv.is_empty())
        && intervals.windows(2).all(|w| w[0].end <= w[1].start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Signal::new(vec![], 100.0),
            Err(Error::TooShort { .. })
        ));
        assert!(matches!(
            Signal::new(vec![1.0, f64::NAN], 100.0),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(matches!(
            Signal::new(vec![1.0], 0.0),
            Err(Error::InvalidRate(_))
        ));
    }

    #[test]
    fn band_validation() {
        assert!(Band::new(4.0, 6.0).validate(1000.0).is_ok());
        assert!(Band::new(6.0, 4.0).validate(1000.0).is_err());
        assert!(Band::new(400.0, 500.0).validate(1000.0).is_err());
        assert!(Band::new(-1.0, 5.0).validate(1000.0).is_err());
    }

    #[test]
    fn interval_overlap_and_mask() {
        let a = Interval::new(100, 200);
        let b = Interval::new(150, 250);
        assert_eq!(a.overlap(&b), 50);
        assert!((a.jaccard(&b) - 50.0 / 150.0).abs() < 1e-12);
        let mask = interval_mask(&[a], 300);
        assert_eq!(mask.iter().filter(|&&m| m).count(), 100);
        assert!(mask[100] && !mask[200]);
        assert!(intervals_are_canonical(&[a, Interval::new(200, 210)]));
        assert!(!intervals_are_canonical(&[a, b]));
    }
}
