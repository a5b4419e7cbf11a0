use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use crate::error::{Error, Result};
use crate::signal::Signal;

/// One-sided power spectral density on a uniform grid from 0 to fs/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
}

impl PsdEstimate {
    pub fn resolution(&self) -> f64 {
        if self.freqs.len() < 2 {
            0.0
        } else {
            self.freqs[1] - self.freqs[0]
        }
    }

    /// Integral of the density, `sum(power) * df`.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.resolution()
    }

    /// Index of the grid point nearest to `f`.
    pub fn bin(&self, f: f64) -> usize {
        let df = self.resolution();
        ((f / df).round().max(0.0) as usize).min(self.freqs.len() - 1)
    }

    /// Mean density over `[lo, hi]`.
    pub fn band_mean(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = (self.bin(lo), self.bin(hi));
        self.power[a..=b].iter().sum::<f64>() / (b - a + 1) as f64
    }
}

fn periodic_hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos())
        .collect()
}

/// Hann-windowed, mean-removed periodogram of `x`, zero-padded to `nfft`
/// points, scaled as a one-sided density.
pub fn periodogram(x: &[f64], fs: f64, nfft: usize) -> PsdEstimate {
    let win = periodic_hann(x.len());
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft.max(x.len())];
    for (i, (&v, &w)) in x.iter().zip(&win).enumerate() {
        buf[i].re = (v - mean) * w;
    }
    let nfft = buf.len();
    fft::forward(&mut buf);
    let norm = fs * win.iter().map(|w| w * w).sum::<f64>();
    let half = nfft / 2;
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() / norm;
            if k == 0 || (k == half && nfft.is_multiple_of(2)) {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let freqs = (0..=half).map(|k| k as f64 * fs / nfft as f64).collect();
    PsdEstimate { freqs, power }
}

/// Welch averaged periodogram with Hann segments.
pub fn welch_psd(x: &Signal, segment_len: usize, overlap: f64) -> Result<PsdEstimate> {
    if segment_len < 8 {
        return Err(Error::param("segment_len", "must be at least 8 samples"));
    }
    if segment_len > x.len() {
        return Err(Error::TooShort {
            len: x.len(),
            min: segment_len,
        });
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::param("overlap", "must lie in [0, 1)"));
    }
    let step = ((segment_len as f64 * (1.0 - overlap)).round() as usize).max(1);
    let s = x.samples();
    let mut acc: Option<PsdEstimate> = None;
    let mut count = 0usize;
    let mut start = 0;
    while start + segment_len <= s.len() {
        let p = periodogram(&s[start..start + segment_len], x.fs(), segment_len);
        match acc.as_mut() {
            None => acc = Some(p),
            Some(a) => a.power.iter_mut().zip(&p.power).for_each(|(a, b)| *a += b),
        }
        count += 1;
        start += step;
    }
    let mut psd = acc.expect("at least one segment");
    psd.power.iter_mut().for_each(|v| *v /= count as f64);
    Ok(psd)
}

/// Brick-wall low-pass: every DFT bin above `fc` is zeroed. The record is
/// mirrored to twice its length first, so there is no wrap-around between
/// its ends and the operation is an exact projection (idempotent).
pub fn ideal_lowpass(x: &Signal, fc: f64) -> Result<Signal> {
    let fs = x.fs();
    if !(fc > 0.0 && fc < fs / 2.0) {
        return Err(Error::param("cutoff", format!("{fc} Hz outside (0, fs/2)")));
    }
    let s = x.samples();
    let n = s.len();
    let len = 2 * n;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, &v) in s.iter().enumerate() {
        buf[i].re = v;
        buf[len - 1 - i].re = v;
    }
    fft::forward(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        let f = k.min(len - k) as f64 * fs / len as f64;
        if f > fc {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft::inverse(&mut buf);
    Ok(Signal::from_raw(
        buf[..n].iter().map(|z| z.re).collect(),
        fs,
    ))
}
