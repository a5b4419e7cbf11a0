//! Analytic signal and phase utilities.
//!
//! The analytic signal is computed with a full-record FFT. Before the
//! transform the record is continued on both sides by Burg linear prediction
//! and the continuation is faded out with a C-infinity taper, which pushes
//! the circular wrap-around discontinuity far away from the data. Edge
//! effects are reduced, not removed, so phase fits still skip an edge margin.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::fft;
use crate::error::{Error, Result};
use crate::signal::{ComplexSeries, Interval, Signal};

/// Fraction of the record excluded at each end of a phase-slope fit.
pub const DEFAULT_EDGE_FRACTION: f64 = 0.05;

const MIN_ANALYTIC_LEN: usize = 16;
const MIN_SLOPE_LEN: usize = 32;
const MAX_EXTENSION: usize = 4096;
const PREDICTION_ORDER: usize = 16;

/// Analytic signal `x + i·H{x}`. The real part is `x` bit-for-bit.
pub fn analytic_signal(x: &Signal) -> Result<ComplexSeries> {
    x.require_len(MIN_ANALYTIC_LEN)?;
    let samples = x.samples();
    let n = samples.len();
    let ext = n.min(MAX_EXTENSION);
    let order = PREDICTION_ORDER.min(n / 4);

    let right = extend(samples, order, ext);
    let reversed: Vec<f64> = samples.iter().rev().copied().collect();
    let mut left = extend(&reversed, order, ext);
    left.reverse();

    let total = n + 2 * ext;
    let len = total.next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for i in 0..ext {
        // left[0] is farthest from the data
        let w = smooth_step(i as f64 / ext as f64);
        buf[i].re = left[i] * w;
        buf[ext + n + i].re = right[i] * smooth_step(1.0 - i as f64 / ext as f64);
    }
    for (b, &v) in buf[ext..ext + n].iter_mut().zip(samples) {
        b.re = v;
    }

    fft::forward(&mut buf);
    let half = len / 2;
    for v in &mut buf[1..half] {
        *v *= 2.0;
    }
    for v in &mut buf[half + 1..] {
        *v = Complex64::new(0.0, 0.0);
    }
    fft::inverse(&mut buf);

    let values = buf[ext..ext + n]
        .iter()
        .zip(samples)
        .map(|(z, &re)| Complex64::new(re, z.im))
        .collect();
    Ok(ComplexSeries { values, fs: x.fs() })
}

/// Modulus of each value.
pub fn instantaneous_amplitude(a: &ComplexSeries) -> Signal {
    Signal::from_raw(a.values.iter().map(|z| z.norm()).collect(), a.fs)
}

/// Argument of each value, wrapped to `(-π, π]`.
pub fn instantaneous_phase(a: &ComplexSeries) -> Signal {
    let phase = a
        .values
        .iter()
        .map(|z| {
            let p = z.im.atan2(z.re);
            if p <= -PI {
                PI
            } else {
                p
            }
        })
        .collect();
    Signal::from_raw(phase, a.fs)
}

/// Remove 2π jumps so consecutive differences lie in `(-π, π]`.
pub fn unwrap_phase(wrapped: &Signal) -> Signal {
    let p = wrapped.samples();
    let mut out = Vec::with_capacity(p.len());
    let mut offset = 0.0;
    out.push(p[0]);
    for w in p.windows(2) {
        let d = w[1] - w[0];
        if d > PI || d <= -PI {
            let mut dd = (d + PI).rem_euclid(2.0 * PI) - PI;
            if dd == -PI {
                dd = PI;
            }
            offset += dd - d;
        }
        out.push(w[1] + offset);
    }
    Signal::from_raw(out, wrapped.fs())
}

/// Frequency in Hz from the least-squares slope of an unwrapped phase,
/// excluding `edge_fraction` of the record at each end.
pub fn phase_slope_hz(unwrapped: &Signal, edge_fraction: f64) -> Result<f64> {
    unwrapped.require_len(MIN_SLOPE_LEN)?;
    let n = unwrapped.len();
    let margin = edge_margin(n, edge_fraction)?;
    phase_slope_hz_segments(unwrapped, &[Interval::new(margin, n - margin)], 0.0)
}

/// Pooled least-squares slope over several segments of an unwrapped phase,
/// with a separate intercept per segment. Each segment is trimmed by
/// `edge_fraction` of its own length at both ends.
pub fn phase_slope_hz_segments(
    unwrapped: &Signal,
    segments: &[Interval],
    edge_fraction: f64,
) -> Result<f64> {
    pooled_slope(unwrapped, None, segments, edge_fraction)
}

/// Weighted variant of [`phase_slope_hz_segments`]: each sample enters the
/// least-squares fit with weight `weights[n]` (for example the squared
/// envelope, so that high-amplitude stretches dominate).
pub fn phase_slope_hz_weighted(
    unwrapped: &Signal,
    weights: &[f64],
    segments: &[Interval],
    edge_fraction: f64,
) -> Result<f64> {
    if weights.len() != unwrapped.len() {
        return Err(Error::LengthMismatch(unwrapped.len(), weights.len()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::param("weights", "must be finite and non-negative"));
    }
    pooled_slope(unwrapped, Some(weights), segments, edge_fraction)
}

fn pooled_slope(
    unwrapped: &Signal,
    weights: Option<&[f64]>,
    segments: &[Interval],
    edge_fraction: f64,
) -> Result<f64> {
    let p = unwrapped.samples();
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut used = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for seg in segments {
        let end = seg.end.min(p.len());
        if seg.start >= end {
            continue;
        }
        let margin = edge_margin(end - seg.start, edge_fraction)?;
        let (s, e) = (seg.start + margin, end - margin);
        if e - s < 2 {
            continue;
        }
        let sw: f64 = (s..e).map(w).sum();
        if sw <= 0.0 {
            continue;
        }
        let t_mean = (s..e).map(|i| w(i) * i as f64).sum::<f64>() / sw;
        let y_mean = (s..e).map(|i| w(i) * p[i]).sum::<f64>() / sw;
        for (i, &pi) in p.iter().enumerate().take(e).skip(s) {
            let t = i as f64 - t_mean;
            sxy += w(i) * t * (pi - y_mean);
            sxx += w(i) * t * t;
            lo = lo.min(pi);
            hi = hi.max(pi);
        }
        used += e - s;
    }
    if used < MIN_SLOPE_LEN / 2 || sxx == 0.0 {
        return Err(Error::TooShort {
            len: used,
            min: MIN_SLOPE_LEN / 2,
        });
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return Err(Error::DegenerateFit);
    }
    Ok(sxy / sxx * unwrapped.fs() / (2.0 * PI))
}

fn edge_margin(n: usize, edge_fraction: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&edge_fraction) {
        return Err(Error::param("edge_fraction", "must lie in [0, 0.5)"));
    }
    Ok((n as f64 * edge_fraction).floor() as usize)
}

/// C-infinity step from 0 at `t <= 0` to 1 at `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    fn bump(u: f64) -> f64 {
        if u > 0.0 {
            (-1.0 / u).exp()
        } else {
            0.0
        }
    }
    let a = bump(t);
    let b = bump(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Burg autoregressive coefficients `a[0] = 1, a[1..=order]`.
fn burg(x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    let mut f = x.to_vec();
    let mut b = x.to_vec();
    let mut a = vec![1.0];
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return a;
    }
    for m in 0..order.min(n.saturating_sub(1)) {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in m + 1..n {
            num += f[i] * b[i - 1];
            den += f[i] * f[i] + b[i - 1] * b[i - 1];
        }
        if den <= 1e-24 * energy {
            break;
        }
        let k = -2.0 * num / den;
        let prev = a.clone();
        a.push(0.0);
        for j in 1..=m + 1 {
            a[j] = prev.get(j).copied().unwrap_or(0.0) + k * prev[m + 1 - j];
        }
        for i in (m + 1..n).rev() {
            let fi = f[i];
            let bi = b[i - 1];
            f[i] = fi + k * bi;
            b[i] = bi + k * fi;
        }
    }
    a
}

/// Continue `x` forward by `len` samples with a Burg predictor. Falls back
/// to silence if the prediction runs away.
fn extend(x: &[f64], order: usize, len: usize) -> Vec<f64> {
    let a = burg(x, order);
    let p = a.len() - 1;
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p == 0 || peak == 0.0 {
        return vec![0.0; len];
    }
    let mut hist: Vec<f64> = x[x.len() - p..].to_vec();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let h = hist.len();
        let next: f64 = -(1..=p).map(|j| a[j] * hist[h - j]).sum::<f64>();
        if !next.is_finite() || next.abs() > 10.0 * peak {
            return vec![0.0; len];
        }
        out.push(next);
        hist.push(next);
    }
    out
}
