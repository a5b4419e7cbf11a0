//! Ground-truth-labelled PAC-like EEG records.
//!
//! A record is unit-variance pink noise with a random number of PAC events
//! added. Each event is a Hann-enveloped LFO carrier with HFO bursts gated
//! into the LFO troughs:
//!
//! ```text
//! e[n] = w[n]·cos(2π f_L n/fs) + m·w[n]·r[n]·cos(2π f_H n/fs)
//! r[n] = max(-cos(2π f_L n/fs), 0)
//! ```
//!
//! The event ensemble is scaled so that the event-to-noise power ratio,
//! measured over the union of event supports, equals the requested SNR.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsp::pink_noise;
use crate::error::{Error, Result};
use crate::signal::{interval_mask, Interval, Signal};

/// Silence required between neighbouring events, in seconds.
pub const GUARD_GAP_S: f64 = 0.5;
const PLACEMENT_ATTEMPTS: usize = 10_000;

/// How many events a record receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventCount {
    Fixed { count: usize },
    Uniform { min: usize, max: usize },
}

impl EventCount {
    pub fn max(&self) -> usize {
        match *self {
            EventCount::Fixed { count } => count,
            EventCount::Uniform { max, .. } => max,
        }
    }
}

/// Generative parameters for one synthetic record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacParams {
    /// LFO carrier, Hz.
    pub f_l: f64,
    /// HFO carrier, Hz.
    pub f_h: f64,
    /// Modulation index in `[0, 1]`.
    pub m: f64,
    /// Event length, seconds.
    pub event_len_s: f64,
    pub snr_db: f64,
    pub duration_s: f64,
    pub fs: f64,
    pub n_events: EventCount,
    pub seed: u64,
}

impl Default for PacParams {
    fn default() -> Self {
        PacParams {
            f_l: 5.0,
            f_h: 80.0,
            m: 0.1,
            event_len_s: 1.5,
            snr_db: -5.0,
            duration_s: 60.0,
            fs: 1000.0,
            n_events: EventCount::Fixed { count: 4 },
            seed: 0,
        }
    }
}

impl PacParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.f_l,
            self.f_h,
            self.m,
            self.event_len_s,
            self.snr_db,
            self.duration_s,
            self.fs,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("params", "all values must be finite"));
        }
        if self.fs <= 0.0 {
            return Err(Error::param("fs", "must be positive"));
        }
        if !(self.f_l > 0.0 && self.f_l < self.f_h && self.f_h < self.fs / 2.0) {
            return Err(Error::param("f_l/f_h", "need 0 < f_l < f_h < fs/2"));
        }
        if !(0.0..=1.0).contains(&self.m) {
            return Err(Error::param("m", "must lie in [0, 1]"));
        }
        if self.event_len_s < 3.0 / self.f_l {
            return Err(Error::param(
                "event_len_s",
                "must hold at least 3 LFO cycles",
            ));
        }
        if let EventCount::Uniform { min, max } = self.n_events {
            if min > max {
                return Err(Error::param("n_events", "min exceeds max"));
            }
        }
        if self.duration_s * self.fs < 256.0 {
            return Err(Error::param(
                "duration_s",
                "record shorter than 256 samples",
            ));
        }
        if self.n_events.max() as f64 * self.event_len_s > 0.8 * self.duration_s {
            return Err(Error::param(
                "n_events",
                "events may cover at most 80% of the record",
            ));
        }
        Ok(())
    }

    pub fn record_len(&self) -> usize {
        (self.duration_s * self.fs).round() as usize
    }

    pub fn event_len(&self) -> usize {
        (self.event_len_s * self.fs).round() as usize
    }
}

/// Event placement, in samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub event_intervals: Vec<Interval>,
    pub len: usize,
}

impl GroundTruth {
    /// Per-sample PAC labels.
    pub fn labels(&self) -> Vec<bool> {
        interval_mask(&self.event_intervals, self.len)
    }

    pub fn positive_samples(&self) -> usize {
        self.event_intervals.iter().map(Interval::len).sum()
    }
}

/// A synthetic record plus the components it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRecord {
    pub signal: Signal,
    pub truth: GroundTruth,
    pub params: PacParams,
    /// Scaled event ensemble; `signal = noise + clean`.
    pub clean: Vec<f64>,
    pub noise: Vec<f64>,
}

impl SyntheticRecord {
    /// Event-support SNR recomputed from the stored components.
    pub fn realized_snr_db(&self) -> Option<f64> {
        let (pe, pn) = support_powers(&self.clean, &self.noise, &self.truth.event_intervals)?;
        Some(10.0 * (pe / pn).log10())
    }
}

fn support_powers(clean: &[f64], noise: &[f64], intervals: &[Interval]) -> Option<(f64, f64)> {
    let count: usize = intervals.iter().map(Interval::len).sum();
    if count == 0 {
        return None;
    }
    let (mut pe, mut pn) = (0.0, 0.0);
    for iv in intervals {
        for i in iv.start..iv.end {
            pe += clean[i] * clean[i];
            pn += noise[i] * noise[i];
        }
    }
    Some((pe / count as f64, pn / count as f64))
}

/// Symmetric Hann window.
fn hann(len: usize) -> impl Iterator<Item = f64> {
    let denom = (len.max(2) - 1) as f64;
    (0..len).map(move |i| 0.5 - 0.5 * (2.0 * PI * i as f64 / denom).cos())
}

/// One noiseless PAC event in event-local samples.
pub fn make_pac_event(f_l: f64, f_h: f64, m: f64, event_len_s: f64, fs: f64) -> Result<Signal> {
    let probe = PacParams {
        f_l,
        f_h,
        m,
        event_len_s,
        fs,
        duration_s: event_len_s / 0.8,
        n_events: EventCount::Fixed { count: 1 },
        ..PacParams::default()
    };
    probe.validate()?;
    let len = probe.event_len();
    let samples = hann(len)
        .enumerate()
        .map(|(n, w)| {
            let t = n as f64 / fs;
            let lfo = (2.0 * PI * f_l * t).cos();
            let gate = (-lfo).max(0.0);
            w * lfo + m * w * gate * (2.0 * PI * f_h * t).cos()
        })
        .collect();
    Signal::new(samples, fs)
}

fn place_events<R: Rng>(
    rng: &mut R,
    count: usize,
    event_len: usize,
    record_len: usize,
    guard: usize,
) -> Result<Vec<Interval>> {
    let mut placed: Vec<Interval> = Vec::with_capacity(count);
    if count == 0 {
        return Ok(placed);
    }
    let span = record_len - event_len;
    let mut attempts = 0;
    while placed.len() < count {
        if attempts == PLACEMENT_ATTEMPTS {
            return Err(Error::Placement {
                requested: count,
                attempts,
            });
        }
        attempts += 1;
        let start = rng.random_range(0..=span);
        let end = start + event_len;
        let clash = placed
            .iter()
            .any(|p| start < p.end + guard && p.start < end + guard);
        if !clash {
            placed.push(Interval::new(start, end));
        }
    }
    placed.sort_by_key(|iv| iv.start);
    Ok(placed)
}

/// Build a labelled record from `params`.
pub fn synthesize(params: &PacParams) -> Result<SyntheticRecord> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise_seed = rng.next_u64();
    let count = match params.n_events {
        EventCount::Fixed { count } => count,
        EventCount::Uniform { min, max } => rng.random_range(min..=max),
    };
    let n = params.record_len();
    let event_len = params.event_len();
    let guard = (GUARD_GAP_S * params.fs).round() as usize;
    let intervals = place_events(&mut rng, count, event_len, n, guard)?;

    let noise = pink_noise(n, params.fs, noise_seed)?.into_samples();
    let mut clean = vec![0.0; n];
    if !intervals.is_empty() {
        let event = make_pac_event(
            params.f_l,
            params.f_h,
            params.m,
            params.event_len_s,
            params.fs,
        )?;
        for iv in &intervals {
            clean[iv.start..iv.end].copy_from_slice(event.samples());
        }
        let (pe, pn) = support_powers(&clean, &noise, &intervals).expect("non-empty support");
        let gain = (pn * 10f64.powf(params.snr_db / 10.0) / pe).sqrt();
        clean.iter_mut().for_each(|v| *v *= gain);
    }
    let samples = noise.iter().zip(&clean).map(|(a, b)| a + b).collect();
    Ok(SyntheticRecord {
        signal: Signal::new(samples, params.fs)?,
        truth: GroundTruth {
            event_intervals: intervals,
            len: n,
        },
        params: params.clone(),
        clean,
        noise,
    })
}
