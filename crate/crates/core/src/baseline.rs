//! Fixed-band reference detector.
//!
//! The record is filtered into one a-priori LFO band and one a-priori HFO
//! band, MVL is averaged over the `has` set, and significance comes from
//! circular-shift surrogates: the amplitude series is rotated against the
//! phase by random offsets of at least `min_shift_s`. Detected intervals are
//! the sliding windows whose own MVL beats the pooled windowed surrogates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::exec::{self, Execution};
use crate::mvl::{self, mean_vector, selections, Transitions};
use crate::signal::{Band, Interval, Signal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    pub lfo_band: Band,
    pub hfo_band: Band,
    pub has_set: Vec<f64>,
    pub n_surrogates: usize,
    pub alpha: f64,
    /// Smallest circular offset between amplitude and phase, seconds.
    pub min_shift_s: f64,
    pub window_s: f64,
    /// Fractional overlap of consecutive windows.
    pub window_overlap: f64,
    pub seed: u64,
    pub transitions: Transitions,
    pub execution: Execution,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            lfo_band: Band::new(4.0, 8.0),
            hfo_band: Band::new(70.0, 90.0),
            has_set: mvl::DEFAULT_HAS_SET.to_vec(),
            n_surrogates: 200,
            alpha: 0.05,
            min_shift_s: 1.0,
            window_s: 1.0,
            window_overlap: 0.5,
            seed: 0,
            transitions: Transitions::default(),
            execution: Execution::default(),
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self, fs: f64) -> Result<()> {
        self.lfo_band.validate(fs)?;
        self.hfo_band.validate(fs)?;
        if self.hfo_band.lo <= self.lfo_band.hi {
            return Err(Error::param("hfo_band", "must lie above the LFO band"));
        }
        if self.has_set.is_empty() || self.has_set.iter().any(|&h| !(h > 0.0 && h <= 100.0)) {
            return Err(Error::param("has_set", "values must lie in (0, 100]"));
        }
        if self.n_surrogates < 50 {
            return Err(Error::param("n_surrogates", "must be at least 50"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1)"));
        }
        if !(self.min_shift_s > 0.0 && self.window_s > 0.0) {
            return Err(Error::param("min_shift_s/window_s", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.window_overlap) {
            return Err(Error::param("window_overlap", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub lfo_band: Band,
    pub hfo_band: Band,
    pub observed_mvl: f64,
    /// `(1 - alpha)` quantile of the whole-record surrogate MVLs.
    pub surrogate_threshold: f64,
    pub p_value: f64,
    pub significant: bool,
    /// `(1 - alpha)` quantile of the pooled windowed surrogate MVLs.
    pub window_threshold: f64,
    pub pac_intervals: Vec<Interval>,
}

impl BaselineResult {
    pub fn detected(&self) -> bool {
        !self.pac_intervals.is_empty()
    }
}

/// Upper `(1 - alpha)` empirical quantile (order statistic `ceil((1-alpha)·n)`).
pub fn upper_quantile(values: &[f64], alpha: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = ((1.0 - alpha) * v.len() as f64).ceil() as usize;
    v[k.clamp(1, v.len()) - 1]
}

/// Draw `count` circular offsets in `[min_shift, len - min_shift]`.
pub fn surrogate_shifts(
    len: usize,
    min_shift: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if len < 2 * min_shift + 1 {
        return Err(Error::TooShort {
            len,
            min: 2 * min_shift + 1,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| rng.random_range(min_shift..=len - min_shift))
        .collect())
}

fn window_starts(len: usize, win: usize, step: usize) -> Vec<usize> {
    if win > len {
        return Vec::new();
    }
    (0..=(len - win) / step).map(|k| k * step).collect()
}

fn averaged(amplitude: &[f64], phase: &[f64], sels: &[Vec<usize>], shift: usize) -> f64 {
    sels.iter()
        .map(|s| mean_vector(amplitude, phase, s, shift))
        .sum::<f64>()
        / sels.len() as f64
}

pub fn run_baseline(x: &Signal, cfg: &BaselineConfig) -> Result<BaselineResult> {
    let fs = x.fs();
    cfg.validate(fs).stage("config")?;
    let n = x.len();
    let phase = mvl::band_phase(x, cfg.lfo_band, cfg.transitions.lfo_hz).stage("lfo phase")?;
    let amplitude =
        mvl::band_amplitude(x, cfg.hfo_band, cfg.transitions.hfo_hz).stage("hfo amplitude")?;
    let (a, p) = (amplitude.samples(), phase.samples());

    let sels = selections(a, &cfg.has_set).stage("selection")?;
    let observed_mvl = averaged(a, p, &sels, 0);
    let min_shift = (cfg.min_shift_s * fs).round() as usize;
    let shifts = surrogate_shifts(n, min_shift, cfg.n_surrogates, cfg.seed).stage("surrogates")?;

    let win = (cfg.window_s * fs).round() as usize;
    let step = ((win as f64 * (1.0 - cfg.window_overlap)).round() as usize).max(1);
    let starts = window_starts(n, win, step);
    let window_sels: Vec<Vec<Vec<usize>>> = starts
        .iter()
        .map(|&s| {
            selections(&a[s..s + win], &cfg.has_set).map(|sets| {
                sets.into_iter()
                    .map(|set| set.into_iter().map(|i| i + s).collect())
                    .collect()
            })
        })
        .collect::<Result<_>>()
        .stage("window selection")?;

    // one task per surrogate: whole-record value plus every window value
    let surrogates: Vec<(f64, Vec<f64>)> = exec::map_slice(&shifts, cfg.execution, |&shift| {
        let whole = averaged(a, p, &sels, shift);
        let windows = window_sels
            .iter()
            .map(|ws| averaged(a, p, ws, shift))
            .collect();
        (whole, windows)
    });
    let whole: Vec<f64> = surrogates.iter().map(|s| s.0).collect();
    let pooled: Vec<f64> = surrogates
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .collect();

    let surrogate_threshold = upper_quantile(&whole, cfg.alpha);
    let exceed = whole.iter().filter(|&&v| v >= observed_mvl).count();
    let p_value = (exceed + 1) as f64 / (whole.len() + 1) as f64;
    let significant = observed_mvl > surrogate_threshold;
    let window_threshold = if pooled.is_empty() {
        f64::INFINITY
    } else {
        upper_quantile(&pooled, cfg.alpha)
    };

    let mut pac_intervals: Vec<Interval> = Vec::new();
    if significant {
        for (&s, ws) in starts.iter().zip(&window_sels) {
            if averaged(a, p, ws, 0) > window_threshold {
                match pac_intervals.last_mut() {
                    Some(last) if s <= last.end => last.end = s + win,
                    _ => pac_intervals.push(Interval::new(s, s + win)),
                }
            }
        }
    }

    Ok(BaselineResult {
        lfo_band: cfg.lfo_band,
        hfo_band: cfg.hfo_band,
        observed_mvl,
        surrogate_threshold,
        p_value,
        significant,
        window_threshold,
        pac_intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_order_statistic() {
        let v: Vec<f64> = (1..=200).map(f64::from).collect();
        assert_eq!(upper_quantile(&v, 0.05), 190.0);
        assert_eq!(upper_quantile(&[3.0], 0.05), 3.0);
    }

    #[test]
    fn shifts_respect_minimum() {
        let s = surrogate_shifts(5000, 1000, 500, 9).unwrap();
        assert!(s.iter().all(|&k| (1000..=4000).contains(&k)));
        assert_eq!(s, surrogate_shifts(5000, 1000, 500, 9).unwrap());
        assert!(surrogate_shifts(1500, 1000, 5, 0).is_err());
    }

    #[test]
    fn windows_tile_record() {
        assert_eq!(
            window_starts(3000, 1000, 500),
            vec![0, 500, 1000, 1500, 2000]
        );
        assert!(window_starts(500, 1000, 500).is_empty());
    }

    #[test]
    fn config_checks() {
        let fs = 1000.0;
        assert!(BaselineConfig::default().validate(fs).is_ok());
        let c = BaselineConfig {
            n_surrogates: 10,
            ..BaselineConfig::default()
        };
        assert!(c.validate(fs).is_err());
        let c = BaselineConfig {
            hfo_band: Band::new(5.0, 9.0),
            ..BaselineConfig::default()
        };
        assert!(c.validate(fs).is_err());
    }
}
