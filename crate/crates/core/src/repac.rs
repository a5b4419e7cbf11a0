//! REPAC: robust estimation of phase-amplitude coupling.
//!
//! Pipeline, in order:
//!
//! 1. scan narrow LFO bands against a candidate HFO band ([`mvl_profile`]);
//! 2. keep every band whose MVL reaches `MVL_max - c·(MVL_max - MVL_min)`
//!    and merge them into the refined LFO band ([`refine_lfo_band`]);
//! 3. estimate `f̂_L` from the phase slope of the refined LFO signal;
//! 4. demodulate the LFO power with an ideal low-pass ([`demodulate_lfo`])
//!    and read candidate PAC periods off its active support
//!    ([`detect_pac_periods`]);
//! 5. average the spectra of those periods and locate the HFO comb
//!    ([`comb_analysis`]); the refined HFO band is `f̂_H ± K·f̂_L`;
//! 6. re-estimate `f̂_H` from the phase slope of the refined HFO signal and
//!    compute the final MVL over the PAC periods.

use serde::{Deserialize, Serialize};

use crate::dsp::{
    self, analytic_signal, ideal_lowpass, instantaneous_amplitude, instantaneous_phase,
    periodogram, phase_slope_hz, phase_slope_hz_weighted, unwrap_phase, PsdEstimate,
};
use crate::error::{Error, Result, StageExt};
use crate::exec::Execution;
use crate::mvl::{self, mean_vector, mvl_profile, MvlProfile, Transitions};
use crate::signal::{Band, Interval, Signal};

/// Shortest record REPAC accepts, in seconds.
pub const MIN_DURATION_S: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepacConfig {
    /// Narrow LFO bands scanned for the MVL profile.
    pub lfo_bands: Vec<Band>,
    /// A-priori HFO band.
    pub hfo_band: Band,
    /// Top-amplitude percentages averaged in the profile.
    pub has_set: Vec<f64>,
    /// Cut-off of the ideal low-pass applied to the LFO power, Hz.
    pub demod_cutoff_hz: f64,
    /// Fraction of the profile range below the maximum still accepted.
    pub threshold_coeff: f64,
    /// Activity threshold as a fraction of the demodulated range.
    pub activity_epsilon: f64,
    /// Gaps shorter than this between active stretches are bridged, seconds.
    pub merge_gap_s: f64,
    /// Active stretches shorter than this many LFO cycles are dropped.
    pub min_cycles: f64,
    /// Comb lines kept on each side of the HFO peak.
    pub comb_side_peaks: usize,
    /// Required comb peak height over the in-band median, dB.
    pub comb_min_prominence_db: f64,
    /// Score candidate peaks with a template of the whole comb.
    pub comb_matched: bool,
    pub transitions: Transitions,
    /// Fraction trimmed from each end before a phase-slope fit.
    pub edge_fraction: f64,
    pub execution: Execution,
}

impl Default for RepacConfig {
    fn default() -> Self {
        RepacConfig {
            lfo_bands: mvl::default_lfo_grid(),
            hfo_band: Band::new(30.0, 150.0),
            has_set: mvl::DEFAULT_HAS_SET.to_vec(),
            demod_cutoff_hz: 2.0,
            threshold_coeff: 0.1,
            activity_epsilon: 0.35,
            merge_gap_s: 0.1,
            min_cycles: 2.0,
            comb_side_peaks: 4,
            comb_min_prominence_db: 3.0,
            comb_matched: true,
            transitions: Transitions::default(),
            edge_fraction: dsp::DEFAULT_EDGE_FRACTION,
            execution: Execution::default(),
        }
    }
}

impl RepacConfig {
    pub fn validate(&self, fs: f64) -> Result<()> {
        if self.lfo_bands.len() < 3 {
            return Err(Error::param("lfo_bands", "need at least 3 bands"));
        }
        for b in &self.lfo_bands {
            b.validate(fs)?;
        }
        self.hfo_band.validate(fs)?;
        if self.has_set.is_empty() || self.has_set.iter().any(|&h| !(h > 0.0 && h <= 100.0)) {
            return Err(Error::param("has_set", "values must lie in (0, 100]"));
        }
        if !(self.threshold_coeff > 0.0 && self.threshold_coeff < 1.0) {
            return Err(Error::param("threshold_coeff", "must lie in (0, 1)"));
        }
        if !(self.activity_epsilon > 0.0 && self.activity_epsilon < 1.0) {
            return Err(Error::param("activity_epsilon", "must lie in (0, 1)"));
        }
        if self.comb_side_peaks < 1 {
            return Err(Error::param("comb_side_peaks", "must be at least 1"));
        }
        if !(self.demod_cutoff_hz > 0.0 && self.demod_cutoff_hz < fs / 2.0) {
            return Err(Error::param("demod_cutoff_hz", "must lie in (0, fs/2)"));
        }
        if !(self.merge_gap_s >= 0.0 && self.min_cycles >= 0.0) {
            return Err(Error::param(
                "merge_gap_s/min_cycles",
                "must be non-negative",
            ));
        }
        if !(self.transitions.lfo_hz > 0.0 && self.transitions.hfo_hz > 0.0) {
            return Err(Error::param("transitions", "must be positive"));
        }
        Ok(())
    }
}

/// Outcome of the LFO band refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfoRefinement {
    pub band: Band,
    pub threshold: f64,
    /// Indices of the profile bands at or above the threshold.
    pub selected: Vec<usize>,
    /// Set when the profile is flat and the first maximal band was taken.
    pub low_confidence: bool,
}

/// Merge every profile band whose value reaches
/// `max - threshold_coeff·(max - min)` into one band.
pub fn refine_lfo_band(profile: &MvlProfile, threshold_coeff: f64) -> Result<LfoRefinement> {
    if profile.len() < 3 || profile.bands.len() != profile.values.len() {
        return Err(Error::param("profile", "need at least 3 bands with values"));
    }
    if !(threshold_coeff > 0.0 && threshold_coeff < 1.0) {
        return Err(Error::param("threshold_coeff", "must lie in (0, 1)"));
    }
    let (max, min) = (profile.max(), profile.min());
    let spread = max - min;
    if spread <= 0.0 {
        let k = profile.argmax();
        return Ok(LfoRefinement {
            band: profile.bands[k],
            threshold: max,
            selected: vec![k],
            low_confidence: true,
        });
    }
    let threshold = max - threshold_coeff * spread;
    let selected: Vec<usize> = (0..profile.len())
        .filter(|&k| profile.values[k] >= threshold)
        .collect();
    let lo = selected
        .iter()
        .map(|&k| profile.bands[k].lo)
        .fold(f64::INFINITY, f64::min);
    let hi = selected
        .iter()
        .map(|&k| profile.bands[k].hi)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LfoRefinement {
        band: Band::new(lo, hi),
        threshold,
        selected,
        low_confidence: false,
    })
}

/// Main LFO frequency from the phase slope of a band-limited LFO signal.
pub fn estimate_lfo_frequency(s_lfo: &Signal, edge_fraction: f64) -> Result<f64> {
    let phase = unwrap_phase(&instantaneous_phase(&analytic_signal(s_lfo)?));
    phase_slope_hz(&phase, edge_fraction)
}

/// Slowly varying LFO power: ideal low-pass of `s_lfo²`, clipped at zero.
pub fn demodulate_lfo(s_lfo: &Signal, cutoff_hz: f64) -> Result<Signal> {
    let power = Signal::from_raw(s_lfo.samples().iter().map(|v| v * v).collect(), s_lfo.fs());
    let smooth = ideal_lowpass(&power, cutoff_hz)?;
    Ok(Signal::from_raw(
        smooth.samples().iter().map(|v| v.max(0.0)).collect(),
        s_lfo.fs(),
    ))
}

/// Rules turning a demodulated LFO power into PAC periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRules {
    pub epsilon: f64,
    pub merge_gap_s: f64,
    pub min_len_s: f64,
}

impl PeriodRules {
    pub fn from_config(cfg: &RepacConfig, f_l_hat: f64) -> Self {
        PeriodRules {
            epsilon: cfg.activity_epsilon,
            merge_gap_s: cfg.merge_gap_s,
            min_len_s: cfg.min_cycles / f_l_hat.abs().max(f64::MIN_POSITIVE),
        }
    }
}

/// Median of a non-empty slice.
fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    let mid = s.len() / 2;
    *s.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// Candidate PAC periods. A stretch is seeded wherever `s1` exceeds
/// `floor + epsilon·(max(s1) - floor)`, `floor` being the median of `s1`,
/// and grows outwards while `s1` stays above the floor. Gaps shorter than
/// `merge_gap_s` are bridged and stretches shorter than `min_len_s` dropped.
/// When `s1` is zero most of the time the floor is zero and the seed level
/// is `epsilon·max(s1)`.
pub fn detect_pac_periods(s1: &Signal, rules: PeriodRules) -> Vec<Interval> {
    let v = s1.samples();
    let max = v.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let floor = median(v);
    let level = floor + rules.epsilon * (max - floor);
    let mut runs: Vec<Interval> = Vec::new();
    let mut i = 0;
    while i < v.len() {
        if v[i] > level {
            let mut start = i;
            while start > 0 && v[start - 1] > floor {
                start -= 1;
            }
            while i < v.len() && v[i] > floor {
                i += 1;
            }
            match runs.last_mut() {
                Some(last) if start <= last.end => last.end = i,
                _ => runs.push(Interval::new(start, i)),
            }
        } else {
            i += 1;
        }
    }
    let fs = s1.fs();
    let gap = (rules.merge_gap_s * fs).round() as usize;
    let mut merged: Vec<Interval> = Vec::with_capacity(runs.len());
    for r in runs {
        match merged.last_mut() {
            Some(last) if r.start - last.end < gap => last.end = r.end,
            _ => merged.push(r),
        }
    }
    let min_len = (rules.min_len_s * fs).ceil() as usize;
    merged.retain(|iv| iv.len() >= min_len);
    merged
}

/// Segment-averaged spectrum analysis of the HFO comb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombAnalysis {
    /// Frequency of the comb centre, Hz.
    pub peak_hz: f64,
    /// `peak_hz ± K·f̂_L` before clipping.
    pub unclipped_band: Band,
    /// The band actually used for filtering.
    pub refined_band: Band,
    pub prominence_db: f64,
    pub segment_psd: PsdEstimate,
}

/// Expected relative line powers of the comb at offsets `0, ±1, ±2, …`
/// LFO spacings: Fourier coefficients of a half-wave-rectified cosine.
fn comb_weights(side_peaks: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..=side_peaks)
        .map(|k| {
            let c = match k {
                0 => 1.0 / PI,
                1 => 0.25,
                k if k % 2 == 1 => 0.0,
                k => {
                    let k = k as f64;
                    2.0 / (PI * (k * k - 1.0))
                }
            };
            c * c
        })
        .collect()
}

/// Average the Hann periodograms of the PAC periods (zero-padded to a common
/// length), whiten by the whole-record spectrum, and locate the comb centre
/// inside `candidate` with a template matched to the trough-gated comb.
pub fn comb_analysis(
    x: &Signal,
    intervals: &[Interval],
    f_l_hat: f64,
    candidate: Band,
    side_peaks: usize,
    min_prominence_db: f64,
    matched: bool,
) -> Result<CombAnalysis> {
    if intervals.is_empty() {
        return Err(Error::param("intervals", "no PAC periods to analyse"));
    }
    let fs = x.fs();
    candidate.validate(fs)?;
    if f_l_hat.is_nan() || f_l_hat <= 0.0 {
        return Err(Error::param("f_l_hat", "must be positive"));
    }
    let s = x.samples();
    let longest = intervals.iter().map(Interval::len).max().unwrap_or(0);
    if longest < 16 {
        return Err(Error::TooShort {
            len: longest,
            min: 16,
        });
    }
    let nfft = longest.next_power_of_two().max((2.0 * fs) as usize);

    let mut avg = vec![0.0; nfft / 2 + 1];
    let mut freqs = Vec::new();
    for iv in intervals {
        let p = periodogram(&s[iv.start..iv.end.min(s.len())], fs, nfft);
        avg.iter_mut().zip(&p.power).for_each(|(a, b)| *a += b);
        freqs = p.freqs;
    }
    avg.iter_mut().for_each(|v| *v /= intervals.len() as f64);
    let segment_psd = PsdEstimate { freqs, power: avg };

    // background: same-length windows tiled over the whole record
    let win = (intervals.iter().map(Interval::len).sum::<usize>() / intervals.len()).max(16);
    let mut background = vec![0.0; nfft / 2 + 1];
    let mut count = 0;
    let mut start = 0;
    while start + win <= s.len() {
        let p = periodogram(&s[start..start + win], fs, nfft);
        background
            .iter_mut()
            .zip(&p.power)
            .for_each(|(a, b)| *a += b);
        count += 1;
        start += (win / 2).max(1);
    }
    let df = segment_psd.resolution();
    let whitened: Vec<f64> = segment_psd
        .power
        .iter()
        .zip(&background)
        .map(|(p, b)| if *b > 0.0 { p * count as f64 / b } else { 0.0 })
        .collect();

    let weights = if matched {
        comb_weights(side_peaks)
    } else {
        vec![1.0]
    };
    let wsum: f64 = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
    let spacing = f_l_hat / df;
    let nyq = whitened.len() - 1;
    let sample = |bin: f64| -> f64 {
        let b = bin.round();
        if b < 0.0 || b as usize > nyq {
            0.0
        } else {
            whitened[b as usize]
        }
    };
    let (k_lo, k_hi) = (segment_psd.bin(candidate.lo), segment_psd.bin(candidate.hi));
    let scores: Vec<(usize, f64)> = (k_lo..=k_hi)
        .map(|k| {
            let c = k as f64;
            let mut acc = weights[0] * sample(c);
            for (j, w) in weights.iter().enumerate().skip(1) {
                let off = j as f64 * spacing;
                acc += w * (sample(c - off) + sample(c + off));
            }
            (k, acc / wsum)
        })
        .collect();
    let (peak_bin, peak) = scores
        .iter()
        .copied()
        .fold((k_lo, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    let mut sorted: Vec<f64> = scores.iter().map(|s| s.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let prominence_db = if median > 0.0 {
        10.0 * (peak / median).log10()
    } else {
        f64::INFINITY
    };
    if prominence_db.is_nan() || prominence_db < min_prominence_db {
        return Err(Error::NoHfoComponent { prominence_db });
    }

    let peak_hz = segment_psd.freqs[peak_bin];
    let half = side_peaks as f64 * f_l_hat;
    let unclipped_band = Band::new(peak_hz - half, peak_hz + half);
    let refined_band = Band::new(
        unclipped_band.lo.max(f_l_hat),
        unclipped_band.hi.min(0.49 * fs),
    );
    Ok(CombAnalysis {
        peak_hz,
        unclipped_band,
        refined_band,
        prominence_db,
        segment_psd,
    })
}

/// HFO estimates of a run that found a comb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfoEstimate {
    /// Comb centre from the segment spectrum, Hz.
    pub comb_peak_hz: f64,
    /// `comb_peak_hz ± K·f̂_L`, before clipping.
    pub unclipped_band: Band,
    pub refined_band: Band,
    /// Phase-slope estimate over the PAC periods, Hz.
    pub f_h_hat: f64,
    pub prominence_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepacResult {
    pub refined_lfo: Band,
    pub lfo_threshold: f64,
    pub lfo_low_confidence: bool,
    pub f_l_hat: f64,
    /// `None` when no HFO comb was found.
    pub hfo: Option<HfoEstimate>,
    pub pac_intervals: Vec<Interval>,
    pub final_mvl: f64,
    pub profile: MvlProfile,
    pub segment_psd: Option<PsdEstimate>,
    /// Why the run ended without PAC periods, if it did.
    pub no_pac_reason: Option<String>,
}

impl RepacResult {
    pub fn detected(&self) -> bool {
        !self.pac_intervals.is_empty()
    }
}

fn band_filter(x: &Signal, band: Band, transition: f64) -> Result<Signal> {
    let t = dsp::fitted_transition(x.len(), x.fs(), transition);
    dsp::bandpass(x, band, t)
}

/// Run the full pipeline on `x`.
pub fn run_repac(x: &Signal, cfg: &RepacConfig) -> Result<RepacResult> {
    let fs = x.fs();
    cfg.validate(fs).stage("config")?;
    if x.duration() < MIN_DURATION_S {
        return Err(Error::TooShort {
            len: x.len(),
            min: (MIN_DURATION_S * fs).ceil() as usize,
        });
    }

    let profile = mvl_profile(
        x,
        &cfg.lfo_bands,
        cfg.hfo_band,
        &cfg.has_set,
        cfg.transitions,
        cfg.execution,
    )
    .stage("mvl profile")?;
    let lfo = refine_lfo_band(&profile, cfg.threshold_coeff).stage("lfo refinement")?;
    let s_lfo = band_filter(x, lfo.band, cfg.transitions.lfo_hz).stage("lfo filter")?;
    let lfo_analytic = analytic_signal(&s_lfo).stage("lfo phase")?;
    let f_l_hat = phase_slope_hz(
        &unwrap_phase(&instantaneous_phase(&lfo_analytic)),
        cfg.edge_fraction,
    )
    .stage("lfo frequency")?;

    let mut result = RepacResult {
        refined_lfo: lfo.band,
        lfo_threshold: lfo.threshold,
        lfo_low_confidence: lfo.low_confidence,
        f_l_hat,
        hfo: None,
        pac_intervals: Vec::new(),
        final_mvl: 0.0,
        profile,
        segment_psd: None,
        no_pac_reason: None,
    };

    let s1 = demodulate_lfo(&s_lfo, cfg.demod_cutoff_hz).stage("demodulation")?;
    let periods = detect_pac_periods(&s1, PeriodRules::from_config(cfg, f_l_hat));
    if periods.is_empty() {
        result.no_pac_reason = Some("no active LFO periods".into());
        return Ok(result);
    }

    let comb = match comb_analysis(
        x,
        &periods,
        f_l_hat,
        cfg.hfo_band,
        cfg.comb_side_peaks,
        cfg.comb_min_prominence_db,
        cfg.comb_matched,
    ) {
        Ok(c) => c,
        Err(e @ Error::NoHfoComponent { .. }) => {
            result.no_pac_reason = Some(e.to_string());
            return Ok(result);
        }
        Err(e) => return Err(e).stage("comb analysis"),
    };

    let s_hfo = band_filter(x, comb.refined_band, cfg.transitions.hfo_hz).stage("hfo filter")?;
    let hfo_analytic = analytic_signal(&s_hfo).stage("hfo analytic")?;
    let hfo_phase = unwrap_phase(&instantaneous_phase(&hfo_analytic));
    let amplitude = instantaneous_amplitude(&hfo_analytic);
    let power: Vec<f64> = amplitude.samples().iter().map(|a| a * a).collect();
    let f_h_hat = phase_slope_hz_weighted(&hfo_phase, &power, &periods, cfg.edge_fraction)
        .stage("hfo frequency")?;

    let lfo_phase = instantaneous_phase(&lfo_analytic);
    let indices: Vec<usize> = periods.iter().flat_map(|iv| iv.start..iv.end).collect();
    result.final_mvl = mean_vector(amplitude.samples(), lfo_phase.samples(), &indices, 0);
    result.hfo = Some(HfoEstimate {
        comb_peak_hz: comb.peak_hz,
        unclipped_band: comb.unclipped_band,
        refined_band: comb.refined_band,
        f_h_hat,
        prominence_db: comb.prominence_db,
    });
    result.segment_psd = Some(comb.segment_psd);
    result.pac_intervals = periods;
    Ok(result)
}
