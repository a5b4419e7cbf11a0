//! Mean vector length (MVL) coupling estimator.
//!
//! At each sample a vector of length `A_H[n]` (high-frequency amplitude) and
//! angle `φ_L[n]` (low-frequency phase) is formed; MVL is the modulus of their
//! average. Only the `has` percent of samples with the largest amplitude
//! take part. MVL is not normalised by the mean amplitude.

use serde::{Deserialize, Serialize};

use crate::dsp::{self, analytic_signal, instantaneous_amplitude, instantaneous_phase};
use crate::error::{Error, Result, StageExt};
use crate::exec::{self, Execution};
use crate::signal::{Band, Signal};

/// Default top-amplitude percentages averaged into each MVL value.
pub const DEFAULT_HAS_SET: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];

/// Averaged MVL per narrow LFO band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvlProfile {
    pub bands: Vec<Band>,
    pub values: Vec<f64>,
    pub has_set: Vec<f64>,
}

impl MvlProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the first maximal value.
    pub fn argmax(&self) -> usize {
        let max = self.max();
        self.values.iter().position(|&v| v == max).unwrap_or(0)
    }
}

/// Narrow LFO bands of `width` Hz stepped by `hop` Hz, covering `[lo, hi]`.
pub fn band_grid(lo: f64, hi: f64, width: f64, hop: f64) -> Vec<Band> {
    let mut bands = Vec::new();
    let mut k = 0;
    loop {
        let start = lo + k as f64 * hop;
        if start + width > hi + 1e-9 {
            break;
        }
        bands.push(Band::new(start, start + width));
        k += 1;
    }
    bands
}

/// Default LFO scan: 2 Hz bands, 1 Hz hop, 2-15 Hz (12 bands).
pub fn default_lfo_grid() -> Vec<Band> {
    band_grid(2.0, 15.0, 2.0, 1.0)
}

/// Number of samples kept for `has_percent` of `n`.
pub fn selection_len(n: usize, has_percent: f64) -> usize {
    (n as f64 * has_percent / 100.0).round() as usize
}

/// Sample indices ordered by decreasing amplitude, ties by lower index.
pub fn amplitude_order(amplitude: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..amplitude.len()).collect();
    idx.sort_by(|&a, &b| amplitude[b].total_cmp(&amplitude[a]).then(a.cmp(&b)));
    idx
}

fn check_has(has_percent: f64) -> Result<()> {
    if has_percent > 0.0 && has_percent <= 100.0 {
        Ok(())
    } else {
        Err(Error::param(
            "has",
            format!("{has_percent} outside (0, 100]"),
        ))
    }
}

/// Modulus of the mean of `A[n]·exp(iφ[n])` over `indices`, summed in
/// ascending index order. `phase_shift` rotates the phase index circularly.
pub(crate) fn mean_vector(
    amplitude: &[f64],
    phase: &[f64],
    indices: &[usize],
    phase_shift: usize,
) -> f64 {
    let n = phase.len();
    let (mut re, mut im) = (0.0, 0.0);
    for &i in indices {
        let p = phase[(i + phase_shift) % n];
        re += amplitude[i] * p.cos();
        im += amplitude[i] * p.sin();
    }
    let k = indices.len() as f64;
    (re / k).hypot(im / k)
}

/// Selected indices for each `has` value, each sorted ascending.
pub(crate) fn selections(amplitude: &[f64], has_set: &[f64]) -> Result<Vec<Vec<usize>>> {
    let order = amplitude_order(amplitude);
    has_set
        .iter()
        .map(|&h| {
            check_has(h)?;
            let k = selection_len(amplitude.len(), h);
            if k == 0 {
                return Err(Error::EmptySelection);
            }
            let mut sel = order[..k].to_vec();
            sel.sort_unstable();
            Ok(sel)
        })
        .collect()
}

/// MVL over the `has_percent` % of samples with the largest amplitude.
pub fn mvl(amplitude: &Signal, phase: &Signal, has_percent: f64) -> Result<f64> {
    if amplitude.len() != phase.len() {
        return Err(Error::LengthMismatch(amplitude.len(), phase.len()));
    }
    if amplitude.samples().iter().any(|&a| a < 0.0) {
        return Err(Error::param("amplitude", "must be non-negative"));
    }
    let sel = selections(amplitude.samples(), &[has_percent])?;
    Ok(mean_vector(
        amplitude.samples(),
        phase.samples(),
        &sel[0],
        0,
    ))
}

/// MVL averaged over `has_set`.
pub fn mvl_averaged(amplitude: &[f64], phase: &[f64], has_set: &[f64]) -> Result<f64> {
    if amplitude.len() != phase.len() {
        return Err(Error::LengthMismatch(amplitude.len(), phase.len()));
    }
    let sels = selections(amplitude, has_set)?;
    Ok(sels
        .iter()
        .map(|s| mean_vector(amplitude, phase, s, 0))
        .sum::<f64>()
        / sels.len() as f64)
}

/// Band-limited phase of `x` via zero-phase filtering and analytic signal.
pub fn band_phase(x: &Signal, band: Band, transition: f64) -> Result<Signal> {
    let t = dsp::fitted_transition(x.len(), x.fs(), transition);
    let filtered = dsp::bandpass(x, band, t)?;
    Ok(instantaneous_phase(&analytic_signal(&filtered)?))
}

/// Band-limited amplitude envelope of `x`.
pub fn band_amplitude(x: &Signal, band: Band, transition: f64) -> Result<Signal> {
    let t = dsp::fitted_transition(x.len(), x.fs(), transition);
    let filtered = dsp::bandpass(x, band, t)?;
    Ok(instantaneous_amplitude(&analytic_signal(&filtered)?))
}

/// Filter transitions used when scanning bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Transitions {
    pub lfo_hz: f64,
    pub hfo_hz: f64,
}

impl Default for Transitions {
    fn default() -> Self {
        Transitions {
            lfo_hz: 1.0,
            hfo_hz: 5.0,
        }
    }
}

/// MVL of every LFO band against one HFO amplitude, averaged over `has_set`.
pub fn mvl_profile(
    x: &Signal,
    lfo_bands: &[Band],
    hfo_band: Band,
    has_set: &[f64],
    transitions: Transitions,
    exec: Execution,
) -> Result<MvlProfile> {
    if lfo_bands.len() < 3 {
        return Err(Error::param("lfo_bands", "need at least 3 bands"));
    }
    if has_set.is_empty() {
        return Err(Error::param("has_set", "must not be empty"));
    }
    let fs = x.fs();
    for b in lfo_bands {
        b.validate(fs)?;
        if hfo_band.lo <= b.hi {
            return Err(Error::param("hfo_band", "must lie above every LFO band"));
        }
    }
    let amplitude = band_amplitude(x, hfo_band, transitions.hfo_hz).stage("hfo amplitude")?;
    let sels = selections(amplitude.samples(), has_set)?;
    let values = exec::map_slice(lfo_bands, exec, |&band| -> Result<f64> {
        let phase = band_phase(x, band, transitions.lfo_hz)?;
        Ok(sels
            .iter()
            .map(|s| mean_vector(amplitude.samples(), phase.samples(), s, 0))
            .sum::<f64>()
            / sels.len() as f64)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()
    .stage("lfo scan")?;
    Ok(MvlProfile {
        bands: lfo_bands.to_vec(),
        values,
        has_set: has_set.to_vec(),
    })
}

/// CSV export `band_lo,band_hi,mvl`.
pub fn profile_csv(profile: &MvlProfile) -> String {
    let mut out = String::from("band_lo,band_hi,mvl\n");
    for (b, v) in profile.bands.iter().zip(&profile.values) {
        out.push_str(&format!("{},{},{}\n", b.lo, b.hi, v));
    }
    out
}
