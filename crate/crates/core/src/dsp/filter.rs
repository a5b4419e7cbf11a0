//! Windowed-sinc FIR band filters applied forward and backward.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::fft;
use crate::error::{Error, Result};
use crate::signal::{Band, Signal};

/// Hamming main-lobe width in units of `fs / taps`.
const HAMMING_WIDTH: f64 = 3.3;

/// Linear-phase FIR band filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoeffs {
    pub taps: Vec<f64>,
    pub band: Band,
    pub fs: f64,
    pub transition: f64,
}

impl FilterCoeffs {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Single-pass magnitude response at `f` Hz.
    pub fn magnitude(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f / self.fs;
        let (re, im) = self
            .taps
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, &h)| {
                let a = w * k as f64;
                (re + h * a.cos(), im - h * a.sin())
            });
        re.hypot(im)
    }
}

/// Number of taps a Hamming windowed-sinc needs for `transition` Hz.
fn taps_for(fs: f64, transition: f64) -> usize {
    let n = (HAMMING_WIDTH * fs / transition).ceil() as usize;
    n | 1
}

/// Narrowest transition (never below `requested`) whose filter still fits
/// in a third of an `len`-sample signal.
pub fn fitted_transition(len: usize, fs: f64, requested: f64) -> f64 {
    let max_taps = (len / 3).max(3);
    let mut t = requested;
    while taps_for(fs, t) > max_taps {
        t = t.max(HAMMING_WIDTH * fs / max_taps as f64) * 1.01;
    }
    t
}

/// Hamming-windowed sinc band-pass with cutoffs at the band edges and unit
/// gain at the band centre. A band with `lo == 0` is a low-pass.
pub fn design_bandpass(band: Band, fs: f64, transition: f64) -> Result<FilterCoeffs> {
    band.validate(fs)?;
    if !(transition.is_finite() && transition > 0.0) {
        return Err(Error::param("transition", "must be positive"));
    }
    let n = taps_for(fs, transition);
    let mid = (n / 2) as f64;
    let lowpass = |fc: f64, k: f64| {
        let wc = 2.0 * fc / fs;
        if k == 0.0 {
            wc
        } else {
            (PI * wc * k).sin() / (PI * k)
        }
    };
    let taps: Vec<f64> = (0..n)
        .map(|i| {
            let k = i as f64 - mid;
            let window = 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
            window * (lowpass(band.hi, k) - lowpass(band.lo, k))
        })
        .collect();
    let mut coeffs = FilterCoeffs {
        taps,
        band,
        fs,
        transition,
    };
    let gain = coeffs.magnitude(band.center());
    if gain > 0.0 {
        for h in &mut coeffs.taps {
            *h /= gain;
        }
    }
    Ok(coeffs)
}

/// Forward-backward application of `coeffs`: zero net phase, squared
/// magnitude response. The record is extended by odd reflection to damp
/// start-up transients.
pub fn filter_zero_phase(coeffs: &FilterCoeffs, x: &Signal) -> Result<Signal> {
    let n = x.len();
    let taps = coeffs.len();
    if taps > n / 3 {
        return Err(Error::FilterTooLong { taps, len: n });
    }
    coeffs.band.validate(x.fs())?;
    let s = x.samples();
    let pad = taps;
    let padded_len = n + 2 * pad;
    let len = (padded_len + 2 * taps).next_power_of_two();

    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for i in 0..pad {
        // odd reflection about the end points
        buf[pad - 1 - i].re = 2.0 * s[0] - s[(i + 1).min(n - 1)];
        buf[pad + n + i].re = 2.0 * s[n - 1] - s[n.saturating_sub(2 + i)];
    }
    for (b, &v) in buf[pad..pad + n].iter_mut().zip(s) {
        b.re = v;
    }

    let mut h = fft::to_complex(&coeffs.taps, len);
    fft::forward(&mut h);
    fft::forward(&mut buf);
    for (b, hk) in buf.iter_mut().zip(&h) {
        *b *= hk.norm_sqr();
    }
    fft::inverse(&mut buf);
    Ok(Signal::from_raw(
        buf[pad..pad + n].iter().map(|z| z.re).collect(),
        x.fs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{analytic_signal, instantaneous_amplitude};

    fn tone(f: f64, n: usize, fs: f64) -> Signal {
        Signal::new(
            (0..n)
                .map(|i| (2.0 * PI * f * i as f64 / fs).cos())
                .collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn passes_in_band_tone() {
        let fs = 1000.0;
        let x = tone(5.0, 8000, fs);
        let c = design_bandpass(Band::new(4.0, 6.0), fs, 1.25).unwrap();
        let y = filter_zero_phase(&c, &x).unwrap();
        let env = instantaneous_amplitude(&analytic_signal(&y).unwrap());
        for v in &env.samples()[2000..6000] {
            assert!((v - 1.0).abs() < 0.05, "{v}");
        }
    }

    #[test]
    fn rejects_out_of_band_tone() {
        let fs = 1000.0;
        let x = tone(80.0, 8000, fs);
        let c = design_bandpass(Band::new(4.0, 6.0), fs, 1.25).unwrap();
        let y = filter_zero_phase(&c, &x).unwrap();
        let peak = y.samples()[1000..7000]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak < 0.01, "{peak}");
    }

    #[test]
    fn ripple_and_stopband() {
        let fs = 1000.0;
        let band = Band::new(60.0, 100.0);
        let t = 5.0;
        let c = design_bandpass(band, fs, t).unwrap();
        // passband interior, two-pass response
        let mut f = band.lo + t / 2.0;
        while f <= band.hi - t / 2.0 {
            let db = 20.0 * c.magnitude(f).powi(2).log10();
            assert!(db.abs() < 1.0, "ripple {db} dB at {f}");
            f += 0.5;
        }
        for edge in [
            band.lo - t,
            band.hi + t,
            band.lo - 3.0 * t,
            band.hi + 10.0 * t,
        ] {
            let db = 20.0 * c.magnitude(edge).powi(2).log10();
            assert!(db < -40.0, "stopband {db} dB at {edge}");
        }
    }

    #[test]
    fn impulse_response_is_symmetric() {
        let fs = 500.0;
        let n = 3001;
        let mut x = vec![0.0; n];
        x[n / 2] = 1.0;
        let c = design_bandpass(Band::new(8.0, 12.0), fs, 2.0).unwrap();
        let y = filter_zero_phase(&c, &Signal::new(x, fs).unwrap()).unwrap();
        let y = y.samples();
        for k in 1..400 {
            assert!((y[n / 2 - k] - y[n / 2 + k]).abs() < 1e-12);
        }
        let argmax = (0..n)
            .max_by(|&a, &b| y[a].abs().total_cmp(&y[b].abs()))
            .unwrap();
        assert_eq!(argmax, n / 2);
    }

    #[test]
    fn errors() {
        let fs = 1000.0;
        assert!(matches!(
            design_bandpass(Band::new(400.0, 600.0), fs, 5.0),
            Err(Error::InvalidBand { .. })
        ));
        let c = design_bandpass(Band::new(4.0, 6.0), fs, 1.0).unwrap();
        let x = tone(5.0, 2000, fs);
        assert!(matches!(
            filter_zero_phase(&c, &x),
            Err(Error::FilterTooLong { .. })
        ));
    }

    #[test]
    fn fitted_transition_fits() {
        let t = fitted_transition(4000, 1000.0, 1.0);
        assert!(t > 1.0);
        assert!(taps_for(1000.0, t) <= 4000 / 3);
        assert_eq!(fitted_transition(60_000, 1000.0, 1.0), 1.0);
    }
}
