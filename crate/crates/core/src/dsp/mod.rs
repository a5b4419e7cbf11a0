//! Numerical primitives shared by every other module: analytic signal and
//! phase utilities, zero-phase FIR band filtering, spectral estimation and
//! 1/f noise.

mod fft;
mod filter;
mod hilbert;
mod noise;
mod spectrum;

pub use filter::{design_bandpass, filter_zero_phase, fitted_transition, FilterCoeffs};
pub use hilbert::{
    analytic_signal, instantaneous_amplitude, instantaneous_phase, phase_slope_hz,
    phase_slope_hz_segments, phase_slope_hz_weighted, unwrap_phase, DEFAULT_EDGE_FRACTION,
};
pub use noise::{pink_noise, white_noise};
pub use spectrum::{ideal_lowpass, periodogram, welch_psd, PsdEstimate};

use crate::error::Result;
use crate::signal::{Band, Signal};

/// Design and apply a zero-phase band filter in one step.
pub fn bandpass(x: &Signal, band: Band, transition: f64) -> Result<Signal> {
    let coeffs = design_bandpass(band, x.fs(), transition)?;
    filter_zero_phase(&coeffs, x)
}
