use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::fft;
use crate::error::{Error, Result};
use crate::signal::Signal;

const MIN_PINK_LEN: usize = 256;

/// Standard normal white noise from a seeded ChaCha8 stream.
pub fn white_noise(n: usize, fs: f64, seed: u64) -> Result<Signal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    Signal::new(samples, fs)
}

/// Unit-variance 1/f noise: a white Gaussian spectrum is shaped by
/// `1/sqrt(f)` with the DC bin removed, on the next power-of-two length,
/// and the centre `n` samples are kept.
pub fn pink_noise(n: usize, fs: f64, seed: u64) -> Result<Signal> {
    if n < MIN_PINK_LEN {
        return Err(Error::TooShort {
            len: n,
            min: MIN_PINK_LEN,
        });
    }
    let len = n.next_power_of_two();
    let white = white_noise(len, fs, seed)?;
    let mut buf = fft::to_complex(white.samples(), len);
    fft::forward(&mut buf);
    buf[0] = Default::default();
    for (k, v) in buf.iter_mut().enumerate().skip(1) {
        let f = k.min(len - k) as f64 * fs / len as f64;
        *v /= f.sqrt();
    }
    fft::inverse(&mut buf);

    let offset = (len - n) / 2;
    let mut out: Vec<f64> = buf[offset..offset + n].iter().map(|z| z.re).collect();
    let mean = out.iter().sum::<f64>() / n as f64;
    let sd = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    for v in &mut out {
        *v = (*v - mean) / sd;
    }
    Signal::new(out, fs)
}
