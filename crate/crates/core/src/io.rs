//! On-disk formats.
//!
//! Signal file: 16-byte header (`b"REPACSIG"`, `u32` format version, `u32`
//! reserved, all little-endian) followed by the samples as little-endian
//! `f64`. Sampling rate, generator parameters and ground truth live in a
//! JSON sidecar next to the binary (`<file>.json`).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dsp::PsdEstimate;
use crate::error::{Error, Result};
use crate::signal::{Interval, Signal};
use crate::synth::PacParams;

pub const SIGNAL_MAGIC: [u8; 8] = *b"REPACSIG";
pub const SIGNAL_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

pub fn encode_signal(samples: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * samples.len());
    out.extend_from_slice(&SIGNAL_MAGIC);
    out.extend_from_slice(&SIGNAL_VERSION.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_signal(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Header(format!(
            "{} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if bytes[..8] != SIGNAL_MAGIC {
        return Err(Error::Header("bad magic, not a REPAC signal file".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != SIGNAL_VERSION {
        return Err(Error::Header(format!(
            "unsupported format version {version}"
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    if payload.is_empty() {
        return Err(Error::Payload("no samples".into()));
    }
    if !payload.len().is_multiple_of(8) {
        return Err(Error::Payload(format!(
            "{} payload bytes is not a whole number of f64 samples",
            payload.len()
        )));
    }
    let samples: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Payload(format!("sample {i} is not finite")));
    }
    Ok(samples)
}

pub fn write_signal_file(path: &Path, samples: &[f64]) -> Result<()> {
    fs::write(path, encode_signal(samples))?;
    Ok(())
}

pub fn read_signal_file(path: &Path) -> Result<Vec<f64>> {
    decode_signal(&fs::read(path)?)
}

/// Metadata stored beside a signal file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub fs: f64,
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PacParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Vec<Interval>>,
}

/// `signal.bin` → `signal.bin.json`.
pub fn sidecar_path(signal_path: &Path) -> PathBuf {
    let mut s = signal_path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_sidecar(signal_path: &Path, meta: &Sidecar) -> Result<()> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(sidecar_path(signal_path), text)?;
    Ok(())
}

pub fn read_sidecar(signal_path: &Path) -> Result<Sidecar> {
    Ok(serde_json::from_str(&fs::read_to_string(sidecar_path(
        signal_path,
    ))?)?)
}

/// Load a signal file; the sampling rate comes from `fs` or else from the sidecar.
pub fn load_signal(path: &Path, fs: Option<f64>) -> Result<(Signal, Option<Sidecar>)> {
    let samples = read_signal_file(path)?;
    let meta = match read_sidecar(path) {
        Ok(m) => Some(m),
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e),
    };
    if let Some(m) = &meta {
        if m.n_samples != samples.len() {
            return Err(Error::Payload(format!(
                "sidecar lists {} samples, file holds {}",
                m.n_samples,
                samples.len()
            )));
        }
    }
    let rate = fs
        .or(meta.as_ref().map(|m| m.fs))
        .ok_or_else(|| Error::param("fs", "no sidecar found; pass the sampling rate"))?;
    Ok((Signal::new(samples, rate)?, meta))
}

/// `time,value` rows.
pub fn signal_csv(x: &Signal) -> String {
    let mut out = String::from("time,value\n");
    for (i, v) in x.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i as f64 / x.fs(), v);
    }
    out
}

/// `start,end,start_s,end_s` rows, sample indices half-open.
pub fn intervals_csv(intervals: &[Interval], fs: f64) -> String {
    let mut out = String::from("start,end,start_s,end_s\n");
    for iv in intervals {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            iv.start,
            iv.end,
            iv.start as f64 / fs,
            iv.end as f64 / fs
        );
    }
    out
}

/// `freq,power` rows.
pub fn psd_csv(psd: &PsdEstimate) -> String {
    let mut out = String::from("freq,power\n");
    for (f, p) in psd.freqs.iter().zip(&psd.power) {
        let _ = writeln!(out, "{f},{p}");
    }
    out
}
