//! Synthetic phase-amplitude coupling (PAC) records, the REPAC detector, a
//! fixed-band surrogate baseline, and a Monte Carlo harness comparing them.
//!
//! Modules build on each other bottom-up:
//! [`dsp`] → [`synth`] / [`mvl`] → [`repac`] / [`baseline`] → [`bench`].

pub mod baseline;
pub mod bench;
pub mod dsp;
pub mod error;
pub mod exec;
pub mod io;
pub mod mvl;
pub mod repac;
pub mod signal;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
pub use signal::{Band, ComplexSeries, Interval, Signal};
