//! `repac` command-line tool.
//!
//! Exit codes: 0 success, 1 validation, 2 I/O, 3 acceptance-gate failure.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use repac_core::baseline::{run_baseline, BaselineResult};
use repac_core::bench::{monte_carlo_with_progress, BenchReport};
use repac_core::dsp::welch_psd;
use repac_core::io::{self, Sidecar};
use repac_core::repac::{run_repac, RepacResult};
use repac_core::synth::{synthesize, EventCount};
use repac_core::{Band, Execution, Interval};
use serde::Serialize;

use config::RunConfig;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<repac_core::Error> for CliError {
    fn from(e: repac_core::Error) -> Self {
        let code = if matches!(e.root(), repac_core::Error::Io(_)) {
            2
        } else {
            1
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "repac",
    version,
    about = "Synthesize PAC-like EEG and detect phase-amplitude coupling"
)]
struct Cli {
    /// TOML file with [synth], [repac], [baseline] and [bench] tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic record.
    Synth(SynthArgs),
    /// Run a detector on a signal file.
    Detect(DetectArgs),
    /// Welch power spectral density of a signal file as CSV.
    Psd(PsdArgs),
    /// Monte Carlo comparison of REPAC and the baseline.
    Bench(BenchArgs),
}

#[derive(clap::Args, Debug)]
struct SynthArgs {
    /// Output signal file; the sidecar is written to `<out>.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    fl: Option<f64>,
    #[arg(long)]
    fh: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    /// Event length in seconds.
    #[arg(long = "L", alias = "event-len")]
    event_len: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    fs: Option<f64>,
    /// Fixed number of events.
    #[arg(long)]
    events: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a `time,value` CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum DetectorArg {
    Repac,
    Baseline,
}

#[derive(clap::Args, Debug)]
struct DetectArgs {
    signal: PathBuf,
    #[arg(long, value_enum, default_value_t = DetectorArg::Repac)]
    detector: DetectorArg,
    /// Sampling rate, when the file has no sidecar.
    #[arg(long)]
    fs: Option<f64>,
    /// Output prefix; writes `<out>.json` and `<out>.intervals.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Surrogate seed for the baseline detector.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sequential: bool,
}

#[derive(clap::Args, Debug)]
struct PsdArgs {
    signal: PathBuf,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long, default_value_t = 1024)]
    segment_len: usize,
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    /// Lowest frequency written, Hz.
    #[arg(long)]
    fmin: Option<f64>,
    /// Highest frequency written, Hz.
    #[arg(long)]
    fmax: Option<f64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct BenchArgs {
    /// Directory for `bench.csv` and `bench.json`.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated SNR grid in dB, e.g. `--snr=-10,-5,0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<f64>>,
    #[arg(long = "L", value_delimiter = ',')]
    event_len: Option<Vec<f64>>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    sequential: bool,
}

fn load(path: &Path, fs: Option<f64>) -> CliResult<repac_core::Signal> {
    io::load_signal(path, fs).map(|(x, _)| x).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::validation(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// CSV with the effective configuration echoed on a leading comment line.
fn with_echo<T: Serialize>(echo: &T, csv: String) -> CliResult<String> {
    let line = serde_json::to_string(echo)
        .map_err(|e| CliError::validation(format!("serialization: {e}")))?;
    Ok(format!("# config: {line}\n{csv}"))
}

fn synth_cmd(cfg: RunConfig, a: SynthArgs) -> CliResult {
    let mut p = cfg.synth;
    p.f_l = a.fl.unwrap_or(p.f_l);
    p.f_h = a.fh.unwrap_or(p.f_h);
    p.m = a.m.unwrap_or(p.m);
    p.event_len_s = a.event_len.unwrap_or(p.event_len_s);
    p.snr_db = a.snr.unwrap_or(p.snr_db);
    p.duration_s = a.duration.unwrap_or(p.duration_s);
    p.fs = a.fs.unwrap_or(p.fs);
    p.seed = a.seed.unwrap_or(p.seed);
    if let Some(count) = a.events {
        p.n_events = EventCount::Fixed { count };
    }
    let rec = synthesize(&p)?;
    let bin = io::encode_signal(rec.signal.samples());
    write_file(&a.out, bin)?;
    let meta = Sidecar {
        fs: p.fs,
        n_samples: rec.signal.len(),
        params: Some(p.clone()),
        truth: Some(rec.truth.event_intervals.clone()),
    };
    write_file(&io::sidecar_path(&a.out), to_json(&meta)?)?;
    if let Some(csv) = &a.csv {
        write_file(csv, with_echo(&p, io::signal_csv(&rec.signal))?)?;
    }
    println!(
        "wrote {} ({} samples, {} events, realized SNR {})",
        a.out.display(),
        rec.signal.len(),
        rec.truth.event_intervals.len(),
        rec.realized_snr_db()
            .map(|s| format!("{s:.2} dB"))
            .unwrap_or_else(|| "n/a".into()),
    );
    Ok(())
}

#[derive(Serialize)]
struct DetectReport<'a, C: Serialize, R: Serialize> {
    detector: DetectorArg,
    signal: &'a Path,
    fs: f64,
    n_samples: usize,
    config: &'a C,
    result: &'a R,
}

fn band_str(b: Band) -> String {
    format!("{:.2}-{:.2} Hz", b.lo, b.hi)
}

fn summarize_repac(r: &RepacResult) {
    println!("refined LFO band: {}", band_str(r.refined_lfo));
    if r.lfo_low_confidence {
        println!("  (flat MVL profile, low confidence)");
    }
    println!("f_L estimate:     {:.3} Hz", r.f_l_hat);
    match &r.hfo {
        Some(h) => {
            println!("refined HFO band: {}", band_str(h.refined_band));
            println!(
                "f_H estimate:     {:.3} Hz (comb peak {:.2} Hz)",
                h.f_h_hat, h.comb_peak_hz
            );
        }
        None => println!(
            "no PAC: {}",
            r.no_pac_reason.as_deref().unwrap_or("no HFO component")
        ),
    }
    println!("PAC intervals:    {}", r.pac_intervals.len());
    println!("final MVL:        {:.6}", r.final_mvl);
}

fn summarize_baseline(r: &BaselineResult) {
    println!("LFO band:         {}", band_str(r.lfo_band));
    println!("HFO band:         {}", band_str(r.hfo_band));
    println!("observed MVL:     {:.6}", r.observed_mvl);
    println!(
        "surrogate thr:    {:.6} (p = {:.4})",
        r.surrogate_threshold, r.p_value
    );
    println!("significant:      {}", r.significant);
    println!("PAC intervals:    {}", r.pac_intervals.len());
}

fn detect_cmd(cfg: RunConfig, a: DetectArgs) -> CliResult {
    let x = load(&a.signal, a.fs)?;
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let prefix = a.out.clone().unwrap_or_else(|| a.signal.clone());
    let json_path = PathBuf::from(format!(
        "{}.{}.json",
        prefix.display(),
        detector_name(a.detector)
    ));
    let csv_path = PathBuf::from(format!(
        "{}.{}.intervals.csv",
        prefix.display(),
        detector_name(a.detector)
    ));
    let intervals: Vec<Interval>;
    match a.detector {
        DetectorArg::Repac => {
            let rc = repac_core::repac::RepacConfig {
                execution: exec,
                ..cfg.repac
            };
            let r = run_repac(&x, &rc)?;
            summarize_repac(&r);
            let report = DetectReport {
                detector: a.detector,
                signal: &a.signal,
                fs: x.fs(),
                n_samples: x.len(),
                config: &rc,
                result: &r,
            };
            write_file(&json_path, to_json(&report)?)?;
            write_file(
                &csv_path,
                with_echo(&rc, io::intervals_csv(&r.pac_intervals, x.fs()))?,
            )?;
            intervals = r.pac_intervals;
        }
        DetectorArg::Baseline => {
            let mut bc = repac_core::baseline::BaselineConfig {
                execution: exec,
                ..cfg.baseline
            };
            bc.seed = a.seed.unwrap_or(bc.seed);
            let r = run_baseline(&x, &bc)?;
            summarize_baseline(&r);
            let report = DetectReport {
                detector: a.detector,
                signal: &a.signal,
                fs: x.fs(),
                n_samples: x.len(),
                config: &bc,
                result: &r,
            };
            write_file(&json_path, to_json(&report)?)?;
            write_file(
                &csv_path,
                with_echo(&bc, io::intervals_csv(&r.pac_intervals, x.fs()))?,
            )?;
            intervals = r.pac_intervals;
        }
    }
    for iv in &intervals {
        println!(
            "  [{}, {})  {:.3}-{:.3} s",
            iv.start,
            iv.end,
            iv.start as f64 / x.fs(),
            iv.end as f64 / x.fs()
        );
    }
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}

fn detector_name(d: DetectorArg) -> &'static str {
    match d {
        DetectorArg::Repac => "repac",
        DetectorArg::Baseline => "baseline",
    }
}

#[derive(Serialize)]
struct PsdEcho<'a> {
    signal: &'a Path,
    fs: f64,
    segment_len: usize,
    overlap: f64,
    fmin: f64,
    fmax: f64,
}

fn psd_cmd(a: PsdArgs) -> CliResult {
    let x = load(&a.signal, a.fs)?;
    let fmin = a.fmin.unwrap_or(0.0);
    let fmax = a.fmax.unwrap_or(x.fs() / 2.0);
    if !(fmin >= 0.0 && fmin < fmax && fmax <= x.fs() / 2.0) {
        return Err(CliError::validation(format!(
            "empty or invalid band [{fmin}, {fmax}] Hz for fs = {} Hz",
            x.fs()
        )));
    }
    let psd = welch_psd(&x, a.segment_len, a.overlap)?;
    let mut rows = String::from("freq,power\n");
    for (f, p) in psd.freqs.iter().zip(&psd.power) {
        if *f >= fmin && *f <= fmax {
            rows.push_str(&format!("{f},{p}\n"));
        }
    }
    let echo = PsdEcho {
        signal: &a.signal,
        fs: x.fs(),
        segment_len: a.segment_len,
        overlap: a.overlap,
        fmin,
        fmax,
    };
    let text = with_echo(&echo, rows)?;
    match &a.out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench_cmd(cfg: RunConfig, a: BenchArgs) -> CliResult {
    let mut grid = cfg.bench;
    grid.master_seed = a.master_seed.unwrap_or(grid.master_seed);
    grid.trials_per_cell = a.trials.unwrap_or(grid.trials_per_cell);
    grid.snr_values = a.snr.unwrap_or(grid.snr_values);
    grid.m_values = a.m.unwrap_or(grid.m_values);
    grid.l_values = a.event_len.unwrap_or(grid.l_values);
    grid.duration_s = a.duration.unwrap_or(grid.duration_s);
    if a.sequential {
        grid.execution = Execution::Sequential;
    }
    let n_cells = grid.cells().len();
    let report: BenchReport =
        monte_carlo_with_progress(&grid, &cfg.repac, &cfg.baseline, |i, c| {
            let pct = |v: Option<f64>| {
                v.map(|x| format!("{:.1}%", 100.0 * x))
                    .unwrap_or("-".into())
            };
            eprintln!(
                "[{}/{}] snr {} dB, m {}, L {} s: repac sens {} spec {} | baseline sens {} spec {}",
                i + 1,
                n_cells,
                c.cell.snr_db,
                c.cell.m,
                c.cell.event_len_s,
                pct(c.repac.pooled.sensitivity),
                pct(c.repac.pooled.specificity),
                pct(c.baseline.pooled.sensitivity),
                pct(c.baseline.pooled.specificity),
            );
        })?;
    let csv = with_echo(&report.config, report.to_csv())?;
    write_file(&a.out_dir.join("bench.csv"), csv)?;
    write_file(&a.out_dir.join("bench.json"), to_json(&report)?)?;
    println!("wrote {}", a.out_dir.display());
    for g in &report.gates {
        println!(
            "gate {:?}: observed {} -> {}",
            g.gate,
            g.observed
                .map(|v| format!("{v:.4}"))
                .unwrap_or("undefined".into()),
            if g.passed { "pass" } else { "FAIL" }
        );
    }
    if report.gates_passed() {
        Ok(())
    } else {
        Err(CliError {
            code: 3,
            message: "acceptance gate violated".into(),
        })
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synth(a) => synth_cmd(cfg, a),
        Command::Detect(a) => detect_cmd(cfg, a),
        Command::Psd(a) => psd_cmd(a),
        Command::Bench(a) => bench_cmd(cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
