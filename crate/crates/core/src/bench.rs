//! Monte Carlo comparison of REPAC and the fixed-band baseline.
//!
//! Every trial synthesizes one record, runs both detectors on it and scores
//! each detection against the ground truth sample by sample. Seeds are a
//! pure function of `(master_seed, cell, trial)`, so trials can run in any
//! order and the report is reproducible byte for byte.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baseline::{run_baseline, BaselineConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::repac::{run_repac, RepacConfig};
use crate::signal::{interval_mask, Interval, Signal};
use crate::synth::{synthesize, EventCount, GroundTruth, PacParams};

/// Per-sample confusion counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// All samples labeled negative, as for a failed detector run.
    pub fn all_negative(truth: &GroundTruth) -> Self {
        let pos = truth.positive_samples() as u64;
        ConfusionCounts {
            tp: 0,
            fp: 0,
            tn: truth.len as u64 - pos,
            fn_: pos,
        }
    }

    /// `accuracy >= specificity·(tn+fp)/total`, which holds for any counts.
    pub fn accuracy_bound_holds(&self) -> bool {
        let m = metrics(self);
        match (m.accuracy, m.specificity) {
            (Some(acc), Some(spec)) => {
                acc + 1e-12 >= spec * (self.tn + self.fp) as f64 / self.total() as f64
            }
            _ => true,
        }
    }
}

impl std::ops::AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.tn += o.tn;
        self.fn_ += o.fn_;
    }
}

/// Sample-wise comparison of truth labels with detected-interval membership.
pub fn score(truth: &GroundTruth, detected: &[Interval]) -> Result<ConfusionCounts> {
    if let Some(bad) = detected
        .iter()
        .find(|iv| iv.end > truth.len || iv.start > iv.end)
    {
        return Err(Error::param(
            "detected",
            format!(
                "interval [{}, {}) outside record of {}",
                bad.start, bad.end, truth.len
            ),
        ));
    }
    let labels = truth.labels();
    let hits = interval_mask(detected, truth.len);
    let mut c = ConfusionCounts::default();
    for (&l, &d) in labels.iter().zip(&hits) {
        match (l, d) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Rates derived from counts; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &ConfusionCounts) -> Metrics {
    Metrics {
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        accuracy: ratio(c.tp + c.tn, c.total()),
    }
}

/// How a carrier frequency is chosen per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FreqPolicy {
    Fixed { hz: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl FreqPolicy {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            FreqPolicy::Fixed { hz } => hz,
            FreqPolicy::Uniform { lo, hi } => rng.random_range(lo..=hi),
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            FreqPolicy::Fixed { hz } => (hz, hz),
            FreqPolicy::Uniform { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Repac,
    Baseline,
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::Repac => "repac",
            Detector::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Sensitivity,
    Specificity,
    Accuracy,
}

impl Metric {
    fn of(self, m: &Metrics) -> Option<f64> {
        match self {
            Metric::Sensitivity => m.sensitivity,
            Metric::Specificity => m.specificity,
            Metric::Accuracy => m.accuracy,
        }
    }
}

/// A pass/fail condition on the pooled metrics of the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Min {
        detector: Detector,
        metric: Metric,
        value: f64,
    },
    Max {
        detector: Detector,
        metric: Metric,
        value: f64,
    },
    /// `repac - baseline >= value` for the metric.
    Gap { metric: Metric, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub gate: Gate,
    pub observed: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchGrid {
    pub snr_values: Vec<f64>,
    pub m_values: Vec<f64>,
    pub l_values: Vec<f64>,
    pub f_l: FreqPolicy,
    pub f_h: FreqPolicy,
    pub trials_per_cell: usize,
    pub master_seed: u64,
    pub duration_s: f64,
    pub fs: f64,
    /// Expected fraction of the record covered by events.
    pub event_density: f64,
    pub gates: Vec<Gate>,
    pub execution: Execution,
}

impl Default for BenchGrid {
    fn default() -> Self {
        BenchGrid {
            snr_values: vec![-18.0, -10.0, -5.0, 0.0],
            m_values: vec![0.1, 0.5, 1.0],
            l_values: vec![1.5, 3.0, 5.0],
            f_l: FreqPolicy::Uniform { lo: 4.0, hi: 10.0 },
            f_h: FreqPolicy::Uniform {
                lo: 60.0,
                hi: 100.0,
            },
            trials_per_cell: 20,
            master_seed: 0,
            duration_s: 60.0,
            fs: 1000.0,
            event_density: 0.1,
            gates: Vec::new(),
            execution: Execution::default(),
        }
    }
}

/// One (snr, m, L) combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub snr_db: f64,
    pub m: f64,
    pub event_len_s: f64,
}

impl BenchGrid {
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &snr_db in &self.snr_values {
            for &m in &self.m_values {
                for &event_len_s in &self.l_values {
                    out.push(Cell {
                        snr_db,
                        m,
                        event_len_s,
                    });
                }
            }
        }
        out
    }

    /// Event-count policy for an event length: uniform over half to
    /// one-and-a-half times the count giving `event_density`.
    pub fn event_count(&self, event_len_s: f64) -> EventCount {
        let target = self.event_density * self.duration_s / event_len_s;
        let min = ((0.5 * target).round() as usize).max(1);
        let max = ((1.5 * target).round() as usize).max(min);
        EventCount::Uniform { min, max }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_values.is_empty() || self.m_values.is_empty() || self.l_values.is_empty() {
            return Err(Error::param("grid", "snr, m and L lists must be non-empty"));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::param("trials_per_cell", "must be at least 1"));
        }
        if !(self.event_density > 0.0 && self.event_density < 0.5) {
            return Err(Error::param("event_density", "must lie in (0, 0.5)"));
        }
        for policy in [self.f_l, self.f_h] {
            let (lo, hi) = policy.bounds();
            if !(lo > 0.0 && lo <= hi && hi < self.fs / 2.0) {
                return Err(Error::param(
                    "f_l/f_h",
                    "frequency policy outside (0, fs/2)",
                ));
            }
        }
        // every cell must yield valid synthesis parameters at both frequency extremes
        for cell in self.cells() {
            let mut p = self.params(cell, self.f_l.bounds().0, self.f_h.bounds().1, 0);
            p.validate()?;
            p.f_l = self.f_l.bounds().1;
            p.f_h = self.f_h.bounds().0;
            p.validate()?;
        }
        Ok(())
    }

    fn params(&self, cell: Cell, f_l: f64, f_h: f64, seed: u64) -> PacParams {
        PacParams {
            f_l,
            f_h,
            m: cell.m,
            event_len_s: cell.event_len_s,
            snr_db: cell.snr_db,
            duration_s: self.duration_s,
            fs: self.fs,
            n_events: self.event_count(cell.event_len_s),
            seed,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, a pure function of its coordinates.
pub fn trial_seed(master_seed: u64, cell: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ cell as u64) ^ trial as u64)
}

/// SHA-256 of the little-endian sample bytes.
pub fn record_hash(x: &Signal) -> String {
    let mut h = Sha256::new();
    for v in x.samples() {
        h.update(v.to_le_bytes());
    }
    h.finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorOutcome {
    pub counts: ConfusionCounts,
    pub intervals: usize,
    /// Error message when the detector failed; scored as all negative.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub f_l: f64,
    pub f_h: f64,
    pub n_events: usize,
    pub record_hash: String,
    pub repac: DetectorOutcome,
    pub baseline: DetectorOutcome,
    /// Set when the record itself could not be synthesized.
    pub synth_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

fn spread(values: impl Iterator<Item = Option<f64>>) -> Spread {
    let v: Vec<f64> = values.flatten().collect();
    if v.is_empty() {
        return Spread {
            mean: None,
            sd: None,
        };
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.len() > 1)
        .then(|| (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    Spread {
        mean: Some(mean),
        sd,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSummary {
    pub detector: Detector,
    pub counts: ConfusionCounts,
    pub pooled: Metrics,
    pub sensitivity: Spread,
    pub specificity: Spread,
    pub accuracy: Spread,
    pub failures: usize,
}

fn summarize(detector: Detector, outcomes: &[&DetectorOutcome]) -> DetectorSummary {
    let mut counts = ConfusionCounts::default();
    for o in outcomes {
        counts += o.counts;
    }
    let per: Vec<Metrics> = outcomes.iter().map(|o| metrics(&o.counts)).collect();
    DetectorSummary {
        detector,
        counts,
        pooled: metrics(&counts),
        sensitivity: spread(per.iter().map(|m| m.sensitivity)),
        specificity: spread(per.iter().map(|m| m.specificity)),
        accuracy: spread(per.iter().map(|m| m.accuracy)),
        failures: outcomes.iter().filter(|o| o.error.is_some()).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: Cell,
    pub trials: usize,
    pub repac: DetectorSummary,
    pub baseline: DetectorSummary,
}

/// Configuration echo stored with every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfigEcho {
    pub grid: BenchGrid,
    pub repac: RepacConfig,
    pub baseline: BaselineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfigEcho,
    pub cells: Vec<CellReport>,
    pub overall_repac: DetectorSummary,
    pub overall_baseline: DetectorSummary,
    pub gates: Vec<GateOutcome>,
    pub trials: Vec<TrialRecord>,
}

impl BenchReport {
    pub fn gates_passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    /// One row per cell per detector.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "snr_db,m,event_len_s,detector,sensitivity,specificity,accuracy,\
             sensitivity_mean,sensitivity_sd,specificity_mean,specificity_sd,\
             trials,failures,tp,fp,tn,fn\n",
        );
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for c in &self.cells {
            for s in [&c.repac, &c.baseline] {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    c.cell.snr_db,
                    c.cell.m,
                    c.cell.event_len_s,
                    s.detector.name(),
                    opt(s.pooled.sensitivity),
                    opt(s.pooled.specificity),
                    opt(s.pooled.accuracy),
                    opt(s.sensitivity.mean),
                    opt(s.sensitivity.sd),
                    opt(s.specificity.mean),
                    opt(s.specificity.sd),
                    c.trials,
                    s.failures,
                    s.counts.tp,
                    s.counts.fp,
                    s.counts.tn,
                    s.counts.fn_,
                );
            }
        }
        out
    }
}

fn evaluate_gate(gate: Gate, repac: &Metrics, baseline: &Metrics) -> GateOutcome {
    let pick = |d: Detector| {
        if d == Detector::Repac {
            repac
        } else {
            baseline
        }
    };
    let (observed, passed) = match gate {
        Gate::Min {
            detector,
            metric,
            value,
        } => {
            let o = metric.of(pick(detector));
            (o, o.is_some_and(|v| v >= value))
        }
        Gate::Max {
            detector,
            metric,
            value,
        } => {
            let o = metric.of(pick(detector));
            (o, o.is_some_and(|v| v <= value))
        }
        Gate::Gap { metric, value } => {
            let o = metric
                .of(repac)
                .zip(metric.of(baseline))
                .map(|(r, b)| r - b);
            (o, o.is_some_and(|v| v >= value))
        }
    };
    GateOutcome {
        gate,
        observed,
        passed,
    }
}

fn run_detector<T>(
    truth: &GroundTruth,
    result: Result<T>,
    intervals: impl Fn(&T) -> &[Interval],
) -> DetectorOutcome {
    let scored = result.and_then(|r| {
        let iv = intervals(&r);
        score(truth, iv).map(|c| (c, iv.len()))
    });
    match scored {
        Ok((counts, n)) => DetectorOutcome {
            counts,
            intervals: n,
            error: None,
        },
        Err(e) => DetectorOutcome {
            counts: ConfusionCounts::all_negative(truth),
            intervals: 0,
            error: Some(e.to_string()),
        },
    }
}

/// Run one trial. Never fails: detector errors are scored as no detection.
pub fn run_trial(
    grid: &BenchGrid,
    cell_index: usize,
    cell: Cell,
    trial: usize,
    repac_cfg: &RepacConfig,
    baseline_cfg: &BaselineConfig,
) -> TrialRecord {
    let seed = trial_seed(grid.master_seed, cell_index, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f_l = grid.f_l.draw(&mut rng);
    let f_h = grid.f_h.draw(&mut rng);
    let params = grid.params(cell, f_l, f_h, seed);
    let failed = |msg: String| DetectorOutcome {
        counts: ConfusionCounts::default(),
        intervals: 0,
        error: Some(msg),
    };
    let rec = match synthesize(&params) {
        Ok(r) => r,
        Err(e) => {
            return TrialRecord {
                cell: cell_index,
                trial,
                seed,
                f_l,
                f_h,
                n_events: 0,
                record_hash: String::new(),
                repac: failed(e.to_string()),
                baseline: failed(e.to_string()),
                synth_error: Some(e.to_string()),
            }
        }
    };
    let mut bcfg = baseline_cfg.clone();
    bcfg.seed = splitmix64(seed ^ baseline_cfg.seed);
    let repac = run_detector(&rec.truth, run_repac(&rec.signal, repac_cfg), |r| {
        &r.pac_intervals
    });
    let baseline = run_detector(&rec.truth, run_baseline(&rec.signal, &bcfg), |r| {
        &r.pac_intervals
    });
    TrialRecord {
        cell: cell_index,
        trial,
        seed,
        f_l,
        f_h,
        n_events: rec.truth.event_intervals.len(),
        record_hash: record_hash(&rec.signal),
        repac,
        baseline,
        synth_error: None,
    }
}

pub fn monte_carlo(
    grid: &BenchGrid,
    repac_cfg: &RepacConfig,
    baseline_cfg: &BaselineConfig,
) -> Result<BenchReport> {
    monte_carlo_with_progress(grid, repac_cfg, baseline_cfg, |_, _| {})
}

/// As [`monte_carlo`], calling `progress(index, cell_report)` after each cell.
pub fn monte_carlo_with_progress(
    grid: &BenchGrid,
    repac_cfg: &RepacConfig,
    baseline_cfg: &BaselineConfig,
    mut progress: impl FnMut(usize, &CellReport),
) -> Result<BenchReport> {
    grid.validate()?;
    repac_cfg.validate(grid.fs)?;
    baseline_cfg.validate(grid.fs)?;
    // detectors run inside trial tasks; keep their own work sequential
    let mut rcfg = repac_cfg.clone();
    let mut bcfg = baseline_cfg.clone();
    if grid.execution.is_parallel() {
        rcfg.execution = Execution::Sequential;
        bcfg.execution = Execution::Sequential;
    }

    let mut cells = Vec::new();
    let mut trials = Vec::new();
    for (ci, cell) in grid.cells().into_iter().enumerate() {
        let recs = exec::map_indexed(grid.trials_per_cell, grid.execution, |t| {
            run_trial(grid, ci, cell, t, &rcfg, &bcfg)
        });
        let report = CellReport {
            cell,
            trials: recs.len(),
            repac: summarize(
                Detector::Repac,
                &recs.iter().map(|r| &r.repac).collect::<Vec<_>>(),
            ),
            baseline: summarize(
                Detector::Baseline,
                &recs.iter().map(|r| &r.baseline).collect::<Vec<_>>(),
            ),
        };
        progress(ci, &report);
        cells.push(report);
        trials.extend(recs);
    }

    let overall_repac = summarize(
        Detector::Repac,
        &trials.iter().map(|r| &r.repac).collect::<Vec<_>>(),
    );
    let overall_baseline = summarize(
        Detector::Baseline,
        &trials.iter().map(|r| &r.baseline).collect::<Vec<_>>(),
    );
    let gates = grid
        .gates
        .iter()
        .map(|&g| evaluate_gate(g, &overall_repac.pooled, &overall_baseline.pooled))
        .collect();
    Ok(BenchReport {
        config: BenchConfigEcho {
            grid: grid.clone(),
            repac: repac_cfg.clone(),
            baseline: baseline_cfg.clone(),
        },
        cells,
        overall_repac,
        overall_baseline,
        gates,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(intervals: &[(usize, usize)], len: usize) -> GroundTruth {
        GroundTruth {
            event_intervals: intervals
                .iter()
                .map(|&(a, b)| Interval::new(a, b))
                .collect(),
            len,
        }
    }

    #[test]
    fn partial_overlap_counts() {
        let c = score(&truth(&[(100, 200)], 1000), &[Interval::new(150, 250)]).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 50,
                fp: 50,
                tn: 850,
                fn_: 50
            }
        );
    }

    #[test]
    fn exact_and_empty_detection() {
        let t = truth(&[(10, 40), (70, 90)], 100);
        let c = score(&t, &t.event_intervals).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let c = score(&t, &[]).unwrap();
        assert_eq!((c.tp, c.fn_), (0, 50));
        assert!(score(&t, &[Interval::new(90, 101)]).is_err());
    }

    #[test]
    fn metric_arithmetic() {
        let m = metrics(&ConfusionCounts {
            tp: 50,
            fp: 0,
            tn: 850,
            fn_: 50,
        });
        assert_eq!(m.sensitivity, Some(0.5));
        assert_eq!(m.specificity, Some(1.0));
        let m = metrics(&ConfusionCounts {
            tp: 65,
            fp: 10,
            tn: 990,
            fn_: 35,
        });
        assert!((m.sensitivity.unwrap() - 0.65).abs() < 1e-12);
        assert!((m.specificity.unwrap() - 0.99).abs() < 1e-12);
        assert!((m.accuracy.unwrap() - 1055.0 / 1100.0).abs() < 1e-12);
        assert_eq!(
            metrics(&ConfusionCounts {
                tp: 0,
                fp: 3,
                tn: 7,
                fn_: 0
            })
            .sensitivity,
            None
        );
    }

    #[test]
    fn seeds_differ_by_coordinate() {
        let a = trial_seed(42, 0, 0);
        assert_ne!(a, trial_seed(42, 0, 1));
        assert_ne!(a, trial_seed(42, 1, 0));
        assert_ne!(a, trial_seed(43, 0, 0));
        assert_eq!(a, trial_seed(42, 0, 0));
    }

    #[test]
    fn zero_trials_rejected() {
        let g = BenchGrid {
            trials_per_cell: 0,
            ..BenchGrid::default()
        };
        assert!(g.validate().is_err());
        assert!(BenchGrid::default().validate().is_ok());
    }

    #[test]
    fn event_count_policy() {
        let g = BenchGrid::default();
        assert_eq!(g.event_count(1.5), EventCount::Uniform { min: 2, max: 6 });
        assert_eq!(g.event_count(5.0), EventCount::Uniform { min: 1, max: 2 });
    }

    #[test]
    fn gate_evaluation() {
        let r = Metrics {
            sensitivity: Some(0.6),
            specificity: Some(0.99),
            accuracy: Some(0.95),
        };
        let b = Metrics {
            sensitivity: Some(0.2),
            specificity: Some(0.98),
            accuracy: Some(0.9),
        };
        let g = |gate| evaluate_gate(gate, &r, &b).passed;
        assert!(g(Gate::Gap {
            metric: Metric::Sensitivity,
            value: 0.2
        }));
        assert!(!g(Gate::Gap {
            metric: Metric::Sensitivity,
            value: 0.5
        }));
        assert!(g(Gate::Min {
            detector: Detector::Baseline,
            metric: Metric::Specificity,
            value: 0.95
        }));
        assert!(!g(Gate::Max {
            detector: Detector::Repac,
            metric: Metric::Accuracy,
            value: 0.9
        }));
    }
}
