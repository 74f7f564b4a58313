//! Monte Carlo BER / AMI engine.
//!
//! Every trial is one channel use with a fresh channel, fresh bits and fresh
//! noise. Trial `t` at a given SNR draws from its own keyed ChaCha stream, so
//! a point is a pure function of the configuration: the worker count only
//! changes how fast it is computed. All detectors at the same SNR see the
//! same sequence of channel uses.
//!
//! Trials run in batches of growing size and the stopping rule is checked
//! only between batches, which keeps early stopping deterministic too.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::channel::{simulate_channel_use, snr_to_noise_variance, trial_rng, NoiseSpec, SystemDims};
use crate::detectors::{detect, detect_recording, DetectorSpec, Observation};
use crate::error::{Error, Result};
use crate::metrics::{ami_term, BerAccumulator};

const FIRST_BATCH: u64 = 256;
const MAX_BATCH: u64 = 16_384;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dims: SystemDims,
    pub snr_points_db: Vec<f64>,
    pub detectors: Vec<DetectorSpec>,
    pub trials_min: u64,
    /// A point stops once it has seen this many bit errors.
    pub errors_target: u64,
    /// Hard cap on simulated bits per point.
    pub bits_max: u64,
    pub master_seed: u64,
    pub record_ami: bool,
    /// Report every iteration count `1..=L` of iterative detectors.
    pub record_convergence: bool,
    /// Worker threads; `0` uses every available core.
    pub workers: usize,
    /// Print one line per finished point on stderr.
    pub progress: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dims: SystemDims {
                n_tx: 4,
                n_rx: 4,
                bits_per_symbol: 1,
            },
            snr_points_db: vec![0.0],
            detectors: Vec::new(),
            trials_min: 1,
            errors_target: 500,
            bits_max: 100_000_000,
            master_seed: 1,
            record_ami: false,
            record_convergence: false,
            workers: 0,
            progress: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        if self.trials_min == 0 {
            return Err(Error::InvalidParameter("trials_min must be at least 1".into()));
        }
        if self.snr_points_db.is_empty() {
            return Err(Error::InvalidParameter("no SNR points".into()));
        }
        if let Some(snr) = self.snr_points_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("SNR point {snr}")));
        }
        for d in &self.detectors {
            d.validate(self.dims.n_tx)?;
        }
        Ok(())
    }
}

/// One row of sweep output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub detector: String,
    pub rd1: Option<usize>,
    pub rd2: Option<usize>,
    pub iterations: usize,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ber_ci_low: f64,
    pub ber_ci_high: f64,
    pub ami: Option<f64>,
    pub wall_seconds: f64,
}

impl SweepRecord {
    fn new(spec: &DetectorSpec, iterations: usize, snr_db: f64, acc: BerAccumulator, ami: Option<f64>, wall_seconds: f64) -> Self {
        let (lo, hi) = acc.wilson_interval();
        let relaxed = spec.kind.is_relaxed();
        Self {
            detector: spec.kind.name().to_string(),
            rd1: relaxed.then_some(spec.rd1),
            rd2: relaxed.then_some(spec.rd2),
            iterations,
            snr_db,
            bits: acc.bits_total,
            errors: acc.bit_errors,
            ber: acc.ber(),
            ber_ci_low: lo,
            ber_ci_high: hi,
            ami,
            wall_seconds,
        }
    }

    /// `SBP`, `RBP(1,0)`, ...
    pub fn label(&self) -> String {
        match (self.rd1, self.rd2) {
            (Some(a), Some(b)) => format!("{}({a},{b})", self.detector),
            _ => self.detector.clone(),
        }
    }

    /// True when the 95% intervals of the two estimates intersect.
    pub fn ci_overlaps(&self, other: &SweepRecord) -> bool {
        self.ber_ci_low <= other.ber_ci_high && other.ber_ci_low <= self.ber_ci_high
    }
}

/// A finished point together with its stopping metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub record: SweepRecord,
    pub trials: u64,
    /// The bit budget ran out before the error target was reached.
    pub budget_exhausted: bool,
}

#[derive(Debug)]
pub struct PointFailure {
    pub detector: String,
    pub snr_db: f64,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    /// Indices into `records` of points that hit `bits_max` first.
    pub budget_exhausted: Vec<usize>,
    pub failures: Vec<PointFailure>,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialStats {
    acc: BerAccumulator,
    ami_sum: f64,
}

impl TrialStats {
    fn merge(&mut self, other: &TrialStats) {
        self.acc = self.acc.merge(other.acc);
        self.ami_sum += other.ami_sum;
    }
}

/// Per-point trial scheduler shared by the plain and convergence paths.
struct Engine {
    pool: Option<rayon::ThreadPool>,
}

impl Engine {
    fn new(workers: usize) -> Result<Self> {
        if workers == 1 {
            return Ok(Self { pool: None });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    /// Runs `trial` over `range` and returns outcomes in trial order.
    fn run_batch<T, F>(&self, range: std::ops::Range<u64>, trial: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
    {
        match &self.pool {
            None => range.map(trial).collect(),
            Some(pool) => pool.install(|| range.into_par_iter().map(&trial).collect()),
        }
    }

    /// Batches trials until `done` says stop or the bit budget runs out.
    ///
    /// Returns the number of trials run and whether the budget stopped it.
    fn drive<T, F, M>(&self, cfg: &SweepConfig, trial: F, mut merge: M, done: impl Fn() -> bool) -> Result<(u64, bool)>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
        M: FnMut(&T),
    {
        let bits_per_trial = cfg.dims.n_bits() as u64;
        let mut trials = 0u64;
        let mut batch = FIRST_BATCH;
        loop {
            if trials >= cfg.trials_min && done() {
                return Ok((trials, false));
            }
            let affordable = cfg.bits_max.saturating_sub(trials * bits_per_trial) / bits_per_trial;
            if affordable == 0 {
                return Ok((trials, !done()));
            }
            let n = batch.min(affordable);
            for outcome in self.run_batch(trials..trials + n, &trial)? {
                merge(&outcome);
            }
            trials += n;
            batch = (batch * 2).min(MAX_BATCH);
        }
    }
}

fn noise_for(cfg: &SweepConfig, snr_db: f64) -> NoiseSpec {
    snr_to_noise_variance(snr_db, cfg.dims)
}

fn observe(cfg: &SweepConfig, noise: NoiseSpec, snr_db: f64, trial: u64) -> Result<(crate::channel::BitVector, Observation)> {
    let mut rng = trial_rng(cfg.master_seed, snr_db.to_bits(), trial);
    let cu = simulate_channel_use(cfg.dims, noise, &mut rng)?;
    let obs = Observation::new(cu.channel, cu.received, noise.variance, cfg.dims.bits_per_symbol)?;
    Ok((cu.bits, obs))
}

fn reports_ami(cfg: &SweepConfig, spec: &DetectorSpec) -> bool {
    cfg.record_ami && spec.kind != crate::detectors::DetectorKind::Ml
}

fn point_stats(cfg: &SweepConfig, spec: &DetectorSpec, noise: NoiseSpec, snr_db: f64, trial: u64) -> Result<TrialStats> {
    let (bits, obs) = observe(cfg, noise, snr_db, trial)?;
    let result = detect(spec, &obs)?;
    let acc = BerAccumulator::default().accumulate(&bits, &result.hard_bits)?;
    let ami_sum = if reports_ami(cfg, spec) {
        result
            .soft_llrs
            .iter()
            .enumerate()
            .map(|(i, &l)| ami_term(l, bits.get(i)))
            .sum()
    } else {
        0.0
    };
    Ok(TrialStats { acc, ami_sum })
}

fn run_point_with(engine: &Engine, cfg: &SweepConfig, spec: &DetectorSpec, snr_db: f64) -> Result<PointResult> {
    spec.validate(cfg.dims.n_tx)?;
    let start = Instant::now();
    let noise = noise_for(cfg, snr_db);
    let total = std::cell::Cell::new(TrialStats::default());
    let (trials, budget_exhausted) = engine.drive(
        cfg,
        |t| point_stats(cfg, spec, noise, snr_db, t),
        |s: &TrialStats| {
            let mut acc = total.get();
            acc.merge(s);
            total.set(acc);
        },
        || total.get().acc.bit_errors >= cfg.errors_target,
    )?;
    let total = total.get();
    let ami = reports_ami(cfg, spec).then(|| {
        if total.acc.bits_total == 0 {
            0.0
        } else {
            total.ami_sum / total.acc.bits_total as f64
        }
    });
    let record = SweepRecord::new(spec, spec.iterations, snr_db, total.acc, ami, start.elapsed().as_secs_f64());
    if cfg.progress {
        eprintln!(
            "{:<14} L={:<2} snr={:>6.2} dB  errors={:>7} bits={:>11} ber={:.3e}{}",
            record.label(),
            record.iterations,
            snr_db,
            record.errors,
            record.bits,
            record.ber,
            if budget_exhausted { "  (bit budget exhausted)" } else { "" }
        );
    }
    Ok(PointResult {
        record,
        trials,
        budget_exhausted,
    })
}

/// Simulates one detector at one SNR.
pub fn run_point(cfg: &SweepConfig, spec: &DetectorSpec, snr_db: f64) -> Result<PointResult> {
    cfg.validate()?;
    run_point_with(&Engine::new(cfg.workers)?, cfg, spec, snr_db)
}

fn convergence_with(engine: &Engine, cfg: &SweepConfig, spec: &DetectorSpec, snr_db: f64) -> Result<Vec<PointResult>> {
    spec.validate(cfg.dims.n_tx)?;
    if !spec.kind.is_iterative() || spec.iterations == 0 {
        return Err(Error::InvalidParameter(format!(
            "convergence needs an iterative detector with L >= 1, got {spec}"
        )));
    }
    let start = Instant::now();
    let noise = noise_for(cfg, snr_db);
    let levels = spec.iterations;
    let totals = std::cell::RefCell::new(vec![TrialStats::default(); levels]);
    let trial = |t: u64| -> Result<Vec<TrialStats>> {
        let (bits, obs) = observe(cfg, noise, snr_db, t)?;
        let result = detect_recording(spec, &obs)?;
        let history = result.per_iteration_soft.unwrap_or_default();
        history
            .iter()
            .map(|soft| {
                let decided = crate::channel::BitVector::from_llrs(soft);
                let acc = BerAccumulator::default().accumulate(&bits, &decided)?;
                let ami_sum = if cfg.record_ami {
                    soft.iter().enumerate().map(|(i, &l)| ami_term(l, bits.get(i))).sum()
                } else {
                    0.0
                };
                Ok(TrialStats { acc, ami_sum })
            })
            .collect()
    };
    let (trials, budget_exhausted) = engine.drive(
        cfg,
        trial,
        |stats: &Vec<TrialStats>| {
            for (tot, s) in totals.borrow_mut().iter_mut().zip(stats) {
                tot.merge(s);
            }
        },
        || totals.borrow().iter().all(|s| s.acc.bit_errors >= cfg.errors_target),
    )?;
    let wall = start.elapsed().as_secs_f64();
    let totals = totals.into_inner();
    Ok(totals
        .iter()
        .enumerate()
        .map(|(l, s)| {
            let ami = cfg.record_ami.then(|| s.ami_sum / s.acc.bits_total.max(1) as f64);
            let record = SweepRecord::new(spec, l + 1, snr_db, s.acc, ami, wall);
            if cfg.progress {
                eprintln!(
                    "{:<14} L={:<2} snr={:>6.2} dB  errors={:>7} bits={:>11} ber={:.3e}",
                    record.label(),
                    l + 1,
                    snr_db,
                    record.errors,
                    record.bits,
                    record.ber
                );
            }
            PointResult {
                record,
                trials,
                budget_exhausted: budget_exhausted && s.acc.bit_errors < cfg.errors_target,
            }
        })
        .collect())
}

/// BER at every iteration count `1..=spec.iterations`, from one set of runs.
///
/// The iterate after `l` steps is the output of the same detector configured
/// with `L = l`, so the per-iteration history of a single run covers the whole
/// curve. The point stops once every iteration count has met the error target.
pub fn run_convergence(cfg: &SweepConfig, spec: &DetectorSpec, snr_db: f64) -> Result<Vec<PointResult>> {
    cfg.validate()?;
    convergence_with(&Engine::new(cfg.workers)?, cfg, spec, snr_db)
}

/// Runs every detector at every SNR point, detector-major.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let engine = Engine::new(cfg.workers)?;
    let mut report = SweepReport::default();
    for spec in &cfg.detectors {
        for &snr_db in &cfg.snr_points_db {
            let outcome = if cfg.record_convergence && spec.kind.is_iterative() && spec.iterations > 0 {
                convergence_with(&engine, cfg, spec, snr_db)
            } else {
                run_point_with(&engine, cfg, spec, snr_db).map(|p| vec![p])
            };
            match outcome {
                Ok(points) => {
                    for p in points {
                        if p.budget_exhausted {
                            report.budget_exhausted.push(report.records.len());
                        }
                        report.records.push(p.record);
                    }
                }
                Err(error) => report.failures.push(PointFailure {
                    detector: spec.label(),
                    snr_db,
                    error,
                }),
            }
        }
    }
    Ok(report)
}

pub const CSV_HEADER: &str = "detector,rd1,rd2,iterations,snr_db,bits,errors,ber,ber_ci_low,ber_ci_high,ami,wall_seconds";

/// Formats a float with six significant digits, `%g` style.
pub fn format_sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

/// Renders records as CSV. Without `timing` the wall-clock column is left
/// empty so identical runs give identical bytes.
pub fn records_to_csv(records: &[SweepRecord], timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.detector,
            opt(r.rd1),
            opt(r.rd2),
            r.iterations,
            format_sig6(r.snr_db),
            r.bits,
            r.errors,
            format_sig6(r.ber),
            format_sig6(r.ber_ci_low),
            format_sig6(r.ber_ci_high),
            r.ami.map(format_sig6).unwrap_or_default(),
            if timing { format_sig6(r.wall_seconds) } else { String::new() },
        );
    }
    out
}

pub fn write_csv(records: &[SweepRecord], path: &Path, timing: bool) -> Result<()> {
    let io = |source| Error::IoFailure {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(records_to_csv(records, timing).as_bytes()).map_err(io)
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected CSV header {other:?}"))),
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", n + 2));
        if fields.len() != 12 {
            return Err(bad("field count"));
        }
        let opt_usize = |s: &str, what: &str| -> Result<Option<usize>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(what))
            }
        };
        let float = |s: &str, what: &str| -> Result<f64> { s.parse().map_err(|_| bad(what)) };
        records.push(SweepRecord {
            detector: fields[0].to_string(),
            rd1: opt_usize(fields[1], "rd1")?,
            rd2: opt_usize(fields[2], "rd2")?,
            iterations: fields[3].parse().map_err(|_| bad("iterations"))?,
            snr_db: float(fields[4], "snr_db")?,
            bits: fields[5].parse().map_err(|_| bad("bits"))?,
            errors: fields[6].parse().map_err(|_| bad("errors"))?,
            ber: float(fields[7], "ber")?,
            ber_ci_low: float(fields[8], "ber_ci_low")?,
            ber_ci_high: float(fields[9], "ber_ci_high")?,
            ami: if fields[10].is_empty() { None } else { Some(float(fields[10], "ami")?) },
            wall_seconds: if fields[11].is_empty() { 0.0 } else { float(fields[11], "wall_seconds")? },
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::IoFailure {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text)
}
