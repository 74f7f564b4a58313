//! The `relaxbp` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Preset};
use crate::detectors::DetectorSpec;
use crate::error::{Error, Result};
use crate::metrics::{complexity_counts, ComplexityKind, ComplexityParams, OpCounts};
use crate::simulator::{records_to_csv, run_sweep, SweepRecord};

pub const WORKERS_ENV: &str = "RELAXBP_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "relaxbp", version, about = "MIMO detection by relaxed belief propagation")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bit error rate against SNR for every configured detector.
    BerSweep(SweepArgs),
    /// Like ber-sweep, also recording the average mutual information.
    AmiSweep(SweepArgs),
    /// BER against iteration count 1..=L at each SNR point.
    Convergence(SweepArgs),
    /// Operation counts per channel use.
    Complexity(ComplexityArgs),
    /// Check the detectors against independent reference computations.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// Experiment file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start from a named setup: fig3, fig5, fig6, fig7, fig8.
    #[arg(long)]
    pub preset: Option<String>,
    /// Detector such as `SBP`, `RBP(1,0)` or `MMSE-RBP(0,0)`; repeatable,
    /// replaces the configured list.
    #[arg(long = "detector")]
    pub detectors: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Iteration count of every iterative detector.
    #[arg(long)]
    pub l: Option<usize>,
    /// Relaxation coefficient rd1 of every relaxed detector.
    #[arg(long)]
    pub rd1: Option<usize>,
    /// Relaxation coefficient rd2 of every relaxed detector.
    #[arg(long)]
    pub rd2: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_max: Option<f64>,
    #[arg(long)]
    pub snr_step: Option<f64>,
    #[arg(long)]
    pub errors_target: Option<u64>,
    #[arg(long)]
    pub bits_max: Option<u64>,
    /// Leave the wall_seconds column empty for byte-reproducible output.
    #[arg(long)]
    pub no_timing: bool,
    /// Suppress per-point progress on standard error.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long, default_value_t = 4)]
    pub nt: u64,
    #[arg(long, default_value_t = 4)]
    pub nr: u64,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long, default_value_t = 5)]
    pub l: u64,
    /// Single rd1 value; every value 0..nt when absent.
    #[arg(long)]
    pub rd1: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub rd2: u64,
    /// Emit CSV instead of an aligned table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

impl SweepArgs {
    /// Defaults, then preset, then file, then flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.preset {
            Some(name) => name.parse::<Preset>()?.config(),
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg = ExperimentConfig::load(path)?;
        }
        if let Some(v) = self.nt {
            cfg.system.nt = v;
        }
        if let Some(v) = self.nr {
            cfg.system.nr = v;
        }
        if let Some(v) = self.m {
            cfg.system.m = v;
        }
        if let Some(v) = self.seed {
            cfg.sweep.seed = v;
        }
        if let Some(v) = self.snr_min {
            cfg.sweep.snr_min = v;
        }
        if let Some(v) = self.snr_max {
            cfg.sweep.snr_max = v;
        }
        if let Some(v) = self.snr_step {
            cfg.sweep.snr_step = v;
        }
        if let Some(v) = self.errors_target {
            cfg.sweep.errors_target = v;
        }
        if let Some(v) = self.bits_max {
            cfg.sweep.bits_max = v;
        }
        if !self.detectors.is_empty() {
            let specs = self
                .detectors
                .iter()
                .map(|d| d.parse())
                .collect::<Result<Vec<DetectorSpec>>>()?;
            cfg.set_detectors(&specs);
        }
        let mut specs = cfg.detectors()?;
        for spec in &mut specs {
            if spec.kind.is_iterative() {
                if let Some(l) = self.l {
                    spec.iterations = l;
                }
            }
            if spec.kind.is_relaxed() {
                if let Some(v) = self.rd1 {
                    spec.rd1 = v;
                }
                if let Some(v) = self.rd2 {
                    spec.rd2 = v;
                }
            }
        }
        cfg.set_detectors(&specs);
        if cfg.detector.is_empty() {
            return Err(Error::InvalidParameter("no detectors configured".into()));
        }
        Ok(cfg)
    }
}

/// Table-I style rows for one parameter point.
pub fn complexity_table(args: &ComplexityArgs) -> Vec<(String, OpCounts)> {
    let rd1_values: Vec<u64> = match args.rd1 {
        Some(v) => vec![v],
        None => (0..args.nt).collect(),
    };
    let params = |rd1, rd2| ComplexityParams {
        n_tx: args.nt,
        n_rx: args.nr,
        bits_per_symbol: args.m,
        iterations: args.l,
        rd1,
        rd2,
    };
    let mut rows = Vec::new();
    for kind in ComplexityKind::ALL {
        if kind.uses_rd() {
            for &rd1 in &rd1_values {
                let label = match kind {
                    ComplexityKind::Eb => format!("EB(rd1={rd1})"),
                    _ => format!("{kind}({rd1},{})", args.rd2),
                };
                rows.push((label, complexity_counts(kind, params(rd1, args.rd2))));
            }
        } else {
            let label = match kind {
                // Distinct from the general row evaluated at rd1 = 0.
                ComplexityKind::Rbp00 => "RBP(0,0)-special".to_string(),
                _ => kind.to_string(),
            };
            rows.push((label, complexity_counts(kind, params(0, 0))));
        }
    }
    rows
}

fn render_complexity(args: &ComplexityArgs) -> String {
    let rows = complexity_table(args);
    let mut out = String::new();
    if args.csv {
        out.push_str("algorithm,multiplications,additions,comparisons\n");
        for (label, c) in rows {
            out.push_str(&format!("{label},{},{},{}\n", c.multiplications, c.additions, c.comparisons));
        }
    } else {
        out.push_str(&format!(
            "# operations per channel use, nt={} nr={} m={} L={}\n",
            args.nt, args.nr, args.m, args.l
        ));
        out.push_str(&format!(
            "{:<16} {:>16} {:>16} {:>16}\n",
            "algorithm", "multiplications", "additions", "comparisons"
        ));
        for (label, c) in rows {
            out.push_str(&format!(
                "{label:<16} {:>16} {:>16} {:>16}\n",
                c.multiplications, c.additions, c.comparisons
            ));
        }
    }
    out
}

fn validate_complexity(args: &ComplexityArgs) -> Result<()> {
    if args.nt == 0 || args.nr == 0 || !matches!(args.m, 1 | 2) {
        return Err(Error::InvalidParameter("need nt, nr >= 1 and m in {1, 2}".into()));
    }
    if args.m * args.nt > 40 {
        return Err(Error::InvalidParameter("m * nt above 40 overflows the counters".into()));
    }
    if args.rd1.is_some_and(|v| v >= args.nt) || args.rd2 > 1 {
        return Err(Error::InvalidParameter("need rd1 < nt and rd2 in {0, 1}".into()));
    }
    Ok(())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::IoFailure {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::IoFailure {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

enum SweepMode {
    Ber,
    Ami,
    Convergence,
}

fn run_sweep_command(args: &SweepArgs, mode: SweepMode) -> Result<i32> {
    let mut exp = args.resolve()?;
    if matches!(mode, SweepMode::Ami) {
        exp.sweep.record_ami = true;
    }
    eprintln!("# resolved configuration\n{}", exp.to_toml());
    let mut cfg = exp.to_sweep_config(args.workers.unwrap_or(0))?;
    cfg.record_convergence = matches!(mode, SweepMode::Convergence);
    cfg.progress = !args.quiet;
    let report = run_sweep(&cfg)?;
    let records: Vec<SweepRecord> = report.records;
    emit(args.out.as_ref(), &records_to_csv(&records, !args.no_timing))?;
    for failure in &report.failures {
        eprintln!("error: {} at {} dB: {}", failure.detector, failure.snr_db, failure.error);
    }
    Ok(if report.failures.is_empty() { 0 } else { 1 })
}

fn run_selftest(args: &SelftestArgs) -> Result<i32> {
    let mut ok = true;
    for check in crate::selftest::run_all(args.seed)? {
        println!(
            "{} {:<36} instances={:<5} worst_rel_gap={:.3e}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.instances,
            check.worst
        );
        ok &= check.passed;
    }
    Ok(if ok { 0 } else { 1 })
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Exit status is 2 for usage errors, 1 for runtime failures and 0 otherwise.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::BerSweep(a) => run_sweep_command(a, SweepMode::Ber),
        Command::AmiSweep(a) => run_sweep_command(a, SweepMode::Ami),
        Command::Convergence(a) => run_sweep_command(a, SweepMode::Convergence),
        Command::Complexity(a) => validate_complexity(a).and_then(|_| emit(None, &render_complexity(a)).map(|_| 0)),
        Command::Selftest(a) => run_selftest(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e @ (Error::Parse(_) | Error::InvalidParameter(_))) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
