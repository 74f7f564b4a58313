//! BER and cost of relaxed BP as more interferers are kept on the graph.
//!
//! `cargo run --release --example relaxation_tradeoff -- [snr_db] [errors]`

use relaxbp::channel::SystemDims;
use relaxbp::detectors::{DetectorKind, DetectorSpec};
use relaxbp::metrics::{complexity_counts, ComplexityKind, ComplexityParams};
use relaxbp::simulator::{run_sweep, SweepConfig};

fn main() -> relaxbp::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map_or(12.0, |s| s.parse().expect("snr_db"));
    let errors: u64 = args.next().map_or(200, |s| s.parse().expect("errors"));
    let l = 7;

    let mut specs: Vec<DetectorSpec> = (0..3).map(|rd1| DetectorSpec::rbp(rd1, 0, l)).collect();
    specs.push(DetectorSpec::sbp(l));
    let cfg = SweepConfig {
        dims: SystemDims::new(4, 4, 1)?,
        snr_points_db: vec![snr_db],
        detectors: specs.clone(),
        errors_target: errors,
        ..SweepConfig::default()
    };
    let report = run_sweep(&cfg)?;

    println!("{:<10} {:>10} {:>22} {:>8} {:>8}", "detector", "BER", "95% CI", "mults", "adds");
    for (spec, r) in specs.iter().zip(&report.records) {
        let (kind, rd1, rd2) = match spec.kind {
            DetectorKind::Sbp => (ComplexityKind::Sbp, 0, 0),
            _ => (ComplexityKind::Rbp, spec.rd1 as u64, spec.rd2 as u64),
        };
        let ops = complexity_counts(
            kind,
            ComplexityParams {
                n_tx: 4,
                n_rx: 4,
                bits_per_symbol: 1,
                iterations: l as u64,
                rd1,
                rd2,
            },
        );
        println!(
            "{:<10} {:>10.3e} [{:.2e}, {:.2e}] {:>8} {:>8}",
            r.label(),
            r.ber,
            r.ber_ci_low,
            r.ber_ci_high,
            ops.multiplications,
            ops.additions
        );
    }
    Ok(())
}
