//! Average mutual information of the soft outputs over SNR.

use relaxbp::channel::SystemDims;
use relaxbp::detectors::DetectorSpec;
use relaxbp::simulator::{run_sweep, SweepConfig};

fn main() -> relaxbp::Result<()> {
    let specs = vec![
        DetectorSpec::sbp(5),
        DetectorSpec::rbp(1, 0, 5),
        DetectorSpec::rbp(0, 0, 5),
        DetectorSpec::mmse_rbp(0, 0, 5),
    ];
    let snrs: Vec<f64> = (0..=6).map(|k| 2.0 * k as f64).collect();
    let cfg = SweepConfig {
        dims: SystemDims::new(4, 4, 1)?,
        snr_points_db: snrs.clone(),
        detectors: specs.clone(),
        trials_min: 4_000,
        errors_target: 0,
        record_ami: true,
        ..SweepConfig::default()
    };
    let report = run_sweep(&cfg)?;

    print!("{:>6}", "SNR");
    for spec in &specs {
        print!(" {:>14}", spec.label());
    }
    println!();
    for (k, snr) in snrs.iter().enumerate() {
        print!("{snr:>6}");
        for d in 0..specs.len() {
            print!(" {:>14.5}", report.records[d * snrs.len() + k].ami.unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
