//! RBP(0,0) with and without the MMSE starting point, against MMSE and
//! MMSE-SIC, over an SNR grid.

use relaxbp::channel::SystemDims;
use relaxbp::detectors::DetectorSpec;
use relaxbp::simulator::{run_sweep, SweepConfig};

fn main() -> relaxbp::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(4, |s| s.parse().expect("antennas"));
    let specs = vec![
        DetectorSpec::mmse(),
        DetectorSpec::rbp(0, 0, 5),
        DetectorSpec::mmse_rbp(0, 0, 5),
        DetectorSpec::mmse_sic(),
    ];
    let snrs = vec![0.0, 4.0, 8.0, 12.0];
    let cfg = SweepConfig {
        dims: SystemDims::new(n, n, 1)?,
        snr_points_db: snrs.clone(),
        detectors: specs.clone(),
        errors_target: 200,
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
            print!(" {:>14.3e}", report.records[d * snrs.len() + k].ber);
        }
        println!();
    }
    Ok(())
}
