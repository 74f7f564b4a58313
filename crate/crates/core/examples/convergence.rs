//! BER against the number of iterations at a fixed SNR.

use relaxbp::channel::SystemDims;
use relaxbp::detectors::DetectorSpec;
use relaxbp::simulator::{run_convergence, SweepConfig};

fn main() -> relaxbp::Result<()> {
    let snr_db = 12.0;
    let cfg = SweepConfig {
        dims: SystemDims::new(4, 4, 1)?,
        errors_target: 200,
        ..SweepConfig::default()
    };
    let specs = [DetectorSpec::sbp(10), DetectorSpec::rbp(1, 0, 10), DetectorSpec::mmse_rbp(0, 0, 10)];
    let curves = specs
        .iter()
        .map(|s| run_convergence(&cfg, s, snr_db))
        .collect::<relaxbp::Result<Vec<_>>>()?;

    print!("{:>3}", "L");
    for spec in &specs {
        print!(" {:>14}", spec.label());
    }
    println!();
    for l in 0..10 {
        print!("{:>3}", l + 1);
        for curve in &curves {
            print!(" {:>14.3e}", curve[l].record.ber);
        }
        println!();
    }
    Ok(())
}
