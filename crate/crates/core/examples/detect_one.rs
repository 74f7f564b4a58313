//! Draws one 4x4 channel use and runs every receiver on it.
//!
//! `cargo run --example detect_one -- [snr_db] [seed]`

use relaxbp::channel::{simulate_channel_use, snr_to_noise_variance, trial_rng, SystemDims};
use relaxbp::detectors::{detect, DetectorSpec, Observation};

fn main() -> relaxbp::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map_or(8.0, |s| s.parse().expect("snr_db"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let dims = SystemDims::new(4, 4, 1)?;
    let noise = snr_to_noise_variance(snr_db, dims);
    let cu = simulate_channel_use(dims, noise, &mut trial_rng(seed, 0, 0))?;
    let obs = Observation::new(cu.channel, cu.received, noise.variance, 1)?;

    println!("sent            {:?}", cu.bits.as_slice());
    let specs = [
        DetectorSpec::ml(),
        DetectorSpec::mmse(),
        DetectorSpec::mmse_sic(),
        DetectorSpec::sbp(5),
        DetectorSpec::rbp(1, 0, 5),
        DetectorSpec::rbp(0, 0, 5),
        DetectorSpec::mmse_rbp(0, 0, 5),
    ];
    for spec in &specs {
        let out = detect(spec, &obs)?;
        let errors = out.hard_bits.as_slice().iter().zip(cu.bits.as_slice()).filter(|(a, b)| a != b).count();
        let llrs: Vec<String> = out.soft_llrs.iter().map(|l| format!("{l:+7.2}")).collect();
        println!("{:<15} {}  errors={errors}", spec.label(), llrs.join(" "));
    }
    Ok(())
}
