//! Loads a preset, edits it like an experiment file, runs it and writes CSV.

use relaxbp::config::{ExperimentConfig, Preset};
use relaxbp::simulator::{read_csv, run_sweep, write_csv};

fn main() -> relaxbp::Result<()> {
    let mut exp: ExperimentConfig = Preset::Fig5.config();
    exp.sweep.snr_min = 6.0;
    exp.sweep.snr_max = 10.0;
    exp.sweep.snr_step = 4.0;
    exp.sweep.errors_target = 100;
    exp.detector.retain(|d| d.kind != "ML");

    let text = exp.to_toml();
    println!("{text}");
    let reparsed = ExperimentConfig::from_toml(&text)?;
    assert_eq!(reparsed, exp);

    let report = run_sweep(&reparsed.to_sweep_config(0)?)?;
    let path = std::env::temp_dir().join("relaxbp_experiment_file.csv");
    write_csv(&report.records, &path, true)?;
    for r in read_csv(&path)? {
        println!("{:<14} {:>5} dB  {:.3e}", r.label(), r.snr_db, r.ber);
    }
    println!("wrote {}", path.display());
    Ok(())
}
