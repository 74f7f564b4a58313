use std::process::{Command, Output};

use relaxbp::simulator::read_csv;

fn relaxbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaxbp"))
        .args(args)
        .env_remove("RELAXBP_WORKERS")
        .output()
        .expect("spawn relaxbp")
}

const SMALL_SWEEP: &[&str] = &[
    "--nt", "4", "--nr", "4", "--m", "1", "--l", "4", "--snr-min", "4", "--snr-max", "8", "--snr-step", "4",
    "--errors-target", "100", "--seed", "5", "--quiet", "--no-timing",
];

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = relaxbp(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(relaxbp(&["complexity", "--bogus"]).status.code(), Some(2));
    assert_eq!(relaxbp(&["ber-sweep", "--detector", "XYZ"]).status.code(), Some(2));
}

#[test]
fn complexity_table_lists_sbp_multiplications() {
    let out = relaxbp(&["complexity", "--nt", "4", "--nr", "4", "--m", "1", "--l", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let sbp = text.lines().find(|l| l.starts_with("SBP")).expect("SBP row");
    assert_eq!(sbp.split_whitespace().nth(1), Some("256"));
    let rbp00 = text.lines().find(|l| l.starts_with("RBP(0,0)")).expect("RBP(0,0) row");
    assert_eq!(rbp00.split_whitespace().nth(1), Some("32"));
}

#[test]
fn sbp_and_full_relaxation_give_identical_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ber.csv");
    let mut args = vec!["ber-sweep", "--detector", "SBP", "--detector", "RBP(3,1)", "--out", path.to_str().unwrap()];
    args.extend_from_slice(SMALL_SWEEP);
    let out = relaxbp(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let records = read_csv(&path).unwrap();
    let (sbp, rbp): (Vec<_>, Vec<_>) = records.iter().partition(|r| r.detector == "SBP");
    assert_eq!(sbp.len(), 2);
    assert_eq!(rbp.len(), 2);
    for (a, b) in sbp.iter().zip(&rbp) {
        assert_eq!((a.snr_db, a.bits, a.errors, a.ber), (b.snr_db, b.bits, b.errors, b.ber));
    }
}

#[test]
fn identical_invocations_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let mut args = vec![
            "ami-sweep",
            "--detector",
            "MMSE-RBP(1,0)",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ];
        args.extend_from_slice(SMALL_SWEEP);
        assert_eq!(relaxbp(&args).status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let first = run("a.csv", "1");
    assert_eq!(first, run("b.csv", "1"));
    assert_eq!(first, run("c.csv", "2"));
}

#[test]
fn resolved_config_echo_is_a_valid_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["ber-sweep", "--preset", "fig5", "--detector", "RBP(0,0)"];
    args.extend_from_slice(SMALL_SWEEP);
    let out = relaxbp(&args);
    assert_eq!(out.status.code(), Some(0));
    let echoed = String::from_utf8(out.stderr).unwrap();
    let config = dir.path().join("echo.toml");
    std::fs::write(&config, &echoed).unwrap();
    let replay = relaxbp(&["ber-sweep", "--config", config.to_str().unwrap(), "--quiet", "--no-timing"]);
    assert_eq!(replay.status.code(), Some(0), "{}", String::from_utf8_lossy(&replay.stderr));
    assert_eq!(replay.stdout, out.stdout);
}

#[test]
fn convergence_reports_every_iteration_count() {
    let mut args = vec!["convergence", "--detector", "SBP"];
    args.extend_from_slice(SMALL_SWEEP);
    let out = relaxbp(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let iterations: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(iterations, ["1", "2", "3", "4", "1", "2", "3", "4"]);
}

#[test]
fn selftest_passes() {
    let out = relaxbp(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches("PASS").count(), 3);
}

#[test]
fn missing_config_file_is_a_runtime_error() {
    assert_eq!(relaxbp(&["ber-sweep", "--config", "/nonexistent/x.toml"]).status.code(), Some(1));
}
