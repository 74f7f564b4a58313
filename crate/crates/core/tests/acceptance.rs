//! End-to-end acceptance checks.
//!
//! Each test prints a single `PASS`/`FAIL` line and then asserts. Run with
//! `cargo test -p relaxbp --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use relaxbp::channel::SystemDims;
use relaxbp::detectors::DetectorSpec;
use relaxbp::metrics::{complexity_counts, ComplexityKind, ComplexityParams, OpCounts};
use relaxbp::selftest::{check_closed_form, check_full_relaxation, check_sbp_oracle};
use relaxbp::simulator::{run_convergence, run_sweep, SweepConfig, SweepRecord};

const SEED: u64 = 20_240_601;

fn verdict(id: u32, title: &str, pass: bool, detail: &str) -> bool {
    println!("{} C{id:02} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn dims(n: usize) -> SystemDims {
    SystemDims {
        n_tx: n,
        n_rx: n,
        bits_per_symbol: 1,
    }
}

fn sweep(n: usize, snrs: &[f64], detectors: Vec<DetectorSpec>) -> SweepConfig {
    SweepConfig {
        dims: dims(n),
        snr_points_db: snrs.to_vec(),
        detectors,
        errors_target: 500,
        master_seed: SEED,
        ..SweepConfig::default()
    }
}

fn simulate(cfg: &SweepConfig) -> Vec<SweepRecord> {
    let report = run_sweep(cfg).expect("sweep");
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert!(report.budget_exhausted.is_empty(), "bit budget hit before the error target");
    report.records
}

fn curve<'a>(records: &'a [SweepRecord], label: &str) -> Vec<&'a SweepRecord> {
    records.iter().filter(|r| r.label() == label).collect()
}

/// SNR at which a decreasing BER curve crosses `target`, interpolated linearly
/// in `log10(BER)`.
fn crossing(points: &[&SweepRecord], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.ber >= target && b.ber <= target && a.ber > b.ber {
            let t = (a.ber.log10() - target.log10()) / (a.ber.log10() - b.ber.log10());
            Some(a.snr_db + t * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}

/// `a <= b`, or the two estimates are statistically indistinguishable.
fn not_worse(a: &SweepRecord, b: &SweepRecord) -> bool {
    a.ber <= b.ber || a.ci_overlaps(b)
}

#[test]
fn c01_sbp_matches_naive_enumeration() {
    let start = Instant::now();
    let outcome = check_sbp_oracle(1000, SEED).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = outcome.instances == 1000 && outcome.worst <= 1e-9 && secs < 10.0;
    assert!(verdict(
        1,
        "SBP factor update vs brute force",
        pass,
        &format!("{} instances, worst rel gap {:.2e} (tol 1e-9), {secs:.2} s (limit 10 s)", outcome.instances, outcome.worst),
    ));
}

#[test]
fn c02_full_relaxation_is_sbp() {
    let start = Instant::now();
    let (outcome, decisions_agree) = check_full_relaxation(100, SEED, 5).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = outcome.worst <= 1e-9 && decisions_agree && secs < 10.0;
    assert!(verdict(
        2,
        "RBP(3,1) == SBP on 4x4, L=5",
        pass,
        &format!(
            "{} instances, worst message gap {:.2e} (tol 1e-9), decisions agree: {decisions_agree}, {secs:.2} s",
            outcome.instances, outcome.worst
        ),
    ));
}

#[test]
fn c03_closed_form_matches_enumeration() {
    let outcome = check_closed_form(1000, SEED).unwrap();
    let pass = outcome.worst <= 1e-12;
    assert!(verdict(
        3,
        "RBP(0,0) closed form vs general path",
        pass,
        &format!("{} instances, worst gap {:.2e} (tol 1e-12)", outcome.instances, outcome.worst),
    ));
}

#[test]
fn c04_sbp_near_ml() {
    let snrs = [8.0, 9.0, 10.0, 11.0, 12.0];
    let records = simulate(&sweep(4, &snrs, vec![DetectorSpec::ml(), DetectorSpec::sbp(5)]));
    let ml = crossing(&curve(&records, "ML"), 1e-3);
    let sbp = crossing(&curve(&records, "SBP"), 1e-3);
    let (pass, detail) = match (ml, sbp) {
        (Some(ml), Some(sbp)) => (
            sbp - ml <= 0.75,
            format!("BER 1e-3 at ML {ml:.3} dB, SBP {sbp:.3} dB, penalty {:.3} dB (limit 0.75)", sbp - ml),
        ),
        _ => (false, format!("1e-3 not bracketed: ML {ml:?}, SBP {sbp:?}")),
    };
    assert!(verdict(4, "SBP penalty vs ML, 4x4 BPSK, L=5", pass, &detail));
}

#[test]
fn c05_relaxation_ordering() {
    let l = 7;
    let specs = vec![
        DetectorSpec::rbp(0, 0, l),
        DetectorSpec::rbp(1, 0, l),
        DetectorSpec::rbp(2, 0, l),
        DetectorSpec::sbp(l),
    ];
    let records = simulate(&sweep(4, &[12.0], specs));
    let pass = records.windows(2).all(|w| not_worse(&w[1], &w[0]));
    let detail = records
        .iter()
        .map(|r| format!("{} {:.3e} [{:.2e}, {:.2e}]", r.label(), r.ber, r.ber_ci_low, r.ber_ci_high))
        .collect::<Vec<_>>()
        .join(" >= ");
    assert!(verdict(5, "BER ordering at 12 dB, L=7", pass, &detail));
}

#[test]
fn c06_mmse_cascade() {
    let l = 7;
    let snrs = [4.0, 6.0, 8.0, 10.0, 12.0];
    let specs = vec![DetectorSpec::rbp(0, 0, l), DetectorSpec::mmse_rbp(0, 0, l), DetectorSpec::mmse_sic()];
    let records = simulate(&sweep(4, &snrs, specs));
    let rbp = curve(&records, "RBP(0,0)");
    let cascade = curve(&records, "MMSE-RBP(0,0)");
    let sic = curve(&records, "MMSE-SIC");
    let mut beats_rbp = true;
    let mut near_sic = true;
    let mut detail = Vec::new();
    for ((r, c), s) in rbp.iter().zip(&cascade).zip(&sic) {
        let ratio = c.ber / s.ber;
        beats_rbp &= not_worse(c, r);
        near_sic &= c.ber <= 2.0 * s.ber;
        detail.push(format!(
            "{} dB: RBP {:.2e} MMSE-RBP {:.2e} SIC {:.2e} (x{ratio:.2})",
            c.snr_db, r.ber, c.ber, s.ber
        ));
    }
    let pass = beats_rbp && near_sic;
    assert!(verdict(
        6,
        "MMSE-RBP(0,0) <= RBP(0,0) and within 2x of MMSE-SIC, 4..12 dB",
        pass,
        &format!("beats RBP: {beats_rbp}, within 2x: {near_sic}; {}", detail.join("; ")),
    ));
}

fn counts(kind: ComplexityKind, nt: u64, nr: u64, m: u64, l: u64, rd1: u64, rd2: u64) -> OpCounts {
    complexity_counts(
        kind,
        ComplexityParams {
            n_tx: nt,
            n_rx: nr,
            bits_per_symbol: m,
            iterations: l,
            rd1,
            rd2,
        },
    )
}

fn ops(multiplications: u64, additions: u64, comparisons: u64) -> OpCounts {
    OpCounts {
        multiplications,
        additions,
        comparisons,
    }
}

#[test]
fn c07_complexity_table() {
    use ComplexityKind::*;
    // Hand-evaluated at Nt = Nr = 4, M = 1, L = 5.
    let expected = [
        (Ml, 0, 0, ops(260, 320, 0)),
        (Sbp, 0, 0, ops(256, 1136, 1120)),
        (Rbp, 0, 0, ops(32, 312, 0)),
        (Rbp, 1, 0, ops(48, 388, 160)),
        (Rbp, 2, 0, ops(104, 604, 480)),
        (Rbp, 3, 1, ops(256, 1156, 1120)),
        (MmseRbp, 0, 0, ops(96, 376, 6)),
        (MmseRbp, 1, 0, ops(112, 452, 166)),
        (MmseRbp, 3, 1, ops(320, 1220, 1126)),
        (Rbp00, 0, 0, ops(32, 1232, 0)),
        (Eb, 0, 0, ops(32, 312, 0)),
        (Eb, 2, 0, ops(104, 604, 480)),
        (Eb, 3, 0, ops(256, 1156, 1120)),
    ];
    let mismatched: Vec<String> = expected
        .iter()
        .filter(|(k, rd1, rd2, want)| counts(*k, 4, 4, 1, 5, *rd1, *rd2) != *want)
        .map(|(k, rd1, rd2, _)| format!("{k}({rd1},{rd2})"))
        .collect();

    let mut identity_breaks = 0;
    let mut first_break = None;
    for nt in 1..=8u64 {
        for nr in 1..=8u64 {
            for m in 1..=2u64 {
                let sbp = counts(Sbp, nt, nr, m, 5, 0, 0);
                let full = counts(Rbp, nt, nr, m, 5, nt - 1, 1);
                if sbp != full {
                    identity_breaks += 1;
                    first_break.get_or_insert((nt, nr, m, full, sbp));
                }
            }
        }
    }
    let pass = mismatched.is_empty() && identity_breaks == 0;
    let mut detail = format!(
        "{} rows at (4,4,1,5), mismatched: {:?}; RBP(Nt-1,1) == SBP on 128 grid points, breaks: {identity_breaks}",
        expected.len(),
        mismatched
    );
    if let Some((nt, nr, m, full, sbp)) = first_break {
        detail.push_str(&format!(
            " (first at Nt={nt} Nr={nr} M={m}: RBP {}/{}/{} vs SBP {}/{}/{})",
            full.multiplications, full.additions, full.comparisons, sbp.multiplications, sbp.additions, sbp.comparisons
        ));
    }
    assert!(verdict(7, "complexity calculator", pass, &detail));
}

#[test]
fn c08_ami_ordering() {
    let snrs = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0];
    let cfg = SweepConfig {
        trials_min: 10_000,
        errors_target: 0,
        record_ami: true,
        ..sweep(4, &snrs, vec![DetectorSpec::rbp(0, 0, 5), DetectorSpec::mmse_rbp(0, 0, 5)])
    };
    let records = simulate(&cfg);
    let rbp = curve(&records, "RBP(0,0)");
    let cascade = curve(&records, "MMSE-RBP(0,0)");
    let mut pass = true;
    let mut detail = Vec::new();
    for (r, c) in rbp.iter().zip(&cascade) {
        let (ar, ac) = (r.ami.unwrap(), c.ami.unwrap());
        pass &= ac >= ar && r.bits >= 40_000;
        detail.push(format!("{} dB: {ar:.5} vs {ac:.5}", r.snr_db));
    }
    assert!(verdict(8, "AMI MMSE-RBP(0,0) >= RBP(0,0), L=5", pass, &detail.join("; ")));
}

#[test]
fn c09_five_iterations_suffice() {
    let cfg = sweep(4, &[12.0], Vec::new());
    let points = run_convergence(&cfg, &DetectorSpec::sbp(7), 12.0).unwrap();
    let l5 = &points[4].record;
    let l7 = &points[6].record;
    let gap = (l5.ber - l7.ber).abs() / l7.ber;
    let pass = l5.errors >= 500 && l7.errors >= 500 && gap <= 0.25;
    assert!(verdict(
        9,
        "SBP L=5 vs L=7 at 12 dB",
        pass,
        &format!("L=5 {:.3e} ({} errors), L=7 {:.3e} ({} errors), rel gap {gap:.3} (limit 0.25)", l5.ber, l5.errors, l7.ber, l7.errors),
    ));
}

#[test]
fn c10_cascade_helps_at_8x8() {
    let snrs = [4.0, 6.0, 8.0, 10.0, 12.0];
    let records = simulate(&sweep(8, &snrs, vec![DetectorSpec::rbp(0, 0, 5), DetectorSpec::mmse_rbp(0, 0, 5)]));
    let rbp = curve(&records, "RBP(0,0)");
    let cascade = curve(&records, "MMSE-RBP(0,0)");
    let pass = rbp.iter().zip(&cascade).all(|(r, c)| not_worse(c, r));
    let detail = rbp
        .iter()
        .zip(&cascade)
        .map(|(r, c)| format!("{} dB: {:.2e} vs {:.2e}", r.snr_db, r.ber, c.ber))
        .collect::<Vec<_>>()
        .join("; ");
    assert!(verdict(10, "8x8 MMSE-RBP(0,0) <= RBP(0,0), L=5", pass, &detail));
}
