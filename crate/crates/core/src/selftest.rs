//! Runtime consistency checks against independent reference computations.
//!
//! These are the same checks the test suite runs, packaged so a built binary
//! can verify itself on the target machine.

use rand::Rng;

use crate::channel::{modulate, sample_bits, sample_channel, transmit, trial_rng, BitVector, SystemDims};
use crate::detectors::{
    log_likelihood_d, rbp_beta_update, rbp_d, run_message_passing, sbp_beta_update, DetectorSpec, LlrMatrix,
    MessageState, Observation, RbpPlan,
};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub passed: bool,
    /// Largest relative deviation seen.
    pub worst: f64,
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Random observation at an SNR drawn uniformly from 0..20 dB.
pub fn random_observation(dims: SystemDims, seed: u64, index: u64) -> Result<(BitVector, Observation)> {
    let mut rng = trial_rng(seed, 0x5e1f_7e57, index);
    let snr_db: f64 = rng.random_range(0.0..20.0);
    let noise = crate::channel::snr_to_noise_variance(snr_db, dims);
    let bits = sample_bits(dims.n_bits(), &mut rng);
    let h = sample_channel(dims, &mut rng);
    let y = transmit(&h, &modulate(&bits, dims.bits_per_symbol)?, noise, &mut rng)?;
    Ok((bits, Observation::new(h, y, noise.variance, dims.bits_per_symbol)?))
}

/// Random bit-to-factor messages in `[-30, 30]`.
pub fn random_alpha(n_bits: usize, n_rx: usize, seed: u64, index: u64) -> LlrMatrix {
    let mut rng = trial_rng(seed, 0xa1fa, index);
    LlrMatrix::from_row_major(n_bits, n_rx, (0..n_bits * n_rx).map(|_| rng.random_range(-30.0..30.0)).collect())
}

/// Factor update written straight from its definition: for each `(j, i)`,
/// every symbol vector is built, scored with the symbol-domain likelihood,
/// and the prior sum skips bit `i` explicitly.
pub fn naive_sbp_beta(alpha: &LlrMatrix, obs: &Observation) -> Result<LlrMatrix> {
    let n = obs.n_bits();
    let m = obs.bits_per_symbol();
    let mut beta = LlrMatrix::zeros(obs.n_rx(), n);
    for j in 0..obs.n_rx() {
        for i in 0..n {
            let mut plus = f64::NEG_INFINITY;
            let mut minus = f64::NEG_INFINITY;
            for mask in 0u32..(1 << n) {
                let bits: Vec<i8> = (0..n).map(|t| if mask >> t & 1 == 1 { 1 } else { -1 }).collect();
                let s = modulate(&BitVector::new(bits.clone())?, m)?;
                let mut metric = log_likelihood_d(&s, j, obs.channel(), obs.received(), obs.noise_variance());
                for t in 0..n {
                    if t != i && bits[t] == 1 {
                        metric += alpha[(t, j)];
                    }
                }
                if bits[i] == 1 {
                    plus = plus.max(metric);
                } else {
                    minus = minus.max(metric);
                }
            }
            beta[(j, i)] = plus - minus;
        }
    }
    Ok(beta)
}

/// Exhaustive factor update against [`naive_sbp_beta`].
pub fn check_sbp_oracle(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let mut worst = 0f64;
    for k in 0..instances {
        let n = 2 + k % 2;
        let dims = SystemDims::new(n, n, 1)?;
        let (_, obs) = random_observation(dims, seed, k as u64)?;
        let state = MessageState {
            alpha: random_alpha(n, n, seed, k as u64),
            beta: LlrMatrix::zeros(n, n),
        };
        let fast = sbp_beta_update(&state, &obs)?;
        let slow = naive_sbp_beta(&state.alpha, &obs)?;
        for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
            worst = worst.max(relative_gap(*a, *b));
        }
    }
    Ok(CheckOutcome {
        name: "sbp-vs-exhaustive-oracle",
        instances,
        passed: worst <= 1e-9,
        worst,
    })
}

/// Relaxed BP with the full neighbourhood against standard BP, every message
/// at every iteration. Returns the outcome and whether all hard decisions
/// agreed.
pub fn check_full_relaxation(instances: usize, seed: u64, iterations: usize) -> Result<(CheckOutcome, bool)> {
    let dims = SystemDims::new(4, 4, 1)?;
    let sbp = DetectorSpec::sbp(iterations);
    let full = DetectorSpec::rbp(dims.n_tx - 1, 1, iterations);
    let mut worst = 0f64;
    let mut decisions_agree = true;
    for k in 0..instances {
        let (_, obs) = random_observation(dims, seed, k as u64)?;
        let mut trace_sbp = Vec::new();
        let mut trace_rbp = Vec::new();
        let end_sbp = run_message_passing(&sbp, &obs, |_, s| trace_sbp.push(s.clone()))?;
        let end_rbp = run_message_passing(&full, &obs, |_, s| trace_rbp.push(s.clone()))?;
        for (a, b) in trace_sbp.iter().zip(&trace_rbp) {
            for (x, y) in a.alpha.as_slice().iter().zip(b.alpha.as_slice()) {
                worst = worst.max(relative_gap(*x, *y));
            }
            for (x, y) in a.beta.as_slice().iter().zip(b.beta.as_slice()) {
                worst = worst.max(relative_gap(*x, *y));
            }
        }
        let hard = |s: &MessageState| BitVector::from_llrs(&crate::detectors::soft_output(&s.beta));
        decisions_agree &= hard(&end_sbp) == hard(&end_rbp);
    }
    Ok((
        CheckOutcome {
            name: "rbp-full-neighbourhood-equals-sbp",
            instances,
            passed: worst <= 1e-9 && decisions_agree,
            worst,
        },
        decisions_agree,
    ))
}

/// Closed-form relaxed update with an empty selection against the difference
/// of two single-bit Gaussian likelihoods.
pub fn check_closed_form(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let dims = SystemDims::new(4, 4, 1)?;
    let spec = DetectorSpec::rbp(0, 0, 1);
    let mut worst = 0f64;
    for k in 0..instances {
        let (_, obs) = random_observation(dims, seed, k as u64)?;
        let plan = RbpPlan::new(&obs, &spec)?;
        let state = MessageState {
            alpha: random_alpha(4, 4, seed, k as u64),
            beta: LlrMatrix::zeros(4, 4),
        };
        let model = plan.interference(&state.alpha, &obs);
        let closed = rbp_beta_update(&state, &plan, &model, &obs)?;
        for j in 0..4 {
            for i in 0..4 {
                let (u, v) = (model.mean(j, i), model.variance(j, i));
                let general = rbp_d(&[(i, 1.0)], j, &obs, u, v) - rbp_d(&[(i, -1.0)], j, &obs, u, v);
                worst = worst.max(relative_gap(closed[(j, i)], general));
            }
        }
    }
    Ok(CheckOutcome {
        name: "rbp00-closed-form-two-path",
        instances,
        passed: worst <= 1e-12,
        worst,
    })
}

/// All checks with the default instance counts.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_sbp_oracle(1000, seed)?,
        check_full_relaxation(100, seed, 5)?.0,
        check_closed_form(1000, seed)?,
    ])
}

