use std::f64::consts::SQRT_2;

use super::likelihood::Observation;
use super::messages::ALPHA_CLAMP;
use super::DetectionResult;
use crate::channel::{bit_weight, symbol_of_bit, BitVector};
use crate::error::Result;
use crate::numerics::{gram, hermitian_solve, ComplexMatrix, ComplexScalar};

/// Output of the linear MMSE filter.
#[derive(Debug, Clone)]
pub struct MmseEstimate {
    /// `(H^H H + sigma^2 I)^-1 H^H y`.
    pub s_hat: Vec<ComplexScalar>,
    /// `(H^H H + sigma^2 I)^-1`.
    pub covariance: ComplexMatrix,
}

fn regularized_gram(h: &ComplexMatrix, noise_variance: f64) -> ComplexMatrix {
    let mut a = gram(h);
    a.add_diagonal(noise_variance);
    a
}

pub fn mmse_filter(obs: &Observation) -> Result<MmseEstimate> {
    let h = obs.channel();
    let a = regularized_gram(h, obs.noise_variance());
    let hy = h.conj_transpose().matvec(obs.received())?;
    let s_hat = hermitian_solve(&a, &ComplexMatrix::column(&hy))?.entries().to_vec();
    let covariance = hermitian_solve(&a, &ComplexMatrix::identity(h.cols()))?;
    Ok(MmseEstimate { s_hat, covariance })
}

/// Pseudo-prior LLR of bit `i` from the MMSE estimate of its symbol.
///
/// BPSK uses `2 Re(s_hat) / K_kk`. For 4-QAM the bit reads the real or the
/// imaginary axis and is scaled by `sqrt(2)` to undo the unit-energy mapping.
pub fn mmse_prior_llr(est: &MmseEstimate, i: usize, bits_per_symbol: usize) -> f64 {
    let k = symbol_of_bit(i, bits_per_symbol);
    let variance = est.covariance[(k, k)].re;
    let s = est.s_hat[k];
    if bits_per_symbol == 1 {
        2.0 * s.re / variance
    } else {
        let component = if bit_weight(i, bits_per_symbol).re > 0.0 { s.re } else { s.im };
        2.0 * SQRT_2 * component / variance
    }
}

fn prior_llrs(est: &MmseEstimate, n_bits: usize, bits_per_symbol: usize) -> Vec<f64> {
    (0..n_bits)
        .map(|i| mmse_prior_llr(est, i, bits_per_symbol).clamp(-ALPHA_CLAMP, ALPHA_CLAMP))
        .collect()
}

/// One-shot linear MMSE detection, thresholding the filter output.
pub fn mmse_detect(obs: &Observation) -> Result<DetectionResult> {
    let est = mmse_filter(obs)?;
    Ok(DetectionResult::from_soft(
        prior_llrs(&est, obs.n_bits(), obs.bits_per_symbol()),
        0,
    ))
}

/// Ordered MMSE successive interference cancellation.
///
/// At each stage the remaining streams are MMSE filtered, the one with the
/// smallest error variance (highest post-filter SINR) is decided, and its
/// hard-decided contribution is subtracted from the received vector.
pub fn mmse_sic_detect(obs: &Observation) -> Result<DetectionResult> {
    let m = obs.bits_per_symbol();
    let n_bits = obs.n_bits();
    let mut soft = vec![0.0; n_bits];
    let mut remaining: Vec<usize> = (0..obs.n_tx()).collect();
    let mut h = obs.channel().clone();
    let mut y = obs.received().to_vec();
    while !remaining.is_empty() {
        let stage = Observation::new(h.clone(), y.clone(), obs.noise_variance(), m)?;
        let est = mmse_filter(&stage)?;
        let pos = (0..remaining.len())
            .min_by(|&a, &b| est.covariance[(a, a)].re.total_cmp(&est.covariance[(b, b)].re))
            .expect("nonempty");
        let k = remaining[pos];
        let mut decided = ComplexScalar::new(0.0, 0.0);
        for b in 0..m {
            let llr = mmse_prior_llr(&est, pos * m + b, m).clamp(-ALPHA_CLAMP, ALPHA_CLAMP);
            soft[k * m + b] = llr;
            let x = if llr >= 0.0 { 1.0 } else { -1.0 };
            decided += bit_weight(b, m) * x;
        }
        for (j, yj) in y.iter_mut().enumerate() {
            *yj -= h[(j, pos)] * decided;
        }
        h = h.without_column(pos);
        remaining.remove(pos);
    }
    Ok(DetectionResult {
        hard_bits: BitVector::from_llrs(&soft),
        soft_llrs: soft,
        iterations_run: 0,
        per_iteration_soft: None,
    })
}
