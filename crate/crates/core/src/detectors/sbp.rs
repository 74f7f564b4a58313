use super::likelihood::Observation;
use super::messages::{LlrMatrix, MessageState};
use crate::error::{Error, Result};

/// Largest bit count enumerated exhaustively by SBP and ML.
pub const MAX_ENUMERATED_BITS: usize = 24;

/// Max-log factor update over every bit configuration.
///
/// For factor `j` and bit `i`,
/// `beta[j][i] = max_{x_i=+1} {D_j(x) + sum_{t!=i, x_t=+1} alpha[t][j]}
///             - max_{x_i=-1} {same}`.
/// The inner sum excluding `i` equals the full prior sum minus `alpha[i][j]`
/// whenever `x_i = +1`, so a single pass over the `2^n` configurations serves
/// every bit of the factor.
pub fn sbp_beta_update(state: &MessageState, obs: &Observation) -> Result<LlrMatrix> {
    let n = obs.n_bits();
    if n > MAX_ENUMERATED_BITS {
        return Err(Error::DimensionTooLarge {
            bits: n,
            limit: MAX_ENUMERATED_BITS,
        });
    }
    let scale = 1.0 / (2.0 * obs.noise_variance());
    let mut beta = LlrMatrix::zeros(obs.n_rx(), n);
    let mut best_plus = vec![f64::NEG_INFINITY; n];
    let mut best_minus = vec![f64::NEG_INFINITY; n];
    for j in 0..obs.n_rx() {
        best_plus.fill(f64::NEG_INFINITY);
        best_minus.fill(f64::NEG_INFINITY);
        for mask in 0u32..(1u32 << n) {
            let mut metric = -obs.residual(j, mask).norm_sqr() * scale;
            for t in 0..n {
                if mask >> t & 1 == 1 {
                    metric += state.alpha[(t, j)];
                }
            }
            for i in 0..n {
                let slot = if mask >> i & 1 == 1 { &mut best_plus[i] } else { &mut best_minus[i] };
                if metric > *slot {
                    *slot = metric;
                }
            }
        }
        for i in 0..n {
            beta[(j, i)] = (best_plus[i] - state.alpha[(i, j)]) - best_minus[i];
        }
    }
    Ok(beta)
}
