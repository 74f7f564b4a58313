use super::likelihood::Observation;
use super::messages::ALPHA_CLAMP;
use super::sbp::MAX_ENUMERATED_BITS;
use super::DetectionResult;
use crate::error::{Error, Result};

/// Exhaustive maximum-likelihood detection.
///
/// Minimises `||y - H s||^2` over all `2^n` bit vectors. ML gives hard
/// decisions only, so the soft output is the decision scaled to the message
/// clamp.
pub fn ml_detect(obs: &Observation) -> Result<DetectionResult> {
    let n = obs.n_bits();
    if n > MAX_ENUMERATED_BITS {
        return Err(Error::DimensionTooLarge {
            bits: n,
            limit: MAX_ENUMERATED_BITS,
        });
    }
    let mut best = (f64::INFINITY, 0u32);
    for mask in 0u32..(1u32 << n) {
        let mut dist = 0.0;
        for j in 0..obs.n_rx() {
            dist += obs.residual(j, mask).norm_sqr();
            if dist >= best.0 {
                break;
            }
        }
        if dist < best.0 {
            best = (dist, mask);
        }
    }
    let soft = (0..n)
        .map(|t| if best.1 >> t & 1 == 1 { ALPHA_CLAMP } else { -ALPHA_CLAMP })
        .collect();
    Ok(DetectionResult::from_soft(soft, 0))
}
