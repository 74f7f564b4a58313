use crate::channel::{bit_weight, symbol_of_bit};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexScalar};

/// Everything a detector sees for one channel use.
///
/// Alongside the channel and received vector this caches the per-bit gain
/// `g[j][i] = h[j][k(i)] * w(i)`, where `w(i)` places bit `i` on its axis of
/// the constellation, so that `y_j = sum_i g[j][i] x_i + n_j`.
#[derive(Debug, Clone)]
pub struct Observation {
    channel: ComplexMatrix,
    received: Vec<ComplexScalar>,
    noise_variance: f64,
    bits_per_symbol: usize,
    bit_gains: Vec<ComplexScalar>,
}

impl Observation {
    pub fn new(
        channel: ComplexMatrix,
        received: Vec<ComplexScalar>,
        noise_variance: f64,
        bits_per_symbol: usize,
    ) -> Result<Self> {
        if received.len() != channel.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} received samples for {} receive antennas",
                received.len(),
                channel.rows()
            )));
        }
        if !matches!(bits_per_symbol, 1 | 2) {
            return Err(Error::InvalidParameter(format!(
                "bits per symbol must be 1 or 2, got {bits_per_symbol}"
            )));
        }
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(Error::InvalidParameter(format!("noise variance {noise_variance}")));
        }
        let n_bits = channel.cols() * bits_per_symbol;
        let mut bit_gains = Vec::with_capacity(channel.rows() * n_bits);
        for j in 0..channel.rows() {
            for i in 0..n_bits {
                bit_gains.push(channel[(j, symbol_of_bit(i, bits_per_symbol))] * bit_weight(i, bits_per_symbol));
            }
        }
        Ok(Self {
            channel,
            received,
            noise_variance,
            bits_per_symbol,
            bit_gains,
        })
    }

    #[inline]
    pub fn channel(&self) -> &ComplexMatrix {
        &self.channel
    }

    #[inline]
    pub fn received(&self) -> &[ComplexScalar] {
        &self.received
    }

    #[inline]
    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    #[inline]
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    #[inline]
    pub fn n_tx(&self) -> usize {
        self.channel.cols()
    }

    #[inline]
    pub fn n_rx(&self) -> usize {
        self.channel.rows()
    }

    #[inline]
    pub fn n_bits(&self) -> usize {
        self.channel.cols() * self.bits_per_symbol
    }

    /// Gains seen by every bit at receive antenna `j`.
    #[inline]
    pub fn bit_gains(&self, j: usize) -> &[ComplexScalar] {
        let n = self.n_bits();
        &self.bit_gains[j * n..(j + 1) * n]
    }

    /// Residual `y_j - sum_t g[j][t] x_t` with `x_t = +1` iff bit `t` of
    /// `mask` is set.
    #[inline]
    pub(crate) fn residual(&self, j: usize, mask: u32) -> ComplexScalar {
        let mut r = self.received[j];
        for (t, g) in self.bit_gains(j).iter().enumerate() {
            if mask >> t & 1 == 1 {
                r -= g;
            } else {
                r += g;
            }
        }
        r
    }
}

/// Per-antenna log-likelihood `-|y_j - h_j s|^2 / (2 sigma^2)` of a symbol
/// vector hypothesis.
pub fn log_likelihood_d(s: &[ComplexScalar], j: usize, h: &ComplexMatrix, y: &[ComplexScalar], noise_variance: f64) -> f64 {
    let hs: ComplexScalar = h.row(j).iter().zip(s).map(|(a, b)| a * b).sum();
    -(y[j] - hs).norm_sqr() / (2.0 * noise_variance)
}
