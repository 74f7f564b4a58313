//! Transmit chain: bits, mapping, flat Rayleigh channel and AWGN.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexScalar};

/// Bits in antipodal form, one entry per bit, each `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector(Vec<i8>);

impl BitVector {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|b| **b != 1 && **b != -1) {
            return Err(Error::InvalidParameter(format!("bit value {b} is not +1/-1")));
        }
        Ok(Self(bits))
    }

    /// Hard decisions from LLRs, `sgn(0) = +1`.
    pub fn from_llrs(llrs: &[f64]) -> Self {
        Self(llrs.iter().map(|&l| if l >= 0.0 { 1 } else { -1 }).collect())
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|b| -b).collect())
    }
}

pub type SymbolVector = Vec<ComplexScalar>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SystemDims {
    pub n_tx: usize,
    pub n_rx: usize,
    pub bits_per_symbol: usize,
}

impl SystemDims {
    pub fn new(n_tx: usize, n_rx: usize, bits_per_symbol: usize) -> Result<Self> {
        let dims = Self {
            n_tx,
            n_rx,
            bits_per_symbol,
        };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(Error::InvalidParameter("antenna counts must be positive".into()));
        }
        if !matches!(self.bits_per_symbol, 1 | 2) {
            return Err(Error::InvalidParameter(format!(
                "bits per symbol must be 1 or 2, got {}",
                self.bits_per_symbol
            )));
        }
        Ok(())
    }

    /// Total number of transmitted bits per channel use.
    #[inline]
    pub fn n_bits(&self) -> usize {
        self.n_tx * self.bits_per_symbol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
}

/// One-based symbol index `k(i) = 1 + floor((i - 0.5) / M)` of one-based bit `i`.
pub fn bit_to_symbol_index(i: usize, bits_per_symbol: usize) -> usize {
    1 + ((i as f64 - 0.5) / bits_per_symbol as f64).floor() as usize
}

/// Zero-based counterpart of [`bit_to_symbol_index`].
#[inline]
pub fn symbol_of_bit(i: usize, bits_per_symbol: usize) -> usize {
    i / bits_per_symbol
}

/// Contribution of a `+1` bit to its symbol.
///
/// BPSK maps the bit straight onto the real axis. Gray 4-QAM puts the first
/// bit of a pair on the real axis and the second on the imaginary axis, each
/// scaled by `1/sqrt(2)` for unit symbol energy.
#[inline]
pub fn bit_weight(i: usize, bits_per_symbol: usize) -> ComplexScalar {
    match (bits_per_symbol, i % bits_per_symbol) {
        (1, _) => ComplexScalar::new(1.0, 0.0),
        (_, 0) => ComplexScalar::new(FRAC_1_SQRT_2, 0.0),
        _ => ComplexScalar::new(0.0, FRAC_1_SQRT_2),
    }
}

pub fn modulate(x: &BitVector, bits_per_symbol: usize) -> Result<SymbolVector> {
    if bits_per_symbol == 0 || !x.len().is_multiple_of(bits_per_symbol) {
        return Err(Error::InvalidParameter(format!(
            "{} bits do not divide into symbols of {bits_per_symbol}",
            x.len()
        )));
    }
    Ok(x.as_slice()
        .chunks(bits_per_symbol)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .map(|(b, &v)| bit_weight(b, bits_per_symbol) * f64::from(v))
                .sum()
        })
        .collect())
}

/// Hard demapping by the sign of each symbol's real and imaginary part.
pub fn demodulate(s: &[ComplexScalar], bits_per_symbol: usize) -> BitVector {
    let sign = |v: f64| if v >= 0.0 { 1 } else { -1 };
    let mut bits = Vec::with_capacity(s.len() * bits_per_symbol);
    for z in s {
        bits.push(sign(z.re));
        if bits_per_symbol == 2 {
            bits.push(sign(z.im));
        }
    }
    BitVector(bits)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> ComplexScalar {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ComplexScalar::new(re * scale, im * scale)
}

/// Uniform i.i.d. antipodal bits.
pub fn sample_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitVector {
    BitVector((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
}

/// i.i.d. `CN(0, 1)` channel gains.
pub fn sample_channel<R: Rng + ?Sized>(dims: SystemDims, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dims.n_rx, dims.n_tx, |_, _| complex_gaussian(rng, 1.0))
}

/// `y = H s + n` with `n ~ CN(0, sigma^2 I)`.
pub fn transmit<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    s: &[ComplexScalar],
    noise: NoiseSpec,
    rng: &mut R,
) -> Result<Vec<ComplexScalar>> {
    let mut y = h.matvec(s)?;
    if noise.variance > 0.0 {
        for yj in &mut y {
            *yj += complex_gaussian(rng, noise.variance);
        }
    }
    Ok(y)
}

/// Noise variance for an SNR defined as received signal power per antenna
/// (`n_tx` for unit-energy symbols) over noise power.
pub fn snr_to_noise_variance(snr_db: f64, dims: SystemDims) -> NoiseSpec {
    NoiseSpec {
        variance: dims.n_tx as f64 / 10f64.powf(snr_db / 10.0),
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed ChaCha stream for one Monte Carlo trial.
///
/// The key is derived from `(master_seed, domain)` and the trial index selects
/// the ChaCha stream, so any trial can be regenerated independently of the
/// others and of the order in which workers pick them up.
pub fn trial_rng(master_seed: u64, domain: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = splitmix64(master_seed) ^ splitmix64(domain.rotate_left(17) ^ 0xa076_1d64_78bd_642f);
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// One channel use: sent bits, channel and received vector.
#[derive(Debug, Clone)]
pub struct ChannelUse {
    pub bits: BitVector,
    pub channel: ComplexMatrix,
    pub received: Vec<ComplexScalar>,
}

pub fn simulate_channel_use<R: Rng + ?Sized>(
    dims: SystemDims,
    noise: NoiseSpec,
    rng: &mut R,
) -> Result<ChannelUse> {
    let bits = sample_bits(dims.n_bits(), rng);
    let channel = sample_channel(dims, rng);
    let symbols = modulate(&bits, dims.bits_per_symbol)?;
    let received = transmit(&channel, &symbols, noise, rng)?;
    Ok(ChannelUse {
        bits,
        channel,
        received,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn symbol_index_formula() {
        assert_eq!(bit_to_symbol_index(3, 1), 3);
        assert_eq!(bit_to_symbol_index(3, 2), 2);
        assert_eq!(bit_to_symbol_index(1, 2), 1);
        for m in 1..=2 {
            for i in 1..=16 {
                assert_eq!(bit_to_symbol_index(i, m), symbol_of_bit(i - 1, m) + 1);
            }
        }
    }

    #[test]
    fn symbol_index_is_monotone_and_onto() {
        for m in 1..=2 {
            for nt in 1..=8 {
                let ks: Vec<usize> = (1..=m * nt).map(|i| bit_to_symbol_index(i, m)).collect();
                assert!(ks.windows(2).all(|w| w[0] <= w[1]));
                for k in 1..=nt {
                    assert!(ks.contains(&k));
                }
            }
        }
    }

    #[test]
    fn modulation_examples() {
        let x = BitVector::new(vec![1, -1]).unwrap();
        assert_eq!(modulate(&x, 1).unwrap(), vec![c(1.0, 0.0), c(-1.0, 0.0)]);

        let r = FRAC_1_SQRT_2;
        let x = BitVector::new(vec![1, 1]).unwrap();
        assert_eq!(modulate(&x, 2).unwrap(), vec![c(r, r)]);
        let x = BitVector::new(vec![-1, 1, 1, -1]).unwrap();
        assert_eq!(modulate(&x, 2).unwrap(), vec![c(-r, r), c(r, -r)]);

        assert!(modulate(&BitVector::new(vec![1, 1, 1]).unwrap(), 2).is_err());
    }

    #[test]
    fn modulate_demodulate_exhaustive() {
        for m in 1..=2 {
            for nt in 1..=4 {
                let n = m * nt;
                for mask in 0u32..(1 << n) {
                    let bits: Vec<i8> = (0..n).map(|t| if mask >> t & 1 == 1 { 1 } else { -1 }).collect();
                    let x = BitVector::new(bits).unwrap();
                    let s = modulate(&x, m).unwrap();
                    for z in &s {
                        assert!((z.norm_sqr() - 1.0).abs() < 1e-15);
                    }
                    assert_eq!(demodulate(&s, m), x);
                }
            }
        }
    }

    #[test]
    fn bit_values_are_checked() {
        assert!(BitVector::new(vec![1, 0]).is_err());
    }

    #[test]
    fn channel_is_reproducible() {
        let dims = SystemDims::new(4, 4, 1).unwrap();
        let a = sample_channel(dims, &mut trial_rng(42, 0, 3));
        let b = sample_channel(dims, &mut trial_rng(42, 0, 3));
        let other = sample_channel(dims, &mut trial_rng(42, 0, 4));
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn channel_moments() {
        let dims = SystemDims::new(1, 1, 1).unwrap();
        let mut rng = trial_rng(1, 2, 3);
        let n = 100_000;
        let mut power = 0.0;
        let mut mean = c(0.0, 0.0);
        for _ in 0..n {
            let h = sample_channel(dims, &mut rng)[(0, 0)];
            power += h.norm_sqr();
            mean += h;
        }
        let power = power / n as f64;
        let mean = mean / n as f64;
        assert!((0.99..=1.01).contains(&power), "power {power}");
        assert!(mean.norm() <= 0.01, "mean {mean}");
    }

    #[test]
    fn noiseless_transmission() {
        let mut rng = trial_rng(5, 0, 0);
        let s = vec![c(0.3, -1.0), c(2.0, 0.5)];
        let y = transmit(&ComplexMatrix::identity(2), &s, NoiseSpec { variance: 0.0 }, &mut rng).unwrap();
        assert_eq!(y, s);

        let dims = SystemDims::new(2, 3, 1).unwrap();
        let h = sample_channel(dims, &mut rng);
        let y = transmit(&h, &s, NoiseSpec { variance: 0.0 }, &mut rng).unwrap();
        for j in 0..3 {
            let expect = h[(j, 0)] * s[0] + h[(j, 1)] * s[1];
            assert!((y[j] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn noise_variance_moment() {
        let mut rng = trial_rng(9, 9, 9);
        let h = ComplexMatrix::identity(1);
        let s = vec![c(0.0, 0.0)];
        let n = 100_000;
        let mut power = 0.0;
        for _ in 0..n {
            power += transmit(&h, &s, NoiseSpec { variance: 1.0 }, &mut rng).unwrap()[0].norm_sqr();
        }
        let v = power / n as f64;
        assert!((0.98..=1.02).contains(&v), "variance {v}");
    }

    #[test]
    fn snr_convention() {
        let d1 = SystemDims::new(1, 1, 1).unwrap();
        let d4 = SystemDims::new(4, 4, 1).unwrap();
        assert!((snr_to_noise_variance(0.0, d1).variance - 1.0).abs() < 1e-15);
        assert!((snr_to_noise_variance(10.0, d1).variance - 0.1).abs() < 1e-15);
        assert!((snr_to_noise_variance(6.0206, d4).variance - 1.0).abs() < 1e-4);
    }

    #[test]
    fn dims_validation() {
        assert!(SystemDims::new(0, 1, 1).is_err());
        assert!(SystemDims::new(1, 1, 3).is_err());
        assert_eq!(SystemDims::new(4, 2, 2).unwrap().n_bits(), 8);
    }
}
