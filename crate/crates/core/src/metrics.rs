//! Error counting, soft-output quality and analytic complexity.

use std::fmt;
use std::str::FromStr;

use crate::channel::BitVector;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BerAccumulator {
    pub bits_total: u64,
    pub bit_errors: u64,
}

impl BerAccumulator {
    pub fn accumulate(self, sent: &BitVector, decided: &BitVector) -> Result<Self> {
        if sent.len() != decided.len() {
            return Err(Error::LengthMismatch {
                left: sent.len(),
                right: decided.len(),
            });
        }
        let errors = sent
            .as_slice()
            .iter()
            .zip(decided.as_slice())
            .filter(|(a, b)| a != b)
            .count();
        Ok(Self {
            bits_total: self.bits_total + sent.len() as u64,
            bit_errors: self.bit_errors + errors as u64,
        })
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            bits_total: self.bits_total + other.bits_total,
            bit_errors: self.bit_errors + other.bit_errors,
        }
    }

    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }

    /// Wilson score 95% interval.
    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.bits_total)
    }
}

/// Wilson score 95% interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Largest `|b L|` fed to the exponential in [`ami`].
pub const AMI_LLR_CLAMP: f64 = 30.0;

/// Information carried by one LLR about its true bit: `1 - log2(1 + e^{-b L})`.
pub fn ami_term(llr: f64, bit: f64) -> f64 {
    let z = (bit * llr).clamp(-AMI_LLR_CLAMP, AMI_LLR_CLAMP);
    1.0 - (-z).exp().ln_1p() / std::f64::consts::LN_2
}

/// Average mutual information of soft outputs against the true bits.
///
/// Confidently wrong LLRs drive the per-bit term below zero; the mean is
/// reported without flooring.
pub fn ami(soft_llrs: &[f64], true_bits: &BitVector) -> Result<f64> {
    if soft_llrs.len() != true_bits.len() {
        return Err(Error::LengthMismatch {
            left: soft_llrs.len(),
            right: true_bits.len(),
        });
    }
    if soft_llrs.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = soft_llrs
        .iter()
        .enumerate()
        .map(|(i, &l)| ami_term(l, true_bits.get(i)))
        .sum();
    Ok(sum / soft_llrs.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub multiplications: u64,
    pub additions: u64,
    pub comparisons: u64,
}

/// Row selector for [`complexity_counts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexityKind {
    Ml,
    Sbp,
    Rbp,
    MmseRbp,
    Rbp00,
    /// Edge-based BP of Hu and Duman (counts only).
    Eb,
}

impl ComplexityKind {
    pub const ALL: [ComplexityKind; 6] = [
        ComplexityKind::Ml,
        ComplexityKind::Sbp,
        ComplexityKind::Rbp,
        ComplexityKind::MmseRbp,
        ComplexityKind::Rbp00,
        ComplexityKind::Eb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComplexityKind::Ml => "ML",
            ComplexityKind::Sbp => "SBP",
            ComplexityKind::Rbp => "RBP",
            ComplexityKind::MmseRbp => "MMSE-RBP",
            ComplexityKind::Rbp00 => "RBP(0,0)",
            ComplexityKind::Eb => "EB",
        }
    }

    pub fn uses_rd(self) -> bool {
        matches!(self, ComplexityKind::Rbp | ComplexityKind::MmseRbp | ComplexityKind::Eb)
    }
}

impl fmt::Display for ComplexityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplexityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        ComplexityKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown complexity row `{s}`")))
    }
}

/// Parameters of one complexity evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityParams {
    pub n_tx: u64,
    pub n_rx: u64,
    pub bits_per_symbol: u64,
    pub iterations: u64,
    pub rd1: u64,
    pub rd2: u64,
}

/// Operation counts per channel use from the closed-form expressions.
///
/// The cubic MMSE term of MMSE-RBP is counted as `n_tx^3` multiplications
/// and additions.
pub fn complexity_counts(kind: ComplexityKind, p: ComplexityParams) -> OpCounts {
    let ComplexityParams {
        n_tx: nt,
        n_rx: nr,
        bits_per_symbol: m,
        iterations: l,
        rd1,
        rd2,
    } = p;
    let pow2 = |e: u64| 1u64 << e;
    let r_d = rd1 * m + rd2 * (m - 1);
    let n = m * nt;
    let rbp = |rd1: u64, r_d: u64| {
        let shared = pow2(r_d + 1) * (rd1 + 1) * nr + pow2(m) * (nt - rd1 - 1) * nr;
        OpCounts {
            multiplications: shared,
            additions: shared + (pow2(r_d) * (rd1 + 1) + pow2(m - 1) + 3 * nt) * m * l * nr,
            comparisons: (pow2(r_d + 1) - 2) * m * l * nt * nr,
        }
    };
    match kind {
        ComplexityKind::Ml => OpCounts {
            multiplications: pow2(n) * nr * nt + n,
            additions: pow2(n) * nr * nt + pow2(n) * n,
            comparisons: 0,
        },
        ComplexityKind::Sbp => OpCounts {
            multiplications: pow2(n) * nr * nt,
            additions: (pow2(n) + (pow2(n - 1) + 3) * m * l) * nr * nt,
            comparisons: (pow2(n) - 2) * n * nr * l,
        },
        ComplexityKind::Rbp => rbp(rd1, r_d),
        ComplexityKind::MmseRbp => {
            let base = rbp(rd1, r_d);
            OpCounts {
                multiplications: base.multiplications + nt.pow(3),
                additions: base.additions + nt.pow(3),
                comparisons: base.comparisons + nt * (nt - 1) / 2,
            }
        }
        ComplexityKind::Rbp00 => {
            let shared = 2 * nr + pow2(m) * (nt - 1) * nr;
            OpCounts {
                multiplications: shared,
                additions: shared + (pow2(m - 1) + 3 * nt + 2) * m * l * nt * nr,
                comparisons: 0,
            }
        }
        ComplexityKind::Eb => {
            let e = m * rd1 + m;
            let shared = pow2(e) * (rd1 + 1) * nr + pow2(m) * (nt - rd1 - 1) * nr;
            OpCounts {
                multiplications: shared,
                additions: shared + (pow2(e - 1) * (rd1 + 1) + pow2(m - 1) + 3 * nt) * m * l * nr,
                comparisons: (pow2(e) - 2) * m * l * nt * nr,
            }
        }
    }
}
