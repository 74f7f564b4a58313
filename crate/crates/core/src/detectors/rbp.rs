//! Relaxed message passing.
//!
//! Each factor-to-bit message enumerates only the target bit and a small set
//! of selected neighbour bits (the strongest interfering symbols at that
//! receive antenna). The remaining bits are folded, together with the noise,
//! into a complex Gaussian whose mean is rebuilt every iteration from the
//! latest bit-to-factor messages and whose variance is fixed at the prior.

use super::likelihood::Observation;
use super::messages::{LlrMatrix, MessageState};
use super::DetectorSpec;
use crate::channel::symbol_of_bit;
use crate::error::{Error, Result};
use crate::numerics::ComplexScalar;

/// Largest selected-edge count accepted for exhaustive hypothesis search.
pub const MAX_SELECTED_EDGES: usize = 20;

/// Selected neighbour bits for one `(factor, bit)` pair.
///
/// Symbols other than the target's are ranked by `|h[j][k]|`, strongest first
/// with ties going to the lower index. The `rd1` strongest contribute all
/// their bits; with `rd2 = 1` the other bits of the target's own symbol are
/// appended.
pub fn select_edges(h_row: &[ComplexScalar], i: usize, spec: &DetectorSpec, bits_per_symbol: usize) -> Vec<usize> {
    let own = symbol_of_bit(i, bits_per_symbol);
    let mut others: Vec<usize> = (0..h_row.len()).filter(|&k| k != own).collect();
    // stable sort keeps the lower index first on equal magnitude
    others.sort_by(|&a, &b| h_row[b].norm_sqr().total_cmp(&h_row[a].norm_sqr()));
    let mut psi = Vec::with_capacity(spec.selected_edges(bits_per_symbol));
    for &k in others.iter().take(spec.rd1) {
        psi.extend(k * bits_per_symbol..(k + 1) * bits_per_symbol);
    }
    if spec.rd2 == 1 {
        psi.extend((own * bits_per_symbol..(own + 1) * bits_per_symbol).filter(|&t| t != i));
    }
    psi
}

#[inline]
fn membership(psi: &[usize], i: usize) -> u64 {
    psi.iter().fold(1u64 << i, |acc, &t| acc | 1u64 << t)
}

/// Mean of the lumped interference, `sum_{t not in psi, t != i} g[j][t] tanh(alpha[t][j] / 2)`.
///
/// `tanh(a/2)` is `2 p(x=+1) - 1` for a bit with LLR `a`.
pub fn interference_mean(alpha: &LlrMatrix, psi: &[usize], i: usize, j: usize, obs: &Observation) -> ComplexScalar {
    let kept = membership(psi, i);
    obs.bit_gains(j)
        .iter()
        .enumerate()
        .filter(|(t, _)| kept >> t & 1 == 0)
        .map(|(t, g)| g * (alpha[(t, j)] / 2.0).tanh())
        .sum()
}

/// Variance of the lumped interference plus noise, with unit prior bit variance.
pub fn interference_variance(psi: &[usize], i: usize, j: usize, obs: &Observation) -> f64 {
    let kept = membership(psi, i);
    let lumped: f64 = obs
        .bit_gains(j)
        .iter()
        .enumerate()
        .filter(|(t, _)| kept >> t & 1 == 0)
        .map(|(_, g)| g.norm_sqr())
        .sum();
    lumped + obs.noise_variance()
}

/// Gaussian log-likelihood of a partial hypothesis.
///
/// `hypothesis` lists `(bit, value)` pairs covering the target and its
/// selected neighbours; `mean` is the interference mean from the previous
/// iteration.
pub fn rbp_d(
    hypothesis: &[(usize, f64)],
    j: usize,
    obs: &Observation,
    mean: ComplexScalar,
    variance: f64,
) -> f64 {
    let gains = obs.bit_gains(j);
    let mut r = obs.received()[j] - mean;
    for &(t, x) in hypothesis {
        r -= gains[t] * x;
    }
    -r.norm_sqr() / (2.0 * variance)
}

/// One factor-to-bit message by enumeration over the target and `psi`.
pub fn rbp_beta_entry_enumerated(
    alpha: &LlrMatrix,
    psi: &[usize],
    i: usize,
    j: usize,
    obs: &Observation,
    mean: ComplexScalar,
    variance: f64,
) -> f64 {
    let gains = obs.bit_gains(j);
    let scale = 1.0 / (2.0 * variance);
    let base = obs.received()[j] - mean;
    let mut best = [f64::NEG_INFINITY; 2];
    for mask in 0u32..(1u32 << (psi.len() + 1)) {
        let xi = if mask & 1 == 1 { 1.0 } else { -1.0 };
        let mut r = base - gains[i] * xi;
        let mut prior = 0.0;
        for (slot, &t) in psi.iter().enumerate() {
            if mask >> (slot + 1) & 1 == 1 {
                r -= gains[t];
                prior += alpha[(t, j)];
            } else {
                r += gains[t];
            }
        }
        let metric = prior - r.norm_sqr() * scale;
        let b = &mut best[(mask & 1) as usize];
        if metric > *b {
            *b = metric;
        }
    }
    best[1] - best[0]
}

/// Closed form for an empty selection: `2 Re(g^* (y_j - u)) / sigma_z^2`.
pub fn rbp_beta_entry_closed_form(i: usize, j: usize, obs: &Observation, mean: ComplexScalar, variance: f64) -> f64 {
    let g = obs.bit_gains(j)[i];
    2.0 * (g.conj() * (obs.received()[j] - mean)).re / variance
}

/// Selected edges for every `(factor, bit)` pair, row-major by factor.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    n_bits: usize,
    sets: Vec<Vec<usize>>,
}

impl EdgeSet {
    pub fn new(obs: &Observation, spec: &DetectorSpec) -> Self {
        let n_bits = obs.n_bits();
        let mut sets = Vec::with_capacity(obs.n_rx() * n_bits);
        for j in 0..obs.n_rx() {
            let row = obs.channel().row(j);
            for i in 0..n_bits {
                sets.push(select_edges(row, i, spec, obs.bits_per_symbol()));
            }
        }
        Self { n_bits, sets }
    }

    #[inline]
    pub fn get(&self, j: usize, i: usize) -> &[usize] {
        &self.sets[j * self.n_bits + i]
    }
}

/// Gaussian model of the lumped term for every `(factor, bit)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceModel {
    n_bits: usize,
    pub means: Vec<ComplexScalar>,
    pub variances: Vec<f64>,
}

impl InterferenceModel {
    #[inline]
    pub fn mean(&self, j: usize, i: usize) -> ComplexScalar {
        self.means[j * self.n_bits + i]
    }

    #[inline]
    pub fn variance(&self, j: usize, i: usize) -> f64 {
        self.variances[j * self.n_bits + i]
    }
}

/// Per-channel-realization setup: edge sets and interference variances.
#[derive(Debug, Clone)]
pub struct RbpPlan {
    edges: EdgeSet,
    variances: Vec<f64>,
}

impl RbpPlan {
    pub fn new(obs: &Observation, spec: &DetectorSpec) -> Result<Self> {
        spec.validate(obs.n_tx())?;
        let r_d = spec.selected_edges(obs.bits_per_symbol());
        if r_d > MAX_SELECTED_EDGES {
            return Err(Error::DimensionTooLarge {
                bits: r_d,
                limit: MAX_SELECTED_EDGES,
            });
        }
        let n = obs.n_bits();
        if n > 64 {
            return Err(Error::DimensionTooLarge { bits: n, limit: 64 });
        }
        let edges = EdgeSet::new(obs, spec);
        let mut variances = Vec::with_capacity(obs.n_rx() * n);
        for j in 0..obs.n_rx() {
            for i in 0..n {
                variances.push(interference_variance(edges.get(j, i), i, j, obs));
            }
        }
        Ok(Self { edges, variances })
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    /// Interference model with means built from `alpha`.
    pub fn interference(&self, alpha: &LlrMatrix, obs: &Observation) -> InterferenceModel {
        let n = obs.n_bits();
        let mut means = Vec::with_capacity(self.variances.len());
        for j in 0..obs.n_rx() {
            for i in 0..n {
                means.push(interference_mean(alpha, self.edges.get(j, i), i, j, obs));
            }
        }
        InterferenceModel {
            n_bits: n,
            means,
            variances: self.variances.clone(),
        }
    }
}

/// Relaxed factor update for all `(factor, bit)` pairs.
pub fn rbp_beta_update(
    state: &MessageState,
    plan: &RbpPlan,
    model: &InterferenceModel,
    obs: &Observation,
) -> Result<LlrMatrix> {
    let n = obs.n_bits();
    let mut beta = LlrMatrix::zeros(obs.n_rx(), n);
    for j in 0..obs.n_rx() {
        for i in 0..n {
            let psi = plan.edges.get(j, i);
            let (u, v) = (model.mean(j, i), model.variance(j, i));
            beta[(j, i)] = if psi.is_empty() {
                rbp_beta_entry_closed_form(i, j, obs, u, v)
            } else {
                rbp_beta_entry_enumerated(&state.alpha, psi, i, j, obs, u, v)
            };
        }
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexMatrix;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn real_row(v: &[f64]) -> Vec<ComplexScalar> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn strongest_symbols_are_selected() {
        let row = real_row(&[0.9, 0.5, 1.2, 0.3]);
        assert_eq!(select_edges(&row, 0, &DetectorSpec::rbp(2, 0, 5), 1), vec![2, 1]);
        assert!(select_edges(&row, 0, &DetectorSpec::rbp(0, 0, 5), 1).is_empty());
        let mut full = select_edges(&row, 1, &DetectorSpec::rbp(3, 1, 5), 1);
        full.sort();
        assert_eq!(full, vec![0, 2, 3]);
    }

    #[test]
    fn qam_selection_includes_partner_bit() {
        let row = real_row(&[0.9, 0.5, 1.2]);
        // bit 3 belongs to symbol 1; symbol 2 is strongest among the rest
        assert_eq!(select_edges(&row, 3, &DetectorSpec::rbp(1, 1, 5), 2), vec![4, 5, 2]);
        assert_eq!(select_edges(&row, 3, &DetectorSpec::rbp(1, 0, 5), 2), vec![4, 5]);
        let mut full = select_edges(&row, 0, &DetectorSpec::rbp(2, 1, 5), 2);
        full.sort();
        assert_eq!(full, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let row = real_row(&[1.0, 0.7, 0.7, 0.7]);
        assert_eq!(select_edges(&row, 0, &DetectorSpec::rbp(2, 0, 5), 1), vec![1, 2]);
    }

    fn obs_from_row(row: &[f64], noise: f64) -> Observation {
        let h = ComplexMatrix::from_row_major(1, row.len(), real_row(row)).unwrap();
        Observation::new(h, vec![c(0.2, -0.1)], noise, 1).unwrap()
    }

    #[test]
    fn variance_examples() {
        let obs = obs_from_row(&[1.0, 0.5, 0.4], 1.0);
        assert!((interference_variance(&[], 0, 0, &obs) - 1.41).abs() < 1e-12);
        assert_eq!(interference_variance(&[1, 2], 0, 0, &obs), 1.0);
        let quiet = obs_from_row(&[1.0, 0.5, 0.4], 0.0);
        assert!(interference_variance(&[1], 0, 0, &quiet) > 0.0);
    }

    #[test]
    fn mean_examples() {
        let obs = obs_from_row(&[1.0, 1.0], 1.0);
        let zeros = LlrMatrix::zeros(2, 1);
        assert_eq!(interference_mean(&zeros, &[], 0, 0, &obs), c(0.0, 0.0));
        let certain = LlrMatrix::from_row_major(2, 1, vec![0.0, 30.0]);
        let u = interference_mean(&certain, &[], 0, 0, &obs);
        assert!((u - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn closed_form_agrees_with_enumeration() {
        let obs = obs_from_row(&[0.8, -0.4, 1.3], 0.6);
        let u = c(0.3, -0.2);
        let alpha = LlrMatrix::zeros(3, 1);
        for i in 0..3 {
            let a = rbp_beta_entry_closed_form(i, 0, &obs, u, 1.7);
            let b = rbp_beta_entry_enumerated(&alpha, &[], i, 0, &obs, u, 1.7);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rbp_d_reduces_to_plain_likelihood() {
        let obs = obs_from_row(&[0.8], 0.6);
        let d = rbp_d(&[(0, -1.0)], 0, &obs, c(0.0, 0.0), 0.6);
        let plain = super::super::log_likelihood_d(&[c(-1.0, 0.0)], 0, obs.channel(), obs.received(), 0.6);
        assert_eq!(d, plain);
    }
}
