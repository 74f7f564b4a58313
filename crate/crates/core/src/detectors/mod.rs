//! MIMO detectors on the factor graph of a flat-fading channel.
//!
//! Every receive antenna is a factor node connected to every transmitted
//! bit. Message passing runs a flooding schedule: all factor-to-bit messages
//! (`beta`) are refreshed from the previous bit-to-factor messages (`alpha`),
//! then all `alpha` are rebuilt from the fresh `beta`.
//!
//! Besides the message-passing family ([`DetectorKind::Sbp`],
//! [`DetectorKind::Rbp`], [`DetectorKind::MmseRbp`]) the module carries the
//! usual reference receivers: exhaustive ML, linear MMSE and ordered MMSE-SIC.

mod likelihood;
mod linear;
mod messages;
mod ml;
mod rbp;
mod sbp;

use std::fmt;
use std::str::FromStr;

pub use likelihood::{log_likelihood_d, Observation};
pub use linear::{mmse_detect, mmse_filter, mmse_prior_llr, mmse_sic_detect, MmseEstimate};
pub use messages::{alpha_update, soft_output, LlrMatrix, MessageState, ALPHA_CLAMP};
pub use ml::ml_detect;
pub use rbp::{
    interference_mean, interference_variance, rbp_beta_entry_closed_form,
    rbp_beta_entry_enumerated, rbp_beta_update, rbp_d, select_edges, EdgeSet, InterferenceModel,
    RbpPlan, MAX_SELECTED_EDGES,
};
pub use sbp::{sbp_beta_update, MAX_ENUMERATED_BITS};

use crate::channel::BitVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    Ml,
    Mmse,
    MmseSic,
    Sbp,
    Rbp,
    MmseRbp,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 6] = [
        DetectorKind::Ml,
        DetectorKind::Mmse,
        DetectorKind::MmseSic,
        DetectorKind::Sbp,
        DetectorKind::Rbp,
        DetectorKind::MmseRbp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Ml => "ML",
            DetectorKind::Mmse => "MMSE",
            DetectorKind::MmseSic => "MMSE-SIC",
            DetectorKind::Sbp => "SBP",
            DetectorKind::Rbp => "RBP",
            DetectorKind::MmseRbp => "MMSE-RBP",
        }
    }

    /// Whether the relaxation coefficients apply.
    pub fn is_relaxed(self) -> bool {
        matches!(self, DetectorKind::Rbp | DetectorKind::MmseRbp)
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, DetectorKind::Sbp | DetectorKind::Rbp | DetectorKind::MmseRbp)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        DetectorKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown detector kind `{s}`")))
    }
}

/// Detector selection plus its iteration count and relaxation coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectorSpec {
    pub kind: DetectorKind,
    pub iterations: usize,
    /// Number of strongest interfering symbols kept in exact enumeration.
    pub rd1: usize,
    /// Whether the remaining bits of the target's own symbol are kept.
    pub rd2: usize,
}

impl DetectorSpec {
    pub fn ml() -> Self {
        Self::plain(DetectorKind::Ml, 0)
    }

    pub fn mmse() -> Self {
        Self::plain(DetectorKind::Mmse, 0)
    }

    pub fn mmse_sic() -> Self {
        Self::plain(DetectorKind::MmseSic, 0)
    }

    pub fn sbp(iterations: usize) -> Self {
        Self::plain(DetectorKind::Sbp, iterations)
    }

    pub fn rbp(rd1: usize, rd2: usize, iterations: usize) -> Self {
        Self {
            kind: DetectorKind::Rbp,
            iterations,
            rd1,
            rd2,
        }
    }

    pub fn mmse_rbp(rd1: usize, rd2: usize, iterations: usize) -> Self {
        Self {
            kind: DetectorKind::MmseRbp,
            iterations,
            rd1,
            rd2,
        }
    }

    fn plain(kind: DetectorKind, iterations: usize) -> Self {
        Self {
            kind,
            iterations,
            rd1: 0,
            rd2: 0,
        }
    }

    /// Number of neighbour bits kept per `(factor, bit)` pair.
    pub fn selected_edges(&self, bits_per_symbol: usize) -> usize {
        self.rd1 * bits_per_symbol + self.rd2 * (bits_per_symbol - 1)
    }

    /// `n_tx - rd1 - 1`.
    pub fn relax_degree(&self, n_tx: usize) -> usize {
        n_tx.saturating_sub(self.rd1 + 1)
    }

    pub fn validate(&self, n_tx: usize) -> Result<()> {
        if self.kind.is_relaxed() {
            if self.rd1 >= n_tx {
                return Err(Error::InvalidParameter(format!(
                    "rd1 = {} must be below n_tx = {n_tx}",
                    self.rd1
                )));
            }
            if self.rd2 > 1 {
                return Err(Error::InvalidParameter(format!("rd2 = {} must be 0 or 1", self.rd2)));
            }
        }
        Ok(())
    }

    /// Short label such as `SBP` or `RBP(1,0)`.
    pub fn label(&self) -> String {
        if self.kind.is_relaxed() {
            format!("{}({},{})", self.kind, self.rd1, self.rd2)
        } else {
            self.kind.to_string()
        }
    }
}

impl fmt::Display for DetectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_iterative() {
            write!(f, "{} L={}", self.label(), self.iterations)
        } else {
            f.write_str(&self.label())
        }
    }
}

impl FromStr for DetectorSpec {
    type Err = Error;

    /// Parses `SBP`, `RBP(1,0)`, `MMSE-RBP(0,0)` and friends. Iterations
    /// default to 5 and may be given as a trailing `L=7` or `@7`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, iterations) = match s.split_once(['@', ' ']) {
            Some((body, rest)) => {
                let rest = rest.trim();
                let rest = rest.strip_prefix("L=").or_else(|| rest.strip_prefix("l=")).unwrap_or(rest);
                let l = rest
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad iteration count in `{s}`")))?;
                (body.trim(), Some(l))
            }
            None => (s, None),
        };
        let (name, coeffs) = match body.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in `{s}`")))?;
                let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                let parse = |p: &str| {
                    p.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad coefficient `{p}` in `{s}`")))
                };
                let coeffs = match parts.as_slice() {
                    [a] => (parse(a)?, 0),
                    [a, b] => (parse(a)?, parse(b)?),
                    _ => return Err(Error::Parse(format!("expected (rd1,rd2) in `{s}`"))),
                };
                (name, Some(coeffs))
            }
            None => (body, None),
        };
        let kind: DetectorKind = name.parse()?;
        if coeffs.is_some() && !kind.is_relaxed() {
            return Err(Error::Parse(format!("{kind} takes no coefficients")));
        }
        let (rd1, rd2) = coeffs.unwrap_or((0, 0));
        let iterations = match (kind.is_iterative(), iterations) {
            (true, l) => l.unwrap_or(5),
            (false, _) => 0,
        };
        Ok(Self {
            kind,
            iterations,
            rd1,
            rd2,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub hard_bits: BitVector,
    pub soft_llrs: Vec<f64>,
    pub iterations_run: usize,
    /// Soft outputs after each iteration, when requested.
    pub per_iteration_soft: Option<Vec<Vec<f64>>>,
}

impl DetectionResult {
    pub fn from_soft(soft_llrs: Vec<f64>, iterations_run: usize) -> Self {
        Self {
            hard_bits: BitVector::from_llrs(&soft_llrs),
            soft_llrs,
            iterations_run,
            per_iteration_soft: None,
        }
    }
}

/// Runs one detection.
pub fn detect(spec: &DetectorSpec, obs: &Observation) -> Result<DetectionResult> {
    detect_impl(spec, obs, false)
}

/// Like [`detect`] but also keeps the soft output after every iteration.
pub fn detect_recording(spec: &DetectorSpec, obs: &Observation) -> Result<DetectionResult> {
    detect_impl(spec, obs, true)
}

fn detect_impl(spec: &DetectorSpec, obs: &Observation, record: bool) -> Result<DetectionResult> {
    spec.validate(obs.n_tx())?;
    match spec.kind {
        DetectorKind::Ml => ml_detect(obs),
        DetectorKind::Mmse => mmse_detect(obs),
        DetectorKind::MmseSic => mmse_sic_detect(obs),
        DetectorKind::Sbp | DetectorKind::Rbp | DetectorKind::MmseRbp => {
            let mut history = record.then(Vec::new);
            let state = run_message_passing(spec, obs, |_, state| {
                if let Some(h) = history.as_mut() {
                    h.push(soft_output(&state.beta));
                }
            })?;
            let soft = if spec.iterations == 0 {
                // No factor update has happened; report the prior.
                (0..obs.n_bits()).map(|i| state.alpha[(i, 0)]).collect()
            } else {
                soft_output(&state.beta)
            };
            let mut result = DetectionResult::from_soft(soft, spec.iterations);
            result.per_iteration_soft = history;
            Ok(result)
        }
    }
}

/// Runs the flooding schedule of a message-passing detector.
///
/// `observer` sees the message state after each iteration `l = 1..=L`, once
/// both the `beta` and the `alpha` update of that iteration are done. The
/// final state is returned.
pub fn run_message_passing<F>(spec: &DetectorSpec, obs: &Observation, mut observer: F) -> Result<MessageState>
where
    F: FnMut(usize, &MessageState),
{
    if !spec.kind.is_iterative() {
        return Err(Error::InvalidParameter(format!("{} is not a message-passing detector", spec.kind)));
    }
    spec.validate(obs.n_tx())?;
    if !(obs.noise_variance() > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "message passing needs a positive noise variance, got {}",
            obs.noise_variance()
        )));
    }
    let mut state = MessageState::zeros(obs.n_bits(), obs.n_rx());
    if spec.kind == DetectorKind::MmseRbp {
        let est = mmse_filter(obs)?;
        for i in 0..obs.n_bits() {
            let prior = mmse_prior_llr(&est, i, obs.bits_per_symbol()).clamp(-ALPHA_CLAMP, ALPHA_CLAMP);
            for j in 0..obs.n_rx() {
                state.alpha[(i, j)] = prior;
            }
        }
    }

    let plan = match spec.kind {
        DetectorKind::Sbp => None,
        _ => Some(RbpPlan::new(obs, spec)?),
    };
    for l in 1..=spec.iterations {
        state.beta = match &plan {
            None => sbp_beta_update(&state, obs)?,
            Some(plan) => {
                let model = plan.interference(&state.alpha, obs);
                rbp_beta_update(&state, plan, &model, obs)?
            }
        };
        state.alpha = alpha_update(&state.beta);
        observer(l, &state);
    }
    Ok(state)
}
