//! Link-level MIMO detection with belief propagation on the channel factor
//! graph.
//!
//! The crate covers the whole chain of a detection experiment:
//!
//! - [`channel`]: bits, BPSK / Gray 4-QAM mapping, i.i.d. Rayleigh channel,
//!   AWGN and the SNR convention.
//! - [`detectors`]: standard max-log BP over all edges, relaxed BP that keeps
//!   only the strongest edges and treats the rest as Gaussian interference
//!   with fed-back mean, the MMSE-initialised variant, and ML / MMSE /
//!   MMSE-SIC reference receivers.
//! - [`metrics`]: BER with Wilson intervals, average mutual information of
//!   soft outputs and closed-form operation counts per channel use.
//! - [`simulator`]: seeded, parallel Monte Carlo sweeps with CSV output.
//! - [`config`] and [`cli`]: experiment files, presets and the `relaxbp`
//!   command line.
//!
//! ```
//! use relaxbp::channel::{modulate, sample_bits, sample_channel, transmit, trial_rng, NoiseSpec, SystemDims};
//! use relaxbp::detectors::{detect, DetectorSpec, Observation};
//!
//! let dims = SystemDims::new(4, 4, 1).unwrap();
//! let mut rng = trial_rng(7, 0, 0);
//! let bits = sample_bits(dims.n_bits(), &mut rng);
//! let h = sample_channel(dims, &mut rng);
//! let noise = NoiseSpec { variance: 0.05 };
//! let y = transmit(&h, &modulate(&bits, 1).unwrap(), noise, &mut rng).unwrap();
//!
//! let obs = Observation::new(h, y, noise.variance, 1).unwrap();
//! let out = detect(&DetectorSpec::mmse_rbp(0, 0, 5), &obs).unwrap();
//! assert_eq!(out.soft_llrs.len(), 4);
//! ```

pub mod channel;
pub mod cli;
pub mod config;
pub mod detectors;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod selftest;
pub mod simulator;

pub use error::{Error, Result};
