//! Experiment files and presets.
//!
//! Experiments are TOML documents with a `[system]` table, a `[sweep]` table
//! and one `[[detector]]` table per detector:
//!
//! ```toml
//! [system]
//! nt = 4
//! nr = 4
//! m = 1
//!
//! [sweep]
//! snr_min = 0.0
//! snr_max = 12.0
//! snr_step = 2.0
//! errors_target = 500
//! bits_max = 100000000
//! trials_min = 1
//! seed = 1
//! record_ami = false
//!
//! [[detector]]
//! kind = "SBP"
//! iterations = 5
//!
//! [[detector]]
//! kind = "RBP"
//! iterations = 5
//! rd1 = 1
//! rd2 = 0
//! ```
//!
//! Missing keys take their defaults, unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::SystemDims;
use crate::detectors::{DetectorKind, DetectorSpec};
use crate::error::{Error, Result};
use crate::simulator::SweepConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub nt: usize,
    pub nr: usize,
    pub m: usize,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { nt: 4, nr: 4, m: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub snr_min: f64,
    pub snr_max: f64,
    pub snr_step: f64,
    pub errors_target: u64,
    pub bits_max: u64,
    pub trials_min: u64,
    pub seed: u64,
    pub record_ami: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            snr_min: 0.0,
            snr_max: 12.0,
            snr_step: 2.0,
            errors_target: 500,
            bits_max: 100_000_000,
            trials_min: 1,
            seed: 1,
            record_ami: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub kind: String,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub rd1: usize,
    #[serde(default)]
    pub rd2: usize,
}

impl DetectorSection {
    pub fn to_spec(&self) -> Result<DetectorSpec> {
        let kind: DetectorKind = self.kind.parse()?;
        Ok(DetectorSpec {
            kind,
            iterations: if kind.is_iterative() { self.iterations } else { 0 },
            rd1: if kind.is_relaxed() { self.rd1 } else { 0 },
            rd2: if kind.is_relaxed() { self.rd2 } else { 0 },
        })
    }
}

impl From<&DetectorSpec> for DetectorSection {
    fn from(spec: &DetectorSpec) -> Self {
        Self {
            kind: spec.kind.name().to_string(),
            iterations: spec.iterations,
            rd1: spec.rd1,
            rd2: spec.rd2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub sweep: SweepSection,
    pub detector: Vec<DetectorSection>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::IoFailure {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    pub fn dims(&self) -> Result<SystemDims> {
        SystemDims::new(self.system.nt, self.system.nr, self.system.m)
    }

    pub fn detectors(&self) -> Result<Vec<DetectorSpec>> {
        self.detector.iter().map(DetectorSection::to_spec).collect()
    }

    pub fn set_detectors(&mut self, specs: &[DetectorSpec]) {
        self.detector = specs.iter().map(DetectorSection::from).collect();
    }

    /// Inclusive SNR grid `snr_min, snr_min + step, ..., <= snr_max`.
    pub fn snr_points(&self) -> Result<Vec<f64>> {
        let s = &self.sweep;
        if !(s.snr_step > 0.0) {
            return Err(Error::InvalidParameter(format!("snr_step must be positive, got {}", s.snr_step)));
        }
        if s.snr_max < s.snr_min {
            return Err(Error::InvalidParameter(format!(
                "snr_max {} below snr_min {}",
                s.snr_max, s.snr_min
            )));
        }
        let count = ((s.snr_max - s.snr_min) / s.snr_step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| {
                let v = s.snr_min + k as f64 * s.snr_step;
                (v * 1e9).round() / 1e9
            })
            .collect())
    }

    pub fn to_sweep_config(&self, workers: usize) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            dims: self.dims()?,
            snr_points_db: self.snr_points()?,
            detectors: self.detectors()?,
            trials_min: self.sweep.trials_min,
            errors_target: self.sweep.errors_target,
            bits_max: self.sweep.bits_max,
            master_seed: self.sweep.seed,
            record_ami: self.sweep.record_ami,
            record_convergence: false,
            workers,
            progress: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Named experiment setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 4x4 BPSK, L = 5: SBP against ML.
    Fig3,
    /// 4x4 BPSK, L = 7: relaxed detectors against SBP and MMSE-SIC.
    Fig5,
    /// 8x8 BPSK, L = 5: the same comparison at larger size.
    Fig6,
    /// 4x4 BPSK, L = 5: average mutual information.
    Fig7,
    /// 4x4 BPSK at 12 dB: BER against iteration count.
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig3, Preset::Fig5, Preset::Fig6, Preset::Fig7, Preset::Fig8];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let system = |n| SystemSection { nt: n, nr: n, m: 1 };
        let sweep = |min, max, step, ami| SweepSection {
            snr_min: min,
            snr_max: max,
            snr_step: step,
            record_ami: ami,
            ..SweepSection::default()
        };
        let (system, sweep, specs) = match self {
            Preset::Fig3 => (
                system(4),
                sweep(0.0, 16.0, 2.0, false),
                vec![DetectorSpec::ml(), DetectorSpec::sbp(5)],
            ),
            Preset::Fig5 => (
                system(4),
                sweep(0.0, 20.0, 2.0, false),
                vec![
                    DetectorSpec::ml(),
                    DetectorSpec::sbp(7),
                    DetectorSpec::rbp(0, 0, 7),
                    DetectorSpec::rbp(1, 0, 7),
                    DetectorSpec::rbp(2, 0, 7),
                    DetectorSpec::mmse_rbp(0, 0, 7),
                    DetectorSpec::mmse_rbp(1, 0, 7),
                    DetectorSpec::mmse_sic(),
                ],
            ),
            Preset::Fig6 => (
                system(8),
                sweep(0.0, 20.0, 2.0, false),
                vec![
                    DetectorSpec::sbp(5),
                    DetectorSpec::rbp(0, 0, 5),
                    DetectorSpec::rbp(1, 0, 5),
                    DetectorSpec::mmse_rbp(0, 0, 5),
                    DetectorSpec::mmse_rbp(1, 0, 5),
                    DetectorSpec::mmse_sic(),
                ],
            ),
            Preset::Fig7 => (
                system(4),
                sweep(0.0, 12.0, 2.0, true),
                vec![
                    DetectorSpec::sbp(5),
                    DetectorSpec::rbp(0, 0, 5),
                    DetectorSpec::rbp(1, 0, 5),
                    DetectorSpec::rbp(2, 0, 5),
                    DetectorSpec::mmse_rbp(0, 0, 5),
                    DetectorSpec::mmse_rbp(1, 0, 5),
                ],
            ),
            Preset::Fig8 => (
                system(4),
                sweep(12.0, 12.0, 1.0, false),
                vec![
                    DetectorSpec::sbp(10),
                    DetectorSpec::rbp(0, 0, 10),
                    DetectorSpec::rbp(1, 0, 10),
                    DetectorSpec::rbp(2, 0, 10),
                    DetectorSpec::mmse_rbp(0, 0, 10),
                    DetectorSpec::mmse_rbp(1, 0, 10),
                ],
            ),
        };
        let mut cfg = ExperimentConfig {
            system,
            sweep,
            detector: Vec::new(),
        };
        cfg.set_detectors(&specs);
        cfg
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown preset `{s}`")))
    }
}
