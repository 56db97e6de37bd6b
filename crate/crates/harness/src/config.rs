//! Experiment configurations, read from JSON and overridable from the
//! command line.

use std::path::{Path, PathBuf};

use delchan_core::{ChannelConfig, DesignConfig, VoteMode};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Which length the experiment holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LengthMode {
    /// The decoder sees exactly `n` symbols; the input is extended until
    /// `n` survive the channel.
    #[default]
    Observed,
    /// The source emits `n` symbols; the decoder sees what survives.
    Input,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodingExperimentConfig {
    pub codebook: PathBuf,
    pub delta: f64,
    pub lengths: Vec<usize>,
    /// Trials per (message, length) in each rerun.
    pub trials: usize,
    pub reruns: usize,
    pub seed: u64,
    pub length_mode: LengthMode,
    /// Design a fresh codebook for every rerun instead of reusing the file.
    pub resample_codebook: bool,
    /// Design settings used when resampling; the message count and design
    /// `δ` come from the loaded codebook.
    pub design: DesignConfig,
}

impl Default for DecodingExperimentConfig {
    fn default() -> Self {
        DecodingExperimentConfig {
            codebook: PathBuf::from("codebook.json"),
            delta: 0.2,
            lengths: (1..=20).map(|i| i * 10).collect(),
            trials: 100,
            reruns: 1,
            seed: 0,
            length_mode: LengthMode::Observed,
            resample_codebook: false,
            design: DesignConfig::default(),
        }
    }
}

impl DecodingExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ChannelConfig::new(self.delta)?;
        check_lengths(&self.lengths)?;
        if self.trials == 0 || self.reruns == 0 {
            return Err(HarnessError::Config("trials and reruns must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TamperExperimentConfig {
    pub codebook: PathBuf,
    pub delta: f64,
    /// Deletion probability of tampered test sets.
    pub delta_tampered: f64,
    pub eta: f64,
    pub epsilons: Vec<f64>,
    /// Sequences per test set; sequence `i` carries message `i mod |book|`.
    pub k: usize,
    pub test_sets: usize,
    pub assignment_seed: u64,
    /// Overrides the random assignment: every set tampered or none.
    pub force_tampered: Option<bool>,
    pub lengths: Vec<usize>,
    pub length_mode: LengthMode,
    pub seed: u64,
    pub mode: VoteMode,
}

impl Default for TamperExperimentConfig {
    fn default() -> Self {
        TamperExperimentConfig {
            codebook: PathBuf::from("codebook.json"),
            delta: 0.2,
            delta_tampered: 0.3,
            eta: 0.1,
            epsilons: vec![0.0, 0.05, 0.10, 0.15, 0.20, 0.25],
            k: 200,
            test_sets: 50,
            assignment_seed: 0,
            force_tampered: None,
            lengths: vec![50, 100, 150, 200],
            length_mode: LengthMode::Observed,
            seed: 0,
            mode: VoteMode::Normalized,
        }
    }
}

impl TamperExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ChannelConfig::new(self.delta)?;
        ChannelConfig::new(self.delta_tampered)?;
        if !(self.delta_tampered > self.delta) {
            return Err(HarnessError::Config(format!(
                "delta_tampered {} must exceed delta {}",
                self.delta_tampered, self.delta
            )));
        }
        check_lengths(&self.lengths)?;
        if self.k == 0 || self.test_sets == 0 {
            return Err(HarnessError::Config("k and test_sets must be at least 1".into()));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(HarnessError::Config("epsilons must be a nonempty list of values >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    pub deltas: Vec<f64>,
    pub step: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            deltas: vec![0.0, 0.2, 0.4, 0.6, 0.8],
            step: 0.02,
        }
    }
}

pub const SCAN_LOW: f64 = 0.01;
pub const SCAN_HIGH: f64 = 0.99;

impl ScanConfig {
    /// Number of grid points per axis.
    pub fn points(&self) -> Result<usize> {
        for &d in &self.deltas {
            ChannelConfig::new(d)?;
        }
        if self.deltas.is_empty() {
            return Err(HarnessError::Config("at least one delta is required".into()));
        }
        let intervals = (SCAN_HIGH - SCAN_LOW) / self.step;
        if !(self.step > 0.0) || (intervals - intervals.round()).abs() > 1e-9 {
            return Err(HarnessError::Config(format!(
                "grid step {} must divide {}",
                self.step,
                SCAN_HIGH - SCAN_LOW
            )));
        }
        Ok(intervals.round() as usize + 1)
    }
}

fn check_lengths(lengths: &[usize]) -> Result<()> {
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(HarnessError::Config("lengths must be a nonempty list of values >= 1".into()));
    }
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
