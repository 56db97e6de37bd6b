//! Weighted-vote detection of an increased deletion probability.
//!
//! Each observed sequence is decoded against the codebook at the assumed
//! `δ`. Its excess `L(g_d(δ), x) − H(g_d(δ))` is compared against
//! `ε·D[d]`, where `D[m] = H(g_m(δ+η)) − H(g_m(δ))` is the entropy gain a
//! tamper of size `η` would cause. Sequences above the cutoff vote for
//! tampering with weight `D[d]`.

use serde::{Deserialize, Serialize};

use crate::codec::{Codebook, Decoder};
use crate::deletion::{m2_deletion_transform, ChannelConfig};
use crate::error::{Error, Result};
use crate::metrics::entropy_rate_m2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoteMode {
    /// Weighted fraction of sequences voting: `Σ_voting D[d] / Σ_all D[d]`.
    #[default]
    Normalized,
    /// `v / (S·k)` with `S = Σ_m D[m]`.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    pub delta: f64,
    pub eta: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub mode: VoteMode,
}

impl DetectionParams {
    pub fn new(delta: f64, eta: f64, epsilon: f64, mode: VoteMode) -> Result<Self> {
        let p = DetectionParams {
            delta,
            eta,
            epsilon,
            mode,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        ChannelConfig::new(self.delta)?;
        if !(self.eta > 0.0) || !(self.delta + self.eta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need eta > 0 and delta + eta < 1, got delta={} eta={}",
                self.delta, self.eta
            )));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon {} must be >= 0", self.epsilon)));
        }
        Ok(())
    }
}

/// Per-sequence outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceVote {
    /// Decoded message, `None` when every machine scored `+∞`.
    pub decoded: Option<usize>,
    /// `L(g_d(δ), x) − H(g_d(δ))`; NaN for excluded sequences.
    pub excess: f64,
    pub voted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamperVerdict {
    pub tampered: bool,
    pub vote_fraction: f64,
    pub per_sequence: Vec<SequenceVote>,
}

/// Decoded message and excess of one sequence, independent of `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub decoded: Option<usize>,
    pub excess: f64,
}

/// Precomputed entropies and decoder for a codebook, `δ` and `η`.
#[derive(Debug, Clone)]
pub struct TamperDetector {
    decoder: Decoder,
    baseline: Vec<f64>,
    gap: Vec<f64>,
}

impl TamperDetector {
    pub fn new(book: &Codebook, delta: f64, eta: f64) -> Result<Self> {
        DetectionParams::new(delta, eta, 0.0, VoteMode::Normalized)?;
        let mut baseline = Vec::with_capacity(book.len());
        let mut gap = Vec::with_capacity(book.len());
        for (message, &p) in book.machines().iter().enumerate() {
            let h0 = entropy_rate_m2(m2_deletion_transform(p, delta)?);
            let h1 = entropy_rate_m2(m2_deletion_transform(p, delta + eta)?);
            let d = h1 - h0;
            if !(d > 0.0) {
                return Err(Error::NonPositiveEntropyGap { message, gap: d });
            }
            baseline.push(h0);
            gap.push(d);
        }
        Ok(TamperDetector {
            decoder: Decoder::for_delta(book, delta)?,
            baseline,
            gap,
        })
    }

    /// `H(g_m(δ))` per message.
    pub fn baseline_entropy(&self) -> &[f64] {
        &self.baseline
    }

    /// `D[m] = H(g_m(δ+η)) − H(g_m(δ))`.
    pub fn entropy_gap(&self) -> &[f64] {
        &self.gap
    }

    pub fn assess(&self, seq: &[usize]) -> Result<Assessment> {
        match self.decoder.decode(seq) {
            Ok(r) => Ok(Assessment {
                decoded: Some(r.message),
                excess: r.best_score() - self.baseline[r.message],
            }),
            Err(Error::AllScoresInfinite) => Ok(Assessment {
                decoded: None,
                excess: f64::NAN,
            }),
            Err(e) => Err(e),
        }
    }

    /// Applies the vote to already assessed sequences.
    pub fn vote(&self, assessed: &[Assessment], epsilon: f64, mode: VoteMode) -> Result<TamperVerdict> {
        if assessed.is_empty() {
            return Err(Error::InvalidConfig("at least one sequence is required".into()));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon {epsilon} must be >= 0")));
        }
        let mut votes = 0.0;
        let mut weight = 0.0;
        let per_sequence: Vec<SequenceVote> = assessed
            .iter()
            .map(|a| {
                let voted = match a.decoded {
                    Some(d) => {
                        weight += self.gap[d];
                        let voted = a.excess > epsilon * self.gap[d];
                        if voted {
                            votes += self.gap[d];
                        }
                        voted
                    }
                    None => false,
                };
                SequenceVote {
                    decoded: a.decoded,
                    excess: a.excess,
                    voted,
                }
            })
            .collect();
        let vote_fraction = match mode {
            VoteMode::Normalized if weight > 0.0 => votes / weight,
            VoteMode::Normalized => 0.0,
            VoteMode::Strict => {
                let total: f64 = self.gap.iter().sum();
                votes / (total * assessed.len() as f64)
            }
        };
        Ok(TamperVerdict {
            tampered: vote_fraction > 0.5,
            vote_fraction,
            per_sequence,
        })
    }
}

/// Runs the weighted vote over `sequences`; `T = 1` iff the vote fraction
/// exceeds one half.
pub fn detect(book: &Codebook, sequences: &[Vec<usize>], params: DetectionParams) -> Result<TamperVerdict> {
    params.check()?;
    if sequences.is_empty() {
        return Err(Error::InvalidConfig("at least one sequence is required".into()));
    }
    let detector = TamperDetector::new(book, params.delta, params.eta)?;
    let assessed = sequences
        .iter()
        .map(|s| detector.assess(s))
        .collect::<Result<Vec<_>>>()?;
    detector.vote(&assessed, params.epsilon, params.mode)
}
