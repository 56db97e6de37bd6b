//! Message encoding as machine realizations and maximum-likelihood decoding.

use serde::{Deserialize, Serialize};

use crate::deletion::{m2_deletion_transform, ChannelConfig, M2Params};
use crate::error::{Error, Result};
use crate::pfsa::{Pfsa, StateDistribution, SymbolSequence};

/// Message `m` is carried by the M2 machine at position `m`. The decoder
/// assumes deletion probability `design_delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCodebook")]
pub struct Codebook {
    design_delta: f64,
    machines: Vec<M2Params>,
}

#[derive(Deserialize)]
struct RawCodebook {
    design_delta: f64,
    machines: Vec<M2Params>,
}

impl TryFrom<RawCodebook> for Codebook {
    type Error = Error;

    fn try_from(raw: RawCodebook) -> Result<Self> {
        Codebook::new(raw.machines, raw.design_delta)
    }
}

impl Codebook {
    pub fn new(machines: Vec<M2Params>, design_delta: f64) -> Result<Self> {
        ChannelConfig::new(design_delta)?;
        if machines.is_empty() {
            return Err(Error::InvalidCodebook("no machines".into()));
        }
        for (i, a) in machines.iter().enumerate() {
            M2Params::new(a.mu, a.nu)?;
            if let Some(j) = machines[..i].iter().position(|b| b == a) {
                return Err(Error::InvalidCodebook(format!(
                    "messages {j} and {i} share parameters ({}, {})",
                    a.mu, a.nu
                )));
            }
        }
        Ok(Codebook {
            design_delta,
            machines,
        })
    }

    pub fn machines(&self) -> &[M2Params] {
        &self.machines
    }

    pub fn design_delta(&self) -> f64 {
        self.design_delta
    }

    pub fn len(&self) -> usize {
        self.machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.machines.is_empty()
    }

    pub fn with_delta(&self, design_delta: f64) -> Result<Self> {
        Codebook::new(self.machines.clone(), design_delta)
    }

    pub fn machine(&self, message: usize) -> Result<Pfsa> {
        self.machines
            .get(message)
            .map(M2Params::machine)
            .ok_or(Error::MessageOutOfRange {
                index: message,
                size: self.machines.len(),
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("codebook serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Channel input for message `m`: a length-`n` realization of its machine.
pub fn encode(book: &Codebook, message: usize, n: usize, seed: u64) -> Result<SymbolSequence> {
    if n == 0 {
        return Err(Error::InvalidConfig("encoded length must be at least 1".into()));
    }
    book.machine(message)?.generate(n, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub message: usize,
    /// Per-message negative log-likelihood rate in bits/symbol (`+∞` when
    /// the machine cannot produce the sequence).
    pub scores: Vec<f64>,
}

impl DecodeResult {
    pub fn best_score(&self) -> f64 {
        self.scores[self.message]
    }
}

/// Scores sequences against every codebook machine after the deletion
/// transform.
#[derive(Debug, Clone)]
pub struct Decoder {
    machines: Vec<Pfsa>,
    initial: Vec<StateDistribution>,
}

impl Decoder {
    /// Decoder for `book.design_delta()`.
    pub fn new(book: &Codebook) -> Self {
        Self::for_delta(book, book.design_delta()).expect("codebook delta already validated")
    }

    /// Decoder assuming deletion probability `delta`.
    pub fn for_delta(book: &Codebook, delta: f64) -> Result<Self> {
        Self::from_params(book.machines(), delta)
    }

    /// Decoder over an arbitrary parameter list; repeats are allowed.
    pub fn from_params(params: &[M2Params], delta: f64) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidCodebook("no machines".into()));
        }
        let machines = params
            .iter()
            .map(|&p| m2_deletion_transform(p, delta).map(|t| t.machine()))
            .collect::<Result<Vec<_>>>()?;
        let initial = machines
            .iter()
            .map(Pfsa::stationary_distribution)
            .collect::<Result<Vec<_>>>()?;
        Ok(Decoder { machines, initial })
    }

    pub fn machines(&self) -> &[Pfsa] {
        &self.machines
    }

    pub fn scores(&self, seq: &[usize]) -> Result<Vec<f64>> {
        self.machines
            .iter()
            .zip(&self.initial)
            .map(|(g, p0)| g.negative_log_likelihood_rate_from(seq, p0))
            .collect()
    }

    /// Minimum-score message; ties go to the lowest index.
    pub fn decode(&self, seq: &[usize]) -> Result<DecodeResult> {
        let scores = self.scores(seq)?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s < scores[best] {
                best = i;
            }
        }
        if scores[best].is_infinite() {
            return Err(Error::AllScoresInfinite);
        }
        Ok(DecodeResult {
            message: best,
            scores,
        })
    }
}

/// `argmin_m L(g_m(δ), x)` with `δ = book.design_delta()`.
pub fn decode(book: &Codebook, seq: &[usize]) -> Result<DecodeResult> {
    Decoder::new(book).decode(seq)
}
