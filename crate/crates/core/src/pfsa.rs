//! Probabilistic finite-state automata in Γ-expression form.
//!
//! A machine over an alphabet of `K` symbols with `m` states is a family of
//! `K` nonnegative `m×m` matrices `Γ_x`, where `Γ_x[s][s']` is the probability
//! of emitting `x` from state `s` and moving to `s'`. Their sum `P` is the
//! state-to-state chain and must be row-stochastic. In a deterministic machine
//! each row of each `Γ_x` has at most one nonzero entry; a generalized machine
//! may have several.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};
use crate::graph::strongly_connected_components;
use crate::linalg::Matrix;

/// Absolute tolerance for every stochasticity check.
pub const STOCHASTIC_TOL: f64 = 1e-12;
const ROUNDING_SLACK: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = labels.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(ValidationError::EmptyAlphabet.into());
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ValidationError::DuplicateLabel(s.clone()).into());
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// The alphabet `{"0", "1"}`.
    pub fn binary() -> Self {
        Alphabet::new(["0", "1"]).expect("binary alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.symbols
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.symbols.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    fn single_char_labels(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a textual sequence. With single-character labels the text is a
    /// plain concatenation (whitespace ignored); otherwise labels are
    /// whitespace-separated.
    pub fn parse_sequence(&self, text: &str) -> Result<SymbolSequence> {
        let lookup = |tok: &str| {
            self.index_of(tok)
                .ok_or_else(|| Error::UnknownSymbol(tok.to_string()))
        };
        let symbols = if self.single_char_labels() {
            let mut buf = [0u8; 4];
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect::<Result<Vec<_>>>()?
        } else {
            text.split_whitespace().map(lookup).collect::<Result<Vec<_>>>()?
        };
        Ok(SymbolSequence(symbols))
    }

    /// Inverse of [`Alphabet::parse_sequence`].
    pub fn format_sequence(&self, seq: &[usize]) -> String {
        let sep = if self.single_char_labels() { "" } else { " " };
        seq.iter()
            .map(|&i| self.symbols[i].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl Serialize for Alphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.symbols.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(d)?;
        Alphabet::new(labels).map_err(serde::de::Error::custom)
    }
}

/// A finite sequence of alphabet indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SymbolSequence(Vec<usize>);

impl SymbolSequence {
    /// Checks every index against the alphabet size.
    pub fn new(symbols: Vec<usize>, alphabet_size: usize) -> Result<Self> {
        check_symbols(&symbols, alphabet_size)?;
        Ok(SymbolSequence(symbols))
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for SymbolSequence {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for SymbolSequence {
    fn from(v: Vec<usize>) -> Self {
        SymbolSequence(v)
    }
}

impl FromIterator<usize> for SymbolSequence {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SymbolSequence(iter.into_iter().collect())
    }
}

fn check_symbols(symbols: &[usize], size: usize) -> Result<()> {
    match symbols.iter().find(|&&x| x >= size) {
        Some(&index) => Err(Error::SymbolOutOfRange { index, size }),
        None => Ok(()),
    }
}

fn check_probability_vector(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if let Some(v) = probs.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidDistribution(format!("entry {v} is not a probability")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Probability vector over machine states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution(Vec<f64>);

impl StateDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs)?;
        Ok(StateDistribution(probs))
    }

    pub fn point_mass(num_states: usize, state: usize) -> Self {
        let mut probs = vec![0.0; num_states];
        probs[state] = 1.0;
        StateDistribution(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_point_mass(&self) -> bool {
        self.0.iter().filter(|&&v| v != 0.0).count() == 1
    }
}

/// Next-symbol distribution, indexed by alphabet position.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicDerivative(Vec<f64>);

impl SymbolicDerivative {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs)?;
        Ok(SymbolicDerivative(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineKind {
    Deterministic,
    Generalized,
}

#[derive(Clone, PartialEq)]
pub struct Pfsa {
    alphabet: Alphabet,
    num_states: usize,
    gamma: Vec<Matrix>,
    kind: MachineKind,
    transition: Matrix,
    emission: Matrix,
}

impl fmt::Debug for Pfsa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pfsa")
            .field("alphabet", &self.alphabet.labels())
            .field("kind", &self.kind)
            .field("gamma", &self.gamma)
            .finish()
    }
}

impl Pfsa {
    /// Builds and validates a machine. Rows whose sum is within
    /// [`STOCHASTIC_TOL`] of one are rescaled; rows already within rounding
    /// error are kept verbatim so that serialization round trips are exact.
    pub fn new(alphabet: Alphabet, gamma: Vec<Matrix>, kind: MachineKind) -> Result<Self> {
        let num_states = gamma.first().map_or(0, Matrix::rows);
        validate_parts(&alphabet, num_states, &gamma, kind)?;
        let mut gamma = gamma;
        for s in 0..num_states {
            let sum: f64 = gamma.iter().map(|g| g.row(s).iter().sum::<f64>()).sum();
            if (sum - 1.0).abs() > ROUNDING_SLACK {
                for g in gamma.iter_mut() {
                    g.row_mut(s).iter_mut().for_each(|v| *v /= sum);
                }
            }
        }
        let transition = gamma
            .iter()
            .skip(1)
            .fold(gamma[0].clone(), |acc, g| acc.add(g));
        let mut emission = Matrix::zeros(num_states, alphabet.len());
        for (x, g) in gamma.iter().enumerate() {
            for (s, total) in g.row_sums().into_iter().enumerate() {
                emission[(s, x)] = total;
            }
        }
        Ok(Pfsa {
            alphabet,
            num_states,
            gamma,
            kind,
            transition,
            emission,
        })
    }

    /// Builds a deterministic machine from a successor table and emission
    /// probabilities: `emission[s][x]` is emitted from `s` and leads to
    /// `successor[s][x]`.
    pub fn from_transitions(
        alphabet: Alphabet,
        successor: &[Vec<usize>],
        emission: &[Vec<f64>],
    ) -> Result<Self> {
        let m = successor.len();
        let k = alphabet.len();
        if emission.len() != m
            || successor.iter().any(|r| r.len() != k)
            || emission.iter().any(|r| r.len() != k)
        {
            return Err(Error::Format("transition tables must be states × symbols".into()));
        }
        let mut gamma = vec![Matrix::zeros(m, m); k];
        for s in 0..m {
            for x in 0..k {
                let t = successor[s][x];
                if t >= m {
                    return Err(Error::Format(format!("successor {t} out of range")));
                }
                gamma[x][(s, t)] = emission[s][x];
            }
        }
        Pfsa::new(alphabet, gamma, MachineKind::Deterministic)
    }

    /// Checks the machine invariants: nonnegative Γ entries, row-stochastic
    /// `P`, and at most one successor per (state, symbol) when deterministic.
    pub fn validate(&self) -> std::result::Result<(), ValidationError> {
        validate_parts(&self.alphabet, self.num_states, &self.gamma, self.kind)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn kind(&self) -> MachineKind {
        self.kind
    }

    pub fn gamma(&self, symbol: usize) -> &Matrix {
        &self.gamma[symbol]
    }

    pub fn gammas(&self) -> &[Matrix] {
        &self.gamma
    }

    /// `P = Σ_x Γ_x`.
    pub fn state_to_state(&self) -> &Matrix {
        &self.transition
    }

    /// `P̃`, whose column `x` is `Γ_x·1`.
    pub fn state_to_symbol(&self) -> &Matrix {
        &self.emission
    }

    /// Successor of `state` on `symbol` in a deterministic machine, `None`
    /// when the symbol cannot be emitted there.
    pub fn successor(&self, state: usize, symbol: usize) -> Option<usize> {
        self.gamma[symbol].row(state).iter().position(|&v| v > 0.0)
    }

    /// True when every `Γ_x` has its nonzero entries in a single column, i.e.
    /// the current state is a function of the last emitted symbol.
    pub fn is_symbol_synchronized(&self) -> bool {
        self.gamma.iter().all(|g| {
            let mut cols = (0..self.num_states).filter(|&c| (0..self.num_states).any(|r| g[(r, c)] != 0.0));
            cols.next().is_some() && cols.next().is_none()
        })
    }

    pub fn is_strongly_connected(&self) -> bool {
        let adj: Vec<Vec<usize>> = (0..self.num_states)
            .map(|s| {
                (0..self.num_states)
                    .filter(|&t| self.transition[(s, t)] > 0.0)
                    .collect()
            })
            .collect();
        strongly_connected_components(&adj).len() == 1
    }

    /// Unique `p` with `pᵀP = pᵀ`, `Σp = 1`.
    pub fn stationary_distribution(&self) -> Result<StateDistribution> {
        if !self.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        let m = self.num_states;
        // (Pᵀ − I) p = 0 has rank m−1; swap its last equation for Σp = 1.
        let mut a = self.transition.transpose();
        for i in 0..m {
            a[(i, i)] -= 1.0;
        }
        a.row_mut(m - 1).iter_mut().for_each(|v| *v = 1.0);
        let mut rhs = vec![0.0; m];
        rhs[m - 1] = 1.0;
        let mut p = a.solve(&rhs)?;
        for v in p.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        Ok(StateDistribution(p))
    }

    /// Stationary distribution by repeated multiplication; cross-check only.
    pub fn stationary_by_power_iteration(&self, iterations: usize) -> Vec<f64> {
        let m = self.num_states;
        let mut p = vec![1.0 / m as f64; m];
        // lazy chain avoids oscillation on periodic machines
        for _ in 0..iterations {
            let next = self.transition.left_mul(&p);
            p = p.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        }
        p
    }

    /// Symbol marginal `pᵀP̃` under the stationary distribution.
    pub fn symbol_marginal(&self) -> Result<Vec<f64>> {
        let p = self.stationary_distribution()?;
        Ok(self.emission.left_mul(p.probs()))
    }

    /// One step of the likelihood recursion: returns the probability of
    /// emitting `symbol` from `p` and the normalized successor distribution
    /// `pᵀΓ_x / ‖pᵀΓ_x‖₁`.
    pub fn likelihood_step(
        &self,
        p: &StateDistribution,
        symbol: usize,
    ) -> Result<(f64, StateDistribution)> {
        if p.len() != self.num_states {
            return Err(Error::InvalidDistribution(format!(
                "expected {} states, got {}",
                self.num_states,
                p.len()
            )));
        }
        check_symbols(&[symbol], self.num_symbols())?;
        let mut next = vec![0.0; self.num_states];
        let prob = self.step_into(p.probs(), symbol, &mut next);
        if prob > 0.0 {
            Ok((prob, StateDistribution(next)))
        } else {
            Err(Error::ZeroLikelihood)
        }
    }

    /// Writes the normalized `pᵀΓ_x` into `out` and returns `‖pᵀΓ_x‖₁`.
    /// `out` is left unnormalized when the probability is zero.
    pub(crate) fn step_into(&self, p: &[f64], symbol: usize, out: &mut [f64]) -> f64 {
        let g = &self.gamma[symbol];
        out.iter_mut().for_each(|v| *v = 0.0);
        for (s, &ps) in p.iter().enumerate() {
            if ps == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(g.row(s)) {
                *o += ps * v;
            }
        }
        let prob: f64 = out.iter().sum();
        if prob > 0.0 {
            out.iter_mut().for_each(|v| *v /= prob);
        }
        prob
    }

    /// `−(1/n) Σ log₂ p(x_i | x^{i−1})` starting from the stationary
    /// distribution; `+∞` when some symbol has zero probability.
    pub fn negative_log_likelihood_rate(&self, seq: &[usize]) -> Result<f64> {
        let p0 = self.stationary_distribution()?;
        self.negative_log_likelihood_rate_from(seq, &p0)
    }

    /// As [`Pfsa::negative_log_likelihood_rate`] with an explicit initial
    /// state distribution.
    pub fn negative_log_likelihood_rate_from(
        &self,
        seq: &[usize],
        initial: &StateDistribution,
    ) -> Result<f64> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        if initial.len() != self.num_states {
            return Err(Error::InvalidDistribution("initial distribution has wrong length".into()));
        }
        check_symbols(seq, self.num_symbols())?;
        let mut p = initial.probs().to_vec();
        let mut next = vec![0.0; self.num_states];
        let mut total = 0.0;
        for &x in seq {
            let prob = self.step_into(&p, x, &mut next);
            if !(prob > 0.0) {
                return Ok(f64::INFINITY);
            }
            total -= prob.log2();
            std::mem::swap(&mut p, &mut next);
        }
        Ok(total / seq.len() as f64)
    }

    /// Infinite realization driven by `rng`, started from the stationary
    /// distribution.
    pub fn realization<R: Rng>(&self, mut rng: R) -> Result<Realization<'_, R>> {
        let p = self.stationary_distribution()?;
        let state = sample_index(p.probs().iter().copied(), rng.gen());
        Ok(Realization {
            machine: self,
            state,
            rng,
        })
    }

    /// Length-`n` realization, reproducible from `seed`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<SymbolSequence> {
        let realization = self.realization(ChaCha8Rng::seed_from_u64(seed))?;
        Ok(realization.take(n).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MachineDoc::from(self)).expect("machine serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MachineDoc =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Pfsa::try_from(doc)
    }
}

fn validate_parts(
    alphabet: &Alphabet,
    num_states: usize,
    gamma: &[Matrix],
    kind: MachineKind,
) -> std::result::Result<(), ValidationError> {
    if alphabet.is_empty() {
        return Err(ValidationError::EmptyAlphabet);
    }
    if gamma.len() != alphabet.len() {
        return Err(ValidationError::GammaCount {
            expected: alphabet.len(),
            found: gamma.len(),
        });
    }
    if num_states == 0 {
        return Err(ValidationError::NoStates);
    }
    for (x, g) in gamma.iter().enumerate() {
        if g.rows() != num_states || g.cols() != num_states {
            return Err(ValidationError::GammaShape {
                symbol: alphabet.symbols[x].clone(),
                states: num_states,
            });
        }
    }
    for s in 0..num_states {
        for (x, g) in gamma.iter().enumerate() {
            let row = g.row(s);
            if let Some((col, &value)) = row
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
            {
                return Err(ValidationError::NegativeEntry {
                    symbol: alphabet.symbols[x].clone(),
                    row: s,
                    col,
                    value,
                });
            }
            if kind == MachineKind::Deterministic && row.iter().filter(|&&v| v != 0.0).count() > 1 {
                return Err(ValidationError::Nondeterministic {
                    symbol: alphabet.symbols[x].clone(),
                    row: s,
                });
            }
        }
        let sum: f64 = gamma.iter().map(|g| g.row(s).iter().sum::<f64>()).sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(ValidationError::RowSum { row: s, sum });
        }
    }
    Ok(())
}

/// Index drawn from unnormalized `weights` with uniform variate `u ∈ [0,1)`.
fn sample_index(weights: impl Iterator<Item = f64> + Clone, u: f64) -> usize {
    let total: f64 = weights.clone().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Endless symbol stream emitted by a machine.
pub struct Realization<'a, R> {
    machine: &'a Pfsa,
    state: usize,
    rng: R,
}

impl<R> Realization<'_, R> {
    pub fn state(&self) -> usize {
        self.state
    }
}

impl<R: Rng> Iterator for Realization<'_, R> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let m = self.machine;
        let s = self.state;
        let symbol = sample_index(m.emission.row(s).iter().copied(), self.rng.gen());
        let row = m.gamma[symbol].row(s);
        self.state = if m.kind == MachineKind::Deterministic {
            row.iter().position(|&v| v > 0.0).unwrap_or(s)
        } else {
            sample_index(row.iter().copied(), self.rng.gen())
        };
        Some(symbol)
    }
}

#[derive(Serialize, Deserialize)]
struct MachineDoc {
    alphabet: Vec<String>,
    states: usize,
    gamma: BTreeMap<String, Vec<Vec<f64>>>,
    kind: MachineKind,
}

impl From<&Pfsa> for MachineDoc {
    fn from(m: &Pfsa) -> Self {
        MachineDoc {
            alphabet: m.alphabet.symbols.clone(),
            states: m.num_states,
            gamma: m
                .alphabet
                .symbols
                .iter()
                .cloned()
                .zip(m.gamma.iter().map(Matrix::to_rows))
                .collect(),
            kind: m.kind,
        }
    }
}

impl TryFrom<MachineDoc> for Pfsa {
    type Error = Error;

    fn try_from(doc: MachineDoc) -> Result<Self> {
        let alphabet = Alphabet::new(doc.alphabet)?;
        let mut gamma = Vec::with_capacity(alphabet.len());
        for label in alphabet.labels() {
            let rows = doc
                .gamma
                .get(label)
                .ok_or_else(|| Error::Format(format!("gamma missing for symbol {label:?}")))?;
            let g = Matrix::from_rows(rows)
                .filter(|g| g.rows() == doc.states && g.cols() == doc.states)
                .ok_or_else(|| {
                    Error::Format(format!(
                        "gamma for symbol {label:?} must be {0}x{0}",
                        doc.states
                    ))
                })?;
            gamma.push(g);
        }
        if let Some(extra) = doc.gamma.keys().find(|k| alphabet.index_of(k).is_none()) {
            return Err(Error::Format(format!("gamma given for unknown symbol {extra:?}")));
        }
        Pfsa::new(alphabet, gamma, doc.kind)
    }
}

impl Serialize for Pfsa {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MachineDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pfsa {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MachineDoc::deserialize(d)?;
        Pfsa::try_from(doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn m2(mu: f64, nu: f64) -> Pfsa {
        reference::m2_machine(mu, nu)
    }

    #[test]
    fn four_state_example_validates() {
        let g = reference::four_state_machine();
        assert_eq!(g.validate(), Ok(()));
        assert_eq!(g.kind(), MachineKind::Deterministic);
    }

    #[test]
    fn row_sum_violation_is_reported() {
        let g0 = Matrix::from_rows(&[vec![0.9]]).unwrap();
        let g1 = Matrix::from_rows(&[vec![0.2]]).unwrap();
        let err = Pfsa::new(Alphabet::binary(), vec![g0, g1], MachineKind::Deterministic).unwrap_err();
        match err {
            Error::InvalidMachine(ValidationError::RowSum { row: 0, sum }) => {
                assert!((sum - 1.1).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_entry_names_symbol_and_row() {
        let g0 = Matrix::from_rows(&[vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        let g1 = Matrix::from_rows(&[vec![0.0, 0.5], vec![0.0, 0.6]]).unwrap();
        let mut g1b = g1.clone();
        g1b[(1, 0)] = -0.1;
        let err = Pfsa::new(Alphabet::binary(), vec![g0, g1b], MachineKind::Generalized).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidMachine(ValidationError::NegativeEntry {
                symbol: "1".into(),
                row: 1,
                col: 0,
                value: -0.1
            })
        );
    }

    #[test]
    fn determinism_violation() {
        let g0 = Matrix::from_rows(&[vec![0.25, 0.25], vec![0.5, 0.0]]).unwrap();
        let g1 = Matrix::from_rows(&[vec![0.0, 0.5], vec![0.0, 0.5]]).unwrap();
        let err = Pfsa::new(Alphabet::binary(), vec![g0.clone(), g1.clone()], MachineKind::Deterministic)
            .unwrap_err();
        assert_eq!(
            err,
            Error::InvalidMachine(ValidationError::Nondeterministic {
                symbol: "0".into(),
                row: 0
            })
        );
        assert!(Pfsa::new(Alphabet::binary(), vec![g0, g1], MachineKind::Generalized).is_ok());
    }

    #[test]
    fn near_stochastic_rows_are_normalized() {
        let g0 = Matrix::from_rows(&[vec![0.3 + 5e-13]]).unwrap();
        let g1 = Matrix::from_rows(&[vec![0.7]]).unwrap();
        let g = Pfsa::new(Alphabet::binary(), vec![g0, g1], MachineKind::Deterministic).unwrap();
        let sum: f64 = g.state_to_symbol().row(0).iter().sum();
        assert!((sum - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn transition_matrices_of_four_state_example() {
        let g = reference::four_state_machine();
        let p = Matrix::from_rows(&[
            vec![0.3, 0.7, 0.0, 0.0],
            vec![0.0, 0.0, 0.6, 0.4],
            vec![0.8, 0.2, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
        ])
        .unwrap();
        let pt = Matrix::from_rows(&[vec![0.3, 0.7], vec![0.6, 0.4], vec![0.8, 0.2], vec![0.5, 0.5]])
            .unwrap();
        assert!(g.state_to_state().max_abs_diff(&p) < 1e-15);
        assert!(g.state_to_symbol().max_abs_diff(&pt) < 1e-15);
    }

    #[test]
    fn m2_transition_matrices() {
        let g = m2(0.3, 0.6);
        let p = Matrix::from_rows(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        assert!(g.state_to_state().max_abs_diff(&p) < 1e-15);
        assert!(g.state_to_symbol().max_abs_diff(&p) < 1e-15);
    }

    #[test]
    fn single_state_machine() {
        let g = reference::bernoulli(0.25);
        assert_eq!(g.state_to_state().to_rows(), vec![vec![1.0]]);
        assert_eq!(g.state_to_symbol().to_rows(), vec![vec![0.25, 0.75]]);
        assert!(g.is_strongly_connected());
        assert_eq!(g.stationary_distribution().unwrap().probs(), &[1.0]);
    }

    #[test]
    fn stationary_of_m2() {
        let p = m2(0.3, 0.6).stationary_distribution().unwrap();
        assert!((p.probs()[0] - 0.6 / 1.3).abs() < 1e-15);
        assert!((p.probs()[0] - 0.46154).abs() < 5e-6);
        assert!((p.probs()[1] - 0.53846).abs() < 5e-6);

        let p = m2(0.35, 0.35).stationary_distribution().unwrap();
        assert!((p.probs()[0] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn stationary_of_four_state_example() {
        // oracle: 200 lazy power iterations of the printed P
        let g = reference::four_state_machine();
        let p = g.stationary_distribution().unwrap();
        let power = g.stationary_by_power_iteration(2000);
        for (a, b) in p.probs().iter().zip(&power) {
            assert!((a - b).abs() < 1e-12);
        }
        let expected = [0.28986, 0.25362, 0.25362, 0.20290];
        for (a, b) in p.probs().iter().zip(expected) {
            assert!((a - b).abs() < 5e-6, "{a} vs {b}");
        }
        let residual: f64 = g
            .state_to_state()
            .left_mul(p.probs())
            .iter()
            .zip(p.probs())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(residual <= 1e-12);
    }

    #[test]
    fn unreachable_state_is_not_strongly_connected() {
        let g0 = Matrix::from_rows(&[vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        let g1 = Matrix::from_rows(&[vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        let g = Pfsa::new(Alphabet::binary(), vec![g0, g1], MachineKind::Generalized).unwrap();
        assert!(!g.is_strongly_connected());
        assert_eq!(g.stationary_distribution(), Err(Error::NotStronglyConnected));
        assert!(reference::four_state_machine().is_strongly_connected());
    }

    #[test]
    fn likelihood_step_on_m2_forces_state() {
        let g = m2(0.3, 0.6);
        let p = g.stationary_distribution().unwrap();
        let (prob, next) = g.likelihood_step(&p, 0).unwrap();
        assert!((prob - 0.46154).abs() < 5e-6);
        assert_eq!(next.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn likelihood_step_bernoulli() {
        let g = reference::bernoulli(0.25);
        let p = StateDistribution::point_mass(1, 0);
        let (prob, next) = g.likelihood_step(&p, 1).unwrap();
        assert_eq!(prob, 0.75);
        assert_eq!(next.probs(), &[1.0]);
    }

    #[test]
    fn zero_probability_step() {
        let g = reference::constant_zero_emitter();
        let p = g.stationary_distribution().unwrap();
        assert_eq!(g.likelihood_step(&p, 1), Err(Error::ZeroLikelihood));
        assert_eq!(g.negative_log_likelihood_rate(&[0, 0, 1]), Ok(f64::INFINITY));
    }

    #[test]
    fn nll_rate_of_short_m2_sequence() {
        let g = m2(0.3, 0.6);
        let l = g.negative_log_likelihood_rate(&[0, 1]).unwrap();
        let expected = -((0.6f64 / 1.3).log2() + 0.7f64.log2()) / 2.0;
        assert!((l - expected).abs() < 1e-15);
        assert!((l - 0.815025).abs() < 5e-7);
    }

    #[test]
    fn nll_rate_bernoulli_is_cross_entropy() {
        let q: f64 = 0.2;
        let g = reference::bernoulli(q);
        let x = [0, 1, 1, 0, 1, 1, 1];
        let n0 = 2.0;
        let n = x.len() as f64;
        let expected = -(n0 * q.log2() + (n - n0) * (1.0 - q).log2()) / n;
        assert!((g.negative_log_likelihood_rate(&x).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn nll_rate_errors() {
        let g = m2(0.3, 0.6);
        assert_eq!(g.negative_log_likelihood_rate(&[]), Err(Error::EmptySequence));
        assert_eq!(
            g.negative_log_likelihood_rate(&[0, 2]),
            Err(Error::SymbolOutOfRange { index: 2, size: 2 })
        );
    }

    #[test]
    fn generate_edge_cases() {
        let g = m2(0.3, 0.6);
        assert!(g.generate(0, 1).unwrap().is_empty());
        let z = reference::constant_zero_emitter().generate(500, 3).unwrap();
        assert!(z.iter().all(|&x| x == 0));
        assert_eq!(g.generate(100, 42).unwrap(), g.generate(100, 42).unwrap());
        assert_ne!(g.generate(100, 42).unwrap(), g.generate(100, 43).unwrap());
    }

    #[test]
    fn generated_symbol_frequency_matches_marginal() {
        let g = m2(0.3, 0.6);
        let n = 1_000_000;
        let x = g.generate(n, 7).unwrap();
        let zeros = x.iter().filter(|&&v| v == 0).count() as f64 / n as f64;
        assert!((zeros - 0.46154).abs() < 0.002, "{zeros}");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = reference::four_state_machine();
        let back = Pfsa::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);

        let text = r#"{"alphabet":["a","b"],"states":1,
            "gamma":{"a":[[0.123456789012345]],"b":[[0.876543210987655]]},
            "kind":"deterministic"}"#;
        let g = Pfsa::from_json(text).unwrap();
        assert_eq!(g.gamma(0)[(0, 0)], 0.123456789012345);
        let back = Pfsa::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_missing_symbol_is_rejected() {
        let text = r#"{"alphabet":["0","1"],"states":1,"gamma":{"0":[[1.0]]},"kind":"generalized"}"#;
        assert!(matches!(Pfsa::from_json(text), Err(Error::Format(_))));
    }

    #[test]
    fn sequence_text_round_trip() {
        let a = Alphabet::binary();
        let s = a.parse_sequence("0110\n").unwrap();
        assert_eq!(&*s, &[0, 1, 1, 0]);
        assert_eq!(a.format_sequence(&s), "0110");
        let words = Alphabet::new(["up", "down", "flat"]).unwrap();
        let s = words.parse_sequence("up flat  down").unwrap();
        assert_eq!(&*s, &[0, 2, 1]);
        assert_eq!(words.format_sequence(&s), "up flat down");
        assert_eq!(a.parse_sequence("012"), Err(Error::UnknownSymbol("2".into())));
    }
}
