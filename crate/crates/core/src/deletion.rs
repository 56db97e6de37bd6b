//! The i.i.d. deletion channel and its effect on machines.
//!
//! If `y` is a realization of `g` and each symbol of `y` is deleted
//! independently with probability `δ`, the surviving symbols are a
//! realization of the generalized machine `g(δ)` with
//! `Γ_{x,δ} = Q(P,δ) Γ_x`, where `Q(P,δ) = (1−δ)(I − δP)⁻¹`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pfsa::{Alphabet, MachineKind, Pfsa, SymbolSequence, SymbolicDerivative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelConfig {
    delta: f64,
}

impl ChannelConfig {
    pub fn new(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(ChannelConfig { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// Parameters of a two-state binary machine in the M2 class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawM2")]
pub struct M2Params {
    pub mu: f64,
    pub nu: f64,
}

#[derive(Deserialize)]
struct RawM2 {
    mu: f64,
    nu: f64,
}

impl TryFrom<RawM2> for M2Params {
    type Error = Error;

    fn try_from(raw: RawM2) -> Result<Self> {
        M2Params::new(raw.mu, raw.nu)
    }
}

impl M2Params {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        let inside = |v: f64| v > 0.0 && v < 1.0;
        if inside(mu) && inside(nu) {
            Ok(M2Params { mu, nu })
        } else {
            Err(Error::InvalidM2Params { mu, nu })
        }
    }

    /// `Γ_0 = [[μ,0],[ν,0]]`, `Γ_1 = [[0,1−μ],[0,1−ν]]`.
    pub fn machine(&self) -> Pfsa {
        let g0 = Matrix::from_rows(&[vec![self.mu, 0.0], vec![self.nu, 0.0]]).expect("2x2");
        let g1 = Matrix::from_rows(&[vec![0.0, 1.0 - self.mu], vec![0.0, 1.0 - self.nu]])
            .expect("2x2");
        Pfsa::new(Alphabet::binary(), vec![g0, g1], MachineKind::Deterministic)
            .expect("M2 parameters inside (0,1) give a valid machine")
    }

    /// Recovers `(μ, ν)` from a binary two-state machine whose `Γ_0` is
    /// confined to column 0 and `Γ_1` to column 1.
    pub fn from_machine(machine: &Pfsa) -> Option<Self> {
        if machine.num_states() != 2 || machine.num_symbols() != 2 {
            return None;
        }
        let (g0, g1) = (machine.gamma(0), machine.gamma(1));
        if g0[(0, 1)] != 0.0 || g0[(1, 1)] != 0.0 || g1[(0, 0)] != 0.0 || g1[(1, 0)] != 0.0 {
            return None;
        }
        M2Params::new(g0[(0, 0)], g0[(1, 0)]).ok()
    }

    /// Stationary probability of `s_0`, `ν / (1 − μ + ν)`.
    pub fn stationary_zero(&self) -> f64 {
        self.nu / (1.0 - self.mu + self.nu)
    }
}

/// Keeps each symbol independently with probability `1 − δ`.
pub fn transmit(x: &[usize], cfg: ChannelConfig, seed: u64) -> SymbolSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    transmit_with(x.iter().copied(), cfg, &mut rng).collect()
}

/// Lazily applies the channel to an input stream.
pub fn transmit_with<'r, I, R>(
    input: I,
    cfg: ChannelConfig,
    rng: &'r mut R,
) -> impl Iterator<Item = usize> + 'r
where
    I: IntoIterator<Item = usize>,
    I::IntoIter: 'r,
    R: Rng,
{
    let delta = cfg.delta;
    input
        .into_iter()
        .filter(move |_| rng.gen::<f64>() >= delta)
}

/// Output of [`transmit_until`].
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub output: SymbolSequence,
    /// Number of input symbols consumed to produce the output.
    pub input_len: usize,
}

/// Feeds `input` through the channel until `target` symbols survive.
/// Returns early with a short output only if `input` runs dry.
pub fn transmit_until<I, R>(input: I, target: usize, cfg: ChannelConfig, rng: &mut R) -> Transmission
where
    I: IntoIterator<Item = usize>,
    R: Rng,
{
    let mut output = Vec::with_capacity(target);
    let mut input_len = 0;
    if target > 0 {
        for x in input {
            input_len += 1;
            if rng.gen::<f64>() >= cfg.delta {
                output.push(x);
                if output.len() == target {
                    break;
                }
            }
        }
    }
    Transmission {
        output: output.into(),
        input_len,
    }
}

/// `Q(P, δ) = (1−δ)(I − δP)⁻¹`, rows renormalized to sum to one.
pub fn q_matrix(p: &Matrix, delta: f64) -> Result<Matrix> {
    check_delta(delta)?;
    let n = p.rows();
    let a = Matrix::identity(n).add(&p.scale(-delta));
    let mut q = a.inverse()?.scale(1.0 - delta);
    for i in 0..n {
        let row = q.row_mut(i);
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(q)
}

/// The machine generating the channel output: `Γ_{x,δ} = Q(P,δ)Γ_x`.
pub fn deletion_transform(machine: &Pfsa, delta: f64) -> Result<Pfsa> {
    if !machine.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let q = q_matrix(machine.state_to_state(), delta)?;
    let gamma = machine.gammas().iter().map(|g| q.matmul(g)).collect();
    Pfsa::new(machine.alphabet().clone(), gamma, MachineKind::Generalized)
}

/// Closed-form deletion transform inside M2:
/// `μ(δ) = (μ − δα)/(1 − δα)`, `ν(δ) = ν/(1 − δα)` with `α = μ − ν`.
pub fn m2_deletion_transform(params: M2Params, delta: f64) -> Result<M2Params> {
    check_delta(delta)?;
    let alpha = params.mu - params.nu;
    let denom = 1.0 - delta * alpha;
    Ok(M2Params {
        mu: (params.mu - delta * alpha) / denom,
        nu: params.nu / denom,
    })
}

/// Emission distribution of the single-state limit machine as `δ → 1`:
/// `x ↦ pᵀΓ_x 1` with `p` stationary.
pub fn deletion_limit(machine: &Pfsa) -> Result<SymbolicDerivative> {
    SymbolicDerivative::new(machine.symbol_marginal()?)
}
