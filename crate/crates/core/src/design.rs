//! Codebook design: random initialization away from the `μ = ν` line,
//! then steepest-ascent hill climbing on the minimum pairwise symmetrized
//! KL divergence rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::Codebook;
use crate::deletion::M2Params;
use crate::error::{Error, Result};
use crate::metrics::kl_rate_m2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignConfig {
    pub num_messages: usize,
    pub step_sigma: f64,
    pub margin: f64,
    pub bounds: (f64, f64),
    pub max_iters: usize,
    pub seed: u64,
    /// Deletion probability stored in the produced codebook.
    pub design_delta: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            num_messages: 10,
            step_sigma: 0.01,
            margin: 0.2,
            bounds: (0.05, 0.95),
            max_iters: 1000,
            seed: 0,
            design_delta: 0.2,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::InvalidConfig(format!("bounds ({lo}, {hi}) must satisfy 0 < lo < hi < 1")));
        }
        if !(self.step_sigma > 0.0 && self.step_sigma < hi - lo) {
            return Err(Error::InvalidConfig(format!(
                "step size {} must lie in (0, {})",
                self.step_sigma,
                hi - lo
            )));
        }
        if !(0.0..0.5).contains(&self.margin) {
            return Err(Error::InvalidConfig(format!("margin {} must lie in [0, 0.5)", self.margin)));
        }
        if self.num_messages < 2 {
            return Err(Error::InvalidConfig("at least two messages are required".into()));
        }
        Ok(())
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.bounds.0, self.bounds.1)
    }
}

/// Draws `μ ~ U(0,1)` and `ν` uniformly from `(0, μ − margin)` when `μ > ½`,
/// otherwise from `(μ + margin, 1)`, intersected with the bounds; `μ` is then
/// clamped to the bounds. A draw whose `ν` range is empty after intersection
/// is discarded.
pub fn init_codebook(cfg: &DesignConfig) -> Result<Codebook> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut machines: Vec<M2Params> = Vec::with_capacity(cfg.num_messages);
    while machines.len() < cfg.num_messages {
        let mu: f64 = rng.gen();
        let Some((a, b)) = nu_range(cfg, mu) else {
            continue;
        };
        let nu = rng.gen_range(a..b);
        let p = M2Params::new(cfg.clamp(mu), nu)?;
        if !machines.contains(&p) {
            machines.push(p);
        }
    }
    Codebook::new(machines, cfg.design_delta)
}

/// Interval for `ν` given an unclamped `μ`, or `None` if it is empty.
fn nu_range(cfg: &DesignConfig, mu: f64) -> Option<(f64, f64)> {
    let (a, b) = if mu > 0.5 {
        (0.0, mu - cfg.margin)
    } else {
        (mu + cfg.margin, 1.0)
    };
    let (a, b) = (a.max(cfg.bounds.0), b.min(cfg.bounds.1));
    (a < b).then_some((a, b))
}

fn symmetric_kl(a: M2Params, b: M2Params) -> f64 {
    0.5 * (kl_rate_m2(a, b) + kl_rate_m2(b, a))
}

/// Closest pair under symmetrized divergence, lowest `(i, j)` on ties.
fn closest_pair(machines: &[M2Params]) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..machines.len() {
        for j in i + 1..machines.len() {
            let d = symmetric_kl(machines[i], machines[j]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// Minimum over pairs of `½(D(g_i‖g_j) + D(g_j‖g_i))`, in bits/symbol.
/// A single-machine book has no pairs and scores `+∞`.
pub fn objective(book: &Codebook) -> f64 {
    objective_of(book.machines())
}

fn objective_of(machines: &[M2Params]) -> f64 {
    closest_pair(machines).2
}

/// Steepest-ascent search over the eight axis moves of the closest pair.
///
/// Moves are tried in the order `μ_i+σ, μ_i−σ, ν_i+σ, ν_i−σ` for the first
/// machine of the pair, then the same for the second; the strictly best
/// improvement wins, earlier moves on ties. Stops at a local optimum or
/// after `max_iters` accepted moves.
pub fn hill_climb(book: &Codebook, cfg: &DesignConfig) -> Result<Codebook> {
    let machines = hill_climb_params(book.machines().to_vec(), cfg)?;
    Codebook::new(machines, book.design_delta())
}

/// [`hill_climb`] on a bare parameter list, which may contain repeats.
pub fn hill_climb_params(mut machines: Vec<M2Params>, cfg: &DesignConfig) -> Result<Vec<M2Params>> {
    cfg.validate()?;
    if machines.len() < 2 {
        return Err(Error::InvalidConfig("hill climbing needs at least two machines".into()));
    }
    let mut current = objective_of(&machines);
    let sigma = cfg.step_sigma;
    for _ in 0..cfg.max_iters {
        let (i, j, _) = closest_pair(&machines);
        let mut best: Option<(usize, M2Params, f64)> = None;
        for idx in [i, j] {
            let p = machines[idx];
            let moves = [
                (p.mu + sigma, p.nu),
                (p.mu - sigma, p.nu),
                (p.mu, p.nu + sigma),
                (p.mu, p.nu - sigma),
            ];
            for (mu, nu) in moves {
                let candidate = M2Params::new(cfg.clamp(mu), cfg.clamp(nu))?;
                if candidate == p {
                    continue;
                }
                let saved = machines[idx];
                machines[idx] = candidate;
                let value = objective_of(&machines);
                machines[idx] = saved;
                if value > current && best.as_ref().is_none_or(|b| value > b.2) {
                    best = Some((idx, candidate, value));
                }
            }
        }
        match best {
            Some((idx, candidate, value)) => {
                machines[idx] = candidate;
                current = value;
            }
            None => break,
        }
    }
    Ok(machines)
}

/// Initialization followed by hill climbing.
pub fn design_codebook(cfg: &DesignConfig) -> Result<Codebook> {
    hill_climb(&init_codebook(cfg)?, cfg)
}
