//! Entropy rate and KL divergence rate of machines, in bits per symbol.
//!
//! Rates come from stationary-weighted emission rows. The block quantities
//! `H_n` and `D_n` enumerate every length-`n` sequence and serve as
//! independent oracles for the rate formulas.

use rayon::prelude::*;

use crate::composition::{all_sync_compositions, SyncComposition};
use crate::deletion::M2Params;
use crate::error::{Error, Result};
use crate::pfsa::{MachineKind, Pfsa};

/// Largest number of sequences the block oracles will enumerate.
pub const MAX_ENUMERATION: usize = 1 << 20;

/// Shannon entropy of a probability vector, in bits.
pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

pub fn binary_entropy(a: f64) -> f64 {
    entropy(&[a, 1.0 - a])
}

/// `D(p‖q)` in bits with `0·log(0/q) = 0` and `+∞` when `p > 0 = q`.
pub fn categorical_kl(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).log2();
        }
    }
    total
}

pub fn binary_kl(a: f64, b: f64) -> f64 {
    categorical_kl(&[a, 1.0 - a], &[b, 1.0 - b])
}

/// `H(g) = Σ_s p_s H(P̃_{s,·})`.
///
/// Exact for deterministic machines and for generalized machines whose state
/// is fixed by the last symbol (e.g. deletion transforms of M2 machines).
/// For other generalized machines the value is only the state-conditional
/// entropy, and a warning is logged.
pub fn entropy_rate(machine: &Pfsa) -> Result<f64> {
    if machine.kind() == MachineKind::Generalized && !machine.is_symbol_synchronized() {
        log::warn!(
            "entropy rate of a generalized {}-state machine is not exact; cross-check with block_entropy",
            machine.num_states()
        );
    }
    let p = machine.stationary_distribution()?;
    let emission = machine.state_to_symbol();
    Ok(p.probs()
        .iter()
        .enumerate()
        .map(|(s, &ps)| ps * entropy(emission.row(s)))
        .sum())
}

/// Closed form `(ν h(μ) + (1−μ) h(ν)) / (1 − μ + ν)`.
pub fn entropy_rate_m2(params: M2Params) -> f64 {
    let M2Params { mu, nu } = params;
    (nu * binary_entropy(mu) + (1.0 - mu) * binary_entropy(nu)) / (1.0 - mu + nu)
}

/// KL divergence rate `D(g1‖g2)` through the synchronous composition:
/// `Σ_{(s,t)} p_c(s,t) D(P̃1_{s,·} ‖ P̃2_{t,·})`.
///
/// When the product has several absorbing components the smallest of their
/// values is returned: every component is reachable from every state of
/// `g1`, and the likelihood under `g2` is dominated by its best-aligned
/// component. With a single component this is the canonical composition.
///
/// Both machines must be deterministic and strongly connected over the same
/// alphabet. Returns `+∞` when `g1` can emit a symbol that `g2` cannot.
pub fn kl_rate(g1: &Pfsa, g2: &Pfsa) -> Result<f64> {
    let mut best = f64::INFINITY;
    for comp in all_sync_compositions(g1, g2)? {
        best = best.min(composition_kl(g1, g2, &comp)?);
    }
    Ok(best)
}

/// `Σ_{(s,t)} p_c(s,t) D(P̃1_{s,·} ‖ P̃2_{t,·})` over one absorbing component.
pub fn composition_kl(g1: &Pfsa, g2: &Pfsa, comp: &SyncComposition) -> Result<f64> {
    let pc = comp.composed.stationary_distribution()?;
    let (e1, e2) = (g1.state_to_symbol(), g2.state_to_symbol());
    Ok(comp
        .state_pairs
        .iter()
        .zip(pc.probs())
        .map(|(&(s, t), &w)| {
            if w == 0.0 {
                0.0
            } else {
                w * categorical_kl(e1.row(s), e2.row(t))
            }
        })
        .sum())
}

/// Closed form `(ν₁ D(μ₁‖μ₂) + (1−μ₁) D(ν₁‖ν₂)) / (1 − μ₁ + ν₁)`.
pub fn kl_rate_m2(a: M2Params, b: M2Params) -> f64 {
    (a.nu * binary_kl(a.mu, b.mu) + (1.0 - a.mu) * binary_kl(a.nu, b.nu)) / (1.0 - a.mu + a.nu)
}

fn enumeration_guard(k: usize, n: usize) -> Result<()> {
    match u32::try_from(n).ok().and_then(|n| k.checked_pow(n)) {
        Some(count) if count <= MAX_ENUMERATION => Ok(()),
        _ => Err(Error::EnumerationTooLarge { size: k, length: n }),
    }
}

/// `H_n(g) = −Σ_{|x|=n} p(x) log₂ p(x)` by exhaustive enumeration.
pub fn block_entropy(machine: &Pfsa, n: usize) -> Result<f64> {
    let k = machine.num_symbols();
    enumeration_guard(k, n)?;
    let p0 = machine.stationary_distribution()?;
    if n == 0 {
        return Ok(0.0);
    }
    let branches: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|x| {
            let mut next = vec![0.0; machine.num_states()];
            let prob = machine.step_into(p0.probs(), x, &mut next);
            if prob > 0.0 {
                entropy_subtree(machine, &next, prob, n - 1)
            } else {
                0.0
            }
        })
        .collect();
    Ok(branches.iter().sum())
}

fn entropy_subtree(machine: &Pfsa, p: &[f64], prob: f64, remaining: usize) -> f64 {
    if remaining == 0 {
        return -prob * prob.log2();
    }
    let mut next = vec![0.0; p.len()];
    let mut total = 0.0;
    for x in 0..machine.num_symbols() {
        let step = machine.step_into(p, x, &mut next);
        if step > 0.0 {
            total += entropy_subtree(machine, &next, prob * step, remaining - 1);
        }
    }
    total
}

/// `D_n(g1‖g2) = Σ_{|x|=n} p1(x) log₂(p1(x)/p2(x))` by exhaustive
/// enumeration; works for generalized machines too.
pub fn kl_block(g1: &Pfsa, g2: &Pfsa, n: usize) -> Result<f64> {
    if g1.alphabet() != g2.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let k = g1.num_symbols();
    enumeration_guard(k, n)?;
    let a0 = g1.stationary_distribution()?;
    let b0 = g2.stationary_distribution()?;
    if n == 0 {
        return Ok(0.0);
    }
    let pair = (g1, g2);
    let branches: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|x| {
            let mut a = vec![0.0; g1.num_states()];
            let mut b = vec![0.0; g2.num_states()];
            let pa = g1.step_into(a0.probs(), x, &mut a);
            if pa <= 0.0 {
                return 0.0;
            }
            let pb = g2.step_into(b0.probs(), x, &mut b);
            if pb <= 0.0 {
                return f64::INFINITY;
            }
            kl_subtree(pair, &a, &b, pa, pb, n - 1)
        })
        .collect();
    Ok(branches.iter().sum())
}

fn kl_subtree(
    (g1, g2): (&Pfsa, &Pfsa),
    a: &[f64],
    b: &[f64],
    pa: f64,
    pb: f64,
    remaining: usize,
) -> f64 {
    if remaining == 0 {
        return pa * (pa.log2() - pb.log2());
    }
    let mut na = vec![0.0; a.len()];
    let mut nb = vec![0.0; b.len()];
    let mut total = 0.0;
    for x in 0..g1.num_symbols() {
        let sa = g1.step_into(a, x, &mut na);
        if sa <= 0.0 {
            continue;
        }
        let sb = g2.step_into(b, x, &mut nb);
        if sb <= 0.0 {
            return f64::INFINITY;
        }
        total += kl_subtree((g1, g2), &na, &nb, pa * sa, pb * sb, remaining - 1);
    }
    total
}
