//! Synchronous composition of two deterministic machines.
//!
//! The product runs both machines on the symbols emitted by the first one:
//! from `(s, t)` it emits `x` with `g1`'s probability and moves to
//! `(T1(s,x), T2(t,x))`. The product need not be strongly connected, so the
//! composition is restricted to an absorbing strongly connected component.

use crate::error::{Error, Result};
use crate::graph::absorbing_components;
use crate::linalg::Matrix;
use crate::pfsa::{MachineKind, Pfsa};

#[derive(Debug, Clone)]
pub struct SyncComposition {
    pub composed: Pfsa,
    /// `(s, t)` label of each composed state, sorted.
    pub state_pairs: Vec<(usize, usize)>,
    pub source_sizes: (usize, usize),
}

impl SyncComposition {
    /// Composed states paired with `s`.
    pub fn partners_of(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.state_pairs
            .iter()
            .enumerate()
            .filter(move |(_, &(a, _))| a == s)
            .map(|(i, _)| i)
    }
}

fn check_inputs(g1: &Pfsa, g2: &Pfsa) -> Result<()> {
    if g1.kind() != MachineKind::Deterministic || g2.kind() != MachineKind::Deterministic {
        return Err(Error::NotDeterministic);
    }
    if g1.alphabet() != g2.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    if !g1.is_strongly_connected() || !g2.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    Ok(())
}

/// Successor of `t` in `g2`; when `g2` cannot emit the symbol there the
/// second coordinate stays put (the pair then has infinite divergence).
fn second_successor(g2: &Pfsa, t: usize, x: usize) -> usize {
    g2.successor(t, x).unwrap_or(t)
}

/// All absorbing components of the product, ordered by their smallest pair.
pub fn all_sync_compositions(g1: &Pfsa, g2: &Pfsa) -> Result<Vec<SyncComposition>> {
    check_inputs(g1, g2)?;
    let (m1, m2) = (g1.num_states(), g2.num_states());
    let k = g1.num_symbols();
    let id = |s: usize, t: usize| s * m2 + t;

    let mut adj = vec![Vec::new(); m1 * m2];
    for s in 0..m1 {
        for t in 0..m2 {
            for x in 0..k {
                if let Some(s2) = g1.successor(s, x) {
                    let v = id(s2, second_successor(g2, t, x));
                    if !adj[id(s, t)].contains(&v) {
                        adj[id(s, t)].push(v);
                    }
                }
            }
        }
    }

    let mut components = absorbing_components(&adj);
    if components.is_empty() {
        return Err(Error::NoAbsorbingComponent);
    }
    // vertices are sorted within a component and ids order pairs lexicographically
    components.sort_by_key(|c| c[0]);
    components
        .into_iter()
        .map(|component| restrict(g1, g2, &component))
        .collect()
}

/// The composition on the canonical absorbing component: the one holding
/// the lexicographically smallest `(s, t)` among all absorbing components.
pub fn sync_composition(g1: &Pfsa, g2: &Pfsa) -> Result<SyncComposition> {
    all_sync_compositions(g1, g2)?
        .into_iter()
        .next()
        .ok_or(Error::NoAbsorbingComponent)
}

fn restrict(g1: &Pfsa, g2: &Pfsa, component: &[usize]) -> Result<SyncComposition> {
    let m2 = g2.num_states();
    let n = component.len();
    let state_pairs: Vec<(usize, usize)> = component.iter().map(|&v| (v / m2, v % m2)).collect();
    let local = |s: usize, t: usize| {
        state_pairs
            .binary_search(&(s, t))
            .expect("absorbing component is closed")
    };
    let mut gamma = vec![Matrix::zeros(n, n); g1.num_symbols()];
    for (i, &(s, t)) in state_pairs.iter().enumerate() {
        for (x, g) in gamma.iter_mut().enumerate() {
            if let Some(s2) = g1.successor(s, x) {
                let j = local(s2, second_successor(g2, t, x));
                g[(i, j)] = g1.state_to_symbol()[(s, x)];
            }
        }
    }
    let composed = Pfsa::new(g1.alphabet().clone(), gamma, MachineKind::Deterministic)?;
    Ok(SyncComposition {
        composed,
        state_pairs,
        source_sizes: (g1.num_states(), m2),
    })
}
