//! Small named machines used throughout the tests and examples.

use crate::deletion::M2Params;
use crate::pfsa::{Alphabet, Pfsa};

/// Four-state binary machine with emission rows (.3,.7), (.6,.4), (.8,.2),
/// (.5,.5) and successors 0→{0,1}, 1→{2,3}, 2→{0,1}, 3→{2,3}.
pub fn four_state_machine() -> Pfsa {
    Pfsa::from_transitions(
        Alphabet::binary(),
        &[vec![0, 1], vec![2, 3], vec![0, 1], vec![2, 3]],
        &[
            vec![0.3, 0.7],
            vec![0.6, 0.4],
            vec![0.8, 0.2],
            vec![0.5, 0.5],
        ],
    )
    .expect("four-state machine is valid")
}

/// Two-state binary machine: state `s_b` is entered after emitting `b`;
/// `s_0` emits 0 with probability `mu`, `s_1` with probability `nu`.
pub fn m2_machine(mu: f64, nu: f64) -> Pfsa {
    M2Params::new(mu, nu).expect("parameters inside (0,1)").machine()
}

/// Single-state i.i.d. source emitting 0 with probability `q`.
pub fn bernoulli(q: f64) -> Pfsa {
    Pfsa::from_transitions(Alphabet::binary(), &[vec![0, 0]], &[vec![q, 1.0 - q]])
        .expect("bernoulli machine is valid")
}

/// Two-state machine that emits 0 from every state.
pub fn constant_zero_emitter() -> Pfsa {
    Pfsa::from_transitions(
        Alphabet::binary(),
        &[vec![1, 0], vec![0, 1]],
        &[vec![1.0, 0.0], vec![1.0, 0.0]],
    )
    .expect("valid")
}

/// Three-state binary machine with successor table s --0--> s+1,
/// s --1--> s−1 (mod 3).
pub fn three_state_cycle(emit_zero: [f64; 3]) -> Pfsa {
    Pfsa::from_transitions(
        Alphabet::binary(),
        &[vec![1, 2], vec![2, 0], vec![0, 1]],
        &emit_zero.map(|q| vec![q, 1.0 - q]),
    )
    .expect("valid")
}
