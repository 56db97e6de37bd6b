//! Probabilistic finite-state automata (PFSA) over the i.i.d. deletion
//! channel.
//!
//! Messages are encoded as realizations of two-state binary machines, sent
//! through a channel that deletes each symbol with probability `δ`, and
//! decoded by maximum likelihood against the deletion-transformed machines.
//! The same likelihood scores drive a weighted-vote test for an increased
//! deletion probability.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codec;
pub mod composition;
pub mod deletion;
pub mod design;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod pfsa;
pub mod reference;
pub mod tamper;

pub use codec::{decode, encode, Codebook, DecodeResult, Decoder};
pub use composition::{all_sync_compositions, sync_composition, SyncComposition};
pub use deletion::{
    deletion_limit, deletion_transform, m2_deletion_transform, q_matrix, transmit, transmit_until,
    transmit_with, ChannelConfig, M2Params, Transmission,
};
pub use design::{design_codebook, hill_climb, hill_climb_params, init_codebook, objective, DesignConfig};
pub use error::{Error, Result, ValidationError};
pub use linalg::Matrix;
pub use metrics::{
    block_entropy, composition_kl, entropy_rate, entropy_rate_m2, kl_block, kl_rate, kl_rate_m2,
};
pub use pfsa::{
    Alphabet, MachineKind, Pfsa, Realization, StateDistribution, SymbolSequence,
    SymbolicDerivative,
};
pub use tamper::{
    detect, Assessment, DetectionParams, SequenceVote, TamperDetector, TamperVerdict, VoteMode,
};
