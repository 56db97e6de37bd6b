//! Experiment harness and command-line front end for message coding over
//! the deletion channel.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod info;
pub mod pool;
pub mod seeds;
pub mod seqio;
pub mod table;

pub use config::{DecodingExperimentConfig, LengthMode, ScanConfig, TamperExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiments::{
    decoding_experiment, run_decoding_experiment, run_param_scan, run_tamper_experiment, tamper_assignment,
    tamper_experiment,
};
pub use table::{DecodingRow, ResultTable, ScanRow, TamperRow};
