use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// First violated machine invariant found by [`crate::Pfsa::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate alphabet label {0:?}")]
    DuplicateLabel(String),
    #[error("machine has no states")]
    NoStates,
    #[error("expected {expected} gamma matrices (one per symbol), got {found}")]
    GammaCount { expected: usize, found: usize },
    #[error("gamma for symbol {symbol:?} is not {states}x{states}")]
    GammaShape { symbol: String, states: usize },
    #[error("gamma for symbol {symbol:?} has entry {value} at row {row}, column {col}")]
    NegativeEntry {
        symbol: String,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("row {row} of the state-to-state matrix sums to {sum}, not 1")]
    RowSum { row: usize, sum: f64 },
    #[error("row {row} of gamma for symbol {symbol:?} has more than one successor in a deterministic machine")]
    Nondeterministic { symbol: String, row: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid machine: {0}")]
    InvalidMachine(#[from] ValidationError),
    #[error("machine is not strongly connected")]
    NotStronglyConnected,
    #[error("machine is not deterministic")]
    NotDeterministic,
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },
    #[error("unknown symbol label {0:?}")]
    UnknownSymbol(String),
    #[error("sequence is empty")]
    EmptySequence,
    #[error("observed symbol has zero probability under the machine")]
    ZeroLikelihood,
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("deletion probability {0} outside [0, 1)")]
    InvalidDelta(f64),
    #[error("M2 parameters ({mu}, {nu}) must lie strictly inside (0, 1)")]
    InvalidM2Params { mu: f64, nu: f64 },
    #[error("enumeration of {size}^{length} sequences exceeds the 2^20 limit")]
    EnumerationTooLarge { size: usize, length: usize },
    #[error("singular linear system")]
    Singular,
    #[error("synchronous composition has no absorbing component")]
    NoAbsorbingComponent,
    #[error("message index {index} out of range for codebook of size {size}")]
    MessageOutOfRange { index: usize, size: usize },
    #[error("every codebook machine assigns zero likelihood to the sequence")]
    AllScoresInfinite,
    #[error("entropy gap for message {message} is {gap}, must be positive")]
    NonPositiveEntropyGap { message: usize, gap: f64 },
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed input: {0}")]
    Format(String),
}
