use thiserror::Error;

/// Errors raised by the simulation engines and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("two-qubit operation needs distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("a state needs at least one qubit")]
    EmptyRegister,

    #[error("forced outcome {forced} is impossible: the outcome is deterministically {actual}")]
    ImpossibleOutcome { forced: i8, actual: i8 },

    #[error("subsets overlap on qubit {0}")]
    OverlappingSubsets(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("{n} qubits exceeds the dense engine limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("time {t} is not an integer multiple of the step {dt}")]
    NonIntegerSteps { t: f64, dt: f64 },

    #[error("sampled bitstring {bitstring} has zero ideal probability")]
    ZeroProbability { bitstring: String },

    #[error("non-positive input at position {index}: {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("optimizer did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("vanishing normalization at time index {0}")]
    VanishingNormalization(usize),

    #[error("table cache: {0}")]
    Cache(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
