use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: expected {expected} qubits, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("invalid Pauli literal `{0}`")]
    InvalidPauli(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("gate matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("layer supports overlap on qubit {0}")]
    OverlappingSupports(usize),

    #[error("empty layer")]
    EmptyLayer,

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),

    #[error("unknown builtin topology `{0}`")]
    UnknownBuiltin(String),

    #[error("topology parse error on line {line}: {message}")]
    TopologyParse { line: usize, message: String },

    #[error("term budget of {max_terms} exceeded at layer {layer} ({terms} terms)")]
    BudgetExceeded {
        layer: usize,
        terms: usize,
        max_terms: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{n_qubits} qubits exceeds the statevector oracle cap of {cap}")]
    OracleCap { n_qubits: usize, cap: usize },

    #[error("unsupported ensemble: {0}")]
    UnsupportedEnsemble(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
