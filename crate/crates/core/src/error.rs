use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{n_qubits} qubits exceeds the dense-representation cap of {cap} (set QSTFIDLAB_MAX_QUBITS to raise it)")]
    DimensionCap { n_qubits: usize, cap: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("sampler failed after {0} attempts")]
    SamplerFailure(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
