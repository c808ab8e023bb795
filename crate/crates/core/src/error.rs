use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("repeated qubit index {0}")]
    RepeatedQubit(usize),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid partial trace: {0}")]
    PartialTrace(String),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("invalid noise model: {0}")]
    Noise(String),
    #[error("invalid experiment parameters: {0}")]
    Parameter(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("{0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed data in {path}: {msg}")]
    Data { path: String, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Data { .. } => 3,
            _ => 2,
        }
    }
}
