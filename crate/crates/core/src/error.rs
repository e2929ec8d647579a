use thiserror::Error;

/// Errors produced by the channel analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("parameter `{name}` = {value} is outside {range}")]
    ParameterOutOfRange { name: String, value: f64, range: &'static str },

    #[error("unknown channel constructor `{0}`")]
    UnknownChannel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("undefined for an entanglement-breaking channel (lambda_max = {lambda_max})")]
    EntanglementBreaking { lambda_max: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
