use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("layer {layer} of input {input} does not exist")]
    InvalidLayer { input: usize, layer: usize },
    #[error("unsupported constellation dimensionality {0} (quadrature handles 1 or 2 real dimensions)")]
    UnsupportedDimension(usize),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("infeasible decoding order: {0}")]
    InfeasibleOrder(String),
    #[error("malformed order specification `{0}`")]
    OrderSyntax(String),
    #[error("constraint system is infeasible")]
    Infeasible,
    #[error("projection left a non-redundant constraint with mixed-sign coefficients: {0}")]
    MixedSignProjection(String),
    #[error("rate too high for rate matching: {info_bits} information bits do not fit {coded_bits} coded bits")]
    RateTooHigh { info_bits: usize, coded_bits: usize },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("io error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
