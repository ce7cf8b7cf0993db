use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("deformation parameter must be positive and finite, got {0}")]
    InvalidQ(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("q-factorial of order {n} overflows the floating-point range")]
    Overflow { n: u32 },
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
}

pub type Result<T> = std::result::Result<T, QError>;
