use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),
    #[error("model: {0}")]
    Model(String),
    #[error("gamma pole at z = {0}")]
    GammaPole(i64),
    #[error("domain: {0}")]
    Domain(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("kernel iteration diverged: {0}")]
    Divergence(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("boundary too close to a zero near {re}{im:+}i; subdivide or shift the contour")]
    BoundaryTooClose { re: f64, im: f64 },
    #[error("precision: {0}")]
    Precision(String),
    #[error("pole proximity: z is within {0:e} of a pole")]
    PoleProximity(f64),
    #[error("data: {0}")]
    Data(String),
    #[error("config: {path}: {msg}")]
    Config { path: String, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
