use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("linear coupling |k| must be positive")]
    ZeroLinearCoupling,
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("order {name} must be at least {min}, got {value}")]
    OrderTooSmall {
        name: &'static str,
        min: u32,
        value: u32,
    },
    #[error("empty sample list")]
    EmptySamples,
    #[error("invalid step size {0}")]
    InvalidStep(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("singular linear block during boundary inversion")]
    SingularBlock,
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("at grid value {value}: {source}")]
    AtGridPoint {
        value: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
}

impl Error {
    /// True for errors caused by the request itself rather than by evaluation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::UnknownFigure(_) | Error::OrderTooSmall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
