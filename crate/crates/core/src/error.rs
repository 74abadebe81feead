use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({u}, {v}) lies outside the chart domain")]
    Domain { u: f64, v: f64 },

    #[error("non-finite value while evaluating {what} at ({u}, {v})")]
    NonFinite { what: &'static str, u: f64, v: f64 },

    #[error("degenerate: ∇K = 0 at ({u}, {v})")]
    GradientVanishes { u: f64, v: f64 },

    #[error("gradient of the angle function vanishes at ({u}, {v})")]
    AngleGradientVanishes { u: f64, v: f64 },

    #[error("degenerate point ({u}, {v}): obstruction polynomial vanishes identically")]
    DegeneratePoint { u: f64, v: f64 },

    #[error("singular propagation: {quantity} vanishes")]
    SingularPropagation { quantity: &'static str },

    #[error("flat point at ({u}, {v}): nu^2 = {nu_sq} exceeds the admissible bound")]
    FlatPoint { u: f64, v: f64, nu_sq: f64 },

    #[error("integrability check failed at ({u}, {v}): {what} = {residual:e}")]
    Integrability { u: f64, v: f64, what: &'static str, residual: f64 },

    #[error("frame integration diverged at ({u}, {v}): Gram drift {drift:e}")]
    IntegrationDiverged { u: f64, v: f64, drift: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("{0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
