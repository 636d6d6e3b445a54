use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("unknown chart `{0}` (expected `flat` or `bump(a,r)`)")]
    UnknownChart(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resonant term Z^{k} Zbar^{l}: the cohomological equation has no primitive")]
    ResonantTerm { k: u32, l: u32 },

    #[error("coefficient `{name}` provides derivatives up to order {available}, order {required} is needed")]
    MissingDerivative {
        name: String,
        available: usize,
        required: usize,
    },

    #[error("symbol evaluated too close to H1 = 0 (|H1| = {0:.3e})")]
    DegenerateRegion(f64),

    #[error("potential Q violates the standing assumption sup|Q| < 1 (sup|Q| = {0:.6})")]
    QTooLarge(f64),

    #[error("Fourier cutoff not converged at index {index} (change {change:.3e})")]
    CutoffNotConverged { index: usize, change: f64 },

    #[error("vector occupies the top two Fourier modes of the cutoff")]
    BandOverflow,

    #[error("symbol Fourier coefficients have not decayed below 1e-12 by index {0}")]
    QuadratureFailure(usize),

    #[error("level k = {k} is degenerate: 2k+1 ± Q = {denominator} is not positive")]
    DegenerateLevel { k: u32, denominator: f64 },

    #[error("states are not degenerate: eigenvalues {0} and {1} differ")]
    NotDegenerate(f64, f64),

    #[error("test function support meets the forbidden region lambda0 <= W")]
    ForbiddenRegion,

    #[error("eigenvector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("power-law fit needs positive values, got {0}")]
    NonPositiveValue(f64),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(err: std::io::Error) -> Self {
        LabError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
