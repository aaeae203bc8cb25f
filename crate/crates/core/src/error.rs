use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid frequencies: {0}")]
    InvalidFrequencies(String),

    #[error("degenerate frequencies: |ω1 - ω2| = {gap:e} is below 1e-12")]
    DegenerateFrequencies { gap: f64 },

    #[error("point is not on the reality surface: largest imaginary part of ξ is {max_imag:e}")]
    NotOnRealitySurface { max_imag: f64 },

    #[error("step too large: dt·max(ω) = {product} exceeds the stability guard {limit}")]
    StepTooLarge { product: f64, limit: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("the free parameter b must be nonzero")]
    ZeroParameter,

    #[error("polynomials live in different phase spaces")]
    VariableMismatch,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("constraint set is not second class: bracket matrix is singular")]
    NotSecondClass,

    #[error("constraint bracket matrix has non-constant entry {0}")]
    NonConstantBracket(String),

    #[error("non-polynomial input: {0}")]
    NonPolynomial(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "jet space too small: total derivative needs order {needed}, space holds up to {available}"
    )]
    JetOrderExceeded { needed: usize, available: usize },

    #[error("Hermite order {n} exceeds the supported maximum {max}")]
    OrderTooLarge { n: usize, max: usize },

    #[error("quadrature diverges: effective Gaussian exponent {exponent} is not positive")]
    QuadratureDivergence { exponent: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("caustic at T = {t}: sin({frequency}·T) = {sine:e} ({frequency} = {omega})")]
    Caustic {
        frequency: &'static str,
        omega: f64,
        t: f64,
        sine: f64,
    },

    #[error("singular denominator (ε²+1)·sin T - 2iε·cos T at T = {t}")]
    SingularDenominator { t: f64 },

    #[error("ε must be positive, got {0}")]
    NonpositiveEpsilon(f64),

    #[error("ε must satisfy |ε| < 1, got {0}")]
    InvalidEpsilon(f64),

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
