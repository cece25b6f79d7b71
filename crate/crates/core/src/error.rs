use alloc::string::String;

/// Errors raised by the core library.
///
/// Every variant maps onto a `(module, code)` pair so front ends can emit
/// stable machine-readable diagnostics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidContext(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(&'static str),
    #[error("tolerance not met; best achieved radius {achieved:e}")]
    ToleranceNotMet { achieved: f64 },
    #[error("division by a ball containing zero")]
    DivisionByZero,

    #[error("-{d_k} is not a fundamental discriminant")]
    NotFundamental { d_k: u64 },
    #[error("Heegner hypothesis fails for d_K = {d_k}, N = {level}")]
    HeegnerHypothesis { d_k: u64, level: u64 },
    #[error("discriminant {disc} is not of the form -c^2 * {d_k}")]
    NotInField { disc: String, d_k: u64 },
    #[error("element is rational; it has no quadratic minimal polynomial")]
    RationalElement,

    #[error("q = {q} is ramified in K; ramified primes are not covered")]
    Ramified { q: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("normalisation phi(t) = 1/N fails: multiplier {multiplier} is not 1 mod {level}")]
    Normalization { multiplier: u64, level: u64 },

    #[error("invalid newform: {0}")]
    InvalidNewform(String),
    #[error("insufficient coefficients: need {required}, have {available}")]
    InsufficientCoefficients { required: usize, available: usize },
    #[error("point lies below the evaluation height: Im z = {im:e} < {y_min:e}")]
    BelowHeight { im: f64, y_min: f64 },
    #[error("a Fricke eigenvalue is required")]
    FrickeRequired,

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    /// Module that raised the error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidContext(_) | PrecisionExhausted(_) | ToleranceNotMet { .. } | DivisionByZero => "numerics",
            NotFundamental { .. } | HeegnerHypothesis { .. } | NotInField { .. } | RationalElement => "quadfield",
            Ramified { .. } | Precondition(_) => "isogeny",
            Normalization { .. } => "aj",
            InvalidNewform(_) | InsufficientCoefficients { .. } | BelowHeight { .. } => "modforms",
            FrickeRequired => "periods",
            Domain(_) => "asym",
        }
    }

    /// Short stable error code.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidContext(_) => "context",
            PrecisionExhausted(_) => "precision",
            ToleranceNotMet { .. } => "tolerance",
            DivisionByZero => "div-zero",
            NotFundamental { .. } => "discriminant",
            HeegnerHypothesis { .. } => "heegner",
            NotInField { .. } => "not-in-field",
            RationalElement => "rational",
            Ramified { .. } => "ramified",
            Precondition(_) => "precondition",
            Normalization { .. } => "normalization",
            InvalidNewform(_) => "invalid",
            InsufficientCoefficients { .. } => "coefficients",
            BelowHeight { .. } => "height",
            FrickeRequired => "fricke",
            Domain(_) => "domain",
        }
    }

    /// True for violated caller-side preconditions (as opposed to numerical failures).
    pub fn is_precondition(&self) -> bool {
        use Error::*;
        matches!(
            self,
            NotFundamental { .. }
                | HeegnerHypothesis { .. }
                | NotInField { .. }
                | RationalElement
                | Ramified { .. }
                | Precondition(_)
                | Normalization { .. }
                | FrickeRequired
                | BelowHeight { .. }
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
