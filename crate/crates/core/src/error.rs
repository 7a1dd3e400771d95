use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent p = {p} <= 0 requires strictly positive heights")]
    NonPositiveExponentOnVanishingFunction { p: f64 },

    #[error("potential has zero or undefined gamma-norm")]
    ZeroPotential,

    #[error("shift by {shift} makes height {height} negative")]
    NegativeResult { height: f64, shift: f64 },

    #[error("no eigenvalue bracket after {expansions} expansions (last interval [{lo}, {hi}])")]
    BracketNotFound { expansions: usize, lo: f64, hi: f64 },

    #[error("sampled function has zero L2 norm")]
    ZeroFunction,

    #[error("spike train nu-norm {norm} >= 1; try spike height >= {suggested_height}")]
    NormBudgetExceeded { norm: f64, suggested_height: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),
}

impl Error {
    /// True for failures of the numerical procedure itself, as opposed to
    /// rejected inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::BracketNotFound { .. } | Error::NormBudgetExceeded { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPotential(_) => "InvalidPotential",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NonPositiveExponentOnVanishingFunction { .. } => {
                "NonPositiveExponentOnVanishingFunction"
            }
            Error::ZeroPotential => "ZeroPotential",
            Error::NegativeResult { .. } => "NegativeResult",
            Error::BracketNotFound { .. } => "BracketNotFound",
            Error::ZeroFunction => "ZeroFunction",
            Error::NormBudgetExceeded { .. } => "NormBudgetExceeded",
            Error::NonFinite(_) => "NonFinite",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
