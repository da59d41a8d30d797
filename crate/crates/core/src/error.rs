use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} must satisfy {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("amplitude singular at theta = {theta} (respect the minimum scattering angle)")]
    Singular { theta: f64 },

    #[error("fewer than one detector: pixel width {delta_theta} exceeds domain length {span}")]
    TooFewCells { delta_theta: f64, span: f64 },

    #[error("probability vector not normalized: sum = {sum}")]
    NotNormalized { sum: f64 },

    #[error("all cell weights vanish for the {channel} channel")]
    ZeroWeight { channel: &'static str },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("kernel overflow: combined exponent {exponent} out of range")]
    Overflow { exponent: f64 },

    #[error("matrix dimension {requested} exceeds cap {cap}; subsample the grid or raise the cap")]
    GridTooLarge { requested: usize, cap: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix not positive semidefinite: eigenvalue {eigenvalue}")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix not symmetric: |a_ij - a_ji| = {asymmetry}")]
    NotSymmetric { asymmetry: f64 },

    #[error("post-selected range contains no cells")]
    EmptySelection,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::Domain {
            what,
            requirement,
            value,
        }
    }
}
