//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty support")]
    EmptySupport,
    #[error("non-finite sample")]
    NonFinite,
    #[error("flux not uniformly convex at exponent β")]
    NotUniformlyConvex,
    #[error("entropy not convex")]
    EntropyNotConvex,
    #[error("flux not convex over the state range")]
    FluxNotConvex,
    #[error("cfl exceeded")]
    CflExceeded,
    #[error("blowup")]
    Blowup,
    #[error("use exact_riemann for entropic data")]
    EntropicData,
    #[error("velocity support exceeded")]
    VelocitySupportExceeded,
    #[error("non-commensurate shift")]
    NonCommensurateShift,
    #[error("monotonicity hypothesis fails, theorem inapplicable")]
    HypFViolated,
    #[error("support escape: {0}")]
    SupportEscape(String),
    #[error("too few valid shifts: {0} (need at least 4)")]
    TooFewShifts(usize),
    #[error("missing certificate")]
    MissingCertificate,
    #[error("corrected lower bound violated: {0}")]
    BoundViolated(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
