//! Exact-arithmetic birational geometry of projective surfaces.
//!
//! The crate models a surface as a Picard lattice: a base surface (Gram
//! matrix, canonical class, tracked irreducible curves) together with an
//! ordered tower of point blow-ups. All coefficients are exact rationals,
//! so every computed quantity is exact and every test is tolerance-free.
//!
//! On top of the lattice layer the crate provides:
//!
//! * divisor calculus along towers and contractions ([`divisors`]):
//!   pushforward, numerical pullback over a negative-definite exceptional
//!   locus, strict transforms, negativity checks;
//! * nefness, Zariski decomposition, bigness and volumes relative to the
//!   tracked curve set ([`positivity`]);
//! * generalized polarized pairs: b-divisor traces, discrepancies and
//!   glc/gklt classification, pair volumes ([`pairs`]);
//! * descent of nef divisors along birational morphisms of smooth
//!   surfaces by contracting `(-1)`-curves ([`descent`]);
//! * evaluators for explicit volume inequalities ([`bounds`]).
//!
//! Nefness, and hence pseudoeffectivity and volumes, are computed
//! *relative to the tracked curve set*. This is exact whenever the tracked
//! curves generate the effective cone (the projective plane with a line,
//! Hirzebruch surfaces with a section and a fibre, configurations of
//! exceptional curves) and a documented under-approximation otherwise.

pub mod bounds;
pub mod descent;
pub mod divisors;
pub mod lattice;
pub mod matrix;
pub mod pairs;
pub mod positivity;
pub mod rat;

pub use bounds::{BoundInstance, BoundReport};
pub use descent::{BlowDown, DescentResult, TrivialBlowupReport};
pub use divisors::{Contraction, NegativityCheck};
pub use lattice::{BaseSurface, BlowupCenter, DivisorClass, ModelId, SurfaceModel, TrackedCurve};
pub use pairs::{Carrier, GenPair, PairClass};
pub use positivity::{NefReport, ZariskiDecomposition};
pub use rat::Rat;

/// Errors surfaced by the engine. Every variant maps to a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("unknown curve name `{0}`")]
    UnknownCurveName(String),
    #[error("duplicate curve name `{0}`")]
    DuplicateCurveName(String),
    #[error("invalid multiplicity at center {center}: {reason}")]
    InvalidMultiplicity { center: usize, reason: String },
    #[error("invalid base surface: {0}")]
    InvalidBase(String),
    #[error("divisor does not live on the expected model")]
    ModelMismatch,
    #[error("exceptional intersection form is not negative definite")]
    SingularGram,
    #[error("divisor is not supported on the contracted curves")]
    NotExceptional,
    #[error("divisor is not pseudoeffective relative to the tracked curves")]
    NotPseudoeffective,
    #[error("`{name}` is not a (-1)-curve: {reason}")]
    NotMinusOneCurve { name: String, reason: String },
    #[error("divisor is not nef against tracked curves; violated by: {}", .0.join(", "))]
    NotNef(Vec<String>),
    #[error("contraction is not asserted to be a log resolution")]
    NotLogResolution,
    #[error("e parameter is not valid for this instance: K + eB + eM is not big")]
    EParamInvalid,
    #[error("blow-up nef criterion mismatch: {0}")]
    CriterionMismatch(String),
    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownCurveName(_) => "UnknownCurveName",
            Error::DuplicateCurveName(_) => "DuplicateCurveName",
            Error::InvalidMultiplicity { .. } => "InvalidMultiplicity",
            Error::InvalidBase(_) => "InvalidBase",
            Error::ModelMismatch => "ModelMismatch",
            Error::SingularGram => "SingularGram",
            Error::NotExceptional => "NotExceptional",
            Error::NotPseudoeffective => "NotPseudoeffective",
            Error::NotMinusOneCurve { .. } => "NotMinusOneCurve",
            Error::NotNef(_) => "NotNef",
            Error::NotLogResolution => "NotLogResolution",
            Error::EParamInvalid => "EParamInvalid",
            Error::CriterionMismatch(_) => "CriterionMismatch",
            Error::PreconditionUnmet(_) => "PreconditionUnmet",
            Error::Internal(_) => "Internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
