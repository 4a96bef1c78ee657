//! Exact computational algebra for finite categories:
//! finitely presented abelian groups, cochain complexes of small categories,
//! an extension calculus for categories extended by abelian automorphism data,
//! truncated p-adic units, Adams automorphisms of truncated discrete p-toral
//! groups, and a monomial-matrix obstruction demo in the projective special
//! unitary group.

pub mod abgrp;
pub mod adams;
pub mod cobar;
pub mod extension;
pub mod fincat;
pub mod padic;
pub mod psu;

pub use abgrp::{AbHom, AbVec, PresentedAbGroup};
pub use adams::{AdamsAut, DimShiftReport, PToralData, WeylReport};
pub use cobar::{Cochain, CochainComplex, Cohomology, CohomologyClass};
pub use extension::{ExtMorphism, Extension, Section};
pub use fincat::{AbFunctor, FinCat};
pub use padic::UnitModPk;
pub use psu::{MonomialMatrix, PSUElement, SectionReport};

/// Errors shared across the crate.
#[derive(Clone, Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("no solution")]
    NoSolution,
}

pub type Result<T> = std::result::Result<T, Error>;
