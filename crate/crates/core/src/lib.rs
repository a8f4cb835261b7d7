//! Exact and numeric verification of the local and global identities behind
//! a theta lift to GSp(1,1): Euler factors, spinor polynomials, character sums,
//! spherical-function toral integrals, eigenform data and period constants.

pub mod exact;
pub mod heckechar;
pub mod lfactors;
pub mod arakawa;
pub mod charsums;
pub mod eigenforms;
pub mod quadfield;
pub mod report;
pub mod spherical;
pub mod spinor;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("case/data mismatch: {0}")]
    CaseMismatch(String),
    #[error("enumeration guard exceeded: {0}")]
    Guard(String),
    #[error("no such character: {0}")]
    Character(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("precondition rejected: {0}")]
    Precondition(String),
}
