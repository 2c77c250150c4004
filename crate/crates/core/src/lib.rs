//! Exact computations for type A A-infinity algebras and their mirrors.
//!
//! The crate covers grading bookkeeping, sparse polynomials with Gröbner
//! bases, Jacobian rings of the superpotential `-u1...un + sum r_j u_j^a`,
//! critical point analysis, quantum cohomology Frobenius algebras, Clifford
//! algebras, A-infinity structures with their Hochschild operations, and
//! minimal models of Koszul matrix factorizations.

pub mod ainfinity;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod grading;
pub mod jacobian;
pub mod groebner;
pub mod linalg;
pub mod matfact;
pub mod poly;
pub mod quantum;
pub mod scalar;
pub mod superpotential;

pub use error::{Error, Result};
