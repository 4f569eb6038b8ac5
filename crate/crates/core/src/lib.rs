//! Exact quantum Schubert calculus for complete flag varieties.
//!
//! The crate builds the quantum cohomology ring of Fl_n over
//! Z[q_1, …, q_{n−1}] from Monk's rule alone, extracts the Gromov-Witten
//! structure polynomials C_{u,v,w}, and machine-checks the cyclic symmetry
//! of those polynomials together with its reduction corollaries and the
//! shift-invariance of the transition graph. A divided-difference /
//! coinvariant-algebra oracle validates the q → 0 limit independently of
//! the product engine.

pub mod cache;
pub mod class;
pub mod classical;
pub mod error;
pub mod graphs;
pub mod monk;
pub mod perm;
pub mod qpoly;
pub mod report;
pub mod ring;
pub mod rng;
pub mod symmetry;

pub use class::QHClass;
pub use classical::ClassicalOracle;
pub use error::Error;
pub use perm::Permutation;
pub use qpoly::{QMonomial, QPolynomial};
pub use report::VerifyReport;
pub use ring::{full_table, ProductTable};
pub use symmetry::ConventionProfile;
