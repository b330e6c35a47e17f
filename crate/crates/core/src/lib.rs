//! Exact combinatorial Laplacians on finite simplicial complexes, with
//! spherical buildings of type A over finite fields as the main examples.
//!
//! The pipeline is: [`gf`] fields, [`building`] flag complexes over them,
//! [`complex`] storage with weights, [`laplace`] cochain operators,
//! [`spectra`] exact minimal polynomials and certified roots, and
//! [`harness`] verdicts, reports and caching.

pub mod building;
pub mod complex;
pub mod gf;
pub mod harness;
pub mod laplace;
pub mod spectra;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
