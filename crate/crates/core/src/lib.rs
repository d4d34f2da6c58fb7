//! Coulomb branches of 3d N=4 gauge theories at desk scale.
//!
//! The crate is organized bottom-up:
//!
//! - [`series`]: exact truncated power series in the grading variable `t`,
//!   optionally refined by Laurent fugacity monomials.
//! - [`linalg`]: small integer-matrix routines (Smith invariants, unimodular
//!   column reduction, lattice kernels).
//! - [`theory`]: gauge theories `(G, N)` built from general-linear and torus
//!   factors, quivers, and exact sequences of tori.
//! - [`format`]: the line-oriented text formats for theories, quivers and
//!   torus sequences.
//! - [`monopole`]: the monopole-formula Hilbert series.
//! - [`abelian`]: the classical and quantized Coulomb branch algebra of a torus
//!   gauge theory, its Poisson bracket and finite presentations.
//! - [`higgs`]: brute-force Higgs branch dimensions and the toric duality check.
//! - [`checks`]: seeded randomized property suites shared by the CLI and tests.

pub mod abelian;
pub mod checks;
pub mod format;
pub mod higgs;
pub mod linalg;
pub mod monopole;
pub mod series;
pub mod theory;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
