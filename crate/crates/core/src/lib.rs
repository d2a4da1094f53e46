//! Spectral Galerkin candidates and interval-arithmetic existence
//! certificates for the Neumann two-point boundary value problem
//! `u'' = f(x, u, u')`, `u'(0) = u'(1) = 0`.
//!
//! The pipeline computes a floating-point candidate in a weighted cosine
//! basis, then proves a true solution exists nearby via a Newton-Kantorovich
//! test whose constants are bounded with outward-rounded interval
//! arithmetic: a residual bound, a verified lower bound on the bijectivity
//! modulus of the linearization, and a Lipschitz constant for the
//! derivative. See the `certify` binary for the command-line entry point.

pub mod cli;
pub mod expr;
pub mod galerkin;
pub mod interval;
pub mod linalg;
pub mod par;
pub mod rigor;
pub mod series;
