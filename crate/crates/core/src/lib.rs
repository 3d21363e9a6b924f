//! Chebyshev–Padé approximants of real algebraic functions on `E = [-1, 1]`,
//! the mixed Green-logarithmic equilibrium problems that govern their
//! convergence, and stationary (S-property) compacts.
//!
//! The crate is organised bottom-up:
//!
//! * [`chebseries`]: Chebyshev coefficients of catalog functions and series
//!   arithmetic at arbitrary precision.
//! * [`cpade`]: linear (Frobenius) and nonlinear (Baker) Chebyshev–Padé
//!   approximants, with pole extraction.
//! * [`equilibrium`]: compacts and their Green functions, the equilibrium
//!   measure `λ(θ)`, potentials, balayage and the S-property residual.
//! * [`scompact`]: search for the energy-maximizing compact over circline
//!   arcs through a conjugate pair of branch points.
//! * [`harness`]: convergence-rate and pole-distribution experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebseries;
pub mod cpade;
pub mod equilibrium;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mp;
pub mod scompact;
mod serde_num;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The guide's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/approximants.md")]
    mod approximants {}
    #[doc = include_str!("../../../book/src/equilibrium.md")]
    mod equilibrium {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    mod stationary {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
