//! Bi-free products of bipartite two-faced probability spaces with a reflection.
//!
//! The crate is organised bottom-up:
//!
//! - [`ncpoly`]: words and sparse noncommutative polynomials over positive-face
//!   generators and their reflections, kept in bipartite normal form.
//! - [`component`]: finite-dimensional matrix realizations of a single
//!   component `(A_i, A_i⁺, A_i⁻, θ_i, τ_i)` and the moment oracle
//!   `τ_i(θ(a)b)` consumed by the product.
//! - [`bifree`]: centered alternating decompositions and the product
//!   functional `τ` on the bi-free product.
//! - [`fock`]: an independent check of `τ` as a vacuum expectation on a
//!   truncated free product of the component Hilbert spaces.
//! - [`positivity`]: Gram matrices, PSD certification, Schur products and the
//!   reflection-positivity harness for the product.
//! - [`cli`]: the JSON model-file format and the command implementations
//!   behind the `bifree` binary.

pub mod bifree;
pub mod cli;
pub mod component;
pub mod error;
pub mod fock;
pub mod ncpoly;
pub mod positivity;
pub mod random;

pub use bifree::{BiFreeSystem, CenteredTerm, Config, LocalElement};
pub use component::{check_component_rp, schmidt_state, MatrixModel, MomentOracle};
pub use error::{Error, Result};
pub use fock::FreeProductSpace;
pub use ncpoly::{GeneratorRef, Letter, NCPoly, Scalar, Word};
pub use positivity::{build_gram, hadamard, verify_theorem, GramReport, TheoremReport, TheoremStatus};
