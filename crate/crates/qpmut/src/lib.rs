//! Exact-arithmetic algebras with potentials over species.
//!
//! The crate implements, over a species S = D₁ × … × D_n of finite-dimensional
//! division algebras presented by structure-constant tables:
//!
//! - truncated noncommutative formal power series over Z-freely generated
//!   S-bimodules ([`series`]),
//! - the cyclic-derivative calculus, the ideals R(P) and J(P), and truncated
//!   quotient dimensions ([`calculus`]),
//! - the trivial ⊕ reduced splitting of a potential ([`reduction`]),
//! - premutation and reduced mutation at a vertex, exchange-matrix mutation,
//!   and randomized nondegeneracy search ([`mutation`]).
//!
//! All arithmetic is exact (arbitrary-precision rationals by default, or a
//! prime field); every operation is graded-exact up to the explicit truncation
//! degree.

pub mod algebra;
pub mod calculus;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mutation;
pub mod reduction;
pub mod reports;
pub mod scalar;
pub mod series;
pub mod species;

pub use error::QpError;
pub use scalar::{Field, Scalar};
