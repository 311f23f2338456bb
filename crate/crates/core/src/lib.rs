//! Exact computations around the totaling functor from complexes of graded free
//! modules over `k[x_1, ..., x_d]` to semifree DG modules.
//!
//! Everything is exact: coefficients are rationals or elements of a prime field, and every
//! homological statement is verified by linear algebra on finite-dimensional graded pieces
//! inside an explicit [`Window`](graded::Window).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod complex;
pub mod crossing;
pub mod dg;
pub mod error;
pub mod field;
pub mod graded;
pub mod kchain;
pub mod linalg;
pub mod obstruction;
pub mod poly;
pub mod totaling;
pub mod univariate;

pub use error::Error;
pub use field::{Field, Scalar};
pub use poly::{Monomial, Poly, PolyRing, Ring};
