//! Phase retrieval for finite Hermite expansions from magnitudes of their
//! Bargmann transform sampled on two parallel arithmetic progressions.

// `!(x > 0.0)` is the NaN-rejecting form used for input validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the matrix formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod factorization;
pub mod fock_core;
pub mod lattice_geometry;
mod linalg;
pub mod io;
pub mod retrieval;

pub use error::{Error, Result};
pub use num_complex::Complex64;
