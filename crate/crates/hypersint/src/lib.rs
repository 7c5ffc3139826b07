//! Bound states, separable wavefunctions and the symmetry algebra of two
//! superintegrable potentials on the upper sheet of the two-sheeted
//! hyperboloid w0² − w1² − w2² = 1.

pub mod error;
pub mod specfun;
pub mod geometry;
pub mod potential1;
pub mod potential2;
pub mod interbasis;
pub mod algebra;
pub mod cli;
mod solve;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
