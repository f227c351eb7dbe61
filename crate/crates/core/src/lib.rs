//! Exact computation of loop operations on quasi-surfaces: Fox-derivative
//! braces, gate braces, homological and homotopy intersection forms, the
//! quasi-Lie 2- and 3-brackets, and their evaluation at matrix
//! representations.

pub mod algebra;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod fox;
pub mod homology;
pub mod homotopy;
pub mod quasi_lie;
pub mod sample;
pub mod surface;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
