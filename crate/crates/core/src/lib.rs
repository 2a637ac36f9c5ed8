//! Linearized Legendrian contact homology over the integers, finite fields
//! and the rationals.

pub mod algebra;
pub mod augment;
pub mod cli;
pub mod dga;
pub mod error;
pub mod format;
pub mod homology;
pub mod linearize;
pub mod matrix;
pub mod verify;

pub use error::{Error, Result};
