//! Numerical laboratory for the Intermediate Long Wave equation
//!
//! `φ_t + T⁻¹φ_xx = ½(φ²)_x` on a periodic truncation of the line: a
//! pseudo-spectral ETDRK4 solver, the Fourier symbols of its normal form,
//! Littlewood-Paley tools, the linear kernel with its decay weights, and the
//! nonlinear vector field used to follow solutions up to cubic time scales.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod io;
pub mod linear_dispersion;
pub mod normal_form;
pub mod paradiff;
pub mod solver;
pub mod symbols;
pub mod vectorfield;

pub use error::{Error, Result};
pub use grid::{ComplexField, Dealias, DyadicIndex, Field, GridSpec, ProjectionMode};
