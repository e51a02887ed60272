//! Numerical toolkit for 1D heteroclinic connections of vector Allen-Cahn
//! potentials, their linearization and effective potential, and layered
//! minimizers on 2D strips with continuation in the strip length.
//!
//! The numerical core is generic over the floating scalar (see [`Real`]);
//! `f64` aliases for the main types are exported at the crate root.

pub mod battery;
pub mod connect1d;
pub mod effpot;
pub mod grid;
pub mod io;
pub mod layers;
pub mod linalg;
pub mod potential;
pub mod scalar;
pub mod spectrum;
pub mod strip2d;
pub mod translate;

pub use scalar::{lit, Real};

/// Default scalar for the shipped binaries and file formats.
pub type Scalar = f64;

pub type Grid1D64 = grid::Grid1D<f64>;
pub type Grid2D64 = grid::Grid2D<f64>;
pub type Profile1D64 = grid::Profile1D<f64>;
pub type Field2D64 = grid::Field2D<f64>;
pub type BuiltinPotential64 = potential::BuiltinPotential<f64>;
