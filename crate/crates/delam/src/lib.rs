//! Delamination analysis with structural cohesive elements.
//!
//! Plies are modelled as flat triangular shells (constant-strain membrane plus
//! the Allman cubic plate), and interfaces as cohesive elements whose opening is
//! reconstructed from the shell mid-plane kinematics. Units are N, mm and MPa
//! throughout; material tables in GPa and kJ/m² are converted on entry.

pub mod analytic;
pub mod cohesive;
pub mod error;
pub mod laminate;
pub mod mesh;
pub mod plate;
pub mod quadrature;
pub mod shell;
pub mod skyline;
pub mod solver;

pub use error::{Error, Result};
