//! Boson Sampling simulation.
//!
//! * [`linalg`]: labelled dense matrices, permanent kernels, band structure.
//! * [`photonics`]: beamsplitter layers, shallow circuits, Haar unitaries.
//! * [`fock`]: occupation and qudit bookkeeping and exact probabilities.
//! * [`treedec`]: tree decompositions of matrix graphs.
//! * [`cp_permanent`]: permanents by dynamic programming over a decomposition.
//! * [`samplers`]: chain-rule samplers, including the shallow-circuit one.
//! * [`harness`]: validation statistics, benchmarks and command drivers.

pub mod cp_permanent;
pub mod error;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod photonics;
pub mod samplers;
pub mod scalar;
pub mod treedec;

pub use error::{Error, Result};

/// Double-precision complex amplitude.
pub type Complex = num_complex::Complex64;
/// Double-precision complex matrix.
pub type ComplexMatrix = linalg::Matrix<Complex>;
/// Single-precision complex matrix.
pub type ComplexMatrix32 = linalg::Matrix<num_complex::Complex32>;
/// Exact rational matrix.
pub type RationalMatrix = linalg::Matrix<num_rational::Rational64>;
