//! Dense labelled matrices, permanent kernels and band structure.

mod band;
mod matrix;
mod permanent;

pub use band::{bandwidths_of, random_banded_matrix, Bandwidths, StructuralMask, DEFAULT_ZERO_TOL};
pub use matrix::Matrix;
pub use permanent::{
    laplace_extend, per_naive, per_rect, per_ryser_glynn, subpermanent_family, GLYNN_MAX, NAIVE_MAX,
};
