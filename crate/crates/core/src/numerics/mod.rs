//! Dense complex linear algebra.

mod matrix;
pub mod gates;
pub mod register;
mod svd;

pub use matrix::{
    equal_up_to_global_phase, fidelity, inner, kron, kron_vec, norm, normalize, CMatrix, C64,
};
pub use svd::{complete_to_unitary, orthonormal_completion, svd, Svd};

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
