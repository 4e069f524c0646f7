//! Standard gates and single-qudit states.
//!
//! Conventions: C-phase is `diag(1, 1, 1, −1)`; C-not takes the
//! lower-indexed (first tensor) qubit as control.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{c, CMatrix, C64, ONE, ZERO};

pub fn hadamard() -> CMatrix {
    CMatrix::from_real(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]])
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// `diag(1, e^{iα})`.
pub fn phase(alpha: f64) -> CMatrix {
    CMatrix::from_diag(&[ONE, C64::from_polar(1.0, alpha)])
}

/// `exp(−iθZ/2)`.
pub fn rz(theta: f64) -> CMatrix {
    CMatrix::from_diag(&[
        C64::from_polar(1.0, -theta / 2.0),
        C64::from_polar(1.0, theta / 2.0),
    ])
}

/// `exp(−iθX/2)`.
pub fn rx(theta: f64) -> CMatrix {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    CMatrix::from_rows(&[vec![c(co, 0.0), c(0.0, -si)], vec![c(0.0, -si), c(co, 0.0)]]).unwrap()
}

pub fn cz() -> CMatrix {
    CMatrix::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, -1.0],
    ])
}

pub fn cnot() -> CMatrix {
    CMatrix::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// Swap of two `d`-level systems.
pub fn swap(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, col| {
        let (a, b) = (col / d, col % d);
        if r == b * d + a {
            ONE
        } else {
            ZERO
        }
    })
}

pub fn ket(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

pub fn plus() -> Vec<C64> {
    vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]
}

pub fn minus() -> Vec<C64> {
    vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]
}
