//! Seeded random test objects: Ginibre matrices, Haar-like states and
//! unitaries, and uniformly distributed Bloch vectors.
//!
//! Every routine takes the caller's generator so a single 64-bit seed fixes
//! all draws of a run.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{normalize, CMatrix, C64};
use crate::spatial::MeasurementSetting;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Normalized complex Gaussian vector (uniform on the unit sphere).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Some(v) = normalize(&v) {
            return v;
        }
    }
}

/// `rows × cols` matrix with orthonormal columns (Gram–Schmidt on Gaussian
/// columns).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v = random_state(rng, rows);
        for _ in 0..2 {
            for b in &basis {
                let ov = crate::numerics::inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= ov * y;
                }
            }
        }
        if let Some(v) = normalize(&v).filter(|_| crate::numerics::norm(&v) > 1e-6) {
            basis.push(v);
        }
    }
    CMatrix::from_columns(&basis).expect("nonempty basis")
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    random_isometry(rng, dim, dim)
}

/// Uniform point on the unit sphere.
pub fn random_bloch_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Qubit setting with uniformly distributed Bloch vector.
pub fn random_setting<R: Rng + ?Sized>(rng: &mut R) -> MeasurementSetting {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    MeasurementSetting::Bloch {
        theta: z.acos(),
        phi: rng.gen_range(0.0..std::f64::consts::TAU),
    }
}

/// Qudit setting given by a random basis rotation.
pub fn random_basis_setting<R: Rng + ?Sized>(rng: &mut R, d: usize) -> MeasurementSetting {
    MeasurementSetting::Basis(random_unitary(rng, d))
}
