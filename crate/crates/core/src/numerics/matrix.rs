use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use super::{ONE, ZERO};
use crate::{Error, Result};

pub type C64 = Complex64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from real rows; handy for literal gates.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let ncols = rows[0].len();
        Self::from_fn(rows.len(), ncols, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), ncols, rows.concat())
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let nrows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != nrows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        if cols.is_empty() || nrows == 0 {
            return Err(Error::DimensionMismatch("empty column set".into()));
        }
        Ok(Self::from_fn(nrows, cols.len(), |r, c| cols[c][r]))
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |r, c| v[r] * w[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn set_column(&mut self, c: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (r, &x) in v.iter().enumerate() {
            self[(r, c)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * k).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖M†M − I‖_max` (infinite for non-square input).
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&CMatrix::identity(self.cols))
    }

    /// `‖M†M − I‖_max` on the column Gram matrix.
    pub fn isometry_error(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&CMatrix::identity(self.cols))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Conjugation `M ρ M†`.
    pub fn sandwich(&self, rho: &CMatrix) -> CMatrix {
        &(self * rho) * &self.adjoint()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows, b.cols);
    CMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v / ‖v‖`, or `None` for the zero vector.
pub fn normalize(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
}

/// `|⟨a|b⟩|²` for normalized inputs.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

/// True iff `|⟨a|b⟩| ≥ 1 − tol`.
pub fn equal_up_to_global_phase(a: &[C64], b: &[C64], tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "state lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    for v in [a, b] {
        let n = norm(v);
        if (n - 1.0).abs() > crate::config::TOL.normalization {
            return Err(Error::NotNormalized { norm: n });
        }
    }
    Ok(inner(a, b).norm() >= 1.0 - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use crate::random::{random_matrix, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kron_identity_and_projector_cases() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4));
        let p = CMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let expected = CMatrix::from_diag(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(kron(&p, &p), expected);
    }

    #[test]
    fn kron_acts_factorwise_on_product_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 2, 2);
        let x = random_state(&mut rng, 2);
        let y = random_state(&mut rng, 2);
        let lhs = kron(&a, &b).matvec(&kron_vec(&x, &y));
        let rhs = kron_vec(&a.matvec(&x), &b.matvec(&y));
        let err = lhs
            .iter()
            .zip(&rhs)
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "error {err}");
    }

    #[test]
    fn new_rejects_wrong_entry_count() {
        assert!(matches!(
            CMatrix::new(2, 2, vec![ONE; 3]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn global_phase_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(&mut rng, 4);
        let phase = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let rotated: Vec<C64> = psi.iter().map(|x| x * phase).collect();
        assert!(equal_up_to_global_phase(&psi, &rotated, 1e-10).unwrap());

        let zero = [ONE, ZERO];
        let one = [ZERO, ONE];
        assert!(!equal_up_to_global_phase(&zero, &one, 1e-10).unwrap());
        assert!(equal_up_to_global_phase(&zero, &[ONE, ZERO, ZERO], 1e-10).is_err());
    }

    // Perturbation oracle: for χ ⟂ ψ, ψ' = (ψ + εχ)/√(1+ε²) has
    // |⟨ψ|ψ'⟩| = 1/√(1+ε²) exactly, i.e. 1 − |⟨ψ|ψ'⟩| ≈ ε²/2.
    #[test]
    fn perturbation_is_detected_only_above_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = random_state(&mut rng, 4);
        let raw = random_state(&mut rng, 4);
        let ov = inner(&psi, &raw);
        let chi = normalize(
            &raw.iter()
                .zip(&psi)
                .map(|(r, p)| r - ov * p)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        for (eps, expect_equal) in [(1e-6, true), (1e-4, false), (1e-3, false)] {
            let perturbed =
                normalize(&psi.iter().zip(&chi).map(|(p, q)| p + q * eps).collect::<Vec<_>>())
                    .unwrap();
            let oracle = 1.0 / (1.0 + eps * eps).sqrt();
            assert!((inner(&psi, &perturbed).norm() - oracle).abs() < 1e-14);
            assert_eq!(
                equal_up_to_global_phase(&psi, &perturbed, 1e-10).unwrap(),
                expect_equal,
                "eps = {eps}"
            );
        }
    }

    #[test]
    fn sandwich_matches_explicit_product() {
        let m = CMatrix::from_fn(2, 2, |r, k| c(r as f64, k as f64 + 1.0));
        let rho = CMatrix::identity(2);
        assert_eq!(m.sandwich(&rho), &m * &m.adjoint());
    }
}
