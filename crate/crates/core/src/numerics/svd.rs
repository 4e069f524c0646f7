//! One-sided (Hestenes) Jacobi SVD for complex matrices, plus isometry
//! completion by Gram–Schmidt over the canonical basis.

use super::matrix::{inner, norm, CMatrix, C64};
use super::{ONE, ZERO};
use crate::config::TOL;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `m = u · diag(s) · v_dag` with `k = min(rows, cols)` singular
/// values in descending order.
///
/// Gauge: the largest-magnitude entry of every column of `u` (first one on
/// ties) is real and nonnegative. Equal singular values keep the order in
/// which the Jacobi sweep produced them.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v_dag: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.s.len();
        let us = CMatrix::from_fn(self.u.rows(), k, |r, c| self.u[(r, c)] * self.s[c]);
        &us * &self.v_dag
    }

    /// Number of singular values strictly above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.s.iter().filter(|&&x| x > threshold).count()
    }
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    if m.rows() >= m.cols() {
        let (u, s, v) = jacobi_tall(m)?;
        Ok(finish(u, s, v.adjoint()))
    } else {
        // m† = U' Σ V'†  ⇒  m = V' Σ U'†
        let (u_t, s, v_t) = jacobi_tall(&m.adjoint())?;
        Ok(finish(v_t, s, u_t.adjoint()))
    }
}

/// Returns `(u, s, v)` with `a·v = u·diag(s)`, unsorted, for `rows ≥ cols`.
fn jacobi_tall(a: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let tol = f64::EPSILON * m as f64;
    // Columns at roundoff level relative to ‖a‖_F are never rotated; their
    // mutual orthogonality is meaningless and would stall convergence.
    let frob2: f64 = cols.iter().map(|c| norm(c).powi(2)).sum();
    let negligible = frob2 * (f64::EPSILON * f64::EPSILON);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norm(&cols[p]).powi(2);
                let beta = norm(&cols[q]).powi(2);
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0
                    || alpha <= negligible
                    || beta <= negligible
                    || g <= tol * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                // Rephase column q so the Gram entry becomes real, then apply
                // the real two-sided-diagonalizing rotation.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut cols, p, q, phase, cs, sn);
                rotate(&mut v, p, q, phase, cs, sn);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdNonConvergence { sweeps: MAX_SWEEPS });
    }

    let s: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * f64::EPSILON * (m.max(n) as f64);
    let mut u_cols: Vec<Option<Vec<C64>>> = cols
        .iter()
        .zip(&s)
        .map(|(c, &sv)| (sv > cutoff && sv > 0.0).then(|| c.iter().map(|x| x / sv).collect()))
        .collect();

    // Left vectors of (numerically) zero singular values come from completing
    // the others to an orthonormal set.
    if u_cols.iter().any(Option::is_none) {
        let known: Vec<Vec<C64>> = u_cols.iter().flatten().cloned().collect();
        let completed = orthonormal_completion(m, &known);
        let mut fill = completed.into_iter().skip(known.len());
        for slot in u_cols.iter_mut().filter(|c| c.is_none()) {
            *slot = fill.next();
        }
    }
    let u_cols: Vec<Vec<C64>> = u_cols.into_iter().map(Option::unwrap).collect();
    Ok((
        CMatrix::from_columns(&u_cols)?,
        s,
        CMatrix::from_columns(&v)?,
    ))
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, cs: f64, sn: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * phase;
        let xp = *x;
        *x = xp * cs - yq * sn;
        *y = xp * sn + yq * cs;
    }
}

fn finish(u: CMatrix, s: Vec<f64>, v_dag: CMatrix) -> Svd {
    let k = s.len();
    let mut order: Vec<usize> = (0..k).collect();
    // Stable: equal values keep sweep order.
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u_out = CMatrix::zeros(u.rows(), k);
    let mut v_out = CMatrix::zeros(k, v_dag.cols());
    let mut s_out = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let col = u.column(src);
        let mut pivot = ZERO;
        let mut best = -1.0;
        for &x in &col {
            if x.norm() > best {
                best = x.norm();
                pivot = x;
            }
        }
        let fix = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            ONE
        };
        u_out.set_column(dst, &col.iter().map(|x| x * fix).collect::<Vec<_>>());
        for c in 0..v_dag.cols() {
            v_out[(dst, c)] = v_dag[(src, c)] * fix.conj();
        }
        s_out.push(s[src]);
    }
    Svd {
        u: u_out,
        s: s_out,
        v_dag: v_out,
    }
}

/// Extends an orthonormal list to a basis of `C^dim` by modified
/// Gram–Schmidt over `e_0, e_1, …` in index order, skipping candidates whose
/// residual norm falls below the completion threshold. Input vectors are
/// returned first and unchanged.
pub fn orthonormal_completion(dim: usize, known: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = known.to_vec();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut cand = vec![ZERO; dim];
        cand[e] = ONE;
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let ov = inner(b, &cand);
                for (x, y) in cand.iter_mut().zip(b) {
                    *x -= ov * y;
                }
            }
        }
        let n = norm(&cand);
        if n < TOL.completion_skip {
            continue;
        }
        basis.push(cand.iter().map(|x| x / n).collect());
    }
    basis
}

/// Embeds an isometry (orthonormal columns, `cols ≤ rows`) as the leading
/// columns of a square unitary. The copied columns are bit-identical.
pub fn complete_to_unitary(iso: &CMatrix) -> Result<CMatrix> {
    if iso.cols() > iso.rows() {
        return Err(Error::DimensionMismatch(format!(
            "isometry with {} columns in dimension {}",
            iso.cols(),
            iso.rows()
        )));
    }
    let deviation = iso.isometry_error();
    if deviation > TOL.isometry {
        return Err(Error::NotIsometry { deviation });
    }
    let known: Vec<Vec<C64>> = (0..iso.cols()).map(|j| iso.column(j)).collect();
    let basis = orthonormal_completion(iso.rows(), &known);
    CMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use crate::random::{random_isometry, random_matrix};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_svd(m: &CMatrix) -> Svd {
        let d = svd(m).unwrap();
        let k = m.rows().min(m.cols());
        assert_eq!(d.s.len(), k);
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]), "not descending: {:?}", d.s);
        assert!(d.s.iter().all(|&x| x >= 0.0));
        assert!(d.u.isometry_error() <= 1e-12, "u not orthonormal");
        assert!(d.v_dag.adjoint().isometry_error() <= 1e-12, "v_dag rows not orthonormal");
        let err = d.reconstruct().max_abs_diff(m);
        assert!(err <= 1e-11, "reconstruction error {err}");
        d
    }

    #[test]
    fn identity_and_diagonal() {
        let d = check_svd(&CMatrix::identity(2));
        assert_eq!(d.s, vec![1.0, 1.0]);
        let d = check_svd(&CMatrix::from_real(&[&[3.0, 0.0], &[0.0, 0.0]]));
        assert!((d.s[0] - 3.0).abs() < 1e-15 && d.s[1] == 0.0);
    }

    #[test]
    fn random_tall_wide_and_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        check_svd(&random_matrix(&mut rng, 4, 2));
        check_svd(&random_matrix(&mut rng, 2, 5));
        let a = random_matrix(&mut rng, 6, 1);
        let b = random_matrix(&mut rng, 1, 6);
        let d = check_svd(&(&a * &b));
        assert_eq!(d.rank(1e-10), 1);
    }

    #[test]
    fn gauge_makes_largest_entry_real_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = svd(&random_matrix(&mut rng, 5, 3)).unwrap();
        for j in 0..3 {
            let col = d.u.column(j);
            let big = col
                .iter()
                .fold((0.0, ZERO), |acc, &x| if x.norm() > acc.0 { (x.norm(), x) } else { acc })
                .1;
            assert!(big.im.abs() < 1e-15 && big.re > 0.0);
        }
        // Deterministic across repeated calls.
        let m = random_matrix(&mut rng, 4, 4);
        let (a, b) = (svd(&m).unwrap(), svd(&m).unwrap());
        assert_eq!(a.u, b.u);
        assert_eq!(a.v_dag, b.v_dag);
    }

    #[test]
    fn completion_examples() {
        let e0 = CMatrix::from_columns(&[vec![ONE, ZERO]]).unwrap();
        assert_eq!(complete_to_unitary(&e0).unwrap(), CMatrix::identity(2));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CMatrix::from_columns(&[vec![c(h, 0.0), c(h, 0.0)]]).unwrap();
        let u = complete_to_unitary(&plus).unwrap();
        assert!(u.unitarity_error() <= 1e-12);
        assert_eq!(u.column(0), plus.column(0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let iso = random_isometry(&mut rng, 4, 2);
        let u = complete_to_unitary(&iso).unwrap();
        assert!(u.unitarity_error() <= 1e-10);
        for j in 0..2 {
            assert_eq!(u.column(j), iso.column(j));
        }
    }

    #[test]
    fn completion_rejects_non_isometry() {
        let m = CMatrix::from_columns(&[vec![ONE, ONE]]).unwrap();
        assert!(matches!(complete_to_unitary(&m), Err(Error::NotIsometry { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn svd_reconstructs_random_matrices(seed in any::<u64>(), rows in 1usize..=64, cols in 1usize..=64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            check_svd(&random_matrix(&mut rng, rows, cols));
        }

        #[test]
        fn completion_is_unitary(seed in any::<u64>(), dim in 1usize..=9, k in 1usize..=9) {
            let k = k.min(dim);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let iso = random_isometry(&mut rng, dim, k);
            let u = complete_to_unitary(&iso).unwrap();
            prop_assert!(u.unitarity_error() <= 1e-10);
            for j in 0..k {
                prop_assert_eq!(u.column(j), iso.column(j));
            }
        }
    }
}
