//! Dense multi-qudit registers. Site 0 is the most significant digit of the
//! basis index.

use super::{svd, CMatrix, C64, ZERO};
use crate::config::TOL;
use crate::{Error, Result};

/// Checks `len == d^n`.
pub fn sites_for_len(len: usize, d: usize, n: usize) -> Result<()> {
    match d.checked_pow(n as u32) {
        Some(p) if p == len => Ok(()),
        _ => Err(Error::NotAPower {
            len,
            base: d,
            exponent: n,
        }),
    }
}

pub fn product_state(factors: &[Vec<C64>]) -> Vec<C64> {
    factors
        .iter()
        .fold(vec![C64::new(1.0, 0.0)], |acc, f| super::kron_vec(&acc, f))
}

/// Applies a single-site operator to `site` of an `n`-site register.
pub fn apply_single(state: &mut [C64], d: usize, n: usize, site: usize, op: &CMatrix) {
    assert!(site < n && op.rows() == d && op.cols() == d);
    let stride = d.pow((n - 1 - site) as u32);
    let block = stride * d;
    let mut buf = vec![ZERO; d];
    for base in (0..state.len()).step_by(block) {
        for off in 0..stride {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = state[base + off + k * stride];
            }
            for r in 0..d {
                let row = op.row(r);
                state[base + off + r * stride] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
            }
        }
    }
}

/// Applies a two-site operator acting on `(p, q)` in that tensor order.
/// Sites need not be adjacent.
pub fn apply_pair(state: &mut [C64], d: usize, n: usize, p: usize, q: usize, op: &CMatrix) {
    assert!(p < n && q < n && p != q);
    assert!(op.rows() == d * d && op.cols() == d * d);
    let sp = d.pow((n - 1 - p) as u32);
    let sq = d.pow((n - 1 - q) as u32);
    let mut buf = vec![ZERO; d * d];
    let mut idx = vec![0usize; d * d];
    for i in 0..state.len() {
        if !(i / sp).is_multiple_of(d) || !(i / sq).is_multiple_of(d) {
            continue;
        }
        for a in 0..d {
            for b in 0..d {
                idx[a * d + b] = i + a * sp + b * sq;
            }
        }
        for (k, &j) in idx.iter().enumerate() {
            buf[k] = state[j];
        }
        for (r, &j) in idx.iter().enumerate() {
            state[j] = op.row(r).iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}

/// Reshapes the register into the `d^cut × d^(n−cut)` matrix across the cut
/// after site `cut − 1`.
pub fn bipartition(state: &[C64], d: usize, n: usize, cut: usize) -> CMatrix {
    assert!(cut >= 1 && cut < n);
    let right = d.pow((n - cut) as u32);
    CMatrix::new(state.len() / right, right, state.to_vec()).expect("consistent reshape")
}

/// Schmidt rank across the cut after site `cut − 1`.
pub fn schmidt_rank(state: &[C64], d: usize, n: usize, cut: usize) -> Result<usize> {
    Ok(svd(&bipartition(state, d, n, cut))?.rank(TOL.rank))
}

/// Schmidt ranks of every cut `1..n`.
pub fn schmidt_ranks(state: &[C64], d: usize, n: usize) -> Result<Vec<usize>> {
    (1..n).map(|cut| schmidt_rank(state, d, n, cut)).collect()
}
