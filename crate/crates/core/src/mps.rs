//! Open-boundary matrix product states and their sequential generation.
//!
//! Site `n` holds `d` matrices `A[n][i]`; the first site's matrices are
//! `1 × D₁` rows and the last site's are `D_{N−1} × 1` columns. The state is
//! `Σ A[1][i₁] ⋯ A[N][i_N] |i₁ … i_N⟩` with site 1 the most significant digit.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::config::TOL;
use crate::numerics::register::{self, apply_pair, product_state, sites_for_len};
use crate::numerics::{complete_to_unitary, gates, norm, svd, CMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    site_dim: usize,
    sites: Vec<Vec<CMatrix>>,
}

impl Mps {
    /// Validates shapes and normalization.
    pub fn new(site_dim: usize, sites: Vec<Vec<CMatrix>>) -> Result<Self> {
        if site_dim < 2 {
            return Err(Error::InvalidArgument(format!("site dimension {site_dim} < 2")));
        }
        if sites.is_empty() {
            return Err(Error::InvalidSiteCount(0));
        }
        let last = sites.len() - 1;
        let mut left = 1;
        for (n, site) in sites.iter().enumerate() {
            if site.len() != site_dim {
                return Err(Error::DimensionMismatch(format!(
                    "site {n} has {} matrices, expected {site_dim}",
                    site.len()
                )));
            }
            let (r, cols) = (site[0].rows(), site[0].cols());
            if site.iter().any(|m| m.rows() != r || m.cols() != cols) {
                return Err(Error::DimensionMismatch(format!("site {n} has mixed shapes")));
            }
            if r != left {
                return Err(Error::DimensionMismatch(format!(
                    "site {n} expects left bond {left}, has {r}"
                )));
            }
            if n == last && cols != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "last site must have one column, has {cols}"
                )));
            }
            left = cols;
        }
        let mps = Self { site_dim, sites };
        let nrm = norm(&mps.contract());
        if (nrm - 1.0).abs() > TOL.normalization {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Ok(mps)
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Vec<CMatrix>] {
        &self.sites
    }

    /// Matrix bond sizes as stored (not necessarily minimal).
    pub fn bond_sizes(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1]
            .iter()
            .map(|s| s[0].cols())
            .collect()
    }

    /// Dense state vector, length `d^N`.
    pub fn contract(&self) -> Vec<C64> {
        let d = self.site_dim;
        let mut rows: Vec<Vec<C64>> = vec![vec![ONE]];
        for site in &self.sites {
            let mut next = Vec::with_capacity(rows.len() * d);
            for v in &rows {
                for m in site {
                    next.push(
                        (0..m.cols())
                            .map(|col| (0..m.rows()).map(|k| v[k] * m[(k, col)]).sum())
                            .collect(),
                    );
                }
            }
            rows = next;
        }
        rows.into_iter().map(|v| v[0]).collect()
    }

    /// Schmidt rank of every cut, from the dense contraction.
    pub fn schmidt_ranks(&self) -> Result<Vec<usize>> {
        register::schmidt_ranks(&self.contract(), self.site_dim, self.n_sites())
    }

    /// Largest Schmidt rank over all bipartite cuts (1 for a single site).
    pub fn bond_dimension(&self) -> Result<usize> {
        Ok(self.schmidt_ranks()?.into_iter().max().unwrap_or(1))
    }

    /// Equivalent right-canonical form with minimal bonds:
    /// `Σ_i A[n][i] A[n][i]† = I` for every site `n ≥ 2`.
    pub fn right_canonical(&self) -> Result<Mps> {
        let d = self.site_dim;
        let mut sites = self.sites.clone();
        for n in (1..sites.len()).rev() {
            let (dl, dr) = (sites[n][0].rows(), sites[n][0].cols());
            let merged = CMatrix::from_fn(dl, d * dr, |a, col| sites[n][col / dr][(a, col % dr)]);
            let dec = svd(&merged)?;
            let r = dec.rank(TOL.rank).max(1);
            sites[n] = (0..d)
                .map(|i| CMatrix::from_fn(r, dr, |a, b| dec.v_dag[(a, i * dr + b)]))
                .collect();
            let us = CMatrix::from_fn(dl, r, |a, b| dec.u[(a, b)] * dec.s[b]);
            for m in sites[n - 1].iter_mut() {
                *m = &*m * &us;
            }
        }
        Ok(Mps {
            site_dim: d,
            sites,
        })
    }
}

/// Sequential SVD sweep from the left. Singular values at or below the rank
/// threshold are dropped, so every bond is the minimal Schmidt rank.
pub fn mps_from_statevector(psi: &[C64], d: usize, n_sites: usize) -> Result<Mps> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("site dimension {d} < 2")));
    }
    if n_sites == 0 {
        return Err(Error::InvalidSiteCount(0));
    }
    sites_for_len(psi.len(), d, n_sites)?;
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > TOL.normalization {
        return Err(Error::NotNormalized { norm: nrm });
    }

    let mut sites = Vec::with_capacity(n_sites);
    // rest: (left bond) × (remaining physical dims), row-major.
    let mut rest = CMatrix::new(1, psi.len(), psi.to_vec())?;
    for _ in 0..n_sites - 1 {
        let dl = rest.rows();
        let tail = rest.cols() / d;
        let merged = CMatrix::from_fn(dl * d, tail, |row, col| {
            let (a, i) = (row / d, row % d);
            rest[(a, i * tail + col)]
        });
        let dec = svd(&merged)?;
        let r = dec.rank(TOL.rank).max(1);
        sites.push(
            (0..d)
                .map(|i| CMatrix::from_fn(dl, r, |a, b| dec.u[(a * d + i, b)]))
                .collect(),
        );
        rest = CMatrix::from_fn(r, tail, |a, col| dec.v_dag[(a, col)] * dec.s[a]);
    }
    let dl = rest.rows();
    sites.push(
        (0..d)
            .map(|i| CMatrix::from_fn(dl, 1, |a, _| rest[(a, i)]))
            .collect(),
    );
    Mps::new(d, sites)
}

/// Single-qudit initial states and the staircase `U_1 … U_{N−1}`, where
/// `U_k` acts on sites `(k, k+1)` and is applied after `U_{k−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationSequence {
    site_dim: usize,
    initial_states: Vec<Vec<C64>>,
    unitaries: Vec<CMatrix>,
}

impl GenerationSequence {
    pub fn new(
        site_dim: usize,
        initial_states: Vec<Vec<C64>>,
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        let n = initial_states.len();
        if n == 0 {
            return Err(Error::InvalidSiteCount(0));
        }
        if unitaries.len() + 1 != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} sites need {} unitaries, got {}",
                n - 1,
                unitaries.len()
            )));
        }
        for s in &initial_states {
            if s.len() != site_dim {
                return Err(Error::DimensionMismatch(format!(
                    "initial state of length {} for site dimension {site_dim}",
                    s.len()
                )));
            }
            let nrm = norm(s);
            if (nrm - 1.0).abs() > TOL.normalization {
                return Err(Error::NotNormalized { norm: nrm });
            }
        }
        for u in &unitaries {
            if u.rows() != site_dim * site_dim || !u.is_square() {
                return Err(Error::DimensionMismatch(format!(
                    "two-site unitary must be {0}x{0}",
                    site_dim * site_dim
                )));
            }
            let deviation = u.unitarity_error();
            if deviation > TOL.unitary {
                return Err(Error::NotUnitary { deviation });
            }
        }
        Ok(Self {
            site_dim,
            initial_states,
            unitaries,
        })
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn n_sites(&self) -> usize {
        self.initial_states.len()
    }

    pub fn initial_states(&self) -> &[Vec<C64>] {
        &self.initial_states
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    /// Runs the staircase on `⊗|λ_k⟩`.
    pub fn apply(&self) -> Vec<C64> {
        let (d, n) = (self.site_dim, self.n_sites());
        let mut state = product_state(&self.initial_states);
        for (k, u) in self.unitaries.iter().enumerate() {
            apply_pair(&mut state, d, n, k, k + 1, u);
        }
        state
    }
}

/// Staircase regenerating `mps`. Requires every Schmidt rank `≤ d`; the
/// unitaries are one valid gauge choice, fixed by the SVD gauge and the
/// deterministic isometry completion.
///
/// Each `U_k` maps `|α⟩ ⊗ |0⟩`, with the incoming bond index `α` stored on
/// site `k`, to `Σ_{i,β} A[k][i]_{αβ} |i⟩ ⊗ |β⟩` in right-canonical gauge.
/// The last gate also emits the final site.
pub fn sequential_unitaries(mps: &Mps) -> Result<GenerationSequence> {
    let d = mps.site_dim();
    let n = mps.n_sites();
    let canon = mps.right_canonical()?;
    for (cut, &bond) in canon.bond_sizes().iter().enumerate() {
        if bond > d {
            return Err(Error::BondDimensionTooLarge {
                bond,
                site_dim: d,
                cut: cut + 1,
            });
        }
    }
    let sites = canon.sites();
    if n == 1 {
        let v: Vec<C64> = sites[0].iter().map(|m| m[(0, 0)]).collect();
        return GenerationSequence::new(d, vec![v], vec![]);
    }

    let mut unitaries = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let din = sites[k][0].rows();
        let iso = if k + 2 < n {
            let dout = sites[k][0].cols();
            CMatrix::from_fn(d * d, din, |row, a| {
                let (i, b) = (row / d, row % d);
                if b < dout {
                    sites[k][i][(a, b)]
                } else {
                    ZERO
                }
            })
        } else {
            let mid = sites[k][0].cols();
            CMatrix::from_fn(d * d, din, |row, a| {
                let (i, j) = (row / d, row % d);
                (0..mid).map(|b| sites[k][i][(a, b)] * sites[k + 1][j][(b, 0)]).sum()
            })
        };
        let q = complete_to_unitary(&iso)?;
        // Column order of q: inputs |α⟩|0⟩ first (α < din), then the
        // remaining basis inputs in increasing index order.
        let mut order: Vec<usize> = (0..din).map(|a| a * d).collect();
        order.extend((0..d * d).filter(|x| !(x % d == 0 && x / d < din)));
        let mut u = CMatrix::zeros(d * d, d * d);
        for (j, &input) in order.iter().enumerate() {
            u.set_column(input, &q.column(j));
        }
        unitaries.push(u);
    }
    GenerationSequence::new(d, vec![gates::ket(d, 0); n], unitaries)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidSiteCount(n))
    } else {
        Ok(())
    }
}

fn qubit_mps(n: usize, first: [[f64; 2]; 2], middle: [CMatrix; 2], last: [[f64; 2]; 2]) -> Mps {
    let row = |v: [f64; 2]| CMatrix::from_real(&[&v]);
    let col = |v: [f64; 2]| CMatrix::from_real(&[&[v[0]], &[v[1]]]);
    let mut sites = vec![vec![row(first[0]), row(first[1])]];
    for _ in 1..n - 1 {
        sites.push(middle.to_vec());
    }
    sites.push(vec![col(last[0]), col(last[1])]);
    Mps::new(2, sites).expect("closed-form MPS is valid")
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_mps(n: usize) -> Result<Mps> {
    check_n(n)?;
    let h = FRAC_1_SQRT_2;
    Ok(qubit_mps(
        n,
        [[h, 0.0], [0.0, h]],
        [
            CMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]),
            CMatrix::from_real(&[&[0.0, 0.0], &[0.0, 1.0]]),
        ],
        [[1.0, 0.0], [0.0, 1.0]],
    ))
}

/// Equal superposition of all single-excitation strings.
pub fn w_mps(n: usize) -> Result<Mps> {
    check_n(n)?;
    let a = 1.0 / (n as f64).sqrt();
    Ok(qubit_mps(
        n,
        [[a, 0.0], [0.0, a]],
        [
            CMatrix::identity(2),
            CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]),
        ],
        [[0.0, 1.0], [1.0, 0.0]],
    ))
}

/// C-phase chain on `|+⟩^⊗n`.
pub fn cluster1d_mps(n: usize) -> Result<Mps> {
    check_n(n)?;
    let a = 0.5f64.powf(n as f64 / 2.0);
    Ok(qubit_mps(
        n,
        [[a, 0.0], [0.0, a]],
        [
            CMatrix::from_real(&[&[1.0, 0.0], &[1.0, 0.0]]),
            CMatrix::from_real(&[&[0.0, 1.0], &[0.0, -1.0]]),
        ],
        [[1.0, 1.0], [1.0, -1.0]],
    ))
}

/// Literal GHZ staircase: C-nots on `|+⟩|0⟩…|0⟩`.
pub fn ghz_generation_sequence(n: usize) -> Result<GenerationSequence> {
    check_n(n)?;
    let mut init = vec![gates::ket(2, 0); n];
    init[0] = gates::plus();
    GenerationSequence::new(2, init, vec![gates::cnot(); n - 1])
}

/// Literal 1D-cluster staircase: C-phases on `|+⟩…|+⟩`.
pub fn cluster_generation_sequence(n: usize) -> Result<GenerationSequence> {
    check_n(n)?;
    GenerationSequence::new(2, vec![gates::plus(); n], vec![gates::cz(); n - 1])
}

/// Product MPS from single-site states.
pub fn product_mps(states: &[Vec<C64>]) -> Result<Mps> {
    let d = states.first().map_or(0, Vec::len);
    let sites = states
        .iter()
        .map(|s| s.iter().map(|&x| CMatrix::from_diag(&[x])).collect())
        .collect();
    Mps::new(d, sites)
}
