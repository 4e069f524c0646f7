//! Generalized measurements on a single carrier.
//!
//! A generation gate `U_k` followed by a projective measurement of the older
//! particle is a quantum instrument on the carrier: the operators `M_i`
//! satisfy
//!
//! `S · U · (|ψ⟩ ⊗ |λ⟩) = Σ_i (M_i |ψ⟩) ⊗ V|i⟩`
//!
//! for every `|ψ⟩`, where `S` swaps the two particles, `|λ⟩` is the fresh
//! particle's initial state and the columns of `V` are the measurement
//! basis. After the swap the fresh particle carries the state forward and
//! the old one is measured.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::config::TOL;
use crate::mps::{sequential_unitaries, GenerationSequence, Mps};
use crate::numerics::{c, gates, kron_vec, norm, CMatrix, C64, ZERO};
use crate::par::Exec;
use crate::spatial::{CorrelationTable, MeasurementSetting};
use crate::{Error, Result};

/// Measurement operators `M_i` with `Σ M_i†M_i = I`, plus the numeric value
/// attached to each outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    ops: Vec<CMatrix>,
    outcome_values: Vec<f64>,
}

fn default_values(n: usize) -> Vec<f64> {
    if n == 2 {
        vec![1.0, -1.0]
    } else {
        (0..n).map(|i| i as f64).collect()
    }
}

impl Instrument {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let values = default_values(ops.len());
        Self::with_values(ops, values)
    }

    pub fn with_values(ops: Vec<CMatrix>, outcome_values: Vec<f64>) -> Result<Self> {
        let dim = ops
            .first()
            .map(CMatrix::rows)
            .ok_or_else(|| Error::InvalidArgument("instrument without operators".into()))?;
        if ops.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::DimensionMismatch(
                "instrument operators must share one square shape".into(),
            ));
        }
        if outcome_values.len() != ops.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} outcome values for {} operators",
                outcome_values.len(),
                ops.len()
            )));
        }
        let inst = Self {
            ops,
            outcome_values,
        };
        let residual = inst.completeness_residual();
        if residual > TOL.completeness {
            return Err(Error::IncompleteInstrument { residual });
        }
        Ok(inst)
    }

    /// Rank-1 projectors onto the columns of `basis`.
    pub fn projective(basis: &CMatrix) -> Result<Self> {
        let deviation = basis.unitarity_error();
        if deviation > TOL.unitary {
            return Err(Error::NotUnitary { deviation });
        }
        Self::new(
            (0..basis.cols())
                .map(|i| {
                    let v = basis.column(i);
                    CMatrix::outer(&v, &v)
                })
                .collect(),
        )
    }

    pub fn from_setting(setting: &MeasurementSetting) -> Result<Self> {
        Self::projective(&setting.basis()?)
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn outcome_values(&self) -> &[f64] {
        &self.outcome_values
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn n_outcomes(&self) -> usize {
        self.ops.len()
    }

    /// `E_i = M_i†M_i`.
    pub fn povm_elements(&self) -> Vec<CMatrix> {
        self.ops.iter().map(|m| &m.adjoint() * m).collect()
    }

    /// `‖Σ M_i†M_i − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .povm_elements()
            .iter()
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, e| &acc + e);
        sum.max_abs_diff(&CMatrix::identity(self.dim()))
    }
}

pub fn povm_elements(inst: &Instrument) -> Vec<CMatrix> {
    inst.povm_elements()
}

/// The isometry `K = S · U · (I ⊗ |λ⟩)` from a carrier of dimension `D` to
/// (new carrier) ⊗ (measured particle).
///
/// Row `n·D + o` holds the amplitude for new-carrier index `n` and measured
/// index `o`. Measuring the second factor in basis `V` gives
/// `M_i[n, m] = Σ_o conj(V[o, i]) K[n·D + o, m]`.
#[derive(Clone, Debug)]
pub struct SwapIsometry {
    dim: usize,
    k: CMatrix,
}

impl SwapIsometry {
    pub fn new(u: &CMatrix, ancilla: &[C64]) -> Result<Self> {
        let d = ancilla.len();
        if !u.is_square() || u.rows() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "two-party unitary must be {0}x{0} for a {d}-dimensional ancilla",
                d * d
            )));
        }
        let deviation = u.unitarity_error();
        if deviation > TOL.unitary {
            return Err(Error::NotUnitary { deviation });
        }
        Self::new_unchecked(u, ancilla)
    }

    /// Skips the unitarity check (callers that build `u` from verified
    /// gates).
    pub(crate) fn new_unchecked(u: &CMatrix, ancilla: &[C64]) -> Result<Self> {
        let d = ancilla.len();
        let nrm = norm(ancilla);
        if (nrm - 1.0).abs() > TOL.normalization {
            return Err(Error::NotNormalized { norm: nrm });
        }
        let k = CMatrix::from_fn(d * d, d, |row, m| {
            let (n, o) = (row / d, row % d);
            let urow = u.row(o * d + n);
            (0..d).map(|cc| urow[m * d + cc] * ancilla[cc]).sum()
        });
        Ok(Self { dim: d, k })
    }

    /// Wraps a precomputed `(D·D) × D` kernel in the row layout above.
    pub(crate) fn from_kernel(dim: usize, k: CMatrix) -> Self {
        debug_assert_eq!((k.rows(), k.cols()), (dim * dim, dim));
        Self { dim, k }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_basis(&self, basis: &CMatrix) -> Result<()> {
        if basis.rows() != self.dim || basis.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "basis of size {}x{} for carrier dimension {}",
                basis.rows(),
                basis.cols(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Instrument obtained by measuring the old particle in `basis`.
    pub fn instrument(&self, basis: &CMatrix) -> Result<Instrument> {
        self.check_basis(basis)?;
        let d = self.dim;
        let ops = (0..d)
            .map(|i| {
                CMatrix::from_fn(d, d, |n, m| {
                    (0..d)
                        .map(|o| basis[(o, i)].conj() * self.k[(n * d + o, m)])
                        .sum()
                })
            })
            .collect();
        Instrument::new(ops)
    }

    /// Unnormalized `M_i |ψ⟩` for every outcome `i`, without materializing
    /// the operators.
    pub fn branch_states(&self, basis: &CMatrix, psi: &[C64]) -> Result<Vec<Vec<C64>>> {
        self.check_basis(basis)?;
        let d = self.dim;
        let kpsi = self.k.matvec(psi);
        Ok((0..d)
            .map(|i| {
                (0..d)
                    .map(|n| (0..d).map(|o| basis[(o, i)].conj() * kpsi[n * d + o]).sum())
                    .collect()
            })
            .collect())
    }
}

/// Instrument obtained from a generation gate `u`, the fresh particle's
/// state `ancilla` and the old particle's measurement `setting`.
pub fn derive_instrument(
    u: &CMatrix,
    setting: &MeasurementSetting,
    ancilla: &[C64],
) -> Result<Instrument> {
    SwapIsometry::new(u, ancilla)?.instrument(&setting.basis()?)
}

/// Closed-form instrument of a GHZ chain (C-not gate, ancilla `|0⟩`).
pub fn ghz_instrument(theta: f64, phi: f64) -> Instrument {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let plus = CMatrix::from_rows(&[vec![c(co, 0.0), ZERO], vec![ZERO, e.conj() * si]]).unwrap();
    let minus = CMatrix::from_rows(&[vec![e * si, ZERO], vec![ZERO, c(-co, 0.0)]]).unwrap();
    Instrument {
        ops: vec![plus, minus],
        outcome_values: vec![1.0, -1.0],
    }
}

/// Closed-form instrument of a 1D-cluster chain (C-phase gate, ancilla
/// `|+⟩`).
pub fn cluster_instrument(theta: f64, phi: f64) -> Instrument {
    let h = FRAC_1_SQRT_2;
    let (co, si) = ((theta / 2.0).cos() * h, (theta / 2.0).sin() * h);
    let e = C64::from_polar(1.0, phi);
    let plus = CMatrix::from_rows(&[
        vec![c(co, 0.0), e.conj() * si],
        vec![c(co, 0.0), -e.conj() * si],
    ])
    .unwrap();
    let minus = CMatrix::from_rows(&[
        vec![e * si, c(-co, 0.0)],
        vec![e * si, c(co, 0.0)],
    ])
    .unwrap();
    Instrument {
        ops: vec![plus, minus],
        outcome_values: vec![1.0, -1.0],
    }
}

/// Carrier density operator plus the `(outcome, probability)` record of the
/// measurements applied so far.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    rho: CMatrix,
    record: Vec<(usize, f64)>,
    pure: Option<Vec<C64>>,
}

impl ChainState {
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let nrm = norm(psi);
        if (nrm - 1.0).abs() > TOL.normalization {
            return Err(Error::NotNormalized { norm: nrm });
        }
        Ok(Self {
            rho: CMatrix::outer(psi, psi),
            record: Vec::new(),
            pure: Some(psi.to_vec()),
        })
    }

    /// Validates hermiticity, unit trace and positivity.
    pub fn mixed(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidDensity("not square".into()));
        }
        let herm = rho.hermiticity_error();
        if herm > TOL.hermitian {
            return Err(Error::InvalidDensity(format!("hermiticity error {herm:.3e}")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TOL.normalization || tr.im.abs() > TOL.normalization {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        if !is_psd(&rho, TOL.psd) {
            return Err(Error::InvalidDensity("negative eigenvalue".into()));
        }
        Ok(Self {
            rho,
            record: Vec::new(),
            pure: None,
        })
    }

    /// Qubit state `(I + s·σ)/2`, `|s| ≤ 1`.
    pub fn from_bloch(s: [f64; 3]) -> Result<Self> {
        let n = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        if n > 1.0 + TOL.normalization {
            return Err(Error::NonUnitVector { norm: n });
        }
        let rho = CMatrix::from_rows(&[
            vec![c((1.0 + s[2]) / 2.0, 0.0), c(s[0] / 2.0, -s[1] / 2.0)],
            vec![c(s[0] / 2.0, s[1] / 2.0), c((1.0 - s[2]) / 2.0, 0.0)],
        ])?;
        Self::mixed(rho)
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// The state vector, when the state was built from one and every update
    /// so far kept it pure.
    pub fn state_vector(&self) -> Option<&[C64]> {
        self.pure.as_deref()
    }

    pub fn record(&self) -> &[(usize, f64)] {
        &self.record
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// One measurement: returns `Tr(ρ M†M)` and the updated state
    /// `MρM†/Tr(MρM†)`; below the branch floor the post-state is maximally
    /// mixed.
    pub fn measure(&self, inst: &Instrument, outcome: usize) -> Result<(f64, ChainState)> {
        if inst.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "instrument on {} levels, carrier has {}",
                inst.dim(),
                self.dim()
            )));
        }
        let m = inst
            .ops()
            .get(outcome)
            .ok_or_else(|| Error::IndexOutOfRange(format!("outcome {outcome}")))?;
        let (p, rho) = update(&self.rho, m);
        let mut record = self.record.clone();
        record.push((outcome, p));
        let pure = match &self.pure {
            Some(psi) if p >= TOL.branch_floor => {
                let s = c(1.0 / p.sqrt(), 0.0);
                Some(m.matvec(psi).into_iter().map(|z| z * s).collect())
            }
            _ => None,
        };
        Ok((p, ChainState { rho, record, pure }))
    }
}

/// Cholesky of `ρ + tol·I` succeeds iff the smallest eigenvalue is above
/// `−tol` (up to rounding).
fn is_psd(rho: &CMatrix, tol: f64) -> bool {
    let n = rho.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = rho[(j, j)].re + tol;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 {
            return false;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = c(ljj, 0.0);
        for i in j + 1..n {
            let mut v = rho[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / ljj;
        }
    }
    true
}

fn update(rho: &CMatrix, m: &CMatrix) -> (f64, CMatrix) {
    let sigma = m.sandwich(rho);
    let p = sigma.trace().re.max(0.0);
    let d = rho.rows();
    if p < TOL.branch_floor {
        (p, CMatrix::identity(d).scale(c(1.0 / d as f64, 0.0)))
    } else {
        (p, sigma.scale(c(1.0 / p, 0.0)))
    }
}

/// One step of a multi-stage run: an optional unitary on the carrier, then
/// an instrument.
pub(crate) struct Stage<'a> {
    pub prep: Option<&'a CMatrix>,
    pub instrument: &'a Instrument,
}

/// Exact probabilities of every outcome sequence, in mixed-radix order with
/// the first stage most significant. Branches are expanded level by level;
/// each level is an order-preserving map, so `exec` only affects speed.
pub(crate) fn enumerate_branches(initial: &ChainState, stages: &[Stage<'_>], exec: Exec) -> Vec<f64> {
    match initial.state_vector() {
        Some(psi) => enumerate_pure(psi, stages, exec),
        None => enumerate_mixed(initial.rho(), stages, exec),
    }
}

fn enumerate_mixed(initial: &CMatrix, stages: &[Stage<'_>], exec: Exec) -> Vec<f64> {
    let mut nodes: Vec<(CMatrix, f64)> = vec![(initial.clone(), 1.0)];
    let last = stages.len() - 1;
    for (k, stage) in stages.iter().enumerate() {
        let prepped: Vec<(CMatrix, f64)> = match stage.prep {
            Some(u) => exec.map(&nodes, |(rho, p)| (u.sandwich(rho), *p)),
            None => nodes,
        };
        if k == last {
            let povm = stage.instrument.povm_elements();
            return exec.flat_map(&prepped, |(rho, p)| {
                povm.iter()
                    .map(|e| p * (e * rho).trace().re.max(0.0))
                    .collect()
            });
        }
        nodes = exec.flat_map(&prepped, |(rho, p)| {
            stage
                .instrument
                .ops()
                .iter()
                .map(|m| {
                    let (q, post) = update(rho, m);
                    (post, p * q)
                })
                .collect()
        });
    }
    unreachable!("at least one stage")
}

/// Pure-state branches. A branch below the floor keeps its (negligible)
/// weight and continues from `|0⟩`.
fn enumerate_pure(initial: &[C64], stages: &[Stage<'_>], exec: Exec) -> Vec<f64> {
    let mut nodes: Vec<(Vec<C64>, f64)> = vec![(initial.to_vec(), 1.0)];
    let last = stages.len() - 1;
    for (k, stage) in stages.iter().enumerate() {
        let prepped: Vec<(Vec<C64>, f64)> = match stage.prep {
            Some(u) => exec.map(&nodes, |(psi, p)| (u.matvec(psi), *p)),
            None => nodes,
        };
        if k == last {
            return exec.flat_map(&prepped, |(psi, p)| {
                stage
                    .instrument
                    .ops()
                    .iter()
                    .map(|m| p * norm_sqr(&m.matvec(psi)))
                    .collect()
            });
        }
        nodes = exec.flat_map(&prepped, |(psi, p)| {
            stage
                .instrument
                .ops()
                .iter()
                .map(|m| {
                    let phi = m.matvec(psi);
                    let q = norm_sqr(&phi);
                    if q < TOL.branch_floor {
                        let mut e0 = vec![ZERO; phi.len()];
                        e0[0] = c(1.0, 0.0);
                        (e0, p * q)
                    } else {
                        let s = c(1.0 / q.sqrt(), 0.0);
                        (phi.into_iter().map(|z| z * s).collect(), p * q)
                    }
                })
                .collect()
        });
    }
    unreachable!("at least one stage")
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Sequential instruments followed by a final projective measurement.
#[derive(Clone, Debug)]
pub struct TemporalChain {
    pub initial: ChainState,
    pub instruments: Vec<Instrument>,
    pub final_setting: MeasurementSetting,
}

impl TemporalChain {
    pub fn run(&self) -> Result<CorrelationTable> {
        run_chain(&self.initial, &self.instruments, &self.final_setting)
    }

    pub fn run_with(&self, exec: Exec) -> Result<CorrelationTable> {
        run_chain_with(&self.initial, &self.instruments, &self.final_setting, exec)
    }
}

/// Exact joint distribution of `instruments.len() + 1` outcomes.
pub fn run_chain(
    initial: &ChainState,
    instruments: &[Instrument],
    final_setting: &MeasurementSetting,
) -> Result<CorrelationTable> {
    run_chain_with(initial, instruments, final_setting, Exec::default())
}

pub fn run_chain_with(
    initial: &ChainState,
    instruments: &[Instrument],
    final_setting: &MeasurementSetting,
    exec: Exec,
) -> Result<CorrelationTable> {
    let d = initial.dim();
    for (k, inst) in instruments.iter().enumerate() {
        if inst.dim() != d || inst.n_outcomes() != d {
            return Err(Error::DimensionMismatch(format!(
                "instrument {k} has {} outcomes on {} levels, carrier has {d}",
                inst.n_outcomes(),
                inst.dim()
            )));
        }
    }
    let last = Instrument::from_setting(final_setting)?;
    if last.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "final setting on {} levels, carrier has {d}",
            last.dim()
        )));
    }
    let stages: Vec<Stage<'_>> = instruments
        .iter()
        .chain(std::iter::once(&last))
        .map(|instrument| Stage {
            prep: None,
            instrument,
        })
        .collect();
    let probs = enumerate_branches(initial, &stages, exec);
    Ok(CorrelationTable::from_probs(d, stages.len(), None, probs))
}

/// Expectation of the product of `±1` outcomes.
pub fn temporal_correlation(table: &CorrelationTable) -> Result<f64> {
    table.correlation()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_unit(v: [f64; 3]) -> Result<()> {
    let n = dot(v, v).sqrt();
    if (n - 1.0).abs() > TOL.normalization {
        return Err(Error::NonUnitVector { norm: n });
    }
    Ok(())
}

/// Nearest-pair factorized correlation of sequential projective qubit
/// measurements: for odd `N`, `(m₁·s)(m₂·m₃)…(m_{N−1}·m_N)`; for even `N`,
/// `(m₁·m₂)(m₃·m₄)…(m_{N−1}·m_N)`.
pub fn factorized_correlation(s: [f64; 3], ms: &[[f64; 3]]) -> Result<f64> {
    if ms.is_empty() {
        return Err(Error::InvalidSiteCount(0));
    }
    check_unit(s)?;
    for &m in ms {
        check_unit(m)?;
    }
    let (head, pairs) = if ms.len() % 2 == 1 {
        (dot(ms[0], s), &ms[1..])
    } else {
        (1.0, ms)
    };
    Ok(pairs
        .chunks(2)
        .fold(head, |acc, p| acc * dot(p[0], p[1])))
}

/// Returns `(simulated, closed_form)` for a projective chain on the qubit
/// with Bloch vector `s`.
pub fn projective_chain_correlation(s: [f64; 3], ms: &[[f64; 3]]) -> Result<(f64, f64)> {
    let closed = factorized_correlation(s, ms)?;
    let settings = ms
        .iter()
        .map(|&m| MeasurementSetting::from_bloch_vector(m))
        .collect::<Result<Vec<_>>>()?;
    let (last, body) = settings.split_last().expect("nonempty");
    let instruments = body
        .iter()
        .map(Instrument::from_setting)
        .collect::<Result<Vec<_>>>()?;
    let table = run_chain(&ChainState::from_bloch(s)?, &instruments, last)?;
    Ok((table.correlation()?, closed))
}

/// Chain whose statistics reproduce local measurements `settings` on the
/// state generated by `seq`: instrument `k` comes from `U_k`, the fresh
/// particle `|λ_{k+1}⟩` and setting `k`; the last setting is measured
/// directly.
pub fn chain_from_sequence(
    seq: &GenerationSequence,
    settings: &[MeasurementSetting],
) -> Result<TemporalChain> {
    if settings.len() != seq.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} settings for {} sites",
            settings.len(),
            seq.n_sites()
        )));
    }
    let init = seq.initial_states();
    let instruments = seq
        .unitaries()
        .iter()
        .enumerate()
        .map(|(k, u)| derive_instrument(u, &settings[k], &init[k + 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(TemporalChain {
        initial: ChainState::pure(&init[0])?,
        instruments,
        final_setting: settings[settings.len() - 1].clone(),
    })
}

/// Maps local measurements on an MPS with bond dimension `≤ d` to a
/// single-carrier chain.
pub fn map_mps_to_chain(mps: &Mps, settings: &[MeasurementSetting]) -> Result<TemporalChain> {
    chain_from_sequence(&sequential_unitaries(mps)?, settings)
}

/// `‖S U (ψ⊗λ) − Σ_i M_iψ ⊗ V|i⟩‖_max` for one input state.
pub fn swap_equation_residual(
    u: &CMatrix,
    basis: &CMatrix,
    ancilla: &[C64],
    inst: &Instrument,
    psi: &[C64],
) -> f64 {
    let d = ancilla.len();
    let lhs = (&gates::swap(d) * u).matvec(&kron_vec(psi, ancilla));
    let mut rhs = vec![ZERO; d * d];
    for (i, m) in inst.ops().iter().enumerate() {
        let out = kron_vec(&m.matvec(psi), &basis.column(i));
        for (r, x) in rhs.iter_mut().zip(out) {
            *r += x;
        }
    }
    lhs.iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
