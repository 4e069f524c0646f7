//! Two-dimensional lattices measured slice by slice.
//!
//! Sites are indexed `t·W + w`: slice `t` (the temporal coordinate) is a
//! column of `W` sites, and slice 0 is the most significant digit of every
//! basis index and outcome tuple. Each slice becomes one carrier of
//! dimension `d^W`; the timelike gates between slices `t` and `t + 1` turn
//! the measurement of slice `t` into an instrument on that carrier.

use crate::config::TOL;
use crate::numerics::register::{apply_pair, product_state};
use crate::numerics::{gates, kron, norm, CMatrix, C64, ZERO};
use crate::par::Exec;
use crate::spatial::{CorrelationTable, MeasurementSetting};
use crate::temporal::{enumerate_branches, ChainState, Instrument, Stage, SwapIsometry};
use crate::{Error, Result};

/// Dense simulation cap on `d^(W·T)`.
pub const MAX_LATTICE_DIM: usize = 1 << 16;

/// Scheduling of spacelike gates relative to the timelike gates that
/// follow them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Timelike gates `t → t+1` act before the spacelike gates of slice
    /// `t + 1`.
    First,
    /// The spacelike gates of slice `t + 1` act before the timelike gates
    /// `t → t+1`.
    Second,
}

impl Order {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::First => 1,
            Self::Second => 2,
        }
    }
}

/// A two-site gate. Within a slice `a` and `b` are rows of that slice; for
/// a timelike gate `a` is a row of slice `t` and `b` a row of slice `t + 1`.
/// `u` acts on `a ⊗ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteGate {
    pub a: usize,
    pub b: usize,
    pub u: CMatrix,
}

impl SiteGate {
    pub fn new(a: usize, b: usize, u: CMatrix) -> Self {
        Self { a, b, u }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    width: usize,
    depth: usize,
    site_dim: usize,
    spacelike: Vec<Vec<SiteGate>>,
    timelike: Vec<Vec<SiteGate>>,
    order: Order,
    initial: Vec<Vec<C64>>,
}

impl LatticeSpec {
    /// `spacelike` has one gate list per slice, `timelike` one per pair of
    /// consecutive slices, `initial` one state per site in `t·W + w` order.
    pub fn new(
        width: usize,
        depth: usize,
        site_dim: usize,
        spacelike: Vec<Vec<SiteGate>>,
        timelike: Vec<Vec<SiteGate>>,
        order: Order,
        initial: Vec<Vec<C64>>,
    ) -> Result<Self> {
        if width == 0 || depth == 0 {
            return Err(Error::InvalidSiteCount(width * depth));
        }
        if site_dim < 2 {
            return Err(Error::InvalidArgument(format!("site dimension {site_dim}")));
        }
        let total = site_dim
            .checked_pow((width * depth) as u32)
            .filter(|&n| n <= MAX_LATTICE_DIM);
        if total.is_none() {
            return Err(Error::CapExceeded(format!(
                "{site_dim}^({width}·{depth}) exceeds {MAX_LATTICE_DIM}"
            )));
        }
        if spacelike.len() != depth {
            return Err(Error::DimensionMismatch(format!(
                "{} spacelike gate lists for {depth} slices",
                spacelike.len()
            )));
        }
        if timelike.len() != depth - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} timelike gate lists for {depth} slices",
                timelike.len()
            )));
        }
        if initial.len() != width * depth {
            return Err(Error::DimensionMismatch(format!(
                "{} initial states for {} sites",
                initial.len(),
                width * depth
            )));
        }
        for s in &initial {
            if s.len() != site_dim {
                return Err(Error::DimensionMismatch(format!(
                    "initial state of length {} for site dimension {site_dim}",
                    s.len()
                )));
            }
            let n = norm(s);
            if (n - 1.0).abs() > TOL.normalization {
                return Err(Error::NotNormalized { norm: n });
            }
        }
        let check = |g: &SiteGate, same_slice: bool| -> Result<()> {
            if g.a >= width || g.b >= width || (same_slice && g.a == g.b) {
                return Err(Error::IndexOutOfRange(format!(
                    "gate on rows ({}, {}) in a slice of width {width}",
                    g.a, g.b
                )));
            }
            if !g.u.is_square() || g.u.rows() != site_dim * site_dim {
                return Err(Error::DimensionMismatch(format!(
                    "two-site gate must be {0}x{0}",
                    site_dim * site_dim
                )));
            }
            let deviation = g.u.unitarity_error();
            if deviation > TOL.unitary {
                return Err(Error::NotUnitary { deviation });
            }
            Ok(())
        };
        for g in spacelike.iter().flatten() {
            check(g, true)?;
        }
        for g in timelike.iter().flatten() {
            check(g, false)?;
        }
        Ok(Self {
            width,
            depth,
            site_dim,
            spacelike,
            timelike,
            order,
            initial,
        })
    }

    /// Rectangular cluster state: C-phase on every nearest-neighbour pair,
    /// all sites `|+⟩`.
    pub fn cluster(width: usize, depth: usize, order: Order) -> Result<Self> {
        let column: Vec<SiteGate> = (0..width.saturating_sub(1))
            .map(|w| SiteGate::new(w, w + 1, gates::cz()))
            .collect();
        let rows: Vec<SiteGate> = (0..width).map(|w| SiteGate::new(w, w, gates::cz())).collect();
        Self::new(
            width,
            depth,
            2,
            vec![column; depth],
            vec![rows; depth.saturating_sub(1)],
            order,
            vec![gates::plus(); width * depth],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn with_order(&self, order: Order) -> Self {
        Self {
            order,
            ..self.clone()
        }
    }

    pub fn spacelike(&self) -> &[Vec<SiteGate>] {
        &self.spacelike
    }

    pub fn timelike(&self) -> &[Vec<SiteGate>] {
        &self.timelike
    }

    pub fn initial(&self) -> &[Vec<C64>] {
        &self.initial
    }

    fn slice_dim(&self) -> usize {
        self.site_dim.pow(self.width as u32)
    }

    pub(crate) fn slice_initial(&self, t: usize) -> Vec<C64> {
        product_state(&self.initial[t * self.width..(t + 1) * self.width])
    }

    fn apply_spacelike(&self, state: &mut [C64], n: usize, offset: usize, t: usize) {
        for g in &self.spacelike[t] {
            apply_pair(state, self.site_dim, n, offset + g.a, offset + g.b, &g.u);
        }
    }

    /// Timelike gates `t → t+1` on a register whose slice `t` starts at
    /// `offset` and slice `t + 1` right after it.
    fn apply_timelike(&self, state: &mut [C64], n: usize, offset: usize, t: usize) {
        for g in &self.timelike[t] {
            apply_pair(state, self.site_dim, n, offset + g.a, offset + self.width + g.b, &g.u);
        }
    }
}

/// Full lattice state, gates applied in the order selected by the spec.
pub fn build_lattice_state(spec: &LatticeSpec) -> Result<Vec<C64>> {
    let (w, n) = (spec.width, spec.width * spec.depth);
    let mut state = product_state(&spec.initial);
    spec.apply_spacelike(&mut state, n, 0, 0);
    for t in 0..spec.depth - 1 {
        match spec.order {
            Order::First => {
                spec.apply_timelike(&mut state, n, t * w, t);
                spec.apply_spacelike(&mut state, n, (t + 1) * w, t + 1);
            }
            Order::Second => {
                spec.apply_spacelike(&mut state, n, (t + 1) * w, t + 1);
                spec.apply_timelike(&mut state, n, t * w, t);
            }
        }
    }
    Ok(state)
}

/// One slice stage: an optional unitary on the carrier, then a `W`-site
/// instrument with `d^W` outcomes.
#[derive(Clone, Debug)]
pub struct SliceStage {
    pub prep: Option<CMatrix>,
    pub instrument: Instrument,
    pub settings: Vec<MeasurementSetting>,
}

#[derive(Clone, Debug)]
pub struct SliceProgram {
    pub width: usize,
    pub site_dim: usize,
    pub order: Order,
    pub initial: ChainState,
    pub stages: Vec<SliceStage>,
}

fn slice_basis(settings: &[MeasurementSetting], d: usize) -> Result<CMatrix> {
    settings.iter().try_fold(CMatrix::identity(1), |acc, s| {
        if s.site_dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "setting on {} levels for site dimension {d}",
                s.site_dim()
            )));
        }
        Ok(kron(&acc, &s.basis()?))
    })
}

/// Spacelike gates of slice `t` as a single `d^W × d^W` unitary.
pub(crate) fn slice_unitary(spec: &LatticeSpec, t: usize) -> CMatrix {
    let dim = spec.slice_dim();
    let mut u = CMatrix::zeros(dim, dim);
    for m in 0..dim {
        let mut col = vec![ZERO; dim];
        col[m] = C64::new(1.0, 0.0);
        spec.apply_spacelike(&mut col, spec.width, 0, t);
        u.set_column(m, &col);
    }
    u
}

/// Swap isometry of the timelike step `t → t+1` with fresh slice state
/// `ancilla`, built one input basis vector at a time.
fn timelike_isometry(spec: &LatticeSpec, t: usize, ancilla: &[C64]) -> SwapIsometry {
    let dim = spec.slice_dim();
    let n = 2 * spec.width;
    let mut k = CMatrix::zeros(dim * dim, dim);
    for m in 0..dim {
        let mut v = vec![ZERO; dim * dim];
        v[m * dim..(m + 1) * dim].copy_from_slice(ancilla);
        spec.apply_timelike(&mut v, n, 0, t);
        for o in 0..dim {
            for nn in 0..dim {
                k[(nn * dim + o, m)] = v[o * dim + nn];
            }
        }
    }
    SwapIsometry::from_kernel(dim, k)
}

/// Swap isometry of stage `t < T − 1`. Under order 2 the fresh slice is
/// prepared by its spacelike gates before it becomes the ancilla.
pub(crate) fn stage_isometry(spec: &LatticeSpec, t: usize) -> SwapIsometry {
    let mut ancilla = spec.slice_initial(t + 1);
    if spec.order == Order::Second {
        spec.apply_spacelike(&mut ancilla, spec.width, 0, t + 1);
    }
    timelike_isometry(spec, t, &ancilla)
}

/// Maps local measurements on the lattice to a program of `T` slice stages.
///
/// `settings[t][w]` is the setting of site `(w, t)`. Order 1 carries each
/// freshly initialized slice as a product ancilla and prepares it on the
/// carrier afterwards; order 2 prepares the ancilla slice before it enters
/// the timelike gates, so ancillas are entangled and the carrier needs no
/// further gates.
pub fn map_to_spatiotemporal(
    spec: &LatticeSpec,
    settings: &[Vec<MeasurementSetting>],
) -> Result<SliceProgram> {
    let (w, d, depth) = (spec.width, spec.site_dim, spec.depth);
    if settings.len() != depth || settings.iter().any(|s| s.len() != w) {
        return Err(Error::DimensionMismatch(format!(
            "settings grid must be {depth} slices of {w} sites"
        )));
    }
    let bases = settings
        .iter()
        .map(|s| slice_basis(s, d))
        .collect::<Result<Vec<_>>>()?;
    let mut stages = Vec::with_capacity(depth);
    for t in 0..depth {
        let prep = match (spec.order, t) {
            (_, 0) | (Order::First, _) => Some(slice_unitary(spec, t)),
            (Order::Second, _) => None,
        };
        let instrument = if t + 1 == depth {
            Instrument::projective(&bases[t])?
        } else {
            stage_isometry(spec, t).instrument(&bases[t])?
        };
        stages.push(SliceStage {
            prep,
            instrument,
            settings: settings[t].clone(),
        });
    }
    Ok(SliceProgram {
        width: w,
        site_dim: d,
        order: spec.order,
        initial: ChainState::pure(&spec.slice_initial(0))?,
        stages,
    })
}

/// Exact joint distribution over all `W·T` outcomes.
pub fn run_slice_program(program: &SliceProgram) -> Result<CorrelationTable> {
    run_slice_program_with(program, Exec::default())
}

pub fn run_slice_program_with(program: &SliceProgram, exec: Exec) -> Result<CorrelationTable> {
    let dim = program.site_dim.pow(program.width as u32);
    if program.initial.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "carrier of dimension {} for slices of dimension {dim}",
            program.initial.dim()
        )));
    }
    if program.stages.is_empty() {
        return Err(Error::InvalidSiteCount(0));
    }
    for (t, s) in program.stages.iter().enumerate() {
        let prep_ok = s.prep.as_ref().is_none_or(|u| u.rows() == dim && u.cols() == dim);
        if !prep_ok || s.instrument.dim() != dim || s.instrument.n_outcomes() != dim {
            return Err(Error::DimensionMismatch(format!("stage {t} does not act on the carrier")));
        }
    }
    let stages: Vec<Stage<'_>> = program
        .stages
        .iter()
        .map(|s| Stage {
            prep: s.prep.as_ref(),
            instrument: &s.instrument,
        })
        .collect();
    let probs = enumerate_branches(&program.initial, &stages, exec);
    Ok(CorrelationTable::from_probs(
        program.site_dim,
        program.width * program.stages.len(),
        None,
        probs,
    ))
}
