//! One-way computation in time: a single column of `W` carriers is
//! repeatedly entangled with a freshly prepared 1D cluster column and then
//! measured, so at most `2W` qubits are ever alive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pattern::{Pattern, Plane, SiteAction};
use crate::config::TOL;
use crate::lattice::{slice_unitary, stage_isometry, LatticeSpec, Order};
use crate::numerics::{kron, norm, CMatrix, C64, ZERO};
use crate::par::Exec;
use crate::spatial::MeasurementSetting;
use crate::temporal::SwapIsometry;
use crate::{Error, Result};

/// Largest supported pattern width (carrier of `2^7` amplitudes).
pub const MAX_ENGINE_WIDTH: usize = 7;

const UNMEASURED: u8 = u8::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Exact,
    Sampled { seed: u64 },
}

/// A pure branch of the live register plus its classical record.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeEngineState {
    /// The current carrier column.
    pub register: Vec<C64>,
    /// Outcome bit per site, `u8::MAX` while unmeasured. Site `t·W + r` is
    /// measured at time step `t`.
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Carriers reset and reused as the next fresh column.
    pub recycle_count: usize,
    pub max_live_qubits: usize,
}

impl TimeEngineState {
    /// `(site, bit, time step)` of every measurement so far, in order.
    pub fn record(&self, width: usize) -> Vec<(usize, u8, usize)> {
        record_of(&self.outcomes, width)
    }
}

fn record_of(outcomes: &[u8], width: usize) -> Vec<(usize, u8, usize)> {
    outcomes
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != UNMEASURED)
        .map(|(s, &b)| (s, b, s / width))
        .collect()
}

/// Corrected output of one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutput {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub output: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactRun {
    pub branches: Vec<BranchOutput>,
    pub max_live_qubits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledRun {
    pub record: Vec<(usize, u8, usize)>,
    pub probability: f64,
    pub output: Vec<C64>,
    pub max_live_qubits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput {
    Exact(ExactRun),
    Sampled(SampledRun),
}

struct Engine<'a> {
    pattern: &'a Pattern,
    step: SwapIsometry,
    prepare: CMatrix,
}

impl<'a> Engine<'a> {
    fn new(pattern: &'a Pattern) -> Result<Self> {
        pattern.validate()?;
        let w = pattern.width;
        if w > MAX_ENGINE_WIDTH {
            return Err(Error::CapExceeded(format!(
                "pattern width {w} exceeds {MAX_ENGINE_WIDTH}"
            )));
        }
        // Two columns of the rectangular cluster; order 2 prepares the fresh
        // column as a 1D cluster before the row-wise C-phases.
        let spec = LatticeSpec::cluster(w, 2, Order::Second)?;
        Ok(Self {
            pattern,
            step: stage_isometry(&spec, 0),
            prepare: slice_unitary(&spec, 0),
        })
    }

    fn initial(&self, input: &[C64]) -> Result<TimeEngineState> {
        let (w, n) = (self.pattern.width, self.pattern.n_wires);
        crate::numerics::register::sites_for_len(input.len(), 2, n)?;
        let nrm = norm(input);
        if (nrm - 1.0).abs() > TOL.normalization {
            return Err(Error::NotNormalized { norm: nrm });
        }
        let rows = self.output_rows();
        let spacer_amp = std::f64::consts::FRAC_1_SQRT_2.powi((w - n) as i32);
        let column: Vec<C64> = (0..1usize << w)
            .map(|i| {
                let logical = rows
                    .iter()
                    .fold(0, |acc, &r| (acc << 1) | ((i >> (w - 1 - r)) & 1));
                input[logical] * spacer_amp
            })
            .collect();
        Ok(TimeEngineState {
            register: self.prepare.matvec(&column),
            outcomes: vec![UNMEASURED; self.pattern.n_sites()],
            probability: 1.0,
            recycle_count: 0,
            max_live_qubits: w,
        })
    }

    /// Rows of the output sites, in wire order.
    fn output_rows(&self) -> Vec<usize> {
        let last = self.pattern.columns.last().expect("validated");
        let mut rows = vec![0; self.pattern.n_wires];
        for (r, a) in last.iter().enumerate() {
            if let SiteAction::Output { wire } = a {
                rows[*wire] = r;
            }
        }
        rows
    }

    fn parity(&self, state: &TimeEngineState, domain: &[usize], column: usize) -> Result<bool> {
        let mut p = false;
        for &s in domain {
            let bit = state.outcomes[s];
            if bit == UNMEASURED || s / self.pattern.width >= column {
                return Err(Error::MalformedDependency(format!(
                    "site {s} read before it was measured"
                )));
            }
            p ^= bit == 1;
        }
        Ok(p)
    }

    /// Adapted single-site bases of one column; `None` for outputs.
    fn bases(&self, state: &TimeEngineState, t: usize) -> Result<Vec<Option<CMatrix>>> {
        self.pattern.columns[t]
            .iter()
            .map(|a| match a {
                SiteAction::Output { .. } => Ok(None),
                SiteAction::Measure { plane: Plane::Z, .. } => Ok(Some(MeasurementSetting::z().basis()?)),
                SiteAction::Measure { plane: Plane::XY, angle, x_domain } => {
                    let sign = if self.parity(state, x_domain, t)? { -1.0 } else { 1.0 };
                    let s = MeasurementSetting::Bloch {
                        theta: std::f64::consts::FRAC_PI_2,
                        phi: sign * angle,
                    };
                    Ok(Some(s.basis()?))
                }
            })
            .collect()
    }

    fn record(&self, state: &TimeEngineState, t: usize, bits: &[(usize, u8)]) -> Vec<u8> {
        let mut outcomes = state.outcomes.clone();
        for &(r, b) in bits {
            outcomes[self.pattern.site(t, r)] = b;
        }
        outcomes
    }

    /// All outcomes of measuring carrier column `t` (not the last), with
    /// their probabilities relative to `state`.
    fn step(&self, state: &TimeEngineState, t: usize) -> Result<Vec<(f64, TimeEngineState)>> {
        let w = self.pattern.width;
        let basis = self
            .bases(state, t)?
            .into_iter()
            .try_fold(CMatrix::identity(1), |acc, b| {
                b.map(|b| kron(&acc, &b))
                    .ok_or_else(|| Error::MalformedDependency(format!("output in column {t}")))
            })?;
        let live = 2 * w;
        assert!(live <= 2 * self.pattern.width, "live register exceeds 2W");
        let children = self.step.branch_states(&basis, &state.register)?;
        Ok(children
            .into_iter()
            .enumerate()
            .filter_map(|(i, phi)| {
                let q: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
                if q < TOL.branch_floor {
                    return None;
                }
                let bits: Vec<(usize, u8)> = (0..w).map(|r| (r, ((i >> (w - 1 - r)) & 1) as u8)).collect();
                let outcomes = self.record(state, t, &bits);
                let s = C64::new(1.0 / q.sqrt(), 0.0);
                Some((
                    q,
                    TimeEngineState {
                        register: phi.into_iter().map(|z| z * s).collect(),
                        outcomes,
                        probability: state.probability * q,
                        recycle_count: state.recycle_count + w,
                        max_live_qubits: state.max_live_qubits.max(live),
                    },
                ))
            })
            .collect())
    }

    /// Measures the non-output sites of the last column and applies the
    /// byproduct correction.
    fn finish(&self, state: &TimeEngineState) -> Result<Vec<(f64, BranchOutput)>> {
        let (w, n) = (self.pattern.width, self.pattern.n_wires);
        let t = self.pattern.columns.len() - 1;
        let bases = self.bases(state, t)?;
        let measured: Vec<usize> = (0..w).filter(|&r| bases[r].is_some()).collect();
        let rows = self.output_rows();
        let mut results = Vec::new();
        for m in 0..1usize << measured.len() {
            let mbit = |k: usize| (m >> (measured.len() - 1 - k)) & 1;
            let mut out = vec![ZERO; 1 << n];
            for (i, amp) in state.register.iter().enumerate() {
                let bit = |r: usize| (i >> (w - 1 - r)) & 1;
                let coeff = measured.iter().enumerate().fold(C64::new(1.0, 0.0), |acc, (k, &r)| {
                    acc * bases[r].as_ref().expect("measured")[(bit(r), mbit(k))].conj()
                });
                let logical = rows.iter().fold(0, |acc, &r| (acc << 1) | bit(r));
                out[logical] += coeff * amp;
            }
            let q: f64 = out.iter().map(|z| z.norm_sqr()).sum();
            if q < TOL.branch_floor {
                continue;
            }
            let bits: Vec<(usize, u8)> = measured.iter().enumerate().map(|(k, &r)| (r, mbit(k) as u8)).collect();
            let outcomes = self.record(state, t, &bits);
            let probe = TimeEngineState {
                outcomes,
                ..state.clone()
            };
            for wire in 0..n {
                let xs = self.parity(&probe, &self.pattern.x_correction[wire], t + 1)?;
                let zs = self.parity(&probe, &self.pattern.z_correction[wire], t + 1)?;
                correct(&mut out, n, wire, xs, zs);
            }
            let s = C64::new(1.0 / q.sqrt(), 0.0);
            results.push((
                q,
                BranchOutput {
                    outcomes: probe.outcomes,
                    probability: state.probability * q,
                    output: out.into_iter().map(|z| z * s).collect(),
                },
            ));
        }
        Ok(results)
    }
}

/// `Z^z X^x` on one wire.
fn correct(state: &mut [C64], n: usize, wire: usize, x: bool, z: bool) {
    let mask = 1usize << (n - 1 - wire);
    if x {
        for i in 0..state.len() {
            if i & mask == 0 {
                state.swap(i, i | mask);
            }
        }
    }
    if z {
        for (i, a) in state.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = -*a;
            }
        }
    }
}

/// Every branch with nonzero probability, each corrected to the logical
/// output.
pub fn run_exact(pattern: &Pattern, input: &[C64], exec: Exec) -> Result<ExactRun> {
    let engine = Engine::new(pattern)?;
    let mut nodes = vec![engine.initial(input)?];
    for t in 0..pattern.columns.len() - 1 {
        let expanded: Vec<Result<Vec<(f64, TimeEngineState)>>> = exec.map(&nodes, |s| engine.step(s, t));
        nodes = Vec::new();
        for children in expanded {
            nodes.extend(children?.into_iter().map(|(_, s)| s));
        }
    }
    let max_live_qubits = nodes.iter().map(|s| s.max_live_qubits).max().unwrap_or(0);
    let finished: Vec<Result<Vec<(f64, BranchOutput)>>> = exec.map(&nodes, |s| engine.finish(s));
    let mut branches = Vec::new();
    for f in finished {
        branches.extend(f?.into_iter().map(|(_, b)| b));
    }
    Ok(ExactRun {
        branches,
        max_live_qubits,
    })
}

fn sample<T>(rng: &mut ChaCha8Rng, weighted: Vec<(f64, T)>) -> T {
    let total: f64 = weighted.iter().map(|(q, _)| q).sum();
    let mut u = rng.gen::<f64>() * total;
    let last = weighted.len() - 1;
    for (k, (q, item)) in weighted.into_iter().enumerate() {
        if u < q || k == last {
            return item;
        }
        u -= q;
    }
    unreachable!("nonempty branch list")
}

/// Follows one branch, drawing outcomes from ChaCha8 seeded with `seed`.
pub fn run_sampled(pattern: &Pattern, input: &[C64], seed: u64) -> Result<SampledRun> {
    let engine = Engine::new(pattern)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = engine.initial(input)?;
    for t in 0..pattern.columns.len() - 1 {
        state = sample(&mut rng, engine.step(&state, t)?);
    }
    let branch = sample(&mut rng, engine.finish(&state)?);
    Ok(SampledRun {
        record: record_of(&branch.outcomes, pattern.width),
        probability: branch.probability,
        output: branch.output,
        max_live_qubits: state.max_live_qubits,
    })
}

pub fn run_in_time(pattern: &Pattern, input: &[C64], mode: RunMode) -> Result<RunOutput> {
    match mode {
        RunMode::Exact => run_exact(pattern, input, Exec::default()).map(RunOutput::Exact),
        RunMode::Sampled { seed } => run_sampled(pattern, input, seed).map(RunOutput::Sampled),
    }
}
