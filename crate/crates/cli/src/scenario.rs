//! Scenario files: JSON with an explicit schema version.
//!
//! ```json
//! { "schema_version": 1, "kind": "mps_map", "seed": 7,
//!   "tolerances": { "equivalence": 1e-9 },
//!   "params": { "state": "ghz", "n": 5, "draws": 3 } }
//! ```
//!
//! Angles are radians, complex numbers `[re, im]`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::tolerance::ToleranceOverrides;

pub const MAX_CHAIN_SITES: usize = 12;
pub const MAX_DRAWS: usize = 10_000;
pub const MAX_LATTICE_WIDTH: usize = 6;
pub const MAX_MBQC_WIRES: usize = 4;
/// Exact MBQC runs enumerate `2^(measured sites)` branches.
pub const MAX_EXACT_MEASUREMENTS: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    MpsMap,
    ProjectiveChain,
    LatticeMap,
    MbqcRun,
    InstrumentDump,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema_version: u32,
    kind: Kind,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    params: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ghz,
    W,
    Cluster,
    /// Random staircase of two-qubit unitaries on random product states.
    RandomLowBond,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpsMapParams {
    pub state: StateKind,
    pub n: usize,
    #[serde(default = "one")]
    pub draws: usize,
    /// Explicit `(θ, φ)` per site for each draw; replaces random draws.
    #[serde(default)]
    pub settings: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectiveChainParams {
    /// Initial Bloch vector; random when absent.
    #[serde(default)]
    pub s: Option<[f64; 3]>,
    /// Explicit chains of measurement Bloch vectors.
    #[serde(default)]
    pub chains: Option<Vec<Vec<[f64; 3]>>>,
    /// Chain length for random draws.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub draws: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Cluster,
    /// Random two-site unitaries on every nearest-neighbour bond.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeMapParams {
    pub width: usize,
    pub depth: usize,
    pub order: u8,
    pub lattice: LatticeKind,
    #[serde(default = "one")]
    pub draws: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateSpec {
    Rot { wire: usize, alpha: f64, beta: f64, gamma: f64 },
    Rz { wire: usize, theta: f64 },
    H { wire: usize },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InputSpec {
    Basis { index: usize },
    Plus,
    Amplitudes { values: Vec<[f64; 2]> },
}

impl Default for InputSpec {
    fn default() -> Self {
        Self::Basis { index: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MbqcRunParams {
    pub wires: usize,
    pub gates: Vec<GateSpec>,
    #[serde(default)]
    pub input: InputSpec,
    #[serde(default)]
    pub mode: ModeSpec,
    /// Number of sampled runs.
    #[serde(default = "one")]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DumpKind {
    Ghz,
    Cluster,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentDumpParams {
    pub state: DumpKind,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Params {
    MpsMap(MpsMapParams),
    ProjectiveChain(ProjectiveChainParams),
    LatticeMap(LatticeMapParams),
    MbqcRun(MbqcRunParams),
    InstrumentDump(InstrumentDumpParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub seed: Option<u64>,
    pub tolerances: ToleranceOverrides,
    pub params: Params,
}

fn params<T: for<'de> Deserialize<'de>>(v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(format!("params: {e}")))
}

fn all_finite(xs: impl IntoIterator<Item = f64>) -> bool {
    xs.into_iter().all(f64::is_finite)
}

impl Scenario {
    /// Parses without validating.
    pub fn parse(text: &str) -> CliResult<Self> {
        let env: Envelope = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if env.schema_version != crate::report::SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "schema_version {} is not supported (expected {})",
                env.schema_version,
                crate::report::SCHEMA_VERSION
            )));
        }
        let params = match env.kind {
            Kind::MpsMap => Params::MpsMap(params(env.params)?),
            Kind::ProjectiveChain => Params::ProjectiveChain(params(env.params)?),
            Kind::LatticeMap => Params::LatticeMap(params(env.params)?),
            Kind::MbqcRun => Params::MbqcRun(params(env.params)?),
            Kind::InstrumentDump => Params::InstrumentDump(params(env.params)?),
        };
        Ok(Self {
            seed: env.seed,
            tolerances: env.tolerances,
            params,
        })
    }

    /// Echo of the parsed scenario for reports.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(&self.params).expect("params serialize");
        v["seed"] = serde_json::to_value(self.seed).expect("seed serializes");
        v["tolerances"] = serde_json::to_value(&self.tolerances).expect("overrides serialize");
        v
    }

    /// Checks angles, sizes against the simulation caps, and that sampled
    /// runs have a seed (from the file or `seed_override`).
    pub fn validate(&self, seed_override: Option<u64>) -> CliResult<()> {
        let invalid = |m: String| Err(CliError::Validation(m));
        let cap = |m: String| Err(CliError::Cap(m));
        if !all_finite(self.tolerances.values()) || self.tolerances.values().any(|t| t < 0.0) {
            return invalid("tolerances must be finite and nonnegative".into());
        }
        match &self.params {
            Params::MpsMap(p) => {
                if p.n < 2 {
                    return invalid(format!("n = {} (need at least 2 sites)", p.n));
                }
                if p.n > MAX_CHAIN_SITES {
                    return cap(format!("n = {} exceeds {MAX_CHAIN_SITES}", p.n));
                }
                if p.draws == 0 || p.draws > MAX_DRAWS {
                    return invalid(format!("draws = {} outside 1..={MAX_DRAWS}", p.draws));
                }
                if let Some(s) = &p.settings {
                    if s.iter().any(|d| d.len() != p.n) {
                        return invalid(format!("every settings list needs {} (theta, phi) pairs", p.n));
                    }
                    if !all_finite(s.iter().flatten().flatten().copied()) {
                        return invalid("non-finite angle in settings".into());
                    }
                }
            }
            Params::ProjectiveChain(p) => {
                if let Some(s) = p.s {
                    if !all_finite(s) {
                        return invalid("non-finite Bloch vector".into());
                    }
                }
                match (&p.chains, p.n) {
                    (Some(chains), _) => {
                        if chains.is_empty() || chains.iter().any(Vec::is_empty) {
                            return invalid("chains must be nonempty".into());
                        }
                        if chains.iter().any(|c| c.len() > MAX_CHAIN_SITES) {
                            return cap(format!("chain longer than {MAX_CHAIN_SITES}"));
                        }
                        if !all_finite(chains.iter().flatten().flatten().copied()) {
                            return invalid("non-finite Bloch vector".into());
                        }
                    }
                    (None, Some(n)) => {
                        if n == 0 {
                            return invalid("n must be at least 1".into());
                        }
                        if n > MAX_CHAIN_SITES {
                            return cap(format!("n = {n} exceeds {MAX_CHAIN_SITES}"));
                        }
                    }
                    (None, None) => return invalid("either chains or n is required".into()),
                }
                if p.draws == 0 || p.draws > MAX_DRAWS {
                    return invalid(format!("draws = {} outside 1..={MAX_DRAWS}", p.draws));
                }
            }
            Params::LatticeMap(p) => {
                if p.width == 0 || p.depth == 0 {
                    return invalid("width and depth must be positive".into());
                }
                if p.width > MAX_LATTICE_WIDTH {
                    return cap(format!("width {} exceeds {MAX_LATTICE_WIDTH}", p.width));
                }
                if p.width * p.depth > 16 {
                    return cap(format!("{}x{} lattice exceeds 16 qubits", p.width, p.depth));
                }
                seqcorr::lattice::Order::from_number(p.order)?;
                if p.draws == 0 || p.draws > MAX_DRAWS {
                    return invalid(format!("draws = {} outside 1..={MAX_DRAWS}", p.draws));
                }
            }
            Params::MbqcRun(p) => {
                if p.wires == 0 {
                    return invalid("wires must be positive".into());
                }
                if p.wires > MAX_MBQC_WIRES {
                    return cap(format!("{} wires exceed {MAX_MBQC_WIRES}", p.wires));
                }
                let angles = p.gates.iter().flat_map(|g| match *g {
                    GateSpec::Rot { alpha, beta, gamma, .. } => vec![alpha, beta, gamma],
                    GateSpec::Rz { theta, .. } => vec![theta],
                    _ => vec![],
                });
                if !all_finite(angles) {
                    return invalid("non-finite gate angle".into());
                }
                if let InputSpec::Amplitudes { values } = &p.input {
                    if !all_finite(values.iter().flatten().copied()) {
                        return invalid("non-finite input amplitude".into());
                    }
                }
                if p.mode == ModeSpec::Sampled {
                    if self.seed.or(seed_override).is_none() {
                        return invalid("sampled runs need a seed".into());
                    }
                    if p.samples == 0 || p.samples > MAX_DRAWS {
                        return invalid(format!("samples = {} outside 1..={MAX_DRAWS}", p.samples));
                    }
                }
            }
            Params::InstrumentDump(p) => {
                if !p.theta.is_finite() || !p.phi.is_finite() {
                    return invalid("non-finite angle".into());
                }
            }
        }
        Ok(())
    }
}
