use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use seqcorr::lattice::{
    map_to_spatiotemporal, run_slice_program, build_lattice_state, LatticeSpec, Order, SiteGate,
};
use seqcorr::mbqc::{compile_pattern, run_exact, run_sampled, Circuit, Gate};
use seqcorr::mps::{cluster1d_mps, ghz_mps, mps_from_statevector, w_mps, GenerationSequence, Mps};
use seqcorr::numerics::{fidelity, gates, kron_vec, CMatrix, C64};
use seqcorr::random::{random_bloch_vector, random_setting, random_state, random_unitary};
use seqcorr::spatial::{joint_distribution, MeasurementSetting};
use seqcorr::temporal::{
    cluster_instrument, ghz_instrument, map_mps_to_chain, projective_chain_correlation,
};
use seqcorr::Exec;

use crate::error::{CliError, CliResult};
use crate::report::{Check, NamedMatrix, Report};
use crate::scenario::*;
use crate::tolerance::{CheckTolerances, ToleranceProfile};

/// Seed used when neither the scenario nor `--seed` provides one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub profile: ToleranceProfile,
    pub timing: bool,
}

/// ChaCha8 keyed by `seed_from_u64(seed)` on stream `stream`. Each named
/// consumer of randomness owns one stream, so adding draws to one check
/// never shifts another.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn build_mps(kind: StateKind, n: usize, rng: &mut ChaCha8Rng) -> CliResult<Mps> {
    Ok(match kind {
        StateKind::Ghz => ghz_mps(n)?,
        StateKind::W => w_mps(n)?,
        StateKind::Cluster => cluster1d_mps(n)?,
        StateKind::RandomLowBond => {
            let init = (0..n).map(|_| random_state(rng, 2)).collect();
            let us = (0..n - 1).map(|_| random_unitary(rng, 4)).collect();
            let psi = GenerationSequence::new(2, init, us)?.apply();
            mps_from_statevector(&psi, 2, n)?
        }
    })
}

/// Random two-qubit unitaries on every nearest-neighbour bond and random
/// initial states.
pub fn random_lattice(rng: &mut ChaCha8Rng, width: usize, depth: usize, order: Order) -> CliResult<LatticeSpec> {
    let column = |rng: &mut ChaCha8Rng| -> Vec<SiteGate> {
        (0..width.saturating_sub(1))
            .map(|w| SiteGate::new(w, w + 1, random_unitary(rng, 4)))
            .collect()
    };
    let rows = |rng: &mut ChaCha8Rng| -> Vec<SiteGate> {
        (0..width).map(|w| SiteGate::new(w, w, random_unitary(rng, 4))).collect()
    };
    let spacelike = (0..depth).map(|_| column(rng)).collect();
    let timelike = (0..depth.saturating_sub(1)).map(|_| rows(rng)).collect();
    let initial = (0..width * depth).map(|_| random_state(rng, 2)).collect();
    Ok(LatticeSpec::new(width, depth, 2, spacelike, timelike, order, initial)?)
}

pub fn random_grid(rng: &mut ChaCha8Rng, width: usize, depth: usize) -> Vec<Vec<MeasurementSetting>> {
    (0..depth)
        .map(|_| (0..width).map(|_| random_setting(rng)).collect())
        .collect()
}

/// Max per-tuple gap between the slice program and the spatial oracle, and
/// the worst stage completeness residual.
pub fn lattice_gap(spec: &LatticeSpec, grid: &[Vec<MeasurementSetting>]) -> CliResult<(f64, f64)> {
    let psi = build_lattice_state(spec)?;
    let flat: Vec<MeasurementSetting> = grid.iter().flatten().cloned().collect();
    let spatial = joint_distribution(&psi, &flat)?;
    let program = map_to_spatiotemporal(spec, grid)?;
    let residual = program
        .stages
        .iter()
        .map(|s| s.instrument.completeness_residual())
        .fold(0.0, f64::max);
    Ok((run_slice_program(&program)?.max_abs_diff(&spatial)?, residual))
}

pub fn circuit_from_specs(wires: usize, specs: &[GateSpec]) -> CliResult<Circuit> {
    let gates = specs
        .iter()
        .map(|g| match *g {
            GateSpec::Rot { wire, alpha, beta, gamma } => Gate::rot(wire, alpha, beta, gamma),
            GateSpec::Rz { wire, theta } => Gate::rz(wire, theta),
            GateSpec::H { wire } => Gate::h(wire),
            GateSpec::Cz { a, b } => Gate::cz(a, b),
            GateSpec::Cnot { control, target } => Gate::cnot(control, target),
        })
        .collect();
    Ok(Circuit::new(wires, gates)?)
}

fn input_state(spec: &InputSpec, n: usize) -> CliResult<Vec<C64>> {
    let dim = 1usize << n;
    match spec {
        InputSpec::Basis { index } if *index < dim => Ok(gates::ket(dim, *index)),
        InputSpec::Basis { index } => Err(CliError::Validation(format!(
            "basis index {index} out of range for {n} wires"
        ))),
        InputSpec::Plus => Ok((0..n).fold(vec![C64::new(1.0, 0.0)], |acc, _| kron_vec(&acc, &gates::plus()))),
        InputSpec::Amplitudes { values } if values.len() == dim => {
            Ok(values.iter().map(|&[re, im]| C64::new(re, im)).collect())
        }
        InputSpec::Amplitudes { values } => Err(CliError::Validation(format!(
            "{} amplitudes for {n} wires",
            values.len()
        ))),
    }
}

fn mps_map(p: &MpsMapParams, seed: u64, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let mut state_rng = rng_stream(seed, 0);
    let mut setting_rng = rng_stream(seed, 1);
    let mps = build_mps(p.state, p.n, &mut state_rng)?;
    let psi = mps.contract();
    let draws: Vec<Vec<MeasurementSetting>> = match &p.settings {
        Some(lists) => lists
            .iter()
            .map(|l| l.iter().map(|&[theta, phi]| MeasurementSetting::Bloch { theta, phi }).collect())
            .collect(),
        None => (0..p.draws)
            .map(|_| (0..p.n).map(|_| random_setting(&mut setting_rng)).collect())
            .collect(),
    };
    let mut checks = Vec::new();
    for (k, settings) in draws.iter().enumerate() {
        let temporal = map_mps_to_chain(&mps, settings)?.run()?;
        let spatial = joint_distribution(&psi, settings)?;
        checks.push(
            Check::at_most(format!("draw {k}: max tuple error"), temporal.max_abs_diff(&spatial)?, tol.equivalence)
                .with(json!({
                    "temporal_correlation": temporal.correlation()?,
                    "spatial_correlation": spatial.correlation()?,
                })),
        );
    }
    Ok(checks)
}

fn projective_chain(p: &ProjectiveChainParams, seed: u64, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let mut rng = rng_stream(seed, 0);
    let chains: Vec<Vec<[f64; 3]>> = match (&p.chains, p.n) {
        (Some(c), _) => c.clone(),
        (None, Some(n)) => (0..p.draws)
            .map(|_| (0..n).map(|_| random_bloch_vector(&mut rng)).collect())
            .collect(),
        (None, None) => return Err(CliError::Validation("either chains or n is required".into())),
    };
    let mut checks = Vec::new();
    for (k, ms) in chains.iter().enumerate() {
        let s = p.s.unwrap_or_else(|| random_bloch_vector(&mut rng));
        let (simulated, closed_form) = projective_chain_correlation(s, ms)?;
        checks.push(
            Check::at_most(format!("chain {k}: |simulated - closed form|"), (simulated - closed_form).abs(), tol.factorization)
                .with(json!({ "n": ms.len(), "simulated": simulated, "closed_form": closed_form })),
        );
    }
    Ok(checks)
}

fn lattice_map(p: &LatticeMapParams, seed: u64, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let order = Order::from_number(p.order)?;
    let mut spec_rng = rng_stream(seed, 0);
    let mut setting_rng = rng_stream(seed, 1);
    let mut checks = Vec::new();
    for k in 0..p.draws {
        let spec = match p.lattice {
            LatticeKind::Cluster => LatticeSpec::cluster(p.width, p.depth, order)?,
            LatticeKind::Random => random_lattice(&mut spec_rng, p.width, p.depth, order)?,
        };
        let grid = random_grid(&mut setting_rng, p.width, p.depth);
        let (gap, residual) = lattice_gap(&spec, &grid)?;
        checks.push(Check::at_most(format!("draw {k}: max tuple error"), gap, tol.equivalence));
        checks.push(Check::at_most(format!("draw {k}: stage completeness"), residual, tol.completeness));
        if p.lattice == LatticeKind::Cluster {
            let other = spec.with_order(if order == Order::First { Order::Second } else { Order::First });
            let a = run_slice_program(&map_to_spatiotemporal(&spec, &grid)?)?;
            let b = run_slice_program(&map_to_spatiotemporal(&other, &grid)?)?;
            checks.push(Check::at_most(
                format!("draw {k}: order 1 vs order 2"),
                a.max_abs_diff(&b)?,
                tol.commuting_orders,
            ));
        }
    }
    Ok(checks)
}

fn mbqc_run(p: &MbqcRunParams, seed: u64, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let circuit = circuit_from_specs(p.wires, &p.gates)?;
    let pattern = compile_pattern(&circuit)?;
    let input = input_state(&p.input, p.wires)?;
    let expected = circuit.simulate(&input)?;
    let width = pattern.width;
    let mut checks = Vec::new();
    match p.mode {
        ModeSpec::Exact => {
            let measured = pattern.n_sites() - p.wires;
            if measured > MAX_EXACT_MEASUREMENTS {
                return Err(CliError::Cap(format!(
                    "exact run over {measured} measurements exceeds {MAX_EXACT_MEASUREMENTS}"
                )));
            }
            let run = run_exact(&pattern, &input, Exec::default())?;
            let worst = run.branches.iter().map(|b| fidelity(&b.output, &expected)).fold(1.0, f64::min);
            checks.push(
                Check::at_most("min branch fidelity deficit", 1.0 - worst, tol.fidelity).with(json!({
                    "branches": run.branches.len(),
                    "columns": pattern.columns.len(),
                    "width": width,
                })),
            );
            checks.push(Check::at_most("live qubits", run.max_live_qubits as f64, (2 * width) as f64));
        }
        ModeSpec::Sampled => {
            let mut seeds = rng_stream(seed, 0);
            for k in 0..p.samples {
                let run = run_sampled(&pattern, &input, seeds.next_u64())?;
                checks.push(
                    Check::at_most(format!("sample {k}: fidelity deficit"), 1.0 - fidelity(&run.output, &expected), tol.fidelity)
                        .with(json!({ "measurements": run.record.len(), "probability": run.probability })),
                );
                checks.push(Check::at_most(
                    format!("sample {k}: live qubits"),
                    run.max_live_qubits as f64,
                    (2 * width) as f64,
                ));
            }
        }
    }
    Ok(checks)
}

fn instrument_checks(kind: DumpKind, theta: f64, phi: f64, tol: &CheckTolerances) -> (Vec<Check>, Vec<NamedMatrix>) {
    let inst = match kind {
        DumpKind::Ghz => ghz_instrument(theta, phi),
        DumpKind::Cluster => cluster_instrument(theta, phi),
    };
    let (c2, s2) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
    let expected = [CMatrix::from_real(&[&[c2, 0.0][..], &[0.0, s2][..]]), CMatrix::from_real(&[&[s2, 0.0][..], &[0.0, c2][..]])];
    let povm = inst.povm_elements();
    let povm_err = povm.iter().zip(&expected).map(|(e, x)| e.max_abs_diff(x)).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("completeness residual", inst.completeness_residual(), tol.completeness),
        Check::at_most("POVM elements vs diag(cos^2, sin^2)", povm_err, tol.closed_form),
    ];
    let labels = ["+1", "-1"];
    let mut matrices: Vec<NamedMatrix> = inst
        .ops()
        .iter()
        .zip(labels)
        .map(|(m, l)| NamedMatrix::new(format!("M[{l}]"), m))
        .collect();
    matrices.extend(povm.iter().zip(labels).map(|(e, l)| NamedMatrix::new(format!("E[{l}]"), e)));
    (checks, matrices)
}

/// `dump-instrument <kind> <theta> <phi>`.
pub fn dump_instrument(kind: DumpKind, theta: f64, phi: f64, opts: &RunOptions) -> CliResult<Report> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(CliError::Validation("non-finite angle".into()));
    }
    let tol = opts.profile.tolerances();
    let (checks, matrices) = instrument_checks(kind, theta, phi, &tol);
    let inputs = json!({ "state": kind, "theta": theta, "phi": phi });
    let mut report = Report::new("dump-instrument", None, opts.profile, inputs, checks);
    report.matrices = matrices;
    Ok(report)
}

/// Parses, validates and runs a scenario.
pub fn run_scenario(text: &str, opts: &RunOptions) -> CliResult<Report> {
    let started = Instant::now();
    let scenario = Scenario::parse(text)?;
    scenario.validate(opts.seed)?;
    let seed = opts.seed.or(scenario.seed).unwrap_or(DEFAULT_SEED);
    let tol = scenario.tolerances.apply(opts.profile.tolerances());
    let mut matrices = Vec::new();
    let checks = match &scenario.params {
        Params::MpsMap(p) => mps_map(p, seed, &tol)?,
        Params::ProjectiveChain(p) => projective_chain(p, seed, &tol)?,
        Params::LatticeMap(p) => lattice_map(p, seed, &tol)?,
        Params::MbqcRun(p) => mbqc_run(p, seed, &tol)?,
        Params::InstrumentDump(p) => {
            let (c, m) = instrument_checks(p.state, p.theta, p.phi, &tol);
            matrices = m;
            c
        }
    };
    let mut report = Report::new("run", Some(seed), opts.profile, scenario.to_json(), checks);
    report.matrices = matrices;
    if opts.timing {
        report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// Parses and validates a scenario and constructs its objects without
/// running any simulation.
pub fn validate_scenario(text: &str, opts: &RunOptions) -> CliResult<Report> {
    let scenario = Scenario::parse(text)?;
    scenario.validate(opts.seed)?;
    match &scenario.params {
        Params::MpsMap(p) => {
            let mut rng = rng_stream(opts.seed.or(scenario.seed).unwrap_or(DEFAULT_SEED), 0);
            let mps = build_mps(p.state, p.n, &mut rng)?;
            seqcorr::mps::sequential_unitaries(&mps)?;
        }
        Params::LatticeMap(p) => {
            LatticeSpec::cluster(p.width, p.depth, Order::from_number(p.order)?)?;
        }
        Params::MbqcRun(p) => {
            compile_pattern(&circuit_from_specs(p.wires, &p.gates)?)?;
            input_state(&p.input, p.wires)?;
        }
        Params::ProjectiveChain(_) | Params::InstrumentDump(_) => {}
    }
    Ok(Report::new(
        "validate",
        opts.seed.or(scenario.seed),
        opts.profile,
        scenario.to_json(),
        vec![Check::holds("scenario is valid", true)],
    ))
}
