//! The acceptance battery behind `seqcorr suite`.
//!
//! Criterion `k` draws from `rng_stream(seed, k)`. Oracles here are built
//! independently of the code under test where that is possible: target
//! states come from explicit amplitudes, instrument formulas are written out
//! entry by entry, and Schmidt ranks come from Gaussian elimination on the
//! reduced density matrix.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde_json::json;

use seqcorr::lattice::{LatticeSpec, Order};
use seqcorr::mbqc::{compile_pattern, projective_only_decorrelation_check, run_exact, Circuit, Gate};
use seqcorr::mps::{cluster1d_mps, ghz_mps, mps_from_statevector, sequential_unitaries, w_mps, Mps};
use seqcorr::numerics::{fidelity, gates, kron_vec, CMatrix, C64};
use seqcorr::random::{random_bloch_vector, random_setting, random_state};
use seqcorr::spatial::{joint_distribution, MeasurementSetting};
use seqcorr::temporal::{
    cluster_instrument, derive_instrument, factorized_correlation, ghz_instrument, map_mps_to_chain,
    projective_chain_correlation, ChainState, Instrument, TemporalChain,
};
use seqcorr::{Error, Exec};

use crate::error::CliResult;
use crate::report::{Check, Report};
use crate::run::{lattice_gap, random_grid, random_lattice, rng_stream};
use crate::tolerance::{CheckTolerances, ToleranceProfile};

/// Numbers and titles of the criteria the battery runs.
pub const CRITERIA: [(u8, &str); 7] = [
    (1, "spatial-temporal equivalence"),
    (2, "projective chain factorization"),
    (3, "closed-form instruments"),
    (4, "multi-point temporal witness"),
    (5, "bond-dimension gate"),
    (6, "lattice mapping"),
    (7, "measurement-based computation in time"),
];

/// Runs one criterion. Panics on an unknown number.
pub fn criterion(number: u8, seed: u64, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let mut rng = rng_stream(seed, number as u64);
    match number {
        1 => equivalence(&mut rng, tol),
        2 => factorization(&mut rng, tol),
        3 => closed_forms(tol),
        4 => witness(tol),
        5 => bond_gate(&mut rng),
        6 => lattices(&mut rng, tol),
        7 => mbqc(&mut rng, tol),
        _ => panic!("no criterion {number}"),
    }
}

pub fn run_suite(seed: u64, profile: ToleranceProfile, timing: bool) -> CliResult<Report> {
    let started = Instant::now();
    let tol = profile.tolerances();
    let mut checks = Vec::new();
    for (n, title) in CRITERIA {
        for mut c in criterion(n, seed, &tol)? {
            c.name = format!("{n} {title}: {}", c.name);
            checks.push(c);
        }
    }
    let inputs = json!({ "criteria": CRITERIA.iter().map(|&(n, t)| json!({"number": n, "title": t})).collect::<Vec<_>>() });
    let mut report = Report::new("suite", Some(seed), profile, inputs, checks);
    if timing {
        report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

fn amp(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ghz_vector(n: usize) -> Vec<C64> {
    let mut v = vec![amp(0.0); 1 << n];
    v[0] = amp(FRAC_1_SQRT_2);
    v[(1 << n) - 1] = amp(FRAC_1_SQRT_2);
    v
}

fn w_vector(n: usize) -> Vec<C64> {
    let mut v = vec![amp(0.0); 1 << n];
    for k in 0..n {
        v[1 << k] = amp(1.0 / (n as f64).sqrt());
    }
    v
}

/// `(−1)^(number of adjacent 11 pairs) / 2^(n/2)`.
fn cluster_vector(n: usize) -> Vec<C64> {
    let scale = (0.5f64).powf(n as f64 / 2.0);
    (0..1usize << n)
        .map(|i| {
            let pairs = (i & (i >> 1)).count_ones();
            amp(if pairs % 2 == 0 { scale } else { -scale })
        })
        .collect()
}

fn equivalence(rng: &mut ChaCha8Rng, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    type Family = (&'static str, fn(usize) -> seqcorr::Result<Mps>, fn(usize) -> Vec<C64>);
    let families: [Family; 3] = [
        ("ghz", ghz_mps, ghz_vector),
        ("w", w_mps, w_vector),
        ("cluster", cluster1d_mps, cluster_vector),
    ];
    let mut checks = Vec::new();
    for (name, mps_of, vector_of) in families {
        for n in 3..=8 {
            let mps = mps_of(n)?;
            let psi = vector_of(n);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let settings: Vec<MeasurementSetting> = (0..n).map(|_| random_setting(rng)).collect();
                let temporal = map_mps_to_chain(&mps, &settings)?.run()?;
                worst = worst.max(temporal.max_abs_diff(&joint_distribution(&psi, &settings)?)?);
            }
            checks.push(
                Check::at_most(format!("{name} N={n}, max tuple error over 20 draws"), worst, tol.equivalence),
            );
        }
    }
    Ok(checks)
}

fn factorization(rng: &mut ChaCha8Rng, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 2..=6 {
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let s = random_bloch_vector(rng);
            let ms: Vec<[f64; 3]> = (0..n).map(|_| random_bloch_vector(rng)).collect();
            let (sim, closed) = projective_chain_correlation(s, &ms)?;
            worst = worst.max((sim - closed).abs());
        }
        checks.push(Check::at_most(format!("N={n}, max error over 200 chains"), worst, tol.factorization));
    }
    Ok(checks)
}

/// Entry-by-entry instrument formulas.
fn analytic_ops(cluster: bool, theta: f64, phi: f64) -> [CMatrix; 2] {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let (e, ebar) = (C64::from_polar(si, phi), C64::from_polar(si, -phi));
    let z = amp(0.0);
    if cluster {
        let h = FRAC_1_SQRT_2;
        let plus = [[amp(co * h), ebar * h], [amp(co * h), -ebar * h]];
        let minus = [[e * h, amp(-co * h)], [e * h, amp(co * h)]];
        [plus, minus].map(|m| CMatrix::from_fn(2, 2, |r, c| m[r][c]))
    } else {
        let plus = [[amp(co), z], [z, ebar]];
        let minus = [[e, z], [z, amp(-co)]];
        [plus, minus].map(|m| CMatrix::from_fn(2, 2, |r, c| m[r][c]))
    }
}

fn ops_gap(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

fn closed_forms(tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let grid: Vec<(f64, f64)> = (0..10)
        .flat_map(|i| (0..10).map(move |j| (PI * i as f64 / 9.0, 2.0 * PI * j as f64 / 10.0)))
        .collect();
    let (mut ghz_err, mut cluster_err, mut derived_err, mut povm_err): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for &(theta, phi) in &grid {
        let ghz = ghz_instrument(theta, phi);
        let cluster = cluster_instrument(theta, phi);
        ghz_err = ghz_err.max(ops_gap(ghz.ops(), &analytic_ops(false, theta, phi)));
        cluster_err = cluster_err.max(ops_gap(cluster.ops(), &analytic_ops(true, theta, phi)));
        let setting = MeasurementSetting::Bloch { theta, phi };
        let from_cnot = derive_instrument(&gates::cnot(), &setting, &gates::ket(2, 0))?;
        let from_cz = derive_instrument(&gates::cz(), &setting, &gates::plus())?;
        derived_err = derived_err
            .max(ops_gap(from_cnot.ops(), ghz.ops()))
            .max(ops_gap(from_cz.ops(), cluster.ops()));
        povm_err = povm_err.max(ops_gap(&ghz.povm_elements(), &cluster.povm_elements()));
    }
    let run = |phi: f64| {
        TemporalChain {
            initial: ChainState::pure(&gates::plus())?,
            instruments: vec![ghz_instrument(FRAC_PI_2, phi); 2],
            final_setting: MeasurementSetting::x(),
        }
        .run()
    };
    let distance = run(0.0)?.statistical_distance(&run(FRAC_PI_2)?)?;
    Ok(vec![
        Check::at_most("GHZ instrument vs analytic entries", ghz_err, tol.closed_form),
        Check::at_most("cluster instrument vs analytic entries", cluster_err, tol.closed_form),
        Check::at_most("instruments derived from gates vs closed forms", derived_err, tol.closed_form),
        Check::at_most("GHZ vs cluster POVM elements on 10x10 grid", povm_err, tol.closed_form),
        Check::at_least("statistical distance, phi=0 vs phi=pi/2 at theta=pi/2", distance, 0.1),
    ])
}

fn witness(tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let setting = MeasurementSetting::Bloch { theta: FRAC_PI_2, phi: FRAC_PI_4 };
    let chain = TemporalChain {
        initial: ChainState::pure(&gates::plus())?,
        instruments: vec![ghz_instrument(FRAC_PI_2, FRAC_PI_4); 2],
        final_setting: setting.clone(),
    };
    let temporal = chain.run()?.correlation()?;
    let spatial = joint_distribution(&ghz_vector(3), &vec![setting; 3])?.correlation()?;
    let m = [FRAC_PI_4.cos(), FRAC_PI_4.sin(), 0.0];
    let factorized = factorized_correlation([1.0, 0.0, 0.0], &[m, m, m])?;
    let target = (3.0 * FRAC_PI_4).cos();
    Ok(vec![
        Check::at_most("|temporal - spatial oracle|", (temporal - spatial).abs(), tol.equivalence)
            .with(json!({ "temporal": temporal, "spatial": spatial })),
        Check::at_most("|temporal - cos(3 pi/4)|", (temporal - target).abs(), tol.equivalence),
        Check::at_least("|temporal - factorized|", (temporal - factorized).abs(), 0.3)
            .with(json!({ "factorized": factorized })),
    ])
}

/// Rank of a Hermitian matrix by Gaussian elimination with partial pivoting.
fn rank(mut m: Vec<Vec<C64>>, threshold: f64) -> usize {
    let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm())) else { break };
        if m[p][c].norm() <= threshold {
            continue;
        }
        m.swap(r, p);
        for i in r + 1..rows {
            let f = m[i][c] / m[r][c];
            for j in c..cols {
                let v = m[r][j];
                m[i][j] -= f * v;
            }
        }
        r += 1;
    }
    r
}

/// Largest Schmidt rank over all cuts, from `ρ_A = Tr_B |ψ⟩⟨ψ|`.
fn max_cut_rank(psi: &[C64], n: usize) -> usize {
    (1..n)
        .map(|cut| {
            let (a, b) = (1usize << cut, 1usize << (n - cut));
            let rho: Vec<Vec<C64>> = (0..a)
                .map(|i| (0..a).map(|j| (0..b).map(|k| psi[i * b + k] * psi[j * b + k].conj()).sum()).collect())
                .collect();
            rank(rho, 1e-10)
        })
        .max()
        .unwrap_or(1)
}

fn bond_gate(rng: &mut ChaCha8Rng) -> CliResult<Vec<Check>> {
    let too_large = |e: &Error| matches!(e, Error::BondDimensionTooLarge { .. });
    let mut checks = Vec::new();
    let psi = random_state(rng, 16);
    let oracle = max_cut_rank(&psi, 4);
    let mps = mps_from_statevector(&psi, 2, 4)?;
    let settings: Vec<MeasurementSetting> = (0..4).map(|_| random_setting(rng)).collect();
    checks.push(Check::at_least("random 4-qubit state: oracle Schmidt rank", oracle as f64, 3.0));
    checks.push(Check::holds(
        "random 4-qubit state: sequential_unitaries rejects",
        sequential_unitaries(&mps).as_ref().err().is_some_and(too_large),
    ));
    checks.push(Check::holds(
        "random 4-qubit state: map_mps_to_chain rejects",
        map_mps_to_chain(&mps, &settings).as_ref().err().is_some_and(too_large),
    ));
    let families: [(&str, fn(usize) -> seqcorr::Result<Mps>); 3] =
        [("ghz", ghz_mps), ("w", w_mps), ("cluster", cluster1d_mps)];
    for (name, mps_of) in families {
        let mut accepted = true;
        let mut worst_rank = 0;
        for n in 3..=8 {
            let mps = mps_of(n)?;
            let settings: Vec<MeasurementSetting> = (0..n).map(|_| MeasurementSetting::z()).collect();
            accepted &= sequential_unitaries(&mps).is_ok() && map_mps_to_chain(&mps, &settings).is_ok();
            worst_rank = worst_rank.max(max_cut_rank(&mps.contract(), n));
        }
        checks.push(Check::holds(format!("{name} N=3..8 accepted"), accepted));
        checks.push(Check::at_most(format!("{name} N=3..8 oracle Schmidt rank"), worst_rank as f64, 2.0));
    }
    Ok(checks)
}

fn lattices(rng: &mut ChaCha8Rng, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for (w, t) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let mut gap: f64 = 0.0;
        let mut orders: f64 = 0.0;
        for _ in 0..3 {
            let grid = random_grid(rng, w, t);
            let first = LatticeSpec::cluster(w, t, Order::First)?;
            let second = first.with_order(Order::Second);
            let (g1, _) = lattice_gap(&first, &grid)?;
            let (g2, _) = lattice_gap(&second, &grid)?;
            gap = gap.max(g1).max(g2);
            let a = seqcorr::lattice::run_slice_program(&seqcorr::lattice::map_to_spatiotemporal(&first, &grid)?)?;
            let b = seqcorr::lattice::run_slice_program(&seqcorr::lattice::map_to_spatiotemporal(&second, &grid)?)?;
            orders = orders.max(a.max_abs_diff(&b)?);
        }
        checks.push(Check::at_most(format!("{w}x{t} cluster, both orders vs oracle"), gap, tol.equivalence));
        checks.push(Check::at_most(format!("{w}x{t} cluster, order 1 vs order 2"), orders, tol.commuting_orders));
    }
    for order in [Order::First, Order::Second] {
        let spec = random_lattice(rng, 2, 2, order)?;
        let (gap, residual) = lattice_gap(&spec, &random_grid(rng, 2, 2))?;
        let n = order.number();
        checks.push(Check::at_most(format!("2x2 random lattice, order {n} vs oracle"), gap, tol.equivalence));
        checks.push(Check::at_most(format!("2x2 random lattice, order {n} completeness"), residual, tol.completeness));
    }
    Ok(checks)
}

fn projective_chain(s: [f64; 3], ms: &[[f64; 3]]) -> seqcorr::Result<TemporalChain> {
    let settings = ms
        .iter()
        .map(|&m| MeasurementSetting::from_bloch_vector(m))
        .collect::<seqcorr::Result<Vec<_>>>()?;
    let (last, rest) = settings.split_last().expect("nonempty chain");
    Ok(TemporalChain {
        initial: ChainState::from_bloch(s)?,
        instruments: rest.iter().map(Instrument::from_setting).collect::<seqcorr::Result<_>>()?,
        final_setting: last.clone(),
    })
}

fn mbqc(rng: &mut ChaCha8Rng, tol: &CheckTolerances) -> CliResult<Vec<Check>> {
    let circuits = [
        ("(a) H wire", Circuit::new(1, vec![Gate::h(0)])?),
        ("(b) Rz(pi/4) H", Circuit::new(1, vec![Gate::h(0), Gate::rz(0, FRAC_PI_4)])?),
        ("(c) CZ", Circuit::new(2, vec![Gate::cz(0, 1)])?),
        (
            "(d) two rotations and CZ",
            Circuit::new(2, vec![Gate::rot(0, 0.3, 1.1, -0.4), Gate::rz(1, 0.9), Gate::cz(0, 1)])?,
        ),
    ];
    let mut checks = Vec::new();
    for (name, circuit) in &circuits {
        let n = circuit.n_wires();
        let plus = (0..n).fold(vec![amp(1.0)], |acc, _| kron_vec(&acc, &gates::plus()));
        let inputs = [gates::ket(1 << n, 0), plus, random_state(rng, 1 << n)];
        let pattern = compile_pattern(circuit)?;
        let (mut deficit, mut live, mut branches, mut mass): (f64, usize, usize, f64) = (0.0, 0, 0, 0.0);
        for input in &inputs {
            let expected = circuit.simulate(input)?;
            let run = run_exact(&pattern, input, Exec::default())?;
            for b in &run.branches {
                deficit = deficit.max(1.0 - fidelity(&b.output, &expected));
            }
            live = live.max(run.max_live_qubits);
            branches = branches.max(run.branches.len());
            let total: f64 = run.branches.iter().map(|b| b.probability).sum();
            mass = mass.max((total - 1.0).abs());
        }
        let width = pattern.width;
        checks.push(
            Check::at_most(format!("{name}: worst branch fidelity deficit"), deficit, tol.fidelity)
                .with(json!({ "branches": branches, "columns": pattern.columns.len(), "width": width })),
        );
        checks.push(Check::at_most(format!("{name}: branch probability mass error"), mass, tol.fidelity));
        checks.push(Check::at_most(format!("{name}: live qubits"), live as f64, (2 * width) as f64));
    }
    let mut gap: f64 = 0.0;
    for _ in 0..20 {
        let s = random_bloch_vector(rng);
        let ms: Vec<[f64; 3]> = (0..4).map(|_| random_bloch_vector(rng)).collect();
        gap = gap.max(projective_only_decorrelation_check(&projective_chain(s, &ms)?)?.max_gap);
    }
    checks.push(Check::at_most("projective chains: max conditional gap", gap, tol.decorrelation));
    let witness = TemporalChain {
        initial: ChainState::pure(&gates::plus())?,
        instruments: vec![ghz_instrument(FRAC_PI_2, FRAC_PI_4); 2],
        final_setting: MeasurementSetting::Bloch { theta: FRAC_PI_2, phi: FRAC_PI_4 },
    };
    let instrument_gap = projective_only_decorrelation_check(&witness)?.max_gap;
    checks.push(Check::at_least("GHZ instrument chain: conditional gap", instrument_gap, 0.05));
    Ok(checks)
}
