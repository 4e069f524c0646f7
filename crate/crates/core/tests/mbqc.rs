use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqcorr::mbqc::*;
use seqcorr::numerics::{fidelity, gates, inner, kron_vec};
use seqcorr::random::random_state;
use seqcorr::spatial::MeasurementSetting;
use seqcorr::temporal::{ghz_instrument, ChainState, Instrument, TemporalChain};
use seqcorr::{Error, Exec};

fn min_fidelity(circuit: &Circuit, input: &[C64]) -> (f64, ExactRun) {
    let pattern = compile_pattern(circuit).unwrap();
    let run = run_exact(&pattern, input, Exec::default()).unwrap();
    let expected = circuit.simulate(input).unwrap();
    let worst = run
        .branches
        .iter()
        .map(|b| fidelity(&b.output, &expected))
        .fold(1.0, f64::min);
    (worst, run)
}

fn basis_inputs(n: usize) -> Vec<Vec<C64>> {
    (0..1usize << n).map(|i| gates::ket(1 << n, i)).collect()
}

#[test]
fn empty_circuit_is_identity_wire() {
    let circuit = Circuit::new(1, vec![]).unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    assert_eq!(pattern.columns.len(), 3);
    for col in &pattern.columns[..2] {
        assert!(matches!(col[0], SiteAction::Measure { plane: Plane::XY, angle, .. } if angle == 0.0));
    }
    for input in [gates::ket(2, 0), gates::ket(2, 1), gates::plus()] {
        let (f, run) = min_fidelity(&circuit, &input);
        assert!(f >= 1.0 - 1e-9);
        assert_eq!(run.branches.len(), 4);
    }
}

#[test]
fn z_rotation_uses_one_adaptive_angle() {
    let theta = 0.7;
    let circuit = Circuit::new(1, vec![Gate::rz(0, theta)]).unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    let angles: Vec<f64> = pattern.columns[..2]
        .iter()
        .map(|c| match &c[0] {
            SiteAction::Measure { angle, .. } => *angle,
            _ => panic!("wire site must be measured"),
        })
        .collect();
    assert_eq!(angles, vec![-theta, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let (f, run) = min_fidelity(&circuit, &random_state(&mut rng, 2));
        assert!(f >= 1.0 - 1e-9);
        // both signs of the first outcome occur
        assert!(run.branches.iter().any(|b| b.outcomes[0] == 0));
        assert!(run.branches.iter().any(|b| b.outcomes[0] == 1));
    }
}

#[test]
fn hadamard_wire() {
    let circuit = Circuit::new(1, vec![Gate::h(0)]).unwrap();
    for input in [gates::ket(2, 0), gates::ket(2, 1), gates::plus()] {
        assert!(min_fidelity(&circuit, &input).0 >= 1.0 - 1e-9);
    }
}

#[test]
fn rz_after_hadamard_on_zero() {
    let circuit = Circuit::new(1, vec![Gate::h(0), Gate::rz(0, FRAC_PI_4)]).unwrap();
    let (f, run) = min_fidelity(&circuit, &gates::ket(2, 0));
    assert!(f >= 1.0 - 1e-9);
    assert_eq!(run.max_live_qubits, 2);
}

#[test]
fn controlled_z_on_computational_inputs() {
    let circuit = Circuit::new(2, vec![Gate::cz(0, 1)]).unwrap();
    for input in basis_inputs(2) {
        let (f, run) = min_fidelity(&circuit, &input);
        assert!(f >= 1.0 - 1e-9);
        assert!(run.max_live_qubits <= 6);
    }
}

#[test]
fn controlled_z_entangles_plus_states() {
    let circuit = Circuit::new(2, vec![Gate::cz(0, 1)]).unwrap();
    let input = kron_vec(&gates::plus(), &gates::plus());
    let (f, run) = min_fidelity(&circuit, &input);
    assert!(f >= 1.0 - 1e-9);
    let expected = circuit.simulate(&input).unwrap();
    let xx = seqcorr::numerics::kron(&gates::pauli_x(), &gates::pauli_x());
    let zz = seqcorr::numerics::kron(&gates::pauli_z(), &gates::pauli_z());
    for b in &run.branches {
        for op in [&xx, &zz] {
            let got = inner(&b.output, &op.matvec(&b.output)).re;
            let want = inner(&expected, &op.matvec(&expected)).re;
            assert!((got - want).abs() <= 1e-9);
        }
    }
}

#[test]
fn cnot_on_computational_inputs() {
    for (c, t) in [(0, 1), (1, 0)] {
        let circuit = Circuit::new(2, vec![Gate::cnot(c, t)]).unwrap();
        let pattern = compile_pattern(&circuit).unwrap();
        for (k, input) in basis_inputs(2).into_iter().enumerate() {
            let run = run_sampled(&pattern, &input, k as u64).unwrap();
            let expected = circuit.simulate(&input).unwrap();
            assert!(fidelity(&run.output, &expected) >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn two_wire_circuit_with_rotations_and_cz() {
    let circuit = Circuit::new(
        2,
        vec![Gate::rot(0, 0.3, 1.1, -0.4), Gate::rz(1, 0.9), Gate::cz(0, 1)],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let input = random_state(&mut rng, 4);
    let (f, run) = min_fidelity(&circuit, &input);
    assert!(f >= 1.0 - 1e-9, "fidelity {f}");
    assert!(run.max_live_qubits <= 6);
    let total: f64 = run.branches.iter().map(|b| b.probability).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn sampled_runs_are_reproducible() {
    let circuit = Circuit::new(2, vec![Gate::h(0), Gate::cnot(0, 1), Gate::rz(1, 0.3)]).unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    let input = gates::ket(4, 0);
    let a = run_sampled(&pattern, &input, 42).unwrap();
    let b = run_sampled(&pattern, &input, 42).unwrap();
    assert_eq!(a, b);
    let c = run_sampled(&pattern, &input, 43).unwrap();
    assert_ne!(a.record, c.record);
    assert!(fidelity(&a.output, &circuit.simulate(&input).unwrap()) >= 1.0 - 1e-9);
}

#[test]
fn run_in_time_dispatches_modes() {
    let circuit = Circuit::new(1, vec![Gate::rz(0, 0.2)]).unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    assert!(matches!(run_in_time(&pattern, &gates::plus(), RunMode::Exact).unwrap(), RunOutput::Exact(_)));
    assert!(matches!(
        run_in_time(&pattern, &gates::plus(), RunMode::Sampled { seed: 7 }).unwrap(),
        RunOutput::Sampled(_)
    ));
}

#[test]
fn exec_modes_agree() {
    let circuit = Circuit::new(2, vec![Gate::rz(0, 0.5), Gate::cz(0, 1)]).unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    let input = kron_vec(&gates::plus(), &gates::ket(2, 1));
    let a = run_exact(&pattern, &input, Exec::Sequential).unwrap();
    let b = run_exact(&pattern, &input, Exec::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn compiler_rejects_unsupported_circuits() {
    assert!(matches!(
        Circuit::new(2, vec![Gate::cz(0, 2)]),
        Err(Error::WidthExceeded { circuit: 3, pattern: 2 })
    ));
    let far = Circuit::new(3, vec![Gate::cz(0, 2)]).unwrap();
    assert!(matches!(compile_pattern(&far), Err(Error::UnsupportedGate(_))));
    assert!(matches!(Circuit::new(2, vec![Gate::cnot(1, 1)]), Err(Error::UnsupportedGate(_))));
    let wide = compile_pattern(&Circuit::new(5, vec![]).unwrap()).unwrap();
    assert!(matches!(
        run_exact(&wide, &gates::ket(32, 0), Exec::Sequential),
        Err(Error::CapExceeded(_))
    ));
}

#[test]
fn causality_violations_are_rejected() {
    let circuit = Circuit::new(1, vec![Gate::rz(0, 0.4)]).unwrap();
    let mut pattern = compile_pattern(&circuit).unwrap();
    if let SiteAction::Measure { x_domain, .. } = &mut pattern.columns[0][0] {
        x_domain.push(1);
    }
    assert!(matches!(pattern.validate(), Err(Error::MalformedDependency(_))));
    assert!(matches!(
        run_exact(&pattern, &gates::plus(), Exec::Sequential),
        Err(Error::MalformedDependency(_))
    ));
}

#[test]
fn compiled_domains_are_causal() {
    let circuit = Circuit::new(
        3,
        vec![Gate::rot(1, 0.1, 0.2, 0.3), Gate::cz(0, 1), Gate::cnot(2, 1), Gate::rz(0, 1.0)],
    )
    .unwrap();
    let pattern = compile_pattern(&circuit).unwrap();
    for (t, col) in pattern.columns.iter().enumerate() {
        for a in col {
            if let SiteAction::Measure { x_domain, .. } = a {
                assert!(x_domain.iter().all(|&s| s / pattern.width < t));
            }
        }
    }
}

fn projective_chain(ms: &[[f64; 3]], s: [f64; 3]) -> TemporalChain {
    let settings: Vec<MeasurementSetting> =
        ms.iter().map(|&m| MeasurementSetting::from_bloch_vector(m).unwrap()).collect();
    TemporalChain {
        initial: ChainState::from_bloch(s).unwrap(),
        instruments: settings[..ms.len() - 1]
            .iter()
            .map(|m| Instrument::from_setting(m).unwrap())
            .collect(),
        final_setting: settings[ms.len() - 1].clone(),
    }
}

#[test]
fn projective_chains_forget_their_history() {
    let z = [0.0, 0.0, 1.0];
    let x = [1.0, 0.0, 0.0];
    let report = projective_only_decorrelation_check(&projective_chain(&[z, x, x], [0.0, 0.0, 1.0])).unwrap();
    assert_eq!(report.stage_gaps.len(), 1);
    assert!(report.passes(1e-10));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let ms: Vec<[f64; 3]> = (0..4).map(|_| seqcorr::random::random_bloch_vector(&mut rng)).collect();
        let s = seqcorr::random::random_bloch_vector(&mut rng);
        let report = projective_only_decorrelation_check(&projective_chain(&ms, s)).unwrap();
        assert_eq!(report.stage_gaps.len(), 2);
        assert!(report.max_gap <= 1e-10, "gap {}", report.max_gap);
    }
}

#[test]
fn instrument_chains_remember_their_history() {
    let chain = TemporalChain {
        initial: ChainState::pure(&gates::plus()).unwrap(),
        instruments: vec![ghz_instrument(FRAC_PI_2, FRAC_PI_4); 2],
        final_setting: MeasurementSetting::Bloch { theta: FRAC_PI_2, phi: FRAC_PI_4 },
    };
    let report = projective_only_decorrelation_check(&chain).unwrap();
    assert!(report.max_gap >= 0.05, "gap {}", report.max_gap);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compiled_circuits_match_oracle(seed in any::<u64>(), n in 1usize..=3, count in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates_list: Vec<Gate> = (0..count)
            .map(|_| {
                let w = rng.gen_range(0..n);
                let angle = |rng: &mut ChaCha8Rng| rng.gen_range(-PI..PI);
                match rng.gen_range(0..if n > 1 { 5 } else { 3 }) {
                    0 => Gate::rot(w, angle(&mut rng), angle(&mut rng), angle(&mut rng)),
                    1 => Gate::rz(w, angle(&mut rng)),
                    2 => Gate::h(w),
                    k => {
                        let a = rng.gen_range(0..n - 1);
                        if k == 3 { Gate::cz(a, a + 1) } else if rng.gen_bool(0.5) { Gate::cnot(a, a + 1) } else { Gate::cnot(a + 1, a) }
                    }
                }
            })
            .collect();
        let circuit = Circuit::new(n, gates_list).unwrap();
        let pattern = compile_pattern(&circuit).unwrap();
        let input = random_state(&mut rng, 1 << n);
        let expected = circuit.simulate(&input).unwrap();
        let measured = pattern.width * (pattern.columns.len() - 1) + pattern.width - n;
        if measured <= 16 {
            let run = run_exact(&pattern, &input, Exec::default()).unwrap();
            for b in &run.branches {
                prop_assert!(fidelity(&b.output, &expected) >= 1.0 - 1e-9);
            }
            prop_assert!(run.max_live_qubits <= 2 * pattern.width);
        } else {
            for k in 0..32u64 {
                let run = run_sampled(&pattern, &input, seed ^ k).unwrap();
                prop_assert!(fidelity(&run.output, &expected) >= 1.0 - 1e-9);
                prop_assert!(run.max_live_qubits <= 2 * pattern.width);
            }
        }
    }
}
