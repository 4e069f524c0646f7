use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqcorr::mps::{
    cluster1d_mps, cluster_generation_sequence, ghz_generation_sequence, ghz_mps, product_mps,
    GenerationSequence,
};
use seqcorr::numerics::{gates, CMatrix};
use seqcorr::random::{random_basis_setting, random_bloch_vector, random_setting, random_state, random_unitary};
use seqcorr::spatial::{joint_distribution, MeasurementSetting};
use seqcorr::temporal::*;
use seqcorr::{Error, Exec};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b)
}

fn random_sequence(rng: &mut ChaCha8Rng, d: usize, n: usize) -> GenerationSequence {
    let init = (0..n).map(|_| random_state(rng, d)).collect();
    let us = (0..n - 1).map(|_| random_unitary(rng, d * d)).collect();
    GenerationSequence::new(d, init, us).unwrap()
}

fn random_settings(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<MeasurementSetting> {
    (0..n)
        .map(|_| {
            if d == 2 && rng.gen_bool(0.5) {
                random_setting(rng)
            } else {
                random_basis_setting(rng, d)
            }
        })
        .collect()
}

#[test]
fn swap_gate_satisfies_swap_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = gates::swap(2);
    let setting = MeasurementSetting::z();
    let ancilla = gates::ket(2, 0);
    let inst = derive_instrument(&u, &setting, &ancilla).unwrap();
    for _ in 0..10 {
        let psi = random_state(&mut rng, 2);
        let r = swap_equation_residual(&u, &setting.basis().unwrap(), &ancilla, &inst, &psi);
        assert!(r <= 1e-12, "residual {r}");
    }
    // SU = I, so the measured particle is the fresh |0⟩
    assert!(max_diff(&inst.ops()[0], &CMatrix::identity(2)) < 1e-15);
    assert!(inst.ops()[1].max_abs() < 1e-15);
}

#[test]
fn random_gates_satisfy_swap_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in 2..=4 {
        for _ in 0..5 {
            let u = random_unitary(&mut rng, d * d);
            let v = random_unitary(&mut rng, d);
            let lambda = random_state(&mut rng, d);
            let inst = derive_instrument(&u, &MeasurementSetting::Basis(v.clone()), &lambda).unwrap();
            assert!(inst.completeness_residual() <= 1e-12);
            for _ in 0..3 {
                let psi = random_state(&mut rng, d);
                assert!(swap_equation_residual(&u, &v, &lambda, &inst, &psi) <= 1e-12);
            }
        }
    }
}

#[test]
fn cnot_gate_gives_ghz_operators_verbatim() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (theta, phi) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
        let setting = MeasurementSetting::Bloch { theta, phi };
        let derived = derive_instrument(&gates::cnot(), &setting, &gates::ket(2, 0)).unwrap();
        let literal = ghz_instrument(theta, phi);
        for (a, b) in derived.ops().iter().zip(literal.ops()) {
            assert!(max_diff(a, b) <= 1e-14);
        }
    }
}

#[test]
fn cz_gate_gives_cluster_operators_verbatim() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (theta, phi) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
        let setting = MeasurementSetting::Bloch { theta, phi };
        let derived = derive_instrument(&gates::cz(), &setting, &gates::plus()).unwrap();
        let literal = cluster_instrument(theta, phi);
        for (a, b) in derived.ops().iter().zip(literal.ops()) {
            assert!(max_diff(a, b) <= 1e-14);
        }
    }
}

#[test]
fn ghz_operators_at_zero_angles() {
    let inst = ghz_instrument(0.0, 0.0);
    let plus = CMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let minus = CMatrix::from_real(&[&[0.0, 0.0], &[0.0, -1.0]]);
    assert!(max_diff(&inst.ops()[0], &plus) == 0.0);
    assert!(max_diff(&inst.ops()[1], &minus) == 0.0);
    assert_eq!(inst.outcome_values(), &[1.0, -1.0]);
}

#[test]
fn cluster_operators_at_equator_have_half_entries() {
    let inst = cluster_instrument(FRAC_PI_2, 0.0);
    for m in inst.ops() {
        for z in m.data() {
            assert!((z.norm() - 0.5).abs() < 1e-15);
        }
    }
}

#[test]
fn ghz_and_cluster_share_povm_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (theta, phi): (f64, f64) = (rng.gen_range(-7.0..7.0), rng.gen_range(-7.0..7.0));
        let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let expected = [
            CMatrix::from_real(&[&[co * co, 0.0], &[0.0, si * si]]),
            CMatrix::from_real(&[&[si * si, 0.0], &[0.0, co * co]]),
        ];
        for inst in [ghz_instrument(theta, phi), cluster_instrument(theta, phi)] {
            assert!(inst.completeness_residual() <= 1e-14);
            for (e, x) in povm_elements(&inst).iter().zip(&expected) {
                assert!(max_diff(e, x) <= 1e-14);
            }
        }
    }
}

#[test]
fn projective_instrument_povm_is_itself() {
    let inst = Instrument::from_setting(&MeasurementSetting::z()).unwrap();
    let e = inst.povm_elements();
    assert!(max_diff(&e[0], &CMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]])) < 1e-15);
    assert!(max_diff(&e[1], &CMatrix::from_real(&[&[0.0, 0.0], &[0.0, 1.0]])) < 1e-15);
}

#[test]
fn incomplete_instrument_is_rejected() {
    let half = CMatrix::identity(2).scale(c(0.5, 0.0));
    assert!(matches!(
        Instrument::new(vec![half.clone(), half]),
        Err(Error::IncompleteInstrument { .. })
    ));
}

#[test]
fn derive_instrument_rejects_bad_inputs() {
    let bad = CMatrix::identity(4).scale(c(2.0, 0.0));
    assert!(matches!(
        derive_instrument(&bad, &MeasurementSetting::z(), &gates::ket(2, 0)),
        Err(Error::NotUnitary { .. })
    ));
    assert!(matches!(
        derive_instrument(&gates::cnot(), &MeasurementSetting::z(), &[c(1.0, 0.0), c(1.0, 0.0)]),
        Err(Error::NotNormalized { .. })
    ));
    assert!(matches!(
        derive_instrument(&gates::cnot(), &MeasurementSetting::z(), &gates::ket(3, 0)),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn z_chain_on_zero_is_deterministic() {
    let z = Instrument::from_setting(&MeasurementSetting::z()).unwrap();
    let table = run_chain(
        &ChainState::pure(&gates::ket(2, 0)).unwrap(),
        &[z.clone(), z],
        &MeasurementSetting::z(),
    )
    .unwrap();
    assert!((table.probability(&[0, 0, 0]).unwrap() - 1.0).abs() < 1e-15);
    assert!((temporal_correlation(&table).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn ghz_chain_in_x_matches_spatial_value() {
    let x = MeasurementSetting::x();
    let chain = TemporalChain {
        initial: ChainState::pure(&gates::plus()).unwrap(),
        instruments: vec![ghz_instrument(FRAC_PI_2, 0.0); 2],
        final_setting: x.clone(),
    };
    let table = chain.run().unwrap();
    assert!((table.total() - 1.0).abs() < 1e-12);
    let psi = ghz_generation_sequence(3).unwrap().apply();
    let spatial = joint_distribution(&psi, &[x.clone(), x.clone(), x]).unwrap();
    assert!((table.correlation().unwrap() - 1.0).abs() < 1e-12);
    assert!(table.max_abs_diff(&spatial).unwrap() < 1e-12);
}

#[test]
fn cluster_chain_xzzx_is_plus_one() {
    let chain = TemporalChain {
        initial: ChainState::pure(&gates::plus()).unwrap(),
        instruments: vec![
            cluster_instrument(FRAC_PI_2, 0.0),
            cluster_instrument(0.0, 0.0),
            cluster_instrument(0.0, 0.0),
        ],
        final_setting: MeasurementSetting::x(),
    };
    let table = chain.run().unwrap();
    assert!((table.correlation().unwrap() - 1.0).abs() < 1e-12);
    let settings = [
        MeasurementSetting::x(),
        MeasurementSetting::z(),
        MeasurementSetting::z(),
        MeasurementSetting::x(),
    ];
    let psi = cluster_generation_sequence(4).unwrap().apply();
    let spatial = joint_distribution(&psi, &settings).unwrap();
    assert!(table.max_abs_diff(&spatial).unwrap() < 1e-12);
}

#[test]
fn ghz_equatorial_correlation_is_cosine_of_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..=6 {
        let phis: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let chain = TemporalChain {
            initial: ChainState::pure(&gates::plus()).unwrap(),
            instruments: phis[..n - 1]
                .iter()
                .map(|&p| ghz_instrument(FRAC_PI_2, p))
                .collect(),
            final_setting: MeasurementSetting::Bloch {
                theta: FRAC_PI_2,
                phi: phis[n - 1],
            },
        };
        let e = chain.run().unwrap().correlation().unwrap();
        let sum: f64 = phis.iter().sum();
        assert!((e - sum.cos()).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn orthogonal_projective_pair_is_uncorrelated() {
    let (sim, closed) = projective_chain_correlation([0.0, 0.0, 1.0], &[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
    assert!(sim.abs() < 1e-15 && closed.abs() < 1e-15);
    let (sim, closed) =
        projective_chain_correlation([0.0, 0.0, 1.0], &[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
    assert!((sim - 1.0).abs() < 1e-12 && (closed - 1.0).abs() < 1e-15);
}

#[test]
fn projective_chain_rejects_non_unit_vectors() {
    assert!(matches!(
        projective_chain_correlation([0.0, 0.0, 1.0], &[[0.0, 0.0, 0.5]]),
        Err(Error::NonUnitVector { .. })
    ));
}

#[test]
fn projective_chains_factorize_into_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for draw in 0..200 {
        let n = 1 + draw % 6;
        let s = random_bloch_vector(&mut rng);
        let ms: Vec<[f64; 3]> = (0..n).map(|_| random_bloch_vector(&mut rng)).collect();
        let (sim, closed) = projective_chain_correlation(s, &ms).unwrap();
        assert!((sim - closed).abs() <= 1e-10, "n={n}: {sim} vs {closed}");
    }
}

#[test]
fn ghz_witness_beats_pairwise_factorization() {
    let phi = FRAC_PI_4;
    let chain = TemporalChain {
        initial: ChainState::pure(&gates::plus()).unwrap(),
        instruments: vec![ghz_instrument(FRAC_PI_2, phi); 2],
        final_setting: MeasurementSetting::Bloch { theta: FRAC_PI_2, phi },
    };
    let genuine = chain.run().unwrap().correlation().unwrap();
    let m = [phi.cos(), phi.sin(), 0.0];
    let (sim, closed) = projective_chain_correlation([1.0, 0.0, 0.0], &[m, m, m]).unwrap();
    assert!((genuine - (3.0 * phi).cos()).abs() < 1e-12);
    assert!((sim - closed).abs() < 1e-12);
    assert!((closed - phi.cos()).abs() < 1e-12);
    assert!((genuine - closed).abs() > 1.0);
}

#[test]
fn povm_elements_do_not_fix_correlations() {
    let run = |phi: f64| {
        TemporalChain {
            initial: ChainState::pure(&gates::plus()).unwrap(),
            instruments: vec![ghz_instrument(FRAC_PI_2, phi); 2],
            final_setting: MeasurementSetting::x(),
        }
        .run()
        .unwrap()
    };
    let (a, b) = (ghz_instrument(FRAC_PI_2, 0.0), ghz_instrument(FRAC_PI_2, FRAC_PI_2));
    for (x, y) in a.povm_elements().iter().zip(&b.povm_elements()) {
        assert!(max_diff(x, y) <= 1e-14);
    }
    assert!(run(0.0).statistical_distance(&run(FRAC_PI_2)).unwrap() >= 0.1);
}

#[test]
fn product_mps_maps_to_local_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let states: Vec<Vec<C64>> = (0..4).map(|_| random_state(&mut rng, 2)).collect();
    let mps = product_mps(&states).unwrap();
    let settings = random_settings(&mut rng, 2, 4);
    let chain = map_mps_to_chain(&mps, &settings).unwrap();
    let spatial = joint_distribution(&mps.contract(), &settings).unwrap();
    assert!(chain.run().unwrap().max_abs_diff(&spatial).unwrap() <= 1e-9);
}

#[test]
fn named_states_map_to_equivalent_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for mps in [ghz_mps(5).unwrap(), cluster1d_mps(6).unwrap()] {
        for _ in 0..5 {
            let settings = random_settings(&mut rng, 2, mps.n_sites());
            let chain = map_mps_to_chain(&mps, &settings).unwrap();
            let spatial = joint_distribution(&mps.contract(), &settings).unwrap();
            assert!(chain.run().unwrap().max_abs_diff(&spatial).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn map_rejects_large_bond_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let psi = random_state(&mut rng, 64);
    let mps = seqcorr::mps::mps_from_statevector(&psi, 2, 6).unwrap();
    let settings = vec![MeasurementSetting::z(); 6];
    assert!(matches!(
        map_mps_to_chain(&mps, &settings),
        Err(Error::BondDimensionTooLarge { .. })
    ));
}

#[test]
fn mixed_initial_state_gives_normalized_table() {
    let init = ChainState::from_bloch([0.2, -0.3, 0.1]).unwrap();
    let table = run_chain(
        &init,
        &[cluster_instrument(1.0, 0.3), ghz_instrument(0.4, 2.0)],
        &MeasurementSetting::y(),
    )
    .unwrap();
    assert!((table.total() - 1.0).abs() < 1e-12);
    assert!(table.probs().iter().all(|&p| p >= 0.0));
}

#[test]
fn chain_state_validation() {
    let non_herm = CMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.1, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]).unwrap();
    assert!(matches!(ChainState::mixed(non_herm), Err(Error::InvalidDensity(_))));
    let negative = CMatrix::from_real(&[&[1.2, 0.0], &[0.0, -0.2]]);
    assert!(matches!(ChainState::mixed(negative), Err(Error::InvalidDensity(_))));
    let trace = CMatrix::from_real(&[&[0.6, 0.0], &[0.0, 0.6]]);
    assert!(matches!(ChainState::mixed(trace), Err(Error::InvalidDensity(_))));
    assert!(ChainState::mixed(CMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]])).is_ok());
    assert!(matches!(ChainState::from_bloch([1.0, 1.0, 0.0]), Err(Error::NonUnitVector { .. })));
}

#[test]
fn measure_records_outcomes_and_handles_null_branches() {
    let s = ChainState::pure(&gates::ket(2, 0)).unwrap();
    let z = Instrument::from_setting(&MeasurementSetting::z()).unwrap();
    let (p, post) = s.measure(&z, 1).unwrap();
    assert_eq!(p, 0.0);
    assert!(max_diff(post.rho(), &CMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-15);
    let (p, post) = s.measure(&ghz_instrument(FRAC_PI_2, 0.0), 0).unwrap();
    assert!((p - 0.5).abs() < 1e-15);
    assert_eq!(post.record(), &[(0, p)]);
    assert!(matches!(s.measure(&z, 2), Err(Error::IndexOutOfRange(_))));
}

#[test]
fn run_chain_rejects_dimension_mismatch() {
    let qutrit = Instrument::from_setting(&MeasurementSetting::Basis(CMatrix::identity(3))).unwrap();
    assert!(matches!(
        run_chain(&ChainState::pure(&gates::plus()).unwrap(), &[qutrit], &MeasurementSetting::z()),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let seq = random_sequence(&mut rng, 3, 5);
    let settings = random_settings(&mut rng, 3, 5);
    let chain = chain_from_sequence(&seq, &settings).unwrap();
    let a = chain.run_with(Exec::Sequential).unwrap();
    let b = chain.run_with(Exec::default()).unwrap();
    assert_eq!(a.probs(), b.probs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn temporal_equals_spatial(seed in any::<u64>(), d in 2usize..=3, n in 2usize..=8, via_mps in any::<bool>()) {
        let n = if d == 3 { n.min(5) } else { n };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_sequence(&mut rng, d, n);
        let settings = random_settings(&mut rng, d, n);
        let psi = seq.apply();
        let chain = if via_mps {
            let mps = seqcorr::mps::mps_from_statevector(&psi, d, n).unwrap();
            map_mps_to_chain(&mps, &settings).unwrap()
        } else {
            chain_from_sequence(&seq, &settings).unwrap()
        };
        let temporal = chain.run().unwrap();
        let spatial = joint_distribution(&psi, &settings).unwrap();
        prop_assert!(temporal.max_abs_diff(&spatial).unwrap() <= 1e-9);
    }

    #[test]
    fn derived_instruments_are_complete(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = derive_instrument(
            &random_unitary(&mut rng, d * d),
            &random_basis_setting(&mut rng, d),
            &random_state(&mut rng, d),
        ).unwrap();
        prop_assert!(inst.completeness_residual() <= 1e-10);
        // positive semidefinite: a normalized POVM element is a valid density
        for e in inst.povm_elements() {
            let tr = e.trace().re;
            if tr > 1e-12 {
                prop_assert!(ChainState::mixed(e.scale(C64::new(1.0 / tr, 0.0))).is_ok());
            }
        }
    }
}

#[test]
fn pure_and_density_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let seq = random_sequence(&mut rng, 2, 6);
    let settings = random_settings(&mut rng, 2, 6);
    let chain = chain_from_sequence(&seq, &settings).unwrap();
    let psi = chain.initial.state_vector().unwrap().to_vec();
    let mixed = ChainState::mixed(CMatrix::outer(&psi, &psi)).unwrap();
    assert!(mixed.state_vector().is_none());
    let a = chain.run().unwrap();
    let b = run_chain(&mixed, &chain.instruments, &chain.final_setting).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
}
