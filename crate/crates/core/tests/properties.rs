use cutlab_core::game::{game_bound, qubit_state, win_probability, GameStrategy, BOUND_TOL};
use cutlab_core::info::ssa_check;
use cutlab_core::protocols::Executor;
use cutlab_core::qcore::{
    haar_unitary, measure_update, measurement_channel, random_mixed_state, random_pure_state, seeded_rng,
};
use cutlab_core::{CMatrix, Channel, ProjectiveBasis, StateVector, SystemLabel, C64};
use proptest::prelude::*;

fn qubits(names: &[&str]) -> Vec<SystemLabel> {
    names.iter().map(|n| SystemLabel::qubit(*n)).collect()
}

/// Kraus operators of the Stinespring dilation `V = U(𝟙 ⊗ |0⟩_E)` with the
/// output first and the environment second.
fn dilated_channel(u: &CMatrix, d_in: usize, d_out: usize, d_env: usize) -> Vec<CMatrix> {
    (0..d_env)
        .map(|e| CMatrix::from_fn(d_out, d_in, |o, i| u[(o * d_env + e, i * (d_out * d_env / d_in))]))
        .collect()
}

fn haar_purity_mean(seeds: std::ops::Range<u64>) -> f64 {
    let sys = qubits(&["A1", "A2", "A3", "B1", "B2", "B3", "B4"]);
    let n = seeds.end - seeds.start;
    seeds
        .map(|s| {
            let psi = random_pure_state(sys.clone(), &mut seeded_rng(s)).unwrap();
            psi.reduced(&["A1", "A2", "A3"]).unwrap().purity()
        })
        .sum::<f64>()
        / n as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dilated_channels_are_trace_preserving(seed in any::<u64>(), env_qubits in 1usize..3) {
        let d_env = 1 << env_qubits;
        let u = haar_unitary(2 * d_env, seed);
        let kraus = dilated_channel(&u, 2, 2, d_env);
        let ch = Channel::new(kraus, qubits(&["Q"]), qubits(&["O"])).unwrap();
        prop_assert!(ch.completeness_error() < 1e-10);
        let rho = random_mixed_state(qubits(&["Q", "S"]), 3, &mut seeded_rng(seed ^ 1)).unwrap();
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.eigenvalues().iter().all(|&l| l >= -1e-9));
    }

    #[test]
    fn measurement_channels_are_trace_preserving(seed in any::<u64>()) {
        let q = SystemLabel::qubit("Q");
        let basis = if seed % 2 == 0 {
            ProjectiveBasis::computational(q)
        } else {
            ProjectiveBasis::diagonal(q).unwrap()
        };
        let ch = measurement_channel(&basis, SystemLabel::qubit("R")).unwrap();
        prop_assert!(ch.completeness_error() < 1e-12);
    }

    #[test]
    fn branch_probabilities_sum_to_one(seed in any::<u64>(), rank in 1usize..9, target in 0usize..3) {
        let names = ["A", "B", "C"];
        let rho = random_mixed_state(qubits(&names), rank, &mut seeded_rng(seed)).unwrap();
        let q = SystemLabel::qubit(names[target]);
        for basis in [ProjectiveBasis::computational(q.clone()), ProjectiveBasis::diagonal(q).unwrap()] {
            let total: f64 = measure_update(&rho, &basis).unwrap().iter().map(|b| b.outcome.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_reversal_restores_the_initial_state(seed in any::<u64>(), depth in 1usize..6) {
        let names = ["A", "B", "C"];
        let mut ex = Executor::new(qubits(&names), Vec::new()).unwrap();
        for k in 0..depth {
            let i = (seed as usize + k) % 3;
            let targets = [names[i], names[(i + 1) % 3]];
            ex.apply(&haar_unitary(4, seed.wrapping_add(k as u64)), &targets).unwrap();
            ex.finish_step("Alice", "scramble").unwrap();
        }
        let undone = ex.reverse(&names, 1).unwrap();
        prop_assert_eq!(undone, depth);
        let zero = StateVector::zeros(qubits(&names)).unwrap();
        prop_assert!((ex.state().overlap(&zero).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_reversal_leaves_outside_systems_alone(seed in any::<u64>()) {
        let names = ["A", "B", "C"];
        let mut ex = Executor::new(qubits(&names), Vec::new()).unwrap();
        let u_ab = haar_unitary(4, seed);
        let u_c = haar_unitary(2, seed ^ 7);
        ex.apply(&u_ab, &["A", "B"]).unwrap();
        ex.finish_step("Alice", "scramble A B").unwrap();
        ex.apply(&u_c, &["C"]).unwrap();
        ex.finish_step("Alice", "rotate C").unwrap();
        prop_assert_eq!(ex.reverse(&["A", "B"], 1).unwrap(), 1);
        let expected = StateVector::zeros(qubits(&names)).unwrap().apply_unitary(&u_c, &["C"]).unwrap();
        prop_assert!((ex.state().overlap(&expected).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn strong_subadditivity_holds(seed in any::<u64>(), rank in 1usize..9, perm in 0usize..6) {
        let names = ["A", "B", "C"];
        let rho = random_mixed_state(qubits(&names), rank, &mut seeded_rng(seed)).unwrap();
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let [a, b, c] = orders[perm];
        let slack = ssa_check(&rho, &[names[a]], &[names[b]], &[names[c]]).unwrap();
        prop_assert!(slack >= -1e-9, "slack {slack}");
    }

    #[test]
    fn haar_purity_is_within_the_physical_range(seed in any::<u64>()) {
        let sys = qubits(&["A1", "A2", "A3", "B1", "B2", "B3", "B4"]);
        let psi = random_pure_state(sys, &mut seeded_rng(seed)).unwrap();
        let p = psi.reduced(&["A1", "A2", "A3"]).unwrap().purity();
        prop_assert!((1.0 / 8.0 - 1e-12..=1.0 + 1e-12).contains(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn no_strategy_beats_the_game_bound(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        shrink in 0.0f64..1.0,
        p in 0usize..2,
        p_bar in 0usize..2,
    ) {
        let pure = qubit_state(C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)).unwrap();
        // mix toward 𝟙/2 to cover the Bloch ball interior
        let m = &pure.matrix().scale_real(shrink) + &CMatrix::identity(2).scale_real((1.0 - shrink) / 2.0);
        let rho = cutlab_core::DensityState::new(pure.systems().to_vec(), m).unwrap();
        let s = GameStrategy::new(rho, p, p_bar).unwrap();
        prop_assert!(win_probability(&s).win_probability <= game_bound() + BOUND_TOL);
    }
}

#[test]
fn haar_mean_purity_matches_the_analytic_value() {
    let exact = (8.0 + 16.0) / (8.0 * 16.0 + 1.0);
    let mean = haar_purity_mean(0..100);
    assert!((mean - exact).abs() / exact < 0.02, "mean {mean}, exact {exact}");
}
