use coinwalk::hilbert::random_coin_vector;
use coinwalk::oracle::DenseSystem;
use coinwalk::{
    apply_step, commutator_check, evolve, fidelity_up_to_phase, make_state, project_subsystem, shift_for, BasisLabel,
    CoinOp, Complex64, GraphSpec, OrthonormalBasis, StepSpec, Subsystem, WalkState,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn arenas() -> Vec<GraphSpec> {
    vec![
        GraphSpec::Line,
        GraphSpec::cycle(5).unwrap(),
        GraphSpec::cycle(8).unwrap(),
        GraphSpec::complete(3).unwrap(),
        GraphSpec::complete(4).unwrap(),
        GraphSpec::circulant(7, 3).unwrap(),
    ]
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CoinOp {
    let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    CoinOp::custom(m.qr().q(), "random").unwrap()
}

/// Entangled random state supported on a few positions near 0.
fn random_state(arena: GraphSpec, coins: usize, rng: &mut ChaCha8Rng) -> WalkState {
    let d = arena.coin_dim();
    let span = arena.vertices().map_or(3, |v| v as i64);
    let dims = vec![d; coins];
    let mut terms = Vec::new();
    for _ in 0..6 {
        let position = rng.random_range(0..span);
        let label: Vec<usize> = (0..coins).map(|_| rng.random_range(0..d)).collect();
        let amp = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        terms.push((BasisLabel::new(position, label), amp));
    }
    make_state(arena, &dims, terms).unwrap()
}

fn random_schedule(arena: GraphSpec, coins: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<StepSpec> {
    (0..len)
        .map(|_| {
            let m = rng.random_range(0..coins);
            let op = if rng.random_bool(0.5) {
                random_unitary(arena.coin_dim(), rng)
            } else {
                CoinOp::identity(arena.coin_dim())
            };
            StepSpec::new(arena, m, op)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steps_preserve_norm(arena in 0usize..6, seed in any::<u64>(), len in 1usize..12) {
        let arena = arenas()[arena];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(arena, 2, &mut rng);
        let steps = random_schedule(arena, 2, len, &mut rng);
        for s in evolve(&state, &steps).unwrap() {
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sparse_matches_dense(arena in 0usize..6, seed in any::<u64>(), len in 1usize..10) {
        let arena = arenas()[arena];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(arena, 2, &mut rng);
        let steps = random_schedule(arena, 2, len, &mut rng);
        let trace = evolve(&state, &steps).unwrap();
        // The random state lives on 0..3 on the line; centre the window on 1.
        let system = DenseSystem::new(arena, state.coin_dims(), 1, &[steps.clone(), vec![StepSpec::identity(arena, 0); 2]].concat()).unwrap();
        let dense = system.evolve(system.to_vector(&state).unwrap());
        for (s, v) in trace.iter().zip(&dense) {
            let w = system.to_vector(s).unwrap();
            let dev = (w - v).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-12, "deviation {dev}");
        }
    }

    #[test]
    fn shift_inverse_roundtrip(arena in 0usize..6, seed in any::<u64>()) {
        let arena = arenas()[arena];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(arena, 2, &mut rng);
        let shift = shift_for(arena);
        for m in 0..2 {
            let back = shift.apply_inverse(&shift.apply(&state, m).unwrap(), m).unwrap();
            prop_assert!(back.distance(&state).unwrap() < 1e-14);
        }
    }

    #[test]
    fn fidelity_is_symmetric(arena in 0usize..6, seed in any::<u64>()) {
        let arena = arenas()[arena];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_state(arena, 2, &mut rng);
        let v = random_state(arena, 2, &mut rng);
        let a = fidelity_up_to_phase(&u, &v).unwrap();
        let b = fidelity_up_to_phase(&v, &u).unwrap();
        prop_assert!((a - b).abs() < 1e-14);
        prop_assert!((-1e-14..=1.0 + 1e-12).contains(&a));
        prop_assert!((fidelity_up_to_phase(&u, &u.scaled(Complex64::from_polar(1.0, 0.7))).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_is_complete_and_recombines(arena in 0usize..6, seed in any::<u64>()) {
        let arena = arenas()[arena];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(arena, 2, &mut rng);
        let d = arena.coin_dim();
        let basis = OrthonormalBasis::fourier(d);
        let outcomes = project_subsystem(&state, Subsystem::Coin(1), &basis).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        // Summing sqrt(p) * post over outcomes rebuilds the state.
        let mut terms = Vec::new();
        for o in &outcomes {
            for (l, a) in o.post_state.terms() {
                terms.push((l.clone(), *a * o.probability.sqrt()));
            }
        }
        let rebuilt = make_state(arena, state.coin_dims(), terms).unwrap();
        prop_assert!(rebuilt.distance(&state).unwrap() < 1e-12);

        let positions: Vec<i64> = state.positions().into_iter().collect();
        let pos = project_subsystem(&state, Subsystem::Position, &OrthonormalBasis::computational(positions)).unwrap();
        prop_assert!((pos.iter().map(|o| o.probability).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn steps_on_distinct_coins_commute() {
    for arena in arenas() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let coins = rng.random_range(2..=3);
            let state = random_state(arena, coins, &mut rng);
            let m1 = rng.random_range(0..coins);
            let m2 = (m1 + rng.random_range(1..coins)) % coins;
            let s1 = StepSpec::new(arena, m1, random_unitary(arena.coin_dim(), &mut rng));
            let s2 = StepSpec::new(arena, m2, random_unitary(arena.coin_dim(), &mut rng));
            worst = worst.max(commutator_check(&state, &s1, &s2).unwrap());
        }
        assert!(worst <= 1e-10, "{arena}: {worst}");
    }
}

#[test]
fn mismatched_step_is_rejected() {
    let state = random_state(GraphSpec::Line, 2, &mut ChaCha8Rng::seed_from_u64(1));
    let step = StepSpec::new(GraphSpec::Line, 0, CoinOp::cyclic_shift(3));
    assert!(apply_step(&state, &step).is_err());
    let step = StepSpec::identity(GraphSpec::cycle(4).unwrap(), 0);
    assert!(apply_step(&state, &step).is_err());
}

#[test]
fn random_payload_is_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in 1..6 {
        let v = random_coin_vector(d, &mut rng);
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }
}
