use coinwalk::hilbert::random_coin_vector;
use coinwalk::oracle::{dense_evolve, DensePlan};
use coinwalk::{
    plan_complete, plan_line, plan_regular, plan_revival, run_teleport, run_transfer, teleport::TeleportPlan,
    BasisLabel, Complex64, Error, GraphSpec, ORACLE_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn line_transfer_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for x in (-8..=8).filter(|&x| x != 0) {
        let plan = plan_line(x).unwrap();
        let expected = if x % 2 == 0 { 2 * x.unsigned_abs() } else { 2 * x.unsigned_abs() + 1 };
        assert_eq!(plan.step_count() as u64, expected);
        let payload = random_coin_vector(2, &mut rng);
        let report = run_transfer(&plan, &payload).unwrap();
        assert!(report.passed(), "x={x}");
        let dense = dense_evolve(DensePlan::Transfer(&plan), &payload).unwrap();
        assert!(dense.max_deviation(&report.trace).unwrap() <= ORACLE_TOL);
    }
}

#[test]
fn complete_and_regular_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in 2..=6usize {
        for x in 1..d as i64 {
            let plan = plan_complete(d, x).unwrap();
            assert_eq!(plan.step_count(), 2 * d);
            let payload = random_coin_vector(d, &mut rng);
            let report = run_transfer(&plan, &payload).unwrap();
            assert!(report.passed());
            let dense = dense_evolve(DensePlan::Transfer(&plan), &payload).unwrap();
            assert!(dense.max_deviation(&report.trace).unwrap() <= ORACLE_TOL);
        }
    }
    for (n, d) in [(5, 3), (7, 4), (11, 5)] {
        for x in 1..n as i64 {
            let plan = plan_regular(n, d, x).unwrap();
            let payload = random_coin_vector(d, &mut rng);
            let report = run_transfer(&plan, &payload).unwrap();
            assert!(report.passed(), "n={n} d={d} x={x}");
        }
    }
}

#[test]
fn revival_returns_home() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in 2..=8usize {
        let plan = plan_revival(GraphSpec::complete(d).unwrap()).unwrap();
        assert_eq!(plan.step_count(), 2 * d);
        let payload = random_coin_vector(d, &mut rng);
        assert!(run_transfer(&plan, &payload).unwrap().passed());
    }
}

#[test]
fn teleport_pre_measurement_agrees_with_oracle() {
    let plans = [
        TeleportPlan::line(4).unwrap(),
        TeleportPlan::cycle(8).unwrap(),
        TeleportPlan::complete(5, 3).unwrap(),
        TeleportPlan::regular(11, 4, 3).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for plan in &plans {
        let input = random_coin_vector(plan.coin_dim(), &mut rng);
        let run = run_teleport(plan, &input).unwrap();
        let dense = dense_evolve(DensePlan::Teleport(plan), &input).unwrap();
        assert!(dense.max_deviation(&run.trace).unwrap() <= ORACLE_TOL, "{}", plan.kind);
        assert!(run.passed(), "{}", plan.kind);
    }
}

#[test]
fn complete_teleport_position_distribution_from_oracle() {
    // Marginal position distribution straight from the dense vector.
    let plan = TeleportPlan::complete(3, 1).unwrap();
    let input = random_coin_vector(3, &mut ChaCha8Rng::seed_from_u64(15));
    let dense = dense_evolve(DensePlan::Teleport(&plan), &input).unwrap();
    let mut probs = [0.0; 3];
    for (i, a) in dense.final_vector().iter().enumerate() {
        let label: BasisLabel = dense.system.label_of(i);
        probs[label.position as usize] += a.norm_sqr();
    }
    for p in probs {
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
    let run = run_teleport(&plan, &input).unwrap();
    for x in 0..3 {
        let p: f64 = run.branches.iter().filter(|b| b.position_outcome == x).map(|b| b.probability).sum();
        assert!((p - probs[x as usize]).abs() < 1e-12);
    }
}

#[test]
fn precondition_errors() {
    assert!(matches!(TeleportPlan::complete(4, 2), Err(Error::Coprimality(_))));
    assert!(matches!(TeleportPlan::regular(6, 4, 1), Err(Error::Arena(_))));
    assert!(matches!(TeleportPlan::line(5), Err(Error::Parity(_))));
    assert!(matches!(TeleportPlan::cycle(10), Err(Error::Parity(_))));
    assert!(matches!(plan_line(0), Err(Error::Target(_))));
    let zero = [Complex64::new(0.0, 0.0); 2];
    assert!(matches!(run_teleport(&TeleportPlan::line(2).unwrap(), &zero), Err(Error::ZeroState)));
}
