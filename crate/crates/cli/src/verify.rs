//! The `verify-all` sweep over every protocol family.
//!
//! Grid points run in parallel; results are collected in grid order, so the
//! report does not depend on scheduling.

use coinwalk::hilbert::random_coin_vector;
use coinwalk::oracle::{certify_schedule, dense_evolve, DensePlan};
use coinwalk::teleport::{TeleportPlan, TeleportRun};
use coinwalk::{
    commutator_check, make_state, periodicity_check, plan_complete, plan_cycle, plan_line, plan_regular, plan_revival,
    run_teleport, run_transfer, totient_set, BasisLabel, CoinOp, Complex64, Error, GraphSpec, StepSpec, TransferPlan,
    WalkState, ORACLE_TOL, RESULT_TOL,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::report::{CheckResult, CriterionSummary, VerifySection};

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "line transfer"),
    (2, "line periodicity"),
    (3, "cycle transfer"),
    (4, "complete-graph transfer and revival"),
    (5, "regular-graph transfer"),
    (6, "line teleport"),
    (7, "cycle teleport"),
    (8, "complete-graph teleport"),
    (9, "regular-graph teleport"),
    (10, "engine soundness"),
];

pub const LINE_INPUTS: usize = 20;
pub const CYCLE_INPUTS: usize = 5;
pub const TELEPORT_INPUTS: usize = 5;
pub const COMMUTATOR_TRIALS: usize = 100;
pub const REGULAR_GRID: [(usize, usize); 6] = [(5, 3), (7, 3), (9, 3), (7, 4), (9, 4), (11, 5)];
pub const REGULAR_TELEPORT_GRID: [(usize, usize, usize); 4] = [(5, 3, 1), (9, 3, 2), (7, 3, 1), (11, 4, 3)];

type Task = Box<dyn Fn() -> CheckResult + Send + Sync>;

fn rng_for(seed: u64, criterion: u8, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((criterion as u64) << 56) ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn check(criterion: u8, label: String, f: impl FnOnce() -> Result<(bool, f64, Option<String>), Error>) -> CheckResult {
    match f() {
        Ok((passed, metric, note)) => CheckResult { criterion, label, passed, metric, note },
        Err(e) => CheckResult { criterion, label, passed: false, metric: f64::NAN, note: Some(e.to_string()) },
    }
}

/// Runs `plan` on `inputs` random payloads; returns the worst fidelity and
/// checks the first run against the dense oracle.
fn transfer_inputs(
    plan: &TransferPlan,
    inputs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(bool, f64, Option<String>), Error> {
    let mut worst: f64 = 1.0;
    for i in 0..inputs {
        let payload = random_coin_vector(plan.coin_dim(), rng);
        let report = run_transfer(plan, &payload)?;
        worst = worst.min(report.fidelity);
        if i == 0 {
            let dev = dense_evolve(DensePlan::Transfer(plan), &payload)?.max_deviation(&report.trace)?;
            if dev > ORACLE_TOL {
                return Ok((false, worst, Some(format!("oracle deviation {dev:e}"))));
            }
        }
    }
    Ok((worst >= 1.0 - RESULT_TOL, worst, None))
}

fn teleport_inputs(
    plan: &TeleportPlan,
    inputs: usize,
    rng: &mut ChaCha8Rng,
    extra: impl Fn(&TeleportRun) -> Option<String>,
) -> Result<(bool, f64, Option<String>), Error> {
    let mut worst: f64 = 1.0;
    for i in 0..inputs {
        let input = random_coin_vector(plan.coin_dim(), rng);
        let run = run_teleport(plan, &input)?;
        if (run.total_probability() - 1.0).abs() > RESULT_TOL {
            return Ok((false, run.total_probability(), Some("probabilities do not sum to 1".into())));
        }
        if let Some(problem) = extra(&run) {
            return Ok((false, run.min_fidelity(), Some(problem)));
        }
        worst = worst.min(run.min_fidelity());
        if i == 0 {
            let dev = dense_evolve(DensePlan::Teleport(plan), &input)?.max_deviation(&run.trace)?;
            if dev > ORACLE_TOL {
                return Ok((false, worst, Some(format!("oracle deviation {dev:e}"))));
            }
        }
    }
    Ok((worst >= 1.0 - RESULT_TOL, worst, None))
}

fn tasks(seed: u64) -> Vec<Task> {
    let mut t: Vec<Task> = Vec::new();

    // 1. Line transfer.
    for x in (-8i64..=8).filter(|&x| x != 0) {
        t.push(Box::new(move || {
            check(1, format!("line x={x}"), || {
                let plan = plan_line(x)?;
                let want = 2 * x.unsigned_abs() as usize + (x.rem_euclid(2) as usize);
                if plan.step_count() != want {
                    return Ok((false, plan.step_count() as f64, Some(format!("expected {want} steps"))));
                }
                transfer_inputs(&plan, LINE_INPUTS, &mut rng_for(seed, 1, x as u64))
            })
        }));
    }
    t.push(Box::new(|| check(1, "line x=2 trace step 2".into(), case_1_1_trace)));

    // 2. Periodicity, up to the coin-2 flip the negative schedule leaves behind.
    for x in [2i64, 4, 6] {
        t.push(Box::new(move || {
            check(2, format!("periodicity x={x}"), || {
                let mut rng = rng_for(seed, 2, x as u64);
                let v = random_coin_vector(2, &mut rng);
                let p = periodicity_check(x, (v[0], v[1]))?;
                let ok = p.total_steps == 4 * x as usize && p.fidelity_coin2_flipped >= 1.0 - RESULT_TOL;
                Ok((
                    ok,
                    p.fidelity_coin2_flipped,
                    Some(format!("literal return fidelity {:.3e}; coin 2 ends in |1>", p.fidelity)),
                ))
            })
        }));
    }

    // 3. Cycle transfer.
    for d in 3..=10usize {
        for method in 1..=4u8 {
            if method >= 3 && d % 2 == 1 {
                continue;
            }
            for x in 1..d as i64 {
                t.push(Box::new(move || {
                    check(3, format!("cycle d={d} method={method} x={x}"), || {
                        let plan = plan_cycle(d, x, method)?;
                        if method == 3 && x % 2 == 0 && plan.step_count() != d {
                            return Ok((false, plan.step_count() as f64, Some(format!("expected {d} steps"))));
                        }
                        let generated = method == 4 || (method == 3 && x % 2 == 1);
                        match &plan.certification {
                            Some(r) if !r.passed => {
                                return Ok((false, r.min_fidelity, Some("certification failed".into())))
                            }
                            None if generated => return Ok((false, 0.0, Some("missing certification record".into()))),
                            _ => {}
                        }
                        let index = (d as u64) << 16 | (method as u64) << 8 | x as u64;
                        transfer_inputs(&plan, CYCLE_INPUTS, &mut rng_for(seed, 3, index))
                    })
                }));
            }
        }
    }

    // 4. Complete graph and revival.
    for d in 2..=8usize {
        for x in 1..d as i64 {
            t.push(Box::new(move || {
                check(4, format!("complete d={d} x={x}"), || {
                    let plan = plan_complete(d, x)?;
                    if plan.step_count() != 2 * d {
                        return Ok((false, plan.step_count() as f64, Some(format!("expected {} steps", 2 * d))));
                    }
                    transfer_inputs(&plan, LINE_INPUTS, &mut rng_for(seed, 4, (d as u64) << 8 | x as u64))
                })
            }));
        }
        t.push(Box::new(move || {
            check(4, format!("revival d={d}"), || {
                let plan = plan_revival(GraphSpec::complete(d)?)?;
                transfer_inputs(&plan, LINE_INPUTS, &mut rng_for(seed, 4, 0xff00 | d as u64))
            })
        }));
    }

    // 5. Regular graph: certify every target, then run it.
    for (n, d) in REGULAR_GRID {
        for x in 1..n as i64 {
            t.push(Box::new(move || {
                check(5, format!("regular n={n} d={d} x={x}"), || {
                    let plan = plan_regular(n, d, x)?;
                    let rec = certify_schedule(&plan, 8, seed)?;
                    if !rec.passed {
                        return Ok((false, rec.min_fidelity, Some("infeasible target".into())));
                    }
                    transfer_inputs(
                        &plan,
                        CYCLE_INPUTS,
                        &mut rng_for(seed, 5, (n as u64) << 16 | (d as u64) << 8 | x as u64),
                    )
                })
            }));
        }
    }

    // 6. Line teleport.
    for n in [2usize, 4, 10] {
        t.push(Box::new(move || {
            check(6, format!("teleport line n={n}"), || {
                let plan = TeleportPlan::line(n)?;
                teleport_inputs(&plan, TELEPORT_INPUTS, &mut rng_for(seed, 6, n as u64), |run| {
                    (run.branches.len() != 6).then(|| format!("{} branches, expected 6", run.branches.len()))
                })
            })
        }));
    }

    // 7. Cycle teleport: two positions, each with probability 1/2.
    for d in [4usize, 8, 12] {
        t.push(Box::new(move || {
            check(7, format!("teleport cycle d={d}"), || {
                let plan = TeleportPlan::cycle(d)?;
                teleport_inputs(&plan, TELEPORT_INPUTS, &mut rng_for(seed, 7, d as u64), |run| {
                    for pos in [0, d as i64 / 2] {
                        let p: f64 = run
                            .branches
                            .iter()
                            .filter(|b| b.position_support == vec![pos])
                            .map(|b| b.probability)
                            .sum();
                        if (p - 0.5).abs() > RESULT_TOL {
                            return Some(format!("position {pos} has probability {p}"));
                        }
                    }
                    let support: Vec<i64> = run.pre_measurement.positions().into_iter().collect();
                    (support != vec![0, d as i64 / 2]).then(|| format!("support {support:?}"))
                })
            })
        }));
    }

    // 8. Complete-graph teleport.
    for d in [2usize, 3, 5, 7] {
        for tt in 1..=2 * d {
            t.push(Box::new(move || {
                check(8, format!("teleport complete d={d} t={tt}"), || {
                    let coprime = totient_set(d).contains(&(tt % d));
                    let plan = match TeleportPlan::complete(d, tt) {
                        Err(Error::Coprimality(_)) if !coprime => return Ok((true, 1.0, Some("rejected".into()))),
                        Err(e) => return Err(e),
                        Ok(_) if !coprime => return Ok((false, 0.0, Some("accepted a non-coprime t".into()))),
                        Ok(p) => p,
                    };
                    let mut images: Vec<usize> = (0..d).map(|s| tt * s % d).collect();
                    images.sort_unstable();
                    images.dedup();
                    if images.len() != d {
                        return Ok((false, 0.0, Some("s -> t*s mod d is not injective".into())));
                    }
                    teleport_inputs(&plan, TELEPORT_INPUTS, &mut rng_for(seed, 8, (d as u64) << 8 | tt as u64), |run| {
                        (run.branches.len() != d * d).then(|| format!("{} branches", run.branches.len()))
                    })
                })
            }));
        }
    }

    // 9. Regular-graph teleport and totient sets.
    for (n, d, tt) in REGULAR_TELEPORT_GRID {
        t.push(Box::new(move || {
            check(9, format!("teleport regular n={n} d={d} t={tt}"), || {
                let plan = TeleportPlan::regular(n, d, tt)?;
                teleport_inputs(
                    &plan,
                    TELEPORT_INPUTS,
                    &mut rng_for(seed, 9, (n as u64) << 16 | (d as u64) << 8 | tt as u64),
                    |run| {
                        let support = run.pre_measurement.positions().len();
                        (support != 2 * d - 1).then(|| format!("{support} support labels, expected {}", 2 * d - 1))
                    },
                )
            })
        }));
    }
    t.push(Box::new(|| {
        check(9, "totient sets".into(), || {
            let ok = totient_set(6) == [1, 5] && totient_set(9) == [1, 2, 4, 5, 7, 8];
            Ok((ok, 1.0, None))
        })
    }));

    // 10. Commutation of steps on distinct coins; the sparse/dense agreement
    // is checked inside every grid point above.
    let arenas = [
        GraphSpec::Line,
        GraphSpec::Cycle { vertices: 6 },
        GraphSpec::CompleteWithLoops { vertices: 4 },
        GraphSpec::Circulant { vertices: 9, degree: 3 },
    ];
    for (i, arena) in arenas.into_iter().enumerate() {
        t.push(Box::new(move || {
            check(10, format!("commutators on {arena}"), || {
                let mut rng = rng_for(seed, 10, i as u64);
                let mut worst: f64 = 0.0;
                for _ in 0..COMMUTATOR_TRIALS {
                    let (state, s1, s2) = random_commutator_case(arena, &mut rng)?;
                    worst = worst.max(commutator_check(&state, &s1, &s2)?);
                }
                Ok((worst <= RESULT_TOL, worst, None))
            })
        }));
    }
    t
}

fn random_commutator_case(arena: GraphSpec, rng: &mut ChaCha8Rng) -> Result<(WalkState, StepSpec, StepSpec), Error> {
    let d = arena.coin_dim();
    let span = arena.vertices().map_or(5, |v| v as i64);
    let terms: Vec<(BasisLabel, Complex64)> = (0..5)
        .map(|_| {
            let label =
                BasisLabel::new(rng.random_range(0..span), vec![rng.random_range(0..d), rng.random_range(0..d)]);
            let v = random_coin_vector(1, rng);
            (label, v[0] * rng.random_range(0.1..1.0))
        })
        .collect();
    let state = make_state(arena, &[d, d], terms)?;
    let s1 = StepSpec::new(arena, 0, random_unitary(d, rng)?);
    let s2 = StepSpec::new(arena, 1, random_unitary(d, rng)?);
    Ok((state, s1, s2))
}

/// Positive even line transfer, state after step 2, against `|2>a|00> + |0>b|10>`.
fn case_1_1_trace() -> Result<(bool, f64, Option<String>), Error> {
    let (a, b) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let report = run_transfer(&plan_line(2)?, &[a, b])?;
    let want = make_state(
        GraphSpec::Line,
        &[2, 2],
        [(BasisLabel::new(2, vec![0, 0]), a), (BasisLabel::new(0, vec![1, 0]), b)],
    )?;
    let dist = report.trace[2].distance(&want)?;
    Ok((dist <= 1e-12, dist, None))
}

/// Runs the whole grid.
pub fn verify_all(seed: u64) -> VerifySection {
    let results: Vec<CheckResult> = tasks(seed).par_iter().map(|task| task()).collect();
    let criteria = CRITERIA
        .iter()
        .map(|&(id, title)| {
            let mine: Vec<&CheckResult> = results.iter().filter(|r| r.criterion == id).collect();
            let failed = mine.iter().filter(|r| !r.passed).count();
            CriterionSummary { id, title, checks: mine.len(), failed, passed: failed == 0 && !mine.is_empty() }
        })
        .collect();
    let notes: Vec<String> = results
        .iter()
        .filter(|r| r.criterion == 2)
        .filter_map(|r| r.note.as_ref().map(|n| format!("{}: {n}", r.label)))
        .collect();
    VerifySection { criteria, failures: results.into_iter().filter(|r| !r.passed).collect(), notes }
}

/// Random unitary: the Q factor of a Gaussian complex matrix.
fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> Result<CoinOp, Error> {
    let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    CoinOp::custom(m.qr().q(), "random")
}
