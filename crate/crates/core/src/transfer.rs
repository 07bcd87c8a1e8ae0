//! Perfect state transfer with two coins.
//!
//! The payload sits in coin 1 while coin 2 starts in `|0>`. Odd steps flip
//! coin 1, even steps flip coin 2, and almost every coin operator is the
//! identity: a schedule is fully described by the total step count plus the
//! handful of steps carrying a flip. After the walk, local recovery unitaries
//! `U1` and `U2` restore `|target> (x) payload (x) |0>`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{fidelity_up_to_phase, product_state, GraphSpec, WalkState, COIN1, COIN2, RESULT_TOL};
use crate::operators::{coin_matrix, evolve, CoinOp, StepSpec};
use crate::oracle::{self, CandidateAttempt, CertificationRecord};

/// Which tabulated case a plan realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// Line, positive even target.
    #[serde(rename = "L1_1")]
    LinePositiveEven,
    /// Line, positive odd target.
    #[serde(rename = "L1_2")]
    LinePositiveOdd,
    /// Line, negative even target.
    #[serde(rename = "L1_3")]
    LineNegativeEven,
    /// Line, negative odd target.
    #[serde(rename = "L1_4")]
    LineNegativeOdd,
    /// Cycle, both branches clockwise.
    #[serde(rename = "C_M1")]
    CycleClockwise,
    /// Cycle, both branches anticlockwise, `d - x` even.
    #[serde(rename = "C_M2_even")]
    CycleAnticlockwiseEven,
    /// Cycle, both branches anticlockwise, `d - x` odd.
    #[serde(rename = "C_M2_odd")]
    CycleAnticlockwiseOdd,
    /// Cycle, `a` clockwise and `b` anticlockwise, even target.
    #[serde(rename = "C_M3_even")]
    CycleSplitEven,
    /// Cycle, `a` clockwise and `b` anticlockwise, odd target.
    #[serde(rename = "C_M3_odd")]
    CycleSplitOdd,
    /// Cycle, `a` anticlockwise and `b` clockwise.
    #[serde(rename = "C_M4")]
    CycleSplitMirrored,
    #[serde(rename = "KD_complete")]
    CompleteGraph,
    #[serde(rename = "KD_regular")]
    RegularGraph,
    /// All-identity schedule returning the walker to its start.
    #[serde(rename = "revival")]
    Revival,
    /// Hand-written schedule.
    #[serde(rename = "custom")]
    Custom,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::LinePositiveEven => "L1_1",
            CaseTag::LinePositiveOdd => "L1_2",
            CaseTag::LineNegativeEven => "L1_3",
            CaseTag::LineNegativeOdd => "L1_4",
            CaseTag::CycleClockwise => "C_M1",
            CaseTag::CycleAnticlockwiseEven => "C_M2_even",
            CaseTag::CycleAnticlockwiseOdd => "C_M2_odd",
            CaseTag::CycleSplitEven => "C_M3_even",
            CaseTag::CycleSplitOdd => "C_M3_odd",
            CaseTag::CycleSplitMirrored => "C_M4",
            CaseTag::CompleteGraph => "KD_complete",
            CaseTag::RegularGraph => "KD_regular",
            CaseTag::Revival => "revival",
            CaseTag::Custom => "custom",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A non-identity coin operator at a given (1-based) step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub step: usize,
    /// 1-based coin number.
    pub coin: usize,
    pub op: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferPlan {
    pub arena: GraphSpec,
    pub start: i64,
    pub target: i64,
    /// `steps[i]` is step `i + 1`.
    pub steps: Vec<StepSpec>,
    /// `(U1, U2)`, applied to coin 1 and coin 2 after the walk.
    pub recovery: (CoinOp, CoinOp),
    pub case_tag: CaseTag,
    /// Present when the schedule was accepted by the dense oracle rather than
    /// taken verbatim from a table.
    pub certification: Option<CertificationRecord>,
}

/// Coin driving the given 1-based step.
pub fn coin_for_step(step: usize) -> usize {
    if step % 2 == 1 {
        COIN1
    } else {
        COIN2
    }
}

/// Alternating two-coin schedule of `total` steps, identity everywhere except
/// the listed `(step, operator)` placements. Several placements on one step
/// are composed in the given order.
pub fn alternating_schedule(arena: GraphSpec, total: usize, placements: &[(usize, CoinOp)]) -> Result<Vec<StepSpec>> {
    let dim = arena.coin_dim();
    let mut ops: Vec<CoinOp> = vec![CoinOp::identity(dim); total];
    for (step, op) in placements {
        if *step == 0 || *step > total {
            return Err(Error::Contract(format!("placement at step {step} outside 1..={total}")));
        }
        ops[step - 1] = op.compose(&ops[step - 1])?;
    }
    Ok(ops.into_iter().enumerate().map(|(i, op)| StepSpec::new(arena, coin_for_step(i + 1), op)).collect())
}

impl TransferPlan {
    /// Builds a plan from an explicit schedule.
    pub fn from_placements(
        arena: GraphSpec,
        target: i64,
        total_steps: usize,
        placements: &[(usize, CoinOp)],
        recovery: (CoinOp, CoinOp),
        case_tag: CaseTag,
    ) -> Result<Self> {
        arena.validate()?;
        if !arena.contains(target) {
            return Err(Error::Target(format!("target {target} is not a vertex of {arena}")));
        }
        Ok(TransferPlan {
            arena,
            start: 0,
            target,
            steps: alternating_schedule(arena, total_steps, placements)?,
            recovery,
            case_tag,
            certification: None,
        })
    }

    pub fn coin_dim(&self) -> usize {
        self.arena.coin_dim()
    }

    pub fn coin_dims(&self) -> Vec<usize> {
        vec![self.coin_dim(); 2]
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Non-identity coin operators, in step order.
    pub fn placements(&self) -> Vec<Placement> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.coin_op.is_identity())
            .map(|(i, s)| Placement { step: i + 1, coin: s.active_coin + 1, op: s.coin_op.name() })
            .collect()
    }

    /// Checks the structural invariants: strict coin alternation and the
    /// number of flipping steps allowed for the case.
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.steps.iter().enumerate() {
            if s.active_coin != coin_for_step(i + 1) {
                return Err(Error::Contract(format!(
                    "step {} drives coin {}, expected coin {}",
                    i + 1,
                    s.active_coin + 1,
                    coin_for_step(i + 1) + 1
                )));
            }
            if s.shift.arena() != self.arena {
                return Err(Error::Contract(format!("step {} uses another arena", i + 1)));
            }
        }
        let flips = self.placements().len();
        let ok = match self.case_tag {
            CaseTag::CompleteGraph | CaseTag::RegularGraph => flips == 1,
            CaseTag::Revival => flips == 0,
            CaseTag::Custom => true,
            _ => flips <= 2,
        };
        if !ok {
            return Err(Error::Contract(format!("{} schedule carries {flips} non-identity steps", self.case_tag)));
        }
        Ok(())
    }

    /// The same plan started from position `start` on the line.
    pub fn starting_at(&self, start: i64) -> Result<TransferPlan> {
        if !self.arena.is_line() {
            return Err(Error::Arena(format!("routing from an arbitrary start needs the line, not {}", self.arena)));
        }
        let mut p = self.clone();
        p.target = self.target - self.start + start;
        p.start = start;
        Ok(p)
    }

    /// Initial state `|start> (x) payload (x) |0>`.
    pub fn initial_state(&self, payload: &[Complex64]) -> Result<WalkState> {
        self.payload_state(self.start, payload)
    }

    /// Wanted state `|target> (x) payload (x) |0>`.
    pub fn target_state(&self, payload: &[Complex64]) -> Result<WalkState> {
        self.payload_state(self.target, payload)
    }

    fn payload_state(&self, position: i64, payload: &[Complex64]) -> Result<WalkState> {
        let dim = self.coin_dim();
        if payload.len() != dim {
            return Err(Error::SpaceMismatch(format!(
                "payload has {} amplitudes, coin 1 has dimension {dim}",
                payload.len()
            )));
        }
        product_state(self.arena, position, &[payload.to_vec(), basis_vector(dim, 0)])
    }
}

pub(crate) fn basis_vector(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Total steps, coin placements, recovery pair and case tag.
type LineSchedule = (usize, Vec<(usize, CoinOp)>, (CoinOp, CoinOp), CaseTag);

fn line_schedule(x: i64) -> Result<LineSchedule> {
    let x_abs = x.unsigned_abs() as usize;
    let xx = CoinOp::pauli_x;
    let id = || CoinOp::identity(2);
    let plan = match (x > 0, x % 2 == 0) {
        _ if x == 0 => return Err(Error::Target("transfer to the starting position is undefined".into())),
        (true, true) => (2 * x_abs, vec![(x_abs + 1, xx())], (xx(), id()), CaseTag::LinePositiveEven),
        (true, false) => (2 * x_abs + 1, vec![(x_abs + 2, xx())], (xx(), id()), CaseTag::LinePositiveOdd),
        (false, true) => (2 * x_abs, vec![(2, xx()), (x_abs + 1, xx())], (xx(), xx()), CaseTag::LineNegativeEven),
        (false, false) => (2 * x_abs + 1, vec![(2, xx()), (x_abs + 2, xx())], (xx(), xx()), CaseTag::LineNegativeOdd),
    };
    Ok(plan)
}

/// Qubit transfer on the line from 0 to `x`.
pub fn plan_line(x: i64) -> Result<TransferPlan> {
    let (total, placements, recovery, tag) = line_schedule(x)?;
    TransferPlan::from_placements(GraphSpec::Line, x, total, &placements, recovery, tag)
}

/// Qubit transfer on a `d`-cycle from 0 to `x` using one of four routing methods:
///
/// 1. both branches clockwise,
/// 2. both branches anticlockwise,
/// 3. `a` clockwise, `b` anticlockwise (even `d`),
/// 4. `a` anticlockwise, `b` clockwise (even `d`).
pub fn plan_cycle(d: usize, x: i64, method: u8) -> Result<TransferPlan> {
    let arena = GraphSpec::cycle(d)?;
    if x <= 0 || x >= d as i64 {
        return Err(Error::Target(format!("target must lie in 1..={}, got {x}", d - 1)));
    }
    if !(1..=4).contains(&method) {
        return Err(Error::Method(format!("method must be 1, 2, 3 or 4, got {method}")));
    }
    if method >= 3 && d % 2 == 1 {
        return Err(Error::Method(format!("method {method} needs an even number of vertices, got {d}")));
    }
    let xu = x as usize;
    let xx = CoinOp::pauli_x;
    let id = || CoinOp::identity(2);
    match method {
        1 => {
            let (total, placements, recovery, _) = line_schedule(x)?;
            TransferPlan::from_placements(arena, x, total, &placements, recovery, CaseTag::CycleClockwise)
        }
        2 => {
            let y = d - xu;
            let (total, flip, tag) = if y.is_multiple_of(2) {
                (2 * y, y + 1, CaseTag::CycleAnticlockwiseEven)
            } else {
                (2 * y + 1, y + 2, CaseTag::CycleAnticlockwiseOdd)
            };
            TransferPlan::from_placements(arena, x, total, &[(2, xx()), (flip, xx())], (xx(), xx()), tag)
        }
        3 if xu.is_multiple_of(2) => {
            TransferPlan::from_placements(arena, x, d, &[(xu + 2, xx())], (id(), xx()), CaseTag::CycleSplitEven)
        }
        3 => certified_plan(arena, x, CaseTag::CycleSplitOdd, split_odd_candidates(d, xu)),
        _ => {
            let y = d - xu;
            let mirrored: Vec<Candidate> = if y.is_multiple_of(2) {
                vec![Candidate {
                    description: format!(
                        "mirror of the even split schedule for {y}: X on coin 2 at steps 2 and {}",
                        y + 2
                    ),
                    total: d,
                    placements: vec![(2, xx()), (y + 2, xx())],
                }]
            } else {
                split_odd_candidates(d, y)
                    .into_iter()
                    .map(|mut c| {
                        c.description = format!("mirror of [{}] with X on coin 2 at step 2", c.description);
                        c.placements.insert(0, (2, xx()));
                        c
                    })
                    .collect()
            };
            certified_plan(arena, x, CaseTag::CycleSplitMirrored, mirrored)
        }
    }
}

/// Candidate schedules for the split method with an odd target, tried in order.
fn split_odd_candidates(d: usize, x: usize) -> Vec<Candidate> {
    let xx = CoinOp::pauli_x;
    let clip = |total: usize, placements: Vec<(usize, CoinOp)>| -> Vec<(usize, CoinOp)> {
        placements.into_iter().filter(|(s, _)| *s <= total).collect()
    };
    vec![
        Candidate {
            description: format!("tabulated: X on coin 2 at step {} with {} steps", x + 1, d + 1),
            total: d + 1,
            placements: clip(d + 1, vec![(x + 1, xx())]),
        },
        Candidate {
            description: format!("text reading: X on coin 1 at step {} with {} steps", x + 2, d + 1),
            total: d + 1,
            placements: clip(d + 1, vec![(x + 2, xx())]),
        },
        Candidate {
            description: format!("tabulated placement with {} steps", d - 1),
            total: d - 1,
            placements: clip(d - 1, vec![(x + 1, xx())]),
        },
    ]
}

struct Candidate {
    description: String,
    total: usize,
    placements: Vec<(usize, CoinOp)>,
}

/// Number of random payloads used when certifying a generated schedule.
pub const CERTIFICATION_TRIALS: usize = 8;
/// Seed for the payloads used when certifying a generated schedule.
pub const CERTIFICATION_SEED: u64 = 0x00c0_1d5e;

fn certified_plan(arena: GraphSpec, x: i64, tag: CaseTag, candidates: Vec<Candidate>) -> Result<TransferPlan> {
    let dim = arena.coin_dim();
    let mut attempts = Vec::new();
    for cand in candidates {
        let mut plan = TransferPlan::from_placements(
            arena,
            x,
            cand.total,
            &cand.placements,
            (CoinOp::identity(dim), CoinOp::identity(dim)),
            tag,
        )?;
        let placements = plan.placements();
        match oracle::find_recovery(&plan, CERTIFICATION_SEED) {
            Err(Error::Infeasible(reason)) => {
                attempts.push(CandidateAttempt {
                    description: cand.description,
                    steps: cand.total,
                    placements,
                    passed: false,
                    recovery: None,
                    note: reason,
                });
                continue;
            }
            Err(e) => return Err(e),
            Ok(recovery) => plan.recovery = (recovery.u1, recovery.u2),
        }
        let mut record = oracle::certify_schedule(&plan, CERTIFICATION_TRIALS, CERTIFICATION_SEED)?;
        let passed = record.passed;
        attempts.push(CandidateAttempt {
            description: cand.description,
            steps: cand.total,
            placements,
            passed,
            recovery: Some((plan.recovery.0.name(), plan.recovery.1.name())),
            note: format!("minimum fidelity {:.17e}", record.min_fidelity),
        });
        if passed {
            record.attempts = attempts;
            plan.certification = Some(record);
            return Ok(plan);
        }
    }
    Err(Error::Infeasible(format!(
        "no candidate schedule reaches {x} on {arena}: {}",
        attempts.iter().map(|a| format!("{} ({})", a.description, a.note)).collect::<Vec<_>>().join("; ")
    )))
}

/// Qudit transfer on the complete graph with loops from 0 to `x`.
pub fn plan_complete(d: usize, x: i64) -> Result<TransferPlan> {
    if d < 2 {
        return Err(Error::Arena(format!("complete-graph transfer needs d >= 2, got {d}")));
    }
    let arena = GraphSpec::complete(d)?;
    kd_plan(arena, d, x, CaseTag::CompleteGraph)
}

/// Qudit transfer on the circulant `d`-regular graph with `n` vertices.
///
/// The coin-2 flip is the `d`-dimensional cyclic shift of coin labels.
pub fn plan_regular(n: usize, d: usize, x: i64) -> Result<TransferPlan> {
    if d < 2 || n < d {
        return Err(Error::Target(format!("regular-graph transfer needs n >= d >= 2, got n={n}, d={d}")));
    }
    let arena = GraphSpec::circulant(n, d)?;
    kd_plan(arena, n, x, CaseTag::RegularGraph)
}

fn kd_plan(arena: GraphSpec, n: usize, x: i64, tag: CaseTag) -> Result<TransferPlan> {
    if x < 1 || x >= n as i64 {
        return Err(Error::Target(format!("target must lie in 1..={}, got {x}", n - 1)));
    }
    let d = arena.coin_dim();
    let flip = 2 * n - 2 * x as usize + 2;
    TransferPlan::from_placements(
        arena,
        x,
        2 * n,
        &[(flip, CoinOp::cyclic_shift(d))],
        (CoinOp::identity(d), CoinOp::cyclic_shift_inverse(d)),
        tag,
    )
}

/// All-identity schedule of `2 V` steps on a finite graph; the walker returns
/// to position 0 with the payload intact.
pub fn plan_revival(arena: GraphSpec) -> Result<TransferPlan> {
    let v = arena.vertices().ok_or_else(|| Error::Arena("revival needs a finite graph".into()))?;
    let d = arena.coin_dim();
    TransferPlan::from_placements(arena, 0, 2 * v, &[], (CoinOp::identity(d), CoinOp::identity(d)), CaseTag::Revival)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub plan: TransferPlan,
    /// `trace[i]` is the state after step `i`; `trace[0]` is the initial state.
    pub trace: Vec<WalkState>,
    pub final_state: WalkState,
    pub corrected: WalkState,
    pub target_state: WalkState,
    pub fidelity: f64,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.fidelity >= 1.0 - RESULT_TOL
    }
}

/// Evolves `|start> (x) payload (x) |0>` through the plan, applies the
/// recovery and compares with `|target> (x) payload (x) |0>`.
pub fn run_transfer(plan: &TransferPlan, payload: &[Complex64]) -> Result<TransferReport> {
    let initial = plan.initial_state(payload)?;
    let trace = evolve(&initial, &plan.steps)?;
    let final_state = trace.last().expect("trace holds the initial state").clone();
    let corrected = final_state
        .apply_coin_matrix(COIN1, &coin_matrix(&plan.recovery.0)?)?
        .apply_coin_matrix(COIN2, &coin_matrix(&plan.recovery.1)?)?;
    let target_state = plan.target_state(payload)?;
    let fidelity = fidelity_up_to_phase(&corrected, &target_state)?;
    Ok(TransferReport { plan: plan.clone(), trace, final_state, corrected, target_state, fidelity })
}

/// Result of running the positive-`x` line schedule and then the negative-`x`
/// schedule, with no recovery in between or after.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Periodicity {
    /// Fidelity with `|0> (x) payload (x) |0>`.
    pub fidelity: f64,
    /// Fidelity with `|0> (x) payload (x) |1>`. The negative schedule moves
    /// coin 2 leftwards on every one of its steps, so it always ends in `|1>`.
    pub fidelity_coin2_flipped: f64,
    pub total_steps: usize,
}

pub fn periodicity_check(x: i64, payload: (Complex64, Complex64)) -> Result<Periodicity> {
    if x <= 0 || x % 2 != 0 {
        return Err(Error::Target(format!("periodicity needs a positive even x, got {x}")));
    }
    let forward = plan_line(x)?;
    let back = plan_line(-x)?;
    let initial = forward.initial_state(&[payload.0, payload.1])?;
    let mid = evolve(&initial, &forward.steps)?.pop().expect("nonempty trace");
    let end = evolve(&mid, &back.steps)?.pop().expect("nonempty trace");
    let flipped = product_state(GraphSpec::Line, 0, &[vec![payload.0, payload.1], basis_vector(2, 1)])?;
    Ok(Periodicity {
        fidelity: fidelity_up_to_phase(&end, &initial)?,
        fidelity_coin2_flipped: fidelity_up_to_phase(&end, &flipped)?,
        total_steps: forward.step_count() + back.step_count(),
    })
}

/// Runs `plan` from start position `l` on the line.
pub fn route_from(l: i64, plan: &TransferPlan, payload: &[Complex64]) -> Result<TransferReport> {
    run_transfer(&plan.starting_at(l)?, payload)
}
