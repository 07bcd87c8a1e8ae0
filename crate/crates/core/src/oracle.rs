//! Dense brute-force evolution used as an independent check on the sparse
//! engine and to certify schedules that are not tabulated.
//!
//! Shift matrices are assembled here from the arena definitions as explicit
//! permutation matrices; nothing is borrowed from [`crate::operators`] except
//! the coin matrices themselves. The line is simulated on a window of
//! `2k + 3` sites for a `k`-step walk, closed into a ring so that the shift
//! stays a permutation. The walker cannot reach the seam in `k` steps, so the
//! window is exact.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    random_coin_vector, vector_fidelity, BasisLabel, GraphSpec, WalkState, COIN1, COIN2, ORACLE_TOL, RESULT_TOL,
};
use crate::operators::{coin_matrix, CoinOp, StepSpec};
use crate::teleport::TeleportPlan;
use crate::transfer::{basis_vector, Placement, TransferPlan};

/// Largest flattened dimension the oracle accepts.
pub const MAX_DENSE_DIM: usize = 100_000;
/// Largest dimension for which dense step matrices are materialized. Above
/// this the matrices alone would need gigabytes.
pub const MAX_MATRIX_DIM: usize = 4_096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Flattened basis and one dense unitary per walk step.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    arena: GraphSpec,
    coin_dims: Vec<usize>,
    positions: Vec<i64>,
    matrices: Vec<DMatrix<Complex64>>,
    /// `schedule[i]` indexes into `matrices` for step `i + 1`.
    schedule: Vec<usize>,
}

impl DenseSystem {
    /// Builds the system for a schedule started at `start`.
    pub fn new(arena: GraphSpec, coin_dims: &[usize], start: i64, steps: &[StepSpec]) -> Result<Self> {
        let positions: Vec<i64> = match arena.vertices() {
            Some(v) => (0..v as i64).collect(),
            None => {
                let k = steps.len() as i64 + 1;
                (start - k..=start + k).collect()
            }
        };
        let dim = positions.len() * coin_dims.iter().product::<usize>();
        if dim > MAX_DENSE_DIM {
            return Err(Error::Size { dim, limit: MAX_DENSE_DIM });
        }
        if dim > MAX_MATRIX_DIM {
            return Err(Error::Size { dim, limit: MAX_MATRIX_DIM });
        }
        let mut sys = DenseSystem {
            arena,
            coin_dims: coin_dims.to_vec(),
            positions,
            matrices: Vec::new(),
            schedule: Vec::with_capacity(steps.len()),
        };
        let mut cache: Vec<(usize, DMatrix<Complex64>, usize)> = Vec::new();
        for step in steps {
            let coin = coin_matrix(&step.coin_op)?;
            if step.active_coin >= coin_dims.len() || coin.nrows() != coin_dims[step.active_coin] {
                return Err(Error::SpaceMismatch("step does not fit the coin registers".into()));
            }
            let hit = cache.iter().find(|(m, c, _)| *m == step.active_coin && *c == coin).map(|(_, _, idx)| *idx);
            let idx = match hit {
                Some(idx) => idx,
                None => {
                    let m = sys.step_matrix(step.active_coin, &coin);
                    sys.matrices.push(m);
                    let idx = sys.matrices.len() - 1;
                    cache.push((step.active_coin, coin, idx));
                    idx
                }
            };
            sys.schedule.push(idx);
        }
        Ok(sys)
    }

    pub fn dimension(&self) -> usize {
        self.positions.len() * self.coin_dims.iter().product::<usize>()
    }

    /// Distinct step matrices in first-use order.
    pub fn step_matrices(&self) -> impl Iterator<Item = &DMatrix<Complex64>> {
        self.matrices.iter()
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        let p = self.positions.iter().position(|&q| q == label.position)?;
        let mut idx = p;
        for (c, d) in label.coins.iter().zip(&self.coin_dims) {
            if c >= d {
                return None;
            }
            idx = idx * d + c;
        }
        Some(idx)
    }

    pub fn label_of(&self, mut index: usize) -> BasisLabel {
        let mut coins = vec![0; self.coin_dims.len()];
        for (slot, d) in coins.iter_mut().zip(&self.coin_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        BasisLabel::new(self.positions[index], coins)
    }

    pub fn to_vector(&self, state: &WalkState) -> Result<DVector<Complex64>> {
        if state.arena() != self.arena || state.coin_dims() != self.coin_dims.as_slice() {
            return Err(Error::SpaceMismatch("state does not live in this dense system".into()));
        }
        let mut v = DVector::from_element(self.dimension(), ZERO);
        for (label, amp) in state.terms() {
            let idx =
                self.index_of(label).ok_or_else(|| Error::Size { dim: self.dimension(), limit: self.dimension() })?;
            v[idx] = *amp;
        }
        Ok(v)
    }

    pub fn to_state(&self, v: &DVector<Complex64>) -> WalkState {
        let amplitudes: BTreeMap<BasisLabel, Complex64> =
            v.iter().enumerate().filter(|(_, a)| **a != ZERO).map(|(i, a)| (self.label_of(i), *a)).collect();
        WalkState::from_parts(self.arena, self.coin_dims.clone(), amplitudes)
    }

    /// Every intermediate vector, starting with `initial`.
    pub fn evolve(&self, initial: DVector<Complex64>) -> Vec<DVector<Complex64>> {
        let mut out = Vec::with_capacity(self.schedule.len() + 1);
        out.push(initial);
        for &idx in &self.schedule {
            let next = &self.matrices[idx] * out.last().expect("nonempty");
            out.push(next);
        }
        out
    }

    /// Where the oracle's own shift sends `(position, coin value)`.
    fn shifted(&self, position: i64, coin: usize) -> i64 {
        match self.arena {
            GraphSpec::Line => {
                let lo = self.positions[0];
                let len = self.positions.len() as i64;
                let raw = if coin == 0 { position + 1 } else { position - 1 };
                lo + (raw - lo).rem_euclid(len)
            }
            GraphSpec::Cycle { vertices } => {
                let raw = if coin == 0 { position + 1 } else { position + vertices as i64 - 1 };
                raw % vertices as i64
            }
            GraphSpec::CompleteWithLoops { vertices } | GraphSpec::Circulant { vertices, .. } => {
                (position + coin as i64) % vertices as i64
            }
        }
    }

    /// `S_m (I (x) C on coin m)`, with the shift as an explicit permutation matrix.
    fn step_matrix(&self, active: usize, coin: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let dim = self.dimension();
        let mut lifted = DMatrix::<Complex64>::identity(self.positions.len(), self.positions.len());
        for (m, &d) in self.coin_dims.iter().enumerate() {
            let factor = if m == active { coin.clone() } else { DMatrix::identity(d, d) };
            lifted = lifted.kronecker(&factor);
        }
        // The permutation P has a single 1 per column, at `perm[col]`; the
        // product P * lifted moves row `col` of `lifted` to row `perm[col]`.
        let perm: Vec<usize> = (0..dim)
            .map(|col| {
                let label = self.label_of(col);
                let moved = BasisLabel::new(self.shifted(label.position, label.coins[active]), label.coins);
                self.index_of(&moved).expect("shift stays inside the window")
            })
            .collect();
        let mut hit = vec![false; dim];
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        for (col, &row) in perm.iter().enumerate() {
            assert!(!std::mem::replace(&mut hit[row], true), "shift is not a permutation");
            out.set_row(row, &lifted.row(col));
        }
        out
    }

    /// Normalized product vector `|start> (x) coin1 (x) coin2`.
    pub fn product_vector(&self, start: i64, coin1: &[Complex64], coin2: &[Complex64]) -> Result<DVector<Complex64>> {
        if self.coin_dims.len() != 2 || coin1.len() != self.coin_dims[0] || coin2.len() != self.coin_dims[1] {
            return Err(Error::SpaceMismatch("coin vectors do not fit the dense system".into()));
        }
        let norm: f64 = [coin1, coin2].iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).product();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let mut v = DVector::from_element(self.dimension(), ZERO);
        for (i, a) in coin1.iter().enumerate() {
            for (j, b) in coin2.iter().enumerate() {
                let idx = self
                    .index_of(&BasisLabel::new(start, vec![i, j]))
                    .ok_or_else(|| Error::Label(format!("start {start} outside the arena")))?;
                v[idx] = a * b / norm;
            }
        }
        Ok(v)
    }
}

/// A schedule the oracle can evolve.
#[derive(Debug, Clone, Copy)]
pub enum DensePlan<'a> {
    Transfer(&'a TransferPlan),
    Teleport(&'a TeleportPlan),
}

/// Dense trajectory of one run.
#[derive(Debug, Clone)]
pub struct DenseRun {
    pub system: DenseSystem,
    /// `trajectory[i]` is the vector after step `i`.
    pub trajectory: Vec<DVector<Complex64>>,
}

impl DenseRun {
    pub fn final_vector(&self) -> &DVector<Complex64> {
        self.trajectory.last().expect("trajectory holds the initial vector")
    }

    pub fn final_state(&self) -> WalkState {
        self.system.to_state(self.final_vector())
    }

    /// Largest entrywise deviation from a sparse trace, over all steps.
    pub fn max_deviation(&self, trace: &[WalkState]) -> Result<f64> {
        if trace.len() != self.trajectory.len() {
            return Err(Error::Contract(format!(
                "sparse trace has {} states, dense trajectory {}",
                trace.len(),
                self.trajectory.len()
            )));
        }
        let mut worst: f64 = 0.0;
        for (s, v) in trace.iter().zip(&self.trajectory) {
            let w = self.system.to_vector(s)?;
            worst = worst.max((w - v).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        Ok(worst)
    }
}

/// Dense system for a plan, with its start vertex and coin-2 initial state.
fn system_for(plan: DensePlan<'_>) -> Result<(DenseSystem, i64, Vec<Complex64>)> {
    match plan {
        DensePlan::Transfer(p) => {
            let dim = p.coin_dim();
            let system = DenseSystem::new(p.arena, &p.coin_dims(), p.start, &p.steps)?;
            Ok((system, p.start, basis_vector(dim, 0)))
        }
        DensePlan::Teleport(p) => {
            let system = DenseSystem::new(p.arena, &[p.coin_dim(); 2], 0, &p.steps())?;
            Ok((system, 0, p.coin2_init.clone()))
        }
    }
}

fn check_payload(system: &DenseSystem, payload: &[Complex64]) -> Result<()> {
    let dim = system.coin_dims[0];
    if payload.len() != dim {
        return Err(Error::SpaceMismatch(format!(
            "payload has {} amplitudes, coin 1 has dimension {dim}",
            payload.len()
        )));
    }
    Ok(())
}

/// Evolves the plan's initial state for `payload` with dense matrices.
pub fn dense_evolve(plan: DensePlan<'_>, payload: &[Complex64]) -> Result<DenseRun> {
    let (system, start, coin2) = system_for(plan)?;
    check_payload(&system, payload)?;
    let v = system.product_vector(start, payload, &coin2)?;
    let trajectory = system.evolve(v);
    Ok(DenseRun { system, trajectory })
}

/// Recovery unitaries for coin 1 and coin 2 and the position holding the payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub position: i64,
    pub u1: CoinOp,
    pub u2: CoinOp,
}

/// Finds coin corrections taking a product state `|x> (x) v1 (x) v2` to
/// `|x> (x) target_coin1 (x) target_coin2`.
///
/// Candidates are tried in a fixed order so the answer is reproducible: the
/// identity, then powers of the cyclic shift (Pauli X for qubits), then powers
/// of the clock operator (Fourier-conjugated shifts), then a general
/// Householder unitary.
pub fn solve_recovery(
    final_state: &WalkState,
    target_coin1: &[Complex64],
    target_coin2: &[Complex64],
) -> Result<Recovery> {
    if final_state.num_coins() != 2 {
        return Err(Error::Infeasible("recovery is defined for two coins".into()));
    }
    let (position, v1, v2) = factor_product(final_state)?;
    let u1 = correction_for(&v1, target_coin1)?;
    let u2 = correction_for(&v2, target_coin2)?;
    Ok(Recovery { position, u1, u2 })
}

/// Splits a state into `|x> (x) v1 (x) v2` or reports that it is entangled.
fn factor_product(state: &WalkState) -> Result<(i64, Vec<Complex64>, Vec<Complex64>)> {
    let (pivot, _) = state.terms().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).ok_or(Error::ZeroState)?;
    let dims = state.coin_dims();
    let v1: Vec<Complex64> =
        (0..dims[0]).map(|j| state.amplitude(&BasisLabel::new(pivot.position, vec![j, pivot.coins[1]]))).collect();
    let v2: Vec<Complex64> =
        (0..dims[1]).map(|k| state.amplitude(&BasisLabel::new(pivot.position, vec![pivot.coins[0], k]))).collect();
    let mut overlap = ZERO;
    let mut norm1 = 0.0;
    let mut norm2 = 0.0;
    for a in &v1 {
        norm1 += a.norm_sqr();
    }
    for b in &v2 {
        norm2 += b.norm_sqr();
    }
    for (label, amp) in state.terms() {
        if label.position == pivot.position {
            overlap += (v1[label.coins[0]] * v2[label.coins[1]]).conj() * amp;
        }
    }
    let fid = overlap.norm_sqr() / (norm1 * norm2 * state.norm_sqr());
    if fid < 1.0 - RESULT_TOL {
        return Err(Error::Infeasible(format!("final state is not a product |x>(x)v1(x)v2 (overlap {fid:.6})")));
    }
    Ok((pivot.position, v1, v2))
}

fn correction_for(v: &[Complex64], target: &[Complex64]) -> Result<CoinOp> {
    let d = v.len();
    if target.len() != d {
        return Err(Error::SpaceMismatch(format!("target has {} amplitudes, coin has dimension {d}", target.len())));
    }
    let fits = |op: &CoinOp| -> Result<bool> {
        let u = coin_matrix(op)?;
        let w = &u * DVector::from_column_slice(v);
        let w: Vec<Complex64> = w.iter().copied().collect();
        let norm_w: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        let norm_t: f64 = target.iter().map(|z| z.norm_sqr()).sum();
        Ok(vector_fidelity(&w, target) / (norm_w * norm_t) >= 1.0 - RESULT_TOL)
    };
    let mut candidates = vec![CoinOp::identity(d)];
    if d == 2 {
        candidates.push(CoinOp::pauli_x());
    } else {
        candidates.push(CoinOp::cyclic_shift(d));
        for p in 2..d.saturating_sub(1) {
            candidates.push(shift_power(d, p)?);
        }
        if d > 2 {
            candidates.push(CoinOp::cyclic_shift_inverse(d));
        }
    }
    for p in 1..d {
        candidates.push(clock_power(d, p)?);
    }
    for op in candidates {
        if fits(&op)? {
            return Ok(op);
        }
    }
    let general = householder(v, target)?;
    if fits(&general)? {
        Ok(general)
    } else {
        Err(Error::Infeasible("no unitary maps the coin onto its target".into()))
    }
}

fn shift_power(d: usize, p: usize) -> Result<CoinOp> {
    let m = DMatrix::from_fn(d, d, |r, c| if r == (c + p) % d { ONE } else { ZERO });
    CoinOp::custom(m, format!("X_{d}^{p}"))
}

fn clock_power(d: usize, p: usize) -> Result<CoinOp> {
    let m = DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((p * r) % d) as f64 / d as f64)
        } else {
            ZERO
        }
    });
    let name = if d == 2 {
        "Z".to_string()
    } else if p == 1 {
        format!("Z_{d}")
    } else {
        format!("Z_{d}^{p}")
    };
    CoinOp::custom(m, name)
}

/// Unitary taking unit vector `v` to unit vector `t`.
fn householder(v: &[Complex64], t: &[Complex64]) -> Result<CoinOp> {
    let d = v.len();
    let v = DVector::from_column_slice(v).normalize();
    let t = DVector::from_column_slice(t).normalize();
    let ip = t.dotc(&v);
    let phase = if ip.norm() > 1e-15 { ip / ip.norm() } else { ONE };
    let w = &v - &t * phase;
    let wn = w.norm_squared();
    let reflect = if wn < 1e-30 {
        DMatrix::identity(d, d)
    } else {
        DMatrix::identity(d, d) - (&w * w.adjoint()) * Complex64::new(2.0 / wn, 0.0)
    };
    CoinOp::custom(reflect * phase.conj(), "general")
}

/// One schedule tried while certifying a generated plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateAttempt {
    pub description: String,
    pub steps: usize,
    pub placements: Vec<Placement>,
    pub passed: bool,
    /// Names of `(U1, U2)` when a recovery was found.
    pub recovery: Option<(String, String)>,
    pub note: String,
}

/// Outcome of certifying a transfer schedule with the dense oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationRecord {
    pub passed: bool,
    /// Random payloads tried on top of the computational basis payloads.
    pub trials: usize,
    pub seed: u64,
    pub min_fidelity: f64,
    /// First payload whose corrected fidelity fell short, if any.
    pub counterexample: Option<Vec<Complex64>>,
    /// Candidate schedules tried before this one was accepted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<CandidateAttempt>,
}

/// Runs the plan densely on every basis payload plus `trials` random ones and
/// checks the corrected fidelity of each.
pub fn certify_schedule(plan: &TransferPlan, trials: usize, seed: u64) -> Result<CertificationRecord> {
    let dim = plan.coin_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut payloads: Vec<Vec<Complex64>> = (0..dim).map(|k| basis_vector(dim, k)).collect();
    payloads.extend((0..trials.max(1)).map(|_| random_coin_vector(dim, &mut rng)));
    let u1 = coin_matrix(&plan.recovery.0)?;
    let u2 = coin_matrix(&plan.recovery.1)?;
    let (system, start, coin2) = system_for(DensePlan::Transfer(plan))?;
    let mut min_fidelity: f64 = 1.0;
    let mut counterexample = None;
    for payload in payloads {
        let v = system.product_vector(start, &payload, &coin2)?;
        let fin = system.evolve(v).pop().expect("trajectory holds the initial vector");
        let corrected = system.to_state(&fin).apply_coin_matrix(COIN1, &u1)?.apply_coin_matrix(COIN2, &u2)?;
        let target = system.to_vector(&plan.target_state(&payload)?)?;
        let got = system.to_vector(&corrected)?;
        let fid = target.dotc(&got).norm_sqr();
        if fid < min_fidelity {
            min_fidelity = fid;
        }
        if fid < 1.0 - RESULT_TOL && counterexample.is_none() {
            counterexample = Some(payload);
        }
    }
    Ok(CertificationRecord {
        passed: counterexample.is_none(),
        trials: trials.max(1),
        seed,
        min_fidelity,
        counterexample,
        attempts: Vec::new(),
    })
}

/// Solves the recovery of a schedule from one generic random payload.
pub fn find_recovery(plan: &TransferPlan, seed: u64) -> Result<Recovery> {
    let dim = plan.coin_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let payload = random_coin_vector(dim, &mut rng);
    let run = dense_evolve(DensePlan::Transfer(plan), &payload)?;
    let recovery = solve_recovery(&run.final_state(), &payload, &basis_vector(dim, 0))?;
    if recovery.position != plan.target {
        return Err(Error::Infeasible(format!("payload lands on {} instead of {}", recovery.position, plan.target)));
    }
    Ok(recovery)
}

/// Largest entrywise deviation allowed between sparse and dense runs.
pub fn agreement_tolerance() -> f64 {
    ORACLE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::evolve;
    use crate::transfer::{alternating_schedule, plan_complete, plan_line, CaseTag};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dense_matches_sparse_on_line_case() {
        let plan = plan_line(2).unwrap();
        let payload = [c(0.6, 0.0), c(0.0, 0.8)];
        let run = dense_evolve(DensePlan::Transfer(&plan), &payload).unwrap();
        let trace = evolve(&plan.initial_state(&payload).unwrap(), &plan.steps).unwrap();
        assert!(run.max_deviation(&trace).unwrap() <= 1e-12);
    }

    #[test]
    fn complete_graph_mass_on_target() {
        let plan = plan_complete(3, 2).unwrap();
        let payload = [c(0.5, 0.1), c(-0.3, 0.6), c(0.2, -0.4)];
        let run = dense_evolve(DensePlan::Transfer(&plan), &payload).unwrap();
        let fin = run.final_state();
        assert!(fin.positions().iter().all(|&p| p == 2));
        assert!((fin.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_matrices_are_unitary() {
        let plan = plan_complete(4, 1).unwrap();
        let run = dense_evolve(DensePlan::Transfer(&plan), &basis_vector(4, 1)).unwrap();
        for m in run.system.step_matrices() {
            assert!(crate::operators::unitarity_defect(m) <= 1e-12);
        }
    }

    #[test]
    fn custom_coin_step_preserves_norm() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let op = CoinOp::custom(m, "u").unwrap();
        let mut plan = plan_line(1).unwrap();
        plan.steps = alternating_schedule(GraphSpec::Line, 5, &[(1, op.clone()), (2, op)]).unwrap();
        let run = dense_evolve(DensePlan::Transfer(&plan), &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        for v in &run.trajectory {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn recovery_of_case_1_1() {
        let plan = plan_line(2).unwrap();
        let payload = [c(0.6, 0.0), c(0.0, 0.8)];
        let run = dense_evolve(DensePlan::Transfer(&plan), &payload).unwrap();
        let r = solve_recovery(&run.final_state(), &payload, &basis_vector(2, 0)).unwrap();
        assert_eq!(r.position, 2);
        assert_eq!(r.u1, CoinOp::pauli_x());
        assert!(r.u2.is_identity());
    }

    #[test]
    fn recovery_of_correct_state_is_identity() {
        let payload = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let s = crate::hilbert::product_state(GraphSpec::Line, 3, &[payload.clone(), basis_vector(2, 0)]).unwrap();
        let r = solve_recovery(&s, &payload, &basis_vector(2, 0)).unwrap();
        assert!(r.u1.is_identity() && r.u2.is_identity());
    }

    #[test]
    fn entangled_final_is_infeasible() {
        let plan = plan_line(2).unwrap();
        let payload = [c(0.6, 0.0), c(0.0, 0.8)];
        let run = dense_evolve(DensePlan::Transfer(&plan), &payload).unwrap();
        let mid = run.system.to_state(&run.trajectory[2]);
        assert!(matches!(solve_recovery(&mid, &payload, &basis_vector(2, 0)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn general_recovery_when_no_named_operator_fits() {
        let v = vec![c(0.6, 0.0), c(0.8, 0.0)];
        let t = vec![c(0.0, 1.0), c(0.0, 0.0)];
        let s = crate::hilbert::product_state(GraphSpec::Line, 0, &[v, basis_vector(2, 0)]).unwrap();
        let r = solve_recovery(&s, &t, &basis_vector(2, 0)).unwrap();
        assert_eq!(r.u1.name(), "general");
    }

    #[test]
    fn certification_passes_and_negative_control_fails() {
        let plan = plan_complete(4, 3).unwrap();
        let rec = certify_schedule(&plan, 5, 1).unwrap();
        assert!(rec.passed, "{rec:?}");
        assert!(rec.min_fidelity >= 1.0 - 1e-10);

        let mut bad = plan_line(2).unwrap();
        bad.steps = alternating_schedule(GraphSpec::Line, 4, &[(1, CoinOp::pauli_x())]).unwrap();
        bad.case_tag = CaseTag::Custom;
        let rec = certify_schedule(&bad, 5, 1).unwrap();
        assert!(!rec.passed);
        assert!(rec.counterexample.is_some());
    }

    #[test]
    fn size_guard() {
        let plan = plan_complete(20, 3).unwrap();
        assert!(matches!(dense_evolve(DensePlan::Transfer(&plan), &basis_vector(20, 0)), Err(Error::Size { .. })));
    }
}
