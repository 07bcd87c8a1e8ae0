//! Teleportation of the coin-1 state onto coin 2.
//!
//! Both coins drive the walker with identity coin operators for `t` steps
//! each, which entangles coin 2 with position and coin 1. Measuring position
//! and coin 1 then leaves coin 2 in a known unitary image of the input; the
//! correction for each outcome pair undoes it.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    contract_to_coin, fourier_vector, normalize, product_state, project_subsystem, vector_fidelity, GraphSpec,
    OrthonormalBasis, Subsystem, WalkState, COIN1, COIN2, RESULT_TOL,
};
use crate::operators::{coin_matrix, evolve, CoinOp, StepSpec};
use crate::transfer::coin_for_step;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which protocol a plan implements, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TeleportKind {
    Line { n: usize },
    Cycle { d: usize },
    Complete { d: usize, t: usize },
    Regular { n: usize, d: usize, t: usize },
}

impl fmt::Display for TeleportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TeleportKind::Line { n } => write!(f, "line teleport n={n}"),
            TeleportKind::Cycle { d } => write!(f, "cycle teleport d={d}"),
            TeleportKind::Complete { d, t } => write!(f, "complete-graph teleport d={d} t={t}"),
            TeleportKind::Regular { n, d, t } => write!(f, "regular-graph teleport n={n} d={d} t={t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportPlan {
    pub kind: TeleportKind,
    pub arena: GraphSpec,
    /// Steps taken by each coin; the walk lasts `2 * half_steps` steps.
    pub half_steps: usize,
    pub coin2_init: Vec<Complex64>,
    pub position_basis: OrthonormalBasis,
    /// Outcome label reported for each position basis vector.
    pub position_markings: Vec<i64>,
    pub coin1_basis: OrthonormalBasis,
    pub coin1_markings: Vec<i64>,
}

impl TeleportPlan {
    pub fn line(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Target("line teleport needs n >= 2".into()));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::Parity(format!("line teleport needs an even step count, got {n}")));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let n = n as i64;
        let pair = |sign: f64| BTreeMap::from([(-n, Complex64::new(s, 0.0)), (n, Complex64::new(sign * s, 0.0))]);
        let position_basis = OrthonormalBasis::new(vec![BTreeMap::from([(0, ONE)]), pair(1.0), pair(-1.0)])?;
        Ok(TeleportPlan {
            kind: TeleportKind::Line { n: n as usize },
            arena: GraphSpec::Line,
            half_steps: n as usize / 2,
            coin2_init: vec![Complex64::new(s, 0.0); 2],
            position_basis,
            position_markings: vec![0, 1, -1],
            coin1_basis: OrthonormalBasis::plus_minus(),
            coin1_markings: vec![1, -1],
        })
    }

    pub fn cycle(d: usize) -> Result<Self> {
        if d < 4 || !d.is_multiple_of(4) {
            return Err(Error::Parity(format!("cycle teleport needs d divisible by 4 (d/4 steps per coin), got {d}")));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(TeleportPlan {
            kind: TeleportKind::Cycle { d },
            arena: GraphSpec::cycle(d)?,
            half_steps: d / 4,
            coin2_init: vec![Complex64::new(s, 0.0); 2],
            position_basis: OrthonormalBasis::computational([0, d as i64 / 2]),
            position_markings: vec![0, 1],
            coin1_basis: OrthonormalBasis::plus_minus(),
            coin1_markings: vec![1, -1],
        })
    }

    pub fn complete(d: usize, t: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Target(format!("complete-graph teleport needs d >= 2, got {d}")));
        }
        if t == 0 || t.gcd(&d) != 1 {
            return Err(Error::Coprimality(format!("gcd(t,d) must be 1, got t={t}, d={d}")));
        }
        Ok(TeleportPlan {
            kind: TeleportKind::Complete { d, t },
            arena: GraphSpec::complete(d)?,
            half_steps: t,
            coin2_init: uniform(d),
            position_basis: OrthonormalBasis::computational(0..d as i64),
            position_markings: (0..d as i64).collect(),
            coin1_basis: OrthonormalBasis::fourier(d),
            coin1_markings: (0..d as i64).collect(),
        })
    }

    pub fn regular(n: usize, d: usize, t: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Target(format!("regular-graph teleport needs d >= 2, got {d}")));
        }
        if n < 2 * d - 1 {
            return Err(Error::Arena(format!("regular-graph teleport needs n >= 2d-1 = {}, got n={n}", 2 * d - 1)));
        }
        if t == 0 || t.gcd(&n) != 1 {
            return Err(Error::Coprimality(format!("gcd(t,n) must be 1, got t={t}, n={n}")));
        }
        let labels = regular_labels(n, d, t);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut vectors = Vec::with_capacity(2 * d - 1);
        let mut markings = Vec::with_capacity(2 * d - 1);
        for k in 0..d - 1 {
            for (sign, mark) in [(1.0, k), (-1.0, d + k)] {
                vectors.push(BTreeMap::from([
                    (labels[k], Complex64::new(s, 0.0)),
                    (labels[d + k], Complex64::new(sign * s, 0.0)),
                ]));
                markings.push(mark as i64);
            }
        }
        vectors.push(BTreeMap::from([(labels[d - 1], ONE)]));
        markings.push(d as i64 - 1);
        Ok(TeleportPlan {
            kind: TeleportKind::Regular { n, d, t },
            arena: GraphSpec::circulant(n, d)?,
            half_steps: t,
            coin2_init: uniform(d),
            position_basis: OrthonormalBasis::new(vectors)?,
            position_markings: markings,
            coin1_basis: OrthonormalBasis::fourier(d),
            coin1_markings: (0..d as i64).collect(),
        })
    }

    pub fn coin_dim(&self) -> usize {
        self.arena.coin_dim()
    }

    pub fn step_count(&self) -> usize {
        2 * self.half_steps
    }

    /// Identity coins on alternating registers.
    pub fn steps(&self) -> Vec<StepSpec> {
        (1..=self.step_count()).map(|i| StepSpec::identity(self.arena, coin_for_step(i))).collect()
    }

    /// Vertices reached after the walk: the support of the position basis.
    pub fn position_labels(&self) -> Vec<i64> {
        let mut all: Vec<i64> = self.position_basis.vectors().iter().flat_map(|v| v.keys().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Correction on coin 2 for the outcome pair `(position, coin 1)`.
    pub fn correction(&self, position: i64, coin1: i64) -> Result<CoinOp> {
        let unknown = || Error::Label(format!("no outcome ({position}, {coin1}) in {}", self.kind));
        if !self.position_markings.contains(&position) || !self.coin1_markings.contains(&coin1) {
            return Err(unknown());
        }
        match self.kind {
            TeleportKind::Line { .. } => match (position, coin1) {
                (1, 1) | (-1, -1) => Ok(CoinOp::identity(2)),
                (-1, 1) | (1, -1) => pauli_z(),
                (0, 1) => Ok(CoinOp::pauli_x()),
                (0, -1) => z_times_x(),
                _ => Err(unknown()),
            },
            TeleportKind::Cycle { .. } => match (position, coin1) {
                (1, 1) => Ok(CoinOp::identity(2)),
                (1, -1) => pauli_z(),
                (0, 1) => Ok(CoinOp::pauli_x()),
                (0, -1) => z_times_x(),
                _ => Err(unknown()),
            },
            TeleportKind::Complete { d, t } => {
                let x = position as usize;
                let s = (mod_inverse(t, d) * x) % d;
                let tt = coin1 as usize;
                let m = DMatrix::from_fn(d, d, |k, col| if col == (s + d - k) % d { phase(k * tt, d) } else { ZERO });
                CoinOp::custom(m, format!("U[x={x},t~={tt}]"))
            }
            TeleportKind::Regular { d, .. } => {
                let mark = position as usize;
                let tt = coin1 as usize;
                // Which coin-2 value each coin-1 value m was paired with, and the sign.
                let (k, flip) = if mark == d - 1 {
                    (d - 1, false)
                } else if mark >= d {
                    (mark - d, true)
                } else {
                    (mark, false)
                };
                let m = DMatrix::from_fn(d, d, |row, col| {
                    let (source, negate) = if row <= k { (k - row, false) } else { (k + d - row, flip) };
                    if col != source {
                        ZERO
                    } else if negate {
                        -phase(row * tt, d)
                    } else {
                        phase(row * tt, d)
                    }
                });
                CoinOp::custom(m, format!("U[{mark},t~={tt}]"))
            }
        }
    }

    /// `|0> (x) input (x) coin2_init`.
    pub fn initial_state(&self, input: &[Complex64]) -> Result<WalkState> {
        let d = self.coin_dim();
        if input.len() != d {
            return Err(Error::SpaceMismatch(format!(
                "input has {} amplitudes, coin 1 has dimension {d}",
                input.len()
            )));
        }
        product_state(self.arena, 0, &[input.to_vec(), self.coin2_init.clone()])
    }
}

fn uniform(d: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d]
}

fn phase(k: usize, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64)
}

fn pauli_z() -> Result<CoinOp> {
    CoinOp::custom(DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]), "Z")
}

fn z_times_x() -> Result<CoinOp> {
    CoinOp::custom(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]), "ZX")
}

/// `v_r = t * r mod n` for `r = 0..2d-1`.
fn regular_labels(n: usize, d: usize, t: usize) -> Vec<i64> {
    (0..2 * d - 1).map(|r| ((t * r) % n) as i64).collect()
}

/// Inverse of `a` modulo `m`; callers guarantee `gcd(a, m) = 1`.
pub(crate) fn mod_inverse(a: usize, m: usize) -> usize {
    let e = (a as i64).extended_gcd(&(m as i64));
    e.x.rem_euclid(m as i64) as usize
}

/// Residues in `1..=n` coprime to `n`, ascending.
pub fn totient_set(n: usize) -> Vec<usize> {
    (1..=n.max(1)).filter(|x| x.gcd(&n) == 1).collect()
}

/// One joint outcome of the position and coin-1 measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    pub position_outcome: i64,
    /// Vertices spanned by the measured position basis vector.
    pub position_support: Vec<i64>,
    pub coin1_outcome: i64,
    pub probability: f64,
    /// Normalized coin-2 state before correction.
    pub post_coin2: Vec<Complex64>,
    pub correction: CoinOp,
    pub corrected: Vec<Complex64>,
    /// Fidelity of `corrected` with the input, up to global phase.
    pub fidelity: f64,
}

impl MeasurementBranch {
    pub fn passed(&self) -> bool {
        self.fidelity >= 1.0 - RESULT_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportRun {
    pub plan: TeleportPlan,
    pub input: Vec<Complex64>,
    /// `trace[i]` is the state after step `i`.
    pub trace: Vec<WalkState>,
    pub pre_measurement: WalkState,
    /// Every outcome with nonzero probability, position-major.
    pub branches: Vec<MeasurementBranch>,
}

impl TeleportRun {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(1.0, f64::min)
    }

    pub fn passed(&self) -> bool {
        (self.total_probability() - 1.0).abs() <= RESULT_TOL && self.branches.iter().all(|b| b.passed())
    }
}

/// Evolves, enumerates every measurement branch and applies its correction.
pub fn run_teleport(plan: &TeleportPlan, input: &[Complex64]) -> Result<TeleportRun> {
    let mut target = input.to_vec();
    if normalize(&mut target) == 0.0 {
        return Err(Error::ZeroState);
    }
    let initial = plan.initial_state(&target)?;
    let trace = evolve(&initial, &plan.steps())?;
    let pre_measurement = trace.last().expect("trace holds the initial state").clone();
    let expected = plan.position_labels();
    let reached: Vec<i64> = pre_measurement.positions().into_iter().collect();
    if reached.iter().any(|p| !expected.contains(p)) {
        return Err(Error::Coverage {
            missing: pre_measurement
                .terms()
                .filter(|(l, _)| !expected.contains(&l.position))
                .map(|(_, a)| a.norm_sqr())
                .sum(),
        });
    }

    let mut branches = Vec::new();
    for pos in project_subsystem(&pre_measurement, Subsystem::Position, &plan.position_basis)? {
        let pos_vec = plan.position_basis.vector(pos.index);
        for c1 in project_subsystem(&pos.post_state, Subsystem::Coin(COIN1), &plan.coin1_basis)? {
            let c1_vec = plan.coin1_basis.vector(c1.index);
            let mut post_coin2 = contract_to_coin(
                &c1.post_state,
                &[(Subsystem::Position, pos_vec), (Subsystem::Coin(COIN1), c1_vec)],
                COIN2,
            )?;
            normalize(&mut post_coin2);
            let position_outcome = plan.position_markings[pos.index];
            let coin1_outcome = plan.coin1_markings[c1.index];
            let correction = plan.correction(position_outcome, coin1_outcome)?;
            let corrected: Vec<Complex64> = (&coin_matrix(&correction)?
                * nalgebra::DVector::from_column_slice(&post_coin2))
            .iter()
            .copied()
            .collect();
            let fidelity = vector_fidelity(&corrected, &target);
            branches.push(MeasurementBranch {
                position_outcome,
                position_support: pos_vec.keys().copied().collect(),
                coin1_outcome,
                probability: pos.probability * c1.probability,
                post_coin2,
                correction,
                corrected,
                fidelity,
            });
        }
    }
    Ok(TeleportRun { plan: plan.clone(), input: target, trace, pre_measurement, branches })
}

pub fn teleport_line(n: usize, input: &[Complex64]) -> Result<TeleportRun> {
    run_teleport(&TeleportPlan::line(n)?, input)
}

pub fn teleport_cycle(d: usize, input: &[Complex64]) -> Result<TeleportRun> {
    run_teleport(&TeleportPlan::cycle(d)?, input)
}

pub fn teleport_complete(d: usize, t: usize, input: &[Complex64]) -> Result<TeleportRun> {
    run_teleport(&TeleportPlan::complete(d, t)?, input)
}

pub fn teleport_regular(n: usize, d: usize, t: usize, input: &[Complex64]) -> Result<TeleportRun> {
    run_teleport(&TeleportPlan::regular(n, d, t)?, input)
}

/// Draws one branch with the Born probabilities.
pub fn sample_branch(run: &TeleportRun, seed: u64) -> &MeasurementBranch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random::<f64>() * run.total_probability();
    let mut acc = 0.0;
    for b in &run.branches {
        acc += b.probability;
        if u < acc {
            return b;
        }
    }
    run.branches.last().expect("a run has at least one branch")
}

/// Fourier vector `|t~>` on coin 1, as used by the qudit protocols.
pub fn coin1_fourier(d: usize, t_tilde: usize) -> Vec<Complex64> {
    fourier_vector(d, t_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_state, BasisLabel};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const AB: [Complex64; 2] = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];

    #[test]
    fn line_pre_measurement_for_n_2() {
        let run = teleport_line(2, &AB).unwrap();
        let (a, b) = (AB[0], AB[1]);
        let want = make_state(
            GraphSpec::Line,
            &[2, 2],
            [
                (BasisLabel::new(0, vec![0, 1]), a),
                (BasisLabel::new(0, vec![1, 0]), b),
                (BasisLabel::new(-2, vec![1, 1]), b),
                (BasisLabel::new(2, vec![0, 0]), a),
            ],
        )
        .unwrap();
        assert!(run.pre_measurement.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn line_branch_zero_plus_needs_x() {
        let run = teleport_line(2, &AB).unwrap();
        let b = run.branches.iter().find(|b| b.position_outcome == 0 && b.coin1_outcome == 1).unwrap();
        assert!(vector_fidelity(&b.post_coin2, &[AB[1], AB[0]]) > 1.0 - 1e-12);
        assert_eq!(b.correction, CoinOp::pauli_x());
    }

    #[test]
    fn line_six_branches() {
        let run = teleport_line(10, &AB).unwrap();
        assert_eq!(run.branches.len(), 6);
        assert!(run.passed());
        let mut probs: Vec<f64> = run.branches.iter().map(|b| b.probability).collect();
        probs.sort_by(f64::total_cmp);
        for (p, want) in probs.iter().zip([0.125, 0.125, 0.125, 0.125, 0.25, 0.25]) {
            assert!((p - want).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_line_rejected() {
        assert!(matches!(TeleportPlan::line(3), Err(Error::Parity(_))));
    }

    #[test]
    fn cycle_two_positions() {
        let run = teleport_cycle(8, &AB).unwrap();
        assert_eq!(run.pre_measurement.positions().into_iter().collect::<Vec<_>>(), vec![0, 4]);
        assert_eq!(run.branches.len(), 4);
        assert!(run.passed());
        assert!(matches!(TeleportPlan::cycle(6), Err(Error::Parity(_))));
    }

    #[test]
    fn complete_branches() {
        let input = [c(0.5, 0.1), c(-0.3, 0.6), c(0.2, -0.4), c(0.1, 0.2), c(0.0, -0.1)];
        let run = teleport_complete(5, 3, &input).unwrap();
        assert_eq!(run.branches.len(), 25);
        for b in &run.branches {
            assert!((b.probability - 1.0 / 25.0).abs() < 1e-12);
        }
        assert!(run.passed());
        assert!(matches!(TeleportPlan::complete(4, 2), Err(Error::Coprimality(_))));
    }

    #[test]
    fn regular_branches() {
        let input = [c(0.5, 0.1), c(-0.3, 0.6), c(0.2, -0.4)];
        let run = teleport_regular(9, 3, 2, &input).unwrap();
        assert_eq!(run.pre_measurement.positions().len(), 5);
        assert_eq!(run.branches.len(), 15);
        assert!(run.passed(), "min fidelity {}", run.min_fidelity());
        assert!(matches!(TeleportPlan::regular(4, 3, 1), Err(Error::Arena(_))));
        assert!(matches!(TeleportPlan::regular(9, 3, 3), Err(Error::Coprimality(_))));
    }

    #[test]
    fn totients() {
        assert_eq!(totient_set(6), vec![1, 5]);
        assert_eq!(totient_set(9), vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(totient_set(1), vec![1]);
    }

    #[test]
    fn inverse_mod() {
        assert_eq!(mod_inverse(3, 5), 2);
        assert_eq!(mod_inverse(1, 2), 1);
    }

    #[test]
    fn sampling_is_deterministic() {
        let run = teleport_line(4, &AB).unwrap();
        let a = sample_branch(&run, 7);
        let b = sample_branch(&run, 7);
        assert_eq!(a, b);
    }
}
