//! Coin operators, coin-conditioned shifts and the single-coin walk step.
//!
//! One step flips coin `m` with its coin operator and then moves the walker
//! according to the new value of coin `m`; the other coins are spectators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{BasisLabel, GraphSpec, WalkState, RESULT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum CoinKind {
    Identity,
    PauliX,
    /// `|j> -> |(j + 1) mod d>`
    CyclicShift,
    /// `|j> -> |(j - 1) mod d>`
    CyclicShiftInverse,
    /// `|k> -> sum_m exp(2 pi i m k / d) |m> / sqrt(d)`
    Fourier,
    Custom {
        matrix: DMatrix<Complex64>,
        name: String,
    },
}

/// A unitary acting on a single coin register.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOp {
    dim: usize,
    kind: CoinKind,
}

impl CoinOp {
    pub fn identity(dim: usize) -> Self {
        CoinOp { dim, kind: CoinKind::Identity }
    }

    pub fn pauli_x() -> Self {
        CoinOp { dim: 2, kind: CoinKind::PauliX }
    }

    pub fn cyclic_shift(dim: usize) -> Self {
        CoinOp { dim, kind: CoinKind::CyclicShift }
    }

    pub fn cyclic_shift_inverse(dim: usize) -> Self {
        CoinOp { dim, kind: CoinKind::CyclicShiftInverse }
    }

    pub fn fourier(dim: usize) -> Self {
        CoinOp { dim, kind: CoinKind::Fourier }
    }

    /// Wraps an explicit matrix; rejects anything that is not square and unitary.
    pub fn custom(matrix: DMatrix<Complex64>, name: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::SpaceMismatch(format!(
                "coin matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = unitarity_defect(&matrix);
        if defect > RESULT_TOL {
            return Err(Error::Unitarity { defect });
        }
        Ok(CoinOp { dim: matrix.nrows(), kind: CoinKind::Custom { matrix, name: name.into() } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &CoinKind {
        &self.kind
    }

    pub fn is_identity(&self) -> bool {
        match &self.kind {
            CoinKind::Identity => true,
            CoinKind::CyclicShift | CoinKind::CyclicShiftInverse => self.dim == 1,
            CoinKind::Custom { matrix, .. } => *matrix == DMatrix::identity(self.dim, self.dim),
            _ => false,
        }
    }

    /// Short name used in reports, e.g. `I`, `X`, `X_3`, `X_3^-1`, `F_4`.
    pub fn name(&self) -> String {
        match &self.kind {
            CoinKind::Identity => "I".into(),
            CoinKind::PauliX => "X".into(),
            CoinKind::CyclicShift => format!("X_{}", self.dim),
            CoinKind::CyclicShiftInverse => format!("X_{}^-1", self.dim),
            CoinKind::Fourier => format!("F_{}", self.dim),
            CoinKind::Custom { name, .. } => name.clone(),
        }
    }

    /// Nonzero entries `(row, value)` of column `col`.
    pub fn column(&self, col: usize) -> Vec<(usize, Complex64)> {
        let d = self.dim;
        match &self.kind {
            CoinKind::Identity => vec![(col, ONE)],
            CoinKind::PauliX => vec![(1 - col, ONE)],
            CoinKind::CyclicShift => vec![((col + 1) % d, ONE)],
            CoinKind::CyclicShiftInverse => vec![((col + d - 1) % d, ONE)],
            CoinKind::Fourier => {
                let norm = 1.0 / (d as f64).sqrt();
                (0..d).map(|m| (m, Complex64::from_polar(norm, 2.0 * PI * ((m * col) % d) as f64 / d as f64))).collect()
            }
            CoinKind::Custom { matrix, .. } => (0..d)
                .filter_map(|r| {
                    let v = matrix[(r, col)];
                    (v != ZERO).then_some((r, v))
                })
                .collect(),
        }
    }

    pub fn inverse(&self) -> CoinOp {
        let kind = match &self.kind {
            CoinKind::Identity => CoinKind::Identity,
            CoinKind::PauliX => CoinKind::PauliX,
            CoinKind::CyclicShift => CoinKind::CyclicShiftInverse,
            CoinKind::CyclicShiftInverse => CoinKind::CyclicShift,
            CoinKind::Fourier => {
                CoinKind::Custom { matrix: fourier_matrix(self.dim).adjoint(), name: format!("F_{}^-1", self.dim) }
            }
            CoinKind::Custom { matrix, name } => {
                CoinKind::Custom { matrix: matrix.adjoint(), name: format!("({name})^-1") }
            }
        };
        CoinOp { dim: self.dim, kind }
    }

    /// `self` after `first`, i.e. the matrix product `self * first`.
    pub fn compose(&self, first: &CoinOp) -> Result<CoinOp> {
        if self.dim != first.dim {
            return Err(Error::SpaceMismatch(format!(
                "cannot compose {}-dimensional and {}-dimensional coin operators",
                self.dim, first.dim
            )));
        }
        if first.is_identity() {
            return Ok(self.clone());
        }
        if self.is_identity() {
            return Ok(first.clone());
        }
        let product = coin_matrix(self)? * coin_matrix(first)?;
        if product == DMatrix::identity(self.dim, self.dim) {
            return Ok(CoinOp::identity(self.dim));
        }
        CoinOp::custom(product, format!("{}{}", self.name(), first.name()))
    }
}

impl fmt::Display for CoinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn fourier_matrix(d: usize) -> DMatrix<Complex64> {
    let norm = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |m, k| Complex64::from_polar(norm, 2.0 * PI * ((m * k) % d) as f64 / d as f64))
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let g = m.adjoint() * m - DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Explicit matrix of a coin operator.
pub fn coin_matrix(op: &CoinOp) -> Result<DMatrix<Complex64>> {
    let d = op.dim;
    let m = match &op.kind {
        CoinKind::Fourier => fourier_matrix(d),
        CoinKind::Custom { matrix, .. } => {
            let defect = unitarity_defect(matrix);
            if defect > RESULT_TOL {
                return Err(Error::Unitarity { defect });
            }
            matrix.clone()
        }
        _ => {
            let mut m = DMatrix::from_element(d, d, ZERO);
            for col in 0..d {
                for (row, v) in op.column(col) {
                    m[(row, col)] = v;
                }
            }
            m
        }
    };
    Ok(m)
}

/// Coin-conditioned position update for one arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftOp {
    arena: GraphSpec,
}

pub fn shift_for(arena: GraphSpec) -> ShiftOp {
    ShiftOp { arena }
}

impl ShiftOp {
    pub fn arena(&self) -> GraphSpec {
        self.arena
    }

    /// Where a walker at `position` goes when the controlling coin reads `coin`.
    pub fn target(&self, position: i64, coin: usize) -> i64 {
        match self.arena {
            GraphSpec::Line => {
                if coin == 0 {
                    position + 1
                } else {
                    position - 1
                }
            }
            GraphSpec::Cycle { vertices } => {
                let d = vertices as i64;
                let step = if coin == 0 { 1 } else { -1 };
                (position + step).rem_euclid(d)
            }
            GraphSpec::CompleteWithLoops { vertices: n } | GraphSpec::Circulant { vertices: n, .. } => {
                (position + coin as i64).rem_euclid(n as i64)
            }
        }
    }

    /// Inverse of [`ShiftOp::target`] for a fixed coin value.
    pub fn source(&self, position: i64, coin: usize) -> i64 {
        match self.arena {
            GraphSpec::Line => {
                if coin == 0 {
                    position - 1
                } else {
                    position + 1
                }
            }
            GraphSpec::Cycle { vertices } => {
                let step = if coin == 0 { -1 } else { 1 };
                (position + step).rem_euclid(vertices as i64)
            }
            GraphSpec::CompleteWithLoops { vertices: n } | GraphSpec::Circulant { vertices: n, .. } => {
                (position - coin as i64).rem_euclid(n as i64)
            }
        }
    }

    /// Applies the shift controlled by coin `active`.
    pub fn apply(&self, state: &WalkState, active: usize) -> Result<WalkState> {
        self.permute(state, active, false)
    }

    pub fn apply_inverse(&self, state: &WalkState, active: usize) -> Result<WalkState> {
        self.permute(state, active, true)
    }

    fn permute(&self, state: &WalkState, active: usize, inverse: bool) -> Result<WalkState> {
        if state.arena() != self.arena {
            return Err(Error::SpaceMismatch(format!(
                "shift for {} applied to a state on {}",
                self.arena,
                state.arena()
            )));
        }
        if active >= state.num_coins() {
            return Err(Error::SpaceMismatch(format!("no coin {}", active + 1)));
        }
        let amplitudes = state
            .terms()
            .map(|(l, a)| {
                let c = l.coins[active];
                let p = if inverse { self.source(l.position, c) } else { self.target(l.position, c) };
                (BasisLabel::new(p, l.coins.clone()), *a)
            })
            .collect();
        Ok(WalkState::from_parts(state.arena(), state.coin_dims().to_vec(), amplitudes))
    }
}

/// One walk step `W_m`: coin operator on coin `active_coin`, then the shift
/// controlled by that coin.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSpec {
    pub active_coin: usize,
    pub coin_op: CoinOp,
    pub shift: ShiftOp,
}

impl StepSpec {
    pub fn new(arena: GraphSpec, active_coin: usize, coin_op: CoinOp) -> Self {
        StepSpec { active_coin, coin_op, shift: shift_for(arena) }
    }

    pub fn identity(arena: GraphSpec, active_coin: usize) -> Self {
        StepSpec::new(arena, active_coin, CoinOp::identity(arena.coin_dim()))
    }

    fn check(&self, state: &WalkState) -> Result<()> {
        let dim = *state.coin_dims().get(self.active_coin).ok_or_else(|| {
            Error::SpaceMismatch(format!(
                "step acts on coin {} but the state has {} coins",
                self.active_coin + 1,
                state.num_coins()
            ))
        })?;
        if self.coin_op.dim() != dim {
            return Err(Error::SpaceMismatch(format!(
                "{}-dimensional coin operator on a {dim}-dimensional coin",
                self.coin_op.dim()
            )));
        }
        if self.shift.arena() != state.arena() {
            return Err(Error::SpaceMismatch(format!(
                "step built for {} applied on {}",
                self.shift.arena(),
                state.arena()
            )));
        }
        Ok(())
    }
}

/// Applies one walk step to every term of `state`.
pub fn apply_step(state: &WalkState, step: &StepSpec) -> Result<WalkState> {
    step.check(state)?;
    let m = step.active_coin;
    let mut out: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
    for (label, amp) in state.terms() {
        for (c, coeff) in step.coin_op.column(label.coins[m]) {
            let mut coins = label.coins.clone();
            coins[m] = c;
            let position = step.shift.target(label.position, c);
            *out.entry(BasisLabel::new(position, coins)).or_default() += coeff * amp;
        }
    }
    Ok(WalkState::from_parts(state.arena(), state.coin_dims().to_vec(), out))
}

/// Applies a sequence of steps, returning every intermediate state including
/// the input.
pub fn evolve(state: &WalkState, steps: &[StepSpec]) -> Result<Vec<WalkState>> {
    let mut trace = Vec::with_capacity(steps.len() + 1);
    trace.push(state.clone());
    for step in steps {
        let next = apply_step(trace.last().expect("trace is never empty"), step)?;
        trace.push(next);
    }
    Ok(trace)
}

/// `|| W_2 W_1 psi - W_1 W_2 psi ||` for steps on different coins.
pub fn commutator_check(state: &WalkState, s1: &StepSpec, s2: &StepSpec) -> Result<f64> {
    if s1.active_coin == s2.active_coin {
        return Err(Error::Contract(format!(
            "both steps act on coin {}; commutation is only claimed for distinct coins",
            s1.active_coin + 1
        )));
    }
    let a = apply_step(&apply_step(state, s1)?, s2)?;
    let b = apply_step(&apply_step(state, s2)?, s1)?;
    a.distance(&b)
}
