//! Pure states of a walker carrying one or more coin registers.
//!
//! A [`WalkState`] is a sparse map from basis labels `(position, coin_1, ..., coin_M)`
//! to complex amplitudes. Labels are kept in a `BTreeMap`, so iteration order is
//! deterministic: ascending position, then ascending coin values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped after every step.
pub const PRUNE_THRESHOLD: f64 = 1e-14;
/// Absolute tolerance for protocol results (fidelities, norms, probabilities).
pub const RESULT_TOL: f64 = 1e-10;
/// Absolute tolerance for agreement with the dense oracle.
pub const ORACLE_TOL: f64 = 1e-12;

/// Index of the first coin register.
pub const COIN1: usize = 0;
/// Index of the second coin register.
pub const COIN2: usize = 1;

/// The arena the walker moves on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    /// The unbounded integer line.
    Line,
    /// A ring of `vertices` sites.
    Cycle { vertices: usize },
    /// The complete graph on `vertices` sites with a loop at every vertex.
    CompleteWithLoops { vertices: usize },
    /// Vertex `k` joined to `(k + j) mod vertices` for `j` in `0..degree`.
    Circulant { vertices: usize, degree: usize },
}

impl GraphSpec {
    pub fn line() -> Self {
        GraphSpec::Line
    }

    pub fn cycle(vertices: usize) -> Result<Self> {
        let g = GraphSpec::Cycle { vertices };
        g.validate()?;
        Ok(g)
    }

    pub fn complete(vertices: usize) -> Result<Self> {
        let g = GraphSpec::CompleteWithLoops { vertices };
        g.validate()?;
        Ok(g)
    }

    pub fn circulant(vertices: usize, degree: usize) -> Result<Self> {
        let g = GraphSpec::Circulant { vertices, degree };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphSpec::Line => Ok(()),
            GraphSpec::Cycle { vertices } if vertices < 3 => {
                Err(Error::Arena(format!("a cycle needs at least 3 vertices, got {vertices}")))
            }
            GraphSpec::CompleteWithLoops { vertices } if vertices < 1 => {
                Err(Error::Arena("complete graph needs at least one vertex".into()))
            }
            GraphSpec::Circulant { vertices, degree } if degree < 1 || degree > vertices => Err(Error::Arena(format!(
                "circulant graph needs 1 <= degree <= vertices, got n={vertices}, d={degree}"
            ))),
            _ => Ok(()),
        }
    }

    /// Number of vertices, `None` for the line.
    pub fn vertices(&self) -> Option<usize> {
        match *self {
            GraphSpec::Line => None,
            GraphSpec::Cycle { vertices }
            | GraphSpec::CompleteWithLoops { vertices }
            | GraphSpec::Circulant { vertices, .. } => Some(vertices),
        }
    }

    /// Dimension every coin register must have on this arena.
    pub fn coin_dim(&self) -> usize {
        match *self {
            GraphSpec::Line | GraphSpec::Cycle { .. } => 2,
            GraphSpec::CompleteWithLoops { vertices } => vertices,
            GraphSpec::Circulant { degree, .. } => degree,
        }
    }

    pub fn contains(&self, position: i64) -> bool {
        match self.vertices() {
            None => true,
            Some(v) => position >= 0 && (position as u64) < v as u64,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, GraphSpec::Line)
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphSpec::Line => write!(f, "line"),
            GraphSpec::Cycle { vertices } => write!(f, "cycle({vertices})"),
            GraphSpec::CompleteWithLoops { vertices } => write!(f, "complete({vertices})"),
            GraphSpec::Circulant { vertices, degree } => {
                write!(f, "circulant(n={vertices}, d={degree})")
            }
        }
    }
}

/// One computational basis vector `|position>|coin_1>...|coin_M>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub position: i64,
    pub coins: Vec<usize>,
}

impl BasisLabel {
    pub fn new(position: i64, coins: impl Into<Vec<usize>>) -> Self {
        BasisLabel { position, coins: coins.into() }
    }

    /// Value of the given subsystem for this label.
    pub fn value(&self, subsystem: Subsystem) -> i64 {
        match subsystem {
            Subsystem::Position => self.position,
            Subsystem::Coin(m) => self.coins[m] as i64,
        }
    }

    fn check(&self, arena: &GraphSpec, coin_dims: &[usize]) -> Result<()> {
        if !arena.contains(self.position) {
            return Err(Error::Label(format!("position {} outside {arena}", self.position)));
        }
        if self.coins.len() != coin_dims.len() {
            return Err(Error::Label(format!("expected {} coin values, got {}", coin_dims.len(), self.coins.len())));
        }
        for (m, (&c, &dim)) in self.coins.iter().zip(coin_dims).enumerate() {
            if c >= dim {
                return Err(Error::Label(format!("coin {} value {c} outside dimension {dim}", m + 1)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}>", self.position)?;
        for c in &self.coins {
            write!(f, "|{c}>")?;
        }
        Ok(())
    }
}

/// Exact pure state of walker and coins.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    arena: GraphSpec,
    coin_dims: Vec<usize>,
    amplitudes: BTreeMap<BasisLabel, Complex64>,
}

/// Builds a normalized state from a list of terms. Repeated labels are summed
/// before normalizing.
pub fn make_state(
    arena: GraphSpec,
    coin_dims: &[usize],
    terms: impl IntoIterator<Item = (BasisLabel, Complex64)>,
) -> Result<WalkState> {
    arena.validate()?;
    check_coin_dims(&arena, coin_dims)?;
    let mut amplitudes: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
    for (label, amp) in terms {
        label.check(&arena, coin_dims)?;
        *amplitudes.entry(label).or_default() += amp;
    }
    let norm = amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroState);
    }
    for a in amplitudes.values_mut() {
        *a /= norm;
    }
    Ok(WalkState::from_parts(arena, coin_dims.to_vec(), amplitudes))
}

/// Product state `|position> (x) coin_1 (x) ... (x) coin_M` from dense coin vectors.
pub fn product_state(arena: GraphSpec, position: i64, coins: &[Vec<Complex64>]) -> Result<WalkState> {
    let coin_dims: Vec<usize> = coins.iter().map(Vec::len).collect();
    let mut terms = vec![(BasisLabel::new(position, Vec::new()), Complex64::new(1.0, 0.0))];
    for coin in coins {
        let mut next = Vec::with_capacity(terms.len() * coin.len());
        for (label, amp) in &terms {
            for (j, &c) in coin.iter().enumerate() {
                if c != Complex64::new(0.0, 0.0) {
                    let mut l = label.clone();
                    l.coins.push(j);
                    next.push((l, amp * c));
                }
            }
        }
        terms = next;
    }
    make_state(arena, &coin_dims, terms)
}

fn check_coin_dims(arena: &GraphSpec, coin_dims: &[usize]) -> Result<()> {
    if coin_dims.is_empty() {
        return Err(Error::SpaceMismatch("at least one coin is required".into()));
    }
    let want = arena.coin_dim();
    if let Some(&bad) = coin_dims.iter().find(|&&d| d != want) {
        return Err(Error::SpaceMismatch(format!("{arena} needs {want}-dimensional coins, got {bad}")));
    }
    Ok(())
}

impl WalkState {
    /// Assembles a state from already valid parts, dropping dust amplitudes.
    /// No normalization is applied.
    pub(crate) fn from_parts(
        arena: GraphSpec,
        coin_dims: Vec<usize>,
        mut amplitudes: BTreeMap<BasisLabel, Complex64>,
    ) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        WalkState { arena, coin_dims, amplitudes }
    }

    pub fn arena(&self) -> GraphSpec {
        self.arena
    }

    pub fn coin_dims(&self) -> &[usize] {
        &self.coin_dims
    }

    pub fn num_coins(&self) -> usize {
        self.coin_dims.len()
    }

    /// Nonzero terms in ascending label order.
    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amplitudes.get(label).copied().unwrap_or_default()
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Distinct walker positions carrying amplitude.
    pub fn positions(&self) -> BTreeSet<i64> {
        self.amplitudes.keys().map(|l| l.position).collect()
    }

    pub fn check_same_space(&self, other: &WalkState) -> Result<()> {
        if self.arena != other.arena || self.coin_dims != other.coin_dims {
            return Err(Error::SpaceMismatch(format!(
                "{} with coins {:?} vs {} with coins {:?}",
                self.arena, self.coin_dims, other.arena, other.coin_dims
            )));
        }
        Ok(())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &WalkState) -> Result<f64> {
        self.check_same_space(other)?;
        let mut acc = 0.0;
        for (label, a) in &self.amplitudes {
            acc += (a - other.amplitude(label)).norm_sqr();
        }
        for (label, b) in &other.amplitudes {
            if !self.amplitudes.contains_key(label) {
                acc += b.norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> WalkState {
        let amplitudes = self.amplitudes.iter().map(|(l, a)| (l.clone(), a * factor)).collect();
        WalkState::from_parts(self.arena, self.coin_dims.clone(), amplitudes)
    }

    /// Moves every term by `offset` positions. Only meaningful on the line.
    pub fn translated(&self, offset: i64) -> Result<WalkState> {
        if !self.arena.is_line() {
            return Err(Error::Arena(format!("translation is only defined on the line, not {}", self.arena)));
        }
        let amplitudes =
            self.amplitudes.iter().map(|(l, a)| (BasisLabel::new(l.position + offset, l.coins.clone()), *a)).collect();
        Ok(WalkState::from_parts(self.arena, self.coin_dims.clone(), amplitudes))
    }

    /// Applies a matrix to one coin register. The matrix must be `dim x dim`
    /// for that coin; unitarity is the caller's business.
    pub fn apply_coin_matrix(&self, coin: usize, matrix: &nalgebra::DMatrix<Complex64>) -> Result<WalkState> {
        let dim = *self.coin_dims.get(coin).ok_or_else(|| Error::SpaceMismatch(format!("no coin {}", coin + 1)))?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::SpaceMismatch(format!(
                "{}x{} matrix on a {dim}-dimensional coin",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut out: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for (label, amp) in &self.amplitudes {
            let c = label.coins[coin];
            for r in 0..dim {
                let m = matrix[(r, c)];
                if m != Complex64::new(0.0, 0.0) {
                    let mut l = label.clone();
                    l.coins[coin] = r;
                    *out.entry(l).or_default() += m * amp;
                }
            }
        }
        Ok(WalkState::from_parts(self.arena, self.coin_dims.clone(), out))
    }
}

impl fmt::Display for WalkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, a) in &self.amplitudes {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i){label}", a.re, a.im)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `<u|v>`, summed over the union of supports.
pub fn inner_product(u: &WalkState, v: &WalkState) -> Result<Complex64> {
    u.check_same_space(v)?;
    let (small, large, conj_small) =
        if u.amplitudes.len() <= v.amplitudes.len() { (u, v, true) } else { (v, u, false) };
    let mut acc = Complex64::new(0.0, 0.0);
    for (label, a) in &small.amplitudes {
        if let Some(b) = large.amplitudes.get(label) {
            acc += if conj_small { a.conj() * b } else { b.conj() * a };
        }
    }
    Ok(acc)
}

/// `|<u|v>|^2`; one exactly when the states agree up to a global phase.
pub fn fidelity_up_to_phase(u: &WalkState, v: &WalkState) -> Result<f64> {
    Ok(inner_product(u, v)?.norm_sqr())
}

/// Dense-vector counterpart of [`fidelity_up_to_phase`].
pub fn vector_fidelity(u: &[Complex64], v: &[Complex64]) -> f64 {
    let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    ip.norm_sqr()
}

/// Normalizes a dense vector in place and returns its original norm.
pub fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in v.iter_mut() {
            *a /= norm;
        }
    }
    norm
}

/// Haar-like random vector: `2 * dim` standard normals, paired and normalized.
pub fn random_coin_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        if normalize(&mut v) > 1e-6 {
            return v;
        }
    }
}

/// A part of the composite system that can be measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    Position,
    Coin(usize),
}

/// A set of orthonormal vectors over one subsystem, each stored sparsely as
/// `value -> component`.
///
/// The set need not span the whole subsystem: measuring with it is allowed as
/// long as the unspanned part of the state carries no amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<BTreeMap<i64, Complex64>>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<BTreeMap<i64, Complex64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Basis("empty basis".into()));
        }
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate().skip(i) {
                let ip: Complex64 = u.iter().filter_map(|(k, a)| v.get(k).map(|b| a.conj() * b)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (ip - want).norm() > RESULT_TOL {
                    return Err(Error::Basis(format!("<b{i}|b{j}> = {:.3e}{:+.3e}i", ip.re, ip.im)));
                }
            }
        }
        Ok(OrthonormalBasis { vectors })
    }

    /// Computational basis vectors `|v>` for each listed value.
    pub fn computational(values: impl IntoIterator<Item = i64>) -> Self {
        let vectors = values.into_iter().map(|v| BTreeMap::from([(v, Complex64::new(1.0, 0.0))])).collect();
        OrthonormalBasis { vectors }
    }

    /// `{|+>, |->}` on a qubit.
    pub fn plus_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        OrthonormalBasis {
            vectors: vec![
                BTreeMap::from([(0, Complex64::new(s, 0.0)), (1, Complex64::new(s, 0.0))]),
                BTreeMap::from([(0, Complex64::new(s, 0.0)), (1, Complex64::new(-s, 0.0))]),
            ],
        }
    }

    /// Fourier basis `|k~> = sum_m exp(2 pi i m k / d) |m> / sqrt(d)`, `k = 0..d`.
    pub fn fourier(d: usize) -> Self {
        let vectors = (0..d)
            .map(|k| fourier_vector(d, k).into_iter().enumerate().map(|(m, a)| (m as i64, a)).collect())
            .collect();
        OrthonormalBasis { vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, index: usize) -> &BTreeMap<i64, Complex64> {
        &self.vectors[index]
    }

    pub fn vectors(&self) -> &[BTreeMap<i64, Complex64>] {
        &self.vectors
    }
}

/// Dense Fourier vector `|k~>` of dimension `d`.
pub fn fourier_vector(d: usize, k: usize) -> Vec<Complex64> {
    let norm = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|m| {
            let angle = 2.0 * std::f64::consts::PI * ((m * k) % d) as f64 / d as f64;
            Complex64::from_polar(norm, angle)
        })
        .collect()
}

/// One outcome of a projective measurement on a subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionOutcome {
    /// Index into the measurement basis.
    pub index: usize,
    pub probability: f64,
    /// Normalized state after the projection; the measured subsystem is left in
    /// the basis vector that was found.
    pub post_state: WalkState,
}

/// Projectively measures `subsystem` in `basis`.
///
/// Outcomes with zero probability are omitted. Fails with
/// [`Error::Coverage`] when the state has weight outside the span of the basis.
pub fn project_subsystem(
    state: &WalkState,
    subsystem: Subsystem,
    basis: &OrthonormalBasis,
) -> Result<Vec<ProjectionOutcome>> {
    if let Subsystem::Coin(m) = subsystem {
        let dim = *state.coin_dims.get(m).ok_or_else(|| Error::SpaceMismatch(format!("no coin {}", m + 1)))?;
        for v in &basis.vectors {
            if v.keys().any(|&k| k < 0 || k as usize >= dim) {
                return Err(Error::Basis(format!("basis vector leaves the {dim}-dimensional coin {}", m + 1)));
            }
        }
    }
    // Group the state by the remaining degrees of freedom: for every "rest"
    // label, the amplitudes indexed by the measured value.
    let mut grouped: BTreeMap<BasisLabel, BTreeMap<i64, Complex64>> = BTreeMap::new();
    for (label, amp) in &state.amplitudes {
        let value = label.value(subsystem);
        let mut rest = label.clone();
        match subsystem {
            Subsystem::Position => rest.position = 0,
            Subsystem::Coin(m) => rest.coins[m] = 0,
        }
        grouped.entry(rest).or_default().insert(value, *amp);
    }

    let mut outcomes = Vec::new();
    let mut total = 0.0;
    for (index, b) in basis.vectors.iter().enumerate() {
        // (<b| (x) I)|psi>, keyed by the rest label.
        let mut reduced: Vec<(&BasisLabel, Complex64)> = Vec::new();
        for (rest, slice) in &grouped {
            let amp: Complex64 = b.iter().filter_map(|(k, bk)| slice.get(k).map(|a| bk.conj() * a)).sum();
            if amp.norm() >= PRUNE_THRESHOLD {
                reduced.push((rest, amp));
            }
        }
        let probability: f64 = reduced.iter().map(|(_, a)| a.norm_sqr()).sum();
        total += probability;
        if probability <= PRUNE_THRESHOLD * PRUNE_THRESHOLD {
            continue;
        }
        let scale = 1.0 / probability.sqrt();
        let mut post: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for (rest, amp) in &reduced {
            for (&value, bk) in b {
                let mut label = (*rest).clone();
                match subsystem {
                    Subsystem::Position => label.position = value,
                    Subsystem::Coin(m) => label.coins[m] = value as usize,
                }
                post.insert(label, bk * amp * scale);
            }
        }
        outcomes.push(ProjectionOutcome {
            index,
            probability,
            post_state: WalkState::from_parts(state.arena, state.coin_dims.clone(), post),
        });
    }
    let norm = state.norm_sqr();
    if (total - norm).abs() > RESULT_TOL {
        return Err(Error::Coverage { missing: norm - total });
    }
    Ok(outcomes)
}

/// Contracts every subsystem except coin `keep` against the given bra vectors
/// and returns the unnormalized vector left on coin `keep`.
///
/// `fixed` must name the position and every other coin exactly once.
pub fn contract_to_coin(
    state: &WalkState,
    fixed: &[(Subsystem, &BTreeMap<i64, Complex64>)],
    keep: usize,
) -> Result<Vec<Complex64>> {
    let dim = *state.coin_dims.get(keep).ok_or_else(|| Error::SpaceMismatch(format!("no coin {}", keep + 1)))?;
    let expected = state.num_coins();
    let mut seen: BTreeSet<Subsystem> = BTreeSet::new();
    for (s, _) in fixed {
        if *s == Subsystem::Coin(keep) || !seen.insert(*s) {
            return Err(Error::Contract(format!("subsystem {s:?} fixed twice or kept")));
        }
    }
    if seen.len() != expected {
        return Err(Error::Contract(format!("expected {expected} fixed subsystems, got {}", seen.len())));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    'terms: for (label, amp) in &state.amplitudes {
        let mut coeff = *amp;
        for (s, bra) in fixed {
            match bra.get(&label.value(*s)) {
                Some(b) => coeff *= b.conj(),
                None => continue 'terms,
            }
        }
        out[label.coins[keep]] += coeff;
    }
    Ok(out)
}

impl PartialOrd for Subsystem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subsystem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |s: &Subsystem| match s {
            Subsystem::Position => (0, 0),
            Subsystem::Coin(m) => (1, *m),
        };
        key(self).cmp(&key(other))
    }
}
