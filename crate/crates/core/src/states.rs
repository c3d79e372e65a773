//! Multiqubit pure and mixed states, local operators, reductions and Schmidt analysis.
//!
//! Amplitude index `i` encodes the bit string `i_0 i_1 ... i_{N-1}` with qubit 0 as the
//! most significant bit, so `|i_0, i_1, ..., i_{N-1}>` reads left to right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64, Mat, Mat2, ONE, ZERO};

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Largest register for exhaustive bipartition scans.
pub const DEFAULT_N_CAP: usize = 12;

const NORMALIZED_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Parameter("a state needs at least one qubit".into()));
        }
        if n_qubits > 24 {
            return Err(Error::Resource(n_qubits, 24));
        }
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::Dimension { expected, actual: amplitudes.len() });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_qubits];
        if index >= amps.len() {
            return Err(Error::Parameter(format!("basis index {index} out of range")));
        }
        amps[index] = ONE;
        Self::new(n_qubits, amps)
    }

    /// Builds a state from (bit string, amplitude) pairs, e.g. `("0110", 0.5)`.
    pub fn from_terms(n_qubits: usize, terms: &[(&str, C64)]) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_qubits];
        for (bits, amp) in terms {
            if bits.len() != n_qubits {
                return Err(Error::Parameter(format!("bit string {bits:?} has wrong length")));
            }
            let idx = usize::from_str_radix(bits, 2)
                .map_err(|_| Error::Parameter(format!("bad bit string {bits:?}")))?;
            amps[idx] += *amp;
        }
        Self::new(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm().powi(2) - 1.0).abs() <= NORMALIZED_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            n_qubits: self.n_qubits,
            matrix: linalg::outer(&self.amplitudes),
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        PureState { n_qubits: self.n_qubits + other.n_qubits, amplitudes: amps }
    }

    /// Largest elementwise distance after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &PureState) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: Mat,
}

impl DensityOperator {
    /// Validates Hermiticity; the trace is not forced to one (see [`Self::is_physical`]).
    pub fn new(n_qubits: usize, matrix: Mat) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension { expected: dim, actual: matrix.nrows() });
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::Parameter(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { n_qubits, matrix: Mat::identity(dim, dim).scale(1.0 / dim as f64) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Unit trace and positive semidefinite up to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        (self.trace() - 1.0).abs() <= tol && self.eigenvalues()[0] >= -tol
    }

    /// `p I / 2^N + (1 - p) self`.
    pub fn with_white_noise(&self, p: f64) -> Self {
        let dim = self.matrix.nrows();
        let mut m = self.matrix.scale(1.0 - p);
        for i in 0..dim {
            m[(i, i)] += c(p / dim as f64, 0.0);
        }
        Self { n_qubits: self.n_qubits, matrix: m }
    }

    /// Weighted sum of operators on the same register.
    pub fn mixture(components: &[(f64, DensityOperator)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Parameter("empty mixture".into()))?;
        let n = first.1.n_qubits;
        let dim = 1usize << n;
        let mut m = Mat::zeros(dim, dim);
        for (w, rho) in components {
            if rho.n_qubits != n {
                return Err(Error::Dimension { expected: n, actual: rho.n_qubits });
            }
            if *w < 0.0 {
                return Err(Error::Parameter(format!("negative mixture weight {w}")));
            }
            m += rho.matrix.scale(*w);
        }
        Ok(Self { n_qubits: n, matrix: m })
    }
}

/// One 2x2 complex matrix `[[α0, α1], [α2, α3]]` acting on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOperator(Mat2);

impl LocalOperator {
    pub fn new(a0: C64, a1: C64, a2: C64, a3: C64) -> Self {
        Self(Mat2::new(a0, a1, a2, a3))
    }

    pub fn from_matrix(m: Mat2) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        Self::new(d0, ZERO, ZERO, d1)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn entry(&self, k: usize) -> C64 {
        self.0[(k / 2, k % 2)]
    }

    pub fn det(&self) -> C64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn largest_singular_value(&self) -> f64 {
        // sigma_max^2 is the top eigenvalue of A^dagger A
        let g = self.0.adjoint() * self.0;
        let (a, d) = (g[(0, 0)].re, g[(1, 1)].re);
        let b = g[(0, 1)].norm();
        (0.5 * (a + d) + ((0.5 * (a - d)).powi(2) + b * b).sqrt()).sqrt()
    }

    /// `|det| > 1e-12 * sigma_max^2`.
    pub fn is_invertible(&self) -> bool {
        let s = self.largest_singular_value();
        s > 0.0 && self.det().norm() > 1e-12 * s * s
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_invertible() {
            return None;
        }
        let d = self.det();
        let m = &self.0;
        Some(Self::new(m[(1, 1)] / d, -m[(0, 1)] / d, -m[(1, 0)] / d, m[(0, 0)] / d))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &LocalOperator) -> Self {
        Self(self.0 * rhs.0)
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::mat2_max_abs(&(self.0.adjoint() * self.0 - Mat2::identity()))
    }

    pub fn condition_number(&self) -> f64 {
        let s = self.largest_singular_value();
        let d = self.det().norm();
        if d == 0.0 {
            f64::INFINITY
        } else {
            s * s / d
        }
    }
}

impl Serialize for LocalOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.0;
        let rows = [
            [[m[(0, 0)].re, m[(0, 0)].im], [m[(0, 1)].re, m[(0, 1)].im]],
            [[m[(1, 0)].re, m[(1, 0)].im], [m[(1, 1)].re, m[(1, 1)].im]],
        ];
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r: [[[f64; 2]; 2]; 2] = Deserialize::deserialize(d)?;
        Ok(Self::new(
            c(r[0][0][0], r[0][0][1]),
            c(r[0][1][0], r[0][1][1]),
            c(r[1][0][0], r[1][0][1]),
            c(r[1][1][0], r[1][1][1]),
        ))
    }
}

/// Ordered list of per-qubit operators, `A_0 ⊗ ... ⊗ A_{N-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalOperatorChain(Vec<LocalOperator>);

impl LocalOperatorChain {
    pub fn new(ops: Vec<LocalOperator>) -> Self {
        Self(ops)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![LocalOperator::identity(); n])
    }

    pub fn uniform(op: LocalOperator, n: usize) -> Self {
        Self(vec![op; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ops(&self) -> &[LocalOperator] {
        &self.0
    }

    pub fn get(&self, k: usize) -> &LocalOperator {
        &self.0[k]
    }

    pub fn is_ilo(&self) -> bool {
        self.0.iter().all(LocalOperator::is_invertible)
    }

    /// Index of the first non-invertible member.
    pub fn first_singular(&self) -> Option<usize> {
        self.0.iter().position(|op| !op.is_invertible())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.0
            .iter()
            .enumerate()
            .map(|(k, op)| op.inverse().ok_or(Error::NotInvertible(k)))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.iter().map(LocalOperator::adjoint).collect())
    }

    /// Per-qubit product `self_k * rhs_k`.
    pub fn compose(&self, rhs: &LocalOperatorChain) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::Dimension { expected: self.len(), actual: rhs.len() });
        }
        Ok(Self(self.0.iter().zip(&rhs.0).map(|(a, b)| a.compose(b)).collect()))
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.0.iter().map(LocalOperator::unitarity_defect).fold(0.0, f64::max)
    }

    pub fn max_condition_number(&self) -> f64 {
        self.0.iter().map(LocalOperator::condition_number).fold(0.0, f64::max)
    }

    /// Dense `⊗ A_k`.
    pub fn to_matrix(&self) -> Mat {
        linalg::kron_all(self.0.iter().map(|op| op.matrix()))
    }
}

/// A split of the register into `subset` and its complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    n_qubits: usize,
    subset: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_qubits: usize, subset: &[usize]) -> Result<Self> {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != subset.len() {
            return Err(Error::InvalidBipartition("repeated qubit index".into()));
        }
        if s.is_empty() || s.len() >= n_qubits {
            return Err(Error::InvalidBipartition(format!(
                "subset {subset:?} must be a nonempty proper subset of {n_qubits} qubits"
            )));
        }
        if let Some(&q) = s.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::InvalidBipartition(format!("qubit {q} out of range")));
        }
        Ok(Self { n_qubits, subset: s })
    }

    pub fn single(n_qubits: usize, qubit: usize) -> Result<Self> {
        Self::new(n_qubits, &[qubit])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|q| !self.subset.contains(q)).collect()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.subset.contains(&qubit)
    }

    /// The representative containing qubit 0.
    pub fn canonical(&self) -> Self {
        if self.contains(0) {
            self.clone()
        } else {
            Self { n_qubits: self.n_qubits, subset: self.complement() }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.contains(0)
    }

    /// All `2^{N-1} - 1` canonical bipartitions, ordered by the subset bitmask.
    pub fn all_canonical(n_qubits: usize) -> Vec<Self> {
        if n_qubits < 2 {
            return Vec::new();
        }
        let rest = n_qubits - 1;
        (0..(1usize << rest) - 1)
            .map(|mask| {
                let mut subset = vec![0];
                subset.extend((0..rest).filter(|b| mask & (1 << b) != 0).map(|b| b + 1));
                Self { n_qubits, subset }
            })
            .collect()
    }

    /// Index of `full` within the subset register and within the complement register.
    fn split_index(&self, full: usize, complement: &[usize]) -> (usize, usize) {
        let n = self.n_qubits;
        let a = self.subset.iter().fold(0, |acc, &q| (acc << 1) | linalg::bit(full, n, q));
        let b = complement.iter().fold(0, |acc, &q| (acc << 1) | linalg::bit(full, n, q));
        (a, b)
    }
}

fn check_cut(state: &PureState, cut: &Bipartition) -> Result<()> {
    if cut.n_qubits != state.n_qubits {
        return Err(Error::Dimension { expected: state.n_qubits, actual: cut.n_qubits });
    }
    Ok(())
}

/// Amplitudes reshaped into a `2^|subset| x 2^|complement|` matrix.
pub fn reshape(state: &PureState, cut: &Bipartition) -> Result<Mat> {
    check_cut(state, cut)?;
    let comp = cut.complement();
    let mut m = Mat::zeros(1 << cut.subset.len(), 1 << comp.len());
    for (i, amp) in state.amplitudes.iter().enumerate() {
        let (a, b) = cut.split_index(i, &comp);
        m[(a, b)] = *amp;
    }
    Ok(m)
}

/// `(⊗_k A_k)|ψ>`; the result is generally unnormalized.
pub fn apply_chain(state: &PureState, chain: &LocalOperatorChain) -> Result<PureState> {
    if chain.len() != state.n_qubits {
        return Err(Error::Dimension { expected: state.n_qubits, actual: chain.len() });
    }
    let mut amps = state.amplitudes.clone();
    for (k, op) in chain.ops().iter().enumerate() {
        linalg::apply_local_vec(&mut amps, state.n_qubits, k, op.matrix());
    }
    Ok(PureState { n_qubits: state.n_qubits, amplitudes: amps })
}

/// Reduced density operator on `subset` (partial trace over the complement).
pub fn reduced_operator(state: &PureState, subset: &Bipartition) -> Result<DensityOperator> {
    let m = reshape(state, subset)?;
    Ok(DensityOperator { n_qubits: subset.subset.len(), matrix: &m * m.adjoint() })
}

/// Singular values of the reshaped amplitude matrix, descending.
pub fn schmidt_coefficients(state: &PureState, cut: &Bipartition) -> Result<Vec<f64>> {
    Ok(linalg::singular_values(&reshape(state, cut)?))
}

/// Leading Schmidt pair `(u, v)` with `ψ ≈ σ_1 u ⊗ v`, `u` carrying `σ_1`.
pub fn leading_schmidt_pair(state: &PureState, cut: &Bipartition) -> Result<(Vec<C64>, Vec<C64>)> {
    let m = reshape(state, cut)?;
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let top = (0..svd.singular_values.len())
        .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .unwrap_or(0);
    let s = svd.singular_values[top];
    let left = (0..u.nrows()).map(|r| u[(r, top)] * s).collect();
    let right = (0..vt.ncols()).map(|col| vt[(top, col)]).collect();
    Ok((left, right))
}

pub fn schmidt_rank(state: &PureState, cut: &Bipartition, tol: f64) -> Result<usize> {
    let sv = schmidt_coefficients(state, cut)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

pub fn is_genuinely_entangled(state: &PureState, tol: f64) -> Result<bool> {
    is_genuinely_entangled_capped(state, tol, DEFAULT_N_CAP)
}

/// Schmidt rank at least 2 across every canonical bipartition.
pub fn is_genuinely_entangled_capped(state: &PureState, tol: f64, n_cap: usize) -> Result<bool> {
    let n = state.n_qubits;
    if n > n_cap {
        return Err(Error::Resource(n, n_cap));
    }
    if n < 2 {
        return Err(Error::Parameter("genuine entanglement needs at least 2 qubits".into()));
    }
    for cut in Bipartition::all_canonical(n) {
        if schmidt_rank(state, &cut, tol)? < 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest squared Schmidt coefficient over all bipartitions of a normalized state.
pub fn max_schmidt_coefficient_sq(state: &PureState) -> Result<f64> {
    let n = state.n_qubits;
    if n < 2 {
        return Err(Error::Parameter("needs at least 2 qubits".into()));
    }
    if n > DEFAULT_N_CAP {
        return Err(Error::Resource(n, DEFAULT_N_CAP));
    }
    let mut best: f64 = 0.0;
    for cut in Bipartition::all_canonical(n) {
        let top = schmidt_coefficients(state, &cut)?[0];
        best = best.max(top * top);
    }
    Ok(best)
}

/// Transposes the tensor factors of the qubits in `subset`; exact involution.
pub fn partial_transpose(rho: &DensityOperator, subset: &Bipartition) -> Result<DensityOperator> {
    if subset.n_qubits != rho.n_qubits {
        return Err(Error::Dimension { expected: rho.n_qubits, actual: subset.n_qubits });
    }
    let n = rho.n_qubits;
    let mask: usize = subset.subset.iter().map(|&q| linalg::stride(n, q)).sum();
    let dim = rho.matrix.nrows();
    let m = Mat::from_fn(dim, dim, |i, j| {
        let swapped_i = (i & !mask) | (j & mask);
        let swapped_j = (j & !mask) | (i & mask);
        rho.matrix[(swapped_i, swapped_j)]
    });
    Ok(DensityOperator { n_qubits: n, matrix: m })
}

pub fn min_partial_transpose_eigenvalue(rho: &DensityOperator, subset: &Bipartition) -> Result<f64> {
    Ok(partial_transpose(rho, subset)?.eigenvalues()[0])
}

/// Positive partial transpose across every canonical bipartition, at `tol`.
pub fn is_ppt_everywhere(rho: &DensityOperator, tol: f64) -> Result<bool> {
    for cut in Bipartition::all_canonical(rho.n_qubits) {
        if min_partial_transpose_eigenvalue(rho, &cut)? < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Named state families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum NamedState {
    Ghz { n: usize },
    W { n: usize },
    Dicke { m: usize, n: usize },
    Cluster4,
    Psi4,
    TwoQubitTheta { theta: f64 },
    /// Single-excitation state with the given (unnormalized) coefficients.
    PseudoW { coeffs: Vec<[f64; 2]> },
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Dicke state `|m, N>`: equal superposition of all weight-`m` strings.
pub fn dicke(m: usize, n: usize) -> Result<PureState> {
    if n == 0 || m > n {
        return Err(Error::Parameter(format!("dicke state needs 0 <= m <= N, got m={m}, N={n}")));
    }
    let amp = c(binomial(n, m).sqrt().recip(), 0.0);
    let amps = (0..1usize << n)
        .map(|i| if i.count_ones() as usize == m { amp } else { ZERO })
        .collect();
    PureState::new(n, amps)
}

pub fn make_named(name: &NamedState) -> Result<PureState> {
    match name {
        NamedState::Ghz { n } => {
            let n = *n;
            if n < 2 {
                return Err(Error::Parameter("ghz needs N >= 2".into()));
            }
            let mut amps = vec![ZERO; 1 << n];
            let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[0] = h;
            amps[(1 << n) - 1] = h;
            PureState::new(n, amps)
        }
        NamedState::W { n } => {
            if *n < 2 {
                return Err(Error::Parameter("w needs N >= 2".into()));
            }
            dicke(1, *n)
        }
        NamedState::Dicke { m, n } => {
            if *n < 2 || *m < 1 || *m + 1 > *n {
                return Err(Error::Parameter(format!("dicke needs 1 <= m <= N-1, got m={m}, N={n}")));
            }
            dicke(*m, *n)
        }
        NamedState::Cluster4 => PureState::from_terms(
            4,
            &[("0000", c(0.5, 0.0)), ("0011", c(0.5, 0.0)), ("1100", c(0.5, 0.0)), ("1111", c(-0.5, 0.0))],
        ),
        NamedState::Psi4 => {
            let a = c(3f64.sqrt().recip(), 0.0);
            let b = c(-0.5 / 3f64.sqrt(), 0.0);
            PureState::from_terms(
                4,
                &[("0011", a), ("1100", a), ("0110", b), ("1001", b), ("0101", b), ("1010", b)],
            )
        }
        NamedState::TwoQubitTheta { theta } => {
            let t = *theta;
            if !(t > 0.0 && t <= std::f64::consts::FRAC_PI_4 + 1e-15) {
                return Err(Error::Parameter(format!("theta must lie in (0, pi/4], got {t}")));
            }
            PureState::from_terms(2, &[("00", c(t.cos(), 0.0)), ("11", c(t.sin(), 0.0))])
        }
        NamedState::PseudoW { coeffs } => {
            let n = coeffs.len();
            if n < 2 {
                return Err(Error::Parameter("pseudo_w needs N >= 2 coefficients".into()));
            }
            if coeffs.iter().any(|z| z[0] == 0.0 && z[1] == 0.0) {
                return Err(Error::Parameter("pseudo_w coefficients must be nonzero".into()));
            }
            let mut amps = vec![ZERO; 1 << n];
            for (k, z) in coeffs.iter().enumerate() {
                amps[linalg::stride(n, k)] = c(z[0], z[1]);
            }
            PureState::new(n, amps)?.normalized()
        }
    }
}
