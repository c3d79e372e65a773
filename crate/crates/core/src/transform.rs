//! Invertible local operators taking a genuinely entangled state to SMQ form.
//!
//! Every chain member has a chosen top row `(α_{k0}, α_{k1})` and the completing row
//! `(α_{k2}, α_{k3})`, the normalized conjugate orthogonal complement. One qubit (the
//! zeroing qubit) gets the top row that cancels the `|0...0>` amplitude; the single
//! excitation on qubit `l` then has amplitude `α_{l2} f_l + α_{l3} g_l`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64, ZERO};
use crate::smq::{self, DEFAULT_EPS_ZERO};
use crate::states::{self, Bipartition, LocalOperator, LocalOperatorChain, PureState};

/// Angle draws for the powers-of-5 strategy before falling back to random rows.
pub const POWER5_DRAWS: usize = 64;
/// Turns are represented as integers modulo `2^TURN_BITS`.
pub const TURN_BITS: u32 = 61;
const TURN_MASK: u64 = (1 << TURN_BITS) - 1;
const SEPARABILITY_TOL: f64 = 1e-8;

/// A factorization `ψ = factor ⊗ rest` across the cut `factor_qubits | others`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub factor_qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separating_qubit: Option<usize>,
    pub factor: Vec<C64>,
    pub rest: Vec<C64>,
}

impl Separation {
    /// Rebuilds the full amplitude vector from the two factors.
    pub fn recombine(&self, n: usize) -> Result<PureState> {
        let cut = Bipartition::new(n, &self.factor_qubits)?;
        let comp = cut.complement();
        let mut amps = vec![ZERO; 1 << n];
        for (i, amp) in amps.iter_mut().enumerate() {
            let a = self.factor_qubits.iter().fold(0, |acc, &q| (acc << 1) | linalg::bit(i, n, q));
            let b = comp.iter().fold(0, |acc, &q| (acc << 1) | linalg::bit(i, n, q));
            *amp = self.factor[a] * self.rest[b];
        }
        PureState::new(n, amps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Tails `(0, 1)` on every qubit except the zeroing one.
    Tentative { zeroing_qubit: usize },
    /// Tails `(x^{5^k}, x^{5^{k+N-1}})` with `x = e^{2πi turn / 2^61}`.
    PowersOfFive { draw: usize, turn: u64 },
    /// Gaussian tails.
    Random { attempt: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TransformOutcome {
    SmqFound {
        chain: LocalOperatorChain,
        strategy: Strategy,
        /// `[|f_k|, |g_k|]` per qubit.
        diagnostics: Vec<[f64; 2]>,
    },
    Separable(Separation),
}

/// `(α_{00}, α_{01}) = (-u_1, u_0)` with `u_i = Σ c_{i,rest} ∏_k t_k[rest_k]`.
///
/// `tail[k]` is the top row of qubit `k + 1`.
pub fn zeroing_alpha0(state: &PureState, tail: &[[C64; 2]]) -> Result<(C64, C64)> {
    let n = state.n_qubits();
    if n < 2 || tail.len() != n - 1 {
        return Err(Error::Dimension { expected: n.saturating_sub(1), actual: tail.len() });
    }
    let mut rows = Vec::with_capacity(n);
    rows.push([ZERO, ZERO]);
    rows.extend_from_slice(tail);
    let row = zeroing_row(state, &rows, 0);
    if row[0] == ZERO && row[1] == ZERO {
        return Err(Error::Internal("both zeroing coefficients vanish for this tail".into()));
    }
    Ok((row[0], row[1]))
}

/// Top row for `qubit` cancelling the `|0...0>` amplitude given the other top rows (unnormalized).
pub fn zeroing_row(state: &PureState, rows: &[[C64; 2]], qubit: usize) -> [C64; 2] {
    let n = state.n_qubits();
    let mut u = [ZERO; 2];
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let mut w = *amp;
        for (k, row) in rows.iter().enumerate() {
            if k != qubit {
                w *= row[linalg::bit(i, n, k)];
            }
        }
        u[linalg::bit(i, n, qubit)] += w;
    }
    [-u[1], u[0]]
}

/// `(f_l, g_l)`: the `|0...0>`-projection with qubit `l` left open, split by the value of qubit `l`.
pub fn fk_gk(state: &PureState, rows: &[[C64; 2]], qubit: usize) -> (C64, C64) {
    let n = state.n_qubits();
    let mut fg = [ZERO; 2];
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let mut w = *amp;
        for (k, row) in rows.iter().enumerate() {
            if k != qubit {
                w *= row[linalg::bit(i, n, k)];
            }
        }
        fg[linalg::bit(i, n, qubit)] += w;
    }
    (fg[0], fg[1])
}

/// `[[r0, r1], [-conj(r1), conj(r0)] / |r|]`.
pub fn complete_row(row: [C64; 2]) -> LocalOperator {
    let norm = (row[0].norm_sqr() + row[1].norm_sqr()).sqrt();
    LocalOperator::new(row[0], row[1], -row[1].conj() / norm, row[0].conj() / norm)
}

/// True iff `qubit` factors out: the `2 x 2^{N-1}` reshape has rank 1 at `tol`.
pub fn check_separability_pattern(state: &PureState, qubit: usize, tol: f64) -> Result<bool> {
    let cut = Bipartition::single(state.n_qubits(), qubit)?;
    Ok(states::schmidt_rank(state, &cut, tol)? <= 1)
}

/// First rank-1 cut, single qubits first, then larger factors in canonical order.
pub fn find_separation(state: &PureState, tol: f64) -> Result<Option<Separation>> {
    let n = state.n_qubits();
    let mut cuts: Vec<Bipartition> = (0..n).map(|q| Bipartition::single(n, q)).collect::<Result<_>>()?;
    let mut larger: Vec<Bipartition> = Bipartition::all_canonical(n)
        .into_iter()
        .map(|cut| {
            let comp = cut.complement();
            if comp.len() < cut.subset().len() {
                Bipartition::new(n, &comp).expect("complement of a valid cut")
            } else {
                cut
            }
        })
        .filter(|cut| cut.subset().len() >= 2)
        .collect();
    larger.sort_by_key(|cut| cut.subset().len());
    cuts.extend(larger);
    for cut in cuts {
        if states::schmidt_rank(state, &cut, tol)? <= 1 {
            let (factor, rest) = states::leading_schmidt_pair(state, &cut)?;
            let factor_qubits = cut.subset().to_vec();
            let separating_qubit = (factor_qubits.len() == 1).then(|| factor_qubits[0]);
            return Ok(Some(Separation { factor_qubits, separating_qubit, factor, rest }));
        }
    }
    Ok(None)
}

/// `j · 5^e mod 2^61`, exact.
pub fn turn_power5(turn: u64, exponent: u32) -> u64 {
    let mut t = (turn & TURN_MASK) as u128;
    for _ in 0..exponent {
        t = (t * 5) & TURN_MASK as u128;
    }
    t as u64
}

/// Angle in `[0, 2π)` of a turn fraction `t / 2^61`.
pub fn turn_to_angle(turn: u64) -> f64 {
    std::f64::consts::TAU * (turn & TURN_MASK) as f64 / (1u64 << TURN_BITS) as f64
}

/// `x^{5^e}` for `x = e^{2πi turn / 2^61}`.
pub fn power5_phase(turn: u64, exponent: u32) -> C64 {
    C64::from_polar(1.0, turn_to_angle(turn_power5(turn, exponent)))
}

/// Top rows of qubits `1..N` for the powers-of-5 strategy.
pub fn power5_tail(n: usize, turn: u64) -> Vec<[C64; 2]> {
    (1..n)
        .map(|k| [power5_phase(turn, k as u32), power5_phase(turn, (k + n - 1) as u32)])
        .collect()
}

/// Completes `rows` (with the zeroing qubit recomputed) into a chain, if the zeroing row is nonzero.
fn chain_from_rows(state: &PureState, mut rows: Vec<[C64; 2]>, zeroing: usize) -> Option<LocalOperatorChain> {
    let z = zeroing_row(state, &rows, zeroing);
    let norm = (z[0].norm_sqr() + z[1].norm_sqr()).sqrt();
    let scale: f64 = rows
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != zeroing)
        .map(|(_, r)| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt())
        .product();
    if norm <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return None;
    }
    rows[zeroing] = [z[0] / norm, z[1] / norm];
    Some(LocalOperatorChain::new(rows.into_iter().map(complete_row).collect()))
}

fn accepts(state: &PureState, chain: &LocalOperatorChain) -> bool {
    states::apply_chain(state, chain)
        .map(|out| smq::classify_smq(&out, DEFAULT_EPS_ZERO).is_ok())
        .unwrap_or(false)
}

fn diagnostics(state: &PureState, chain: &LocalOperatorChain) -> Vec<[f64; 2]> {
    let rows: Vec<[C64; 2]> = chain.ops().iter().map(|op| [op.entry(0), op.entry(1)]).collect();
    (0..state.n_qubits())
        .map(|l| {
            let (f, g) = fk_gk(state, &rows, l);
            [f.norm(), g.norm()]
        })
        .collect()
}

fn gaussian_row(rng: &mut ChaCha8Rng) -> [C64; 2] {
    let mut draw = || c(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let r = [draw(), draw()];
    let norm = (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
    [r[0] / norm, r[1] / norm]
}

/// Finds an ILO chain to SMQ form, or proves separability from a rank-1 cut.
///
/// Ladder: tentative tails, then `POWER5_DRAWS` powers-of-5 angles, then up to `max_tries`
/// Gaussian tails. Exhausting the ladder is inconclusive, never a separability verdict.
pub fn find_ilo_to_smq(state: &PureState, seed: u64, max_tries: usize) -> Result<TransformOutcome> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::Parameter("SMQ conversion needs at least 2 qubits".into()));
    }
    if n > states::DEFAULT_N_CAP {
        return Err(Error::Resource(n, states::DEFAULT_N_CAP));
    }
    let state = state.normalized()?;
    if let Some(sep) = find_separation(&state, SEPARABILITY_TOL)? {
        return Ok(TransformOutcome::Separable(sep));
    }
    let found = |chain: LocalOperatorChain, strategy: Strategy| TransformOutcome::SmqFound {
        diagnostics: diagnostics(&state, &chain),
        chain,
        strategy,
    };

    let tentative = [ZERO, linalg::ONE];
    for z in 0..n {
        if let Some(chain) = chain_from_rows(&state, vec![tentative; n], z) {
            if accepts(&state, &chain) {
                return Ok(found(chain, Strategy::Tentative { zeroing_qubit: z }));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 0..POWER5_DRAWS {
        let turn = rng.random::<u64>() & TURN_MASK;
        let mut rows = vec![[ZERO; 2]];
        rows.extend(power5_tail(n, turn));
        if let Some(chain) = chain_from_rows(&state, rows, 0) {
            if accepts(&state, &chain) {
                return Ok(found(chain, Strategy::PowersOfFive { draw, turn }));
            }
        }
    }

    for attempt in 0..max_tries {
        let mut rows = vec![[ZERO; 2]];
        rows.extend((1..n).map(|_| gaussian_row(&mut rng)));
        if let Some(chain) = chain_from_rows(&state, rows, 0) {
            if accepts(&state, &chain) {
                return Ok(found(chain, Strategy::Random { attempt }));
            }
        }
    }
    Err(Error::Inconclusive(POWER5_DRAWS + max_tries + n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitarizationResult {
    /// Lower-triangular members `[[x_k, 0], [y_k, 1]]`.
    pub prime_chain: LocalOperatorChain,
    /// Per-qubit normalizer `a_k = |det A_k| / sqrt(|α_{k0}|^2 + |α_{k1}|^2)`.
    pub normalizers: Vec<f64>,
    /// `V'_k A_k / a_k`.
    pub unitary_chain: LocalOperatorChain,
}

/// Left-multiplies each member by a lower-triangular factor so that the product is unitary
/// up to a positive scale; lower-triangular factors keep SMQ form intact.
pub fn unitarize(chain: &LocalOperatorChain) -> Result<UnitarizationResult> {
    if let Some(k) = chain.first_singular() {
        return Err(Error::NotInvertible(k));
    }
    let mut prime = Vec::with_capacity(chain.len());
    let mut normalizers = Vec::with_capacity(chain.len());
    let mut unitary = Vec::with_capacity(chain.len());
    for op in chain.ops() {
        let (a0, a1, a2, a3) = (op.entry(0), op.entry(1), op.entry(2), op.entry(3));
        let s = a0.norm_sqr() + a1.norm_sqr();
        let x = (a1 * a2 - a0 * a3) / s;
        let y = (-a0.conj() * a2 - a1.conj() * a3) / s;
        let p = LocalOperator::new(x, ZERO, y, linalg::ONE);
        let a = op.det().norm() / s.sqrt();
        let m = p.compose(op);
        unitary.push(LocalOperator::from_matrix(m.matrix().unscale(a)));
        prime.push(p);
        normalizers.push(a);
    }
    Ok(UnitarizationResult {
        prime_chain: LocalOperatorChain::new(prime),
        normalizers,
        unitary_chain: LocalOperatorChain::new(unitary),
    })
}

/// Checks that `Σ p_i a^{m_i}` with distinct exponents `m_i ≤ max_exponent`, at most
/// `max_terms` terms and digits `p_i ∈ [1, a-1]` never collides for different digit sequences.
pub fn exponent_injectivity_selftest(a_base: u64, max_terms: usize, max_exponent: u32) -> bool {
    use std::collections::HashMap;
    if a_base < 2 {
        return false;
    }
    let mut seen: HashMap<u128, Vec<(u32, u64)>> = HashMap::new();
    let mut stack: Vec<(u32, Vec<(u32, u64)>)> = vec![(0, Vec::new())];
    while let Some((next_exp, terms)) = stack.pop() {
        if !terms.is_empty() {
            let sum: u128 = terms.iter().map(|&(m, p)| p as u128 * (a_base as u128).pow(m)).sum();
            if let Some(prev) = seen.insert(sum, terms.clone()) {
                if prev != terms {
                    return false;
                }
            }
        }
        if terms.len() == max_terms {
            continue;
        }
        for m in next_exp..=max_exponent {
            for p in 1..a_base {
                let mut t = terms.clone();
                t.push((m, p));
                stack.push((m + 1, t));
            }
        }
    }
    true
}
