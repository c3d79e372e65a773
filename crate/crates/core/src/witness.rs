//! Witness construction, expectation values and white-noise tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64, Mat, Mat2, ONE, ZERO};
use crate::smq::{self, inf_as_string, SmqCoefficients, SmqInequalityReport};
use crate::states::{
    self, DensityOperator, LocalOperator, LocalOperatorChain, NamedState, PureState,
};
use crate::transform::{self, Strategy, TransformOutcome};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// `(N-1)/N I - |W_N><W_N|`
    WN,
    /// `c I - |ψ><ψ|` with `c` the largest squared Schmidt coefficient
    WC,
    /// Diagonally conjugated W witness for an SMQ state
    Smq,
    /// Any witness conjugated by a local operator chain
    Conjugated,
    WPrime,
    Dicke24,
}

/// Construction parameters carried alongside the matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "inf_as_string::option")]
    pub b_upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Chain `V` mapping the target state into SMQ form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<LocalOperatorChain>,
    /// Chain `F` with `W = F^† W_{W_N} F`, when the witness derives from the W witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<LocalOperatorChain>,
}

#[derive(Clone, Debug)]
pub struct Witness {
    n_qubits: usize,
    matrix: Mat,
    provenance: Provenance,
    params: WitnessParams,
}

impl Witness {
    pub fn new(n_qubits: usize, matrix: Mat, provenance: Provenance, params: WitnessParams) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension { expected: dim, actual: matrix.nrows() });
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::Parameter(format!("witness is not Hermitian (defect {defect:e})")));
        }
        Ok(Self { n_qubits, matrix, provenance, params })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn params(&self) -> &WitnessParams {
        &self.params
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, actual: state.n_qubits() });
        }
        Ok(linalg::expectation(&self.matrix, state.amplitudes()))
    }

    /// `Tr(W ρ)`.
    pub fn trace_with(&self, rho: &DensityOperator) -> Result<f64> {
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, actual: rho.n_qubits() });
        }
        Ok(linalg::trace_product(&self.matrix, rho.matrix()).re)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub(crate) fn set_provenance(&mut self, provenance: Provenance) {
        self.provenance = provenance;
    }

    pub(crate) fn params_mut(&mut self) -> &mut WitnessParams {
        &mut self.params
    }
}

pub fn w_n_witness(n: usize) -> Result<Witness> {
    let w = states::make_named(&NamedState::W { n })?;
    let dim = 1usize << n;
    let cval = (n as f64 - 1.0) / n as f64;
    let m = Mat::identity(dim, dim).scale(cval) - linalg::outer(w.amplitudes());
    let params = WitnessParams {
        c: Some(cval),
        frame: Some(LocalOperatorChain::identity(n)),
        ..Default::default()
    };
    Witness::new(n, m, Provenance::WN, params)
}

/// `c I - |ψ><ψ|` with `c` maximised over biseparable states.
pub fn projector_witness(state: &PureState) -> Result<Witness> {
    let state = state.normalized()?;
    if !states::is_genuinely_entangled(&state, states::DEFAULT_RANK_TOL)? {
        return Err(Error::NotGenuinelyEntangled);
    }
    let cval = states::max_schmidt_coefficient_sq(&state)?;
    let dim = state.dim();
    let m = Mat::identity(dim, dim).scale(cval) - linalg::outer(state.amplitudes());
    let params = WitnessParams { c: Some(cval), ..Default::default() };
    Witness::new(state.n_qubits(), m, Provenance::WC, params)
}

/// `W' = (⊗A_i) W (⊗A_i^†)`.
pub fn conjugate_witness(base: &Witness, chain: &LocalOperatorChain) -> Result<Witness> {
    let n = base.n_qubits;
    if chain.len() != n {
        return Err(Error::Dimension { expected: n, actual: chain.len() });
    }
    if let Some(k) = chain.first_singular() {
        return Err(Error::NotInvertible(k));
    }
    let mut m = base.matrix.clone();
    for (k, op) in chain.ops().iter().enumerate() {
        linalg::apply_local_left(&mut m, n, k, op.matrix());
        linalg::apply_local_right(&mut m, n, k, &op.matrix().adjoint());
    }
    let m = linalg::hermitize(&m);
    // W = F^† W_N F  =>  A W A^† = (F A^†)^† W_N (F A^†)
    let frame = match &base.params.frame {
        Some(f) => Some(f.compose(&chain.adjoint())?),
        None => None,
    };
    let params = WitnessParams { frame, ..base.params.clone() };
    Witness::new(n, m, Provenance::Conjugated, params)
}

/// `(⊗ A^{-1})^† ρ (⊗ A^{-1})`, the state detected by `conjugate_witness(W, A)` when `W` detects `ρ`.
pub fn push_state(rho: &DensityOperator, chain: &LocalOperatorChain) -> Result<DensityOperator> {
    let n = rho.n_qubits();
    if chain.len() != n {
        return Err(Error::Dimension { expected: n, actual: chain.len() });
    }
    let inv = chain.inverse()?;
    let mut m = rho.matrix().clone();
    for (k, op) in inv.ops().iter().enumerate() {
        linalg::apply_local_left(&mut m, n, k, &op.matrix().adjoint());
        linalg::apply_local_right(&mut m, n, k, op.matrix());
    }
    DensityOperator::new(n, linalg::hermitize(&m))
}

/// `(⊗ diag(1, b√N)) W_{W_N} (⊗ diag(1, b√N))`.
pub fn w_prime_witness(n: usize, b: f64) -> Result<Witness> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Parameter(format!("b must be positive, got {b}")));
    }
    let d = LocalOperator::diag(ONE, c(b * (n as f64).sqrt(), 0.0));
    let chain = LocalOperatorChain::uniform(d, n);
    let mut w = conjugate_witness(&w_n_witness(n)?, &chain)?;
    w.provenance = Provenance::WPrime;
    w.params.b = Some(b);
    w.params.c = None;
    Ok(w)
}

/// The fixed single-qubit unitary of the four-qubit Dicke witness.
pub fn dicke24_unitary() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(h, 0.0), c(-h, 0.0), c(0.0, h), c(0.0, h))
}

/// `2I - σ_x^{⊗4} - (1/4) ∏_{k=1}^{3} (σ_z^{(k-1)} σ_z^{(k)} + I)`.
pub fn ghz4_bracket() -> Mat {
    let n = 4;
    let dim = 16;
    let x4 = linalg::kron_all([linalg::pauli_x(); 4].iter());
    let mut m = Mat::identity(dim, dim).scale(2.0) - x4;
    for s in 0..dim {
        let z = |k: usize| if linalg::bit(s, n, k) == 0 { 1.0 } else { -1.0 };
        let prod: f64 = (1..n).map(|k| z(k - 1) * z(k) + 1.0).product();
        m[(s, s)] -= c(0.25 * prod, 0.0);
    }
    m
}

pub fn dicke24_witness() -> Result<Witness> {
    let u = LocalOperator::from_matrix(dicke24_unitary());
    let base = Witness::new(4, ghz4_bracket(), Provenance::Dicke24, WitnessParams::default())?;
    // U^† B U is conjugation by A = U^†
    let mut w = conjugate_witness(&base, &LocalOperatorChain::uniform(u.adjoint(), 4))?;
    w.provenance = Provenance::Dicke24;
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub p_max: f64,
    pub trace_on_target: f64,
    pub trace_of_witness: f64,
}

impl ToleranceReport {
    /// `Tr[W (p I/2^N + (1-p) ρ)]`.
    pub fn noisy_expectation(&self, dim: usize, p: f64) -> f64 {
        p * self.trace_of_witness / dim as f64 + (1.0 - p) * self.trace_on_target
    }
}

/// Largest white-noise admixture that keeps `Tr[W ρ(p)]` negative.
pub fn white_noise_tolerance(w: &Witness, rho: &DensityOperator) -> Result<ToleranceReport> {
    let t = w.trace_with(rho)?;
    if t >= 0.0 {
        return Err(Error::NotDetected(t));
    }
    let tr = w.trace();
    let dim = (1usize << w.n_qubits) as f64;
    let p_max = -t / (tr / dim - t);
    Ok(ToleranceReport { p_max, trace_on_target: t, trace_of_witness: tr })
}

/// Sums weighted components and reports whether the witness detects the mixture.
pub fn detect_mixture(w: &Witness, components: &[(f64, DensityOperator)]) -> Result<(bool, f64)> {
    let rho = DensityOperator::mixture(components)?;
    let t = w.trace_with(&rho)?;
    Ok((t < 0.0, t))
}

/// Maximizes the white-noise tolerance of `V^† W_SMQ(b) V` on `target` over `b`.
///
/// `chain` is the `V` that maps `target` to the SMQ state described by `coeffs`.
pub fn optimize_b_tolerance(
    coeffs: &SmqCoefficients,
    target: &PureState,
    chain: &LocalOperatorChain,
) -> Result<(f64, ToleranceReport)> {
    let report = smq::solve_b_upper(coeffs);
    let rho = target.normalized()?.density();
    let back = chain.adjoint();
    let eval = |b: f64| -> f64 {
        smq::build_w_smq(coeffs, b)
            .and_then(|w| conjugate_witness(&w, &back))
            .and_then(|w| white_noise_tolerance(&w, &rho))
            .map(|r| r.p_max)
            .unwrap_or(f64::NEG_INFINITY)
    };

    const GRID: usize = 256;
    let grid: Vec<f64> = if report.b_upper.is_finite() {
        (1..GRID).map(|k| report.b_upper * k as f64 / GRID as f64).collect()
    } else {
        let center = smq::pseudo_w_default_b(coeffs.n_qubits());
        (0..GRID)
            .map(|k| center * 10f64.powf(-4.0 + 8.0 * k as f64 / (GRID - 1) as f64))
            .collect()
    };
    let values: Vec<f64> = grid.iter().map(|&b| eval(b)).collect();
    let best = (0..grid.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty grid");
    if !values[best].is_finite() {
        return Err(Error::NotDetected(0.0));
    }
    let lo = if best == 0 { grid[0] * 0.5 } else { grid[best - 1] };
    let hi = if best + 1 == grid.len() {
        if report.b_upper.is_finite() {
            report.b_upper * (1.0 - 1e-12)
        } else {
            grid[best] * 2.0
        }
    } else {
        grid[best + 1]
    };
    let b_star = golden_section_max(eval, lo, hi, 1e-8);
    let b_star = if eval(b_star) >= values[best] { b_star } else { grid[best] };

    let w = conjugate_witness(&smq::build_w_smq(coeffs, b_star)?, &back)?;
    Ok((b_star, white_noise_tolerance(&w, &rho)?))
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// How the state-to-SMQ chain was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum ChainRoute {
    AlreadySmq,
    NamedGhz,
    NamedTwoQubit { theta: f64 },
    NamedPsi4,
    Search { strategy: Strategy },
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Explicit `b`; `None` picks the default (`b_upper / 2`, or the W optimum when unbounded).
    pub b: Option<f64>,
    pub eps_zero: f64,
    pub max_tries: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { b: None, eps_zero: smq::DEFAULT_EPS_ZERO, max_tries: 256, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct BuiltWitness {
    pub witness: Witness,
    /// Unitary chain `V` with `V|ψ>` in SMQ form.
    pub chain: LocalOperatorChain,
    pub coefficients: SmqCoefficients,
    pub report: SmqInequalityReport,
    pub b: f64,
    pub expectation: f64,
    pub route: ChainRoute,
}

/// Explicit SMQ-converting chains for recognized inputs.
pub fn known_chain(state: &PureState, eps_zero: f64) -> Option<(LocalOperatorChain, ChainRoute)> {
    let n = state.n_qubits();
    if smq::classify_smq(state, eps_zero).is_ok() {
        return Some((LocalOperatorChain::identity(n), ChainRoute::AlreadySmq));
    }
    let close = |named: NamedState| {
        states::make_named(&named)
            .map(|s| s.distance_up_to_phase(state) <= 1e-12)
            .unwrap_or(false)
    };
    if n == 2 {
        let a = state.amplitudes();
        let real_nonneg = |z: C64| z.im.abs() <= 1e-15 && z.re > 0.0;
        if a[1].norm() <= 1e-15 && a[2].norm() <= 1e-15 && real_nonneg(a[0]) && real_nonneg(a[3]) && a[0].re >= a[3].re {
            let theta = a[3].re.atan2(a[0].re);
            return Some((two_qubit_chain(theta), ChainRoute::NamedTwoQubit { theta }));
        }
    }
    if n >= 3 && close(NamedState::Ghz { n }) {
        return Some((ghz_chain(n), ChainRoute::NamedGhz));
    }
    if n == 4 && close(NamedState::Psi4) {
        return Some((psi4_chain(), ChainRoute::NamedPsi4));
    }
    None
}

/// `[[√2/2, -√2/2 ω], [√2/2, √2/2 ω]]^{⊗N}` with `ω = (-1)^{(N-1)/N}`.
pub fn ghz_chain(n: usize) -> LocalOperatorChain {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let omega = C64::from_polar(1.0, std::f64::consts::PI * (n as f64 - 1.0) / n as f64);
    let op = LocalOperator::new(c(h, 0.0), -omega * h, c(h, 0.0), omega * h);
    LocalOperatorChain::uniform(op, n)
}

/// `[[1, i√cot θ], [0, 1]]` on both qubits of `cos θ|00> + sin θ|11>`.
pub fn two_qubit_chain(theta: f64) -> LocalOperatorChain {
    let op = LocalOperator::new(ONE, c(0.0, (1.0 / theta.tan()).sqrt()), ZERO, ONE);
    LocalOperatorChain::uniform(op, 2)
}

pub fn psi4_chain() -> LocalOperatorChain {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s5 = 5f64.sqrt();
    LocalOperatorChain::new(vec![
        LocalOperator::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)),
        LocalOperator::new(c(1.0 / s5, 0.0), c(2.0 / s5, 0.0), c(2.0 / s5, 0.0), c(-1.0 / s5, 0.0)),
        LocalOperator::new(c(0.6, 0.0), c(0.8, 0.0), c(0.8, 0.0), c(-0.6, 0.0)),
        LocalOperator::identity(),
    ])
}

/// Unitarizes an SMQ-producing chain (unless already unitary) and classifies the image of `state`.
pub fn prepare_smq(
    state: &PureState,
    chain: &LocalOperatorChain,
    eps_zero: f64,
) -> Result<(LocalOperatorChain, SmqCoefficients)> {
    let chain = if chain.max_unitarity_defect() <= 1e-12 {
        chain.clone()
    } else {
        transform::unitarize(chain)?.unitary_chain
    };
    let transformed = states::apply_chain(state, &chain)?.normalized()?;
    let coefficients = smq::classify_smq(&transformed, eps_zero).map_err(|r| Error::NotSmq(r.to_string()))?;
    Ok((chain, coefficients))
}

/// Full construction: SMQ conversion, unitarization, SMQ inequality, conjugation back.
pub fn build_witness_for_state(state: &PureState, options: &BuildOptions) -> Result<BuiltWitness> {
    let state = state.normalized()?;
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::Parameter("witness construction needs at least 2 qubits".into()));
    }
    let (raw_chain, route) = match known_chain(&state, options.eps_zero) {
        Some(found) => found,
        None => match transform::find_ilo_to_smq(&state, options.seed, options.max_tries)? {
            TransformOutcome::SmqFound { chain, strategy, .. } => (chain, ChainRoute::Search { strategy }),
            TransformOutcome::Separable(sep) => return Err(Error::Separable(Box::new(sep))),
        },
    };
    let (chain, coefficients) = prepare_smq(&state, &raw_chain, options.eps_zero)?;
    let report = smq::solve_b_upper(&coefficients);
    let b = options.b.unwrap_or_else(|| smq::default_b(&coefficients, &report));

    let w_smq = smq::build_w_smq(&coefficients, b)?;
    let is_identity = chain == LocalOperatorChain::identity(n);
    let mut witness = conjugate_witness(&w_smq, &chain.adjoint())?;
    if is_identity {
        witness.provenance = Provenance::Smq;
    }
    witness.params.chain = Some(chain.clone());
    let expectation = witness.expectation(&state)?;
    Ok(BuiltWitness { witness, chain, coefficients, report, b, expectation, route })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_abs_diff_eq;

    fn named(n: NamedState) -> PureState {
        states::make_named(&n).unwrap()
    }

    #[test]
    fn w_n_expectations_and_trace() {
        let w3 = w_n_witness(3).unwrap();
        assert_abs_diff_eq!(w3.expectation(&named(NamedState::W { n: 3 })).unwrap(), -1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w3.expectation(&PureState::basis(3, 0).unwrap()).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w_n_witness(4).unwrap().trace(), 11.0, epsilon = 1e-12);
        let eig = linalg::hermitian_eigenvalues(w3.matrix());
        assert_abs_diff_eq!(eig[0], 2.0 / 3.0 - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[7], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn projector_witness_constants() {
        let w = projector_witness(&named(NamedState::W { n: 3 })).unwrap();
        assert_abs_diff_eq!(w.params().c.unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        assert!(linalg::max_abs_diff(w.matrix(), w_n_witness(3).unwrap().matrix()) < 1e-12);
        for n in 3..=5 {
            let w = projector_witness(&named(NamedState::Ghz { n })).unwrap();
            assert_abs_diff_eq!(w.params().c.unwrap(), 0.5, epsilon = 1e-12);
        }
        let product = PureState::basis(3, 0).unwrap();
        assert!(matches!(projector_witness(&product), Err(Error::NotGenuinelyEntangled)));
    }

    #[test]
    fn projector_witness_tolerance_at_quarter_pi() {
        let psi = named(NamedState::TwoQubitTheta { theta: std::f64::consts::FRAC_PI_4 });
        let w = projector_witness(&psi).unwrap();
        let r = white_noise_tolerance(&w, &psi.density()).unwrap();
        assert_abs_diff_eq!(r.p_max, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn conjugation_by_identity_is_noop() {
        let w = w_n_witness(3).unwrap();
        let out = conjugate_witness(&w, &LocalOperatorChain::identity(3)).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), w.matrix()) < 1e-15);
        let singular = LocalOperatorChain::uniform(LocalOperator::new(ONE, ONE, ONE, ONE), 3);
        assert!(matches!(conjugate_witness(&w, &singular), Err(Error::NotInvertible(0))));
    }

    #[test]
    fn w_prime_reduces_to_w_n() {
        for n in 2..=5 {
            let b = 1.0 / (n as f64).sqrt();
            let wp = w_prime_witness(n, b).unwrap();
            assert!(linalg::max_abs_diff(wp.matrix(), w_n_witness(n).unwrap().matrix()) < 1e-14);
        }
    }

    #[test]
    fn w_prime_detects_w_for_any_b() {
        let w = named(NamedState::W { n: 4 });
        for b in [1e-3, 0.1, 0.5, 1.0, 7.0] {
            assert!(w_prime_witness(4, b).unwrap().expectation(&w).unwrap() < 0.0);
        }
    }

    #[test]
    fn w_prime_tolerance_at_n4() {
        let b = 1.0 / 12f64.sqrt();
        let w = w_prime_witness(4, b).unwrap();
        let r = white_noise_tolerance(&w, &named(NamedState::W { n: 4 }).density()).unwrap();
        assert_abs_diff_eq!(r.p_max, 36.0 / 91.0, epsilon = 1e-12);
    }

    #[test]
    fn dicke24_witness_properties() {
        let w = dicke24_witness().unwrap();
        let d = named(NamedState::Dicke { m: 2, n: 4 });
        assert!(w.expectation(&d).unwrap() < 0.0);
        assert!(w.hermiticity_defect() < 1e-14);
        let r = white_noise_tolerance(&w, &d.density()).unwrap();
        assert_abs_diff_eq!(r.p_max, 2.0 / 9.0, epsilon = 1e-12);
        let bracket = ghz4_bracket();
        assert_abs_diff_eq!(bracket[(0, 0)].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tolerance_of_w3() {
        let w = w_n_witness(3).unwrap();
        let r = white_noise_tolerance(&w, &named(NamedState::W { n: 3 }).density()).unwrap();
        assert_abs_diff_eq!(r.trace_of_witness, 13.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.trace_on_target, -1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_max, 8.0 / 21.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.noisy_expectation(8, r.p_max), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tolerance_requires_detection() {
        let w = w_n_witness(3).unwrap();
        let err = white_noise_tolerance(&w, &PureState::basis(3, 0).unwrap().density()).unwrap_err();
        assert!(matches!(err, Error::NotDetected(_)));
    }

    #[test]
    fn mixtures() {
        let w = w_n_witness(3).unwrap();
        let target = named(NamedState::W { n: 3 }).density();
        assert!(detect_mixture(&w, &[(1.0, target.clone())]).unwrap().0);
        let (hit, t) = detect_mixture(&w, &[(1.0, DensityOperator::maximally_mixed(3))]).unwrap();
        assert!(!hit);
        assert_abs_diff_eq!(t, w.trace() / 8.0, epsilon = 1e-12);
        assert!(detect_mixture(&w, &[(-1.0, target)]).is_err());
    }

    #[test]
    fn build_for_ghz3() {
        let ghz = named(NamedState::Ghz { n: 3 });
        let built = build_witness_for_state(&ghz, &BuildOptions::default()).unwrap();
        assert_eq!(built.route, ChainRoute::NamedGhz);
        assert!(built.expectation < 0.0);
        assert!(built.chain.max_unitarity_defect() < 1e-12);
    }

    #[test]
    fn build_refuses_separable() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = PureState::from_terms(3, &[("000", c(h, 0.0)), ("110", c(h, 0.0))]).unwrap();
        match build_witness_for_state(&s, &BuildOptions::default()) {
            Err(Error::Separable(sep)) => assert_eq!(sep.factor_qubits, vec![2]),
            other => panic!("expected separable refusal, got {other:?}"),
        }
    }

    #[test]
    fn build_for_psi4_is_a_valid_witness() {
        let psi = named(NamedState::Psi4);
        let built = build_witness_for_state(&psi, &BuildOptions::default()).unwrap();
        assert_eq!(built.route, ChainRoute::NamedPsi4);
        assert!(built.expectation < 0.0);
        let oracle = oracle::min_over_product_states(&built.witness, 20, 7);
        assert!(oracle.minimum >= -1e-7, "{}", oracle.minimum);
    }

    #[test]
    fn optimized_b_for_w_family() {
        for n in 3..=6 {
            let w = named(NamedState::W { n });
            let coeffs = smq::classify_smq(&w, smq::DEFAULT_EPS_ZERO).unwrap();
            let (b, _) = optimize_b_tolerance(&coeffs, &w, &LocalOperatorChain::identity(n)).unwrap();
            let expected = 1.0 / ((n * n - n) as f64).sqrt();
            assert_abs_diff_eq!(b, expected, epsilon = 1e-4);
        }
    }
}
