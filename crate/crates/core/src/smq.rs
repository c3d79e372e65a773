//! Standard multiqubit (SMQ) form: classification, the inequality on `b`, and `W_SMQ`.
//!
//! An SMQ state has no `|0...0>` component and a nonzero amplitude on every
//! single-excitation string. For such a state the diagonally conjugated W witness
//! `D^† W_{W_N} D`, `D = ⊗ diag(1, b/a_{1,k})`, detects it whenever
//! `Σ_{m>=2} |a_p|^2 b^{2m-2} ∏_{k∈p} |a_{1,k}|^{-2} < N/(N-1)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64, ONE};
use crate::states::{LocalOperator, LocalOperatorChain, PureState};
use crate::witness::{self, Provenance, Witness};

/// Relative threshold below which an amplitude counts as zero.
pub const DEFAULT_EPS_ZERO: f64 = 1e-9;

const BISECTION_WIDTH: f64 = 1e-12;

/// Serializes `f64::INFINITY` as the string `"inf"`.
pub mod inf_as_string {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            match Option::<Repr>::deserialize(d)? {
                None => Ok(None),
                Some(Repr::Num(x)) => Ok(Some(x)),
                Some(Repr::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
                Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
            }
        }
    }
}

/// Normalized amplitudes of an SMQ state keyed by excitation pattern.
///
/// Pattern bits follow the amplitude index convention (qubit 0 is the most significant bit).
#[derive(Clone, Debug, PartialEq)]
pub struct SmqCoefficients {
    n_qubits: usize,
    by_pattern: BTreeMap<usize, C64>,
}

impl SmqCoefficients {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn by_pattern(&self) -> &BTreeMap<usize, C64> {
        &self.by_pattern
    }

    pub fn get(&self, pattern: usize) -> C64 {
        self.by_pattern.get(&pattern).copied().unwrap_or(linalg::ZERO)
    }

    /// `a_{1,k}`, the amplitude of the single excitation on qubit `k`.
    pub fn weight_one(&self, qubit: usize) -> C64 {
        self.get(linalg::stride(self.n_qubits, qubit))
    }

    /// Patterns of weight at least 2 with their amplitudes.
    pub fn higher(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.by_pattern
            .iter()
            .filter(|(p, _)| p.count_ones() >= 2)
            .map(|(&p, &a)| (p, a))
    }

    pub fn is_pseudo_w(&self) -> bool {
        self.higher().next().is_none()
    }

    pub fn to_state(&self) -> PureState {
        let mut amps = vec![linalg::ZERO; 1 << self.n_qubits];
        for (&p, &a) in &self.by_pattern {
            amps[p] = a;
        }
        PureState::new(self.n_qubits, amps).expect("pattern map has valid size")
    }

    fn pattern_label(&self, p: usize) -> String {
        (0..self.n_qubits).map(|q| if linalg::bit(p, self.n_qubits, q) == 1 { '1' } else { '0' }).collect()
    }
}

impl Serialize for SmqCoefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            by_pattern: BTreeMap<String, [f64; 2]>,
        }
        let by_pattern = self
            .by_pattern
            .iter()
            .map(|(&p, a)| (self.pattern_label(p), [a.re, a.im]))
            .collect();
        Repr { n: self.n_qubits, by_pattern }.serialize(s)
    }
}

/// Why a state is not in SMQ form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SmqRejection {
    ZeroState,
    ZeroTermPresent { magnitude: f64 },
    VanishingWeightOne { qubit: usize, magnitude: f64 },
}

impl fmt::Display for SmqRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroState => write!(f, "zero state"),
            Self::ZeroTermPresent { magnitude } => write!(f, "|0...0> term present (|a| = {magnitude:e})"),
            Self::VanishingWeightOne { qubit, magnitude } => {
                write!(f, "single-excitation amplitude on qubit {qubit} vanishes (|a| = {magnitude:e})")
            }
        }
    }
}

/// Accepts iff the `|0...0>` amplitude is at most `eps` and every single-excitation amplitude
/// exceeds `eps`, both relative to the state norm.
pub fn classify_smq(state: &PureState, eps: f64) -> std::result::Result<SmqCoefficients, SmqRejection> {
    let norm = state.norm();
    if norm == 0.0 {
        return Err(SmqRejection::ZeroState);
    }
    let n = state.n_qubits();
    let amps: Vec<C64> = state.amplitudes().iter().map(|a| a / norm).collect();
    if amps[0].norm() > eps {
        return Err(SmqRejection::ZeroTermPresent { magnitude: amps[0].norm() });
    }
    for q in 0..n {
        let a = amps[linalg::stride(n, q)].norm();
        if a <= eps {
            return Err(SmqRejection::VanishingWeightOne { qubit: q, magnitude: a });
        }
    }
    let by_pattern = amps
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, a)| a.norm() > eps)
        .map(|(p, &a)| (p, a))
        .collect();
    Ok(SmqCoefficients { n_qubits: n, by_pattern })
}

/// Left-hand side of the SMQ inequality grouped by power of `b`: `(2m-2, coefficient)`.
pub fn lhs_polynomial(coeffs: &SmqCoefficients) -> Vec<(u32, f64)> {
    let n = coeffs.n_qubits;
    let inv: Vec<f64> = (0..n).map(|k| coeffs.weight_one(k).norm_sqr().recip()).collect();
    let mut grouped: BTreeMap<u32, f64> = BTreeMap::new();
    for (p, a) in coeffs.higher() {
        let m = p.count_ones();
        let weight: f64 = (0..n).filter(|&k| linalg::bit(p, n, k) == 1).map(|k| inv[k]).product();
        *grouped.entry(2 * m - 2).or_insert(0.0) += a.norm_sqr() * weight;
    }
    grouped.into_iter().collect()
}

fn eval_polynomial(poly: &[(u32, f64)], b: f64) -> f64 {
    poly.iter().map(|&(pow, coef)| coef * b.powi(pow as i32)).sum()
}

pub fn smq_lhs(coeffs: &SmqCoefficients, b: f64) -> Result<f64> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::Parameter(format!("b must be positive, got {b}")));
    }
    Ok(eval_polynomial(&lhs_polynomial(coeffs), b))
}

/// Threshold `N/(N-1)` the left-hand side must stay below.
pub fn threshold(n: usize) -> f64 {
    n as f64 / (n as f64 - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    ExactBisection,
    #[serde(rename = "simplified_eq9")]
    Simplified,
    PseudoWUnbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmqInequalityReport {
    #[serde(with = "inf_as_string")]
    pub b_upper: f64,
    pub method: BoundMethod,
    pub polynomial: Vec<(u32, f64)>,
}

impl SmqInequalityReport {
    /// Report whose bound is the closed-form sufficient value instead of the exact root.
    pub fn simplified(coeffs: &SmqCoefficients) -> Self {
        Self {
            b_upper: simplified_b_bound(coeffs),
            method: BoundMethod::Simplified,
            polynomial: lhs_polynomial(coeffs),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.b_upper.is_finite()
    }
}

/// Solves `lhs(b) = N/(N-1)` by doubling from `b = 1` and bisecting to width `1e-12`.
pub fn solve_b_upper(coeffs: &SmqCoefficients) -> SmqInequalityReport {
    let polynomial = lhs_polynomial(coeffs);
    if polynomial.iter().all(|&(_, coef)| coef == 0.0) {
        return SmqInequalityReport { b_upper: f64::INFINITY, method: BoundMethod::PseudoWUnbounded, polynomial };
    }
    let target = threshold(coeffs.n_qubits);
    let f = |b: f64| eval_polynomial(&polynomial, b);
    let (mut lo, mut hi) = if f(1.0) >= target {
        (0.0, 1.0)
    } else {
        let mut hi = 2.0;
        while f(hi) < target {
            hi *= 2.0;
        }
        (hi / 2.0, hi)
    };
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b_upper = if (f(lo) - target).abs() <= (f(hi) - target).abs() { lo } else { hi };
    SmqInequalityReport { b_upper, method: BoundMethod::ExactBisection, polynomial }
}

/// `min(1, sqrt((N/(N-1)) / [∏|a_{1,k}|^{-2} (1 - Σ|a_{1,j}|^2)]))`, a lower bound on `b_upper`.
pub fn simplified_b_bound(coeffs: &SmqCoefficients) -> f64 {
    let n = coeffs.n_qubits;
    let total: f64 = coeffs.by_pattern.values().map(|a| a.norm_sqr()).sum();
    let weight_one: f64 = (0..n).map(|k| coeffs.weight_one(k).norm_sqr()).sum();
    let residual = ((total - weight_one) / total).max(0.0);
    if residual == 0.0 || coeffs.is_pseudo_w() {
        return 1.0;
    }
    let prod: f64 = (0..n).map(|k| (coeffs.weight_one(k).norm_sqr() / total).recip()).product();
    (threshold(n) / (prod * residual)).sqrt().min(1.0)
}

/// `1/sqrt(N^2 - N)`, the tolerance-optimal `b` for the W family.
pub fn pseudo_w_default_b(n: usize) -> f64 {
    ((n * n - n) as f64).sqrt().recip()
}

/// `b_upper / 2` when bounded, otherwise the W-family optimum.
pub fn default_b(coeffs: &SmqCoefficients, report: &SmqInequalityReport) -> f64 {
    if report.b_upper.is_finite() {
        0.5 * report.b_upper
    } else {
        pseudo_w_default_b(coeffs.n_qubits)
    }
}

/// `⊗_k diag(1, b/a_{1,k})`.
pub fn smq_chain(coeffs: &SmqCoefficients, b: f64) -> LocalOperatorChain {
    let ops = (0..coeffs.n_qubits)
        .map(|k| LocalOperator::diag(ONE, c(b, 0.0) / coeffs.weight_one(k)))
        .collect();
    LocalOperatorChain::new(ops)
}

/// `W_SMQ = D^† W_{W_N} D` for `0 < b < b_upper`.
pub fn build_w_smq(coeffs: &SmqCoefficients, b: f64) -> Result<Witness> {
    let report = solve_b_upper(coeffs);
    if !(b > 0.0 && b < report.b_upper) {
        return Err(Error::BOutOfRange { b, b_upper: report.b_upper });
    }
    let d = smq_chain(coeffs, b);
    let base = witness::w_n_witness(coeffs.n_qubits)?;
    let mut w = witness::conjugate_witness(&base, &d.adjoint())?;
    w.set_provenance(Provenance::Smq);
    w.params_mut().b = Some(b);
    w.params_mut().b_upper = Some(report.b_upper);
    w.params_mut().c = None;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, NamedState};
    use approx::assert_abs_diff_eq;

    fn example() -> PureState {
        PureState::from_terms(
            3,
            &[("100", c(0.5, 0.0)), ("010", c(0.5, 0.0)), ("001", c(0.5, 0.0)), ("111", c(0.5, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn w_state_is_smq() {
        for n in 2..=6 {
            let w = states::make_named(&NamedState::W { n }).unwrap();
            let coeffs = classify_smq(&w, DEFAULT_EPS_ZERO).unwrap();
            for k in 0..n {
                assert_abs_diff_eq!(coeffs.weight_one(k).re, (n as f64).sqrt().recip(), epsilon = 1e-14);
            }
            assert!(coeffs.is_pseudo_w());
        }
    }

    #[test]
    fn ghz_is_rejected() {
        let ghz = states::make_named(&NamedState::Ghz { n: 3 }).unwrap();
        assert!(matches!(classify_smq(&ghz, DEFAULT_EPS_ZERO), Err(SmqRejection::ZeroTermPresent { .. })));
        let mut amps = states::make_named(&NamedState::W { n: 3 }).unwrap().amplitudes().to_vec();
        amps[linalg::stride(3, 1)] = linalg::ZERO;
        let s = PureState::new(3, amps).unwrap();
        assert!(matches!(
            classify_smq(&s, DEFAULT_EPS_ZERO),
            Err(SmqRejection::VanishingWeightOne { qubit: 1, .. })
        ));
    }

    #[test]
    fn example_coefficients_and_lhs() {
        let coeffs = classify_smq(&example(), DEFAULT_EPS_ZERO).unwrap();
        assert_abs_diff_eq!(coeffs.get(0b111).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(smq_lhs(&coeffs, 1.0).unwrap(), 16.0, epsilon = 1e-12);
        assert_eq!(lhs_polynomial(&coeffs), vec![(4, 16.0)]);
        assert!(smq_lhs(&coeffs, 0.0).is_err());
        assert!(smq_lhs(&coeffs, 1e-6).unwrap() < 1e-20);
    }

    #[test]
    fn example_b_upper() {
        let coeffs = classify_smq(&example(), DEFAULT_EPS_ZERO).unwrap();
        let r = solve_b_upper(&coeffs);
        assert_eq!(r.method, BoundMethod::ExactBisection);
        assert_abs_diff_eq!(r.b_upper, (3.0f64 / 32.0).powf(0.25), epsilon = 1e-11);
        assert_abs_diff_eq!(smq_lhs(&coeffs, r.b_upper).unwrap(), 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(simplified_b_bound(&coeffs), (3.0f64 / 32.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn pseudo_w_is_unbounded() {
        let pw = states::make_named(&NamedState::PseudoW { coeffs: vec![[1.0, 0.0], [0.0, 2.0], [3.0, 0.0]] }).unwrap();
        let coeffs = classify_smq(&pw, DEFAULT_EPS_ZERO).unwrap();
        assert_eq!(smq_lhs(&coeffs, 5.0).unwrap(), 0.0);
        let r = solve_b_upper(&coeffs);
        assert!(r.b_upper.is_infinite());
        assert_eq!(r.method, BoundMethod::PseudoWUnbounded);
        assert_eq!(simplified_b_bound(&coeffs), 1.0);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"b_upper\":\"inf\""), "{json}");
        let back: SmqInequalityReport = serde_json::from_str(&json).unwrap();
        assert!(back.b_upper.is_infinite());
    }

    #[test]
    fn perturbed_w4_has_large_finite_bound() {
        let mut amps = states::make_named(&NamedState::W { n: 4 }).unwrap().amplitudes().to_vec();
        amps[0b1100] = c(1e-3, 0.0);
        let s = PureState::new(4, amps).unwrap().normalized().unwrap();
        let r = solve_b_upper(&classify_smq(&s, DEFAULT_EPS_ZERO).unwrap());
        assert!(r.b_upper.is_finite() && r.b_upper > 10.0, "{}", r.b_upper);
    }

    #[test]
    fn w_smq_detects_and_respects_range() {
        let s = example();
        let coeffs = classify_smq(&s, DEFAULT_EPS_ZERO).unwrap();
        let w = build_w_smq(&coeffs, 0.3).unwrap();
        assert!(w.expectation(&s).unwrap() < 0.0);
        assert!(w.hermiticity_defect() < 1e-14);
        assert!(matches!(build_w_smq(&coeffs, 0.6), Err(Error::BOutOfRange { .. })));
        assert!(build_w_smq(&coeffs, -1.0).is_err());
    }

    #[test]
    fn w_smq_for_w_state_is_scaled_w_witness() {
        let n = 4;
        let w = states::make_named(&NamedState::W { n }).unwrap();
        let coeffs = classify_smq(&w, DEFAULT_EPS_ZERO).unwrap();
        let ws = build_w_smq(&coeffs, 0.5).unwrap();
        // D = diag(1, 0.5 * 2) = identity
        let base = witness::w_n_witness(n).unwrap();
        assert!(linalg::max_abs_diff(ws.matrix(), base.matrix()) < 1e-14);
        assert_abs_diff_eq!(ws.expectation(&w).unwrap(), -1.0 / n as f64, epsilon = 1e-14);
    }

    #[test]
    fn expectation_identity() {
        // <Φ|W_SMQ|Φ> = -N b^2 + ((N-1)/N) R(b) with R = Σ_p |a_p|^2 ∏ |b/a_{1,k}|^2 over p
        let s = example();
        let coeffs = classify_smq(&s, DEFAULT_EPS_ZERO).unwrap();
        for b in [0.1, 0.3, 0.5] {
            let w = build_w_smq(&coeffs, b).unwrap();
            let r: f64 = coeffs
                .by_pattern()
                .iter()
                .map(|(&p, a)| {
                    let m = p.count_ones() as i32;
                    a.norm_sqr() * b.powi(2 * m) / (0..3).filter(|&k| linalg::bit(p, 3, k) == 1).map(|k| coeffs.weight_one(k).norm_sqr()).product::<f64>()
                })
                .sum();
            assert_abs_diff_eq!(w.expectation(&s).unwrap(), -3.0 * b * b + (2.0 / 3.0) * r, epsilon = 1e-12);
        }
    }
}
