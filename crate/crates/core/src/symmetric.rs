//! Permutation-symmetric states: Dicke-basis expansion, the pure-state separability dichotomy,
//! and three mixed symmetric examples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64, Mat, ZERO};
use crate::states::{self, DensityOperator, PureState};

pub const DEFAULT_FIT_TOL: f64 = 1e-8;

/// Coefficients `c_m` of `Σ_m c_m |m, N>`, `m = 0..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsmqCoefficients {
    n_qubits: usize,
    coeffs: Vec<C64>,
}

impl PsmqCoefficients {
    pub fn new(n_qubits: usize, coeffs: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 24 {
            return Err(Error::Parameter(format!("unsupported qubit count {n_qubits}")));
        }
        if coeffs.len() != n_qubits + 1 {
            return Err(Error::Dimension { expected: n_qubits + 1, actual: coeffs.len() });
        }
        if coeffs.iter().all(|z| *z == ZERO) {
            return Err(Error::ZeroState);
        }
        Ok(Self { n_qubits, coeffs })
    }

    /// Binomial pattern `√C(N,m) a^{N-m} b^m`, the Dicke expansion of `(a|0> + b|1>)^{⊗N}`.
    pub fn product(n_qubits: usize, a: C64, b: C64) -> Result<Self> {
        let coeffs = (0..=n_qubits)
            .map(|m| a.powu((n_qubits - m) as u32) * b.powu(m as u32) * states::binomial(n_qubits, m).sqrt())
            .collect();
        Self::new(n_qubits, coeffs)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.coeffs)
    }

    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        Self { n_qubits: self.n_qubits, coeffs: self.coeffs.iter().map(|z| z / norm).collect() }
    }
}

pub fn psmq_state(coeffs: &PsmqCoefficients) -> Result<PureState> {
    let n = coeffs.n_qubits;
    let amps = (0..1usize << n)
        .map(|i| {
            let m = i.count_ones() as usize;
            coeffs.coeffs[m] / states::binomial(n, m).sqrt()
        })
        .collect();
    PureState::new(n, amps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PsmqVerdict {
    FullyEntangled,
    /// `(a|0> + b|1>)^{⊗N}` up to normalization of the input.
    FullySeparable { a: C64, b: C64 },
}

impl PsmqVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, Self::FullySeparable { .. })
    }
}

/// Fits the binomial pattern from the ratio `c_{m+1}/c_m = (b/a) √((N-m)/(m+1))` at the
/// largest consecutive pair, then checks every coefficient at `tol` (relative to the norm).
pub fn psmq_classify(coeffs: &PsmqCoefficients, tol: f64) -> PsmqVerdict {
    let n = coeffs.n_qubits;
    let c_m = coeffs.normalized().coeffs;
    let nonzero: Vec<usize> = (0..=n).filter(|&m| c_m[m].norm() > tol).collect();
    if nonzero.len() == 1 {
        let m = nonzero[0];
        return match m {
            0 => PsmqVerdict::FullySeparable { a: nth_root(c_m[0], n), b: ZERO },
            _ if m == n => PsmqVerdict::FullySeparable { a: ZERO, b: nth_root(c_m[n], n) },
            _ => PsmqVerdict::FullyEntangled,
        };
    }
    let m = (0..n)
        .max_by(|&x, &y| (c_m[x].norm() * c_m[x + 1].norm()).total_cmp(&(c_m[y].norm() * c_m[y + 1].norm())))
        .expect("N >= 1");
    if c_m[m].norm() <= tol || c_m[m + 1].norm() <= tol {
        return PsmqVerdict::FullyEntangled;
    }
    let ratio = c_m[m + 1] / c_m[m] * (((m + 1) as f64) / ((n - m) as f64)).sqrt();
    let pattern: Vec<C64> = (0..=n).map(|k| ratio.powu(k as u32) * states::binomial(n, k).sqrt()).collect();
    let pp: f64 = pattern.iter().map(|z| z.norm_sqr()).sum();
    let lambda: C64 = pattern.iter().zip(&c_m).map(|(p, x)| p.conj() * x).sum::<C64>() / pp;
    let misfit = pattern.iter().zip(&c_m).map(|(p, x)| (x - lambda * p).norm()).fold(0.0, f64::max);
    if misfit > tol {
        return PsmqVerdict::FullyEntangled;
    }
    let a = nth_root(lambda, n);
    PsmqVerdict::FullySeparable { a, b: ratio * a }
}

fn nth_root(z: C64, n: usize) -> C64 {
    C64::from_polar(z.norm().powf(1.0 / n as f64), z.arg() / n as f64)
}

/// Swaps the bits of `qubit` and `qubit + 1` in a basis index.
fn swap_adjacent(index: usize, n: usize, qubit: usize) -> usize {
    let (s0, s1) = (linalg::stride(n, qubit), linalg::stride(n, qubit + 1));
    let (b0, b1) = (index & s0 != 0, index & s1 != 0);
    if b0 == b1 {
        index
    } else {
        index ^ s0 ^ s1
    }
}

/// Invariance under every adjacent transposition, which generate all permutations.
pub fn is_permutation_symmetric(rho: &DensityOperator, tol: f64) -> bool {
    let n = rho.n_qubits();
    let m = rho.matrix();
    let dim = m.nrows();
    (0..n.saturating_sub(1)).all(|q| {
        (0..dim).all(|r| {
            (0..dim).all(|col| (m[(swap_adjacent(r, n, q), swap_adjacent(col, n, q))] - m[(r, col)]).norm() <= tol)
        })
    })
}

fn projector_sum(terms: &[(f64, &[(&str, f64)])]) -> Result<DensityOperator> {
    let mut m = Mat::zeros(8, 8);
    for (weight, vector) in terms {
        let v = PureState::from_terms(3, &vector.iter().map(|(s, a)| (*s, c(*a, 0.0))).collect::<Vec<_>>())?;
        m += linalg::outer(v.amplitudes()).scale(*weight);
    }
    DensityOperator::new(3, m)
}

/// `(ρ_1, ρ_2, ρ_3)`: an NPT symmetric mixture, the separable GHZ-diagonal mixture, and the
/// symmetric PPT edge state.
pub fn msmq_examples() -> Result<[DensityOperator; 3]> {
    let ghz_unnorm: &[(&str, f64)] = &[("000", 1.0), ("111", 1.0)];
    let rho1 = projector_sum(&[(1.0 / 3.0, ghz_unnorm), (1.0 / 3.0, &[("111", 1.0)])])?;
    let rho2 = projector_sum(&[(0.5, &[("000", 1.0)]), (0.5, &[("111", 1.0)])])?;
    let k = 2.0 / 19.0;
    let rho3 = projector_sum(&[
        (k, ghz_unnorm),
        (2.0 * k, &[("001", 1.0)]),
        (2.0 * k, &[("010", 1.0)]),
        (2.0 * k, &[("100", 1.0)]),
        (0.5 * k, &[("011", 1.0)]),
        (0.5 * k, &[("101", 1.0)]),
        (0.5 * k, &[("110", 1.0)]),
    ])?;
    Ok([rho1, rho2, rho3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{Bipartition, NamedState};
    use approx::assert_abs_diff_eq;

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn dicke_expansions() {
        let w = psmq_state(&PsmqCoefficients::new(3, real(&[0.0, 1.0, 0.0, 0.0])).unwrap()).unwrap();
        assert!(w.distance_up_to_phase(&states::make_named(&NamedState::W { n: 3 }).unwrap()) < 1e-15);
        let zero = psmq_state(&PsmqCoefficients::new(3, real(&[1.0, 0.0, 0.0, 0.0])).unwrap()).unwrap();
        assert_eq!(zero.amplitude(0), c(1.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = psmq_state(&PsmqCoefficients::product(4, c(h, 0.0), c(h, 0.0)).unwrap()).unwrap();
        for a in plus.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn classification() {
        let d24 = PsmqCoefficients::new(4, real(&[0.0, 0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(psmq_classify(&d24, DEFAULT_FIT_TOL), PsmqVerdict::FullyEntangled);
        let prod = PsmqCoefficients::product(5, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        match psmq_classify(&prod, DEFAULT_FIT_TOL) {
            PsmqVerdict::FullySeparable { a, b } => assert!((b / a - c(0.0, 4.0 / 3.0)).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
        let odd = PsmqCoefficients::new(3, real(&[0.0, 1.0, 0.0, 1.0])).unwrap();
        assert_eq!(psmq_classify(&odd, DEFAULT_FIT_TOL), PsmqVerdict::FullyEntangled);
        let top = PsmqCoefficients::new(3, real(&[0.0, 0.0, 0.0, 2.0])).unwrap();
        assert!(psmq_classify(&top, DEFAULT_FIT_TOL).is_separable());
    }

    #[test]
    fn symmetry_checks() {
        let w = states::make_named(&NamedState::W { n: 3 }).unwrap().density();
        assert!(is_permutation_symmetric(&w, 1e-12));
        assert!(!is_permutation_symmetric(&PureState::basis(3, 0b011).unwrap().density(), 1e-12));
    }

    #[test]
    fn mixed_examples() {
        let [rho1, rho2, rho3] = msmq_examples().unwrap();
        for rho in [&rho1, &rho2, &rho3] {
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
            assert!(rho.eigenvalues()[0] >= -1e-12);
            assert!(is_permutation_symmetric(rho, 1e-12));
        }
        for cut in Bipartition::all_canonical(3) {
            let e = states::min_partial_transpose_eigenvalue(&rho1, &cut).unwrap();
            assert_abs_diff_eq!(e, -1.0 / 3.0, epsilon = 1e-12);
        }
        assert!(states::is_ppt_everywhere(&rho2, 1e-12).unwrap());
        assert!(states::is_ppt_everywhere(&rho3, 1e-12).unwrap());
    }
}
