//! Seeded random states and operators for property tests and self-checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, C64, Mat, ZERO};
use crate::states::{self, DensityOperator, LocalOperator, LocalOperatorChain, PureState};
use crate::symmetric::PsmqCoefficients;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::new(n, amps).and_then(|s| s.normalized()).expect("nonzero Gaussian vector")
}

/// Random SMQ state; each higher-weight amplitude is kept with probability `density`.
pub fn random_smq_state<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> PureState {
    loop {
        let amps: Vec<C64> = (0..1usize << n)
            .map(|i| match i.count_ones() {
                0 => ZERO,
                1 => gaussian(rng),
                _ if rng.random::<f64>() < density => gaussian(rng),
                _ => ZERO,
            })
            .collect();
        let s = PureState::new(n, amps).and_then(|s| s.normalized()).expect("nonzero vector");
        let weight_one_ok = (0..n).all(|k| s.amplitude(1 << (n - 1 - k)).norm() > 1e-6);
        if weight_one_ok {
            return s;
        }
    }
}

/// Random state whose every bipartition has Schmidt rank at least 2.
pub fn random_genuinely_entangled<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    loop {
        let s = random_state(n, rng);
        if states::is_genuinely_entangled(&s, states::DEFAULT_RANK_TOL).unwrap_or(false) {
            return s;
        }
    }
}

/// Gaussian 2x2 member with condition number at most `max_condition`.
pub fn random_local_operator<R: Rng + ?Sized>(max_condition: f64, rng: &mut R) -> LocalOperator {
    loop {
        let op = LocalOperator::new(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng));
        if op.is_invertible() && op.condition_number() <= max_condition {
            return op;
        }
    }
}

pub fn random_ilo_chain<R: Rng + ?Sized>(n: usize, max_condition: f64, rng: &mut R) -> LocalOperatorChain {
    LocalOperatorChain::new((0..n).map(|_| random_local_operator(max_condition, rng)).collect())
}

/// `G G^† / Tr` for a Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator {
    let dim = 1usize << n;
    let g = Mat::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(n, m.unscale(tr)).expect("Hermitian by construction")
}

/// Half product patterns, half generic Dicke-basis vectors (some with forced zeros).
pub fn random_psmq<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PsmqCoefficients {
    if rng.random::<bool>() {
        let (a, b) = (gaussian(rng), gaussian(rng));
        return PsmqCoefficients::product(n, a, b).expect("nonzero product");
    }
    loop {
        let coeffs: Vec<C64> = (0..=n)
            .map(|_| if rng.random::<f64>() < 0.3 { ZERO } else { gaussian(rng) })
            .collect();
        if let Ok(p) = PsmqCoefficients::new(n, coeffs) {
            return p.normalized();
        }
    }
}
