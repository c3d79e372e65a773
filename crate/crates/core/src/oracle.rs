//! See-saw estimates of a witness minimum over product and biseparable pure states.
//!
//! These are numerical oracles: the returned minimum is the best value found, not a
//! certified global bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, C64, Mat, Mat2, ZERO};
use crate::states::Bipartition;
use crate::witness::Witness;

pub const DEFAULT_RESTARTS: usize = 50;
pub const MAX_SWEEPS: usize = 200;
pub const CONVERGENCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub minimum: f64,
    pub restarts: usize,
    /// Best local vectors: one per qubit for product states, two sides for a cut.
    pub best_state: Vec<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<Bipartition>,
}

impl OracleReport {
    pub fn is_negative(&self, tol: f64) -> bool {
        self.minimum < -tol
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = linalg::vec_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn product_vector(parts: &[[C64; 2]]) -> Vec<C64> {
    let mut v = vec![linalg::ONE];
    for p in parts {
        v = v.iter().flat_map(|&a| [a * p[0], a * p[1]]).collect();
    }
    v
}

fn matvec(m: &Mat, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| m[(r, k)] * v[k]).sum()).collect()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn product_run(w: &Mat, n: usize, rng: &mut ChaCha8Rng) -> (f64, Vec<[C64; 2]>) {
    let mut parts: Vec<[C64; 2]> = (0..n)
        .map(|_| {
            let v = random_unit(rng, 2);
            [v[0], v[1]]
        })
        .collect();
    let mut energy = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut last = energy;
        for q in 0..n {
            let mut basis = parts.clone();
            basis[q] = [linalg::ONE, ZERO];
            let chi0 = product_vector(&basis);
            basis[q] = [ZERO, linalg::ONE];
            let chi1 = product_vector(&basis);
            let (w0, w1) = (matvec(w, &chi0), matvec(w, &chi1));
            let eff = Mat2::new(dot(&chi0, &w0), dot(&chi0, &w1), dot(&chi1, &w0), dot(&chi1, &w1));
            let (lambda, vec) = linalg::min_eigvec2(&eff);
            parts[q] = vec;
            last = lambda;
        }
        let improved = energy - last;
        energy = last;
        if improved.is_finite() && improved < CONVERGENCE {
            break;
        }
    }
    (energy, parts)
}

/// Minimum of `<φ_0...φ_{N-1}|W|φ_0...φ_{N-1}>` over product states, best of `restarts` see-saws.
pub fn min_over_product_states(w: &Witness, restarts: usize, seed: u64) -> OracleReport {
    let n = w.n_qubits();
    let m = w.matrix();
    let runs: Vec<(f64, Vec<[C64; 2]>)> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| product_run(m, n, &mut rng_for(seed, r)))
        .collect();
    let best = deterministic_min(runs.iter().map(|r| r.0));
    OracleReport {
        minimum: runs[best].0,
        restarts: restarts.max(1),
        best_state: runs[best].1.iter().map(|p| p.to_vec()).collect(),
        cut: None,
    }
}

fn deterministic_min(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Full-register index for each `(a, b)` pair of side-local indices.
fn joint_indices(cut: &Bipartition) -> Vec<Vec<usize>> {
    let n = cut.n_qubits();
    let side_a = cut.subset();
    let side_b = cut.complement();
    let place = |qubits: &[usize], local: usize| {
        qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
            let bit = (local >> (qubits.len() - 1 - pos)) & 1;
            acc | (bit * linalg::stride(n, q))
        })
    };
    (0..1usize << side_a.len())
        .map(|a| (0..1usize << side_b.len()).map(|b| place(side_a, a) | place(&side_b, b)).collect())
        .collect()
}

fn min_eigvec(m: &Mat) -> (f64, Vec<C64>) {
    let (values, vectors) = linalg::hermitian_eigen(m);
    (values[0], vectors.column(0).iter().copied().collect())
}

fn biseparable_run(w: &Mat, idx: &[Vec<usize>], rng: &mut ChaCha8Rng) -> (f64, Vec<C64>, Vec<C64>) {
    let (da, db) = (idx.len(), idx[0].len());
    let mut psi_a = random_unit(rng, da);
    let mut psi_b = random_unit(rng, db);
    let mut energy = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let eff_a = Mat::from_fn(da, da, |a, a2| {
            let mut s = ZERO;
            for b in 0..db {
                for b2 in 0..db {
                    s += psi_b[b].conj() * w[(idx[a][b], idx[a2][b2])] * psi_b[b2];
                }
            }
            s
        });
        psi_a = min_eigvec(&eff_a).1;
        let eff_b = Mat::from_fn(db, db, |b, b2| {
            let mut s = ZERO;
            for a in 0..da {
                for a2 in 0..da {
                    s += psi_a[a].conj() * w[(idx[a][b], idx[a2][b2])] * psi_a[a2];
                }
            }
            s
        });
        let (lambda, v) = min_eigvec(&eff_b);
        psi_b = v;
        let improved = energy - lambda;
        energy = lambda;
        if improved.is_finite() && improved < CONVERGENCE {
            break;
        }
    }
    (energy, psi_a, psi_b)
}

/// Minimum over pure states that are product across some bipartition, best over every
/// canonical cut and `restarts` see-saws per cut.
pub fn min_over_biseparable(w: &Witness, restarts: usize, seed: u64) -> OracleReport {
    let n = w.n_qubits();
    let m = w.matrix();
    let cuts = Bipartition::all_canonical(n);
    let restarts = restarts.max(1);
    let jobs: Vec<(usize, u64)> = (0..cuts.len()).flat_map(|k| (0..restarts as u64).map(move |r| (k, r))).collect();
    let tables: Vec<Vec<Vec<usize>>> = cuts.iter().map(joint_indices).collect();
    let runs: Vec<(f64, Vec<C64>, Vec<C64>)> = jobs
        .par_iter()
        .map(|&(k, r)| biseparable_run(m, &tables[k], &mut rng_for(seed, (k as u64) << 32 | r)))
        .collect();
    let best = deterministic_min(runs.iter().map(|r| r.0));
    OracleReport {
        minimum: runs[best].0,
        restarts,
        best_state: vec![runs[best].1.clone(), runs[best].2.clone()],
        cut: Some(cuts[jobs[best].0].clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, NamedState, PureState};
    use crate::witness::{self, Provenance, WitnessParams};
    use approx::assert_abs_diff_eq;

    fn minus_projector(state: &PureState, shift: f64) -> Witness {
        let dim = state.dim();
        let m = Mat::identity(dim, dim).scale(shift) - linalg::outer(state.amplitudes());
        Witness::new(state.n_qubits(), m, Provenance::WC, WitnessParams::default()).unwrap()
    }

    #[test]
    fn w_witness_nonnegative_on_products() {
        for n in 3..=5 {
            let r = min_over_product_states(&witness::w_n_witness(n).unwrap(), 20, 1);
            assert!(r.minimum >= -1e-7, "N={n}: {}", r.minimum);
        }
    }

    #[test]
    fn w3_product_overlap() {
        let w3 = states::make_named(&NamedState::W { n: 3 }).unwrap();
        let r = min_over_product_states(&minus_projector(&w3, 0.0), 50, 2);
        assert_abs_diff_eq!(r.minimum, -4.0 / 9.0, epsilon = 1e-8);
        let b = min_over_biseparable(&minus_projector(&w3, 0.0), 20, 2);
        assert_abs_diff_eq!(b.minimum, -2.0 / 3.0, epsilon = 1e-8);
    }

    #[test]
    fn biseparable_oracle_on_w3() {
        let w3 = states::make_named(&NamedState::W { n: 3 }).unwrap();
        let r = min_over_biseparable(&witness::projector_witness(&w3).unwrap(), 10, 4);
        assert!(r.minimum >= -1e-7, "{}", r.minimum);
        let r = min_over_biseparable(&minus_projector(&w3, 1.0 / 3.0), 10, 4);
        assert!(r.minimum < -1e-3);
    }

    #[test]
    fn deterministic_given_seed() {
        let w = witness::w_n_witness(3).unwrap();
        let a = min_over_product_states(&w, 8, 11);
        let b = min_over_product_states(&w, 8, 11);
        assert_eq!(a, b);
    }
}
