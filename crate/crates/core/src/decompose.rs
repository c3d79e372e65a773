//! Local measurement settings `M_k = Σ_s w_s |a_s><a_s|` over product bases, and
//! decompositions of W-type witnesses into them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64, Mat, Mat2, ONE, ZERO};
use crate::states::{LocalOperator, LocalOperatorChain};
use crate::witness::Witness;

const ORTHONORMAL_TOL: f64 = 1e-12;

/// One product measurement basis with a real weight per joint outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSetting {
    pub label: String,
    /// Column `j` of qubit `k`'s matrix is the basis vector for outcome `j`.
    pub qubit_bases: Vec<LocalOperator>,
    /// Indexed by outcome string, qubit 0 most significant.
    pub weights: Vec<f64>,
    /// False when a basis is not orthonormal (conjugation by a non-unitary operator).
    pub realizable: bool,
}

impl LocalSetting {
    pub fn new(label: impl Into<String>, bases: Vec<Mat2>, weights: Vec<f64>) -> Result<Self> {
        let n = bases.len();
        if weights.len() != 1 << n {
            return Err(Error::Dimension { expected: 1 << n, actual: weights.len() });
        }
        let realizable = bases.iter().all(|b| basis_defect(b) <= ORTHONORMAL_TOL);
        Ok(Self {
            label: label.into(),
            qubit_bases: bases.into_iter().map(LocalOperator::from_matrix).collect(),
            weights,
            realizable,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_bases.len()
    }

    /// `(⊗B_k) diag(w) (⊗B_k)^†`.
    pub fn operator(&self) -> Mat {
        let n = self.n_qubits();
        let dim = 1 << n;
        let mut m = Mat::from_fn(dim, dim, |r, col| if r == col { c(self.weights[r], 0.0) } else { ZERO });
        for (k, b) in self.qubit_bases.iter().enumerate() {
            linalg::apply_local_left(&mut m, n, k, b.matrix());
            linalg::apply_local_right(&mut m, n, k, &b.matrix().adjoint());
        }
        m
    }

    /// Per-qubit observable `B diag(1, -1) B^†` whose eigenbasis is measured.
    pub fn observables(&self) -> Vec<Mat2> {
        self.qubit_bases
            .iter()
            .map(|b| b.matrix() * linalg::pauli_z() * b.matrix().adjoint())
            .collect()
    }

    pub fn max_basis_defect(&self) -> f64 {
        self.qubit_bases.iter().map(|b| basis_defect(b.matrix())).fold(0.0, f64::max)
    }
}

fn basis_defect(b: &Mat2) -> f64 {
    linalg::mat2_max_abs(&(b.adjoint() * b - Mat2::identity()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingDecomposition {
    pub settings: Vec<LocalSetting>,
    pub declared_count: usize,
}

impl SettingDecomposition {
    pub fn new(settings: Vec<LocalSetting>) -> Self {
        let declared_count = settings.len();
        Self { settings, declared_count }
    }

    pub fn count(&self) -> usize {
        self.settings.len()
    }

    pub fn is_realizable(&self) -> bool {
        self.settings.iter().all(|s| s.realizable)
    }

    /// Max elementwise `|Σ M_k - W|`.
    pub fn residual(&self, w: &Witness) -> Result<f64> {
        Ok(linalg::max_abs_diff(&reconstruct(self)?, w.matrix()))
    }
}

pub fn reconstruct(dec: &SettingDecomposition) -> Result<Mat> {
    let first = dec.settings.first().ok_or_else(|| Error::Parameter("empty decomposition".into()))?;
    let dim = 1 << first.n_qubits();
    let mut total = Mat::zeros(dim, dim);
    for s in &dec.settings {
        if s.n_qubits() != first.n_qubits() {
            return Err(Error::Dimension { expected: first.n_qubits(), actual: s.n_qubits() });
        }
        total += s.operator();
    }
    Ok(total)
}

pub fn z_basis() -> Mat2 {
    Mat2::identity()
}

pub fn x_basis() -> Mat2 {
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2::new(h, h, h, -h)
}

pub fn y_basis() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(h, 0.0), c(h, 0.0), c(0.0, h), c(0.0, -h))
}

/// Eigenbasis of `(σ_z + sign σ_x)/√2` (or with `σ_y`), `+1` eigenvector first.
fn tilted_basis(transverse: Mat2, sign: f64) -> Mat2 {
    let n_sigma = (linalg::pauli_z() + transverse * c(sign, 0.0)) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (_, v) = linalg::min_eigvec2(&(-n_sigma));
    Mat2::new(v[0], -v[1].conj(), v[1], v[0].conj())
}

fn spin(outcome: usize, n: usize, q: usize) -> f64 {
    if linalg::bit(outcome, n, q) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Decomposition of `D^† W_{W_N} D` with `D = ⊗ diag(1, d_k)` into `N^2 - N + 1` settings:
/// one `σ_z^{⊗N}` setting carrying every diagonal term, and an `XX` and a `YY` setting per
/// pair with `|0><0|` elsewhere. Complex `conj(d_i) d_j` phases rotate qubit `i`'s basis.
pub fn universal_diagonal_conjugated(d: &[C64]) -> Result<SettingDecomposition> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Parameter("needs at least 2 qubits".into()));
    }
    let nf = n as f64;
    let dim = 1usize << n;
    let scale = |s: usize| -> f64 {
        (0..n).filter(|&k| linalg::bit(s, n, k) == 1).map(|k| d[k].norm_sqr()).product()
    };
    let z_weights = (0..dim)
        .map(|s| {
            let single = if s.count_ones() == 1 { 1.0 / nf } else { 0.0 };
            ((nf - 1.0) / nf - single) * scale(s)
        })
        .collect();
    let mut settings = vec![LocalSetting::new("z", vec![z_basis(); n], z_weights)?];
    for i in 0..n {
        for j in (i + 1)..n {
            let cij = d[i].conj() * d[j];
            let r = cij.norm();
            // |e_i><e_j| carries conj(d_i) d_j; rotate qubit i by diag(1, e^{iφ})
            let phase = Mat2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, cij.arg()));
            for (label, basis) in [("xx", x_basis()), ("yy", y_basis())] {
                let mut bases = vec![z_basis(); n];
                bases[i] = phase * basis;
                bases[j] = basis;
                let weights = (0..dim)
                    .map(|s| {
                        let rest_zero = (0..n).filter(|&k| k != i && k != j).all(|k| linalg::bit(s, n, k) == 0);
                        if rest_zero {
                            -r / (2.0 * nf) * spin(s, n, i) * spin(s, n, j)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                settings.push(LocalSetting::new(format!("{label}({i},{j})"), bases, weights)?);
            }
        }
    }
    Ok(SettingDecomposition::new(settings))
}

/// The `N^2 - N + 1` setting decomposition of `W_{W_N}`.
pub fn universal_w_decomposition(n: usize) -> Result<SettingDecomposition> {
    universal_diagonal_conjugated(&vec![ONE; n])
}

/// Weight of outcome `(s_0, s_1, s_2)` in the `σ_z^{⊗3}` setting of the 5-setting `W_{W_3}` form.
fn w3_z_weight(s: [f64; 3]) -> f64 {
    let sum = s[0] + s[1] + s[2];
    let pairs = s[0] * s[1] + s[0] * s[2] + s[1] * s[2];
    (17.0 + 7.0 * s[0] * s[1] * s[2] + 3.0 * sum + 5.0 * pairs) / 24.0
}

fn w3_tilted_settings() -> Vec<(String, Mat2, [f64; 2])> {
    let r2 = std::f64::consts::SQRT_2;
    // I + σ_z ± σ_t = I + √2 n·σ has eigenvalues 1 ± √2
    let eig = [1.0 + r2, 1.0 - r2];
    vec![
        ("z+x".into(), tilted_basis(linalg::pauli_x(), 1.0), eig),
        ("z-x".into(), tilted_basis(linalg::pauli_x(), -1.0), eig),
        ("z+y".into(), tilted_basis(linalg::pauli_y(), 1.0), eig),
        ("z-y".into(), tilted_basis(linalg::pauli_y(), -1.0), eig),
    ]
}

/// Five settings: `σ_z^{⊗3}` with weights `(17 + 7 s_0 s_1 s_2 + 3 Σ s_i + 5 Σ s_i s_j)/24`, and
/// `-(1/24)(I + σ_z ± σ_x)^{⊗3}`, `-(1/24)(I + σ_z ± σ_y)^{⊗3}`.
pub fn optimal_w3_decomposition() -> Result<SettingDecomposition> {
    let n = 3;
    let z_weights = (0..8).map(|s| w3_z_weight([spin(s, n, 0), spin(s, n, 1), spin(s, n, 2)])).collect();
    let mut settings = vec![LocalSetting::new("z", vec![z_basis(); 3], z_weights)?];
    for (label, basis, eig) in w3_tilted_settings() {
        let weights = (0..8)
            .map(|s| -(0..3).map(|q| eig[linalg::bit(s, n, q)]).product::<f64>() / 24.0)
            .collect();
        settings.push(LocalSetting::new(label, vec![basis; 3], weights)?);
    }
    Ok(SettingDecomposition::new(settings))
}

/// Eleven settings for `W_{W_4}` via `-(3/4)|W_3><W_3| ⊗ P_0 = -(1/2) I ⊗ P_0 + (3/4) W_{W_3} ⊗ P_0`:
/// the merged `σ_z^{⊗4}` setting, the four tilted `W_3` settings with `|0><0|` on qubit 3,
/// and an `XX`/`YY` pair for each exchange `(i, 3)`.
pub fn improved_w4_decomposition() -> Result<SettingDecomposition> {
    let n = 4;
    let z_weights = (0..16)
        .map(|s: usize| {
            let last_zero = linalg::bit(s, n, 3) == 0;
            let mut w = 0.75;
            if last_zero {
                w += -0.5 + 0.75 * w3_z_weight([spin(s, n, 0), spin(s, n, 1), spin(s, n, 2)]);
            }
            if s == 1 {
                w -= 0.25;
            }
            w
        })
        .collect();
    let mut settings = vec![LocalSetting::new("z", vec![z_basis(); 4], z_weights)?];
    for (label, basis, eig) in w3_tilted_settings() {
        let weights = (0..16)
            .map(|s| {
                if linalg::bit(s, n, 3) == 1 {
                    0.0
                } else {
                    -0.75 * (0..3).map(|q| eig[linalg::bit(s, n, q)]).product::<f64>() / 24.0
                }
            })
            .collect();
        let mut bases = vec![basis; 3];
        bases.push(z_basis());
        settings.push(LocalSetting::new(label, bases, weights)?);
    }
    for i in 0..3 {
        for (label, basis) in [("xx", x_basis()), ("yy", y_basis())] {
            let mut bases = vec![z_basis(); 4];
            bases[i] = basis;
            bases[3] = basis;
            let weights = (0..16)
                .map(|s| {
                    let rest_zero = (0..3).filter(|&k| k != i).all(|k| linalg::bit(s, n, k) == 0);
                    if rest_zero {
                        -0.125 * spin(s, n, i) * spin(s, n, 3)
                    } else {
                        0.0
                    }
                })
                .collect();
            settings.push(LocalSetting::new(format!("{label}({i},3)"), bases, weights)?);
        }
    }
    Ok(SettingDecomposition::new(settings))
}

/// `M'_k = (⊗A^†) M_k (⊗A)`: each basis becomes `A^† B`, so `Σ M'_k = chain^† W chain`.
pub fn conjugated_settings(dec: &SettingDecomposition, chain: &LocalOperatorChain) -> Result<SettingDecomposition> {
    let settings = dec
        .settings
        .iter()
        .map(|s| {
            if s.n_qubits() != chain.len() {
                return Err(Error::Dimension { expected: s.n_qubits(), actual: chain.len() });
            }
            let bases = s
                .qubit_bases
                .iter()
                .zip(chain.ops())
                .map(|(b, a)| a.matrix().adjoint() * b.matrix())
                .collect();
            let mut out = LocalSetting::new(s.label.clone(), bases, s.weights.clone())?;
            out.realizable &= s.realizable;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SettingDecomposition::new(settings))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Universal,
    W3opt,
    W4improved,
}

/// Splits a frame `F = D U` into the diagonal `d_k` of `D = diag(1, d_k)` given the unitary `U`.
fn diagonal_part(frame: &LocalOperatorChain, unitary: &LocalOperatorChain) -> Option<Vec<C64>> {
    let d = frame.compose(&unitary.adjoint()).ok()?;
    d.ops()
        .iter()
        .map(|op| {
            let m = op.matrix();
            let scale = linalg::mat2_max_abs(m);
            let off = m[(0, 1)].norm().max(m[(1, 0)].norm());
            if off > 1e-10 * scale || m[(0, 0)].norm() <= 1e-300 {
                return None;
            }
            ((m[(0, 0)] - ONE).norm() <= 1e-10).then(|| m[(1, 1)] / m[(0, 0)])
        })
        .collect()
}

/// Decomposes a witness carrying a frame `F` (`W = F^† W_{W_N} F`).
///
/// When `F = D U` with `D = ⊗diag(1, d_k)` and `U` the recorded unitary chain, the settings are
/// built for `D^† W_{W_N} D` and conjugated by `U`, so they stay orthonormal. Otherwise the
/// settings are conjugated by `F` directly and flagged not realizable.
pub fn decompose_witness(w: &Witness, scheme: Scheme) -> Result<SettingDecomposition> {
    let n = w.n_qubits();
    let frame = w
        .params()
        .frame
        .clone()
        .ok_or_else(|| Error::Parameter("witness carries no W-witness frame to decompose".into()))?;
    let unitary = w.params().chain.clone().unwrap_or_else(|| LocalOperatorChain::identity(n));
    let diag = diagonal_part(&frame, &unitary);
    let is_plain = |d: &[C64]| d.iter().all(|z| (z - ONE).norm() <= 1e-10);
    let base = match scheme {
        Scheme::Universal => match &diag {
            Some(d) => return conjugated_settings(&universal_diagonal_conjugated(d)?, &unitary),
            None => universal_w_decomposition(n)?,
        },
        Scheme::W3opt => {
            if n != 3 {
                return Err(Error::Parameter(format!("w3opt needs 3 qubits, witness has {n}")));
            }
            optimal_w3_decomposition()?
        }
        Scheme::W4improved => {
            if n != 4 {
                return Err(Error::Parameter(format!("w4improved needs 4 qubits, witness has {n}")));
            }
            improved_w4_decomposition()?
        }
    };
    match diag {
        Some(d) if is_plain(&d) => conjugated_settings(&base, &unitary),
        _ => conjugated_settings(&base, &frame),
    }
}
