//! Dense complex helpers shared by the state and witness code.
//!
//! All multiqubit indices put qubit 0 in the most significant bit.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Mat2 = Matrix2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit of `qubit` in the basis index `index` of an `n`-qubit register.
#[inline]
pub fn bit(index: usize, n: usize, qubit: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

#[inline]
pub fn stride(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn id2() -> Mat2 {
    Mat2::identity()
}

/// Applies a 2x2 operator to `qubit` of an amplitude vector in place.
pub fn apply_local_vec(v: &mut [C64], n: usize, qubit: usize, op: &Mat2) {
    let s = stride(n, qubit);
    for i in 0..v.len() {
        if i & s != 0 {
            continue;
        }
        let j = i | s;
        let (a, b) = (v[i], v[j]);
        v[i] = op[(0, 0)] * a + op[(0, 1)] * b;
        v[j] = op[(1, 0)] * a + op[(1, 1)] * b;
    }
}

/// `M <- (op on qubit) * M`.
pub fn apply_local_left(m: &mut Mat, n: usize, qubit: usize, op: &Mat2) {
    let s = stride(n, qubit);
    let dim = m.nrows();
    for col in 0..m.ncols() {
        for i in 0..dim {
            if i & s != 0 {
                continue;
            }
            let j = i | s;
            let (a, b) = (m[(i, col)], m[(j, col)]);
            m[(i, col)] = op[(0, 0)] * a + op[(0, 1)] * b;
            m[(j, col)] = op[(1, 0)] * a + op[(1, 1)] * b;
        }
    }
}

/// `M <- M * (op on qubit)`.
pub fn apply_local_right(m: &mut Mat, n: usize, qubit: usize, op: &Mat2) {
    let s = stride(n, qubit);
    let dim = m.ncols();
    for row in 0..m.nrows() {
        for i in 0..dim {
            if i & s != 0 {
                continue;
            }
            let j = i | s;
            let (a, b) = (m[(row, i)], m[(row, j)]);
            m[(row, i)] = a * op[(0, 0)] + b * op[(1, 0)];
            m[(row, j)] = a * op[(0, 1)] + b * op[(1, 1)];
        }
    }
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_all<'a, I>(ops: I) -> Mat
where
    I: IntoIterator<Item = &'a Mat2>,
{
    let mut out = Mat::from_element(1, 1, ONE);
    for op in ops {
        let m = Mat::from_fn(2, 2, |r, c| op[(r, c)]);
        out = out.kronecker(&m);
    }
    out
}

pub fn outer(v: &[C64]) -> Mat {
    let d = v.len();
    Mat::from_fn(d, d, |r, c| v[r] * v[c].conj())
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &Mat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitize(m: &Mat) -> Mat {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &Mat) -> C64 {
    m.diagonal().iter().sum()
}

/// `<v|M|v>` for Hermitian `M`, real part.
pub fn expectation(m: &Mat, v: &[C64]) -> f64 {
    let d = v.len();
    let mut acc = ZERO;
    for r in 0..d {
        if v[r] == ZERO {
            continue;
        }
        let mut row = ZERO;
        for c in 0..d {
            row += m[(r, c)] * v[c];
        }
        acc += v[r].conj() * row;
    }
    acc.re
}

/// Tr(A B) without forming the product.
pub fn trace_product(a: &Mat, b: &Mat) -> C64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &Mat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Minimal eigenpair of a 2x2 Hermitian matrix in closed form.
pub fn min_eigvec2(m: &Mat2) -> (f64, [C64; 2]) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    let lambda = 0.5 * (a + d) - r;
    if b.norm() <= 1e-300 {
        return if a <= d { (a, [ONE, ZERO]) } else { (d, [ZERO, ONE]) };
    }
    // (a - lambda) x + b y = 0 -> pick the better-conditioned row
    let v = if (a - lambda).abs() >= (d - lambda).abs() {
        [-b, c(a - lambda, 0.0)]
    } else {
        [c(d - lambda, 0.0), -b.conj()]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (lambda, [v[0] / norm, v[1] / norm])
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_application_matches_kron() {
        let n = 3;
        let op = Mat2::new(c(1.0, 0.5), c(-0.3, 0.0), c(0.2, 0.1), c(0.7, -1.0));
        let v: Vec<C64> = (0..8).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        for q in 0..n {
            let mut ops = vec![id2(); n];
            ops[q] = op;
            let full = kron_all(ops.iter());
            let expected = &full * nalgebra::DVector::from_vec(v.clone());
            let mut got = v.clone();
            apply_local_vec(&mut got, n, q, &op);
            for i in 0..8 {
                assert!((got[i] - expected[i]).norm() < 1e-12);
            }

            let m = Mat::from_fn(8, 8, |r, c2| c(r as f64 - c2 as f64, (r * c2) as f64));
            let mut left = m.clone();
            apply_local_left(&mut left, n, q, &op);
            assert!(max_abs_diff(&left, &(&full * &m)) < 1e-12);
            let mut right = m.clone();
            apply_local_right(&mut right, n, q, &op);
            assert!(max_abs_diff(&right, &(&m * &full)) < 1e-12);
        }
    }

    #[test]
    fn closed_form_min_eigenvector() {
        let m = Mat2::new(c(0.3, 0.0), c(0.2, -0.7), c(0.2, 0.7), c(-1.1, 0.0));
        let (lambda, v) = min_eigvec2(&m);
        let full = Mat::from_fn(2, 2, |r, c2| m[(r, c2)]);
        let vals = hermitian_eigenvalues(&full);
        assert!((lambda - vals[0]).abs() < 1e-12);
        let mv0 = m[(0, 0)] * v[0] + m[(0, 1)] * v[1];
        let mv1 = m[(1, 0)] * v[0] + m[(1, 1)] * v[1];
        assert!((mv0 - v[0] * lambda).norm() < 1e-12);
        assert!((mv1 - v[1] * lambda).norm() < 1e-12);
    }
}
