//! Small dense complex linear-algebra helpers shared across modules.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    frobenius(&(m.adjoint() * m - identity(m.nrows())))
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    frobenius(&(m - m.adjoint()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Closest unitary in Frobenius norm (unitary polar factor).
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    u * v_t
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let diag = CMatrix::from_fn(n, n, |i, j| if i == j { c(f(vals[i]), 0.0) } else { C64::default() });
    &vecs * diag * vecs.adjoint()
}

/// `exp(iθH)` for Hermitian `H`.
pub fn unitary_exp(h: &CMatrix, theta: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let n = h.nrows();
    let diag = CMatrix::from_fn(n, n, |i, j| if i == j { C64::from_polar(1.0, theta * vals[i]) } else { C64::default() });
    &vecs * diag * vecs.adjoint()
}

/// Eigenvalues of a general square matrix sorted by descending modulus.
pub fn eigenvalues_by_modulus(m: &CMatrix) -> Vec<C64> {
    let mut vals: Vec<C64> = match m.clone().schur().eigenvalues() {
        Some(v) => v.iter().cloned().collect(),
        None => Vec::new(),
    };
    vals.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    vals
}

/// Haar-ish random unitary from the QR decomposition of a Gaussian-like matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    polar_unitary(&m)
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

/// Spin-s matrices (Sx, Sy, Sz) for `two_s = 2s`, basis ordered m = s, s-1, ..., -s.
pub fn spin_matrices(two_s: usize) -> (CMatrix, CMatrix, CMatrix) {
    let dim = two_s + 1;
    let s = two_s as f64 / 2.0;
    let m_of = |k: usize| s - k as f64;
    let mut sp = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, |m+1> is index k-1
        let m = m_of(k);
        sp[(k - 1, k)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * c(0.5, 0.0);
    let sy = (&sp - &sm) * c(0.0, -0.5);
    let sz = CMatrix::from_fn(dim, dim, |i, j| if i == j { c(m_of(i), 0.0) } else { C64::default() });
    (sx, sy, sz)
}

pub fn pauli() -> (CMatrix, CMatrix, CMatrix) {
    let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let y = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    (x, y, z)
}
