//! Dense complex linear algebra used throughout the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Absolute tolerance on matrix entries.
pub const ENTRY_TOL: f64 = 1e-9;
/// Relative tolerance for singular-value cutoffs.
pub const RANK_TOL: f64 = 1e-9;
/// Eigenvalue floor for positivity checks on Hermitian forms.
pub const PSD_FLOOR: f64 = -1e-8;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Maximum absolute entry of `a - b`. Shapes must agree.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix in ascending order. The input is
/// symmetrised first so small anti-Hermitian noise does not leak in.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * re(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().cloned().unwrap_or(0.0)
}

/// Singular-value cutoff: `RANK_TOL` times the largest singular value, or
/// `RANK_TOL` when the matrix is zero.
pub fn cutoff(singular: &[f64]) -> f64 {
    let smax = singular.iter().cloned().fold(0.0, f64::max);
    RANK_TOL * if smax > 0.0 { smax } else { 1.0 }
}

pub fn rank(m: &CMat) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    let tol = cutoff(&sv);
    sv.iter().filter(|s| **s > tol).count()
}

/// Orthonormal basis (as rows) of the orthogonal complement of the column
/// space of `m`. Rows are ordered by singular value, then by column index of
/// the left singular vector.
pub fn cokernel_rows(m: &CMat) -> CMat {
    let t = m.nrows();
    if t == 0 {
        return zeros(0, 0);
    }
    // pad to at least t columns so the SVD returns a full left basis
    let cols = m.ncols().max(t);
    let mut padded = zeros(t, cols);
    padded.view_mut((0, 0), (t, m.ncols())).copy_from(m);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let tol = cutoff(&sv);
    let mut idx: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] <= tol).collect();
    idx.sort_by(|&a, &b| sv[a].partial_cmp(&sv[b]).unwrap().then(a.cmp(&b)));
    let mut rows = zeros(idx.len(), t);
    for (r, &k) in idx.iter().enumerate() {
        for i in 0..t {
            rows[(r, i)] = u[(i, k)].conj();
        }
    }
    rows
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn kernel_columns(m: &CMat) -> CMat {
    cokernel_rows(&m.adjoint()).adjoint()
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let mut out = zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b.nrows() {
                for l in 0..b.ncols() {
                    out[(i * b.nrows() + k, j * b.ncols() + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}
