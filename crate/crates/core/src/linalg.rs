//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Operators on `C^d` are stored as `d x d` matrices; superoperators act on
//! the row-major vectorization `vec(X)[i*d + j] = X[(i, j)]`, under which
//! `X -> A X B` has the matrix `A ⊗ Bᵀ`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `|i><j|` in dimension `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn from_real(m: &RMatrix) -> CMatrix {
    m.map(real)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Row-major vectorization.
pub fn vectorize(x: &CMatrix) -> CVector {
    let (r, c) = x.shape();
    CVector::from_fn(r * c, |k, _| x[(k / c, k % c)])
}

/// Inverse of [`vectorize`] for a square `d x d` operator.
pub fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_real(m: &RMatrix) -> f64 {
    m.iter().map(|z| z * z).sum::<f64>().sqrt()
}

/// Largest absolute column sum.
pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_imag(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    frobenius(&(m - m.adjoint())) <= tol
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * real(0.5)
}

/// Eigenvalues of a general complex matrix, from its complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let t = schur_form(m);
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Upper-triangular Schur factor. The QR iteration can stall on heavily
/// degenerate spectra at machine-precision deflation, so the deflation
/// tolerance is relaxed step by step.
fn schur_form(m: &CMatrix) -> CMatrix {
    let budget = 100 * m.nrows();
    for eps in [1e-14, 1e-13, 1e-12, 1e-10] {
        if let Some(s) = m.clone().try_schur(eps, budget) {
            return s.unpack().1;
        }
    }
    m.clone().try_schur(1e-8, 0).map(|s| s.unpack().1).unwrap_or_else(|| m.clone())
}

/// Eigen-decomposition of the Hermitian part of `m`; eigenvalues ascending,
/// eigenvectors in the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Trace norm of a Hermitian matrix: sum of absolute eigenvalues.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.abs())
        .sum()
}

/// SVD whose reconstruction is verified. The default nalgebra convergence
/// threshold can stop early on clustered singular values; tighter
/// thresholds are tried in turn and the best reconstruction is kept.
fn checked_svd<T>(m: &DMatrix<T>) -> nalgebra::SVD<T, nalgebra::Dyn, nalgebra::Dyn>
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, nalgebra::SVD<T, nalgebra::Dyn, nalgebra::Dyn>)> = None;
    for eps in [1e-16, f64::EPSILON, 1e-15, 1e-14] {
        let Some(svd) = m.clone().try_svd(true, true, eps, 0) else { continue };
        let residual = match svd.clone().recompose() {
            Ok(r) => (r - m).norm() / scale,
            Err(_) => f64::INFINITY,
        };
        if residual <= 1e-13 {
            return svd;
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, svd));
        }
    }
    best.map(|(_, svd)| svd).unwrap_or_else(|| m.clone().svd(true, true))
}

fn sorted_factors<T>(svd: nalgebra::SVD<T, nalgebra::Dyn, nalgebra::Dyn>, r: usize, c: usize) -> (Vec<f64>, DMatrix<T>, DMatrix<T>)
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = DMatrix::from_fn(r, k, |i, j| u[(i, order[j])].clone());
    let v_sorted = DMatrix::from_fn(k, c, |i, j| v_t[(order[i], j)].clone());
    (s, u_sorted, v_sorted)
}

/// Singular value decomposition with singular values sorted descending:
/// `m = u * diag(s) * v_t`.
pub fn svd_sorted(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return (Vec::new(), CMatrix::zeros(r, 0), CMatrix::zeros(0, c));
    }
    sorted_factors(checked_svd(m), r, c)
}

/// Real SVD, singular values descending: `m = u * diag(s) * v_t`.
pub fn svd_sorted_real(m: &RMatrix) -> (Vec<f64>, RMatrix, RMatrix) {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return (Vec::new(), RMatrix::zeros(r, 0), RMatrix::zeros(0, c));
    }
    sorted_factors(checked_svd(m), r, c)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd_sorted(m).0
}

pub fn singular_values_real(m: &RMatrix) -> Vec<f64> {
    svd_sorted_real(m).0
}

/// Orthonormal basis (columns) of the numerical null space: right singular
/// vectors whose singular value is at most `tol`.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let n = m.ncols();
    let (s, _, v_t) = svd_sorted(m);
    let mut cols: Vec<CVector> = Vec::new();
    for (k, sv) in s.iter().enumerate() {
        if *sv <= tol {
            cols.push(v_t.row(k).adjoint());
        }
    }
    // wide matrices have more columns than singular values
    for k in s.len()..n {
        cols.push(v_t.row(k).adjoint());
    }
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [f64; 5] = [
    1.495585217958292e-2,
    2.539398330063230e-1,
    9.504178996162932e-1,
    2.097847961257068e0,
    5.371920351148152e0,
];

/// Matrix exponential by scaling and squaring with diagonal Padé
/// approximants of degree 3, 5, 7, 9 or 13 selected from the 1-norm.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let eye = identity(n);
    if n == 0 {
        return eye;
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return eye;
    }
    let a2 = a * a;
    let low: [&[f64]; 4] = [&PADE3, &PADE5, &PADE7, &PADE9];
    for (coeffs, theta) in low.iter().zip(THETA.iter()) {
        if norm <= *theta {
            let (u, v) = pade_low(a, &a2, coeffs);
            return pade_solve(&u, &v);
        }
    }

    let s = (norm / THETA[4]).log2().ceil().max(0.0) as i32;
    let scale = real(2.0f64.powi(-s));
    let a1 = a * scale;
    let a2 = &a2 * (scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| real(PADE13[k]);
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &eye * b(1);
    let u = &a1 * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &eye * b(0);
    let mut r = pade_solve(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_low(a: &CMatrix, a2: &CMatrix, coeffs: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let mut power = identity(n);
    let mut u_inner = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    for pair in coeffs.chunks(2) {
        v += &power * real(pair[0]);
        u_inner += &power * real(pair[1]);
        power = &power * a2;
    }
    (a * u_inner, v)
}

fn pade_solve(u: &CMatrix, v: &CMatrix) -> CMatrix {
    let p = v + u;
    let q = v - u;
    q.lu().solve(&p).expect("Padé denominator is nonsingular for the selected degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_exp(a: &CMatrix) -> CMatrix {
        // scaled Taylor series as an independent reference
        let n = a.nrows();
        let s = 8;
        let scaled = a * real(1.0 / f64::from(1u32 << s));
        let mut term = identity(n);
        let mut sum = identity(n);
        for k in 1..40 {
            term = &term * &scaled * real(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn expm_matches_taylor_across_norms() {
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0, 20.0] {
            let a = CMatrix::from_fn(4, 4, |i, j| {
                cplx(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0) * real(scale / 4.0)
            });
            let diff = frobenius(&(expm(&a) - taylor_exp(&a)));
            let norm = frobenius(&taylor_exp(&a));
            assert!(diff <= 1e-11 * norm.max(1.0), "scale {scale}: {diff}");
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(alloc::vec![
            cplx(-1.0, 0.0),
            cplx(0.0, 2.0),
            cplx(3.0, -1.0)
        ]));
        let e = expm(&a);
        for i in 0..3 {
            assert!((e[(i, i)] - a[(i, i)].exp()).norm() < 1e-12 * a[(i, i)].exp().norm().max(1.0));
        }
    }

    #[test]
    fn vectorization_conjugation_identity() {
        let a = CMatrix::from_fn(3, 3, |i, j| cplx(i as f64, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| cplx((i * j) as f64, 1.0));
        let x = CMatrix::from_fn(3, 3, |i, j| cplx(1.0 + i as f64, (j as f64).sin()));
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&a, &b.transpose()) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_projector() {
        let p = matrix_unit(3, 0, 0);
        let ns = null_space(&p, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!(frobenius(&(&p * &ns)) < 1e-12);
    }
}
