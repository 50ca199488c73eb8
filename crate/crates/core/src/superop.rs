//! Superoperator calculus.
//!
//! A [`SuperOperator`] stores a linear map on `d x d` matrices as a
//! `d² x d²` matrix acting on the row-major vectorization (see
//! [`crate::linalg`]). [`FMatrix`] is the representation
//! `F_αβ = Tr(G_α Φ[G_β])` in the Gell-Mann basis, whose block form
//! `(1, 0; q, Δ)` carries the affine Bloch action of trace-preserving maps.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};
use nalgebra::DVector;
use num_complex::Complex64;

use crate::bases::{gell_mann_basis, max_entangled, OperatorBasis};
use crate::linalg::{
    self, frobenius, hermitian_eigenvalues, identity, kron, real, unvectorize, vectorize, CMatrix,
    CVector, RMatrix, I, ONE,
};
use crate::{Error, Result};

/// Absolute Frobenius tolerance for structural flags.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Eigenvalue floor for positivity tests.
pub const POSITIVITY_FLOOR: f64 = -1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: CMatrix,
}

impl SuperOperator {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(SuperOperator { dim, matrix })
    }

    pub(crate) fn from_parts(dim: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dim * dim);
        SuperOperator { dim, matrix }
    }

    pub fn identity(dim: usize) -> Self {
        SuperOperator { dim, matrix: identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        SuperOperator { dim, matrix: CMatrix::zeros(dim * dim, dim * dim) }
    }

    /// Builds the map from its action on the matrix units `|i><j|`.
    pub fn from_fn<F: FnMut(&CMatrix) -> CMatrix>(dim: usize, mut f: F) -> Self {
        let n = dim * dim;
        let mut matrix = CMatrix::zeros(n, n);
        for i in 0..dim {
            for j in 0..dim {
                let image = f(&linalg::matrix_unit(dim, i, j));
                matrix.set_column(i * dim + j, &vectorize(&image));
            }
        }
        SuperOperator { dim, matrix }
    }

    /// `X -> A X B`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        SuperOperator { dim: a.nrows(), matrix: kron(a, &b.transpose()) }
    }

    /// `X -> U X U†`.
    pub fn conjugation(u: &CMatrix) -> Self {
        Self::sandwich(u, &u.adjoint())
    }

    /// `X -> -i[H, X]`.
    pub fn hamiltonian(h: &CMatrix) -> Self {
        let d = h.nrows();
        let eye = identity(d);
        let m = (kron(h, &eye) - kron(&eye, &h.transpose())) * (-I);
        SuperOperator { dim: d, matrix: m }
    }

    /// GKLS dissipator `X -> L X L† - ½{L†L, X}`.
    pub fn dissipator(l: &CMatrix) -> Self {
        let d = l.nrows();
        let eye = identity(d);
        let ldl = l.adjoint() * l;
        let m = kron(l, &l.conjugate()) - (kron(&ldl, &eye) + kron(&eye, &ldl.transpose())) * real(0.5);
        SuperOperator { dim: d, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `d² x d²` matrix in the computational (matrix-unit) basis.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(x)), self.dim)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SuperOperator) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: &self.matrix * &inner.matrix }
    }

    /// Heisenberg-picture dual, defined by `Tr(Y† Φ[X]) = Tr(Φ*[Y]† X)`.
    pub fn dual(&self) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    pub fn scaled(&self, c: Complex64) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: &self.matrix * c }
    }

    pub fn inverse(&self) -> Option<SuperOperator> {
        self.matrix
            .clone()
            .try_inverse()
            .map(|m| SuperOperator { dim: self.dim, matrix: m })
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }

    /// Matrix exponential of the superoperator.
    pub fn exp(&self) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: linalg::expm(&self.matrix) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// `‖Φ*[I] - I‖`; zero iff trace preserving.
    pub fn trace_preservation_residual(&self) -> f64 {
        let eye = identity(self.dim);
        frobenius(&(self.dual().apply(&eye) - eye))
    }

    /// `‖Φ[I] - I‖`; zero iff unital.
    pub fn unitality_residual(&self) -> f64 {
        let eye = identity(self.dim);
        frobenius(&(self.apply(&eye) - eye))
    }

    /// `‖Φ*[I]‖`; zero iff `Tr Φ[X] = 0` for all `X`.
    pub fn trace_annihilation_residual(&self) -> f64 {
        frobenius(&self.dual().apply(&identity(self.dim)))
    }

    /// Largest imaginary part of the Gell-Mann representation; zero iff the
    /// map sends Hermitian operators to Hermitian operators.
    pub fn hermiticity_residual(&self) -> f64 {
        let basis = gell_mann_basis(self.dim).expect("dimension validated at construction");
        linalg::max_imag(&representation(self, &basis))
    }

    /// Rebuilds the map from a Gell-Mann (or any orthonormal basis)
    /// representation.
    pub fn from_representation(f: &FMatrix, basis: &OperatorBasis) -> Result<Self> {
        if f.dim != basis.dim {
            return Err(Error::DimensionMismatch { expected: basis.dim, found: f.dim });
        }
        let b = basis.change_of_basis();
        Ok(SuperOperator { dim: f.dim, matrix: &b * &f.entries * b.adjoint() })
    }

    /// Inverse of [`choi`].
    pub fn from_choi(c: &CMatrix, dim: usize) -> Result<Self> {
        let n = dim * dim;
        if c.nrows() != n || c.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.nrows() });
        }
        let mut matrix = CMatrix::zeros(n, n);
        let d = dim as f64;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        matrix[(k * dim + l, i * dim + j)] = c[(i * dim + k, j * dim + l)] * real(d);
                    }
                }
            }
        }
        Ok(SuperOperator { dim, matrix })
    }

    /// `(𝟙_k ⊗ Φ)[X]` for `X` on `C^k ⊗ C^d`.
    pub fn apply_extended(&self, k: usize, x: &CMatrix) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(k * d, k * d);
        for a in 0..k {
            for b in 0..k {
                let block = x.view((a * d, b * d), (d, d)).into_owned();
                let image = self.apply(&block);
                out.view_mut((a * d, b * d), (d, d)).copy_from(&image);
            }
        }
        out
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;
    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &SuperOperator {
    type Output = SuperOperator;
    fn sub(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul<f64> for &SuperOperator {
    type Output = SuperOperator;
    fn mul(self, rhs: f64) -> SuperOperator {
        self.scaled(real(rhs))
    }
}

fn representation(phi: &SuperOperator, basis: &OperatorBasis) -> CMatrix {
    let b = basis.change_of_basis();
    b.adjoint() * phi.matrix() * b
}

/// Matrix representation `F_αβ = Tr(G_α Φ[G_β])`.
///
/// The entries are kept complex so non-Hermiticity-preserving maps are
/// representable; [`FMatrix::is_real`] tells whether the real view is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct FMatrix {
    pub dim: usize,
    pub entries: CMatrix,
}

impl FMatrix {
    pub fn identity(dim: usize) -> Self {
        FMatrix { dim, entries: identity(dim * dim) }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        linalg::max_imag(&self.entries) <= tol
    }

    pub fn real(&self) -> RMatrix {
        linalg::real_part(&self.entries)
    }

    /// `‖row 0 - (1, 0, …, 0)‖`.
    pub fn trace_row_residual(&self) -> f64 {
        let n = self.entries.ncols();
        (0..n)
            .map(|j| {
                let target = if j == 0 { ONE } else { linalg::ZERO };
                (self.entries[(0, j)] - target).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Translation vector `q` (real part of column 0 below the corner).
    pub fn translation(&self) -> DVector<f64> {
        let n = self.entries.nrows();
        DVector::from_fn(n - 1, |i, _| self.entries[(i + 1, 0)].re)
    }

    /// Contraction block `Δ` (real part).
    pub fn contraction(&self) -> RMatrix {
        let n = self.entries.nrows();
        RMatrix::from_fn(n - 1, n - 1, |i, j| self.entries[(i + 1, j + 1)].re)
    }

    pub fn contraction_complex(&self) -> CMatrix {
        let n = self.entries.nrows();
        self.entries.view((1, 1), (n - 1, n - 1)).into_owned()
    }

    /// `d^{-2} Tr F`, real part.
    pub fn normalized_trace(&self) -> f64 {
        self.entries.trace().re / (self.dim * self.dim) as f64
    }
}

pub fn matrix_rep(phi: &SuperOperator, basis: &OperatorBasis) -> Result<FMatrix> {
    if phi.dim != basis.dim {
        return Err(Error::DimensionMismatch { expected: basis.dim, found: phi.dim });
    }
    Ok(FMatrix { dim: phi.dim, entries: representation(phi, basis) })
}

/// Gell-Mann representation, building the basis on the fly.
pub fn gell_mann_rep(phi: &SuperOperator) -> FMatrix {
    let basis = gell_mann_basis(phi.dim).expect("dimension validated at construction");
    FMatrix { dim: phi.dim, entries: representation(phi, &basis) }
}

/// Splits a trace-preserving, Hermiticity-preserving representation into
/// the translation `q` and contraction block `Δ`.
pub fn block_decompose(f: &FMatrix) -> Result<(DVector<f64>, RMatrix)> {
    let scale = frobenius(&f.entries).max(1.0);
    let residual = f.trace_row_residual();
    if residual > STRUCTURE_TOL * scale {
        return Err(Error::NotTracePreserving(residual));
    }
    let imag = linalg::max_imag(&f.entries);
    if imag > STRUCTURE_TOL * scale {
        return Err(Error::NotHermiticityPreserving(imag));
    }
    Ok((f.translation(), f.contraction()))
}

/// Eigenvalues and singular value decomposition of a representation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    /// `λ_0` (closest to 1) first, the rest by descending modulus, then
    /// descending real and imaginary parts.
    pub eigenvalues: Vec<Complex64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `O₁` with `F = O₁ Σ O₂†`.
    pub left_factor: CMatrix,
    /// `O₂` with `F = O₁ Σ O₂†`.
    pub right_factor: CMatrix,
}

/// Orders eigenvalues: the one closest to 1 first, then by descending
/// modulus with ties broken by real then imaginary part (descending).
pub fn order_eigenvalues(mut values: Vec<Complex64>) -> Vec<Complex64> {
    if values.is_empty() {
        return values;
    }
    let pin = values
        .iter()
        .enumerate()
        .min_by(|a, b| (*a.1 - ONE).norm().total_cmp(&(*b.1 - ONE).norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let first = values.remove(pin);
    values.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
    values.insert(0, first);
    values
}

pub fn spectrum(f: &FMatrix) -> SpectralData {
    let eigenvalues = order_eigenvalues(linalg::eigenvalues(&f.entries));
    let (singular_values, left_factor, right_factor) = if f.is_real(1e-12) {
        let (s, u, v_t) = linalg::svd_sorted_real(&f.real());
        (s, linalg::from_real(&u), linalg::from_real(&v_t.transpose()))
    } else {
        let (s, u, v_t) = linalg::svd_sorted(&f.entries);
        (s, u, v_t.adjoint())
    };
    SpectralData { eigenvalues, singular_values, left_factor, right_factor }
}

/// `|Det Δ|`, the factor by which the volume of accessible states scales.
pub fn volume_factor(f: &FMatrix) -> f64 {
    f.contraction_complex().determinant().norm()
}

/// Choi matrix `(𝟙 ⊗ Φ)[P⁺]` on `C^d ⊗ C^d`.
pub fn choi(phi: &SuperOperator) -> CMatrix {
    let d = phi.dim;
    let n = d * d;
    let mut c = CMatrix::zeros(n, n);
    let inv = real(1.0 / d as f64);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    c[(i * d + k, j * d + l)] = phi.matrix[(k * d + l, i * d + j)] * inv;
                }
            }
        }
    }
    c
}

/// `⟨α|(𝟙 ⊗ Φ)[P⁺]|α⟩`, evaluated on the Choi matrix.
pub fn witness_f(phi: &SuperOperator) -> f64 {
    let alpha = max_entangled(phi.dim).expect("dimension validated at construction").vector;
    let c = choi(phi);
    alpha.dotc(&(&c * &alpha)).re
}

/// `d^{-2} Σ_α λ_α`, from the spectrum instead of the Choi matrix.
pub fn witness_f_spectral(f: &FMatrix) -> f64 {
    let sum: Complex64 = linalg::eigenvalues(&f.entries).iter().sum();
    sum.re / (f.dim * f.dim) as f64
}

/// Biorthonormal eigen-operators: `Φ[F_α] = λ_α F_α`,
/// `Φ*[G_α] = λ̄_α G_α`, `Tr(F_α G_β†) = δ_αβ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DampingBasis {
    pub eigenvalues: Vec<Complex64>,
    pub right: Vec<CMatrix>,
    pub left: Vec<CMatrix>,
}

pub fn damping_basis(phi: &SuperOperator) -> Result<DampingBasis> {
    let s = phi.matrix();
    let n = s.nrows();
    let scale = frobenius(s).max(1.0);
    let cluster_tol = 1e-8 * scale;
    let defect_tol = 1e-6 * scale;
    let ordered = order_eigenvalues(linalg::eigenvalues(s));

    // group numerically equal eigenvalues, keeping the canonical order
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in ordered {
        match clusters
            .iter_mut()
            .find(|c| c.iter().any(|w| (*w - z).norm() <= cluster_tol))
        {
            Some(c) => c.push(z),
            None => clusters.push(alloc::vec![z]),
        }
    }

    let mut right_cols: Vec<CVector> = Vec::with_capacity(n);
    let mut left_cols: Vec<CVector> = Vec::with_capacity(n);
    for cluster in &clusters {
        let m = cluster.len();
        let center = cluster.iter().sum::<Complex64>() / real(m as f64);
        let shifted = s - identity(n) * center;
        let (sv, _, v_t) = linalg::svd_sorted(&shifted);
        if sv[n - m] > defect_tol {
            return Err(Error::DefectiveMap { re: center.re, im: center.im });
        }
        let (_, _, w_t) = linalg::svd_sorted(&shifted.adjoint());
        let mut v_c: Vec<CVector> = (n - m..n).map(|k| v_t.row(k).adjoint()).collect();
        if m > 1 {
            v_c = align_with_basis(&v_c, phi.dim)?;
        }
        let w_c: Vec<CVector> = (n - m..n).map(|k| w_t.row(k).adjoint()).collect();
        let v_mat = CMatrix::from_columns(&v_c);
        let w_mat = CMatrix::from_columns(&w_c);
        let overlap = w_mat.adjoint() * &v_mat;
        let inv = overlap
            .try_inverse()
            .ok_or(Error::DefectiveMap { re: center.re, im: center.im })?;
        let w_bi = &w_mat * inv.adjoint();
        for k in 0..m {
            right_cols.push(v_mat.column(k).into_owned());
            left_cols.push(w_bi.column(k).into_owned());
        }
    }

    let v = CMatrix::from_columns(&right_cols);
    let w = CMatrix::from_columns(&left_cols);
    let residual = frobenius(&(w.adjoint() * &v - identity(n)));
    if residual > 1e-6 {
        let z = clusters[0][0];
        return Err(Error::DefectiveMap { re: z.re, im: z.im });
    }
    let d = phi.dim;
    let eigenvalues = (0..n)
        .map(|k| left_cols[k].dotc(&(s * &right_cols[k])))
        .collect();
    let right = right_cols.iter().map(|c| unvectorize(c, d)).collect();
    let left = left_cols.iter().map(|c| unvectorize(c, d)).collect();
    Ok(DampingBasis { eigenvalues, right, left })
}

/// Orthonormal basis of `span(cols)` picked by pivoted Gram-Schmidt over the
/// projected Gell-Mann elements, so degenerate eigenspaces come out aligned
/// with Hermitian basis operators where possible.
fn align_with_basis(cols: &[CVector], d: usize) -> Result<Vec<CVector>> {
    let basis = gell_mann_basis(d)?;
    let span = CMatrix::from_columns(cols);
    let projector = &span * span.adjoint();
    let mut candidates: Vec<CVector> = basis.elements.iter().map(|g| &projector * vectorize(g)).collect();
    let mut out: Vec<CVector> = Vec::with_capacity(cols.len());
    while out.len() < cols.len() {
        let (best, norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 + 1e-12 { x } else { acc });
        if norm < 1e-6 {
            return Ok(cols.to_vec());
        }
        let q = &candidates[best] / real(norm);
        for c in candidates.iter_mut() {
            let overlap = q.dotc(c);
            *c -= &q * overlap;
        }
        out.push(q);
    }
    Ok(out)
}

/// Structural flags of a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MapFlags {
    /// `Φ* = Φ`.
    pub hermitian: bool,
    /// `ΦΦ* = Φ*Φ`.
    pub normal: bool,
    pub unital: bool,
    pub trace_preserving: bool,
    pub hermiticity_preserving: bool,
}

pub fn classify(phi: &SuperOperator) -> MapFlags {
    let f = gell_mann_rep(phi);
    let norm = frobenius(&f.entries).max(1.0);
    let fa = f.entries.adjoint();
    let hermitian = frobenius(&(&f.entries - &fa)) <= STRUCTURE_TOL * norm;
    let normal = frobenius(&(&f.entries * &fa - &fa * &f.entries)) <= STRUCTURE_TOL * norm * norm;
    MapFlags {
        hermitian,
        normal,
        unital: phi.unitality_residual() <= STRUCTURE_TOL * norm,
        trace_preserving: phi.trace_preservation_residual() <= STRUCTURE_TOL * norm,
        hermiticity_preserving: f.is_real(STRUCTURE_TOL * norm),
    }
}

/// `‖AB - BA‖_F`.
pub fn commute_check(a: &SuperOperator, b: &SuperOperator) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    Ok(frobenius(&(&a.matrix * &b.matrix - &b.matrix * &a.matrix)))
}

/// Outcome of the conditional complete positivity test.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CcpResult {
    pub passes: bool,
    pub min_eig: f64,
    /// Magnitude of the (scaled) eigenvalue floor used for `passes`.
    pub tolerance: f64,
}

/// Conditional complete positivity of a generator: the Choi matrix of `L`
/// compressed to the complement of `|α⟩` must be positive semidefinite.
/// This certifies that `𝟙 + εL` is completely positive to first order.
pub fn ccp_test(l: &SuperOperator) -> Result<CcpResult> {
    let scale = l.frobenius_norm().max(1.0);
    let residual = l.trace_annihilation_residual();
    if residual > STRUCTURE_TOL * scale {
        return Err(Error::NotTraceAnnihilating(residual));
    }
    let d = l.dim;
    let p = max_entangled(d).expect("dimension validated at construction").projector;
    let q = identity(d * d) - p;
    let c = choi(l);
    let compressed = &q * c * &q;
    let min_eig = hermitian_eigenvalues(&compressed)
        .first()
        .copied()
        .unwrap_or(0.0);
    let tolerance = -POSITIVITY_FLOOR * frobenius(&compressed).max(1.0);
    Ok(CcpResult { passes: min_eig >= -tolerance, min_eig, tolerance })
}
