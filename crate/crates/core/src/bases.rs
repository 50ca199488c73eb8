//! Operator bases and fixed reference objects.
//!
//! The Gell-Mann ordering is part of the public contract since every matrix
//! representation depends on it:
//!
//! 1. `G_0 = I/√d`
//! 2. symmetric off-diagonal elements `(|i><j| + |j><i|)/√2`, pairs `i < j`
//!    in lexicographic order
//! 3. antisymmetric elements `(-i|i><j| + i|j><i|)/√2`, same pair order
//! 4. diagonal elements `V_l = (Σ_{k<l} |k><k| - l|l><l|)/√(l(l+1))`,
//!    `l = 1..d-1`
//!
//! For `d = 2` this is `{I, σx, σy, σz}/√2`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::linalg::{cplx, matrix_unit, real, CMatrix, CVector, ONE, ZERO};
use crate::{Error, Result};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// Hermitian orthonormal basis of `M_d(C)` with `G_0 = I/√d`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorBasis {
    pub dim: usize,
    pub elements: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Matrix whose columns are the row-major vectorizations of the basis
    /// elements. It is unitary, and `F = B† S B` maps a computational-basis
    /// superoperator `S` to its representation in this basis.
    pub fn change_of_basis(&self) -> CMatrix {
        let d = self.dim;
        CMatrix::from_fn(d * d, d * d, |row, col| self.elements[col][(row / d, row % d)])
    }

    /// Expansion coefficients `Tr(G_α X)`.
    pub fn coefficients(&self, x: &CMatrix) -> Vec<Complex64> {
        self.elements.iter().map(|g| (g * x).trace()).collect()
    }

    pub fn from_coefficients(&self, coeffs: &[Complex64]) -> CMatrix {
        let d = self.dim;
        self.elements
            .iter()
            .zip(coeffs)
            .fold(CMatrix::zeros(d, d), |acc, (g, c)| acc + g * *c)
    }

    /// Generalized Bloch vector `x_α = √d Tr(G_α ρ)`, `α ≥ 1`.
    ///
    /// With this normalization `ρ = I/d + Σ x_α G_α/√d`, a trace-preserving
    /// map acts as `x -> Δx + q` with `(q, Δ)` read directly off its
    /// matrix representation, and for `d = 2` `x` is the usual Bloch vector.
    pub fn bloch_vector(&self, rho: &CMatrix) -> Vec<f64> {
        let sd = (self.dim as f64).sqrt();
        self.elements[1..].iter().map(|g| sd * (g * rho).trace().re).collect()
    }

    /// Inverse of [`OperatorBasis::bloch_vector`].
    pub fn state_from_bloch(&self, x: &[f64]) -> CMatrix {
        let d = self.dim as f64;
        let mut rho = CMatrix::identity(self.dim, self.dim) * real(1.0 / d);
        for (g, xa) in self.elements[1..].iter().zip(x) {
            rho += g * real(xa / d.sqrt());
        }
        rho
    }
}

/// Generalized Gell-Mann basis in the documented order.
pub fn gell_mann_basis(d: usize) -> Result<OperatorBasis> {
    check_dim(d)?;
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d);
    elements.push(CMatrix::identity(d, d) * real(1.0 / (d as f64).sqrt()));
    for i in 0..d {
        for j in (i + 1)..d {
            elements.push((matrix_unit(d, i, j) + matrix_unit(d, j, i)) * real(inv_sqrt2));
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = CMatrix::zeros(d, d);
            m[(i, j)] = cplx(0.0, -inv_sqrt2);
            m[(j, i)] = cplx(0.0, inv_sqrt2);
            elements.push(m);
        }
    }
    for l in 1..d {
        elements.push(diagonal_gell_mann(d, l));
    }
    Ok(OperatorBasis { dim: d, elements })
}

/// Diagonal traceless element `V_l`, `1 ≤ l ≤ d-1`.
pub fn diagonal_gell_mann(d: usize, l: usize) -> CMatrix {
    let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
    let mut m = CMatrix::zeros(d, d);
    for k in 0..l {
        m[(k, k)] = real(norm);
    }
    m[(l, l)] = real(-(l as f64) * norm);
    m
}

/// Weyl (clock-and-shift) unitaries `U_kl = Σ_m ω^{mk} |m><m+l|`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylFamily {
    pub dim: usize,
    pub omega: Complex64,
    /// Stored at index `k * d + l`.
    pub operators: Vec<CMatrix>,
}

impl WeylFamily {
    pub fn get(&self, k: usize, l: usize) -> &CMatrix {
        &self.operators[(k % self.dim) * self.dim + (l % self.dim)]
    }

    /// `ω^n` for any integer `n`.
    pub fn phase(&self, n: i64) -> Complex64 {
        root_of_unity(self.dim, n)
    }
}

pub fn root_of_unity(d: usize, n: i64) -> Complex64 {
    let r = n.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / d as f64)
}

pub fn weyl_operators(d: usize) -> Result<WeylFamily> {
    check_dim(d)?;
    let mut operators = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let mut u = CMatrix::zeros(d, d);
            for m in 0..d {
                u[(m, (m + l) % d)] = root_of_unity(d, (m * k) as i64);
            }
            operators.push(u);
        }
    }
    Ok(WeylFamily { dim: d, omega: root_of_unity(d, 1), operators })
}

/// `d + 1` mutually unbiased bases for prime `d`. Each basis is a list of
/// `d` unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    pub dim: usize,
    pub bases: Vec<Vec<CVector>>,
}

impl MubSet {
    /// Rank-one projectors `|ψ_l^{(α)}><ψ_l^{(α)}|` of basis `alpha`.
    pub fn projectors(&self, alpha: usize) -> Vec<CMatrix> {
        self.bases[alpha].iter().map(|v| v * v.adjoint()).collect()
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Mutually unbiased bases for prime `d`.
///
/// Ordering: the computational basis first, then for `d = 2` the σx and σy
/// eigenbases, and for odd `d` the quadratic-phase bases
/// `|ψ_l^{(a)}> = d^{-1/2} Σ_m ω^{a m² + l m} |m>`, `a = 0..d-1`.
pub fn mub_bases(d: usize) -> Result<MubSet> {
    check_dim(d)?;
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut bases = Vec::with_capacity(d + 1);
    bases.push((0..d).map(|l| basis_vector(d, l)).collect());
    let norm = real(1.0 / (d as f64).sqrt());
    if d == 2 {
        let x = alloc::vec![
            CVector::from_vec(alloc::vec![ONE, ONE]) * norm,
            CVector::from_vec(alloc::vec![ONE, -ONE]) * norm,
        ];
        let y = alloc::vec![
            CVector::from_vec(alloc::vec![ONE, cplx(0.0, 1.0)]) * norm,
            CVector::from_vec(alloc::vec![ONE, cplx(0.0, -1.0)]) * norm,
        ];
        bases.push(x);
        bases.push(y);
    } else {
        for a in 0..d {
            let basis = (0..d)
                .map(|l| {
                    CVector::from_fn(d, |m, _| root_of_unity(d, (a * m * m + l * m) as i64) * norm)
                })
                .collect();
            bases.push(basis);
        }
    }
    Ok(MubSet { dim: d, bases })
}

fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::from_element(d, ZERO);
    v[i] = ONE;
    v
}

/// Maximally entangled vector `|α> = d^{-1/2} Σ_i |i⊗i>` and `P⁺ = |α><α|`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxEntangledProjector {
    pub dim: usize,
    pub vector: CVector,
    pub projector: CMatrix,
}

pub fn max_entangled(d: usize) -> Result<MaxEntangledProjector> {
    check_dim(d)?;
    let mut vector = CVector::from_element(d * d, ZERO);
    let amp = real(1.0 / (d as f64).sqrt());
    for i in 0..d {
        vector[i * d + i] = amp;
    }
    let projector = &vector * vector.adjoint();
    Ok(MaxEntangledProjector { dim: d, vector, projector })
}

/// Pauli matrices `[σx, σy, σz]`.
pub fn pauli() -> [CMatrix; 3] {
    let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let y = CMatrix::from_row_slice(2, 2, &[ZERO, cplx(0.0, -1.0), cplx(0.0, 1.0), ZERO]);
    let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [x, y, z]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, kron};

    #[test]
    fn qubit_gell_mann_is_pauli_over_sqrt2() {
        let b = gell_mann_basis(2).unwrap();
        let s = real(core::f64::consts::FRAC_1_SQRT_2);
        let [x, y, z] = pauli();
        let expected = [CMatrix::identity(2, 2) * s, x * s, y * s, z * s];
        for (g, e) in b.elements.iter().zip(expected.iter()) {
            assert!(frobenius(&(g - e)) < 1e-15);
        }
    }

    #[test]
    fn qutrit_diagonal_elements() {
        let b = gell_mann_basis(3).unwrap();
        assert_eq!(b.len(), 9);
        let v1 = &b.elements[7];
        let v2 = &b.elements[8];
        let s2 = 1.0 / 2f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        for (i, e) in [s2, -s2, 0.0].iter().enumerate() {
            assert!((v1[(i, i)].re - e).abs() < 1e-15);
        }
        for (i, e) in [s6, s6, -2.0 * s6].iter().enumerate() {
            assert!((v2[(i, i)].re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_small_dimensions() {
        assert_eq!(gell_mann_basis(1), Err(Error::InvalidDimension(1)));
        assert_eq!(weyl_operators(0).unwrap_err(), Error::InvalidDimension(0));
        assert_eq!(max_entangled(1).unwrap_err(), Error::InvalidDimension(1));
    }

    #[test]
    fn qubit_weyl_operators_are_paulis() {
        let w = weyl_operators(2).unwrap();
        let [x, y, z] = pauli();
        assert!(frobenius(&(w.get(0, 0) - CMatrix::identity(2, 2))) < 1e-15);
        assert!(frobenius(&(w.get(1, 0) - &z)) < 1e-15);
        assert!(frobenius(&(w.get(0, 1) - &x)) < 1e-15);
        assert!(frobenius(&(w.get(1, 1) - y * cplx(0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn qutrit_clock_operator() {
        let w = weyl_operators(3).unwrap();
        let u = w.get(1, 0);
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((u[(0, 0)] - ONE).norm() < 1e-15);
        assert!((u[(1, 1)] - omega).norm() < 1e-15);
        assert!((u[(2, 2)] - omega * omega).norm() < 1e-15);
    }

    #[test]
    fn qubit_mubs_are_pauli_eigenbases() {
        let m = mub_bases(2).unwrap();
        let [x, y, z] = pauli();
        for (basis, op) in m.bases.iter().zip([z, x, y]) {
            for v in basis {
                // eigenvector of the Pauli operator
                let w = &op * v;
                let lambda = v.dotc(&w);
                assert!((w - v * lambda).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn non_prime_mub_is_unsupported() {
        assert_eq!(mub_bases(4), Err(Error::UnsupportedDimension(4)));
        assert_eq!(mub_bases(6), Err(Error::UnsupportedDimension(6)));
    }

    #[test]
    fn qubit_projector_in_local_paulis() {
        let p = max_entangled(2).unwrap().projector;
        let [x, y, z] = pauli();
        let id = CMatrix::identity(2, 2);
        let expected = (kron(&id, &id) + kron(&x, &x) - kron(&y, &y) + kron(&z, &z)) * real(0.25);
        assert!(frobenius(&(p - expected)) < 1e-15);
    }

    #[test]
    fn bloch_round_trip() {
        let b = gell_mann_basis(3).unwrap();
        let x: Vec<f64> = (0..8).map(|k| 0.05 * k as f64 - 0.2).collect();
        let rho = b.state_from_bloch(&x);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        let back = b.bloch_vector(&rho);
        for (a, c) in x.iter().zip(back.iter()) {
            assert!((a - c).abs() < 1e-14);
        }
    }
}
