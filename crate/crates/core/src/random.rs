//! Seeded random sampling of states, operators and maps.
//!
//! Every sampler takes the generator explicitly; witnesses construct a
//! [`ChaCha8Rng`] from a recorded seed so results are reproducible.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::linalg::{cplx, real, CMatrix, CVector};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviate (Box–Muller).
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos();
        }
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = cplx(normal(rng), normal(rng)) * real(core::f64::consts::FRAC_1_SQRT_2);
        }
    }
    m
}

/// Random density matrix `A A† / Tr(A A†)` from a square Ginibre matrix.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let a = ginibre(rng, d, d);
    let rho = &a * a.adjoint();
    let tr = rho.trace().re;
    rho * real(1.0 / tr)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    let v: CVector = ginibre(rng, d, 1).column(0).into_owned();
    let n = v.norm();
    v * real(1.0 / n)
}

/// Haar-random unitary (QR of a Ginibre matrix with phases fixed).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / real(diag.norm()) } else { real(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix `(A + A†) / 2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let a = ginibre(rng, d, d);
    (&a + a.adjoint()) * real(0.5)
}

/// Random normal matrix `U diag(z) U†` with complex Gaussian eigenvalues.
pub fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let u = unitary(rng, d);
    let z: Vec<_> = (0..d).map(|_| cplx(normal(rng), normal(rng))).collect();
    let diag = CMatrix::from_diagonal(&CVector::from_vec(z));
    &u * diag * u.adjoint()
}

/// Uniform point on the unit sphere in `R^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
