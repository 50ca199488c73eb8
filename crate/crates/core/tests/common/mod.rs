//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's bases or superoperator code.
#![allow(dead_code)]

use dynmap_core::linalg::{CMatrix, CVector};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mat2(a: [[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| a[i][j])
}

pub fn sx() -> CMatrix {
    mat2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn sy() -> CMatrix {
    mat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn sz() -> CMatrix {
    mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `ρ ↦ Σ_k w_k A_k ρ A_k†` applied entrywise, no superoperator code.
pub fn kraus_apply(ops: &[(f64, CMatrix)], rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for (w, a) in ops {
        out += (a * rho * a.adjoint()) * c(*w, 0.0);
    }
    out
}

/// Pauli channel `ρ ↦ Σ p_k σ_k ρ σ_k` from Bloch eigenvalues `(λ1, λ2, λ3)`.
pub fn pauli_channel_apply(l: [f64; 3], rho: &CMatrix) -> CMatrix {
    let p0 = (1.0 + l[0] + l[1] + l[2]) / 4.0;
    let p1 = (1.0 + l[0] - l[1] - l[2]) / 4.0;
    let p2 = (1.0 - l[0] + l[1] - l[2]) / 4.0;
    let p3 = (1.0 - l[0] - l[1] + l[2]) / 4.0;
    kraus_apply(&[(p0, eye(2)), (p1, sx()), (p2, sy()), (p3, sz())], rho)
}

/// `U_kl = Σ_m ω^{mk} |m⟩⟨m+l|` written out directly.
pub fn weyl(d: usize, k: usize, l: usize) -> CMatrix {
    let mut u = CMatrix::zeros(d, d);
    for m in 0..d {
        let phase = 2.0 * std::f64::consts::PI * ((m * k) % d) as f64 / d as f64;
        u[(m, (m + l) % d)] = c(phase.cos(), phase.sin());
    }
    u
}

/// Resonant Lorentzian coherence in closed form, valid on both sides of
/// `2γ_M = λ` through the complex square root.
pub fn lorentzian_resonant(gamma_m: f64, lambda: f64, t: f64) -> f64 {
    let disc = Complex64::new(lambda * lambda - 2.0 * gamma_m * lambda, 0.0).sqrt();
    let half = disc * t / 2.0;
    let g = (-lambda * t / 2.0).exp() * (half.cosh() + (c(lambda, 0.0) / disc) * half.sinh());
    g.re
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).sum()
}

pub fn ket(v: &[Complex64]) -> CVector {
    CVector::from_column_slice(v)
}

pub fn diag(v: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(v))
}

/// Amplitude damping through Kraus operators, `ρ_01 ↦ G ρ_01`.
pub fn ad_apply(g: Complex64, rho: &CMatrix) -> CMatrix {
    let k0 = mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), g.conj()]]);
    let k1 = mat2([[c(0.0, 0.0), c((1.0 - g.norm_sqr()).sqrt(), 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
    kraus_apply(&[(1.0, k0), (1.0, k1)], rho)
}

/// Qubit Pauli-basis matrix `F_ab = Tr(σ_a Φ[σ_b]) / 2`.
pub fn pauli_rep(phi: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let basis = [eye(2), sx(), sy(), sz()];
    CMatrix::from_fn(4, 4, |a, b| (&basis[a] * phi(&basis[b])).trace() / c(2.0, 0.0))
}
