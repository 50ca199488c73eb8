//! Adaptive Gauss–Kronrod (7/15) quadrature for scalar and matrix-valued
//! integrands.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::linalg::{frobenius, CMatrix};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 40;

/// Values that can be accumulated by the quadrature rule.
pub trait Integrand: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Wrapper so complex matrices can be scaled by `f64` and integrated.
#[derive(Clone, Debug)]
pub struct MatrixValue(pub CMatrix);

impl Add for MatrixValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        MatrixValue(self.0 + rhs.0)
    }
}

impl Sub for MatrixValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        MatrixValue(self.0 - rhs.0)
    }
}

impl Mul<f64> for MatrixValue {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        MatrixValue(self.0 * crate::linalg::real(rhs))
    }
}

impl Integrand for MatrixValue {
    fn magnitude(&self) -> f64 {
        frobenius(&self.0)
    }
}

fn kronrod<T: Integrand, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc.clone() * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        let pair = f1 + f2;
        kron = kron + pair.clone() * w;
        if k % 2 == 1 {
            gauss = gauss + pair * WG[k / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    let err = (kron.clone() - gauss).magnitude();
    (kron, err)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by recursive
/// bisection of the Gauss–Kronrod estimate.
pub fn integrate<T: Integrand, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, tol: f64) -> T {
    let (whole, err) = kronrod(&mut f, a, b);
    if a == b {
        return whole * 0.0;
    }
    // explicit stack: (a, b, estimate, error, depth)
    let mut stack: Vec<(f64, f64, T, f64, u32)> = alloc::vec![(a, b, whole, err, 0)];
    let mut total: Option<T> = None;
    let full = (b - a).abs();
    while let Some((lo, hi, est, err, depth)) = stack.pop() {
        let local_tol = tol * ((hi - lo).abs() / full).max(1e-300);
        if err <= local_tol.max(1e-15 * est.magnitude()) || depth >= MAX_DEPTH {
            total = Some(match total {
                Some(t) => t + est,
                None => est,
            });
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (left, el) = kronrod(&mut f, lo, mid);
        let (right, er) = kronrod(&mut f, mid, hi);
        stack.push((lo, mid, left, el, depth + 1));
        stack.push((mid, hi, right, er, depth + 1));
    }
    total.expect("at least one interval is accepted")
}
