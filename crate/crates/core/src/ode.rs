//! Dormand–Prince 5(4) integrator with adaptive step size control.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step, relative to the span of the integration, before the
    /// solver gives up.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` through each time in `outputs`
/// (ascending, all `>= t0`), calling `on_output(index, y)` at each one.
///
/// The right-hand side may fail, e.g. when a generator is singular; the
/// error is propagated unchanged.
pub fn integrate<F, O>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    opts: &OdeOptions,
    mut on_output: O,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    O: FnMut(usize, &[f64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let span = outputs.last().map_or(0.0, |&end| (end - t0).abs()).max(1.0);
    let min_step = opts.min_step * span;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    rhs(t, &y, &mut k1)?;
    let mut h = initial_step(&y, &k1, opts, span);
    let mut steps = 0usize;

    for (index, &target) in outputs.iter().enumerate() {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepSizeUnderflow { t });
            }
            steps += 1;
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            for i in 0..n {
                stage[i] = y[i] + step * A21 * k1[i];
            }
            rhs(t + C2 * step, &stage, &mut k2)?;
            for i in 0..n {
                stage[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * step, &stage, &mut k3)?;
            for i in 0..n {
                stage[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * step, &stage, &mut k4)?;
            for i in 0..n {
                stage[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * step, &stage, &mut k5)?;
            for i in 0..n {
                stage[i] = y[i]
                    + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(t + step, &stage, &mut k6)?;
            for i in 0..n {
                y_new[i] = y[i]
                    + step * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            let t_new = if last { target } else { t + step };
            rhs(t_new, &y_new, &mut k7)?;

            let mut err = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / scale) * (e / scale);
            }
            let err = (err / n.max(1) as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                t = t_new;
                core::mem::swap(&mut y, &mut y_new);
                core::mem::swap(&mut k1, &mut k7);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step shortened to land on an output does not shrink h
                h = if last { h.max(step * factor) } else { step * factor };
                if h < min_step {
                    return Err(Error::StepSizeUnderflow { t });
                }
            } else {
                let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 1.0) } else { 0.1 };
                h = step * factor;
                if h < min_step {
                    return Err(Error::StepSizeUnderflow { t });
                }
            }
        }
        on_output(index, &y)?;
    }
    Ok(y)
}

fn initial_step(y: &[f64], dy: &[f64], opts: &OdeOptions, span: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(dy.iter()) {
        let scale = opts.atol + opts.rtol * yi.abs();
        d0 += (yi / scale) * (yi / scale);
        d1 += (fi / scale) * (fi / scale);
    }
    let n = y.len().max(1) as f64;
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(0.1 * span)
}
