//! Time-dependent rates `γ(t)` with antiderivatives `Γ(t) = ∫₀ᵗ γ`.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::quad;
use crate::{Error, Result};

/// Absolute tolerance of the quadrature fallback for `Γ(t)`.
pub const QUADRATURE_TOL: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Piecewise-linear rate through `(t_i, γ_i)` samples.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Tabulated {
    times: Vec<f64>,
    values: Vec<f64>,
    // cumulative integral from times[0] to times[i]
    cumulative: Vec<f64>,
}

impl Tabulated {
    /// Requires at least two samples, strictly increasing finite times with
    /// `times[0] <= 0`, and finite values.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidTable("times and values differ in length"));
        }
        if times.len() < 2 {
            return Err(Error::InvalidTable("at least two samples are required"));
        }
        if times.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidTable("non-finite entry"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTable("times must be strictly increasing"));
        }
        if times[0] > 0.0 {
            return Err(Error::InvalidTable("table must cover t = 0"));
        }
        let mut cumulative = Vec::with_capacity(times.len());
        cumulative.push(0.0);
        for i in 1..times.len() {
            let piece = 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
            cumulative.push(cumulative[i - 1] + piece);
        }
        Ok(Tabulated { times, values, cumulative })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    fn check(&self, t: f64) -> Result<usize> {
        let (start, end) = self.domain();
        if !(t >= start && t <= end) {
            return Err(Error::OutOfDomain { t, start, end });
        }
        // index of the segment [times[i], times[i + 1]] containing t
        let i = self.times.partition_point(|&x| x <= t);
        Ok(i.clamp(1, self.times.len() - 1) - 1)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let i = self.check(t)?;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.values[i] + w * (self.values[i + 1] - self.values[i]))
    }

    fn cumulative_at(&self, t: f64) -> Result<f64> {
        let i = self.check(t)?;
        let v = self.value(t)?;
        Ok(self.cumulative[i] + 0.5 * (self.values[i] + v) * (t - self.times[i]))
    }

    /// Exact integral of the interpolant from 0 to `t`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        Ok(self.cumulative_at(t)? - self.cumulative_at(0.0)?)
    }
}

/// A rate `γ(t)`.
///
/// The closed-form kinds carry exact antiderivatives; `Custom` rates fall
/// back to adaptive quadrature when no antiderivative is supplied. A custom
/// rate may return a non-finite value to mark a time where it is undefined.
#[derive(Clone)]
pub enum RateFunction {
    Constant(f64),
    /// `a sin(ωt + φ)`.
    Sine { amplitude: f64, frequency: f64, phase: f64 },
    /// `a tanh(st)`.
    Tanh { amplitude: f64, scale: f64 },
    /// `a e^{-kt}`.
    Exponential { amplitude: f64, decay: f64 },
    Tabulated(Tabulated),
    Sum(Vec<RateFunction>),
    Scaled(f64, Box<RateFunction>),
    Custom { rate: ScalarFn, antiderivative: Option<ScalarFn> },
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFunction::Constant(c) => write!(f, "Constant({c})"),
            RateFunction::Sine { amplitude, frequency, phase } => {
                write!(f, "Sine {{ amplitude: {amplitude}, frequency: {frequency}, phase: {phase} }}")
            }
            RateFunction::Tanh { amplitude, scale } => {
                write!(f, "Tanh {{ amplitude: {amplitude}, scale: {scale} }}")
            }
            RateFunction::Exponential { amplitude, decay } => {
                write!(f, "Exponential {{ amplitude: {amplitude}, decay: {decay} }}")
            }
            RateFunction::Tabulated(t) => write!(f, "Tabulated({} samples)", t.times.len()),
            RateFunction::Sum(parts) => f.debug_tuple("Sum").field(parts).finish(),
            RateFunction::Scaled(c, inner) => f.debug_tuple("Scaled").field(c).field(inner).finish(),
            RateFunction::Custom { antiderivative, .. } => {
                write!(f, "Custom {{ closed_form: {} }}", antiderivative.is_some())
            }
        }
    }
}

impl From<f64> for RateFunction {
    fn from(c: f64) -> Self {
        RateFunction::Constant(c)
    }
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - core::f64::consts::LN_2
}

impl RateFunction {
    pub fn constant(c: f64) -> Self {
        RateFunction::Constant(c)
    }

    pub fn sine(amplitude: f64, frequency: f64, phase: f64) -> Self {
        RateFunction::Sine { amplitude, frequency, phase }
    }

    pub fn tanh(amplitude: f64, scale: f64) -> Self {
        RateFunction::Tanh { amplitude, scale }
    }

    pub fn exponential(amplitude: f64, decay: f64) -> Self {
        RateFunction::Exponential { amplitude, decay }
    }

    pub fn custom<F>(rate: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RateFunction::Custom { rate: Arc::new(rate), antiderivative: None }
    }

    pub fn custom_with_antiderivative<F, G>(rate: F, antiderivative: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RateFunction::Custom { rate: Arc::new(rate), antiderivative: Some(Arc::new(antiderivative)) }
    }

    pub fn scaled(self, c: f64) -> Self {
        RateFunction::Scaled(c, Box::new(self))
    }

    /// `γ(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        let v = match self {
            RateFunction::Constant(c) => *c,
            RateFunction::Sine { amplitude, frequency, phase } => amplitude * (frequency * t + phase).sin(),
            RateFunction::Tanh { amplitude, scale } => amplitude * (scale * t).tanh(),
            RateFunction::Exponential { amplitude, decay } => amplitude * (-decay * t).exp(),
            RateFunction::Tabulated(table) => table.value(t)?,
            RateFunction::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.value(t)?;
                }
                acc
            }
            RateFunction::Scaled(c, inner) => c * inner.value(t)?,
            RateFunction::Custom { rate, .. } => rate(t),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SingularGenerator { t })
        }
    }

    /// Whether [`integral`](Self::integral) is exact rather than numerical.
    pub fn has_closed_form(&self) -> bool {
        match self {
            RateFunction::Sum(parts) => parts.iter().all(RateFunction::has_closed_form),
            RateFunction::Scaled(_, inner) => inner.has_closed_form(),
            RateFunction::Custom { antiderivative, .. } => antiderivative.is_some(),
            _ => true,
        }
    }

    /// `Γ(t) = ∫₀ᵗ γ(u) du`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        let v = match self {
            RateFunction::Constant(c) => c * t,
            RateFunction::Sine { amplitude, frequency, phase } => {
                if *frequency == 0.0 {
                    amplitude * phase.sin() * t
                } else {
                    amplitude / frequency * (phase.cos() - (frequency * t + phase).cos())
                }
            }
            RateFunction::Tanh { amplitude, scale } => {
                if *scale == 0.0 {
                    0.0
                } else {
                    amplitude / scale * ln_cosh(scale * t)
                }
            }
            RateFunction::Exponential { amplitude, decay } => {
                if *decay == 0.0 {
                    amplitude * t
                } else {
                    -amplitude / decay * (-decay * t).exp_m1()
                }
            }
            RateFunction::Tabulated(table) => table.integral(t)?,
            RateFunction::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.integral(t)?;
                }
                acc
            }
            RateFunction::Scaled(c, inner) => c * inner.integral(t)?,
            RateFunction::Custom { rate, antiderivative } => match antiderivative {
                Some(anti) => anti(t) - anti(0.0),
                None => quad::integrate(|u| rate(u), 0.0, t, QUADRATURE_TOL),
            },
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SingularGenerator { t })
        }
    }

    /// End of the domain, if the rate is only defined up to a finite time.
    pub fn domain_end(&self) -> Option<f64> {
        match self {
            RateFunction::Tabulated(table) => Some(table.domain().1),
            RateFunction::Sum(parts) => parts
                .iter()
                .filter_map(RateFunction::domain_end)
                .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e)))),
            RateFunction::Scaled(_, inner) => inner.domain_end(),
            _ => None,
        }
    }
}
