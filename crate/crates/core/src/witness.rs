//! Non-Markovianity witnesses evaluated over a [`Trajectory`] or a generator
//! on a [`TimeGrid`], and their aggregation into a [`WitnessReport`].
//!
//! Every monotonicity test uses forward differences on the grid: a step
//! `t_{i-1} → t_i` violates when the monitored scalar grows by more than
//! `DERIVATIVE_TOL` times its largest magnitude. Margins are signed so that
//! a positive `worst_margin` always means a violation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::dynamics::{TimeGrid, Trajectory};
use crate::generators::TimeLocalGenerator;
use crate::linalg::{self, frobenius, hermitian_part, kron, real, trace_norm_hermitian, CMatrix, CVector};
use crate::random::{self, rng_from_seed};
use crate::superop::{ccp_test, witness_f, FMatrix, SuperOperator};
use crate::{Error, Result};

/// Relative tolerance on one-step increases of a monitored quantity.
pub const DERIVATIVE_TOL: f64 = 1e-9;
/// Relative tolerance of the Bloch-vector norm identity.
pub const BLOCH_IDENTITY_TOL: f64 = 1e-10;
/// Relative tolerance of the functional against `d^{-2} Tr L`.
pub const FUNCTIONAL_IDENTITY_TOL: f64 = 1e-10;
/// Imaginary parts below this count as real for `w_f_monotone`.
pub const REAL_SPECTRUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Monotone,
    Violated,
}

/// Closed run of grid times with a violation.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

/// A secondary test reported next to the main verdict of a witness.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SubCheck {
    pub name: String,
    pub verdict: Verdict,
    pub first_violation_time: Option<f64>,
    pub worst_margin: Option<f64>,
    pub intervals: Vec<Interval>,
    /// Labels of the conditions that failed somewhere on the grid.
    pub violated_conditions: Vec<String>,
    pub undefined_times: Vec<f64>,
}

/// Seed and sample count of a Monte Carlo witness.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WitnessRecord {
    pub name: String,
    pub applicable: bool,
    pub reason: Option<String>,
    pub verdict: Option<Verdict>,
    pub first_violation_time: Option<f64>,
    pub worst_margin: Option<f64>,
    pub intervals: Vec<Interval>,
    pub undefined_times: Vec<f64>,
    pub note: Option<String>,
    pub sampling: Option<Sampling>,
    pub checks: Vec<SubCheck>,
    /// Monitored scalar per grid time; `NaN` where undefined.
    pub series: Vec<f64>,
}

impl WitnessRecord {
    /// Record for a witness that cannot be evaluated on this input.
    pub fn inapplicable(name: &str, reason: &str, len: usize) -> Self {
        WitnessRecord {
            name: name.to_string(),
            applicable: false,
            reason: Some(reason.to_string()),
            verdict: None,
            first_violation_time: None,
            worst_margin: None,
            intervals: Vec::new(),
            undefined_times: Vec::new(),
            note: None,
            sampling: None,
            checks: Vec::new(),
            series: vec![f64::NAN; len],
        }
    }

    fn evaluated(name: &str, times: &[f64], margins: &[Option<f64>], series: Vec<f64>) -> Self {
        let o = Outcome::from_margins(times, margins);
        WitnessRecord {
            name: name.to_string(),
            applicable: true,
            reason: None,
            verdict: Some(o.verdict),
            first_violation_time: o.first,
            worst_margin: o.worst,
            intervals: o.intervals,
            undefined_times: Vec::new(),
            note: None,
            sampling: None,
            checks: Vec::new(),
            series,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Some(Verdict::Violated)
    }

    /// Grid times at which the main verdict is violated.
    pub fn violation_times<'a>(&'a self, times: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        times.iter().copied().filter(move |&t| self.intervals.iter().any(|iv| iv.start <= t && t <= iv.end))
    }

    pub fn check(&self, name: &str) -> Option<&SubCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Outcome {
    verdict: Verdict,
    first: Option<f64>,
    worst: Option<f64>,
    intervals: Vec<Interval>,
}

impl Outcome {
    fn from_margins(times: &[f64], margins: &[Option<f64>]) -> Self {
        let mut worst: Option<f64> = None;
        let mut intervals: Vec<Interval> = Vec::new();
        let mut open = false;
        for (i, m) in margins.iter().enumerate() {
            if let Some(m) = *m {
                worst = Some(worst.map_or(m, |w| w.max(m)));
                if m > 0.0 {
                    match intervals.last_mut() {
                        Some(iv) if open => iv.end = times[i],
                        _ => intervals.push(Interval { start: times[i], end: times[i] }),
                    }
                    open = true;
                    continue;
                }
            }
            open = false;
        }
        let verdict = if intervals.is_empty() { Verdict::Monotone } else { Verdict::Violated };
        Outcome { verdict, first: intervals.first().map(|iv| iv.start), worst, intervals }
    }
}

fn sub_check(
    name: &str,
    times: &[f64],
    margins: &[Option<f64>],
    violated_conditions: Vec<String>,
    undefined_times: Vec<f64>,
) -> SubCheck {
    let o = Outcome::from_margins(times, margins);
    SubCheck {
        name: name.to_string(),
        verdict: o.verdict,
        first_violation_time: o.first,
        worst_margin: o.worst,
        intervals: o.intervals,
        violated_conditions,
        undefined_times,
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().filter(|x| x.is_finite()).fold(0.0, |m, x| m.max(x.abs()))
}

fn merge(acc: &mut [Option<f64>], other: &[Option<f64>]) {
    for (a, b) in acc.iter_mut().zip(other) {
        if let Some(b) = *b {
            *a = Some(a.map_or(b, |x| x.max(b)));
        }
    }
}

/// Forward-difference margins of one series, indexed by the later time.
fn increase_margins(series: &[f64]) -> Vec<Option<f64>> {
    let tol = DERIVATIVE_TOL * max_abs(series);
    let mut out = vec![None; series.len()];
    for i in 1..series.len() {
        let (a, b) = (series[i - 1], series[i]);
        if a.is_finite() && b.is_finite() {
            out[i] = Some(b - a - tol);
        }
    }
    out
}

/// Margins against the running minimum of each series.
fn containment_margins(series: &[f64]) -> Vec<Option<f64>> {
    let tol = DERIVATIVE_TOL * max_abs(series);
    let mut out = vec![None; series.len()];
    let mut floor = series.first().copied().unwrap_or(f64::NAN);
    for i in 1..series.len() {
        let b = series[i];
        if b.is_finite() && floor.is_finite() {
            out[i] = Some(b - floor - tol);
            floor = floor.min(b);
        }
    }
    out
}

/// Combined margins of several series, and the index of the series holding
/// the worst one.
fn worst_of(series: &[Vec<f64>], margins: impl Fn(&[f64]) -> Vec<Option<f64>>) -> (Vec<Option<f64>>, usize) {
    let len = series.first().map_or(0, Vec::len);
    let mut acc = vec![None; len];
    let mut worst = f64::NEG_INFINITY;
    let mut which = 0;
    for (j, s) in series.iter().enumerate() {
        let m = margins(s);
        let top = m.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        if top > worst {
            worst = top;
            which = j;
        }
        merge(&mut acc, &m);
    }
    (acc, which)
}

/// Volume `|Det Δ_t|` of the body of states.
///
/// With generator data on a commutative trajectory the sign of `Tr L_t` is
/// reported as the `generator_trace` sub-check.
pub fn w_volume(traj: &Trajectory) -> WitnessRecord {
    let times = traj.times();
    let mut rec = WitnessRecord::evaluated("volume", times, &increase_margins(&traj.volume), traj.volume.clone());
    if traj.flags.commutative {
        if let Some(traces) = &traj.generator_trace {
            let scale = traces.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
            let margins: Vec<Option<f64>> = traces.iter().map(|v| v.map(|x| x - DERIVATIVE_TOL * scale)).collect();
            let undefined = undefined_from(times, traces);
            rec.checks.push(sub_check("generator_trace", times, &margins, Vec::new(), undefined));
        }
    }
    rec
}

fn undefined_from<T>(times: &[f64], values: &[Option<T>]) -> Vec<f64> {
    times.iter().zip(values).filter(|(_, v)| v.is_none()).map(|(&t, _)| t).collect()
}

/// Branchwise moduli `|λ_α(t)|` of a commutative trajectory.
///
/// The recorded series is the branch with the largest increase. Analytic
/// `Re μ_α` is reported as the `analytic_re_mu` sub-check when available.
pub fn w_eigen_moduli(traj: &Trajectory) -> WitnessRecord {
    let times = traj.times();
    if !traj.flags.commutative {
        return WitnessRecord::inapplicable("eigen_moduli", "trajectory is not commutative", times.len());
    }
    let n = traj.eigenvalues.first().map_or(0, Vec::len);
    let paths: Vec<Vec<f64>> = (0..n).map(|a| traj.modulus_path(a)).collect();
    let (margins, which) = worst_of(&paths, increase_margins);
    let mut rec = WitnessRecord::evaluated("eigen_moduli", times, &margins, paths[which].clone());
    rec.note = Some(format!("series shows branch {which}"));
    if let Some(mu) = &traj.analytic_mu {
        let scale = mu.iter().flatten().flatten().fold(1.0f64, |m, z| m.max(z.re.abs()));
        let margins: Vec<Option<f64>> = mu
            .iter()
            .map(|row| {
                row.as_ref()
                    .map(|v| v.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re)) - DERIVATIVE_TOL * scale)
            })
            .collect();
        rec.checks.push(sub_check("analytic_re_mu", times, &margins, Vec::new(), undefined_from(times, mu)));
    }
    rec
}

/// `f(t) = d^{-2} Tr F(t)` for commutative trajectories with real spectrum.
pub fn w_f_monotone(traj: &Trajectory) -> WitnessRecord {
    let times = traj.times();
    if !traj.flags.commutative {
        return WitnessRecord::inapplicable("f_monotone", "trajectory is not commutative", times.len());
    }
    if !traj.spectrum_is_real(REAL_SPECTRUM_TOL) {
        return WitnessRecord::inapplicable("f_monotone", "eigenvalues are not real", times.len());
    }
    WitnessRecord::evaluated("f_monotone", times, &increase_margins(&traj.f), traj.f.clone())
}

/// `⟨α|(𝟙⊗L_t)[P⁺]|α⟩` at each grid time; violation where positive.
///
/// Times where the generator is singular are listed as undefined. The
/// `trace_identity` sub-check compares against `d^{-2} Tr L_t`.
pub fn w_ew_functional(gen: &TimeLocalGenerator, grid: &TimeGrid) -> Result<WitnessRecord> {
    let times = grid.points();
    let d2 = (gen.dim() * gen.dim()) as f64;
    let mut values = Vec::with_capacity(times.len());
    let mut identity = Vec::with_capacity(times.len());
    for &t in times {
        match gen.evaluate(t) {
            Ok(l) => {
                let v = witness_f(&l);
                let tr = l.matrix().trace().re / d2;
                values.push(Some(v));
                identity.push(Some((v - tr).abs() - FUNCTIONAL_IDENTITY_TOL * tr.abs().max(1.0)));
            }
            Err(Error::SingularGenerator { .. }) => {
                values.push(None);
                identity.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    if values.iter().all(Option::is_none) {
        return Ok(WitnessRecord::inapplicable("ew_functional", "generator undefined on the whole grid", times.len()));
    }
    let scale = values.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let margins: Vec<Option<f64>> = values.iter().map(|v| v.map(|x| x - DERIVATIVE_TOL * scale)).collect();
    let series = values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let mut rec = WitnessRecord::evaluated("ew_functional", times, &margins, series);
    rec.undefined_times = undefined_from(times, &values);
    rec.checks.push(sub_check("trace_identity", times, &identity, Vec::new(), rec.undefined_times.clone()));
    Ok(rec)
}

/// Monte Carlo trace-norm test of k-divisibility.
///
/// For `k = 1` the samples are differences of random density matrices; for
/// `k ≥ 2` they are weighted differences `pρ − (1−p)σ` of states on
/// `C^k ⊗ C^d`, including Schmidt-rank-`k` maximally correlated pure states.
/// Only violations are conclusive; a clean run is labelled as such.
pub fn w_blp(traj: &Trajectory, k: usize, samples: usize, seed: u64) -> Result<WitnessRecord> {
    let d = traj.dim;
    if k == 0 || k > d {
        return Err(Error::OrderTooLarge { k, dim: d });
    }
    let name = format!("blp_k{k}");
    let times = traj.times();
    let mut rng = rng_from_seed(seed);
    let xs: Vec<CMatrix> = (0..samples).map(|i| blp_sample(&mut rng, k, d, i)).collect();
    let maps: Vec<SuperOperator> = (0..traj.len()).map(|i| traj.map_at_index(i)).collect();
    let series: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| maps.iter().map(|m| trace_norm_hermitian(&hermitian_part(&m.apply_extended(k, x)))).collect())
        .collect();
    let (margins, which) = if series.is_empty() {
        (vec![None; times.len()], 0)
    } else {
        worst_of(&series, increase_margins)
    };
    let shown = series.get(which).cloned().unwrap_or_else(|| vec![f64::NAN; times.len()]);
    let mut rec = WitnessRecord::evaluated(&name, times, &margins, shown);
    let statement = if rec.is_violated() {
        format!("violation found (sample {which} of {samples})")
    } else {
        format!("no violation found in {samples} samples")
    };
    rec.sampling = Some(Sampling { samples, seed, statement });
    Ok(rec)
}

fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `(U ⊗ V) Σ_{i<k} |i⟩|i⟩ / √k` with Haar-random `U`, `V`.
fn correlated_state<R: Rng + ?Sized>(rng: &mut R, k: usize, d: usize) -> CVector {
    let mut v = CVector::zeros(k * d);
    for i in 0..k {
        v[i * d + i] = real(1.0 / (k as f64).sqrt());
    }
    let u = kron(&random::unitary(rng, k), &random::unitary(rng, d));
    u * v
}

fn blp_sample<R: Rng + ?Sized>(rng: &mut R, k: usize, d: usize, index: usize) -> CMatrix {
    let n = k * d;
    if k == 1 {
        return if index % 2 == 0 {
            random::density_matrix(rng, n) - random::density_matrix(rng, n)
        } else {
            projector(&random::pure_state(rng, n)) - projector(&random::pure_state(rng, n))
        };
    }
    let p: f64 = rng.random();
    let (rho, sigma) = match index % 3 {
        0 => (random::density_matrix(rng, n), random::density_matrix(rng, n)),
        1 => (projector(&random::pure_state(rng, n)), projector(&random::pure_state(rng, n))),
        _ => (projector(&correlated_state(rng, k, d)), projector(&correlated_state(rng, k, d))),
    };
    rho * real(p) - sigma * real(1.0 - p)
}

/// Hilbert-Schmidt norm `‖Λ_t[X]‖₂` over random normal `X` (unital maps).
///
/// The `bloch_identity` sub-check verifies
/// `‖Λ_t[X]‖₂² = d|x₀|² + ‖Δ_t x‖₂²` with `x₀ = Tr X / d`, `x_k = Tr(G_k X)`.
pub fn w_hs_norm(traj: &Trajectory, samples: usize, seed: u64) -> WitnessRecord {
    let times = traj.times();
    if !traj.flags.unital {
        return WitnessRecord::inapplicable("hs_norm", "trajectory is not unital", times.len());
    }
    let d = traj.dim;
    let mut rng = rng_from_seed(seed);
    let xs: Vec<CMatrix> = (0..samples).map(|_| random::normal_matrix(&mut rng, d)).collect();
    let maps: Vec<SuperOperator> = (0..traj.len()).map(|i| traj.map_at_index(i)).collect();
    let basis = traj.basis();
    let deltas: Vec<CMatrix> = traj.frames.iter().map(FMatrix::contraction_complex).collect();

    let mut series = Vec::with_capacity(samples);
    let mut identity = vec![None; times.len()];
    for x in &xs {
        let x0 = linalg::trace(x) / real(d as f64);
        let coeffs = basis.coefficients(x);
        let xv = CVector::from_iterator(coeffs.len() - 1, coeffs[1..].iter().copied());
        let tol = BLOCH_IDENTITY_TOL * frobenius(x).powi(2).max(1.0);
        let mut s = Vec::with_capacity(times.len());
        for (i, m) in maps.iter().enumerate() {
            let lhs = frobenius(&m.apply(x));
            let rhs = (d as f64) * x0.norm_sqr() + (&deltas[i] * &xv).norm_squared();
            let dev = Some((lhs * lhs - rhs).abs() - tol);
            merge(&mut identity[i..=i], &[dev]);
            s.push(lhs);
        }
        series.push(s);
    }
    let (margins, which) = if series.is_empty() {
        (vec![None; times.len()], 0)
    } else {
        worst_of(&series, increase_margins)
    };
    let shown = series.get(which).cloned().unwrap_or_else(|| vec![f64::NAN; times.len()]);
    let mut rec = WitnessRecord::evaluated("hs_norm", times, &margins, shown);
    let statement = if rec.is_violated() {
        format!("violation found (sample {which} of {samples})")
    } else {
        format!("no violation found in {samples} samples")
    };
    rec.sampling = Some(Sampling { samples, seed, statement });
    rec.checks.push(sub_check("bloch_identity", times, &identity, Vec::new(), Vec::new()));
    rec
}

/// Geometry of the body of states at one grid time.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BodyDescriptor {
    pub center: Vec<f64>,
    pub contraction: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// Eigenvalue moduli per branch when the map is Hermitian.
    pub axis_lengths: Option<Vec<f64>>,
}

pub fn body_descriptor(traj: &Trajectory, i: usize) -> BodyDescriptor {
    let delta = traj.frames[i].contraction();
    let contraction = (0..delta.nrows()).map(|r| delta.row(r).iter().copied().collect()).collect();
    let axis_lengths = traj.flags.hermitian.then(|| traj.eigenvalues[i].iter().map(|z| z.norm()).collect());
    BodyDescriptor {
        center: traj.q[i].clone(),
        contraction,
        singular_values: traj.delta_singular_values[i].clone(),
        axis_lengths,
    }
}

/// Nesting of the bodies of states `B(t) ⊆ B(s)` for all grid `t > s`.
///
/// Hermitian maps compare branchwise moduli on the shared eigen-axes; normal
/// maps compare sorted singular values of `Δ_t`, i.e. containment up to a
/// rotation.
pub fn w_body_containment(traj: &Trajectory) -> WitnessRecord {
    let times = traj.times();
    let name = "body_containment";
    if !traj.flags.commutative {
        return WitnessRecord::inapplicable(name, "trajectory is not commutative", times.len());
    }
    let (series, note): (Vec<Vec<f64>>, &str) = if traj.flags.hermitian {
        let n = traj.eigenvalues.first().map_or(0, Vec::len);
        ((0..n).map(|a| traj.modulus_path(a)).collect(), "hermitian: branchwise axes")
    } else if traj.flags.normal {
        let n = traj.delta_singular_values.first().map_or(0, Vec::len);
        let s = (0..n).map(|a| traj.delta_singular_values.iter().map(|row| row[a]).collect()).collect();
        (s, "normal: sorted singular values")
    } else {
        return WitnessRecord::inapplicable(name, "trajectory is neither Hermitian nor normal", times.len());
    };
    let (margins, which) = worst_of(&series, containment_margins);
    let mut rec = WitnessRecord::evaluated(name, times, &margins, series[which].clone());
    rec.note = Some(format!("{note}; series shows axis {which}"));
    rec
}

/// Conditional complete positivity of `L_t` on the grid.
///
/// For generators carrying closed-form rate conditions, the CP and P
/// conditions are reported as `cp_rate_conditions` / `p_rate_conditions`.
pub fn w_cp_divisibility(gen: &TimeLocalGenerator, grid: &TimeGrid) -> Result<WitnessRecord> {
    let times = grid.points();
    let mut series = Vec::with_capacity(times.len());
    let mut margins = Vec::with_capacity(times.len());
    let mut defined = Vec::with_capacity(times.len());
    for &t in times {
        match gen.evaluate(t) {
            Ok(l) => {
                let r = ccp_test(&l)?;
                series.push(r.min_eig);
                margins.push(Some(-r.min_eig - r.tolerance));
                defined.push(Some(()));
            }
            Err(Error::SingularGenerator { .. }) => {
                series.push(f64::NAN);
                margins.push(None);
                defined.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    if defined.iter().all(Option::is_none) {
        return Ok(WitnessRecord::inapplicable("cp_divisibility", "generator undefined on the whole grid", times.len()));
    }
    let mut rec = WitnessRecord::evaluated("cp_divisibility", times, &margins, series);
    rec.undefined_times = undefined_from(times, &defined);

    if let Some(conditions) = gen.conditions() {
        let mut cp = Vec::with_capacity(times.len());
        let mut p = Vec::with_capacity(times.len());
        for &t in times {
            match gen.condition_values(t) {
                Some(Ok(values)) => {
                    let rates = gen.rates(t).unwrap_or_default();
                    let scale = rates.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                    cp.push(Some((values.0, scale)));
                    p.push(Some((values.1, scale)));
                }
                Some(Err(_)) | None => {
                    cp.push(None);
                    p.push(None);
                }
            }
        }
        let labels_cp: Vec<&str> = conditions.cp.iter().map(|c| c.label.as_str()).collect();
        let labels_p: Vec<&str> = conditions.p.iter().map(|c| c.label.as_str()).collect();
        rec.checks.push(condition_check("cp_rate_conditions", times, &cp, &labels_cp));
        rec.checks.push(condition_check("p_rate_conditions", times, &p, &labels_p));
    }
    Ok(rec)
}

fn condition_check(name: &str, times: &[f64], values: &[Option<(Vec<f64>, f64)>], labels: &[&str]) -> SubCheck {
    let mut violated = vec![false; labels.len()];
    let margins: Vec<Option<f64>> = values
        .iter()
        .map(|v| {
            v.as_ref().map(|(vals, scale)| {
                let tol = DERIVATIVE_TOL * scale;
                let mut worst = f64::NEG_INFINITY;
                for (j, &x) in vals.iter().enumerate() {
                    let m = -x - tol;
                    if m > 0.0 {
                        if let Some(flag) = violated.get_mut(j) {
                            *flag = true;
                        }
                    }
                    worst = worst.max(m);
                }
                worst
            })
        })
        .collect();
    let names = labels.iter().zip(&violated).filter(|(_, &v)| v).map(|(l, _)| l.to_string()).collect();
    sub_check(name, times, &margins, names, undefined_from(times, values))
}

/// A violation interval tagged with its witness.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ViolationInterval {
    pub witness: String,
    pub start: f64,
    pub end: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Summary {
    /// `None` when the CP-divisibility witness was not run or inapplicable.
    pub cp_divisible: Option<bool>,
    /// No applicable P-level witness reports a violation.
    pub p_divisible_evidence: bool,
    /// Some applicable P-level witness reports a violation.
    pub essentially_non_markovian_evidence: bool,
    pub text: String,
    pub violations: Vec<ViolationInterval>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WitnessReport {
    pub records: Vec<WitnessRecord>,
    pub summary: Summary,
}

impl WitnessReport {
    pub fn record(&self, name: &str) -> Option<&WitnessRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn any_violation(&self) -> bool {
        self.records.iter().any(WitnessRecord::is_violated)
    }
}

const ORDER: [&str; 7] =
    ["volume", "eigen_moduli", "f_monotone", "ew_functional", "hs_norm", "body_containment", "cp_divisibility"];

fn rank(name: &str) -> (usize, usize) {
    if let Some(k) = name.strip_prefix("blp_k").and_then(|k| k.parse::<usize>().ok()) {
        return (ORDER.len(), k);
    }
    (ORDER.iter().position(|n| *n == name).unwrap_or(ORDER.len() + 1), 0)
}

/// Witnesses whose violation rules out P-divisibility.
fn is_p_level(name: &str) -> bool {
    matches!(name, "volume" | "eigen_moduli" | "f_monotone" | "ew_functional" | "hs_norm" | "body_containment" | "blp_k1")
}

fn p_level_text(name: &str) -> String {
    match name {
        "eigen_moduli" => "P-divisibility violated (eigenvalue moduli increase)".to_string(),
        "volume" => "P-divisibility violated (volume increases)".to_string(),
        "f_monotone" => "P-divisibility violated (f increases)".to_string(),
        "ew_functional" => "P-divisibility violated (witness functional positive)".to_string(),
        "hs_norm" => "P-divisibility violated (Hilbert-Schmidt norm increases)".to_string(),
        "body_containment" => "P-divisibility violated (body of states not nested)".to_string(),
        _ => "P-divisibility violated (trace distance increases)".to_string(),
    }
}

/// Deterministic merge of witness records into a report.
///
/// Records are ordered canonically by name regardless of input order; the
/// summary only looks at applicable records.
pub fn aggregate(records: impl IntoIterator<Item = WitnessRecord>) -> WitnessReport {
    let mut records: Vec<WitnessRecord> = records.into_iter().collect();
    records.sort_by(|a, b| rank(&a.name).cmp(&rank(&b.name)).then_with(|| a.name.cmp(&b.name)));

    let applicable = || records.iter().filter(|r| r.applicable);
    let p_violations: Vec<&WitnessRecord> = applicable().filter(|r| is_p_level(&r.name) && r.is_violated()).collect();
    let cp_record = applicable().find(|r| r.name == "cp_divisibility");
    let cp_divisible = cp_record.map(|r| !r.is_violated());
    let cp_level_violation = applicable().any(|r| !is_p_level(&r.name) && r.is_violated());

    let mut lines: Vec<String> = p_violations.iter().map(|r| p_level_text(&r.name)).collect();
    if cp_level_violation {
        if lines.is_empty() {
            lines.push("CP-indivisible, P-divisibility evidence intact".to_string());
        } else {
            lines.push("CP-indivisible".to_string());
        }
    }
    let text = if lines.is_empty() {
        "no non-Markovianity detected by implemented witnesses".to_string()
    } else {
        lines.join("; ")
    };

    let violations = applicable()
        .flat_map(|r| {
            r.intervals.iter().map(move |iv| ViolationInterval { witness: r.name.clone(), start: iv.start, end: iv.end })
        })
        .collect();

    let summary = Summary {
        cp_divisible,
        p_divisible_evidence: p_violations.is_empty(),
        essentially_non_markovian_evidence: !p_violations.is_empty(),
        text,
        violations,
    };
    WitnessReport { records, summary }
}

/// Central differences of `|λ_α|` on the interior of the grid.
pub fn modulus_derivatives(traj: &Trajectory, alpha: usize) -> Vec<Option<f64>> {
    let t = traj.times();
    let m = traj.modulus_path(alpha);
    (0..m.len())
        .map(|i| {
            if i == 0 || i + 1 == m.len() {
                None
            } else {
                Some((m[i + 1] - m[i - 1]) / (t[i + 1] - t[i - 1]))
            }
        })
        .collect()
}
