//! Time-local generators `L_t = Σ_j γ_j(t) K_j` for the built-in channel
//! families, plus the two families that are specified through their maps
//! (amplitude damping driven by `G(t)` and pure decoherence).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::bases::{
    diagonal_gell_mann, gell_mann_basis, mub_bases, pauli, root_of_unity, weyl_operators, OperatorBasis,
};
use crate::linalg::{
    self, cplx, frobenius, hermitian_eigen, identity, matrix_unit, real, vectorize, CMatrix, I, ONE, ZERO,
};
use crate::ode::{self, OdeOptions};
use crate::quad::{self, MatrixValue};
use crate::random::rng_from_seed;
use crate::rate::{RateFunction, QUADRATURE_TOL};
use crate::superop::{commute_check, SuperOperator};
use crate::{Error, Result};

/// `|G(t)|` below which the amplitude-damping generator is undefined.
pub const SINGULAR_FLOOR: f64 = 1e-12;
/// Relative tolerance of the commutativity re-verification.
pub const COMMUTATIVITY_TOL: f64 = 1e-10;
const COMMUTATIVITY_PAIRS: usize = 20;
const COMMUTATIVITY_SEED: u64 = 0x5eed_c0de;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    DephasingQubit,
    DephasingWeyl,
    DephasingGellMann,
    PerfectDecoherence,
    Pauli,
    Weyl,
    GeneralizedPauli,
    AmplitudeDamping,
    Custom,
}

impl Family {
    pub const BUILT_IN: [Family; 8] = [
        Family::DephasingQubit,
        Family::DephasingWeyl,
        Family::DephasingGellMann,
        Family::PerfectDecoherence,
        Family::Pauli,
        Family::Weyl,
        Family::GeneralizedPauli,
        Family::AmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::DephasingQubit => "dephasing_qubit",
            Family::DephasingWeyl => "dephasing_weyl",
            Family::DephasingGellMann => "dephasing_gellmann",
            Family::PerfectDecoherence => "perfect_decoherence",
            Family::Pauli => "pauli",
            Family::Weyl => "weyl",
            Family::GeneralizedPauli => "generalized_pauli",
            Family::AmplitudeDamping => "amplitude_damping",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One summand `γ(t) K` of a generator.
#[derive(Clone, Debug)]
pub struct Term {
    pub rate: RateFunction,
    pub op: SuperOperator,
}

/// Fixed eigen-operators of a commutative generator.
///
/// `L_t[X_α] = μ_α(t) X_α` and `L_t*[Y_α] = μ̄_α(t) Y_α` with
/// `Tr(X_α Y_β†) = δ_αβ`, where `μ_α(t) = Σ_j γ_j(t) c_jα`.
#[derive(Clone, Debug)]
pub struct AnalyticSpectrum {
    pub right: Vec<CMatrix>,
    pub left: Vec<CMatrix>,
    /// `coefficients[j][α] = c_jα`.
    pub coefficients: Vec<Vec<Complex64>>,
}

impl AnalyticSpectrum {
    fn self_dual(operators: Vec<CMatrix>, coefficients: Vec<Vec<Complex64>>) -> Self {
        AnalyticSpectrum { left: operators.clone(), right: operators, coefficients }
    }

    pub fn len(&self) -> usize {
        self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.right.is_empty()
    }

    fn combine(&self, weights: &[f64]) -> Vec<Complex64> {
        (0..self.len())
            .map(|a| {
                weights
                    .iter()
                    .zip(self.coefficients.iter())
                    .map(|(w, c)| c[a] * real(*w))
                    .sum()
            })
            .collect()
    }

    /// `Σ_α λ_α |X_α⟩⟨Y_α|` as a superoperator.
    fn assemble(&self, dim: usize, lambdas: &[Complex64]) -> SuperOperator {
        let n = dim * dim;
        let mut m = CMatrix::zeros(n, n);
        for ((x, y), l) in self.right.iter().zip(self.left.iter()).zip(lambdas.iter()) {
            m += vectorize(x) * vectorize(y).adjoint() * *l;
        }
        SuperOperator::from_parts(dim, m)
    }
}

/// Linear rate inequality `Σ_j c_j γ_j(t) ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RateCondition {
    pub label: String,
    pub coefficients: Vec<f64>,
}

impl RateCondition {
    fn new(label: String, coefficients: Vec<f64>) -> Self {
        RateCondition { label, coefficients }
    }

    pub fn evaluate(&self, rates: &[f64]) -> f64 {
        self.coefficients.iter().zip(rates.iter()).map(|(c, r)| c * r).sum()
    }
}

/// Closed-form divisibility conditions of a family.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RateConditions {
    /// Complete positivity of the propagators (non-negative Kossakowski
    /// rates).
    pub cp: Vec<RateCondition>,
    /// Monotone decay of every eigenvalue modulus, necessary for positivity
    /// of the propagators.
    pub p: Vec<RateCondition>,
}

fn nonnegative_rates(labels: &[String]) -> Vec<RateCondition> {
    let n = labels.len();
    labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            let mut c = vec![0.0; n];
            c[j] = 1.0;
            RateCondition::new(format!("{label}>=0"), c)
        })
        .collect()
}

type GeneratorHook = Arc<dyn Fn(f64) -> Result<SuperOperator> + Send + Sync>;

/// `L_t = Σ_j γ_j(t) K_j`, optionally plus a user hook `t ↦ L'_t`.
#[derive(Clone)]
pub struct TimeLocalGenerator {
    dim: usize,
    family: Family,
    terms: Vec<Term>,
    rate_labels: Vec<String>,
    hook: Option<GeneratorHook>,
    analytic: Option<AnalyticSpectrum>,
    conditions: Option<RateConditions>,
    declared_commutative: bool,
    basis: OperatorBasis,
    term_reps: Vec<CMatrix>,
}

impl fmt::Debug for TimeLocalGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeLocalGenerator")
            .field("dim", &self.dim)
            .field("family", &self.family)
            .field("rates", &self.rate_labels)
            .field("hook", &self.hook.is_some())
            .field("analytic", &self.analytic.is_some())
            .field("declared_commutative", &self.declared_commutative)
            .finish()
    }
}

impl TimeLocalGenerator {
    pub fn from_terms(
        dim: usize,
        family: Family,
        terms: Vec<Term>,
        rate_labels: Vec<String>,
        declared_commutative: bool,
    ) -> Result<Self> {
        let basis = gell_mann_basis(dim)?;
        for t in &terms {
            if t.op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.op.dim() });
            }
        }
        if rate_labels.len() != terms.len() {
            return Err(Error::RateCount { expected: terms.len(), found: rate_labels.len() });
        }
        let b = basis.change_of_basis();
        let term_reps = terms.iter().map(|t| b.adjoint() * t.op.matrix() * &b).collect();
        Ok(TimeLocalGenerator {
            dim,
            family,
            terms,
            rate_labels,
            hook: None,
            analytic: None,
            conditions: None,
            declared_commutative,
            basis,
            term_reps,
        })
    }

    /// Generator given by a user hook. Declared commutativity is recorded
    /// but [`verify_commutative`](Self::verify_commutative) is what the
    /// propagators rely on.
    pub fn custom<F>(dim: usize, hook: F, declared_commutative: bool) -> Result<Self>
    where
        F: Fn(f64) -> Result<SuperOperator> + Send + Sync + 'static,
    {
        let mut g = Self::from_terms(dim, Family::Custom, Vec::new(), Vec::new(), declared_commutative)?;
        g.hook = Some(Arc::new(hook));
        Ok(g)
    }

    pub fn with_analytic(mut self, spectrum: AnalyticSpectrum) -> Result<Self> {
        let n = self.dim * self.dim;
        if spectrum.right.len() != n || spectrum.left.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: spectrum.right.len() });
        }
        if spectrum.coefficients.len() != self.terms.len()
            || spectrum.coefficients.iter().any(|c| c.len() != n)
        {
            return Err(Error::RateCount { expected: self.terms.len(), found: spectrum.coefficients.len() });
        }
        self.analytic = Some(spectrum);
        Ok(self)
    }

    pub fn with_conditions(mut self, conditions: RateConditions) -> Self {
        self.conditions = Some(conditions);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn rate_labels(&self) -> &[String] {
        &self.rate_labels
    }

    pub fn analytic(&self) -> Option<&AnalyticSpectrum> {
        self.analytic.as_ref()
    }

    pub fn conditions(&self) -> Option<&RateConditions> {
        self.conditions.as_ref()
    }

    pub fn declared_commutative(&self) -> bool {
        self.declared_commutative
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    /// Smallest domain end among the rates, if any is bounded.
    pub fn domain_end(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|t| t.rate.domain_end())
            .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))))
    }

    pub fn rates(&self, t: f64) -> Result<Vec<f64>> {
        self.terms.iter().map(|term| term.rate.value(t)).collect()
    }

    pub fn rate_integrals(&self, t: f64) -> Result<Vec<f64>> {
        self.terms.iter().map(|term| term.rate.integral(t)).collect()
    }

    /// `L_t`.
    pub fn evaluate(&self, t: f64) -> Result<SuperOperator> {
        let mut acc = SuperOperator::zero(self.dim);
        for (term, r) in self.terms.iter().zip(self.rates(t)?) {
            acc = &acc + &(&term.op * r);
        }
        if let Some(hook) = &self.hook {
            let extra = hook(t)?;
            if extra.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: extra.dim() });
            }
            if !extra.matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::SingularGenerator { t });
            }
            acc = &acc + &extra;
        }
        Ok(acc)
    }

    /// `L_t` in the Gell-Mann representation.
    pub fn evaluate_rep(&self, t: f64) -> Result<CMatrix> {
        let n = self.dim * self.dim;
        let mut acc = CMatrix::zeros(n, n);
        for (rep, r) in self.term_reps.iter().zip(self.rates(t)?) {
            acc += rep * real(r);
        }
        if self.hook.is_some() {
            let b = self.basis.change_of_basis();
            let l = self.evaluate_hook_only(t)?;
            acc += b.adjoint() * l.matrix() * b;
        }
        Ok(acc)
    }

    fn evaluate_hook_only(&self, t: f64) -> Result<SuperOperator> {
        match &self.hook {
            Some(hook) => hook(t),
            None => Ok(SuperOperator::zero(self.dim)),
        }
    }

    /// `∫₀ᵗ L_u du`, exact per term where the rates have closed forms.
    pub fn integral(&self, t: f64) -> Result<SuperOperator> {
        let mut acc = SuperOperator::zero(self.dim);
        for (term, r) in self.terms.iter().zip(self.rate_integrals(t)?) {
            acc = &acc + &(&term.op * r);
        }
        if self.hook.is_some() {
            let n = self.dim * self.dim;
            let mut failure = None;
            let value = quad::integrate(
                |u| match self.evaluate_hook_only(u) {
                    Ok(l) => MatrixValue(l.into_matrix()),
                    Err(e) => {
                        failure.get_or_insert(e);
                        MatrixValue(CMatrix::zeros(n, n))
                    }
                },
                0.0,
                t,
                QUADRATURE_TOL,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            acc = &acc + &SuperOperator::from_parts(self.dim, value.0);
        }
        Ok(acc)
    }

    /// `Re Tr L_t` (trace of the `d² x d²` matrix).
    pub fn trace(&self, t: f64) -> Result<f64> {
        Ok(self.evaluate(t)?.matrix().trace().re)
    }

    /// `μ_α(t)`, when the analytic spectrum is known.
    pub fn mu(&self, t: f64) -> Option<Result<Vec<Complex64>>> {
        let spec = self.analytic.as_ref()?;
        Some(self.rates(t).map(|r| spec.combine(&r)))
    }

    /// `∫₀ᵗ μ_α`, so that `λ_α(t) = exp` of it.
    pub fn log_eigenvalues(&self, t: f64) -> Option<Result<Vec<Complex64>>> {
        let spec = self.analytic.as_ref()?;
        Some(self.rate_integrals(t).map(|r| spec.combine(&r)))
    }

    /// `Λ_t = Σ_α λ_α(t) |X_α⟩⟨Y_α|` from the analytic eigenpaths.
    pub fn analytic_map(&self, t: f64) -> Option<Result<SuperOperator>> {
        let spec = self.analytic.as_ref()?;
        Some(self.rate_integrals(t).map(|r| {
            let lambdas: Vec<Complex64> = spec.combine(&r).into_iter().map(|z| z.exp()).collect();
            spec.assemble(self.dim, &lambdas)
        }))
    }

    /// Values of the closed-form CP and P conditions at `t`.
    pub fn condition_values(&self, t: f64) -> Option<Result<(Vec<f64>, Vec<f64>)>> {
        let conds = self.conditions.as_ref()?;
        Some(self.rates(t).map(|r| {
            (
                conds.cp.iter().map(|c| c.evaluate(&r)).collect(),
                conds.p.iter().map(|c| c.evaluate(&r)).collect(),
            )
        }))
    }

    /// Samples `L_t L_s - L_s L_t` over pairs drawn from `times` and returns
    /// the largest relative residual, or [`Error::NotCommutative`].
    pub fn verify_commutative(&self, times: &[f64]) -> Result<f64> {
        if times.is_empty() {
            return Ok(0.0);
        }
        let mut rng = rng_from_seed(COMMUTATIVITY_SEED);
        let mut worst: f64 = 0.0;
        for _ in 0..COMMUTATIVITY_PAIRS {
            let t = times[rng.random_range(0..times.len())];
            let s = times[rng.random_range(0..times.len())];
            let a = self.evaluate(t)?;
            let b = self.evaluate(s)?;
            let scale = (a.frobenius_norm() * b.frobenius_norm()).max(1.0);
            let residual = commute_check(&a, &b)? / scale;
            if residual > COMMUTATIVITY_TOL {
                return Err(Error::NotCommutative { t, s, residual });
            }
            worst = worst.max(residual);
        }
        Ok(worst)
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}_{k}")).collect()
}

fn check_rate_count(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::RateCount { expected, found });
    }
    Ok(())
}

/// `X ↦ ½(U X U† - X)`.
fn half_unitary_term(u: &CMatrix) -> SuperOperator {
    let d = u.nrows();
    &(&SuperOperator::conjugation(u) - &SuperOperator::identity(d)) * 0.5
}

fn pauli_operators() -> Vec<CMatrix> {
    let s = real(core::f64::consts::FRAC_1_SQRT_2);
    let [x, y, z] = pauli();
    vec![identity(2) * s, x * s, y * s, z * s]
}

/// Qubit dephasing `½γ(t)(σz ρ σz - ρ)`.
pub fn dephasing_qubit(gamma: RateFunction) -> TimeLocalGenerator {
    let [_, _, z] = pauli();
    let terms = vec![Term { rate: gamma, op: half_unitary_term(&z) }];
    let rate_labels = vec![String::from("gamma")];
    let coefficients = vec![vec![ZERO, -ONE, -ONE, ZERO]];
    let conditions = RateConditions {
        cp: nonnegative_rates(&rate_labels),
        p: vec![RateCondition::new(String::from("gamma>=0"), vec![1.0])],
    };
    TimeLocalGenerator::from_terms(2, Family::DephasingQubit, terms, rate_labels, true)
        .and_then(|g| g.with_analytic(AnalyticSpectrum::self_dual(pauli_operators(), coefficients)))
        .map(|g| g.with_conditions(conditions))
        .expect("qubit dephasing is well formed")
}

/// Eigenvalue phase of `U_mn` under `X ↦ U_kl X U_kl†`, namely
/// `ω^{lm - kn}`.
pub fn weyl_conjugation_phase(d: usize, k: usize, l: usize, m: usize, n: usize) -> Complex64 {
    root_of_unity(d, (l * m) as i64 - (k * n) as i64)
}

fn weyl_eigen_operators(d: usize) -> Result<Vec<CMatrix>> {
    let w = weyl_operators(d)?;
    let s = real(1.0 / (d as f64).sqrt());
    Ok(w.operators.iter().map(|u| u * s).collect())
}

/// Weyl dephasing `½ Σ_{k=1}^{d-1} γ_k(t)(U_k0 ρ U_k0† - ρ)`.
pub fn dephasing_weyl(d: usize, gammas: Vec<RateFunction>) -> Result<TimeLocalGenerator> {
    let w = weyl_operators(d)?;
    check_rate_count(d - 1, gammas.len())?;
    let terms: Vec<Term> = gammas
        .into_iter()
        .enumerate()
        .map(|(i, rate)| Term { rate, op: half_unitary_term(w.get(i + 1, 0)) })
        .collect();
    let rate_labels = labels("gamma", d - 1);
    let coefficients = (1..d)
        .map(|k| {
            (0..d * d)
                .map(|idx| (weyl_conjugation_phase(d, k, 0, idx / d, idx % d) - ONE) * real(0.5))
                .collect()
        })
        .collect();
    let p = (1..d)
        .map(|n| {
            let c = (1..d)
                .map(|k| 0.5 * (1.0 - (2.0 * PI * (k * n) as f64 / d as f64).cos()))
                .collect();
            RateCondition::new(format!("dephasing(n={n})>=0"), c)
        })
        .collect();
    let conditions = RateConditions { cp: nonnegative_rates(&rate_labels), p };
    Ok(TimeLocalGenerator::from_terms(d, Family::DephasingWeyl, terms, rate_labels, true)?
        .with_analytic(AnalyticSpectrum::self_dual(weyl_eigen_operators(d)?, coefficients))?
        .with_conditions(conditions))
}

/// Gell-Mann dephasing `-½ Σ_l γ_l(t) [V_l, [V_l, ρ]]`.
pub fn dephasing_gellmann(d: usize, gammas: Vec<RateFunction>) -> Result<TimeLocalGenerator> {
    gell_mann_basis(d)?;
    check_rate_count(d - 1, gammas.len())?;
    let diagonals: Vec<CMatrix> = (1..d).map(|l| diagonal_gell_mann(d, l)).collect();
    let terms: Vec<Term> = gammas
        .into_iter()
        .zip(diagonals.iter())
        .map(|(rate, v)| {
            let h = SuperOperator::hamiltonian(v);
            Term { rate, op: &h.compose(&h) * 0.5 }
        })
        .collect();
    let rate_labels = labels("gamma", d - 1);
    let diag = |v: &CMatrix, i: usize| v[(i, i)].re;
    let coefficients = diagonals
        .iter()
        .map(|v| {
            (0..d * d)
                .map(|idx| {
                    let (m, n) = (idx / d, idx % d);
                    real(-0.5 * (diag(v, m) - diag(v, n)).powi(2))
                })
                .collect()
        })
        .collect();
    let mut p = Vec::new();
    for m in 0..d {
        for n in m + 1..d {
            let c = diagonals.iter().map(|v| 0.5 * (diag(v, m) - diag(v, n)).powi(2)).collect();
            p.push(RateCondition::new(format!("coherence({m},{n})>=0"), c));
        }
    }
    let units = (0..d * d).map(|idx| matrix_unit(d, idx / d, idx % d)).collect();
    let conditions = RateConditions { cp: nonnegative_rates(&rate_labels), p };
    Ok(TimeLocalGenerator::from_terms(d, Family::DephasingGellMann, terms, rate_labels, true)?
        .with_analytic(AnalyticSpectrum::self_dual(units, coefficients))?
        .with_conditions(conditions))
}

/// Pauli channel `½ Σ_k γ_k(t)(σ_k ρ σ_k - ρ)`.
pub fn pauli_channel(g1: RateFunction, g2: RateFunction, g3: RateFunction) -> TimeLocalGenerator {
    let sigmas = pauli();
    let terms: Vec<Term> = [g1, g2, g3]
        .into_iter()
        .zip(sigmas.iter())
        .map(|(rate, s)| Term { rate, op: half_unitary_term(s) })
        .collect();
    let rate_labels = labels("gamma", 3);
    let coefficients = (1..=3)
        .map(|k| (0..4).map(|a| if a == 0 || a == k { ZERO } else { -ONE }).collect())
        .collect();
    let p = [(1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(i, j)| {
            let mut c = vec![0.0; 3];
            c[i - 1] = 1.0;
            c[j - 1] = 1.0;
            RateCondition::new(format!("gamma_{i}+gamma_{j}>=0"), c)
        })
        .collect();
    let conditions = RateConditions { cp: nonnegative_rates(&rate_labels), p };
    TimeLocalGenerator::from_terms(2, Family::Pauli, terms, rate_labels, true)
        .and_then(|g| g.with_analytic(AnalyticSpectrum::self_dual(pauli_operators(), coefficients)))
        .map(|g| g.with_conditions(conditions))
        .expect("Pauli channel is well formed")
}

/// Index pairs `(k, l) ≠ (0, 0)` in the order the Weyl-channel rates are
/// given.
pub fn weyl_rate_indices(d: usize) -> Vec<(usize, usize)> {
    (1..d * d).map(|i| (i / d, i % d)).collect()
}

/// Weyl channel `Σ_{(k,l)≠(0,0)} γ_kl(t)(U_kl ρ U_kl† - ρ)`; rates ordered
/// as [`weyl_rate_indices`].
pub fn weyl_channel(d: usize, gammas: Vec<RateFunction>) -> Result<TimeLocalGenerator> {
    let w = weyl_operators(d)?;
    check_rate_count(d * d - 1, gammas.len())?;
    let indices = weyl_rate_indices(d);
    let terms: Vec<Term> = gammas
        .into_iter()
        .zip(indices.iter())
        .map(|(rate, &(k, l))| Term {
            rate,
            op: &SuperOperator::conjugation(w.get(k, l)) - &SuperOperator::identity(d),
        })
        .collect();
    let rate_labels: Vec<String> = indices.iter().map(|(k, l)| format!("gamma_{k}{l}")).collect();
    let coefficients = indices
        .iter()
        .map(|&(k, l)| {
            (0..d * d)
                .map(|idx| weyl_conjugation_phase(d, k, l, idx / d, idx % d) - ONE)
                .collect()
        })
        .collect();
    let p = indices
        .iter()
        .map(|&(m, n)| RateCondition::new(format!("weyl({m},{n})>=0"), weyl_condition_coefficients(d, m, n)))
        .collect();
    let conditions = RateConditions { cp: nonnegative_rates(&rate_labels), p };
    Ok(TimeLocalGenerator::from_terms(d, Family::Weyl, terms, rate_labels, true)?
        .with_analytic(AnalyticSpectrum::self_dual(weyl_eigen_operators(d)?, coefficients))?
        .with_conditions(conditions))
}

/// Coefficients `1 - Re ω^{mk - nl}` over the rates `γ_kl`, so that the
/// modulus of the `(m, n)` eigenvalue decays iff the weighted sum is
/// non-negative.
pub fn weyl_condition_coefficients(d: usize, m: usize, n: usize) -> Vec<f64> {
    weyl_rate_indices(d)
        .iter()
        .map(|&(k, l)| 1.0 - root_of_unity(d, (m * k) as i64 - (n * l) as i64).re)
        .collect()
}

/// Generalized Pauli channel `Σ_α γ_α(t)(P_α[ρ] - ρ)` over the `d + 1`
/// mutually unbiased bases of prime `d`, where `P_α` is the complete
/// measurement in basis `α`.
pub fn generalized_pauli(d: usize, gammas: Vec<RateFunction>) -> Result<TimeLocalGenerator> {
    let mubs = mub_bases(d)?;
    check_rate_count(d + 1, gammas.len())?;
    let id = SuperOperator::identity(d);
    let terms: Vec<Term> = gammas
        .into_iter()
        .enumerate()
        .map(|(alpha, rate)| {
            let mut p = SuperOperator::zero(d);
            for proj in mubs.projectors(alpha) {
                p = &p + &SuperOperator::sandwich(&proj, &proj);
            }
            Term { rate, op: &p - &id }
        })
        .collect();
    let rate_labels = labels("gamma", d + 1);

    let s = real(1.0 / (d as f64).sqrt());
    let mut operators = vec![identity(d) * s];
    let mut owner = vec![None];
    for alpha in 0..=d {
        let projectors = mubs.projectors(alpha);
        for k in 1..d {
            let mut w = CMatrix::zeros(d, d);
            for (l, p) in projectors.iter().enumerate() {
                w += p * root_of_unity(d, (k * l) as i64);
            }
            operators.push(w * s);
            owner.push(Some(alpha));
        }
    }
    let coefficients = (0..=d)
        .map(|beta| {
            owner
                .iter()
                .map(|o| match o {
                    None => ZERO,
                    Some(alpha) if *alpha == beta => ZERO,
                    Some(_) => -ONE,
                })
                .collect()
        })
        .collect();
    let p = (0..=d)
        .map(|alpha| {
            let c = (0..=d).map(|beta| if beta == alpha { 0.0 } else { 1.0 }).collect();
            RateCondition::new(format!("gamma-gamma_{}>=0", alpha + 1), c)
        })
        .collect();
    let conditions = RateConditions { cp: nonnegative_rates(&rate_labels), p };
    Ok(TimeLocalGenerator::from_terms(d, Family::GeneralizedPauli, terms, rate_labels, true)?
        .with_analytic(AnalyticSpectrum::self_dual(operators, coefficients))?
        .with_conditions(conditions))
}

/// A family given directly by its maps `t ↦ Λ_t`.
pub trait MapFamily {
    fn dim(&self) -> usize;
    fn family(&self) -> Family;
    fn map_at(&self, t: f64) -> Result<SuperOperator>;
}

type CoherenceFn = Arc<dyn Fn(f64) -> Result<(Complex64, Complex64)> + Send + Sync>;

/// Qubit amplitude damping driven by a coherence function `G(t)`, `G(0) = 1`.
///
/// Ground state `|0⟩`, excited state `|1⟩`. The map sends
/// `ρ_11 ↦ |G|² ρ_11`, `ρ_01 ↦ G ρ_01`, and moves the lost excited
/// population to the ground state. The generator is
/// `γ(t) D[σ₋] + (i s(t)/2)[σ₊σ₋, ·]` with `γ = -2 Re(Ġ/G)` and
/// `s = -2 Im(Ġ/G)`; it is undefined where `|G| < SINGULAR_FLOOR`.
#[derive(Clone)]
pub struct AmplitudeDamping {
    coherence: CoherenceFn,
}

impl fmt::Debug for AmplitudeDamping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AmplitudeDamping")
    }
}

impl AmplitudeDamping {
    /// `coherence(t)` returns `(G(t), Ġ(t))`.
    pub fn new<F>(coherence: F) -> Self
    where
        F: Fn(f64) -> Result<(Complex64, Complex64)> + Send + Sync + 'static,
    {
        AmplitudeDamping { coherence: Arc::new(coherence) }
    }

    pub fn from_lorentzian(g: LorentzianG) -> Self {
        Self::new(move |t| g.value(t))
    }

    pub fn g(&self, t: f64) -> Result<Complex64> {
        Ok((self.coherence)(t)?.0)
    }

    fn log_derivative(&self, t: f64) -> Result<Complex64> {
        let (g, dg) = (self.coherence)(t)?;
        if g.norm() < SINGULAR_FLOOR {
            return Err(Error::SingularGenerator { t });
        }
        Ok(dg / g)
    }

    /// `γ(t) = -2 Re(Ġ/G)`.
    pub fn gamma(&self, t: f64) -> Result<f64> {
        Ok(-2.0 * self.log_derivative(t)?.re)
    }

    /// `s(t) = -2 Im(Ġ/G)`.
    pub fn s(&self, t: f64) -> Result<f64> {
        Ok(-2.0 * self.log_derivative(t)?.im)
    }

    /// Channel matrix built directly from `G(t)`.
    pub fn channel(g: Complex64) -> SuperOperator {
        let p = g.norm_sqr();
        SuperOperator::from_fn(2, |x| {
            let mut y = CMatrix::zeros(2, 2);
            y[(0, 0)] = x[(0, 0)] + x[(1, 1)] * real(1.0 - p);
            y[(0, 1)] = g * x[(0, 1)];
            y[(1, 0)] = g.conj() * x[(1, 0)];
            y[(1, 1)] = x[(1, 1)] * real(p);
            y
        })
    }

    pub fn generator(&self) -> TimeLocalGenerator {
        let mut lowering = CMatrix::zeros(2, 2);
        lowering[(0, 1)] = ONE;
        let excited = matrix_unit(2, 1, 1);
        let ground = matrix_unit(2, 0, 0);
        let shift = SuperOperator::hamiltonian(&(&excited * real(-0.5)));

        let (a, b, c) = (self.clone(), self.clone(), self.clone());
        let gamma = RateFunction::custom_with_antiderivative(
            move |t| a.gamma(t).unwrap_or(f64::NAN),
            move |t| match b.g(t) {
                Ok(g) => -2.0 * g.norm().ln(),
                Err(_) => f64::NAN,
            },
        );
        let s = RateFunction::custom(move |t| c.s(t).unwrap_or(f64::NAN));
        let terms = vec![
            Term { rate: gamma, op: SuperOperator::dissipator(&lowering) },
            Term { rate: s, op: shift },
        ];
        let rate_labels = vec![String::from("gamma"), String::from("s")];
        let e01 = matrix_unit(2, 0, 1);
        let e10 = matrix_unit(2, 1, 0);
        let spectrum = AnalyticSpectrum {
            right: vec![ground.clone(), e01.clone(), e10.clone(), &excited - &ground],
            left: vec![identity(2), e01, e10, excited],
            coefficients: vec![
                vec![ZERO, real(-0.5), real(-0.5), -ONE],
                vec![ZERO, cplx(0.0, -0.5), cplx(0.0, 0.5), ZERO],
            ],
        };
        let conditions = RateConditions {
            cp: vec![RateCondition::new(String::from("gamma>=0"), vec![1.0, 0.0])],
            p: vec![RateCondition::new(String::from("gamma>=0"), vec![1.0, 0.0])],
        };
        TimeLocalGenerator::from_terms(2, Family::AmplitudeDamping, terms, rate_labels, true)
            .and_then(|g| g.with_analytic(spectrum))
            .map(|g| g.with_conditions(conditions))
            .expect("amplitude damping is well formed")
    }
}

impl MapFamily for AmplitudeDamping {
    fn dim(&self) -> usize {
        2
    }

    fn family(&self) -> Family {
        Family::AmplitudeDamping
    }

    fn map_at(&self, t: f64) -> Result<SuperOperator> {
        Ok(Self::channel(self.g(t)?))
    }
}

/// Lorentzian spectral density
/// `J(ω) = γ_M λ² / (2π[(ω - ω_c)² + λ²])` seen by a qubit detuned from
/// `ω_c` by `detuning`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LorentzianBath {
    pub gamma_m: f64,
    pub lambda: f64,
    pub omega_c: f64,
    pub detuning: f64,
}

impl LorentzianBath {
    pub fn new(gamma_m: f64, lambda: f64, omega_c: f64, detuning: f64) -> Result<Self> {
        let bath = LorentzianBath { gamma_m, lambda, omega_c, detuning };
        bath.validate()?;
        Ok(bath)
    }

    pub fn resonant(gamma_m: f64, lambda: f64) -> Result<Self> {
        Self::new(gamma_m, lambda, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be positive"));
        }
        if !(self.gamma_m >= 0.0 && self.gamma_m.is_finite()) {
            return Err(Error::InvalidParameter("gamma_M must be non-negative"));
        }
        if !self.detuning.is_finite() || !self.omega_c.is_finite() {
            return Err(Error::InvalidParameter("frequencies must be finite"));
        }
        Ok(())
    }

    /// Strong coupling regime `2γ_M > λ`.
    pub fn is_strong(&self) -> bool {
        2.0 * self.gamma_m > self.lambda
    }
}

const CHECKPOINTS: usize = 256;

/// `G(t)` for a [`LorentzianBath`], from the initial-value problem
/// `Ġ = -K`, `K̇ = (γ_M λ/2) G - (λ - iΔ) K`, `G(0) = 1`, `K(0) = 0`.
/// `K` is the memory integral of the exponential kernel
/// `(γ_M λ/2) e^{-(λ - iΔ)t}`.
#[derive(Clone, Debug)]
pub struct LorentzianG {
    bath: LorentzianBath,
    t_max: f64,
    step: f64,
    states: Vec<[f64; 4]>,
    opts: OdeOptions,
}

fn lorentzian_rhs(bath: &LorentzianBath, y: &[f64], dy: &mut [f64]) {
    let g = cplx(y[0], y[1]);
    let k = cplx(y[2], y[3]);
    let dg = -k;
    let dk = g * real(0.5 * bath.gamma_m * bath.lambda) - cplx(bath.lambda, -bath.detuning) * k;
    dy[0] = dg.re;
    dy[1] = dg.im;
    dy[2] = dk.re;
    dy[3] = dk.im;
}

/// Integrates `G` on `[0, t_max]`, storing checkpoints for later evaluation.
pub fn lorentzian_g(bath: LorentzianBath, t_max: f64) -> Result<LorentzianG> {
    bath.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter("t_max must be positive"));
    }
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..OdeOptions::default() };
    let step = t_max / CHECKPOINTS as f64;
    let outputs: Vec<f64> = (1..=CHECKPOINTS).map(|i| i as f64 * step).collect();
    let mut states = vec![[1.0, 0.0, 0.0, 0.0]];
    ode::integrate(
        |_, y, dy| {
            lorentzian_rhs(&bath, y, dy);
            Ok(())
        },
        0.0,
        &[1.0, 0.0, 0.0, 0.0],
        &outputs,
        &opts,
        |_, y| {
            states.push([y[0], y[1], y[2], y[3]]);
            Ok(())
        },
    )?;
    Ok(LorentzianG { bath, t_max, step, states, opts })
}

impl LorentzianG {
    pub fn bath(&self) -> &LorentzianBath {
        &self.bath
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// `(G(t), Ġ(t))`.
    pub fn value(&self, t: f64) -> Result<(Complex64, Complex64)> {
        if !(t >= 0.0 && t <= self.t_max) {
            return Err(Error::OutOfDomain { t, start: 0.0, end: self.t_max });
        }
        let i = ((t / self.step).floor() as usize).min(CHECKPOINTS);
        let t0 = i as f64 * self.step;
        let y0 = self.states[i];
        let y = if t > t0 {
            ode::integrate(
                |_, y, dy| {
                    lorentzian_rhs(&self.bath, y, dy);
                    Ok(())
                },
                t0,
                &y0,
                &[t],
                &self.opts,
                |_, _| Ok(()),
            )?
        } else {
            y0.to_vec()
        };
        Ok((cplx(y[0], y[1]), -cplx(y[2], y[3])))
    }

    pub fn g(&self, t: f64) -> Result<Complex64> {
        Ok(self.value(t)?.0)
    }
}

/// Pure-decoherence model `H = Σ_k |k⟩⟨k| ⊗ Z_k` with
/// `Z_k = ε_k 𝟙 + H_B + B_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceModel {
    pub dim_a: usize,
    pub dim_b: usize,
    pub eps: Vec<f64>,
    pub h_b: CMatrix,
    pub couplings: Vec<CMatrix>,
    pub rho_b: CMatrix,
}

impl DecoherenceModel {
    pub fn new(eps: Vec<f64>, h_b: CMatrix, couplings: Vec<CMatrix>, rho_b: CMatrix) -> Result<Self> {
        let dim_a = eps.len();
        let dim_b = h_b.nrows();
        if dim_a < 2 {
            return Err(Error::InvalidDimension(dim_a));
        }
        if dim_b < 1 {
            return Err(Error::InvalidDimension(dim_b));
        }
        if couplings.len() != dim_a {
            return Err(Error::DimensionMismatch { expected: dim_a, found: couplings.len() });
        }
        let square = |m: &CMatrix| m.nrows() == dim_b && m.ncols() == dim_b;
        if !square(&h_b) || !square(&rho_b) || !couplings.iter().all(square) {
            return Err(Error::DimensionMismatch { expected: dim_b, found: rho_b.nrows() });
        }
        if eps.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("system energies must be finite"));
        }
        let scale = |m: &CMatrix| 1e-12 * frobenius(m).max(1.0);
        if !linalg::is_hermitian(&h_b, scale(&h_b)) {
            return Err(Error::NotHermitian("H_B"));
        }
        if !couplings.iter().all(|b| linalg::is_hermitian(b, scale(b))) {
            return Err(Error::NotHermitian("B_k"));
        }
        if !linalg::is_hermitian(&rho_b, 1e-12) {
            return Err(Error::NotHermitian("rho_B"));
        }
        if (rho_b.trace() - ONE).norm() > 1e-10 {
            return Err(Error::InvalidState("rho_B must have unit trace"));
        }
        if linalg::hermitian_eigenvalues(&rho_b).first().copied().unwrap_or(0.0) < -1e-10 {
            return Err(Error::InvalidState("rho_B must be positive semidefinite"));
        }
        Ok(DecoherenceModel { dim_a, dim_b, eps, h_b, couplings, rho_b })
    }
}

/// Map family `ρ_kl ↦ c_kl(t) ρ_kl` of a [`DecoherenceModel`], with
/// `c_kl(t) = Tr(e^{-iZ_k t} ρ_B e^{iZ_l t})`.
#[derive(Clone, Debug)]
pub struct PerfectDecoherence {
    model: DecoherenceModel,
    // eigen-decomposition of each Z_k
    spectra: Vec<(Vec<f64>, CMatrix)>,
}

pub fn perfect_decoherence(model: DecoherenceModel) -> PerfectDecoherence {
    let eye = identity(model.dim_b);
    let spectra = model
        .eps
        .iter()
        .zip(model.couplings.iter())
        .map(|(e, b)| {
            let z = &eye * real(*e) + &model.h_b + b;
            hermitian_eigen(&linalg::hermitian_part(&z))
        })
        .collect();
    PerfectDecoherence { model, spectra }
}

impl PerfectDecoherence {
    pub fn model(&self) -> &DecoherenceModel {
        &self.model
    }

    /// `e^{-i Z_k t}`.
    pub fn propagator(&self, k: usize, t: f64) -> CMatrix {
        let (values, vectors) = &self.spectra[k];
        let phases = CMatrix::from_diagonal(&linalg::CVector::from_iterator(
            values.len(),
            values.iter().map(|z| (-I * real(z * t)).exp()),
        ));
        vectors * phases * vectors.adjoint()
    }

    /// Matrix of decoherence factors `c_kl(t)`; the diagonal is exactly 1.
    pub fn coefficients(&self, t: f64) -> CMatrix {
        let d = self.model.dim_a;
        let props: Vec<CMatrix> = (0..d).map(|k| self.propagator(k, t)).collect();
        CMatrix::from_fn(d, d, |k, l| {
            if k == l {
                ONE
            } else {
                (&props[k] * &self.model.rho_b * props[l].adjoint()).trace()
            }
        })
    }
}

impl MapFamily for PerfectDecoherence {
    fn dim(&self) -> usize {
        self.model.dim_a
    }

    fn family(&self) -> Family {
        Family::PerfectDecoherence
    }

    fn map_at(&self, t: f64) -> Result<SuperOperator> {
        let d = self.model.dim_a;
        let c = self.coefficients(t);
        let mut m = CMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for l in 0..d {
                m[(k * d + l, k * d + l)] = c[(k, l)];
            }
        }
        SuperOperator::new(d, m)
    }
}
