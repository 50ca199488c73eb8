//! Propagation of generators and map families into [`Trajectory`] values.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::bases::{gell_mann_basis, OperatorBasis};
use crate::generators::{Family, MapFamily, TimeLocalGenerator, COMMUTATIVITY_TOL};
use crate::linalg::{self, cplx, frobenius, identity, CMatrix};
use crate::ode::{self, OdeOptions};
use crate::random::rng_from_seed;
use crate::superop::{commute_check, order_eigenvalues, FMatrix, SuperOperator, STRUCTURE_TOL};
use crate::{Error, Result};

/// Frames with `|det F| ≤ INVERTIBILITY_FLOOR` are treated as singular.
pub const INVERTIBILITY_FLOOR: f64 = 1e-12;
const REFINE_SUBSTEPS: usize = 8;
const DEGENERACY_TOL: f64 = 1e-7;

/// Strictly increasing times starting at 0.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TimeGrid {
    points: Vec<f64>,
    spacing: Option<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidGrid("a grid needs at least three points"));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidGrid("a grid must start at t = 0"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("grid points must be finite"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("grid points must be strictly increasing"));
        }
        Ok(TimeGrid { points, spacing: None })
    }

    /// `n_points` equally spaced points on `[0, t_max]`.
    pub fn uniform(t_max: f64, n_points: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidGrid("t_max must be positive"));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid("a grid needs at least three points"));
        }
        let h = t_max / (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points).map(|i| i as f64 * h).collect();
        points[n_points - 1] = t_max;
        Ok(TimeGrid { points, spacing: Some(h) })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Step of a uniform grid.
    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    /// Index of the grid point equal to `t` (within rounding).
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let tol = 1e-12 * self.t_max().max(1.0);
        let i = self.points.partition_point(|&p| p < t - tol);
        if i < self.points.len() && (self.points[i] - t).abs() <= tol {
            Ok(i)
        } else {
            Err(Error::NotOnGrid(t))
        }
    }
}

impl Default for TimeGrid {
    /// 501 points on `[0, 5]`.
    fn default() -> Self {
        TimeGrid::uniform(5.0, 501).expect("default grid is valid")
    }
}

/// Structural properties shared by every frame of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrajectoryFlags {
    pub commutative: bool,
    pub hermitian: bool,
    pub normal: bool,
    pub unital: bool,
    pub trace_preserving: bool,
}

/// A dynamical map sampled on a grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub dim: usize,
    pub family: Family,
    pub frames: Vec<FMatrix>,
    /// `eigenvalues[i][α]`: branch `α` at `t_i`, matched by continuity.
    pub eigenvalues: Vec<Vec<Complex64>>,
    /// Singular values of `F(t_i)`, descending.
    pub singular_values: Vec<Vec<f64>>,
    /// Singular values of `Δ(t_i)`, descending.
    pub delta_singular_values: Vec<Vec<f64>>,
    /// `|Det Δ(t_i)|`.
    pub volume: Vec<f64>,
    /// `d^{-2} Tr F(t_i)`.
    pub f: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    /// `|Det F(t_i)|`.
    pub determinant: Vec<f64>,
    /// `Re Tr L_t`, `None` where the generator is undefined.
    pub generator_trace: Option<Vec<Option<f64>>>,
    /// Analytic `μ_α(t_i)` in the generator's eigen-operator order.
    pub analytic_mu: Option<Vec<Option<Vec<Complex64>>>>,
    pub flags: TrajectoryFlags,
    basis: OperatorBasis,
}

impl Trajectory {
    /// Assembles a trajectory from precomputed frames.
    ///
    /// `frame_at` enables local refinement of the eigenvalue matching when
    /// branches come closer than twice their per-step motion.
    pub fn from_frames(
        grid: TimeGrid,
        dim: usize,
        family: Family,
        frames: Vec<FMatrix>,
        commutative: bool,
        generator: Option<&TimeLocalGenerator>,
        frame_at: Option<&dyn Fn(f64) -> Result<CMatrix>>,
    ) -> Result<Self> {
        if frames.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: frames.len() });
        }
        let basis = gell_mann_basis(dim)?;
        let eigenvalues = match_paths(grid.points(), &frames, frame_at)?;

        let mut singular_values = Vec::with_capacity(frames.len());
        let mut delta_singular_values = Vec::with_capacity(frames.len());
        let mut volume = Vec::with_capacity(frames.len());
        let mut f = Vec::with_capacity(frames.len());
        let mut q = Vec::with_capacity(frames.len());
        let mut determinant = Vec::with_capacity(frames.len());
        let mut flags = TrajectoryFlags {
            commutative,
            hermitian: true,
            normal: true,
            unital: true,
            trace_preserving: true,
        };
        for frame in &frames {
            let e = &frame.entries;
            singular_values.push(linalg::singular_values(e));
            let delta = frame.contraction_complex();
            delta_singular_values.push(linalg::singular_values(&delta));
            volume.push(delta.determinant().norm());
            determinant.push(e.determinant().norm());
            f.push(frame.normalized_trace());
            q.push(frame.translation().iter().copied().collect());

            let scale = frobenius(e).max(1.0);
            let ea = e.adjoint();
            flags.hermitian &= frobenius(&(e - &ea)) <= STRUCTURE_TOL * scale;
            flags.normal &= frobenius(&(e * &ea - &ea * e)) <= STRUCTURE_TOL * scale * scale;
            flags.trace_preserving &= frame.trace_row_residual() <= STRUCTURE_TOL * scale;
            let column: f64 = (1..e.nrows()).map(|i| e[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
            flags.unital &= column <= STRUCTURE_TOL * scale;
        }

        let (generator_trace, analytic_mu) = match generator {
            Some(g) => {
                let traces = grid.points().iter().map(|&t| g.trace(t).ok()).collect();
                let mu = g
                    .analytic()
                    .map(|_| grid.points().iter().map(|&t| g.mu(t).and_then(|r| r.ok())).collect());
                (Some(traces), mu)
            }
            None => (None, None),
        };

        Ok(Trajectory {
            grid,
            dim,
            family,
            frames,
            eigenvalues,
            singular_values,
            delta_singular_values,
            volume,
            f,
            q,
            determinant,
            generator_trace,
            analytic_mu,
            flags,
            basis,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    /// `Λ_{t_i}` as a superoperator.
    pub fn map_at_index(&self, i: usize) -> SuperOperator {
        SuperOperator::from_representation(&self.frames[i], &self.basis).expect("frame matches basis")
    }

    /// `|λ_α(t_i)|` along branch `α`.
    pub fn modulus_path(&self, alpha: usize) -> Vec<f64> {
        self.eigenvalues.iter().map(|row| row[alpha].norm()).collect()
    }

    /// Whether every eigenvalue is real to `tol` at every grid time.
    pub fn spectrum_is_real(&self, tol: f64) -> bool {
        self.eigenvalues.iter().all(|row| row.iter().all(|z| z.im.abs() <= tol))
    }

    /// `Σ_k q_k²` under the square root, per time.
    pub fn q_norm(&self) -> Vec<f64> {
        self.q.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
    }
}

/// Greedy assignment of `next` to the predicted positions.
fn assign(predicted: &[Complex64], next: &[Complex64]) -> Vec<Complex64> {
    let n = predicted.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (a, p) in predicted.iter().enumerate() {
        for (b, z) in next.iter().enumerate() {
            pairs.push(((p - z).norm(), a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![Complex64::new(f64::NAN, f64::NAN); n];
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    for (_, a, b) in pairs {
        if !used_a[a] && !used_b[b] {
            out[a] = next[b];
            used_a[a] = true;
            used_b[b] = true;
        }
    }
    out
}

fn predict(prev2: Option<&[Complex64]>, prev: &[Complex64]) -> Vec<Complex64> {
    match prev2 {
        Some(p2) => prev.iter().zip(p2.iter()).map(|(a, b)| a * 2.0 - b).collect(),
        None => prev.to_vec(),
    }
}

fn ambiguous(prev: &[Complex64], matched: &[Complex64]) -> bool {
    let motion = prev
        .iter()
        .zip(matched.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for (i, a) in matched.iter().enumerate() {
        for b in &matched[i + 1..] {
            let dist = (a - b).norm();
            if dist > DEGENERACY_TOL {
                gap = gap.min(dist);
            }
        }
    }
    gap < 2.0 * motion
}

fn match_paths(
    times: &[f64],
    frames: &[FMatrix],
    frame_at: Option<&dyn Fn(f64) -> Result<CMatrix>>,
) -> Result<Vec<Vec<Complex64>>> {
    let mut paths: Vec<Vec<Complex64>> = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let raw = order_eigenvalues(linalg::eigenvalues(&frame.entries));
        if i == 0 {
            paths.push(raw);
            continue;
        }
        if i == 1 {
            // align the initial row with the canonical order of the second
            paths[0] = assign(&raw, &paths[0]);
            paths.push(raw);
            continue;
        }
        let prev = &paths[i - 1];
        let matched = assign(&predict(Some(&paths[i - 2]), prev), &raw);
        let row = match frame_at {
            Some(fa) if ambiguous(prev, &matched) => {
                // track through intermediate times
                let (t0, t1) = (times[i - 1], times[i]);
                let mut p2 = paths[i - 2].clone();
                let mut p1 = prev.clone();
                let h0 = t0 - times[i - 2];
                let sub = (t1 - t0) / REFINE_SUBSTEPS as f64;
                for k in 1..=REFINE_SUBSTEPS {
                    let values = if k == REFINE_SUBSTEPS {
                        raw.clone()
                    } else {
                        linalg::eigenvalues(&fa(t0 + k as f64 * sub)?)
                    };
                    // rescale the linear prediction to the substep
                    let ratio = if k == 1 { sub / h0 } else { 1.0 };
                    let predicted: Vec<Complex64> =
                        p1.iter().zip(p2.iter()).map(|(a, b)| a + (a - b) * ratio).collect();
                    let next = assign(&predicted, &values);
                    p2 = p1;
                    p1 = next;
                }
                p1
            }
            _ => matched,
        };
        paths.push(row);
    }
    Ok(paths)
}

/// How [`propagate_commutative_with`] builds each frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutativeRoute {
    /// `Σ_α e^{∫μ_α} |X_α⟩⟨Y_α|` from the analytic spectrum.
    Analytic,
    /// Matrix exponential of `∫₀ᵗ L`.
    Exponential,
}

fn rep(s: &SuperOperator, b: &CMatrix) -> CMatrix {
    b.adjoint() * s.matrix() * b
}

fn commutative_frame(gen: &TimeLocalGenerator, route: CommutativeRoute, b: &CMatrix, t: f64) -> Result<CMatrix> {
    let map = match route {
        CommutativeRoute::Analytic => gen
            .analytic_map(t)
            .ok_or(Error::InvalidParameter("generator has no analytic spectrum"))??,
        CommutativeRoute::Exponential => gen.integral(t)?.exp(),
    };
    Ok(rep(&map, b))
}

/// `Λ_t = exp(∫₀ᵗ L)`, preferring analytic eigenpaths when available.
pub fn propagate_commutative(gen: &TimeLocalGenerator, grid: &TimeGrid) -> Result<Trajectory> {
    let route = if gen.analytic().is_some() { CommutativeRoute::Analytic } else { CommutativeRoute::Exponential };
    propagate_commutative_with(gen, grid, route)
}

pub fn propagate_commutative_with(
    gen: &TimeLocalGenerator,
    grid: &TimeGrid,
    route: CommutativeRoute,
) -> Result<Trajectory> {
    gen.verify_commutative(grid.points())?;
    let b = gen.basis().change_of_basis();
    let dim = gen.dim();
    let frames = grid
        .points()
        .iter()
        .map(|&t| commutative_frame(gen, route, &b, t).map(|entries| FMatrix { dim, entries }))
        .collect::<Result<Vec<_>>>()?;
    let frame_at = |t: f64| commutative_frame(gen, route, &b, t);
    Trajectory::from_frames(grid.clone(), dim, gen.family(), frames, true, Some(gen), Some(&frame_at))
}

/// Integrates `dF/dt = L(t) F`, `F(0) = 𝟙`, in the Gell-Mann representation.
pub fn propagate_ode(gen: &TimeLocalGenerator, grid: &TimeGrid) -> Result<Trajectory> {
    propagate_ode_with(gen, grid, &OdeOptions::default())
}

pub fn propagate_ode_with(gen: &TimeLocalGenerator, grid: &TimeGrid, opts: &OdeOptions) -> Result<Trajectory> {
    let dim = gen.dim();
    let n = dim * dim;
    let unpack = |y: &[f64]| CMatrix::from_fn(n, n, |i, j| cplx(y[i * n + j], y[n * n + i * n + j]));
    let mut y0 = vec![0.0; 2 * n * n];
    for i in 0..n {
        y0[i * n + i] = 1.0;
    }
    let mut frames = Vec::with_capacity(grid.len());
    frames.push(FMatrix::identity(dim));
    ode::integrate(
        |t, y, dy| {
            let l = gen.evaluate_rep(t)?;
            let d = l * unpack(y);
            for i in 0..n {
                for j in 0..n {
                    dy[i * n + j] = d[(i, j)].re;
                    dy[n * n + i * n + j] = d[(i, j)].im;
                }
            }
            Ok(())
        },
        0.0,
        &y0,
        &grid.points()[1..],
        opts,
        |_, y| {
            frames.push(FMatrix { dim, entries: unpack(y) });
            Ok(())
        },
    )?;
    let commutative = gen.verify_commutative(grid.points()).is_ok();
    Trajectory::from_frames(grid.clone(), dim, gen.family(), frames, commutative, Some(gen), None)
}

/// Samples a map family on the grid. Commutativity is checked on 20
/// pseudo-random pairs of grid times.
pub fn trajectory_from_map(
    family: &dyn MapFamily,
    grid: &TimeGrid,
    generator: Option<&TimeLocalGenerator>,
) -> Result<Trajectory> {
    let dim = family.dim();
    let basis = gell_mann_basis(dim)?;
    let b = basis.change_of_basis();
    let maps = grid.points().iter().map(|&t| family.map_at(t)).collect::<Result<Vec<_>>>()?;
    let mut rng = rng_from_seed(0x00c0_ffee);
    let mut commutative = true;
    for _ in 0..20 {
        let i = rng.random_range(0..maps.len());
        let j = rng.random_range(0..maps.len());
        let scale = (maps[i].frobenius_norm() * maps[j].frobenius_norm()).max(1.0);
        if commute_check(&maps[i], &maps[j])? > COMMUTATIVITY_TOL * scale {
            commutative = false;
            break;
        }
    }
    let frames = maps.iter().map(|m| FMatrix { dim, entries: rep(m, &b) }).collect();
    let frame_at = |t: f64| family.map_at(t).map(|m| rep(&m, &b));
    Trajectory::from_frames(grid.clone(), dim, family.family(), frames, commutative, generator, Some(&frame_at))
}

/// `V_{t,s} = Λ_t Λ_s^{-1}` in the Gell-Mann representation.
pub fn divisor_rep(traj: &Trajectory, t: f64, s: f64) -> Result<FMatrix> {
    if t < s {
        return Err(Error::InvalidParameter("divisor requires t >= s"));
    }
    let i = traj.grid.index_of(t)?;
    let j = traj.grid.index_of(s)?;
    let fs = &traj.frames[j].entries;
    let det = fs.determinant().norm();
    if det <= INVERTIBILITY_FLOOR {
        return Err(Error::NonInvertibleFrame { t: s, det });
    }
    let inv = fs.clone().try_inverse().ok_or(Error::NonInvertibleFrame { t: s, det })?;
    let entries = if i == j { identity(fs.nrows()) } else { &traj.frames[i].entries * inv };
    Ok(FMatrix { dim: traj.dim, entries })
}

/// `V_{t,s}` as a superoperator.
pub fn divisor(traj: &Trajectory, t: f64, s: f64) -> Result<SuperOperator> {
    let f = divisor_rep(traj, t, s)?;
    SuperOperator::from_representation(&f, traj.basis())
}
