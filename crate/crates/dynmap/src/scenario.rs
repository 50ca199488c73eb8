//! Builds models from configs and evaluates the selected witnesses.

use dynmap_core::dynamics::{
    propagate_commutative, propagate_ode, trajectory_from_map, TimeGrid, Trajectory,
};
use dynmap_core::generators::{
    dephasing_gellmann, dephasing_qubit, dephasing_weyl, generalized_pauli, lorentzian_g, pauli_channel,
    perfect_decoherence, weyl_channel, AmplitudeDamping, DecoherenceModel, LorentzianBath, TimeLocalGenerator,
};
use dynmap_core::linalg::{cplx, CMatrix};
use dynmap_core::rate::{RateFunction, Tabulated};
use dynmap_core::witness::{self, WitnessRecord, WitnessReport};

use crate::config::{Entry, FamilyTag, MatrixSpec, Propagation, RateSpec, Scenario, WitnessName};
use crate::error::{CliError, CliResult};

/// A propagated scenario with its witness report.
pub struct Outcome {
    pub trajectory: Trajectory,
    pub report: WitnessReport,
}

enum Model {
    Generator(TimeLocalGenerator),
    Damping(AmplitudeDamping),
    Decoherence(dynmap_core::generators::PerfectDecoherence),
}

fn rate(spec: &RateSpec, scenario: &Scenario) -> CliResult<RateFunction> {
    Ok(match spec {
        RateSpec::Constant(c) => RateFunction::constant(*c),
        RateSpec::Sine { amplitude, frequency, phase } => RateFunction::sine(*amplitude, *frequency, *phase),
        RateSpec::Tanh { amplitude, scale } => RateFunction::tanh(*amplitude, *scale),
        RateSpec::Exponential { amplitude, decay } => RateFunction::exponential(*amplitude, *decay),
        RateSpec::Csv(path) => RateFunction::Tabulated(read_table(&scenario.resolve_input(path))?),
        RateSpec::Sum(parts) => RateFunction::Sum(parts.iter().map(|p| rate(p, scenario)).collect::<CliResult<_>>()?),
    })
}

fn read_table(path: &std::path::Path) -> CliResult<Tabulated> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::config(format!("cannot read rate table {}: {e}", path.display())))?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for row in reader.records() {
        let row = row.map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let parse = |i: usize| -> CliResult<f64> {
            row.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::config(format!("{}: malformed row {:?}", path.display(), row)))
        };
        times.push(parse(0)?);
        values.push(parse(1)?);
    }
    Tabulated::new(times, values).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn matrix(spec: &MatrixSpec, what: &str) -> CliResult<CMatrix> {
    let n = spec.len();
    if n == 0 || spec.iter().any(|row| row.len() != n) {
        return Err(CliError::config(format!("{what} must be a non-empty square matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| match spec[i][j] {
        Entry::Real(x) => cplx(x, 0.0),
        Entry::Complex([re, im]) => cplx(re, im),
    }))
}

fn build(scenario: &Scenario) -> CliResult<Model> {
    let m = &scenario.config.model;
    let d = m.dimension()?;
    let rates = || -> CliResult<Vec<RateFunction>> {
        m.rates.as_deref().unwrap_or_default().iter().map(|r| rate(r, scenario)).collect()
    };
    let config_err = |e: dynmap_core::Error| CliError::config(format!("{}: {e}", m.family.name()));
    Ok(match m.family {
        FamilyTag::DephasingQubit => Model::Generator(dephasing_qubit(rates()?.remove(0))),
        FamilyTag::DephasingWeyl => Model::Generator(dephasing_weyl(d, rates()?).map_err(config_err)?),
        FamilyTag::DephasingGellmann => Model::Generator(dephasing_gellmann(d, rates()?).map_err(config_err)?),
        FamilyTag::Pauli => {
            let mut r = rates()?.into_iter();
            let (a, b, c) = (r.next().unwrap(), r.next().unwrap(), r.next().unwrap());
            Model::Generator(pauli_channel(a, b, c))
        }
        FamilyTag::Weyl => Model::Generator(weyl_channel(d, rates()?).map_err(config_err)?),
        FamilyTag::GeneralizedPauli => Model::Generator(generalized_pauli(d, rates()?).map_err(config_err)?),
        FamilyTag::AmplitudeDamping => {
            let b = m.bath.as_ref().expect("validated");
            let bath = LorentzianBath::new(b.gamma_m, b.lambda, b.omega_c, b.detuning).map_err(config_err)?;
            Model::Damping(AmplitudeDamping::from_lorentzian(lorentzian_g(bath, scenario.config.grid.t_max)?))
        }
        FamilyTag::PerfectDecoherence => {
            let env = m.environment.as_ref().expect("validated");
            let couplings = env
                .couplings
                .iter()
                .enumerate()
                .map(|(k, c)| matrix(c, &format!("couplings[{k}]")))
                .collect::<CliResult<Vec<_>>>()?;
            let model = DecoherenceModel::new(
                env.eps.clone(),
                matrix(&env.h_b, "h_b")?,
                couplings,
                matrix(&env.rho_b, "rho_b")?,
            )
            .map_err(config_err)?;
            Model::Decoherence(perfect_decoherence(model))
        }
    })
}

/// Propagates the scenario's model and evaluates the selected witnesses.
pub fn evaluate(scenario: &Scenario) -> CliResult<Outcome> {
    let cfg = &scenario.config;
    let grid = TimeGrid::uniform(cfg.grid.t_max, cfg.grid.points).map_err(|e| CliError::config(e.to_string()))?;
    let model = build(scenario)?;
    let (trajectory, generator) = match &model {
        Model::Generator(gen) => {
            let traj = match cfg.model.propagation {
                Propagation::Ode => propagate_ode(gen, &grid)?,
                Propagation::Auto | Propagation::Commutative => propagate_commutative(gen, &grid)?,
            };
            (traj, Some(gen.clone()))
        }
        Model::Damping(ad) => {
            let gen = ad.generator();
            let traj = match cfg.model.propagation {
                Propagation::Ode => propagate_ode(&gen, &grid)?,
                Propagation::Commutative => propagate_commutative(&gen, &grid)?,
                Propagation::Auto => trajectory_from_map(ad, &grid, Some(&gen))?,
            };
            (traj, Some(gen))
        }
        Model::Decoherence(pd) => (trajectory_from_map(pd, &grid, None)?, None),
    };
    let records = witnesses(scenario, &trajectory, generator.as_ref(), &grid)?;
    Ok(Outcome { trajectory, report: witness::aggregate(records) })
}

fn witnesses(
    scenario: &Scenario,
    traj: &Trajectory,
    gen: Option<&TimeLocalGenerator>,
    grid: &TimeGrid,
) -> CliResult<Vec<WitnessRecord>> {
    let cfg = &scenario.config;
    let w = &cfg.witnesses;
    let seed = cfg.seed.unwrap_or(0);
    let mut selected = w.select.clone();
    selected.sort();
    selected.dedup();
    let mut out = Vec::new();
    for name in selected {
        match name {
            WitnessName::Volume => out.push(witness::w_volume(traj)),
            WitnessName::EigenModuli => out.push(witness::w_eigen_moduli(traj)),
            WitnessName::FMonotone => out.push(witness::w_f_monotone(traj)),
            WitnessName::EwFunctional => out.push(match gen {
                Some(g) => witness::w_ew_functional(g, grid)?,
                None => WitnessRecord::inapplicable("ew_functional", "no generator", grid.len()),
            }),
            WitnessName::HsNorm => out.push(witness::w_hs_norm(traj, w.hs_samples, seed)),
            WitnessName::BodyContainment => out.push(witness::w_body_containment(traj)),
            WitnessName::CpDivisibility => out.push(match gen {
                Some(g) => witness::w_cp_divisibility(g, grid)?,
                None => WitnessRecord::inapplicable("cp_divisibility", "no generator", grid.len()),
            }),
            WitnessName::Blp => {
                let mut orders = w.blp_orders.clone();
                orders.sort_unstable();
                orders.dedup();
                for k in orders {
                    out.push(witness::w_blp(traj, k, w.blp_samples, seed)?);
                }
            }
        }
    }
    Ok(out)
}
