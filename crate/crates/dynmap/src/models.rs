//! Catalogue of the built-in families for `list-models`.

use serde::Serialize;

use crate::config::{
    BathConfig, EnvironmentConfig, Entry, FamilyTag, GridConfig, ModelConfig, OutputConfig, Propagation, RateSpec,
    ScenarioConfig, WitnessConfig,
};

#[derive(Clone, Debug, Serialize)]
pub struct Parameter {
    pub key: &'static str,
    pub description: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelEntry {
    pub family: &'static str,
    pub example: &'static str,
    pub description: &'static str,
    pub parameters: Vec<Parameter>,
    /// A complete scenario that passes validation.
    pub example_config: ScenarioConfig,
}

fn p(key: &'static str, description: &'static str) -> Parameter {
    Parameter { key, description }
}

fn rates_param(description: &'static str) -> Parameter {
    p("model.rates", description)
}

fn scenario(name: &str, model: ModelConfig) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        seed: None,
        model,
        grid: GridConfig::default(),
        witnesses: WitnessConfig::default(),
        output: OutputConfig::default(),
    }
}

fn model(family: FamilyTag, dim: Option<usize>, rates: Vec<RateSpec>) -> ModelConfig {
    ModelConfig { family, dim, rates: Some(rates), bath: None, environment: None, propagation: Propagation::Auto }
}

fn c(x: f64) -> RateSpec {
    RateSpec::Constant(x)
}

fn real(rows: &[&[f64]]) -> Vec<Vec<Entry>> {
    rows.iter().map(|r| r.iter().map(|&x| Entry::Real(x)).collect()).collect()
}

pub fn catalogue() -> Vec<ModelEntry> {
    FamilyTag::ALL.iter().map(|&f| entry(f)).collect()
}

fn entry(family: FamilyTag) -> ModelEntry {
    let dim = p("model.dim", "Hilbert space dimension d");
    match family {
        FamilyTag::DephasingQubit => ModelEntry {
            family: family.name(),
            example: "example: qubit dephasing",
            description: "L[ρ] = ½ γ(t) (σz ρ σz - ρ)",
            parameters: vec![rates_param("[γ]")],
            example_config: scenario("dephasing-qubit", model(family, None, vec![c(1.0)])),
        },
        FamilyTag::DephasingWeyl => ModelEntry {
            family: family.name(),
            example: "example: dephasing by diagonal Weyl operators",
            description: "L[ρ] = ½ Σ_k γ_k(t) (U_k0 ρ U_k0† - ρ), k = 1..d-1",
            parameters: vec![dim.clone(), rates_param("d-1 rates γ_k")],
            example_config: scenario("dephasing-weyl", model(family, Some(3), vec![c(0.4), c(0.2)])),
        },
        FamilyTag::DephasingGellmann => ModelEntry {
            family: family.name(),
            example: "example: dephasing by diagonal Gell-Mann matrices",
            description: "L[ρ] = -½ Σ_l γ_l(t) [V_l, [V_l, ρ]], V_l the diagonal Gell-Mann matrices",
            parameters: vec![dim.clone(), rates_param("d-1 rates γ_l")],
            example_config: scenario("dephasing-gellmann", model(family, Some(3), vec![c(0.3), c(0.6)])),
        },
        FamilyTag::PerfectDecoherence => ModelEntry {
            family: family.name(),
            example: "example: perfect decoherence from a system-environment model",
            description: "H = Σ_k ε_k |k⟩⟨k| ⊗ 𝟙 + 𝟙 ⊗ H_B + Σ_k |k⟩⟨k| ⊗ B_k; map only, no generator",
            parameters: vec![
                p("model.environment.eps", "system energies ε_k (their count is d)"),
                p("model.environment.h_b", "environment Hamiltonian (square matrix)"),
                p("model.environment.couplings", "one Hermitian B_k per system level"),
                p("model.environment.rho_b", "initial environment state"),
            ],
            example_config: scenario(
                "perfect-decoherence",
                ModelConfig {
                    family,
                    dim: None,
                    rates: None,
                    bath: None,
                    environment: Some(EnvironmentConfig {
                        eps: vec![0.5, -0.5],
                        h_b: real(&[&[0.0, 0.0], &[0.0, 0.0]]),
                        couplings: vec![real(&[&[0.0, 0.5], &[0.5, 0.0]]), real(&[&[0.0, -0.5], &[-0.5, 0.0]])],
                        rho_b: real(&[&[0.5, 0.0], &[0.0, 0.5]]),
                    }),
                    propagation: Propagation::Auto,
                },
            ),
        },
        FamilyTag::Pauli => ModelEntry {
            family: family.name(),
            example: "example: Pauli channel (eternal non-Markovian for γ3 = -tanh t)",
            description: "L[ρ] = ½ Σ_i γ_i(t) (σ_i ρ σ_i - ρ)",
            parameters: vec![rates_param("[γ1, γ2, γ3]")],
            example_config: scenario(
                "pauli-eternal",
                model(family, None, vec![c(1.0), c(1.0), RateSpec::Tanh { amplitude: -1.0, scale: 1.0 }]),
            ),
        },
        FamilyTag::Weyl => ModelEntry {
            family: family.name(),
            example: "example: Weyl channel",
            description: "L[ρ] = Σ_{(k,l)≠(0,0)} γ_kl(t) (U_kl ρ U_kl† - ρ)",
            parameters: vec![dim.clone(), rates_param("d²-1 rates, (k,l) in lexicographic order without (0,0)")],
            example_config: scenario("weyl", model(family, Some(3), (1..=8).map(|i| c(0.05 * i as f64)).collect())),
        },
        FamilyTag::GeneralizedPauli => ModelEntry {
            family: family.name(),
            example: "example: generalized Pauli channel from mutually unbiased bases",
            description: "L[ρ] = Σ_α γ_α(t) (Σ_k P_k^α ρ P_k^α - ρ), prime d",
            parameters: vec![dim, rates_param("d+1 rates, computational basis first")],
            example_config: scenario("generalized-pauli", model(family, Some(3), vec![c(0.1), c(0.2), c(0.3), c(0.4)])),
        },
        FamilyTag::AmplitudeDamping => ModelEntry {
            family: family.name(),
            example: "example: amplitude damping by a Lorentzian bath",
            description: "ρ01 ↦ G(t) ρ01, ρ11 ↦ |G(t)|² ρ11, G from the Lorentzian memory-kernel equation",
            parameters: vec![
                p("model.bath.gamma_m", "coupling strength γ_M >= 0"),
                p("model.bath.lambda", "spectral width λ > 0"),
                p("model.bath.omega_c", "centre frequency (default 0)"),
                p("model.bath.detuning", "qubit detuning (default 0)"),
            ],
            example_config: scenario(
                "amplitude-damping",
                ModelConfig {
                    family,
                    dim: None,
                    rates: None,
                    bath: Some(BathConfig { gamma_m: 0.2, lambda: 1.0, omega_c: 0.0, detuning: 0.0 }),
                    environment: None,
                    propagation: Propagation::Auto,
                },
            ),
        },
    }
}

/// Human-readable listing.
pub fn render_text(entries: &[ModelEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!("{}  [{}]\n    {}\n", e.family, e.example, e.description));
        for p in &e.parameters {
            out.push_str(&format!("    {:<30} {}\n", p.key, p.description));
        }
        out.push('\n');
    }
    out
}
