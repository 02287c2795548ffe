//! Shared construction of Hamiltonians, thermostats and profiles from the
//! configuration.

use crate::config::{Config, ConfigError};
use tori_core::hamiltonian::{HamiltonianSpec, Potential, ReebGraph};
use tori_core::orbit::{build_profile, ActionProfile, GridSpec};
use tori_core::thermostats::ThermostatSpec;

pub fn hamiltonian_from(cfg: &mut Config) -> Result<HamiltonianSpec, ConfigError> {
    let family = cfg.str_or("hamiltonian", "family", "harmonic");
    let ham = match family.as_str() {
        "harmonic" => HamiltonianSpec::harmonic(cfg.f64_or("hamiltonian", "omega", 1.0)?),
        "pendulum" => HamiltonianSpec::pendulum(),
        "double_well" => HamiltonianSpec::double_well(cfg.f64_or("hamiltonian", "a", 1.0)?),
        "monomial" => HamiltonianSpec::monomial(
            cfg.f64_or("hamiltonian", "omega", 1.0)?,
            cfg.u32_or("hamiltonian", "n", 2)?,
        ),
        "polynomial" => {
            let coeffs = cfg.f64_list_or("hamiltonian", "coeffs", &[])?;
            if coeffs.is_empty() {
                return Err(ConfigError(
                    "[hamiltonian] family polynomial needs `coeffs = c0,c1,...`".to_string(),
                ));
            }
            HamiltonianSpec::new(Potential::Polynomial { coeffs })
        }
        other => {
            return Err(ConfigError(format!(
                "[hamiltonian] unknown family `{other}` (harmonic|pendulum|double_well|monomial|polynomial)"
            )))
        }
    };
    Ok(ham)
}

pub fn thermostat_from(cfg: &mut Config) -> Result<ThermostatSpec, ConfigError> {
    let variant = cfg.str_or("thermostat", "variant", "nh");
    let epsilon = cfg.f64_or("thermostat", "epsilon", 0.05)?;
    let temperature = cfg.f64_or("thermostat", "temperature", 1.0)?;
    let spec = match variant.as_str() {
        "nh" => ThermostatSpec::nose_hoover(epsilon, temperature),
        "logistic" => ThermostatSpec::logistic(epsilon, temperature),
        "wk" => ThermostatSpec::watanabe_kobayashi(
            cfg.u32_or("thermostat", "k", 3)?,
            cfg.u32_or("thermostat", "l", 1)?,
            epsilon,
            temperature,
        ),
        "hsh" => ThermostatSpec::hoover_sprott_hoover(
            cfg.f64_or("thermostat", "mu", 1.0)?,
            epsilon,
            temperature,
        ),
        other => {
            return Err(ConfigError(format!(
                "[thermostat] unknown variant `{other}` (nh|logistic|wk|hsh)"
            )))
        }
    };
    spec.map_err(|e| ConfigError(format!("[thermostat] {e}")))
}

pub struct GridOptions {
    pub spec: GridSpec,
}

pub fn grid_from(cfg: &mut Config) -> Result<GridOptions, ConfigError> {
    let mut spec = GridSpec::default();
    spec.n_interior = cfg.usize_or("experiment", "n_interior", spec.n_interior)?;
    spec.n_geo = cfg.usize_or("experiment", "n_geo", spec.n_geo)?;
    spec.geo_frac = cfg.f64_or("experiment", "geo_frac", spec.geo_frac)?;
    spec.h_cap = cfg.f64_opt("experiment", "h_cap")?;
    spec.ks = cfg.u32_list_or("experiment", "ks", &spec.ks.clone())?;
    Ok(GridOptions { spec })
}

/// Profiles for every edge of the graph; unbounded edges use the cap
/// `h_cap` above the highest critical value (default offset 8).
pub fn all_profiles(
    ham: &HamiltonianSpec,
    graph: &ReebGraph,
    opts: &GridOptions,
) -> tori_core::Result<Vec<ActionProfile>> {
    let top_crit = graph.vertices.iter().map(|v| v.h).fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for edge in &graph.edges {
        let mut spec = opts.spec.clone();
        if !edge.h_hi.is_finite() {
            let cap = spec.h_cap.unwrap_or(top_crit + 8.0);
            spec.h_cap = Some(cap);
        }
        out.push(build_profile(ham, graph, edge.id, &spec)?);
    }
    Ok(out)
}
