//! Turns configuration values into library objects.

use multitime::models::{coupled_dimer, truncated_oscillator, two_level_atom};
use multitime::operator::{
    annihilation, basis_projector, creation, hermitian_eig, identity, kron_all, number, real,
    sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z,
};
use multitime::{
    c64, local_decomposition, BathSpec, Coupling, JumpMode, OpenSystem, Operator, Propagator,
    RateProfile, SystemModel,
};

use crate::config::{
    BathConfig, DecompositionConfig, GridConfig, MatrixSpec, ModelConfig, OperatorSpec,
    RateProfileConfig, StateSpec,
};
use crate::error::{CliError, CliResult};

pub fn matrix(spec: &MatrixSpec, dim: usize, what: &str) -> CliResult<Operator> {
    let rows = spec.len();
    if let Some((k, row)) = spec.iter().enumerate().find(|(_, r)| r.len() != rows) {
        return Err(CliError::config(format!(
            "{what}: row {k} has {} entries but the matrix has {rows} rows",
            row.len()
        )));
    }
    if rows != dim {
        return Err(CliError::config(format!(
            "{what}: dimension mismatch, matrix is {rows}×{rows} but the model dimension is {dim}"
        )));
    }
    Ok(Operator::from_fn(dim, dim, |i, j| {
        let [re, im] = spec[i][j];
        c64::new(re, im)
    }))
}

fn square_matrix(spec: &MatrixSpec, what: &str) -> CliResult<Operator> {
    matrix(spec, spec.len(), what)
}

fn pauli(base: &str) -> Option<Operator> {
    Some(match base {
        "sx" | "σx" | "sigma_x" => sigma_x(),
        "sy" | "σy" | "sigma_y" => sigma_y(),
        "sz" | "σz" | "sigma_z" => sigma_z(),
        "sp" | "σ+" | "σ⁺" | "sigma_plus" => sigma_plus(),
        "sm" | "σ-" | "σ⁻" | "sigma_minus" => sigma_minus(),
        _ => return None,
    })
}

fn qubit_count(dim: usize) -> Option<usize> {
    (dim >= 2 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

/// Named operators: Pauli family (`sx`, `sz2`, ...; sites count from 1 at the
/// leftmost tensor factor), ladder operators `a`, `adag`, `n`, and `I`.
pub fn named_operator(name: &str, dim: usize) -> CliResult<Operator> {
    match name {
        "I" | "id" => return Ok(identity(dim)),
        "a" => return Ok(annihilation(dim)),
        "adag" | "a†" | "a_dag" => return Ok(creation(dim)),
        "n" => return Ok(number(dim)),
        _ => {}
    }
    let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (base, site) = name.split_at(split);
    let single =
        pauli(base).ok_or_else(|| CliError::config(format!("unknown operator name '{name}'")))?;
    let qubits = qubit_count(dim).ok_or_else(|| {
        CliError::config(format!(
            "operator '{name}' needs a qubit register but the model dimension is {dim}"
        ))
    })?;
    let site = match (site, qubits) {
        ("", 1) => 1,
        ("", _) => {
            return Err(CliError::config(format!(
            "operator '{name}' is ambiguous on {qubits} qubits; add a site index such as '{base}1'"
        )))
        }
        (digits, _) => digits
            .parse::<usize>()
            .map_err(|_| CliError::config(format!("bad site index in operator '{name}'")))?,
    };
    if site == 0 || site > qubits {
        return Err(CliError::config(format!(
            "operator '{name}' addresses site {site} but there are {qubits} qubits"
        )));
    }
    let id = identity(2);
    let factors: Vec<&Operator> = (1..=qubits)
        .map(|k| if k == site { &single } else { &id })
        .collect();
    Ok(kron_all(factors))
}

pub fn operator(spec: &OperatorSpec, dim: usize, what: &str) -> CliResult<Operator> {
    match spec {
        OperatorSpec::Name(name) => named_operator(name, dim)
            .map_err(|e| CliError::config(format!("{what}: {}", strip(&e)))),
        OperatorSpec::Matrix(m) => matrix(m, dim, what),
    }
}

fn strip(e: &CliError) -> String {
    match e {
        CliError::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

pub fn bath(config: &BathConfig) -> CliResult<BathSpec> {
    let profile = match &config.rate_profile {
        RateProfileConfig::Flat { rate } => RateProfile::Flat(*rate),
        RateProfileConfig::Table { entries } => {
            RateProfile::Table(entries.iter().map(|[w, r]| (*w, *r)).collect())
        }
    };
    Ok(BathSpec::new(config.temperature, profile, config.gamma0)?)
}

pub fn model(config: &ModelConfig, bath_override: Option<&BathConfig>) -> CliResult<SystemModel> {
    let model = match config {
        ModelConfig::TwoLevelAtom {
            omega0,
            gamma,
            temperature,
        } => two_level_atom(*omega0, *gamma, *temperature)?,
        ModelConfig::TruncatedOscillator {
            omega0,
            levels,
            gamma,
            temperature,
        } => truncated_oscillator(*omega0, *levels, *gamma, *temperature)?,
        ModelConfig::CoupledDimer {
            omega1,
            omega2,
            g,
            gamma1,
            gamma2,
            temperature,
        } => coupled_dimer(*omega1, *omega2, *g, *gamma1, *gamma2, *temperature)?,
        ModelConfig::Explicit {
            hamiltonian,
            couplings,
        } => {
            let h = square_matrix(hamiltonian, "model.hamiltonian")?;
            let d = h.nrows();
            let couplings = couplings
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    Ok(Coupling {
                        operator: operator(
                            &c.operator,
                            d,
                            &format!("model.couplings[{k}].operator"),
                        )?,
                        bath: bath(&c.bath)?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            SystemModel::new(h, couplings)?
        }
    };
    match bath_override {
        None => Ok(model),
        Some(b) => {
            let spec = bath(b)?;
            let couplings = model
                .couplings()
                .iter()
                .map(|c| Coupling {
                    operator: c.operator.clone(),
                    bath: spec.clone(),
                })
                .collect();
            Ok(SystemModel::new(model.hamiltonian().clone(), couplings)?)
        }
    }
}

pub fn open_system(
    model: &SystemModel,
    decomposition: Option<&DecompositionConfig>,
) -> CliResult<OpenSystem> {
    match decomposition {
        None => Ok(OpenSystem::from_model_exact(model, None)?),
        Some(DecompositionConfig::Exact { freq_tol }) => {
            Ok(OpenSystem::from_model_exact(model, *freq_tol)?)
        }
        Some(DecompositionConfig::Local {
            freq_tol,
            couplings,
        }) => {
            if couplings.len() != model.couplings().len() {
                return Err(CliError::config(format!(
                    "decomposition.couplings: dimension mismatch, {} entries for {} model couplings",
                    couplings.len(),
                    model.couplings().len()
                )));
            }
            let d = model.dim();
            let decomps = couplings
                .iter()
                .zip(model.couplings())
                .enumerate()
                .map(|(k, (local, coupling))| {
                    let c0 = operator(&local.c0, d, &format!("decomposition.couplings[{k}].c0"))?;
                    let modes = local
                        .modes
                        .iter()
                        .enumerate()
                        .map(|(j, m)| {
                            Ok(JumpMode {
                                operator: operator(
                                    &m.operator,
                                    d,
                                    &format!("decomposition.couplings[{k}].modes[{j}].operator"),
                                )?,
                                omega: m.omega,
                            })
                        })
                        .collect::<CliResult<Vec<_>>>()?;
                    Ok(local_decomposition(c0, modes, *freq_tol)?.assign_rates(&coupling.bath)?)
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(OpenSystem::new(model.hamiltonian().clone(), decomps)?)
        }
    }
}

fn eigenstate(h: &Operator, highest: bool) -> CliResult<Operator> {
    let eig = hermitian_eig(h)?;
    let k = if highest { eig.values.len() - 1 } else { 0 };
    let v = eig.vectors.column(k);
    Ok(v * v.adjoint())
}

pub fn state(spec: &StateSpec, propagator: &Propagator, what: &str) -> CliResult<Operator> {
    let d = propagator.dim();
    match spec {
        StateSpec::Matrix(m) => matrix(m, d, what),
        StateSpec::Name(name) => match name.as_str() {
            "ground" => eigenstate(propagator.system().hamiltonian(), false),
            "excited" => eigenstate(propagator.system().hamiltonian(), true),
            "maximally_mixed" => Ok(identity(d) * real(1.0 / d as f64)),
            "steady" => Ok(propagator.steady_state()?),
            other => match other.strip_prefix("basis:").map(str::parse::<usize>) {
                Some(Ok(k)) if k < d => Ok(basis_projector(d, k)),
                Some(Ok(k)) => Err(CliError::config(format!(
                    "{what}: basis state {k} out of range for dimension {d}"
                ))),
                _ => Err(CliError::config(format!("{what}: unknown state '{other}'"))),
            },
        },
    }
}

pub fn grid(config: &GridConfig, what: &str) -> CliResult<Vec<f64>> {
    let GridConfig {
        start,
        stop,
        points,
    } = *config;
    if points == 0 || !start.is_finite() || !stop.is_finite() || start < 0.0 {
        return Err(CliError::config(format!(
            "{what}: a grid needs at least one point and finite nonnegative bounds"
        )));
    }
    if points > 1 && stop <= start {
        return Err(CliError::config(format!("{what}: stop must exceed start")));
    }
    Ok(match points {
        1 => vec![start],
        n => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_operators_on_two_qubits() {
        let sz1 = named_operator("sz1", 4).unwrap();
        assert_eq!(sz1, multitime::operator::kron(&sigma_z(), &identity(2)));
        let sm2 = named_operator("σ-2", 4).unwrap();
        assert_eq!(sm2, multitime::operator::kron(&identity(2), &sigma_minus()));
        assert!(named_operator("sx", 4).is_err());
        assert!(named_operator("sx3", 4).is_err());
        assert!(named_operator("sx", 3).is_err());
        assert!(named_operator("bogus", 2).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = grid(
            &GridConfig {
                start: 0.0,
                stop: 40.0,
                points: 81,
            },
            "g",
        )
        .unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 0.5);
        assert_eq!(g[80], 40.0);
    }
}
