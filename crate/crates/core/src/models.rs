//! Physical system definitions and the built-in textbook models.
//!
//! Units: ħ = 1, so Hamiltonians are angular-frequency matrices. The
//! system–reservoir interaction constant is not stored separately; it is
//! folded into the bath rate profile.

use crate::error::{Error, Result};
use crate::operator::{
    self, annihilation, creation, ensure_hermitian, identity, kron, real, sigma_minus, sigma_plus,
    sigma_x, sigma_z, Operator,
};

/// Base rate γ(ω) as a function of Bohr frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum RateProfile {
    Flat(f64),
    /// `(omega, rate)` pairs, looked up by exact frequency match.
    Table(Vec<(f64, f64)>),
}

impl RateProfile {
    /// Rate at `omega`, matching table entries within `tol`.
    pub fn rate_at(&self, omega: f64, tol: f64) -> Option<f64> {
        match self {
            RateProfile::Flat(rate) => Some(*rate),
            RateProfile::Table(entries) => entries
                .iter()
                .filter(|(w, _)| (w - omega).abs() <= tol)
                .min_by(|a, b| (a.0 - omega).abs().total_cmp(&(b.0 - omega).abs()))
                .map(|&(_, rate)| rate),
        }
    }

    fn rates(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match self {
            RateProfile::Flat(rate) => Box::new(std::iter::once(*rate)),
            RateProfile::Table(entries) => Box::new(entries.iter().map(|e| e.1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    /// kT/ħ in angular-frequency units; zero is allowed.
    pub temperature: f64,
    pub rate_profile: RateProfile,
    /// Rate of the zero-frequency (pure dephasing) channel.
    pub gamma0: f64,
}

impl BathSpec {
    pub fn new(temperature: f64, rate_profile: RateProfile, gamma0: f64) -> Result<Self> {
        let bath = BathSpec {
            temperature,
            rate_profile,
            gamma0,
        };
        bath.validate()?;
        Ok(bath)
    }

    pub fn flat(rate: f64, temperature: f64) -> Result<Self> {
        Self::new(temperature, RateProfile::Flat(rate), 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bath temperature must be finite and nonnegative, got {}",
                self.temperature
            )));
        }
        if !(self.gamma0 >= 0.0) || !self.gamma0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma0 must be finite and nonnegative, got {}",
                self.gamma0
            )));
        }
        if let Some(bad) = self
            .rate_profile
            .rates()
            .find(|r| !(*r >= 0.0) || !r.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "rate profile entries must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    /// Hermitian system operator Ŝ entering `Ŝ ⊗ R̂`.
    pub operator: Operator,
    pub bath: BathSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    hamiltonian: Operator,
    couplings: Vec<Coupling>,
}

impl SystemModel {
    pub fn new(hamiltonian: Operator, couplings: Vec<Coupling>) -> Result<Self> {
        operator::check_square(&hamiltonian, "system Hamiltonian")?;
        ensure_hermitian(&hamiltonian, "system Hamiltonian", 1e-10)?;
        if couplings.is_empty() {
            return Err(Error::InvalidArgument(
                "a system model needs at least one coupling".into(),
            ));
        }
        for (k, c) in couplings.iter().enumerate() {
            operator::check_same_dim(&hamiltonian, &c.operator, "coupling operator")?;
            ensure_hermitian(&c.operator, &format!("coupling operator {k}"), 1e-10)?;
            c.bath.validate()?;
        }
        Ok(SystemModel {
            hamiltonian,
            couplings,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }
}

fn require_nonnegative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite and nonnegative, got {value}"
        )))
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite and positive, got {value}"
        )))
    }
}

/// Two-level atom `H = (ω0/2)σz` coupled through `σx` to a flat bath.
pub fn two_level_atom(omega0: f64, gamma: f64, temperature: f64) -> Result<SystemModel> {
    require_positive("omega0", omega0)?;
    require_nonnegative("gamma", gamma)?;
    require_nonnegative("temperature", temperature)?;
    SystemModel::new(
        sigma_z() * real(omega0 / 2.0),
        vec![Coupling {
            operator: sigma_x(),
            bath: BathSpec::flat(gamma, temperature)?,
        }],
    )
}

/// Harmonic oscillator truncated to `levels` Fock states, coupled via `a + a†`.
pub fn truncated_oscillator(
    omega0: f64,
    levels: usize,
    gamma: f64,
    temperature: f64,
) -> Result<SystemModel> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncated oscillator needs at least 2 levels, got {levels}"
        )));
    }
    require_positive("omega0", omega0)?;
    require_nonnegative("gamma", gamma)?;
    require_nonnegative("temperature", temperature)?;
    let h = operator::number(levels) * real(omega0);
    SystemModel::new(
        h,
        vec![Coupling {
            operator: annihilation(levels) + creation(levels),
            bath: BathSpec::flat(gamma, temperature)?,
        }],
    )
}

/// Two exchange-coupled qubits, each with its own independent bath.
pub fn coupled_dimer(
    omega1: f64,
    omega2: f64,
    g: f64,
    gamma1: f64,
    gamma2: f64,
    temperature: f64,
) -> Result<SystemModel> {
    require_positive("omega1", omega1)?;
    require_positive("omega2", omega2)?;
    if !g.is_finite() {
        return Err(Error::InvalidArgument(format!("g must be finite, got {g}")));
    }
    require_nonnegative("gamma1", gamma1)?;
    require_nonnegative("gamma2", gamma2)?;
    require_nonnegative("temperature", temperature)?;
    let id = identity(2);
    let h = kron(&sigma_z(), &id) * real(omega1 / 2.0)
        + kron(&id, &sigma_z()) * real(omega2 / 2.0)
        + (kron(&sigma_plus(), &sigma_minus()) + kron(&sigma_minus(), &sigma_plus())) * real(g);
    SystemModel::new(
        h,
        vec![
            Coupling {
                operator: kron(&sigma_x(), &id),
                bath: BathSpec::flat(gamma1, temperature)?,
            },
            Coupling {
                operator: kron(&id, &sigma_x()),
                bath: BathSpec::flat(gamma2, temperature)?,
            },
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_eig, is_hermitian};

    #[test]
    fn two_level_atom_hamiltonian() {
        let m = two_level_atom(1.0, 0.1, 0.0).unwrap();
        let h = m.hamiltonian();
        assert_eq!(h[(0, 0)].re, 0.5);
        assert_eq!(h[(1, 1)].re, -0.5);
        assert_eq!(hermitian_eig(h).unwrap().values, vec![-0.5, 0.5]);
        assert_eq!(m.couplings()[0].bath.gamma0, 0.0);
        assert_eq!(m.couplings()[0].bath.rate_profile, RateProfile::Flat(0.1));
    }

    #[test]
    fn builtins_reject_bad_inputs() {
        assert!(two_level_atom(-1.0, 0.1, 0.0).is_err());
        assert!(two_level_atom(1.0, -0.1, 0.0).is_err());
        assert!(two_level_atom(1.0, 0.1, -1.0).is_err());
        assert!(truncated_oscillator(1.0, 1, 0.1, 0.0).is_err());
        assert!(coupled_dimer(0.0, 1.0, 0.1, 0.1, 0.1, 0.0).is_err());
    }

    #[test]
    fn truncated_oscillator_two_levels_is_a_qubit_up_to_offset() {
        let osc = truncated_oscillator(1.3, 2, 0.1, 0.0).unwrap();
        let atom = two_level_atom(1.3, 0.1, 0.0).unwrap();
        let gaps = |m: &SystemModel| {
            let v = hermitian_eig(m.hamiltonian()).unwrap().values;
            v[1] - v[0]
        };
        assert!((gaps(&osc) - gaps(&atom)).abs() < 1e-15);
        assert_eq!(osc.couplings()[0].operator, sigma_x());
    }

    #[test]
    fn builtin_models_are_hermitian_and_deterministic() {
        let models = [
            two_level_atom(1.0, 0.1, 0.3).unwrap(),
            truncated_oscillator(1.0, 6, 0.1, 0.3).unwrap(),
            coupled_dimer(1.0, 1.2, 0.05, 0.1, 0.2, 0.3).unwrap(),
        ];
        for m in &models {
            assert!(is_hermitian(m.hamiltonian(), 1e-12));
            for c in m.couplings() {
                assert!(is_hermitian(&c.operator, 1e-12));
            }
        }
        assert_eq!(
            coupled_dimer(1.0, 1.2, 0.05, 0.1, 0.2, 0.3).unwrap(),
            models[2]
        );
    }

    #[test]
    fn table_lookup_is_exact_within_tolerance() {
        let p = RateProfile::Table(vec![(1.0, 0.2), (2.0, 0.4)]);
        assert_eq!(p.rate_at(1.0 + 1e-12, 1e-9), Some(0.2));
        assert_eq!(p.rate_at(1.5, 1e-9), None);
    }

    #[test]
    fn model_rejects_non_hermitian_coupling() {
        let err = SystemModel::new(
            sigma_z(),
            vec![Coupling {
                operator: sigma_plus(),
                bath: BathSpec::flat(0.1, 0.0).unwrap(),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }
}
