//! Jump-operator decomposition of a coupling operator and rate assignment.
//!
//! A coupling operator Ŝ evolves under the system Hamiltonian as
//! `Ĉ0 + Σj (Ĉj e^{-iωj t} + h.c.)` with `Ĉ0` Hermitian, every `ωj > 0` and the
//! `ωj` pairwise distinct. The global approach obtains the `Ĉj` exactly from
//! the spectrum of `Ĥ_S`; the local approach takes them from the caller.

use crate::error::{Error, Result};
use crate::models::BathSpec;
use crate::operator::{self, c64, dagger, ensure_hermitian, hermitian_eig, real, Operator, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Built from the spectrum of the system Hamiltonian.
    Exact,
    /// Supplied by the caller (local, partially secular, perturbative, ...).
    Approximate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpMode {
    pub operator: Operator,
    /// Bohr frequency, strictly positive.
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRates {
    /// Rate attached to `Ĉj` (emission into the bath).
    pub down: f64,
    /// Rate attached to `Ĉj†` (absorption from the bath).
    pub up: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub gamma0: f64,
    pub modes: Vec<ModeRates>,
}

/// One dissipative channel: jump operator `J` with rate `r`.
///
/// It contributes `L_{√r J}` to the adjoint Lindbladian and the commutator
/// pair `([J†, ·], [·, J])` at rate `r` to the cross dissipators.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub rate: f64,
    pub jump: Operator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpDecomposition {
    c0: Operator,
    modes: Vec<JumpMode>,
    rates: Option<Rates>,
    provenance: Provenance,
    freq_tol: f64,
}

/// Default frequency tolerance: `1e-9` times the spectral spread of `h`.
pub fn default_freq_tol(h: &Operator) -> Result<f64> {
    let values = hermitian_eig(h)?.values;
    let spread = match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    };
    Ok(if spread > 0.0 { 1e-9 * spread } else { 1e-9 })
}

/// Bose–Einstein occupation `1/(e^{ω/T} - 1)`, zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

fn check_freq_tol(freq_tol: f64) -> Result<()> {
    if freq_tol > 0.0 && freq_tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "frequency tolerance must be positive, got {freq_tol}"
        )))
    }
}

/// Global-approach decomposition from the spectral resolution of `h`.
pub fn exact_bohr_decomposition(
    h: &Operator,
    s: &Operator,
    freq_tol: f64,
) -> Result<JumpDecomposition> {
    check_freq_tol(freq_tol)?;
    operator::check_square(h, "exact_bohr_decomposition")?;
    operator::check_same_dim(h, s, "exact_bohr_decomposition")?;
    ensure_hermitian(s, "coupling operator", 1e-10)?;
    let eig = hermitian_eig(h)?;
    let n = eig.values.len();
    let u = &eig.vectors;
    let s_eig = u.adjoint() * s * u;
    let negligible = 1e-13 * s.norm().max(f64::MIN_POSITIVE);

    let mut c0_eig = Operator::zeros(n, n);
    let mut transitions = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let gap = eig.values[b] - eig.values[a];
            if gap.abs() <= freq_tol {
                c0_eig[(a, b)] = s_eig[(a, b)];
            } else if gap > 0.0 && s_eig[(a, b)].norm() > negligible {
                transitions.push((gap, a, b));
            }
        }
    }
    transitions.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    // clusters of (member gaps, operator in eigenbasis)
    let mut clusters: Vec<(Vec<f64>, Operator)> = Vec::new();
    for (gap, a, b) in transitions {
        let joins = clusters.last().is_some_and(|(gaps, _)| {
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            (gap - mean).abs() <= freq_tol
        });
        if !joins {
            clusters.push((Vec::new(), Operator::zeros(n, n)));
        }
        let (gaps, op) = clusters.last_mut().expect("cluster exists");
        gaps.push(gap);
        op[(a, b)] = s_eig[(a, b)];
    }

    let to_lab = |m: &Operator| u * m * u.adjoint();
    let c0 = to_lab(&c0_eig);
    let c0 = (&c0 + c0.adjoint()) * real(0.5);
    let modes = clusters
        .into_iter()
        .map(|(gaps, op)| JumpMode {
            omega: gaps.iter().sum::<f64>() / gaps.len() as f64,
            operator: to_lab(&op),
        })
        .collect();
    Ok(JumpDecomposition {
        c0,
        modes,
        rates: None,
        provenance: Provenance::Exact,
        freq_tol,
    })
}

/// Local-approach decomposition supplied by the caller.
pub fn local_decomposition(
    c0: Operator,
    modes: Vec<JumpMode>,
    freq_tol: f64,
) -> Result<JumpDecomposition> {
    check_freq_tol(freq_tol)?;
    operator::check_square(&c0, "local_decomposition")?;
    ensure_hermitian(&c0, "c0 (Ĉ0† = Ĉ0 violated)", 1e-10)?;
    for (j, m) in modes.iter().enumerate() {
        operator::check_same_dim(&c0, &m.operator, "local_decomposition mode operator")?;
        if !(m.omega > 0.0) || !m.omega.is_finite() {
            return Err(Error::Constraint(format!(
                "ωj > 0 violated: mode {j} has frequency {}",
                m.omega
            )));
        }
    }
    let mut modes = modes;
    modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    for pair in modes.windows(2) {
        if (pair[1].omega - pair[0].omega).abs() <= freq_tol {
            return Err(Error::Constraint(format!(
                "ωj ≠ ωk at j ≠ k violated: frequencies {} and {} coincide within {freq_tol}",
                pair[0].omega, pair[1].omega
            )));
        }
    }
    Ok(JumpDecomposition {
        c0,
        modes,
        rates: None,
        provenance: Provenance::Approximate,
        freq_tol,
    })
}

impl JumpDecomposition {
    pub fn c0(&self) -> &Operator {
        &self.c0
    }

    pub fn modes(&self) -> &[JumpMode] {
        &self.modes
    }

    pub fn rates(&self) -> Option<&Rates> {
        self.rates.as_ref()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn freq_tol(&self) -> f64 {
        self.freq_tol
    }

    pub fn dim(&self) -> usize {
        self.c0.nrows()
    }

    /// Thermal (detailed-balance) rates from `bath`: `γ↓ = γ(ω)(n̄+1)`,
    /// `γ↑ = γ(ω) n̄`, and `γ0` taken from the bath directly.
    pub fn assign_rates(&self, bath: &BathSpec) -> Result<JumpDecomposition> {
        bath.validate()?;
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let base = bath
                    .rate_profile
                    .rate_at(m.omega, self.freq_tol)
                    .ok_or(Error::MissingRate { omega: m.omega })?;
                let occupation = bose_occupation(m.omega, bath.temperature);
                Ok(ModeRates {
                    down: base * (occupation + 1.0),
                    up: base * occupation,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(JumpDecomposition {
            rates: Some(Rates {
                gamma0: bath.gamma0,
                modes,
            }),
            ..self.clone()
        })
    }

    /// Dissipative channels with nonzero rate, in a fixed order: `Ĉ0`, then
    /// for each mode `Ĉj` (down) followed by `Ĉj†` (up).
    pub fn channels(&self) -> Result<Vec<Channel>> {
        let rates = self.rates.as_ref().ok_or(Error::RatesUnassigned)?;
        let mut channels = Vec::new();
        if rates.gamma0 > 0.0 && self.c0.iter().any(|z| *z != ZERO) {
            channels.push(Channel {
                rate: rates.gamma0,
                jump: self.c0.clone(),
            });
        }
        for (mode, r) in self.modes.iter().zip(&rates.modes) {
            if r.down > 0.0 {
                channels.push(Channel {
                    rate: r.down,
                    jump: mode.operator.clone(),
                });
            }
            if r.up > 0.0 {
                channels.push(Channel {
                    rate: r.up,
                    jump: dagger(&mode.operator),
                });
            }
        }
        Ok(channels)
    }

    /// `Ĉ0 + Σj (Ĉj e^{-iωj t} + h.c.)`.
    pub fn resum(&self, t: f64) -> Operator {
        let mut total = self.c0.clone();
        for m in &self.modes {
            let term = &m.operator * c64::from_polar(1.0, -m.omega * t);
            total += &term + term.adjoint();
        }
        total
    }

    /// `‖Ĉ0 + Σj(Ĉj + Ĉj†) − Ŝ‖_F`.
    pub fn completeness_residual(&self, s: &Operator) -> f64 {
        (self.resum(0.0) - s).norm()
    }

    /// Largest `‖[H, Ĉj] + ωj Ĉj‖_F / ‖Ĉj‖_F` over the modes.
    pub fn eigenoperator_residual(&self, h: &Operator) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let c = &m.operator;
                let residual = (h * c - c * h + c * real(m.omega)).norm();
                residual / c.norm().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}
