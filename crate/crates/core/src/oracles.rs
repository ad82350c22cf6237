//! Brute-force references used to validate the master-equation pipeline.
//!
//! Nothing here goes through the superoperator machinery of
//! [`crate::generators`]: correlators are computed from exact unitary
//! dynamics, or from termwise matrix arithmetic on plain arrays.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use crate::decomposition::{Channel, JumpDecomposition};
use crate::error::{Error, Result};
use crate::models::SystemModel;
use crate::operator::{
    self, annihilation, c64, dagger, hermitian_eig, identity, kron, Operator, Vector, I, ONE, ZERO,
};
use crate::propagation::{validate_density, CorrelatorSpec, CorrelatorTrace};

/// Default cap on the total system-plus-bath Hilbert dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Closed-system correlator `trace(Π_k e^{iHt_k} A_k e^{-iHt_k} · ρ)` by
/// exact diagonalization.
pub fn closed_correlator(h: &Operator, spec: &CorrelatorSpec) -> Result<c64> {
    spec.validate()?;
    operator::check_same_dim(h, &spec.initial_state, "closed_correlator")?;
    let eig = hermitian_eig(h)?;
    let mut product = identity(h.nrows());
    for ins in &spec.insertions {
        let forward = eig.map_spectrum(|e| c64::from_polar(1.0, e * ins.time));
        product *= &forward * &ins.operator * forward.adjoint();
    }
    Ok(operator::trace(&(product * &spec.initial_state)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Two-level (hard-core) bath mode.
    Qubit,
    /// Harmonic mode truncated to `levels` Fock states.
    Oscillator { levels: usize },
}

impl ModeKind {
    pub fn levels(&self) -> usize {
        match self {
            ModeKind::Qubit => 2,
            ModeKind::Oscillator { levels } => *levels,
        }
    }
}

/// Discrete reservoir `Σ ω_k b_k†b_k` coupled through `Ŝ ⊗ Σ g_k (b_k + b_k†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteBath {
    pub frequencies: Vec<f64>,
    pub couplings: Vec<f64>,
    pub kind: ModeKind,
    pub temperature: f64,
    /// Which coupling of the system model the reservoir attaches to.
    pub coupling_index: usize,
    pub dimension_cap: usize,
}

impl FiniteBath {
    pub fn new(
        frequencies: Vec<f64>,
        couplings: Vec<f64>,
        kind: ModeKind,
        temperature: f64,
    ) -> Result<Self> {
        let bath = FiniteBath {
            frequencies,
            couplings,
            kind,
            temperature,
            coupling_index: 0,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// `modes` equally spaced modes filling `[ω0 − 5γ, ω0 + 5γ]` (one per bin
    /// centre) with flat coupling `g = √(γΔω/2π)`, so the golden-rule decay
    /// rate of a transition at `ω0` is `γ`.
    pub fn golden_rule_band(
        omega0: f64,
        gamma: f64,
        modes: usize,
        kind: ModeKind,
        temperature: f64,
    ) -> Result<Self> {
        if !(gamma > 0.0) || !(omega0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "band needs positive omega0 and gamma, got {omega0} and {gamma}"
            )));
        }
        if modes == 0 {
            return Err(Error::InvalidArgument(
                "band needs at least one mode".into(),
            ));
        }
        let spacing = 10.0 * gamma / modes as f64;
        let low = omega0 - 5.0 * gamma;
        let frequencies = (0..modes)
            .map(|k| low + (k as f64 + 0.5) * spacing)
            .collect();
        let g = (gamma * spacing / (2.0 * PI)).sqrt();
        Self::new(frequencies, vec![g; modes], kind, temperature)
    }

    /// Same modes with every coupling set to zero.
    pub fn decoupled(&self) -> FiniteBath {
        FiniteBath {
            couplings: vec![0.0; self.couplings.len()],
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequencies.is_empty() {
            return Err(Error::InvalidArgument(
                "finite bath needs at least one mode".into(),
            ));
        }
        if self.frequencies.len() != self.couplings.len() {
            return Err(Error::DimensionMismatch {
                context: "finite bath couplings",
                left: self.couplings.len(),
                right: self.frequencies.len(),
            });
        }
        if self.kind.levels() < 2 {
            return Err(Error::InvalidArgument(
                "bath modes need at least two levels".into(),
            ));
        }
        if self
            .frequencies
            .iter()
            .chain(&self.couplings)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidArgument(
                "bath parameters must be finite".into(),
            ));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bath temperature must be finite and nonnegative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn bath_dimension(&self) -> Option<usize> {
        let levels = self.kind.levels();
        (0..self.frequencies.len()).try_fold(1usize, |acc, _| acc.checked_mul(levels))
    }

    /// Diagonal thermal occupation probabilities of one mode.
    fn mode_populations(&self, omega: f64) -> Vec<f64> {
        let levels = self.kind.levels();
        if self.temperature == 0.0 {
            let mut p = vec![0.0; levels];
            p[0] = 1.0;
            return p;
        }
        let weights: Vec<f64> = (0..levels)
            .map(|n| (-(n as f64) * omega / self.temperature).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / z).collect()
    }
}

/// System plus finite reservoir, diagonalized once.
#[derive(Debug)]
pub struct FiniteBathSystem {
    system_dim: usize,
    bath_dim: usize,
    energies: Vec<f64>,
    vectors: Operator,
    bath_populations: Vec<f64>,
    lifted: Mutex<Vec<(Operator, Arc<Operator>)>>,
}

impl FiniteBathSystem {
    pub fn new(model: &SystemModel, bath: &FiniteBath) -> Result<Self> {
        bath.validate()?;
        let coupling = model.couplings().get(bath.coupling_index).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "coupling index {} out of range for {} couplings",
                bath.coupling_index,
                model.couplings().len()
            ))
        })?;
        let d = model.dim();
        let bath_dim = bath.bath_dimension().unwrap_or(usize::MAX);
        let total = d.saturating_mul(bath_dim);
        if total > bath.dimension_cap {
            return Err(Error::InvalidArgument(format!(
                "finite-bath Hilbert dimension {total} exceeds the cap {}",
                bath.dimension_cap
            )));
        }

        let levels = bath.kind.levels();
        let n_modes = bath.frequencies.len();
        let b = annihilation(levels);
        let n_op = operator::number(levels);
        let x_op = &b + dagger(&b);
        // embeds a single-mode operator at mode k of the reservoir
        let embed = |op: &Operator, k: usize| -> Operator {
            let before = identity(levels.pow(k as u32));
            let after = identity(levels.pow((n_modes - k - 1) as u32));
            kron(&kron(&before, op), &after)
        };
        let mut h_bath = Operator::zeros(bath_dim, bath_dim);
        let mut r_bath = Operator::zeros(bath_dim, bath_dim);
        for k in 0..n_modes {
            h_bath += embed(&n_op, k) * c64::new(bath.frequencies[k], 0.0);
            if bath.couplings[k] != 0.0 {
                r_bath += embed(&x_op, k) * c64::new(bath.couplings[k], 0.0);
            }
        }
        let h_full = kron(model.hamiltonian(), &identity(bath_dim))
            + kron(&identity(d), &h_bath)
            + kron(&coupling.operator, &r_bath);
        let eig = hermitian_eig(&h_full)?;

        // product thermal state of the reservoir, diagonal in the Fock basis
        let mode_pops: Vec<Vec<f64>> = bath
            .frequencies
            .iter()
            .map(|&w| bath.mode_populations(w))
            .collect();
        let bath_populations = (0..bath_dim)
            .map(|idx| {
                let mut rest = idx;
                let mut p = 1.0;
                for k in (0..n_modes).rev() {
                    p *= mode_pops[k][rest % levels];
                    rest /= levels;
                }
                p
            })
            .collect();

        Ok(FiniteBathSystem {
            system_dim: d,
            bath_dim,
            energies: eig.values,
            vectors: eig.vectors,
            bath_populations,
            lifted: Mutex::new(Vec::new()),
        })
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim * self.bath_dim
    }

    /// `U† (A ⊗ I) U` in the energy eigenbasis, cached per operator.
    fn lift_to_eigenbasis(&self, a: &Operator) -> Arc<Operator> {
        let cache = self.lifted.lock().expect("lift cache poisoned");
        if let Some((_, lifted)) = cache.iter().find(|(op, _)| op == a) {
            return lifted.clone();
        }
        drop(cache);
        let full = kron(a, &identity(self.bath_dim));
        let lifted = Arc::new(self.vectors.adjoint() * full * &self.vectors);
        self.lifted
            .lock()
            .expect("lift cache poisoned")
            .push((a.clone(), lifted.clone()));
        lifted
    }

    /// Exact `⟨Â1(t1) ... Ân(tn)⟩` with system operators acting as `Â ⊗ 1`
    /// and the initial state `ρ_S ⊗ ρ_R^th`.
    pub fn correlator(&self, spec: &CorrelatorSpec) -> Result<c64> {
        Ok(self.correlator_trace(spec, &[], &[0.0])?.values[0])
    }

    /// [`Self::correlator`] with the insertions listed in `shifted` moved
    /// later by each `τ` of the grid.
    pub fn correlator_trace(
        &self,
        spec: &CorrelatorSpec,
        shifted: &[usize],
        taus: &[f64],
    ) -> Result<CorrelatorTrace> {
        spec.validate()?;
        if spec.dim() != self.system_dim {
            return Err(Error::DimensionMismatch {
                context: "finite-bath correlator",
                left: spec.dim(),
                right: self.system_dim,
            });
        }
        if taus.windows(2).any(|w| w[1] <= w[0]) || taus.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidArgument(
                "evaluation offsets must be nonnegative and strictly ascending".into(),
            ));
        }
        let lifted: Vec<Arc<Operator>> = spec
            .insertions
            .iter()
            .map(|ins| self.lift_to_eigenbasis(&ins.operator))
            .collect();
        let components = self.initial_components(&spec.initial_state)?;

        let mut values = Vec::with_capacity(taus.len());
        let mut phi = Vector::zeros(self.total_dim());
        for &tau in taus {
            let times = spec.shifted(shifted, tau)?;
            let mut total = ZERO;
            for (p, psi) in &components {
                phi.copy_from(psi);
                for k in (0..spec.insertions.len()).rev() {
                    self.apply_heisenberg(&lifted[k], times.insertions[k].time, &mut phi);
                }
                total += psi.dotc(&phi) * *p;
            }
            values.push(total);
        }
        Ok(CorrelatorTrace {
            taus: taus.to_vec(),
            values,
        })
    }

    /// `φ ← e^{iEt} Ã e^{-iEt} φ` in the eigenbasis.
    fn apply_heisenberg(&self, a_eig: &Operator, t: f64, phi: &mut Vector) {
        for (x, e) in phi.iter_mut().zip(&self.energies) {
            *x *= c64::from_polar(1.0, -e * t);
        }
        let mut next = a_eig * &*phi;
        for (x, e) in next.iter_mut().zip(&self.energies) {
            *x *= c64::from_polar(1.0, e * t);
        }
        *phi = next;
    }

    /// Pure-state decomposition of `ρ_S ⊗ ρ_R^th`, in the eigenbasis.
    fn initial_components(&self, rho_s: &Operator) -> Result<Vec<(f64, Vector)>> {
        let sys = hermitian_eig(rho_s)?;
        let mut out = Vec::new();
        for (ks, &ps) in sys.values.iter().enumerate() {
            if ps <= 1e-15 {
                continue;
            }
            let psi_s = sys.vectors.column(ks);
            for (kb, &pb) in self.bath_populations.iter().enumerate() {
                if ps * pb <= 1e-15 {
                    continue;
                }
                let mut full = Vector::zeros(self.total_dim());
                for i in 0..self.system_dim {
                    full[i * self.bath_dim + kb] = psi_s[i];
                }
                out.push((ps * pb, self.vectors.adjoint() * full));
            }
        }
        Ok(out)
    }
}

/// Row-major multi-slot array: slot `s` contributes `(row·d + col)·(d²)^(n−1−s)`.
struct SlotArray {
    d: usize,
    n: usize,
}

impl SlotArray {
    fn stride(&self, slot: usize) -> usize {
        (self.d * self.d).pow((self.n - 1 - slot) as u32)
    }

    /// `out += scale · M·T` on slot `slot` (left multiplication of that slot's matrix).
    fn left(&self, m: &Operator, slot: usize, t: &[c64], out: &mut [c64], scale: c64) {
        let d = self.d;
        let s = self.stride(slot);
        for (idx, o) in out.iter_mut().enumerate().take(t.len()) {
            let digit = (idx / s) % (d * d);
            let (r, c) = (digit / d, digit % d);
            let base = idx - digit * s;
            let mut acc = ZERO;
            for k in 0..d {
                acc += m[(r, k)] * t[base + (k * d + c) * s];
            }
            *o += acc * scale;
        }
    }

    /// `out += scale · T·M` on slot `slot`.
    fn right(&self, m: &Operator, slot: usize, t: &[c64], out: &mut [c64], scale: c64) {
        let d = self.d;
        let s = self.stride(slot);
        for (idx, o) in out.iter_mut().enumerate().take(t.len()) {
            let digit = (idx / s) % (d * d);
            let (r, c) = (digit / d, digit % d);
            let base = idx - digit * s;
            let mut acc = ZERO;
            for k in 0..d {
                acc += t[base + (r * d + k) * s] * m[(k, c)];
            }
            *o += acc * scale;
        }
    }
}

/// First-order Euler integration of the multi-slot adjoint equation, written
/// with termwise commutator arithmetic. Returns the correlator at `tau_end`.
pub fn naive_equation_integrator(
    h: &Operator,
    decomps: &[JumpDecomposition],
    b: &[Operator],
    a: &[Operator],
    rho_t: &Operator,
    tau_end: f64,
    step: f64,
) -> Result<c64> {
    if !(step > 0.0) || !step.is_finite() || !(tau_end >= 0.0) || !tau_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need step > 0 and tau_end ≥ 0, got {step} and {tau_end}"
        )));
    }
    if b.is_empty() || a.len() != b.len() + 1 {
        return Err(Error::DimensionMismatch {
            context: "naive integrator insertion list length",
            left: a.len(),
            right: b.len() + 1,
        });
    }
    let d = h.nrows();
    for op in a.iter().chain(b).chain([rho_t]) {
        operator::check_same_dim(h, op, "naive integrator operand")?;
    }
    let channels: Vec<Channel> = decomps
        .iter()
        .map(|dc| dc.channels())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let n = b.len();
    let arr = SlotArray { d, n };
    let len = (d * d).pow(n as u32);

    // elementary tensor B1 ⊗ ... ⊗ Bn in row-major slot layout
    let mut t = vec![ONE; len];
    for (idx, x) in t.iter_mut().enumerate() {
        for (slot, op) in b.iter().enumerate() {
            let digit = (idx / arr.stride(slot)) % (d * d);
            *x *= op[(digit / d, digit % d)];
        }
    }

    let half = c64::new(0.5, 0.0);
    let jumps: Vec<(c64, Operator, Operator, Operator)> = channels
        .iter()
        .map(|ch| {
            let jd = dagger(&ch.jump);
            let jdj = &jd * &ch.jump;
            (c64::new(ch.rate, 0.0), ch.jump.clone(), jd, jdj)
        })
        .collect();

    let steps = (tau_end / step).round() as usize;
    let h_step = if steps == 0 {
        0.0
    } else {
        tau_end / steps as f64
    };
    let mut deriv = vec![ZERO; len];
    let mut tmp = vec![ZERO; len];
    for _ in 0..steps {
        deriv.iter_mut().for_each(|x| *x = ZERO);
        for m in 0..n {
            // i[H, X]
            arr.left(h, m, &t, &mut deriv, I);
            arr.right(h, m, &t, &mut deriv, -I);
            for (r, j, jd, jdj) in &jumps {
                // r (J† X J − ½ J†J X − ½ X J†J)
                tmp.iter_mut().for_each(|x| *x = ZERO);
                arr.left(jd, m, &t, &mut tmp, ONE);
                arr.right(j, m, &tmp, &mut deriv, *r);
                arr.left(jdj, m, &t, &mut deriv, -half * r);
                arr.right(jdj, m, &t, &mut deriv, -half * r);
            }
        }
        for m1 in 0..n {
            for m2 in m1 + 1..n {
                for (r, j, jd, _) in &jumps {
                    // r [J†, X_m1] [X_m2, J]
                    tmp.iter_mut().for_each(|x| *x = ZERO);
                    arr.right(j, m2, &t, &mut tmp, ONE);
                    arr.left(j, m2, &t, &mut tmp, -ONE);
                    arr.left(jd, m1, &tmp, &mut deriv, *r);
                    arr.right(jd, m1, &tmp, &mut deriv, -*r);
                }
            }
        }
        let hs = c64::new(h_step, 0.0);
        for (x, dx) in t.iter_mut().zip(&deriv) {
            *x += hs * dx;
        }
    }

    // trace(A1 X1 A2 ... Xn A_{n+1} ρ) for each matrix unit, weighted by T
    let p = &a[n] * rho_t * &a[0];
    let mut total = ZERO;
    for (idx, x) in t.iter().enumerate() {
        let unit = |slot: usize| {
            let digit = (idx / arr.stride(slot)) % (d * d);
            (digit / d, digit % d)
        };
        let (r1, _) = unit(0);
        let (_, cn) = unit(n - 1);
        let mut w = p[(cn, r1)];
        for s in 0..n - 1 {
            w *= a[s + 1][(unit(s).1, unit(s + 1).0)];
        }
        total += x * w;
    }
    Ok(total)
}

/// Matrix of the two-slot generator assembled column by column from matrix
/// units, applying each term of the two-slot equation with plain products.
/// Columns and rows follow the `vec(X) ⊗ vec(Y)` layout.
pub fn brute_force_two_slot_generator(
    h: &Operator,
    decomps: &[JumpDecomposition],
) -> Result<Operator> {
    let d = h.nrows();
    let channels: Vec<Channel> = decomps
        .iter()
        .map(|dc| dc.channels())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let lindblad = |x: &Operator| -> Operator {
        let mut out = (h * x - x * h) * I;
        for ch in &channels {
            let jd = dagger(&ch.jump);
            let jdj = &jd * &ch.jump;
            out += (&jd * x * &ch.jump - (&jdj * x + x * &jdj) * c64::new(0.5, 0.0))
                * c64::new(ch.rate, 0.0);
        }
        out
    };
    let unit = |k: usize| {
        let mut e = Operator::zeros(d, d);
        e[(k % d, k / d)] = ONE;
        e
    };
    let pair = |x: &Operator, y: &Operator| operator::vec(x).kronecker(&operator::vec(y));
    let d2 = d * d;
    let mut g = Operator::zeros(d2 * d2, d2 * d2);
    for k1 in 0..d2 {
        let x = unit(k1);
        for k2 in 0..d2 {
            let y = unit(k2);
            let mut col = pair(&lindblad(&x), &y) + pair(&x, &lindblad(&y));
            for ch in &channels {
                let jd = dagger(&ch.jump);
                let left = &jd * &x - &x * &jd;
                let right = &y * &ch.jump - &ch.jump * &y;
                col += pair(&left, &right) * c64::new(ch.rate, 0.0);
            }
            g.set_column(k1 * d2 + k2, &col);
        }
    }
    Ok(g)
}

/// Validates a density matrix, exposed for oracle callers.
pub fn check_state(rho: &Operator) -> Result<()> {
    validate_density(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::multi_slot_generator;
    use crate::models::two_level_atom;
    use crate::operator::{basis_projector, real, sigma_x, sigma_z};
    use crate::propagation::{Insertion, OpenSystem};

    #[test]
    fn equal_times_give_a_plain_trace() {
        let h = sigma_z() * real(0.5);
        let rho = basis_projector(2, 0);
        let spec = CorrelatorSpec::new(
            vec![
                Insertion::new(sigma_x(), 1.3),
                Insertion::new(sigma_z(), 1.3),
            ],
            rho.clone(),
        )
        .unwrap();
        let got = closed_correlator(&h, &spec).unwrap();
        let expected = operator::trace(&(sigma_x() * sigma_z() * rho));
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn closed_qubit_otoc() {
        let h = sigma_z() * real(0.5);
        let rho = identity(2) * real(0.5);
        for t in [0.0, 0.4, 2.0, 9.1] {
            let spec = CorrelatorSpec::new(
                vec![
                    Insertion::new(sigma_x(), t),
                    Insertion::new(sigma_z(), 0.0),
                    Insertion::new(sigma_x(), t),
                    Insertion::new(sigma_z(), 0.0),
                ],
                rho.clone(),
            )
            .unwrap();
            assert!((closed_correlator(&h, &spec).unwrap() + ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn band_is_golden_rule_calibrated() {
        let bath = FiniteBath::golden_rule_band(1.0, 0.1, 8, ModeKind::Qubit, 0.0).unwrap();
        let spacing = bath.frequencies[1] - bath.frequencies[0];
        assert!((spacing - 0.125).abs() < 1e-14);
        assert!((bath.frequencies[0] - (0.5 + 0.0625)).abs() < 1e-14);
        let rate = 2.0 * PI * bath.couplings[0].powi(2) / spacing;
        assert!((rate - 0.1).abs() < 1e-14);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let m = two_level_atom(1.0, 0.1, 0.0).unwrap();
        let bath = FiniteBath::golden_rule_band(1.0, 0.1, 12, ModeKind::Qubit, 0.0).unwrap();
        assert!(FiniteBathSystem::new(&m, &bath).is_err());
    }

    #[test]
    fn decoupled_bath_reproduces_closed_dynamics() {
        let m = two_level_atom(1.0, 0.1, 0.0).unwrap();
        let bath = FiniteBath::golden_rule_band(1.0, 0.1, 3, ModeKind::Qubit, 0.2)
            .unwrap()
            .decoupled();
        let fb = FiniteBathSystem::new(&m, &bath).unwrap();
        let rho = (identity(2) + sigma_x() * real(0.4)) * real(0.5);
        let spec = CorrelatorSpec::new(
            vec![
                Insertion::new(sigma_x(), 2.0),
                Insertion::new(sigma_z(), 0.5),
                Insertion::new(sigma_x() * I, 1.0),
            ],
            rho,
        )
        .unwrap();
        let exact = closed_correlator(m.hamiltonian(), &spec).unwrap();
        assert!((fb.correlator(&spec).unwrap() - exact).norm() < 1e-10);
    }

    #[test]
    fn brute_force_generator_matches_dense_assembly() {
        let m = two_level_atom(1.0, 0.1, 0.4).unwrap();
        let sys = OpenSystem::from_model_exact(&m, None).unwrap();
        let g = multi_slot_generator(sys.hamiltonian(), sys.decompositions(), 2, 4096).unwrap();
        let brute =
            brute_force_two_slot_generator(sys.hamiltonian(), sys.decompositions()).unwrap();
        assert!((g.matrix() - brute).camax() < 1e-14);
    }

    #[test]
    fn naive_integrator_keeps_identity_constant() {
        let m = two_level_atom(1.0, 0.1, 0.4).unwrap();
        let sys = OpenSystem::from_model_exact(&m, None).unwrap();
        let id = identity(2);
        let rho = basis_projector(2, 0);
        let v = naive_equation_integrator(
            sys.hamiltonian(),
            sys.decompositions(),
            &[id.clone(), id.clone()],
            &[id.clone(), id.clone(), id],
            &rho,
            5.0,
            0.01,
        )
        .unwrap();
        assert!((v - ONE).norm() < 1e-13);
    }
}
