//! Forward evolution, steady states and correlator drivers.
//!
//! Every driver works on a [`Propagator`], which owns the open system, the
//! forward and adjoint generators, and caches of multi-slot generators and
//! per-gap propagators.

mod action;
mod ode;

pub use ode::integrate_ode;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::decomposition::{default_freq_tol, exact_bohr_decomposition, JumpDecomposition};
use crate::error::{Error, Result};
use crate::generators::{
    self, adjoint_lindbladian, forward_lindbladian, multi_slot_generator, slot_space_size,
    LinearOperator, MatrixFreeGenerator, SlotTensor, SuperOperator, DEFAULT_SLOT_BUDGET,
};
use crate::models::SystemModel;
use crate::operator::{
    self, c64, dagger, expm, hermitian_eig, identity, unvec, vec, Operator, Vector, DEFAULT_TOL,
    ONE,
};

/// Hamiltonian plus rate-carrying jump decompositions, one per coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    hamiltonian: Operator,
    decompositions: Vec<JumpDecomposition>,
}

impl OpenSystem {
    pub fn new(hamiltonian: Operator, decompositions: Vec<JumpDecomposition>) -> Result<Self> {
        operator::check_square(&hamiltonian, "open system Hamiltonian")?;
        operator::ensure_hermitian(&hamiltonian, "system Hamiltonian", 1e-10)?;
        for d in &decompositions {
            if d.dim() != hamiltonian.nrows() {
                return Err(Error::DimensionMismatch {
                    context: "jump decomposition",
                    left: d.dim(),
                    right: hamiltonian.nrows(),
                });
            }
            if d.rates().is_none() {
                return Err(Error::RatesUnassigned);
            }
        }
        Ok(OpenSystem {
            hamiltonian,
            decompositions,
        })
    }

    /// Global-approach system: exact decomposition of every coupling with
    /// thermal rates from its bath. `freq_tol = None` selects the default.
    pub fn from_model_exact(model: &SystemModel, freq_tol: Option<f64>) -> Result<Self> {
        let h = model.hamiltonian();
        let tol = match freq_tol {
            Some(t) => t,
            None => default_freq_tol(h)?,
        };
        let decompositions = model
            .couplings()
            .iter()
            .map(|c| exact_bohr_decomposition(h, &c.operator, tol)?.assign_rates(&c.bath))
            .collect::<Result<Vec<_>>>()?;
        Self::new(h.clone(), decompositions)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn decompositions(&self) -> &[JumpDecomposition] {
        &self.decompositions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Cached dense matrix exponential for generators of dimension at most
    /// [`DENSE_EXPM_LIMIT`], Taylor-substepped exponential action up to the
    /// slot budget, ODE beyond.
    Auto,
    /// Matrix exponential only; exceeding the budget is an error.
    Expm,
    /// Adaptive Runge–Kutta for every propagation.
    Ode,
}

/// Largest generator dimension for which [`Method::Auto`] forms `e^{Gτ}` densely.
pub const DENSE_EXPM_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Expm,
    Action,
    Ode,
}

// Propagators are cached per gap; gaps within a few ulps (as produced by
// uniform grids) share one entry, evaluated at the rounded gap.
fn quantize_gap(gap: f64) -> f64 {
    const DROP: u32 = 12;
    let bits = gap.to_bits();
    let half = 1u64 << (DROP - 1);
    f64::from_bits((bits + half) & !((1u64 << DROP) - 1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Largest dense generator dimension `d^(2n)`.
    pub slot_budget: usize,
    pub method: Method,
    /// ODE local error tolerance.
    pub tol: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions {
            slot_budget: DEFAULT_SLOT_BUDGET,
            method: Method::Auto,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Insertion {
    pub operator: Operator,
    pub time: f64,
}

impl Insertion {
    pub fn new(operator: Operator, time: f64) -> Self {
        Insertion { operator, time }
    }
}

/// `⟨Â1(t1) Â2(t2) ... Ân(tn)⟩` for a system starting in `initial_state`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSpec {
    pub insertions: Vec<Insertion>,
    pub initial_state: Operator,
}

impl CorrelatorSpec {
    pub fn new(insertions: Vec<Insertion>, initial_state: Operator) -> Result<Self> {
        let spec = CorrelatorSpec {
            insertions,
            initial_state,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.initial_state.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        if self.insertions.is_empty() {
            return Err(Error::InvalidArgument(
                "a correlator needs at least one insertion".into(),
            ));
        }
        validate_density(&self.initial_state)?;
        for ins in &self.insertions {
            operator::check_same_dim(&self.initial_state, &ins.operator, "correlator insertion")?;
            if !ins.time.is_finite() || ins.time < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "insertion times must be finite and nonnegative, got {}",
                    ins.time
                )));
            }
        }
        Ok(())
    }

    /// Copy with the insertions listed in `shifted` moved later by `tau`.
    pub fn shifted(&self, shifted: &[usize], tau: f64) -> Result<CorrelatorSpec> {
        if let Some(bad) = shifted.iter().find(|&&k| k >= self.insertions.len()) {
            return Err(Error::InvalidArgument(format!(
                "insertion index {bad} out of range for {} insertions",
                self.insertions.len()
            )));
        }
        let mut out = self.clone();
        for (k, ins) in out.insertions.iter_mut().enumerate() {
            if shifted.contains(&k) {
                ins.time += tau;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTrace {
    pub taus: Vec<f64>,
    pub values: Vec<c64>,
}

/// Checks Hermiticity, unit trace and positivity, each within `1e-10`.
pub fn validate_density(rho: &Operator) -> Result<()> {
    operator::check_square(rho, "density matrix")?;
    let dev = operator::hermitian_deviation(rho);
    if dev > 1e-10 {
        return Err(Error::InvalidState(format!(
            "not Hermitian (max deviation {dev:.3e})"
        )));
    }
    let tr = operator::trace(rho);
    if (tr - ONE).norm() > 1e-10 {
        return Err(Error::InvalidState(format!(
            "trace is {} rather than 1",
            tr
        )));
    }
    let sym = (rho + rho.adjoint()) * c64::new(0.5, 0.0);
    let min = hermitian_eig(&sym)?.values.first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::InvalidState(format!(
            "not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if let Some(bad) = taus.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "evaluation offsets must be finite and nonnegative, got {bad}"
        )));
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "evaluation offsets must be strictly ascending".into(),
        ));
    }
    Ok(())
}

#[derive(Debug)]
enum Generator {
    Dense(SuperOperator),
    MatrixFree(MatrixFreeGenerator),
}

impl Generator {
    fn as_linear(&self) -> &dyn LinearOperator {
        match self {
            Generator::Dense(s) => s,
            Generator::MatrixFree(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PropagatorKey {
    Forward(u64),
    Slots(usize, u64),
}

/// Correlator engine for one open system.
#[derive(Debug)]
pub struct Propagator {
    system: OpenSystem,
    options: PropagationOptions,
    adjoint: SuperOperator,
    forward: SuperOperator,
    generators: Mutex<HashMap<usize, Arc<Generator>>>,
    propagators: Mutex<HashMap<PropagatorKey, Arc<Operator>>>,
}

impl Propagator {
    pub fn new(system: OpenSystem, options: PropagationOptions) -> Result<Self> {
        if !(options.tol > 0.0) || !options.tol.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                options.tol
            )));
        }
        let adjoint = adjoint_lindbladian(system.hamiltonian(), system.decompositions())?;
        let forward = forward_lindbladian(system.hamiltonian(), system.decompositions())?;
        Ok(Propagator {
            system,
            options,
            adjoint,
            forward,
            generators: Mutex::new(HashMap::new()),
            propagators: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_defaults(system: OpenSystem) -> Result<Self> {
        Self::new(system, PropagationOptions::default())
    }

    pub fn system(&self) -> &OpenSystem {
        &self.system
    }

    pub fn options(&self) -> &PropagationOptions {
        &self.options
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn adjoint_lindbladian(&self) -> &SuperOperator {
        &self.adjoint
    }

    pub fn forward_lindbladian(&self) -> &SuperOperator {
        &self.forward
    }

    fn route(&self, size: usize) -> Option<Route> {
        let budget = self.options.slot_budget;
        match self.options.method {
            Method::Expm if size <= budget => Some(Route::Expm),
            Method::Expm => None,
            Method::Auto if size <= budget.min(DENSE_EXPM_LIMIT) => Some(Route::Expm),
            Method::Auto if size <= budget => Some(Route::Action),
            _ if size <= generators::MATRIX_FREE_CAP => Some(Route::Ode),
            _ => None,
        }
    }

    /// `e^{Gτ} v0` on the grid by the route chosen for `G`'s dimension.
    fn propagate(
        &self,
        key: impl Fn(u64) -> PropagatorKey,
        g: &dyn LinearOperator,
        dense: Option<&Operator>,
        v0: &Vector,
        taus: &[f64],
        slots: usize,
    ) -> Result<Vec<Vector>> {
        match (self.route(v0.len()), dense) {
            (Some(Route::Expm), Some(matrix)) => {
                let mut out = Vec::with_capacity(taus.len());
                let mut v = v0.clone();
                let mut t = 0.0;
                for &tau in taus {
                    let gap = quantize_gap(tau - t);
                    if gap > 0.0 {
                        let p = self.cached_expm(key(gap.to_bits()), matrix, gap)?;
                        v = &*p * v;
                    }
                    t = tau;
                    out.push(v.clone());
                }
                Ok(out)
            }
            (Some(Route::Action), _) => action::exponential_action(g, v0, taus),
            (Some(Route::Ode), _) => integrate_ode(g, v0, taus, self.options.tol),
            _ => Err(self.budget_error(slots, None)),
        }
    }

    fn budget_error(&self, slots: usize, depth: Option<usize>) -> Error {
        let d = self.dim();
        Error::SlotBudget {
            slots,
            dim: d,
            required: slot_space_size(d, slots).unwrap_or(usize::MAX),
            budget: self.options.slot_budget,
            depth,
        }
    }

    /// Checks that an `m`-slot propagation can run under the current options.
    fn check_slots(&self, slots: usize, depth: Option<usize>) -> Result<()> {
        match slot_space_size(self.dim(), slots).and_then(|size| self.route(size)) {
            Some(_) => Ok(()),
            None => Err(self.budget_error(slots, depth)),
        }
    }

    fn generator(&self, slots: usize) -> Result<Arc<Generator>> {
        if let Some(g) = self
            .generators
            .lock()
            .expect("generator cache poisoned")
            .get(&slots)
        {
            return Ok(g.clone());
        }
        let size =
            slot_space_size(self.dim(), slots).ok_or_else(|| self.budget_error(slots, None))?;
        let h = self.system.hamiltonian();
        let decomps = self.system.decompositions();
        let g = match self.route(size) {
            Some(Route::Expm) => Generator::Dense(multi_slot_generator(
                h,
                decomps,
                slots,
                self.options.slot_budget,
            )?),
            Some(_) => Generator::MatrixFree(MatrixFreeGenerator::new(h, decomps, slots)?),
            None => return Err(self.budget_error(slots, None)),
        };
        let g = Arc::new(g);
        self.generators
            .lock()
            .expect("generator cache poisoned")
            .entry(slots)
            .or_insert(g.clone());
        Ok(g)
    }

    fn cached_expm(&self, key: PropagatorKey, g: &Operator, gap: f64) -> Result<Arc<Operator>> {
        if let Some(p) = self
            .propagators
            .lock()
            .expect("propagator cache poisoned")
            .get(&key)
        {
            return Ok(p.clone());
        }
        let p = Arc::new(expm(g, gap)?);
        self.propagators
            .lock()
            .expect("propagator cache poisoned")
            .entry(key)
            .or_insert(p.clone());
        Ok(p)
    }

    /// Slot-tensor coordinates after each offset of the ascending grid `taus`.
    fn evolve_slots_grid(&self, slots: usize, v0: &Vector, taus: &[f64]) -> Result<Vec<Vector>> {
        self.check_slots(slots, None)?;
        let generator = self.generator(slots)?;
        let dense = match &*generator {
            Generator::Dense(g) => Some(g.matrix()),
            Generator::MatrixFree(_) => None,
        };
        self.propagate(
            |bits| PropagatorKey::Slots(slots, bits),
            generator.as_linear(),
            dense,
            v0,
            taus,
            slots,
        )
    }

    fn evolve_slots(&self, tensor: &SlotTensor, gap: f64) -> Result<SlotTensor> {
        let v = self
            .evolve_slots_grid(tensor.slots(), tensor.coords(), &[gap])?
            .pop()
            .expect("one grid point");
        SlotTensor::from_coords(tensor.dim(), tensor.slots(), v)
    }

    /// Raw forward evolution on the grid, without symmetrization.
    fn forward_grid(&self, rho0: &Operator, taus: &[f64]) -> Result<Vec<Vector>> {
        self.propagate(
            PropagatorKey::Forward,
            &self.forward,
            Some(self.forward.matrix()),
            &vec(rho0),
            taus,
            1,
        )
    }

    fn finish_density(&self, v: &Vector) -> Result<Operator> {
        let rho = unvec(v)?;
        let mut rho = (&rho + rho.adjoint()) * c64::new(0.5, 0.0);
        let tr = operator::trace(&rho);
        let drift = (tr - ONE).norm();
        if drift > 1e-8 {
            return Err(Error::TraceDrift { drift });
        }
        if drift > 1e-12 {
            rho /= c64::new(tr.re, 0.0);
        }
        Ok(rho)
    }

    /// `ρ(t) = unvec(e^{F t} vec(ρ0))`, symmetrized.
    pub fn evolve_density(&self, rho0: &Operator, t: f64) -> Result<Operator> {
        Ok(self.evolve_density_grid(rho0, &[t])?.remove(0))
    }

    /// `ρ(τ)` on an ascending grid of times.
    pub fn evolve_density_grid(&self, rho0: &Operator, taus: &[f64]) -> Result<Vec<Operator>> {
        operator::check_same_dim(self.system.hamiltonian(), rho0, "initial density")?;
        validate_density(rho0)?;
        if let Some(bad) = taus.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "evolution time must be finite and nonnegative, got {bad}"
            )));
        }
        if taus.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "evolution times must be ascending".into(),
            ));
        }
        self.forward_grid(rho0, taus)?
            .iter()
            .map(|v| self.finish_density(v))
            .collect()
    }

    /// Unique trace-one fixed point of the forward generator.
    pub fn steady_state(&self) -> Result<Operator> {
        let f = self.forward.matrix().clone();
        let svd = f.svd(false, true);
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let threshold = 1e-10 * smax.max(1.0);
        let null: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= threshold)
            .map(|(k, _)| k)
            .collect();
        if null.len() != 1 {
            return Err(Error::DegenerateSteadyState {
                multiplicity: null.len(),
            });
        }
        let v: Vector = v_t.row(null[0]).adjoint();
        let rho = unvec(&v)?;
        let tr = operator::trace(&rho);
        if tr.norm() < 1e-12 {
            return Err(Error::DegenerateSteadyState { multiplicity: 0 });
        }
        let rho = rho / tr;
        Ok((&rho + rho.adjoint()) * c64::new(0.5, 0.0))
    }

    fn check_operators(&self, ops: &[&Operator], context: &'static str) -> Result<()> {
        for op in ops {
            operator::check_same_dim(self.system.hamiltonian(), op, context)?;
        }
        Ok(())
    }

    /// `⟨A1 B(t+τ) A2⟩ = trace(unvec(e^{𝓛τ} vec B) · A2 · ρ_t · A1)`.
    pub fn qrt_correlator(
        &self,
        a1: &Operator,
        b: &Operator,
        a2: &Operator,
        rho_t: &Operator,
        taus: &[f64],
    ) -> Result<CorrelatorTrace> {
        self.check_operators(&[a1, b, a2, rho_t], "qrt_correlator operand")?;
        validate_density(rho_t)?;
        check_taus(taus)?;
        let weight = a2 * rho_t * a1;
        let evolved = self.evolve_adjoint_grid(&vec(b), taus)?;
        let values = evolved
            .iter()
            .map(|v| Ok(operator::trace(&(unvec(v)? * &weight))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CorrelatorTrace {
            taus: taus.to_vec(),
            values,
        })
    }

    fn evolve_adjoint_grid(&self, v0: &Vector, taus: &[f64]) -> Result<Vec<Vector>> {
        self.propagate(
            |bits| PropagatorKey::Slots(1, bits),
            &self.adjoint,
            Some(self.adjoint.matrix()),
            v0,
            taus,
            1,
        )
    }

    /// `⟨A1 B1(t+τ) A2 B2(t+τ) ... An Bn(t+τ) A_{n+1}⟩` with all `Bk` sharing
    /// one running time, evolved by the `n`-slot generator.
    pub fn equal_time_group_correlator(
        &self,
        a: &[Operator],
        b: &[Operator],
        rho_t: &Operator,
        taus: &[f64],
    ) -> Result<CorrelatorTrace> {
        if b.is_empty() || a.len() != b.len() + 1 {
            return Err(Error::DimensionMismatch {
                context: "insertion list length (n+1 for n slots)",
                left: a.len(),
                right: b.len() + 1,
            });
        }
        let all: Vec<&Operator> = a.iter().chain(b).chain(std::iter::once(rho_t)).collect();
        self.check_operators(&all, "equal_time_group_correlator operand")?;
        validate_density(rho_t)?;
        check_taus(taus)?;
        let tensor = SlotTensor::elementary(b)?;
        let d = self.dim();
        let evolved = self.evolve_slots_grid(b.len(), tensor.coords(), taus)?;
        let values = evolved
            .iter()
            .map(|v| generators::contract_coords(d, b.len(), v, a, rho_t))
            .collect();
        Ok(CorrelatorTrace {
            taus: taus.to_vec(),
            values,
        })
    }

    /// `F(τ) = ⟨W†(τ) V† W(τ) V⟩`.
    pub fn otoc(
        &self,
        w: &Operator,
        v: &Operator,
        rho: &Operator,
        taus: &[f64],
    ) -> Result<CorrelatorTrace> {
        self.check_operators(&[w, v], "otoc operand")?;
        let id = identity(self.dim());
        self.equal_time_group_correlator(
            &[id, dagger(v), v.clone()],
            &[dagger(w), w.clone()],
            rho,
            taus,
        )
    }

    /// Arbitrary-time correlator by descending-time recursion.
    pub fn general_correlator(&self, spec: &CorrelatorSpec) -> Result<c64> {
        spec.validate()?;
        let first = &spec.insertions[0].operator;
        self.check_operators(&[first, &spec.initial_state], "correlator insertion")?;

        // neighbouring insertions at one instant act as one product operator
        let mut items: Vec<Insertion> = Vec::with_capacity(spec.insertions.len());
        for ins in &spec.insertions {
            match items.last_mut() {
                Some(last) if last.time == ins.time => {
                    last.operator = &last.operator * &ins.operator
                }
                _ => items.push(ins.clone()),
            }
        }

        let mut times: Vec<f64> = items.iter().map(|i| i.time).collect();
        times.sort_by(|a, b| b.total_cmp(a));
        times.dedup();
        let earliest = *times.last().expect("nonempty");
        let rho = self.evolve_density(&spec.initial_state, earliest)?;

        if times.len() == 1 {
            let product = items
                .iter()
                .fold(identity(self.dim()), |acc, i| acc * &i.operator);
            return Ok(operator::trace(&(product * &rho)));
        }

        // positions (into `items`) of the running slots, ascending
        let mut active: Vec<usize> = (0..items.len())
            .filter(|&k| items[k].time == times[0])
            .collect();
        let ops: Vec<Operator> = active.iter().map(|&k| items[k].operator.clone()).collect();
        self.check_slots(active.len(), Some(0))?;
        let mut tensor = SlotTensor::elementary(&ops)?;

        for (depth, pair) in times.windows(2).enumerate() {
            let (later, earlier) = (pair[0], pair[1]);
            tensor = self.evolve_slots(&tensor, later - earlier)?;
            if earlier == earliest {
                break;
            }
            let newcomers: Vec<usize> = (0..items.len())
                .filter(|&k| items[k].time == earlier)
                .collect();
            self.check_slots(active.len() + newcomers.len(), Some(depth + 1))?;
            for k in newcomers {
                let position = active.partition_point(|&p| p < k);
                tensor = tensor.insert_slot(position, &items[k].operator)?;
                active.insert(position, k);
            }
        }

        // operators at the earliest time sit between the running slots
        let mut inserts = vec![identity(self.dim()); active.len() + 1];
        for (k, item) in items.iter().enumerate() {
            if item.time == earliest {
                let gap = active.partition_point(|&p| p < k);
                inserts[gap] = &inserts[gap] * &item.operator;
            }
        }
        tensor.contract(&inserts, &rho)
    }

    /// `general_correlator` with the insertions listed in `shifted` moved
    /// later by each `τ` of the grid.
    pub fn general_correlator_sweep(
        &self,
        spec: &CorrelatorSpec,
        shifted: &[usize],
        taus: &[f64],
    ) -> Result<CorrelatorTrace> {
        check_taus(taus)?;
        let values = taus
            .iter()
            .map(|&tau| self.general_correlator(&spec.shifted(shifted, tau)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(CorrelatorTrace {
            taus: taus.to_vec(),
            values,
        })
    }
}
