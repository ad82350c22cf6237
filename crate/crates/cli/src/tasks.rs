use multitime::operator::{self, identity};
use multitime::validation;
use multitime::{
    CorrelatorSpec, CorrelatorTrace, Insertion, Method, OpenSystem, PropagationOptions, Propagator,
};

use crate::config::{CorrConfig, CorrelatorForm, EvolveConfig, OtocConfig, RunConfig, TaskKind};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::resolve;

fn section<T>(value: &Option<T>, task: TaskKind) -> CliResult<&T> {
    value
        .as_ref()
        .ok_or_else(|| CliError::config(format!("task '{0}' needs a '{0}' section", task.name())))
}

fn open_system(config: &RunConfig) -> CliResult<OpenSystem> {
    let model = resolve::model(&config.model, config.bath.as_ref())?;
    resolve::open_system(&model, config.decomposition.as_ref())
}

fn propagator(config: &RunConfig) -> CliResult<Propagator> {
    let defaults = PropagationOptions::default();
    let options = PropagationOptions {
        slot_budget: config.slot_budget.unwrap_or(defaults.slot_budget),
        method: Method::Auto,
        tol: config.tol.unwrap_or(defaults.tol),
    };
    Ok(Propagator::new(open_system(config)?, options)?)
}

fn trace_table(trace: &CorrelatorTrace, abs: bool) -> Table {
    let mut columns = vec!["tau", "re", "im"];
    if abs {
        columns.push("abs");
    }
    let mut table = Table::new(columns);
    for (tau, v) in trace.taus.iter().zip(&trace.values) {
        let mut row = vec![Cell::Float(*tau), Cell::Float(v.re), Cell::Float(v.im)];
        if abs {
            row.push(Cell::Float(v.norm()));
        }
        table.push(row);
    }
    table
}

/// Result table plus, for `validate`, the names of failed criteria.
pub struct Outcome {
    pub table: Table,
    pub failed: Vec<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome {
            table,
            failed: Vec::new(),
        }
    }
}

pub fn execute(config: &RunConfig) -> CliResult<Outcome> {
    let abs = config.output.abs;
    Ok(match config.task {
        TaskKind::Decompose => decompose(config)?.into(),
        TaskKind::Steady => steady(config)?.into(),
        TaskKind::Evolve => {
            trace_table(&evolve(config, section(&config.evolve, config.task)?)?, abs).into()
        }
        TaskKind::Corr => {
            trace_table(&corr(config, section(&config.corr, config.task)?)?, abs).into()
        }
        TaskKind::Otoc => {
            trace_table(&otoc(config, section(&config.otoc, config.task)?)?, abs).into()
        }
        TaskKind::Validate => validate()?,
    })
}

fn decompose(config: &RunConfig) -> CliResult<Table> {
    let system = open_system(config)?;
    let mut table = Table::new(vec![
        "coupling",
        "kind",
        "index",
        "omega",
        "gamma_down",
        "gamma_up",
        "norm",
    ]);
    for (k, d) in system.decompositions().iter().enumerate() {
        let rates = d.rates().ok_or(multitime::Error::RatesUnassigned)?;
        let c0_norm = operator::frobenius_norm(d.c0());
        if c0_norm > 0.0 {
            table.push(vec![
                Cell::Int(k as i64),
                Cell::Text("c0".into()),
                Cell::Int(0),
                Cell::Float(0.0),
                Cell::Float(rates.gamma0),
                Cell::Float(0.0),
                Cell::Float(c0_norm),
            ]);
        }
        for (j, (mode, r)) in d.modes().iter().zip(&rates.modes).enumerate() {
            table.push(vec![
                Cell::Int(k as i64),
                Cell::Text("mode".into()),
                Cell::Int(j as i64),
                Cell::Float(mode.omega),
                Cell::Float(r.down),
                Cell::Float(r.up),
                Cell::Float(operator::frobenius_norm(&mode.operator)),
            ]);
        }
    }
    Ok(table)
}

fn steady(config: &RunConfig) -> CliResult<Table> {
    let rho = propagator(config)?.steady_state()?;
    let mut table = Table::new(vec!["row", "col", "re", "im"]);
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            let z = rho[(i, j)];
            table.push(vec![
                Cell::Int(i as i64),
                Cell::Int(j as i64),
                Cell::Float(z.re),
                Cell::Float(z.im),
            ]);
        }
    }
    Ok(table)
}

fn evolve(config: &RunConfig, section: &EvolveConfig) -> CliResult<CorrelatorTrace> {
    let p = propagator(config)?;
    let d = p.dim();
    let rho0 = resolve::state(&section.initial_state, &p, "evolve.initial_state")?;
    let obs = resolve::operator(&section.observable, d, "evolve.observable")?;
    let taus = resolve::grid(&section.grid, "evolve.grid")?;
    let values = p
        .evolve_density_grid(&rho0, &taus)?
        .iter()
        .map(|rho| operator::trace(&(&obs * rho)))
        .collect();
    Ok(CorrelatorTrace { taus, values })
}

fn corr(config: &RunConfig, section: &CorrConfig) -> CliResult<CorrelatorTrace> {
    let p = propagator(config)?;
    let d = p.dim();
    let rho0 = resolve::state(&section.initial_state, &p, "corr.initial_state")?;
    let taus = resolve::grid(&section.grid, "corr.grid")?;
    let op = |spec: &Option<_>, what: &str| match spec {
        Some(s) => resolve::operator(s, d, what),
        None => Ok(identity(d)),
    };
    match &section.correlator {
        CorrelatorForm::Qrt { a1, b, a2 } => {
            let rho_t = p.evolve_density(&rho0, section.t)?;
            let a1 = op(a1, "corr.correlator.a1")?;
            let b = resolve::operator(b, d, "corr.correlator.b")?;
            let a2 = op(a2, "corr.correlator.a2")?;
            Ok(p.qrt_correlator(&a1, &b, &a2, &rho_t, &taus)?)
        }
        CorrelatorForm::Group { a, b } => {
            let rho_t = p.evolve_density(&rho0, section.t)?;
            let resolve_all = |ops: &[_], name: &str| {
                ops.iter()
                    .enumerate()
                    .map(|(k, s)| resolve::operator(s, d, &format!("corr.correlator.{name}[{k}]")))
                    .collect::<CliResult<Vec<_>>>()
            };
            let a = resolve_all(a, "a")?;
            let b = resolve_all(b, "b")?;
            Ok(p.equal_time_group_correlator(&a, &b, &rho_t, &taus)?)
        }
        CorrelatorForm::General { insertions } => {
            let list = insertions
                .iter()
                .enumerate()
                .map(|(k, ins)| {
                    let what = format!("corr.correlator.insertions[{k}].operator");
                    Ok(Insertion::new(
                        resolve::operator(&ins.operator, d, &what)?,
                        section.t + ins.time,
                    ))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let shifted: Vec<usize> = insertions
                .iter()
                .enumerate()
                .filter(|(_, ins)| ins.shift)
                .map(|(k, _)| k)
                .collect();
            let spec = CorrelatorSpec::new(list, rho0)?;
            Ok(p.general_correlator_sweep(&spec, &shifted, &taus)?)
        }
    }
}

fn otoc(config: &RunConfig, section: &OtocConfig) -> CliResult<CorrelatorTrace> {
    let p = propagator(config)?;
    let d = p.dim();
    let rho = resolve::state(&section.initial_state, &p, "otoc.initial_state")?;
    let w = resolve::operator(&section.w, d, "otoc.w")?;
    let v = resolve::operator(&section.v, d, "otoc.v")?;
    let taus = resolve::grid(&section.grid, "otoc.grid")?;
    Ok(p.otoc(&w, &v, &rho, &taus)?)
}

fn validate() -> CliResult<Outcome> {
    let reports = validation::run_all()?;
    let mut table = Table::new(vec!["id", "name", "passed", "metric", "tolerance"]);
    let mut failed = Vec::new();
    for r in &reports {
        eprintln!("{r}");
        if !r.passed {
            failed.push(format!("criterion {} ({})", r.id, r.name));
        }
        table.push(vec![
            Cell::Int(r.id as i64),
            Cell::Text(r.name.to_string()),
            Cell::Bool(r.passed),
            Cell::Float(r.metric),
            Cell::Float(r.tolerance),
        ]);
    }
    Ok(Outcome { table, failed })
}
