use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("{what} is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { what: String, deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A structural constraint on a jump decomposition does not hold.
    #[error("decomposition constraint violated: {0}")]
    Constraint(String),

    #[error("rates have not been assigned to the decomposition")]
    RatesUnassigned,

    #[error("rate profile has no entry for Bohr frequency {omega}")]
    MissingRate { omega: f64 },

    #[error("steady state is not unique: null space of the forward generator has dimension {multiplicity}")]
    DegenerateSteadyState { multiplicity: usize },

    #[error("slot budget exceeded{}: {slots} slots of dimension {dim} need {required} coordinates, budget is {budget}",
        depth.map(|d| format!(" at recursion depth {d}")).unwrap_or_default())]
    SlotBudget {
        slots: usize,
        dim: usize,
        required: usize,
        budget: usize,
        depth: Option<usize>,
    },

    #[error("trace drift {drift:.3e} after forward evolution exceeds 1e-8")]
    TraceDrift { drift: f64 },

    #[error("ODE step size underflow at tau = {tau}")]
    StepUnderflow { tau: f64 },

    #[error("matrix exponential overflowed (norm of argument {norm:.3e})")]
    Overflow { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),
}

impl Error {
    /// Failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSteadyState { .. }
                | Error::TraceDrift { .. }
                | Error::StepUnderflow { .. }
                | Error::Overflow { .. }
        )
    }
}
