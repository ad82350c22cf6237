//! JSON run configuration. Every struct rejects unknown keys.

use serde::{Deserialize, Serialize};

/// `[re, im]` rows.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionConfig>,
    /// Replaces the bath of every coupling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    pub task: TaskKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corr: Option<CorrConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub otoc: Option<OtocConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Decompose,
    Steady,
    Evolve,
    Corr,
    Otoc,
    Validate,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Decompose => "decompose",
            TaskKind::Steady => "steady",
            TaskKind::Evolve => "evolve",
            TaskKind::Corr => "corr",
            TaskKind::Otoc => "otoc",
            TaskKind::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    TwoLevelAtom {
        omega0: f64,
        gamma: f64,
        #[serde(default)]
        temperature: f64,
    },
    TruncatedOscillator {
        omega0: f64,
        levels: usize,
        gamma: f64,
        #[serde(default)]
        temperature: f64,
    },
    CoupledDimer {
        omega1: f64,
        omega2: f64,
        g: f64,
        gamma1: f64,
        gamma2: f64,
        #[serde(default)]
        temperature: f64,
    },
    Explicit {
        hamiltonian: MatrixSpec,
        couplings: Vec<CouplingConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub operator: OperatorSpec,
    pub bath: BathConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub gamma0: f64,
    pub rate_profile: RateProfileConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateProfileConfig {
    Flat {
        rate: f64,
    },
    /// `[omega, rate]` pairs.
    Table {
        entries: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecompositionConfig {
    Exact {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freq_tol: Option<f64>,
    },
    /// One entry per coupling, in model order.
    Local {
        freq_tol: f64,
        couplings: Vec<LocalCouplingConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalCouplingConfig {
    pub c0: OperatorSpec,
    pub modes: Vec<LocalModeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalModeConfig {
    pub operator: OperatorSpec,
    pub omega: f64,
}

/// Operator by name (`sx`, `sp`, `a`, `adag`, `I`, `sz2`, ...) or explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Name(String),
    Matrix(MatrixSpec),
}

/// `ground`, `excited`, `maximally_mixed`, `steady`, `basis:k`, or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Name(String),
    Matrix(MatrixSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub initial_state: StateSpec,
    pub observable: OperatorSpec,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrConfig {
    pub initial_state: StateSpec,
    /// Time at which the reference state is taken (QRT and group forms).
    #[serde(default)]
    pub t: f64,
    pub grid: GridConfig,
    pub correlator: CorrelatorForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrelatorForm {
    /// `⟨A1 B(t+τ) A2⟩`.
    Qrt {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a1: Option<OperatorSpec>,
        b: OperatorSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a2: Option<OperatorSpec>,
    },
    /// `⟨A1 B1(t+τ) A2 ... Bn(t+τ) A_{n+1}⟩`.
    Group {
        a: Vec<OperatorSpec>,
        b: Vec<OperatorSpec>,
    },
    /// Arbitrary insertion times; flagged insertions move by τ.
    General { insertions: Vec<InsertionConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertionConfig {
    pub operator: OperatorSpec,
    pub time: f64,
    #[serde(default)]
    pub shift: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OtocConfig {
    pub initial_state: StateSpec,
    pub w: OperatorSpec,
    pub v: OperatorSpec,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Adds an `abs` column.
    #[serde(default)]
    pub abs: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
