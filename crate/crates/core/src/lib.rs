//! Multi-time correlation functions of Markovian open quantum systems.
//!
//! The crate evolves products of running-time operators with the adjoint
//! multi-time master equation: a single-slot adjoint Lindbladian per operator
//! plus commutator cross dissipators between every pair of slots. Ordinary
//! two-time correlators, equal-time groups and out-of-time-ordered correlators
//! are all special cases of one descending-time recursion.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod error;
pub mod generators;
pub mod models;
pub mod operator;
pub mod oracles;
pub mod propagation;
pub mod validation;

pub use decomposition::{
    bose_occupation, exact_bohr_decomposition, local_decomposition, Channel, JumpDecomposition,
    JumpMode, ModeRates, Provenance, Rates,
};
pub use error::{Error, Result};
pub use generators::{LinearOperator, SlotTensor, SuperOperator};
pub use models::{BathSpec, Coupling, RateProfile, SystemModel};
pub use operator::{c64, Operator, Vector};
pub use propagation::{
    CorrelatorSpec, CorrelatorTrace, Insertion, Method, OpenSystem, PropagationOptions, Propagator,
    DENSE_EXPM_LIMIT,
};
