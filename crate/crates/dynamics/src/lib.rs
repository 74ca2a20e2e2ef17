//! Qubit plus truncated bosonic modes in the effective and laboratory frames.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod basis;
mod effective;
mod error;
mod lab;
mod model;
mod ode;
mod oracle;
mod scan;

pub use basis::{Basis, Hamiltonian};
pub use effective::{effective_hamiltonian, evolve_effective, propagate_effective_states};
pub use error::{DynamicsError, Result};
pub use lab::{evolve_lab_driven, frame_comparison, pure_trace_distance, DressedBasis, FrameComparison, LabRun, LabSetup};
pub use model::{BathInit, InitialCondition, ModeSet, ModeSpec, Propagation, QubitInit, SimOptions, SimResult};
pub use ode::{integrate_dp54, OdeStats, OdeSystem, StepControl};
pub use oracle::{fit_decay_rate, golden_rule_oracle, neglected_term_norm, NeglectedTerms};
pub use scan::{
    classify, ohmic_modes, poisson_quantile, prominent_sign_changes, regime_scan, Classification, ClassifyOptions, Regime,
    ScanConfig, ScanRow,
};
