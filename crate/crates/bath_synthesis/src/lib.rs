//! Ohmic bath synthesis from a tapered ladder of lossy resonators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod design;
mod error;
mod fit;
mod relations;

pub use design::{
    alpha_from_slope, coupling_inputs, evaluate_design, ladder_design, parasitic_robustness_scan, synthesize_ladder,
    CutoffShape, Diagnostics, LadderLayout, ModeRow, ParasiticPoint, SynthesisResult, SynthesisTarget, TaperEnd,
    TransmonDesign, FIT_BAND,
};
pub use error::{Result, SynthesisError};
pub use fit::{fit_spectral_exponent, linear_fit, LinearFit, SpectralFit};
pub use relations::{
    coupling_from_area, mode_collapse_relations, rectangular_impedance_estimate, single_mode_coupling,
    strong_coupling_check, CollapsedMode, CouplingEstimate, CouplingInputs, StrongCouplingReport,
};
