//! Rotating-frame parameters for a transmon under a strong and a weak drive tone.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod budget;
mod drive;
mod error;
mod frame;

pub use budget::{
    alpha_eff, drive_occupation, error_budget, kondo_temperature_estimate, leakage_error, AlphaEff, BudgetOptions,
    ErrorBudget, ModeHeating, RwaDiagnostics, Verdict,
};
pub use drive::DriveSpec;
pub use error::{FrameError, PairDiagnostic, Result};
pub use frame::{
    effective_params, effective_spectral_density, effective_spectral_density_at, fit_effective_temperature,
    frame_transform, EffectiveFrame, EffectiveTemperature, Mode, TemperatureFit, TemperatureFitOptions,
};
