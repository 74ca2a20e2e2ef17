//! Impedance of a transmon's electromagnetic environment built from lossy LC resonators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
mod element;
mod error;
mod network;
mod oracle;

pub use element::{lcr_branch_impedance, series, ResonatorSpec};
pub use error::{CircuitError, Result};
pub use network::{
    admittance_matrix, bath_admittance, effective_impedance, linear_grid, network_impedance, CircuitSpec,
    ComplexImpedanceSample, SpectralGrid,
};
pub use oracle::{parallel_lcr, single_resonator_oracle, OracleSample};
pub use num_complex::Complex64;
