//! Lab-frame spin-boson parameters of a transmon coupled to an impedance.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use circuit_core::constants::{resistance_quantum, E_CHARGE, HBAR};
use circuit_core::{series, CircuitSpec};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransmonError {
    #[error("E_J/E_C = {ratio:.3} is below the transmon threshold {threshold}")]
    NotTransmon { ratio: f64, threshold: f64 },
    #[error("invalid {field}: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, TransmonError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonOptions {
    /// Minimum accepted E_J/E_C.
    pub min_ej_over_ec: f64,
}

impl Default for TransmonOptions {
    fn default() -> Self {
        Self { min_ej_over_ec: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBosonParams {
    /// Qubit splitting (rad/s)
    pub delta: f64,
    /// Anharmonicity (rad/s)
    pub anharmonicity: f64,
    pub beta: f64,
    /// Z_J (Ohm)
    pub z_j: f64,
    /// q0 (C)
    pub q0: f64,
    /// E_C (J)
    pub e_c: f64,
    /// E_J (J)
    pub e_j: f64,
    /// C_g renormalised by the environment (F)
    pub c_g0: f64,
    /// C_J + C_g0 (F)
    pub c_t: f64,
    /// series(C_J, C_g) (F)
    pub c_int: f64,
    /// Kondo parameter from an ohmic fit, if one was made.
    pub alpha: Option<f64>,
}

impl SpinBosonParams {
    /// Parameters from (Z_J, beta, Delta) directly, for design work where the
    /// junction is specified by its impedance. Uses C_T = 1/(Z_J Delta).
    pub fn from_impedance(z_j: f64, beta: f64, delta: f64, c_int: f64) -> Result<Self> {
        positive("z_j", z_j)?;
        positive("delta", delta)?;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(TransmonError::InvalidParameter { field: "beta", value: beta });
        }
        let c_t = 1.0 / (z_j * delta);
        let e_c = E_CHARGE * E_CHARGE / (2.0 * c_t);
        let e_j = (HBAR * delta).powi(2) / (8.0 * e_c);
        Ok(Self {
            delta,
            anharmonicity: e_c / HBAR,
            beta,
            z_j,
            q0: coupling_charge(beta, z_j),
            e_c,
            e_j,
            c_g0: f64::NAN,
            c_t,
            c_int,
            alpha: None,
        })
    }

    pub fn ej_over_ec(&self) -> f64 {
        self.e_j / self.e_c
    }

    /// |<0|Q|1>|^2 = q0^2/4
    pub fn transverse_element_sq(&self) -> f64 {
        0.25 * self.q0 * self.q0
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(TransmonError::InvalidParameter { field, value })
    }
}

/// q0 = 2 e beta sqrt(R_Q/(pi Z_J)).
pub fn coupling_charge(beta: f64, z_j: f64) -> f64 {
    2.0 * E_CHARGE * beta * (resistance_quantum() / (PI * z_j)).sqrt()
}

/// Z_J = R_Q sqrt(2 E_C/(pi^2 E_J)).
pub fn junction_impedance(e_c: f64, e_j: f64) -> f64 {
    resistance_quantum() * (2.0 * e_c / (PI * PI * e_j)).sqrt()
}

pub fn derive_params(spec: &CircuitSpec, opts: &TransmonOptions) -> Result<SpinBosonParams> {
    let c_env = spec.coupling_total() + spec.c_shunt;
    let c_g0 = series(spec.c_g, c_env);
    let c_t = spec.c_j + c_g0;
    let e_c = E_CHARGE * E_CHARGE / (2.0 * c_t);
    let ratio = spec.e_j / e_c;
    if ratio < opts.min_ej_over_ec {
        return Err(TransmonError::NotTransmon { ratio, threshold: opts.min_ej_over_ec });
    }
    // beta takes the bare ground capacitance
    let beta = spec.c_g / (spec.c_j + spec.c_g);
    let z_j = junction_impedance(e_c, spec.e_j);
    Ok(SpinBosonParams {
        delta: (8.0 * spec.e_j * e_c).sqrt() / HBAR,
        anharmonicity: e_c / HBAR,
        beta,
        z_j,
        q0: coupling_charge(beta, z_j),
        e_c,
        e_j: spec.e_j,
        c_g0,
        c_t,
        c_int: spec.c_int(),
        alpha: None,
    })
}

/// alpha = beta^2 R/(pi Z_J) for an ohmic slope J = R omega.
pub fn kondo_alpha(params: &SpinBosonParams, r_fit: f64) -> Result<f64> {
    if !(r_fit >= 0.0) {
        return Err(TransmonError::InvalidParameter { field: "r_fit", value: r_fit });
    }
    Ok(params.beta * params.beta * r_fit / (PI * params.z_j))
}

/// Where the dissipative element sits relative to the transmon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    /// Resistor straight across the ground capacitor.
    DirectResistor,
    /// Resistor behind a coupling capacitor, with a shunt to ground at the transmon side.
    CoupledResistor { coupling: f64, shunt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterTermReport {
    /// Transmon capacitance with the resistor branch open (F).
    pub h_tr_capacitance: f64,
    /// Transmon capacitance with the resistor shorted (F).
    pub h_tr0_capacitance: f64,
    /// Prefactor of Q_int^2 (1/F, i.e. J/C^2).
    pub coefficient: f64,
    /// Sum of coupling capacitances plus shunt (F).
    pub c_env: f64,
}

pub fn counterterm_for(c_j: f64, c_g: f64, topology: Topology) -> CounterTermReport {
    let c_int = series(c_j, c_g);
    match topology {
        Topology::DirectResistor => CounterTermReport {
            h_tr_capacitance: c_j,
            h_tr0_capacitance: c_j + c_g,
            coefficient: 0.5 / c_int,
            c_env: f64::INFINITY,
        },
        Topology::CoupledResistor { coupling, shunt } => {
            let beta = c_g / (c_j + c_g);
            let open = c_j + series(c_g, shunt);
            let shorted = c_j + series(c_g, shunt + coupling);
            let coefficient = (0.5 / open - 0.5 / shorted) / (beta * beta);
            CounterTermReport {
                h_tr_capacitance: open,
                h_tr0_capacitance: shorted,
                coefficient: coefficient.max(0.0),
                c_env: coupling + shunt,
            }
        }
    }
}

/// Counter-term for a circuit: the resonator couplings act as the coupling capacitor.
pub fn counterterm_report(spec: &CircuitSpec) -> CounterTermReport {
    counterterm_for(
        spec.c_j,
        spec.c_g,
        Topology::CoupledResistor { coupling: spec.coupling_total(), shunt: spec.c_shunt },
    )
}
