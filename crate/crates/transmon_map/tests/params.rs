use std::f64::consts::PI;

use circuit_core::constants::{resistance_quantum, E_CHARGE, HBAR, PLANCK};
use circuit_core::{CircuitSpec, ResonatorSpec};
use transmon_map::*;

const FF: f64 = 1e-15;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn spec_with(c_j: f64, c_g: f64, e_j: f64, c_shunt: f64, couplings: &[f64]) -> CircuitSpec {
    let res = couplings
        .iter()
        .map(|&cc| ResonatorSpec::from_resonance(2.0 * PI * 7e9, 113.0, 2200.0, cc).unwrap())
        .collect();
    CircuitSpec::new(c_j, c_g, e_j, c_shunt, res, None).unwrap()
}

#[test]
fn coupling_charge_hand_value() {
    let q0 = coupling_charge(1.0 / 2f64.sqrt(), 200.0);
    let hand = (1.0 / 2f64.sqrt()) * (resistance_quantum() / (PI * 200.0)).sqrt();
    assert!(rel(q0 / (2.0 * E_CHARGE), hand) < 1e-14);
    assert!((q0 / (2.0 * E_CHARGE) - 2.266).abs() < 1e-3);
}

#[test]
fn seven_gigahertz_qubit() {
    // E_C/h = 350 MHz, E_J/E_C = 50. With no environment C_g0 = 0 and C_T = C_J.
    let e_c = PLANCK * 350e6;
    let c_t = E_CHARGE * E_CHARGE / (2.0 * e_c);
    let c_g = 3.0 * c_t;
    let spec = CircuitSpec::new(c_t, c_g, 50.0 * e_c, 0.0, vec![], None).unwrap();
    let p = derive_params(&spec, &TransmonOptions::default()).unwrap();
    assert!(rel(p.delta / (2.0 * PI), 7.0e9) < 1e-12);
    assert!(rel(p.anharmonicity / (2.0 * PI), 350e6) < 1e-12);
    assert!(rel(p.ej_over_ec(), 50.0) < 1e-12);
}

#[test]
fn environment_renormalises_ground_capacitance() {
    let e_j = PLANCK * 20e9;
    let mut last_cg0 = 0.0;
    let mut last_delta = f64::INFINITY;
    for c_shunt in [1.0, 10.0, 100.0, 1e3, 1e5] {
        let spec = spec_with(70.0 * FF, 170.0 * FF, e_j, c_shunt * FF, &[0.5 * FF, 0.3 * FF]);
        let p = derive_params(&spec, &TransmonOptions::default()).unwrap();
        assert!(p.c_g0 > last_cg0 && p.delta < last_delta);
        last_cg0 = p.c_g0;
        last_delta = p.delta;
        // beta uses the bare C_g, E_C the renormalised one
        assert!(rel(p.beta, 170.0 / 240.0) < 1e-14);
        assert!(rel(p.e_c, E_CHARGE * E_CHARGE / (2.0 * (70.0 * FF + p.c_g0))) < 1e-14);
    }
    assert!(rel(last_cg0, 170.0 * FF) < 1e-2);
    let huge = spec_with(70.0 * FF, 170.0 * FF, e_j, 1.0, &[]);
    let p = derive_params(&huge, &TransmonOptions::default()).unwrap();
    assert!(rel(p.c_g0, 170.0 * FF) < 1e-12);
}

#[test]
fn impedance_and_charge_are_consistent() {
    let spec = spec_with(70.0 * FF, 170.0 * FF, PLANCK * 25e9, 30.0 * FF, &[0.5 * FF]);
    let p = derive_params(&spec, &TransmonOptions::default()).unwrap();
    // Z_J = 1/(C_T Delta) in the leading-order transmon
    assert!(rel(p.z_j, 1.0 / (p.c_t * p.delta)) < 1e-12);
    // q0^2/4 = beta^2 e^2 R_Q/(pi Z_J)
    let rhs = p.beta * p.beta * E_CHARGE * E_CHARGE * resistance_quantum() / (PI * p.z_j);
    assert!(rel(p.transverse_element_sq(), rhs) < 1e-12);
    assert!(rel(p.q0 * p.q0, 2.0 * HBAR * p.beta * p.beta / p.z_j) < 1e-12);
}

#[test]
fn rejects_charge_regime() {
    let spec = spec_with(70.0 * FF, 170.0 * FF, PLANCK * 1e9, 30.0 * FF, &[]);
    match derive_params(&spec, &TransmonOptions::default()) {
        Err(TransmonError::NotTransmon { ratio, .. }) => assert!(ratio < 20.0),
        other => panic!("{other:?}"),
    }
    let lax = TransmonOptions { min_ej_over_ec: 1.0 };
    assert!(derive_params(&spec, &lax).is_ok());
}

#[test]
fn kondo_alpha_values() {
    let p = SpinBosonParams::from_impedance(200.0, 1.0 / 2f64.sqrt(), 2.0 * PI * 7e9, 50.0 * FF).unwrap();
    assert_eq!(kondo_alpha(&p, 0.0).unwrap(), 0.0);
    assert!(rel(kondo_alpha(&p, 200.0).unwrap(), 0.5 / PI) < 1e-14);
    assert!(kondo_alpha(&p, -1.0).is_err());
    let scaled = SpinBosonParams { z_j: 3.0 * p.z_j, ..p };
    assert!(rel(kondo_alpha(&scaled, 600.0).unwrap(), kondo_alpha(&p, 200.0).unwrap()) < 1e-14);
}

#[test]
fn from_impedance_round_trips() {
    let p = SpinBosonParams::from_impedance(200.0, 0.7, 2.0 * PI * 7e9, 50.0 * FF).unwrap();
    assert!(rel(junction_impedance(p.e_c, p.e_j), 200.0) < 1e-12);
    assert!(rel((8.0 * p.e_j * p.e_c).sqrt() / HBAR, p.delta) < 1e-12);
    assert!(SpinBosonParams::from_impedance(200.0, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn counterterm_direct_resistor() {
    let (c_j, c_g) = (70.0 * FF, 170.0 * FF);
    let r = counterterm_for(c_j, c_g, Topology::DirectResistor);
    let c_int = c_j * c_g / (c_j + c_g);
    assert!(rel(r.coefficient, 0.5 / c_int) < 1e-14);
    assert_eq!(r.h_tr_capacitance, c_j);
    assert_eq!(r.h_tr0_capacitance, c_j + c_g);
}

#[test]
fn counterterm_coupled_resistor_limits() {
    let (c_j, c_g) = (70.0 * FF, 170.0 * FF);
    let c_int = c_j * c_g / (c_j + c_g);
    // no shunt: (C_c/(C_c + C_int)) / (2 C_int)
    for c_c in [0.1, 1.0, 10.0, 100.0, 1e4] {
        let c_c = c_c * FF;
        let r = counterterm_for(c_j, c_g, Topology::CoupledResistor { coupling: c_c, shunt: 0.0 });
        let closed = c_c / (c_c + c_int) / (2.0 * c_int);
        assert!(rel(r.coefficient, closed) < 1e-10, "{c_c}");
    }
    let wire = counterterm_for(c_j, c_g, Topology::CoupledResistor { coupling: f64::INFINITY, shunt: 0.0 });
    assert!(rel(wire.coefficient, 0.5 / c_int) < 1e-12);
    let open = counterterm_for(c_j, c_g, Topology::CoupledResistor { coupling: 0.0, shunt: 20.0 * FF });
    assert_eq!(open.coefficient, 0.0);
    // monotone in C_c
    let mut last = 0.0;
    for k in 0..60 {
        let c_c = 1e-18 * 1.4f64.powi(k);
        let r = counterterm_for(c_j, c_g, Topology::CoupledResistor { coupling: c_c, shunt: 20.0 * FF });
        assert!(r.coefficient >= last);
        last = r.coefficient;
    }
}

#[test]
fn counterterm_report_environment() {
    let spec = spec_with(70.0 * FF, 170.0 * FF, PLANCK * 25e9, 30.0 * FF, &[0.5 * FF, 0.25 * FF]);
    let r = counterterm_report(&spec);
    assert!(rel(r.c_env, 30.75 * FF) < 1e-14);
    assert!(r.coefficient >= 0.0);
}
