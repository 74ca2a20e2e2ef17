use std::f64::consts::PI;

use dynamics::*;
use num_complex::Complex64;
use rotating_frame::DriveSpec;
use transmon_map::SpinBosonParams;

const MHZ: f64 = 2.0 * PI * 1e6;

fn grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect()
}

fn tight() -> SimOptions {
    SimOptions { rtol: 1e-11, atol: 1e-13, ..SimOptions::default() }
}

fn one_mode(omega: f64, coupling: f64, gamma: f64, n_max: usize) -> ModeSet {
    ModeSet::new(vec![ModeSpec::new(omega, coupling, gamma, n_max).unwrap()]).unwrap()
}

#[test]
fn free_evolution_is_cosine() {
    let delta = 5.0 * MHZ;
    let times = grid(1e-6, 201);
    let modes = one_mode(3.0 * MHZ, 0.0, 0.0, 2);
    let r = evolve_effective(&modes, delta, &InitialCondition::vacuum(QubitInit::PlusX), &times, &tight()).unwrap();
    let err = times.iter().zip(&r.sx).map(|(t, p)| (p - (delta * t).cos()).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
    let r = evolve_effective(&ModeSet::empty(), delta, &InitialCondition::vacuum(QubitInit::Excited), &times, &tight()).unwrap();
    assert!(r.sz.iter().all(|z| (z - 1.0).abs() < 1e-9));
}

#[test]
fn vacuum_rabi_matches_single_excitation_sector() {
    let delta = 5.0 * MHZ;
    let coupling = 2.0 * PI * 20e3;
    let lam = 0.5 * coupling;
    let times = grid(PI / lam, 101);
    let r = evolve_effective(&one_mode(delta, coupling, 0.0, 3), delta, &InitialCondition::vacuum(QubitInit::Excited), &times, &tight()).unwrap();
    // {|e,0>, |g,1>} block [[D/2, lam], [lam, w - D/2]] on resonance: P_e = cos^2(lam t)
    let err = times
        .iter()
        .zip(&r.sz)
        .map(|(t, z)| (0.5 * (1.0 + z) - (lam * t).cos().powi(2)).abs())
        .fold(0.0, f64::max);
    assert!(err < 5e-3, "{err}");
    // and with detuning
    let w = delta + 2.0 * lam;
    let r = evolve_effective(&one_mode(w, coupling, 0.0, 3), delta, &InitialCondition::vacuum(QubitInit::Excited), &times, &tight()).unwrap();
    let d = w - delta;
    let om = (lam * lam + 0.25 * d * d).sqrt();
    let err = times
        .iter()
        .zip(&r.sz)
        .map(|(t, z)| (0.5 * (1.0 + z) - (1.0 - (lam / om).powi(2) * (om * t).sin().powi(2))).abs())
        .fold(0.0, f64::max);
    assert!(err < 5e-3, "{err}");
}

#[test]
fn sign_flip_symmetry() {
    let modes = ModeSet::new(vec![
        ModeSpec::new(4.0 * MHZ, 3.0 * MHZ, 0.0, 4).unwrap(),
        ModeSpec::new(9.0 * MHZ, 2.0 * MHZ, 0.0, 4).unwrap(),
    ])
    .unwrap();
    let times = grid(0.5e-6, 51);
    let p = evolve_effective(&modes, 5.0 * MHZ, &InitialCondition::vacuum(QubitInit::PlusX), &times, &SimOptions::default()).unwrap();
    let m = evolve_effective(&modes, 5.0 * MHZ, &InitialCondition::vacuum(QubitInit::MinusX), &times, &SimOptions::default()).unwrap();
    let err = p.sx.iter().zip(&m.sx).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
    assert!(p.sx.iter().any(|v| (v - p.sx[0]).abs() > 0.1));
}

#[test]
fn energy_and_norm_conserved() {
    let modes = ModeSet::new(vec![
        ModeSpec::new(4.0 * MHZ, 3.0 * MHZ, 0.0, 5).unwrap(),
        ModeSpec::new(7.0 * MHZ, 2.0 * MHZ, 0.0, 5).unwrap(),
    ])
    .unwrap();
    let delta = 5.0 * MHZ;
    let ham = effective_hamiltonian(&modes, delta, 1 << 20).unwrap();
    let basis = &ham.basis;
    let mut psi = vec![Complex64::new(0.0, 0.0); ham.dim()];
    psi[0] = Complex64::new(0.6, 0.0);
    psi[basis.bath_dim + 1] = Complex64::new(0.0, 0.8);
    let e0 = ham.energy(0.0, &psi);
    let times = grid(1e-6, 21);
    let mut worst: f64 = 0.0;
    let mut norm: f64 = 0.0;
    propagate_effective_states(&ham, psi, 0.0, &times, &tight(), |_, _, y| {
        worst = worst.max((ham.energy(0.0, y) - e0).abs() / delta);
        norm = norm.max((y.iter().map(|v| v.norm_sqr()).sum::<f64>() - 1.0).abs());
        Ok(())
    })
    .unwrap();
    assert!(worst < 1e-8, "{worst}");
    assert!(norm < 1e-9, "{norm}");
}

#[test]
fn hamiltonian_is_hermitian() {
    let modes = one_mode(3.0, 0.7, 0.0, 3);
    let h = effective_hamiltonian(&modes, 1.3, 100).unwrap().dense(0.4);
    assert!((&h - h.adjoint()).norm() < 1e-14);
    assert_eq!(h.nrows(), 8);
}

#[test]
fn density_path_conserves_trace_and_matches_state_vector() {
    let delta = 5.0 * MHZ;
    let times = grid(0.4e-6, 41);
    let init = InitialCondition::vacuum(QubitInit::PlusX);
    let opts = SimOptions::default();
    let sv = evolve_effective(&one_mode(6.0 * MHZ, 2.0 * MHZ, 0.0, 4), delta, &init, &times, &opts).unwrap();
    let dm = evolve_effective(&one_mode(6.0 * MHZ, 2.0 * MHZ, 1e-9, 4), delta, &init, &times, &opts).unwrap();
    assert!(matches!(dm.propagation, Propagation::DensityMatrix { .. }));
    let err = sv.sx.iter().zip(&dm.sx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    let damped = evolve_effective(&one_mode(6.0 * MHZ, 2.0 * MHZ, 1.0 * MHZ, 4), delta, &init, &times, &opts).unwrap();
    assert!(damped.norm_deviation.iter().all(|d| *d < 1e-8));
    assert!(damped.occupations.iter().flatten().all(|n| *n >= -1e-12));
    assert!(damped.sx.iter().chain(&damped.sz).all(|v| v.abs() <= 1.0 + 1e-9));
}

#[test]
fn amplitude_damping_relaxes_the_mode() {
    let times = grid(2e-6, 21);
    let gamma = 2.0 * MHZ;
    // qubit far detuned: photon number decays as exp(-gamma t)
    let modes = one_mode(3.0 * MHZ, 0.0, gamma, 8);
    let init = InitialCondition::new(QubitInit::Ground, BathInit::Thermal { temperature: 0.1e-3 });
    let opts = SimOptions { eps_trunc: 1e-2, ..SimOptions::default() };
    let r = evolve_effective(&modes, 5.0 * MHZ, &init, &times, &opts).unwrap();
    let n0 = r.occupations[0][0];
    assert!(n0 > 0.01);
    for (t, occ) in times.iter().zip(&r.occupations) {
        assert!((occ[0] - n0 * (-gamma * t).exp()).abs() < 1e-6 * n0.max(1.0), "{t}");
    }
}

#[test]
fn thermal_initialisation() {
    let w = 3.0 * MHZ;
    let temperature = 0.3e-3;
    let nbar = 1.0 / (circuit_core::constants::HBAR * w / (circuit_core::constants::K_B * temperature)).exp_m1();
    let times = [0.0];
    let init = InitialCondition::new(QubitInit::PlusX, BathInit::Thermal { temperature });
    let opts = SimOptions { eps_trunc: 1.0, ..SimOptions::default() };
    let nmax = 40;
    let dm = evolve_effective(&one_mode(w, 0.0, 1e-9, nmax), 5.0 * MHZ, &init, &times, &SimOptions { density_dim_cap: 200, ..opts }).unwrap();
    assert!((dm.occupations[0][0] - nbar).abs() < 1e-3 * nbar, "{} {nbar}", dm.occupations[0][0]);
    let sampled = evolve_effective(&one_mode(w, 0.0, 0.0, nmax), 5.0 * MHZ, &init, &times, &SimOptions { thermal_samples: 400, ..opts }).unwrap();
    assert_eq!(sampled.propagation, Propagation::Sampled { samples: 400 });
    // sample mean of |z|^2 has standard error nbar / sqrt(400)
    assert!((sampled.occupations[0][0] - nbar).abs() < 4.0 * nbar / 20.0, "{} {nbar}", sampled.occupations[0][0]);
    let again = evolve_effective(&one_mode(w, 0.0, 0.0, nmax), 5.0 * MHZ, &init, &times, &SimOptions { thermal_samples: 400, ..opts }).unwrap();
    assert_eq!(sampled, again);
}

#[test]
fn equilibrated_and_displaced_baths() {
    let w = 4.0 * MHZ;
    let g = 2.0 * MHZ;
    let modes = one_mode(w, g, 0.0, 6);
    let times = [0.0, 1e-8];
    let eq = evolve_effective(&modes, 1.0 * MHZ, &InitialCondition::new(QubitInit::PlusX, BathInit::Equilibrated), &times, &SimOptions::default()).unwrap();
    let expect = (0.5 * g / w).powi(2);
    assert!((eq.occupations[0][0] - expect).abs() < 1e-6, "{}", eq.occupations[0][0]);
    let amplitude = 200.0 * MHZ;
    let disp = InitialCondition::new(QubitInit::PlusX, BathInit::Displaced { amplitude, duration: 1e-6 });
    let r = evolve_effective(&modes, 1.0 * MHZ, &disp, &times, &SimOptions::default()).unwrap();
    assert!(r.sx[0] > 0.99, "{}", r.sx[0]);
    // the bath oscillates about the displaced minimum: 0 <= <n> <= 4 x equilibrium
    assert!(r.occupations[0][0] <= 4.0 * expect + 1e-3, "{}", r.occupations[0][0]);
}

#[test]
fn leakage_monitor_and_retry() {
    let modes = one_mode(2.0 * MHZ, 3.0 * MHZ, 0.0, 2);
    let times = grid(0.3e-6, 31);
    let init = InitialCondition::vacuum(QubitInit::PlusX);
    let strict = SimOptions { retries: 0, ..SimOptions::default() };
    match evolve_effective(&modes, 5.0 * MHZ, &init, &times, &strict) {
        Err(DynamicsError::TruncationLeakage { mode: 0, time, .. }) => assert!(time > 0.0),
        other => panic!("{other:?}"),
    }
    let lenient = SimOptions { retries: 6, ..SimOptions::default() };
    let r = evolve_effective(&modes, 5.0 * MHZ, &init, &times, &lenient).unwrap();
    assert!(r.n_max[0] > 2);
    assert!(r.leakage.iter().all(|l| *l <= lenient.eps_trunc));
}

#[test]
fn dimension_cap_enforced() {
    let modes = ModeSet::new(vec![ModeSpec::new(1.0, 0.1, 0.0, 9).unwrap(); 6]).unwrap();
    let opts = SimOptions { dim_cap: 1000, ..SimOptions::default() };
    let err = evolve_effective(&modes, 1.0, &InitialCondition::vacuum(QubitInit::PlusX), &[0.0, 1.0], &opts).unwrap_err();
    assert!(matches!(err, DynamicsError::DimensionCap { .. }));
    assert!(ModeSpec::new(1.0, 0.1, 0.0, 1).is_err());
    assert!(ModeSpec::new(1.0, 0.1, -1.0, 3).is_err());
}

#[test]
fn deterministic_fingerprint() {
    let modes = one_mode(4.0 * MHZ, 1.0 * MHZ, 0.0, 3);
    let times = grid(1e-7, 11);
    let init = InitialCondition::vacuum(QubitInit::PlusX);
    let a = evolve_effective(&modes, 5.0 * MHZ, &init, &times, &SimOptions::default()).unwrap();
    let b = evolve_effective(&modes, 5.0 * MHZ, &init, &times, &SimOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.fingerprint.len(), 64);
    let c = evolve_effective(&modes, 5.1 * MHZ, &init, &times, &SimOptions::default()).unwrap();
    assert_ne!(a.fingerprint, c.fingerprint);
}

#[test]
fn golden_rule_limits() {
    assert_eq!(golden_rule_oracle(&one_mode(1.0, 0.0, 0.3, 2), 1.0), 0.0);
    let r = golden_rule_oracle(&one_mode(2.0, 0.1, 0.4, 2), 2.0);
    assert!((r - 0.01 / 0.4).abs() < 1e-15);
    let off = golden_rule_oracle(&one_mode(3.0, 0.1, 0.4, 2), 2.0);
    assert!((off - 0.01 * 0.4 / (0.16 + 4.0)).abs() < 1e-15);
}

#[test]
fn decay_fit_recovers_rate() {
    let t = grid(10.0, 101);
    let p: Vec<f64> = t.iter().map(|t| 0.7 * (-0.3 * t).exp()).collect();
    assert!((fit_decay_rate(&t, &p, 1.0, 1e-12).unwrap() - 0.3).abs() < 1e-12);
    assert!(fit_decay_rate(&t, &p, 20.0, 0.0).is_err());
}

#[test]
fn weak_coupling_decay_follows_golden_rule() {
    let delta = 5.0 * MHZ;
    let gamma = 1.0 * MHZ;
    let modes = one_mode(delta, 0.2 * gamma, gamma, 3);
    let oracle = golden_rule_oracle(&modes, delta);
    let t_end = 4.0 / gamma + 1.5 / oracle;
    let times = grid(t_end, 200);
    let r = evolve_effective(&modes, delta, &InitialCondition::vacuum(QubitInit::Excited), &times, &SimOptions { density_tol: 1e-5, ..SimOptions::default() }).unwrap();
    let pe: Vec<f64> = r.sz.iter().map(|z| 0.5 * (1.0 + z)).collect();
    let rate = fit_decay_rate(&times, &pe, 4.0 / gamma, 1e-6).unwrap();
    assert!((rate / oracle - 1.0).abs() < 0.15, "{rate} {oracle}");
}

#[test]
fn dressed_basis_calibration() {
    let drive = DriveSpec::resonant(2.0 * PI * 7e9, 80.0 * MHZ, 10.0 * MHZ).unwrap();
    let setup = LabSetup::calibrated(350.0 * MHZ, &drive).unwrap();
    let [a, b] = setup.dressed.vectors;
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    assert!(dot.abs() < 1e-12);
    assert!((a[0].abs() - a[1].abs()).abs() < 1e-9);
    assert!(setup.dressed.splitting() > 0.9 * drive.rabi1 && setup.dressed.splitting() < 1.1 * drive.rabi1);
    assert!((setup.omega1 - setup.omega2 - setup.dressed.splitting()).abs() < 1e-3);
    assert!(setup.rabi2 > 0.0 && (setup.rabi2 / drive.rabi2 - 1.0).abs() < 0.2);
    // large anharmonicity approaches the two-level result
    let two = LabSetup::calibrated(1e6 * MHZ, &drive).unwrap();
    assert!((two.dressed.splitting() / drive.rabi1 - 1.0).abs() < 1e-4);
    assert!((two.delta - drive.omega1).abs() < 1e-4 * drive.rabi1);
    assert!((two.rabi2 / drive.rabi2 - 1.0).abs() < 1e-4);
}

#[test]
fn short_frame_comparison() {
    let drive = DriveSpec::resonant(2.0 * PI * 7e9, 80.0 * MHZ, 10.0 * MHZ).unwrap();
    let setup = LabSetup::calibrated(350.0 * MHZ, &drive).unwrap();
    let lab = one_mode(drive.omega1 + 20.0 * MHZ, 5.0 * MHZ, 0.0, 3);
    let eff = setup.effective_modes(&lab).unwrap();
    assert!((eff.modes[0].omega - 20.0 * MHZ).abs() < 1e-3);
    assert!((eff.modes[0].coupling - 2.5 * MHZ).abs() < 1e-6);
    let times = grid(20e-9, 11);
    let cmp = frame_comparison(&lab, &setup, QubitInit::PlusX, &times, 0.0, &SimOptions::default()).unwrap();
    assert!(cmp.distance[0] < 1e-12);
    assert!(cmp.mean_distance < 0.1, "{}", cmp.mean_distance);
    assert!(cmp.c1 > 0.0 && cmp.scale > 0.0);
}

#[test]
fn trace_distance_helper() {
    let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let b = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    assert!((pure_trace_distance(&a, &a)).abs() < 1e-15);
    assert!((pure_trace_distance(&a, &b) - 1.0).abs() < 1e-15);
}

#[test]
fn neglected_terms() {
    let w1 = 2.0 * PI * 7e9;
    let params = SpinBosonParams::from_impedance(200.0, std::f64::consts::FRAC_1_SQRT_2, w1, 50e-15).unwrap();
    let modes = one_mode(w1 + 20.0 * MHZ, 5.0 * MHZ, 0.0, 2);
    let none = DriveSpec::resonant(w1, 80.0 * MHZ, 0.0).unwrap();
    assert_eq!(neglected_term_norm(&modes, &params, &none, 0.0).o2_drive, 0.0);
    let drive = DriveSpec::resonant(w1, 80.0 * MHZ, 10.0 * MHZ).unwrap();
    let n = neglected_term_norm(&modes, &params, &drive, 0.03);
    assert!(n.o1 < 0.05 && n.o2_drive < 0.05 && n.o2_detuning < 0.05, "{n:?}");
    assert_eq!(n.o3, 0.03);
    assert!(DriveSpec::new(w1, 80.0 * MHZ, w1, 1.0 * MHZ).is_err());
}

#[test]
fn classification_rules() {
    let t = grid(1.0, 201);
    let opts = ClassifyOptions::default();
    let osc: Vec<f64> = t.iter().map(|t| (20.0 * t).cos() * (-t).exp()).collect();
    assert_eq!(classify(&t, &osc, &opts).regime, Regime::DampedOscillations);
    let zero: Vec<f64> = t.iter().map(|t| (-20.0 * t).exp()).collect();
    assert_eq!(classify(&t, &zero, &opts).regime, Regime::OverdampedToZero);
    let slow: Vec<f64> = t.iter().map(|t| (-2.0 * t).exp()).collect();
    assert_eq!(classify(&t, &slow, &opts).regime, Regime::IncoherentRelaxation);
    let flat: Vec<f64> = t.iter().map(|t| 0.8 + 0.2 * (-30.0 * t).exp()).collect();
    let c = classify(&t, &flat, &opts);
    assert_eq!(c.regime, Regime::Plateau);
    assert!(c.plateau > 0.8);
    let once: Vec<f64> = t.iter().map(|t| 1.0 - 1.5 * t).collect();
    assert_eq!(classify(&t, &once, &opts).regime, Regime::Ambiguous);
    // small wiggles around zero are not sign changes
    let noise: Vec<f64> = t.iter().map(|t| 0.01 * (200.0 * t).sin()).collect();
    assert_eq!(prominent_sign_changes(&noise, 0.05), 0);
}

#[test]
fn ohmic_discretisation() {
    assert_eq!(poisson_quantile(0.0, 0.99), 0);
    assert_eq!(poisson_quantile(1.0, 0.5), 1);
    assert_eq!(poisson_quantile(1.0, 0.99), 4);
    let m = ohmic_modes(0.5, 50.0 * MHZ, 10, 1e-2).unwrap();
    assert_eq!(m.len(), 10);
    let dw = 5.0 * MHZ;
    // sum of coupling^2 reproduces 2 alpha * integral of w dw over the grid
    let s: f64 = m.modes.iter().map(|x| x.coupling * x.coupling).sum();
    assert!((s - 2.0 * 0.5 * dw * dw * 55.0).abs() < 1e-6 * s);
    assert!(m.modes.iter().all(|x| x.n_max >= 2));
}
