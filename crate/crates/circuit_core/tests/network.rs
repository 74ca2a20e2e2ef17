use std::f64::consts::PI;

use circuit_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FF: f64 = 1e-15;
const NH: f64 = 1e-9;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn transmon(c_shunt: f64, res: Vec<ResonatorSpec>, cp: Option<Vec<f64>>) -> CircuitSpec {
    CircuitSpec::new(70.0 * FF, 170.0 * FF, 1e-23, c_shunt, res, cp).unwrap()
}

// Hand reduction for one branch: C_c in series with the LCR, all parallel to C + C_int.
fn series_parallel(spec: &CircuitSpec, omega: f64) -> Complex64 {
    let r = spec.resonators[0];
    let i = Complex64::i();
    let z_c = 1.0 / (i * omega * r.coupling);
    let y_lcr = 1.0 / r.resistance + i * omega * r.capacitance + 1.0 / (i * omega * r.inductance);
    let y = i * omega * (spec.c_shunt + spec.c_int()) + 1.0 / (z_c + 1.0 / y_lcr);
    1.0 / y
}

#[test]
fn lcr_at_resonance_is_resistive() {
    let r = ResonatorSpec::new(1.0 * NH, 1e-12, 50.0, 0.0).unwrap();
    let w0 = 1.0 / (r.inductance * r.capacitance).sqrt();
    let z = lcr_branch_impedance(&r, w0).unwrap();
    assert!(rel(z.re, 50.0) < 1e-12);
    assert!(z.im.abs() < 1e-9);
}

#[test]
fn lcr_inductive_limit() {
    let r = ResonatorSpec::new(2.0 * NH, 1e-12, f64::INFINITY, 0.0).unwrap();
    let w = 1e3;
    let z = lcr_branch_impedance(&r, w).unwrap();
    assert!(crel(z, Complex64::new(0.0, w * r.inductance)) < 1e-9);
}

#[test]
fn lcr_matches_expanded_form() {
    // (G - iB)/(G^2 + B^2) with B = (w^2 L C - 1)/(w L)
    let (l, c, rr) = (10.0 * NH, 200.0 * FF, 0.05);
    let w = 2.0 * PI * 5e9;
    let r = ResonatorSpec::new(l, c, rr, 0.0).unwrap();
    let z = lcr_branch_impedance(&r, w).unwrap();
    let g = 1.0 / rr;
    let b = (w * w * l * c - 1.0) / (w * l);
    let d = g * g + b * b;
    assert!(crel(z, Complex64::new(g / d, -b / d)) < 1e-13);
}

#[test]
fn rejects_bad_inputs() {
    let r = ResonatorSpec::new(1.0 * NH, 1e-12, 50.0, 0.0).unwrap();
    assert!(matches!(lcr_branch_impedance(&r, 0.0), Err(CircuitError::NonPositiveFrequency(_))));
    assert!(lcr_branch_impedance(&r, -1.0).is_err());
    assert!(ResonatorSpec::new(-1.0, 1e-12, 1.0, 0.0).is_err());
    assert!(ResonatorSpec::new(1.0, 1e-12, 0.0, 0.0).is_err());
    assert!(ResonatorSpec::new(1.0, 1e-12, 1.0, -1.0).is_err());
    assert!(CircuitSpec::new(1.0, 1.0, 1.0, 0.0, vec![r], Some(vec![0.0, 0.0])).is_err());
}

#[test]
fn decoupled_branch_carries_no_dissipation() {
    let r = ResonatorSpec::new(8.0 * NH, 150.0 * FF, 1e3, 0.0).unwrap();
    let spec = transmon(20.0 * FF, vec![r], None);
    let grid = linear_grid(2.0 * PI * 1e9, 2.0 * PI * 10e9, 200).unwrap();
    let g = network_impedance(&spec, &grid).unwrap();
    assert!(g.z_eff.iter().all(|z| z.re == 0.0));
    assert!(g.j.iter().all(|&j| j == 0.0));
}

#[test]
fn empty_network_is_capacitive() {
    let spec = transmon(20.0 * FF, vec![], None);
    let w = 2.0 * PI * 7e9;
    let z = effective_impedance(&spec, w).unwrap();
    assert_eq!(z.re, 0.0);
    assert!(rel(z.im, -1.0 / (w * (20.0 * FF + spec.c_int()))) < 1e-14);
}

#[test]
fn single_branch_matches_series_parallel_reduction() {
    let r = ResonatorSpec::new(8.0 * NH, 150.0 * FF, 2e4, 0.7 * FF).unwrap();
    let spec = transmon(20.0 * FF, vec![r], None);
    for k in 1..400 {
        let w = 2.0 * PI * (4.0e9 + 5e6 * k as f64);
        let z = effective_impedance(&spec, w).unwrap();
        assert!(crel(z, series_parallel(&spec, w)) < 1e-12, "k={k}");
    }
}

#[test]
fn oracle_dual_path() {
    let (l, c, r) = (8.0 * NH, 150.0 * FF, 0.1);
    let w = 2.0 * PI * 4.6e9;
    let o = single_resonator_oracle(l, c, r, w).unwrap();
    let z = parallel_lcr(l, c, r, w).unwrap();
    assert!(rel(o.re_z, z.re) < 1e-12);
}

#[test]
fn oracle_limits() {
    let (l, c, r) = (8.0 * NH, 150.0 * FF, 300.0);
    let o = single_resonator_oracle(l, c, r, 1.0).unwrap();
    assert!(o.a.norm() < 1e-9 && o.re_z < 1e-9);
    let w1 = 1.0 / (l * c).sqrt();
    let o = single_resonator_oracle(l, c, r, w1).unwrap();
    assert!(rel(o.re_z, r) < 1e-12);
    assert!(matches!(
        single_resonator_oracle(1.0, 1.0, f64::INFINITY, 1.0),
        Err(CircuitError::Divergent { .. })
    ));
}

// Reciprocity: island current driven from the qubit node is scaled by
// C_c/(C_c + C_q), so Re Z_eff = k^2 Re Z_island with the island seeing
// C_i + series(C_c, C_q).
#[test]
fn network_matches_single_resonator_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let l = rng.gen_range(2.0..20.0) * NH;
        let c = rng.gen_range(50.0..400.0) * FF;
        let cc = rng.gen_range(0.1..5.0) * FF;
        let rr = rng.gen_range(1e3..1e6);
        let r = ResonatorSpec::new(l, c, rr, cc).unwrap();
        let spec = transmon(rng.gen_range(0.0..100.0) * FF, vec![r], None);
        let cq = spec.c_shunt + spec.c_int();
        let k = cc / (cc + cq);
        let w0 = r.resonance();
        for j in 0..200 {
            let w = w0 * (0.8 + 0.4 * j as f64 / 199.0);
            let z = effective_impedance(&spec, w).unwrap();
            let o = single_resonator_oracle(l, c + series(cc, cq), rr, w).unwrap();
            assert!(rel(z.re, k * k * o.re_z) < 1e-9);
        }
    }
}

fn random_ring(rng: &mut ChaCha8Rng, n: usize) -> CircuitSpec {
    let res = (0..n)
        .map(|_| {
            let w = 2.0 * PI * rng.gen_range(6.9e9..7.1e9);
            ResonatorSpec::from_resonance(w, 113.0, 2200.0, rng.gen_range(0.0..0.5) * FF).unwrap()
        })
        .collect();
    let cp = (0..n).map(|_| rng.gen_range(0.0..2.0) * FF).collect();
    transmon(rng.gen_range(0.0..50.0) * FF, res, Some(cp))
}

#[test]
fn admittance_matrix_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2, 3, 8] {
        let spec = random_ring(&mut rng, n);
        let a = admittance_matrix(&spec, 2.0 * PI * 7e9).unwrap();
        assert_eq!(a, a.transpose());
    }
}

#[test]
fn passivity_on_random_rings() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = linear_grid(2.0 * PI * 6.8e9, 2.0 * PI * 7.2e9, 300).unwrap();
    for n in [2, 5, 12] {
        let spec = random_ring(&mut rng, n);
        let g = network_impedance(&spec, &grid).unwrap();
        for z in &g.z_eff {
            assert!(z.re >= -1e-9 * z.norm());
        }
    }
}

#[test]
fn lossless_limit_removes_off_resonant_dissipation() {
    let res: Vec<_> = (0..4)
        .map(|i| ResonatorSpec::from_resonance(2.0 * PI * (7.0e9 + 1e7 * i as f64), 113.0, 2200.0, 0.4 * FF).unwrap())
        .collect();
    let lossy = transmon(20.0 * FF, res.clone(), None);
    let lossless: Vec<_> = res.iter().map(|r| ResonatorSpec { resistance: f64::INFINITY, ..*r }).collect();
    let lossless = transmon(20.0 * FF, lossless, None);
    // band between the first two poles
    let grid = linear_grid(2.0 * PI * 7.002e9, 2.0 * PI * 7.008e9, 500).unwrap();
    let a = network_impedance(&lossy, &grid).unwrap();
    let b = network_impedance(&lossless, &grid).unwrap();
    let ia: f64 = a.z_eff.iter().map(|z| z.re).sum();
    let ib: f64 = b.z_eff.iter().map(|z| z.re.abs()).sum();
    assert!(ia > 0.0);
    assert!(ib < 1e-6 * ia);
}

#[test]
fn parasitic_zero_equals_decoupled_and_is_continuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = random_ring(&mut rng, 6).with_uniform_parasitics(0.0);
    let w = 2.0 * PI * 7.0e9;
    // with no ring, each branch adds independently
    let i = Complex64::i();
    let mut y = i * w * (base.c_shunt + base.c_int());
    for r in &base.resonators {
        let zc = 1.0 / (i * w * r.coupling);
        let zl = lcr_branch_impedance(r, w).unwrap();
        y += 1.0 / (zc + zl);
    }
    let z0 = effective_impedance(&base, w).unwrap();
    assert!(crel(z0, 1.0 / y) < 1e-12);
    let zs = effective_impedance(&base.with_uniform_parasitics(1e-24), w).unwrap();
    assert!(crel(zs, z0) < 1e-6);
}

#[test]
fn isolated_lossless_island_is_dropped() {
    // island 2 has no coupling and no ring links; at its pole the full matrix is singular
    let a = ResonatorSpec::new(8.0 * NH, 150.0 * FF, 1e4, 0.5 * FF).unwrap();
    let b = ResonatorSpec::new(1.0, 1.0, f64::INFINITY, 0.0).unwrap();
    let spec = transmon(20.0 * FF, vec![a, b], None);
    let only_a = transmon(20.0 * FF, vec![a], None);
    let z = effective_impedance(&spec, 1.0).unwrap();
    assert!(crel(z, effective_impedance(&only_a, 1.0).unwrap()) < 1e-14);
}

#[test]
fn singular_matrix_reports_frequency() {
    let r = ResonatorSpec::new(1.0, 0.5, f64::INFINITY, 0.5).unwrap();
    let spec = CircuitSpec::new(1.0, 1.0, 1.0, 0.0, vec![r], None).unwrap();
    assert_eq!(bath_admittance(&spec, 1.0), Err(CircuitError::SingularMatrix { omega: 1.0 }));
}

#[test]
fn grid_helpers() {
    assert!(linear_grid(1.0, 1.0, 10).is_err());
    assert!(linear_grid(0.0, 1.0, 1).is_err());
    let g = linear_grid(1.0, 2.0, 11).unwrap();
    assert_eq!(g[10], 2.0);
    let sg = SpectralGrid::from_spectral_density(g.clone(), g.iter().map(|w| 3.0 * w).collect()).unwrap();
    assert!(rel(sg.interpolate_j(1.55).unwrap(), 4.65) < 1e-12);
    assert!(sg.interpolate_j(0.5).is_none());
    assert!(rel(sg.integrate_j(), 1.5 * 3.0) < 1e-12);
    assert!(SpectralGrid::from_spectral_density(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    assert!(rel(circuit_core::constants::resistance_quantum(), 6453.2) < 1e-4);
}
