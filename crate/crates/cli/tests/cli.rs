use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spinbath::config::RunConfig;
use spinbath::error::CliError;
use spinbath::units::{format, parse, Kind};

fn shipped_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/ladder.toml")
}

fn shipped_text() -> String {
    fs::read_to_string(shipped_path()).unwrap()
}

fn spinbath(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbath"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unit_table() {
    let two_pi = 2.0 * PI;
    let cases: &[(&str, Kind, f64)] = &[
        ("1 GHz", Kind::Frequency, two_pi * 1e9),
        ("2.5MHz", Kind::Frequency, two_pi * 2.5e6),
        ("3 kHz", Kind::Frequency, two_pi * 3e3),
        ("4 Hz", Kind::Frequency, two_pi * 4.0),
        ("1 pF", Kind::Capacitance, 1e-12),
        ("70 fF", Kind::Capacitance, 70e-15),
        ("5 aF", Kind::Capacitance, 5e-18),
        ("2 μH", Kind::Inductance, 2e-6),
        ("2 uH", Kind::Inductance, 2e-6),
        ("10 nH", Kind::Inductance, 10e-9),
        ("300 pH", Kind::Inductance, 300e-12),
        ("113 Ω", Kind::Resistance, 113.0),
        ("113 ohm", Kind::Resistance, 113.0),
        ("2 kΩ", Kind::Resistance, 2e3),
        ("2 kohm", Kind::Resistance, 2e3),
        ("1.5 MΩ", Kind::Resistance, 1.5e6),
        ("1.5 Mohm", Kind::Resistance, 1.5e6),
        ("25 mK", Kind::Temperature, 0.025),
        ("40 μK", Kind::Temperature, 40e-6),
        ("40 uK", Kind::Temperature, 40e-6),
        ("1 K", Kind::Temperature, 1.0),
        ("150 ns", Kind::Time, 150e-9),
        ("2 μs", Kind::Time, 2e-6),
        ("2 us", Kind::Time, 2e-6),
        ("1 ms", Kind::Time, 1e-3),
        ("7 ps", Kind::Time, 7e-12),
        ("1e-6 s", Kind::Time, 1e-6),
    ];
    for &(text, kind, si) in cases {
        let v = parse(text, kind).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!((v - si).abs() <= 1e-12 * si.abs(), "{text}: {v} vs {si}");
    }
}

#[test]
fn unit_format_inverts_parse() {
    for kind in [Kind::Frequency, Kind::Capacitance, Kind::Inductance, Kind::Resistance, Kind::Temperature, Kind::Time] {
        for &(unit, _) in kind.units() {
            let back = parse(&std::format!("0.731 {unit}"), kind).unwrap();
            let again = format(back, kind, unit).unwrap();
            let v: f64 = again.split(' ').next().unwrap().parse().unwrap();
            assert!((v - 0.731).abs() < 1e-12, "{kind:?} {unit}: {again}");
        }
    }
}

#[test]
fn unit_errors() {
    assert!(parse("7", Kind::Frequency).unwrap_err().contains("no unit"));
    assert!(parse("7 fF", Kind::Frequency).unwrap_err().contains("not a frequency unit"));
    assert!(parse("x GHz", Kind::Frequency).unwrap_err().contains("not a number"));
    assert!(parse("NaN GHz", Kind::Frequency).is_err());
}

#[test]
fn shipped_config_parses() {
    let cfg = RunConfig::parse(&shipped_text()).unwrap();
    let ladder = cfg.circuit.as_ref().unwrap().ladder.unwrap();
    assert_eq!(ladder.n, 20);
    assert!((cfg.transmon.unwrap().delta.0 - 2.0 * PI * 7e9).abs() < 1e-3);
}

#[test]
fn unknown_key_reports_path() {
    let text = shipped_text().replace("c_shunt = \"20 fF\"", "c_shunt = \"20 fF\"\nshunt_typo = 3");
    match RunConfig::parse(&text) {
        Err(CliError::Config { key, message }) => {
            assert_eq!(key, "circuit.shunt_typo");
            assert!(message.contains("shunt_typo"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn schema_tag_checked() {
    let text = shipped_text().replace("spinbath/1", "spinbath/0");
    assert!(matches!(RunConfig::parse(&text), Err(CliError::Config { key, .. }) if key == "schema"));
}

#[test]
fn malformed_unit_exits_2_with_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &shipped_text().replace("delta = \"7 GHz\"", "delta = \"7 GHzz\""));
    let o = spinbath(&["impedance"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("transmon.delta"), "{}", stderr(&o));
}

#[test]
fn impedance_csv_and_manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = spinbath(&["impedance"], &shipped_path(), &a);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(a.join("impedance.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "omega_hz,re_z_ohm,im_z_ohm,j_si");
    assert_eq!(csv.lines().count(), 3002);
    let o = spinbath(&["impedance"], &a.join("impedance_manifest.json"), &b);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv, fs::read_to_string(b.join("impedance.csv")).unwrap());
}

#[test]
fn empty_resonator_list_gives_zero_j() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text();
    let start = text.find("[circuit.ladder]").unwrap();
    let end = text.find("[grid]").unwrap();
    let cfg = write_config(dir.path(), &format!("{}{}", &text[..start], &text[end..]));
    let o = spinbath(&["impedance"], &cfg, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("impedance.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let j: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(j, 0.0);
    }
}

#[test]
fn frame_rejects_off_resonant_second_tone() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text().replace("rabi2 = \"10 MHz\"", "rabi2 = \"10 MHz\"\nomega2 = \"6.95 GHz\"");
    let cfg = write_config(dir.path(), &text);
    let o = spinbath(&["frame"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("resonance condition omega1 - omega2 = Omega1"), "{}", stderr(&o));
}

#[test]
fn frame_and_params_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["frame", "params"] {
        let o = spinbath(&[cmd], &shipped_path(), dir.path());
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
    let frame = fs::read_to_string(dir.path().join("frame.csv")).unwrap();
    let alpha: f64 = frame.lines().find(|l| l.starts_with("alpha_eff,")).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((alpha - 1.0).abs() < 0.25, "{alpha}");
    let modes = fs::read_to_string(dir.path().join("frame_modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 21);
}

#[test]
fn budget_failure_is_exit_1_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinbath(&["budget"], &shipped_path(), dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(dir.path().join("budget.csv").exists());
    assert!(dir.path().join("budget_manifest.json").exists());
}

#[test]
fn strict_turns_warnings_into_failures() {
    let dir = tempfile::tempdir().unwrap();
    let text = "schema = \"spinbath/1\"\n\
        [transmon]\nz_j = \"200 Ω\"\nbeta = 0.7\ndelta = \"7 GHz\"\nc_int = \"50 fF\"\n\
        [circuit]\nc_shunt = \"20 fF\"\n\
        [[circuit.resonator]]\ninductance = \"2.5 nH\"\ncapacitance = \"200 fF\"\nresistance = \"250 kΩ\"\ncoupling = \"30 fF\"\n";
    let cfg = write_config(dir.path(), text);
    let o = spinbath(&["params"], &cfg, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    let o = spinbath(&["params", "--strict"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn simulate_is_bitwise_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text().replace("t_final = \"300 ns\"", "t_final = \"60 ns\"").replace("points = 301", "points = 61");
    let cfg = write_config(dir.path(), &text);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = spinbath(&["simulate"], &cfg, out);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let first = fs::read(a.join("simulation.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("simulation.csv")).unwrap());
    let header = String::from_utf8(first).unwrap();
    assert_eq!(header.lines().next().unwrap(), "t_s,sx,sz,n_1,n_2,norm_deviation,leakage");
}

fn synthesis_config() -> String {
    shipped_text()
        .replace("alpha_eff = 0.5", "alpha_eff = 0.05")
        .replace("omega_c = \"42 MHz\"", "omega_c = \"42 MHz\"\nn = 3")
        .replace("bath = \"vacuum\"", "bath = \"vacuum\"\nsource = \"synthesis\"")
        .replace("t_final = \"300 ns\"", "t_final = \"50 ns\"")
        .replace("points = 301", "points = 51")
}

#[test]
fn simulate_without_synthesis_is_dependency_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &synthesis_config());
    let o = spinbath(&["simulate"], &cfg, &dir.path().join("fresh"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("missing upstream artifact") && err.contains("synthesis_modes.csv"), "{err}");
}

#[test]
fn synthesize_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &synthesis_config());
    let o = spinbath(&["synthesize"], &cfg, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let modes = fs::read_to_string(dir.path().join("synthesis_modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 4);
    let o = spinbath(&["simulate"], &cfg, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let sim = fs::read_to_string(dir.path().join("simulation.csv")).unwrap();
    assert_eq!(sim.lines().next().unwrap(), "t_s,sx,sz,n_1,n_2,n_3,norm_deviation,leakage");
}

#[test]
fn dimension_cap_is_numerical_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text().replace("seed = 7", "seed = 7\ndim_cap = 10");
    let cfg = write_config(dir.path(), &text);
    let o = spinbath(&["simulate"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_block_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "schema = \"spinbath/1\"\n");
    let o = spinbath(&["impedance"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'transmon'"), "{}", stderr(&o));
}

#[test]
fn validate_shipped_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinbath(&["validate"], &shipped_path(), dir.path());
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{out}{}", stderr(&o));
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 9, "{out}");
    let report = fs::read_to_string(dir.path().join("validation.csv")).unwrap();
    assert_eq!(report.lines().count(), 10);
}
