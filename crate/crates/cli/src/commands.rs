//! Subcommand bodies. Each one writes its files plus a manifest into the output directory.

use std::f64::consts::PI;
use std::path::PathBuf;

use bath_synthesis::{
    alpha_from_slope, coupling_inputs, linear_fit, single_mode_coupling, synthesize_ladder, CutoffShape, LadderLayout, SynthesisTarget,
    TaperEnd, TransmonDesign, FIT_BAND,
};
use circuit_core::{linear_grid, network_impedance, CircuitSpec, ResonatorSpec, SpectralGrid};
use dynamics::{evolve_effective, BathInit, InitialCondition, ModeSet, ModeSpec, QubitInit, SimOptions};
use rotating_frame::{
    effective_params, effective_spectral_density, error_budget, fit_effective_temperature, BudgetOptions, DriveSpec,
    EffectiveTemperature, Mode, TemperatureFitOptions, Verdict,
};
use transmon_map::{counterterm_report, derive_params, TransmonOptions};

use crate::checks;
use crate::config::{BathState, LadderBlock, ModeSource, QubitState, RunConfig, Taper};
use crate::error::CliError;
use crate::output::{Csv, Outputs, Report};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Impedance,
    Params,
    Frame,
    Budget,
    Synthesize,
    Simulate,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Impedance => "impedance",
            Command::Params => "params",
            Command::Frame => "frame",
            Command::Budget => "budget",
            Command::Synthesize => "synthesize",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
        }
    }
}

pub struct Context {
    pub config: RunConfig,
    pub config_text: String,
    pub out: Outputs,
    pub strict: bool,
    pub warnings: Vec<String>,
    /// Per-check lines from `validate`.
    pub checks: Vec<checks::Check>,
}

impl Context {
    pub fn new(config: RunConfig, config_text: String, out: Option<PathBuf>, strict: bool) -> Self {
        let dir = out.unwrap_or_else(|| PathBuf::from(config.output.as_ref().map_or("out", |o| o.dir.as_str())));
        Self { config, config_text, out: Outputs::new(dir), strict, warnings: Vec::new(), checks: Vec::new() }
    }

    fn warn(&mut self, message: String) -> Result<(), CliError> {
        if self.strict {
            return Err(CliError::Check(format!("warning (strict): {message}")));
        }
        self.warnings.push(message);
        Ok(())
    }
}

pub fn run(command: Command, ctx: &mut Context) -> Result<(), CliError> {
    let outcome = match command {
        Command::Impedance => impedance(ctx),
        Command::Params => params(ctx),
        Command::Frame => frame(ctx),
        Command::Budget => budget(ctx),
        Command::Synthesize => synthesize(ctx),
        Command::Simulate => simulate(ctx),
        Command::Validate => validate(ctx),
    };
    // a failed check still leaves its report and manifest behind
    match outcome {
        Ok(()) => ctx.out.manifest(command.name(), &ctx.config_text, &ctx.warnings),
        Err(CliError::Check(msg)) if !ctx.out.written.is_empty() => {
            ctx.out.manifest(command.name(), &ctx.config_text, &ctx.warnings)?;
            Err(CliError::Check(msg))
        }
        Err(e) => Err(e),
    }
}

fn config_err(key: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config { key: key.into(), message: message.to_string() }
}

pub fn design(cfg: &RunConfig) -> Result<TransmonDesign, CliError> {
    let t = RunConfig::require(&cfg.transmon, "transmon")?;
    if !(t.beta > 0.0 && t.beta < 1.0) {
        return Err(config_err("transmon.beta", format!("must lie in (0, 1), got {}", t.beta)));
    }
    Ok(TransmonDesign { z_j: t.z_j.0, beta: t.beta, c_int: t.c_int.0, delta: t.delta.0 })
}

pub fn layout(f: &LadderBlock) -> LadderLayout {
    LadderLayout {
        n: f.n,
        omega1: f.omega1.0,
        span: f.span.0,
        z_lc: f.z_lc.0,
        quality: f.quality,
        c_c_max: f.c_c_max.0,
        taper: match f.taper {
            Taper::Residual => TaperEnd::Residual,
            Taper::ExactZero => TaperEnd::ExactZero,
        },
    }
}

pub fn circuit(cfg: &RunConfig, design: &TransmonDesign) -> Result<CircuitSpec, CliError> {
    let c = RunConfig::require(&cfg.circuit, "circuit")?;
    let resonators = match (&c.ladder, c.resonator.is_empty()) {
        (Some(_), false) => return Err(config_err("circuit", "give either circuit.ladder or circuit.resonator entries, not both")),
        (Some(f), true) => layout(f).resonators().map_err(|e| config_err("circuit.ladder", e))?,
        (None, _) => c
            .resonator
            .iter()
            .enumerate()
            .map(|(i, r)| {
                ResonatorSpec::new(r.inductance.0, r.capacitance.0, r.resistance.0, r.coupling.0)
                    .map_err(|e| config_err(&format!("circuit.resonator[{i}]"), e))
            })
            .collect::<Result<_, _>>()?,
    };
    let spec = design.circuit(c.c_shunt.0, resonators, None)?;
    Ok(match c.parasitic {
        Some(p) => spec.with_uniform_parasitics(p.0),
        None => spec,
    })
}

fn grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let g = RunConfig::require(&cfg.grid, "grid")?;
    linear_grid(g.start.0, g.stop.0, g.points).map_err(|e| config_err("grid", e))
}

fn drive(cfg: &RunConfig) -> Result<DriveSpec, CliError> {
    let d = RunConfig::require(&cfg.drive, "drive")?;
    Ok(match d.omega2 {
        Some(w2) => DriveSpec::new(d.omega1.0, d.rabi1.0, w2.0, d.rabi2.0)?,
        None => DriveSpec::resonant(d.omega1.0, d.rabi1.0, d.rabi2.0)?,
    })
}

fn band(cfg: &RunConfig, omega1: f64) -> Result<f64, CliError> {
    if let Some(f) = cfg.circuit.as_ref().and_then(|c| c.ladder.as_ref()) {
        return Ok(f.span.0);
    }
    if let Some(s) = &cfg.synthesis {
        return Ok(s.omega_c.0);
    }
    let g = RunConfig::require(&cfg.grid, "grid")?;
    Ok(g.stop.0 - omega1)
}

/// (omega, g, linewidth) for each resonator; coupling warnings go to the context.
fn lab_modes(ctx: &mut Context, design: &TransmonDesign, spec: &CircuitSpec) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let inputs = coupling_inputs(design, spec);
    let total = spec.coupling_total();
    let mut rows = Vec::new();
    for r in &spec.resonators {
        let est = single_mode_coupling(&inputs, r, total, 0.1);
        if let Some(w) = est.warning {
            ctx.warn(w)?;
        }
        rows.push((r.resonance(), est.g, r.linewidth()));
    }
    Ok(rows)
}

fn spectrum_csv(grid: &SpectralGrid, axis: &str) -> Csv {
    let mut csv = Csv::new(&[axis, "j_si"]);
    for (w, j) in grid.omega.iter().zip(&grid.j) {
        csv.row(&[w / TWO_PI, *j]);
    }
    csv
}

fn impedance(ctx: &mut Context) -> Result<(), CliError> {
    let d = design(&ctx.config)?;
    let spec = circuit(&ctx.config, &d)?;
    let lab = network_impedance(&spec, &grid(&ctx.config)?)?;
    let mut csv = Csv::new(&["omega_hz", "re_z_ohm", "im_z_ohm", "j_si"]);
    for s in lab.samples() {
        csv.row(&[s.omega / TWO_PI, s.z.re, s.z.im, s.omega * s.z.re]);
    }
    ctx.out.write("impedance.csv", csv.text())
}

fn params(ctx: &mut Context) -> Result<(), CliError> {
    let d = design(&ctx.config)?;
    let spec = circuit(&ctx.config, &d)?;
    let p = derive_params(&spec, &TransmonOptions::default())?;
    let ct = counterterm_report(&spec);
    let mut r = Report::default();
    r.num("delta", p.delta / TWO_PI, "Hz");
    r.num("anharmonicity", p.anharmonicity / TWO_PI, "Hz");
    r.num("beta", p.beta, "");
    r.num("z_j", p.z_j, "ohm");
    r.num("q0", p.q0, "C");
    r.num("e_c", p.e_c, "J");
    r.num("e_j", p.e_j, "J");
    r.num("ej_over_ec", p.ej_over_ec(), "");
    r.num("c_t", p.c_t, "F");
    r.num("c_g0", p.c_g0, "F");
    r.num("c_int", p.c_int, "F");
    r.num("transverse_element_sq", p.transverse_element_sq(), "");
    r.num("counterterm_coefficient", ct.coefficient, "1/F");
    r.num("c_env", ct.c_env, "F");
    ctx.out.write("params.csv", &r.render())?;
    let rows = lab_modes(ctx, &d, &spec)?;
    let mut csv = Csv::new(&["omega_hz", "coupling_hz", "linewidth_hz", "coupling_capacitance_f"]);
    for ((w, g, lw), res) in rows.iter().zip(&spec.resonators) {
        csv.row(&[w / TWO_PI, g / TWO_PI, lw / TWO_PI, res.coupling]);
    }
    ctx.out.write("modes.csv", csv.text())
}

fn frame(ctx: &mut Context) -> Result<(), CliError> {
    let dr = drive(&ctx.config)?;
    let d = design(&ctx.config)?;
    let spec = circuit(&ctx.config, &d)?;
    let lab = network_impedance(&spec, &grid(&ctx.config)?)?;
    let j_eff = effective_spectral_density(&lab, dr.omega1, EffectiveTemperature::Zero)?;
    let omega_c = band(&ctx.config, dr.omega1)?;
    let fit = linear_fit(&j_eff, FIT_BAND.0 * omega_c, FIT_BAND.1 * omega_c)?;
    let modes = lab_modes(ctx, &d, &spec)?;
    let eff = effective_params(&d.params()?, &modes.iter().map(|&(omega, coupling, _)| Mode { omega, coupling }).collect::<Vec<_>>(), &dr);

    let mut r = Report::default();
    r.num("delta_eff", eff.delta_eff / TWO_PI, "Hz");
    r.num("omega1", dr.omega1 / TWO_PI, "Hz");
    r.num("omega2", dr.omega2 / TWO_PI, "Hz");
    r.num("rabi1", dr.rabi1 / TWO_PI, "Hz");
    r.num("rabi2", dr.rabi2 / TWO_PI, "Hz");
    r.num("q0", eff.q0, "C");
    r.num("j_eff_slope", fit.slope, "ohm");
    r.num("alpha_eff", alpha_from_slope(&d, fit.slope), "");
    match fit_effective_temperature(&lab, dr.omega1, &TemperatureFitOptions::default()) {
        Ok(t) => r.num("t_eff", t.temperature.kelvin(), "K"),
        Err(e) => r.text("t_eff", format!("undetermined: {e}")),
    }
    ctx.out.write("frame.csv", &r.render())?;
    ctx.out.write("j_eff.csv", spectrum_csv(&j_eff, "detuning_hz").text())?;
    let mut csv = Csv::new(&["detuning_hz", "coupling_hz", "linewidth_hz"]);
    for ((w, g), m) in eff.detunings.iter().zip(&eff.couplings).zip(&modes) {
        csv.row(&[w / TWO_PI, g / TWO_PI, m.2 / TWO_PI]);
    }
    ctx.out.write("frame_modes.csv", csv.text())
}

fn budget(ctx: &mut Context) -> Result<(), CliError> {
    let dr = drive(&ctx.config)?;
    let d = design(&ctx.config)?;
    let spec = circuit(&ctx.config, &d)?;
    let lab = network_impedance(&spec, &grid(&ctx.config)?)?;
    let mut opts = BudgetOptions::default();
    let mut gamma_internal = 0.0;
    if let Some(b) = &ctx.config.budget {
        gamma_internal = b.gamma_internal.0;
        opts.alpha_bar_warn = b.alpha_bar_warn.unwrap_or(opts.alpha_bar_warn);
        opts.p_error_cap = b.p_error_cap.unwrap_or(opts.p_error_cap);
        opts.occupation_warn = b.occupation_warn.unwrap_or(opts.occupation_warn);
    }
    let eb = error_budget(&d.params()?, &dr, &spec, &lab, gamma_internal, &opts)?;

    let mut r = Report::default();
    r.num("alpha_bar", eb.alpha_bar, "");
    r.num("gamma_bar", eb.gamma_bar / TWO_PI, "Hz");
    r.num("p_error", eb.p_error, "");
    r.num("gamma_internal", eb.gamma_internal / TWO_PI, "Hz");
    r.num("max_occupation", eb.modes.iter().map(|m| m.occupation).fold(0.0, f64::max), "");
    r.num("rabi1_over_omega1", eb.rwa.rabi1_over_omega1, "");
    r.num("rabi2_over_omega2", eb.rwa.rabi2_over_omega2, "");
    r.num("drive_detuning_over_rabi1", eb.rwa.drive_detuning_over_rabi1, "");
    r.num("rabi2_over_rabi1", eb.rwa.rabi2_over_rabi1, "");
    r.text("verdict", format!("{:?}", eb.verdict).to_lowercase());
    for (i, m) in eb.messages.iter().enumerate() {
        r.text(&format!("message_{i}"), m.clone());
    }
    ctx.out.write("budget.csv", &r.render())?;
    let mut csv = Csv::new(&["omega_hz", "occupation", "linewidth_hz", "heating_rate_hz"]);
    for m in &eb.modes {
        csv.row(&[m.omega / TWO_PI, m.occupation, m.linewidth / TWO_PI, m.heating_rate / TWO_PI]);
    }
    ctx.out.write("heating.csv", csv.text())?;
    match eb.verdict {
        Verdict::Pass => Ok(()),
        Verdict::Warn => eb.messages.iter().try_for_each(|m| ctx.warn(m.clone())),
        Verdict::Fail => Err(CliError::Check(eb.messages.join("; "))),
    }
}

fn synthesize(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let d = design(cfg)?;
    let s = *RunConfig::require(&cfg.synthesis, "synthesis")?;
    let ladder = cfg.circuit.as_ref().and_then(|c| c.ladder.as_ref()).copied();
    let dr = cfg.drive.is_some().then(|| drive(cfg)).transpose()?;
    let omega1 = match (dr, ladder) {
        (Some(dr), _) => dr.omega1,
        (None, Some(f)) => f.omega1.0,
        (None, None) => return Err(config_err("synthesis", "needs drive.omega1 or circuit.ladder.omega1 for the band edge")),
    };
    let base = ladder.map_or_else(|| LadderLayout::standard(omega1, s.omega_c.0), |f| layout(&f));
    let target = SynthesisTarget {
        exponent: s.exponent,
        alpha_eff: s.alpha_eff,
        omega_c: s.omega_c.0,
        shape: CutoffShape::Sharp,
        omega1,
        n: s.n.unwrap_or(base.n),
        rabi1: dr.map(|d| d.rabi1),
    };
    let res = synthesize_ladder(&target, &d, &base)?;

    let mut r = Report::default();
    r.num("c_shunt", res.c_shunt, "F");
    r.num("alpha_eff", res.alpha_eff, "");
    r.num("j_eff_slope", res.slope, "ohm");
    r.num("exponent", res.spectral_fit.exponent, "");
    r.num("max_ripple", res.diagnostics.max_ripple, "");
    r.num("tail_ratio", res.diagnostics.tail_ratio, "");
    ctx.out.write("synthesis.csv", &r.render())?;
    let mut modes = Csv::new(&["omega_hz", "coupling_hz", "linewidth_hz"]);
    for m in &res.modes {
        modes.row(&[m.omega / TWO_PI, m.coupling / TWO_PI, m.linewidth / TWO_PI]);
    }
    ctx.out.write(SYNTHESIS_MODES, modes.text())?;
    let mut table = Csv::new(&["inductance_nh", "capacitance_ff", "resistance_ohm", "coupling_ff"]);
    for r in &res.circuit.resonators {
        table.row(&[r.inductance * 1e9, r.capacitance * 1e15, r.resistance, r.coupling * 1e15]);
    }
    ctx.out.write("synthesis_resonators.csv", table.text())?;
    ctx.out.write("synthesis_j_eff.csv", spectrum_csv(&res.j_eff, "detuning_hz").text())
}

pub const SYNTHESIS_MODES: &str = "synthesis_modes.csv";

fn sim_options(cfg: &RunConfig) -> SimOptions {
    let t = &cfg.tolerances;
    let d = SimOptions::default();
    SimOptions {
        rtol: t.rtol.unwrap_or(d.rtol),
        atol: t.atol.unwrap_or(d.atol),
        eps_trunc: t.eps_trunc.unwrap_or(d.eps_trunc),
        dim_cap: t.dim_cap.unwrap_or(d.dim_cap),
        density_dim_cap: t.density_dim_cap.unwrap_or(d.density_dim_cap),
        seed: t.seed.unwrap_or(d.seed),
        thermal_samples: t.thermal_samples.unwrap_or(d.thermal_samples),
        ..d
    }
}

/// Lab-frame rows from `synthesize`, moved into the frame rotating at omega1.
fn synthesized_modes(ctx: &Context, n_max: usize) -> Result<Vec<ModeSpec>, CliError> {
    let path = ctx.out.dir.join(SYNTHESIS_MODES);
    let text = std::fs::read_to_string(&path).map_err(|_| CliError::Dependency {
        path: path.display().to_string(),
        hint: "run `spinbath synthesize` with the same --out directory first".into(),
    })?;
    let omega1 = drive(&ctx.config)?.omega1;
    let bad = |line: usize| CliError::Dependency { path: path.display().to_string(), hint: format!("malformed row {line}") };
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let v: Vec<f64> = line.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(i + 1))?;
            if v.len() != 3 {
                return Err(bad(i + 1));
            }
            Ok(ModeSpec::new(TWO_PI * v[0] - omega1, 0.5 * TWO_PI * v[1], TWO_PI * v[2], n_max)?)
        })
        .collect()
}

fn simulate(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let sim = RunConfig::require(&cfg.simulation, "simulation")?.clone();
    let delta_eff = match (sim.delta_eff, &cfg.drive) {
        (Some(d), _) => d.0,
        (None, Some(_)) => 0.5 * drive(cfg)?.rabi2,
        (None, None) => return Err(config_err("simulation.delta_eff", "not given and no drive block to take rabi2/2 from")),
    };
    let specs = match sim.source {
        ModeSource::Table => sim
            .mode
            .iter()
            .enumerate()
            .map(|(i, m)| {
                ModeSpec::new(m.omega.0, m.coupling.0, m.gamma.0, m.n_max.unwrap_or(sim.n_max))
                    .map_err(|e| config_err(&format!("simulation.mode[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?,
        ModeSource::Synthesis => synthesized_modes(ctx, sim.n_max)?,
    };
    let modes = ModeSet::new(specs)?;
    let qubit = match sim.qubit {
        QubitState::PlusX => QubitInit::PlusX,
        QubitState::MinusX => QubitInit::MinusX,
        QubitState::Ground => QubitInit::Ground,
        QubitState::Excited => QubitInit::Excited,
    };
    let mut opts = sim_options(cfg);
    let bath = match sim.bath {
        BathState::Vacuum => BathInit::Vacuum,
        BathState::Equilibrated => BathInit::Equilibrated,
        BathState::Displaced => BathInit::Displaced {
            amplitude: sim.displacement.ok_or_else(|| config_err("simulation.displacement", "required for bath = \"displaced\""))?.0,
            duration: sim
                .displacement_time
                .ok_or_else(|| config_err("simulation.displacement_time", "required for bath = \"displaced\""))?
                .0,
        },
        BathState::Thermal => {
            let t = sim.temperature.ok_or_else(|| config_err("simulation.temperature", "required for bath = \"thermal\""))?.0;
            opts.dissipator_temperature = t;
            BathInit::Thermal { temperature: t }
        }
    };
    if sim.points < 2 || !(sim.t_final.0 > 0.0) {
        return Err(config_err("simulation", "need t_final > 0 and points >= 2"));
    }
    let times: Vec<f64> = (0..sim.points).map(|k| sim.t_final.0 * k as f64 / (sim.points - 1) as f64).collect();
    let res = evolve_effective(&modes, delta_eff, &InitialCondition::new(qubit, bath), &times, &opts)?;

    let mut header: Vec<String> = vec!["t_s".into(), "sx".into(), "sz".into()];
    header.extend((1..=modes.len()).map(|i| format!("n_{i}")));
    header.extend(["norm_deviation".into(), "leakage".into()]);
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for k in 0..res.times.len() {
        let mut row = vec![res.times[k], res.sx[k], res.sz[k]];
        row.extend(&res.occupations[k]);
        row.extend([res.norm_deviation[k], res.leakage[k]]);
        csv.row(&row);
    }
    ctx.out.write("simulation.csv", csv.text())?;
    let mut r = Report::default();
    r.num("delta_eff", delta_eff / TWO_PI, "Hz");
    r.text("propagation", format!("{:?}", res.propagation));
    r.text("n_max", res.n_max.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "));
    r.num("max_leakage", res.leakage.iter().copied().fold(0.0, f64::max), "");
    r.num("max_norm_deviation", res.norm_deviation.iter().copied().fold(0.0, f64::max), "");
    r.num("rtol", opts.rtol, "");
    r.num("atol", opts.atol, "");
    r.num("eps_trunc", opts.eps_trunc, "");
    r.text("seed", opts.seed.to_string());
    r.text("fingerprint", res.fingerprint.clone());
    ctx.out.write("simulation_report.csv", &r.render())
}

fn validate(ctx: &mut Context) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let (def_design, def_layout, def_shunt) = checks::ladder_defaults();
    let d = if cfg.transmon.is_some() { design(cfg)? } else { def_design };
    let ladder = cfg.circuit.as_ref().and_then(|c| c.ladder.as_ref()).map(layout).unwrap_or(def_layout);
    let spec = match &cfg.circuit {
        Some(_) => circuit(cfg, &d)?,
        None => d.circuit(def_shunt, def_layout.resonators()?, None)?,
    };
    let seed = cfg.tolerances.seed.unwrap_or(0);
    let mut list = vec![
        checks::single_resonator_equivalence(50, 1000, seed),
        checks::shunt_scaling(&ladder, &d),
        checks::coupling_formula(),
        checks::error_budget_check(&spec),
        checks::golden_rule_limit(&[0.05, 0.1, 0.2]),
        checks::frame_equivalence(&[350.0 * 1e6 * TWO_PI, 175.0 * 1e6 * TWO_PI], 61).check,
        checks::detailed_balance_round_trip(&[0.0, 0.01, 0.025, 0.1]),
        checks::parasitic_robustness(&ladder, &d),
        checks::dynamics_invariants(),
    ];
    let mut csv = String::from("check,pass,detail\n");
    for c in &list {
        csv.push_str(&format!("{},{},\"{}\"\n", c.name, c.pass, c.detail.replace('"', "\"\"")));
    }
    ctx.out.write("validation.csv", &csv)?;
    let failed: Vec<String> = list.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    ctx.checks.append(&mut list);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} check(s) failed: {}", failed.len(), failed.join(", "))))
    }
}
