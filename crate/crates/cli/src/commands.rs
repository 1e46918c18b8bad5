use std::io::Write;
use std::path::Path;

use modwave::analysis::{
    delay_time_measured, estimate_frequency_raw, DelayGridSpec, DelayReport, FrequencyEstimate, FrequencyMode,
    FrontSource,
};
use modwave::asymptotics::{rho_beats_with, rho_two_level, BeatCoefficients};
use modwave::model::PotentialModel;
use modwave::oracle::{run_plan, OraclePlan, OracleReport};
use modwave::validation::{run_validation, Perturbation, PerturbedConstant, ValidationOptions};
use modwave::{Axis, DensityTrace, Error, PhysicsConstants};
use serde::Serialize;

use crate::config::{DkValue, GridConfig, Output, Potential, Probe, ScenarioConfig};
use crate::output::{header, sibling, write_run_record, Table};
use crate::presets::{self, PRESETS};
use crate::{OracleArgs, ScenarioArgs, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
            _ => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

type CmdResult = Result<u8, Failure>;

/// Preset or file, then flag overrides, then validation.
pub fn resolve(args: &ScenarioArgs) -> Result<ScenarioConfig, Failure> {
    let mut c = match (&args.preset, &args.config) {
        (Some(name), _) => {
            let p = presets::find(name).ok_or_else(|| config_error(format!("unknown preset `{name}`")))?;
            (p.config)()
        }
        (None, Some(path)) => ScenarioConfig::from_file(path)?,
        (None, None) => ScenarioConfig::default(),
    };
    if let Some(p) = args.potential {
        c.potential = p;
    }
    if let Some(v) = args.lambda {
        c.lambda = v;
    }
    if let Some(v) = args.energy {
        c.energy = v;
    }
    if let Some(v) = &args.dk {
        c.dk = v.clone();
    }
    if let Some(v) = args.mass_ratio {
        c.mass_ratio = v;
    }
    if let Some(x) = args.fixed_x {
        c.probe = Probe::FixedX(x);
    }
    if let Some(t) = args.fixed_t {
        if !matches!(c.probe, Probe::FixedT(_)) {
            c.grid = GridConfig { min: 0.0, max: 1000.0, samples: c.grid.samples };
        }
        c.probe = Probe::FixedT(t);
    }
    let time_axis = matches!(c.probe, Probe::FixedX(_));
    let (lo, hi, other) = if time_axis {
        (args.t_min, args.t_max, args.x_min.or(args.x_max))
    } else {
        (args.x_min, args.x_max, args.t_min.or(args.t_max))
    };
    if other.is_some() {
        return Err(config_error(if time_axis {
            "--x-min/--x-max need --fixed-t (the grid runs over t at fixed x)"
        } else {
            "--t-min/--t-max need --fixed-x (the grid runs over x at fixed t)"
        }));
    }
    if let Some(v) = lo {
        c.grid.min = v;
    }
    if let Some(v) = hi {
        c.grid.max = v;
    }
    if let Some(n) = args.samples {
        c.grid.samples = n;
    }
    if let Some(o) = &args.outputs {
        c.outputs = o.clone();
    }
    if let Some(p) = &args.resonances {
        c.resonances = Some(p.clone());
    }
    if let Some(l) = args.length {
        c.length = Some(l);
    }
    c.validate()?;
    Ok(c)
}

fn uniform(g: &GridConfig) -> Vec<f64> {
    let n = g.samples;
    (0..n).map(|i| if i + 1 == n { g.max } else { g.min + (g.max - g.min) * i as f64 / (n - 1) as f64 }).collect()
}

/// Builds the trace table for a validated configuration.
pub fn trace_table(c: &ScenarioConfig) -> Result<Table, Failure> {
    let model = c.model()?;
    let packet = c.packet()?;
    let axis = c.axis();
    let grid = uniform(&c.grid);
    let split = c.outputs.contains(&Output::Components);
    let tr = DensityTrace::exact(&model, &packet, axis, grid.clone(), split)?;
    let mut table = Table::new();
    table.push(axis.column_name(), grid.clone());
    table.push("rho", tr.rho.clone());
    if let Some(parts) = tr.components {
        table.push("rho_plus", parts.rho_plus);
        table.push("rho_minus", parts.rho_minus);
        table.push("rho_int", parts.rho_int);
    }
    if c.outputs.contains(&Output::BeatsApprox) {
        let well = match (&model, axis) {
            (PotentialModel::Delta(w), Axis::Time { x: 0.0 }) => *w,
            _ => return Err(config_error("beats_approx needs the delta potential and --fixed-x 0")),
        };
        let b = BeatCoefficients::new(&well, &packet)?;
        table.push("rho_approx", grid.iter().map(|&t| rho_beats_with(&b, t, &well, &packet)).collect());
    }
    if c.outputs.contains(&Output::TwoLevel) {
        let tx = |q| model.transmission(q);
        let rho =
            grid.iter().map(|&s| rho_two_level(axis.point(s), &packet, &tx)).collect::<modwave::Result<Vec<_>>>()?;
        table.push("rho_2l", rho);
    }
    Ok(table)
}

fn emit(table: &Table, head: &serde_json::Value, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            table.write(std::io::BufWriter::new(f), head)?;
        }
        None => table.write(std::io::stdout().lock(), head)?,
    }
    Ok(())
}

pub fn trace(args: &ScenarioArgs, out: Option<&Path>) -> CmdResult {
    let c = resolve(args)?;
    for o in &c.outputs {
        if matches!(o, Output::Delay | Output::Oracle) {
            eprintln!(
                "note: output `{o:?}` is produced by the `{}` command",
                if *o == Output::Delay { "delay" } else { "oracle" }
            );
        }
    }
    let constants = c.constants()?;
    let table = trace_table(&c)?;
    emit(&table, &header("trace", &c, constants), out)?;
    if let Some(path) = out {
        write_run_record("trace", &c, constants, &[path], &sibling(path, "run.json"))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct DelaySummary<'a> {
    #[serde(rename = "x_A")]
    x: f64,
    source: FrontSource,
    reports: &'a [DelayReport],
    flagged: Vec<FlaggedRow>,
    warnings: usize,
}

#[derive(Serialize)]
struct FlaggedRow {
    #[serde(rename = "dk_invA")]
    dk: f64,
    reason: String,
}

pub fn delay(args: &ScenarioArgs, dk_list: Option<Vec<DkValue>>, total: bool, out: Option<&Path>) -> CmdResult {
    let mut c = resolve(args)?;
    if let Some(list) = dk_list {
        c.dk_list = list;
    }
    if c.dk_list.is_empty() {
        return Err(config_error("delay needs a non-empty dk list (--dk-list or dk_list)"));
    }
    c.validate()?;
    let Probe::FixedX(x) = c.probe else {
        return Err(config_error("delay is measured at a fixed position (--fixed-x)"));
    };
    if c.potential != Potential::Delta {
        return Err(config_error("delay-time needs the delta potential"));
    }
    let well = c.well()?;
    let spec =
        DelayGridSpec { source: if total { FrontSource::Total } else { FrontSource::Plus }, ..Default::default() };
    let mut table = Table::new();
    let mut cols: [Vec<f64>; 7] = Default::default();
    let mut reports = Vec::new();
    let mut flagged = Vec::new();
    for dk in &c.dk_list {
        let packet = c.packet_with(dk)?;
        match delay_time_measured(&well, &packet, x, spec) {
            Ok(r) => {
                for (col, v) in cols.iter_mut().zip([
                    r.dk_invA,
                    r.t_delta,
                    r.t_f,
                    r.delta_t_measured,
                    r.delta_t_analytic,
                    r.t_phi,
                    0.0,
                ]) {
                    col.push(v);
                }
                reports.push(r);
            }
            Err(e @ Error::FrontNotFound { .. }) => {
                eprintln!("warning: dk = {}: {e}", packet.dk);
                let nan = f64::NAN;
                for (col, v) in cols.iter_mut().zip([packet.dk, nan, nan, nan, nan, nan, 1.0]) {
                    col.push(v);
                }
                flagged.push(FlaggedRow { dk: packet.dk, reason: e.to_string() });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let names =
        ["dk_invA", "t_delta_ps", "t_f_ps", "delta_t_measured_ps", "delta_t_analytic_ps", "t_phi_ps", "flagged"];
    for (name, col) in names.iter().zip(cols) {
        table.push(name, col);
    }
    let constants = c.constants()?;
    emit(&table, &header("delay", &c, constants), out)?;
    let warnings = flagged.len();
    let summary = DelaySummary { x, source: spec.source, reports: &reports, flagged, warnings };
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| Failure { code: EXIT_NUMERICAL, message: e.to_string() })?;
    match out {
        Some(path) => {
            let jpath = sibling(path, "json");
            std::fs::write(&jpath, json + "\n").map_err(|e| config_error(e.to_string()))?;
            write_run_record("delay", &c, constants, &[path, &jpath], &sibling(path, "run.json"))?;
        }
        None => eprintln!("{json}"),
    }
    if warnings > 0 {
        eprintln!("{warnings} row(s) flagged");
    }
    Ok(0)
}

fn parse_perturbation(s: &str) -> Result<Perturbation, Failure> {
    let (name, factor) = s.split_once('=').ok_or_else(|| config_error("perturbation must be name=factor"))?;
    let constant = match name.trim() {
        "hbar" => PerturbedConstant::Hbar,
        "hbar_over_m" => PerturbedConstant::HbarOverM,
        other => return Err(config_error(format!("unknown constant `{other}`"))),
    };
    let factor = factor.trim().parse().map_err(|_| config_error(format!("invalid factor `{factor}`")))?;
    Ok(Perturbation { constant, factor })
}

pub fn validate(perturb: Option<&str>) -> CmdResult {
    let opts = ValidationOptions { perturbation: perturb.map(parse_perturbation).transpose()? };
    let report = run_validation(&opts);
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| Failure { code: EXIT_NUMERICAL, message: e.to_string() })?;
    println!("{json}");
    for c in report.failures() {
        eprintln!("FAILED {}: residual {:e} > tolerance {:e}", c.name, c.residual, c.tolerance);
    }
    Ok(if report.passed { 0 } else { EXIT_VALIDATION })
}

#[derive(Serialize)]
struct OracleSummary<'a> {
    potential: Potential,
    constants: PhysicsConstants,
    plan: &'a OraclePlan,
    report: &'a OracleReport,
    threshold: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    beats: Option<BeatSummary>,
}

#[derive(Serialize)]
struct BeatSummary {
    probe_x: f64,
    estimate: FrequencyEstimate,
    omega_model: f64,
    within_resolution: bool,
}

pub fn oracle(args: &OracleArgs) -> CmdResult {
    let c = PhysicsConstants::electron();
    let (mut plan, threshold) = match args.potential {
        Potential::Free => (OraclePlan::free_default(c)?, 1e-3),
        Potential::Delta => (OraclePlan::delta_default(c)?, 1e-2),
        Potential::Custom => return Err(config_error("the oracle integrates the free and delta potentials only")),
    };
    let customize = |plan: &mut OraclePlan| -> Result<(), Failure> {
        if args.energy.is_some() || args.dk.is_some() {
            let e = args.energy.unwrap_or(plan.packet.energy());
            plan.packet = modwave::ModulatedPacket::from_energy(c, e, args.dk.unwrap_or(plan.packet.dk))?;
        }
        if let (Some(l), modwave::oracle::OraclePotential::Delta { .. }) = (args.lambda, plan.potential) {
            plan.potential = modwave::oracle::OraclePotential::Delta { lambda: l };
        }
        Ok(())
    };
    customize(&mut plan)?;
    if let Some(n) = args.points {
        let dt = plan.levels.last().map_or(1e-5, |l| l.1);
        let dx = (plan.x_max - plan.x_min) / (n.max(2) - 1) as f64;
        plan.levels = vec![(dx, dt)];
    }
    let report = run_plan(&plan).map_err(|e| match e {
        Error::InfeasibleGrid(m) => {
            Failure { code: EXIT_NUMERICAL, message: format!("grid cannot be converged for this run: {m}") }
        }
        other => other.into(),
    })?;
    let best = report.best().map_or(f64::INFINITY, |r| r.rel_l2);
    let mut passed = best < threshold;
    if let Some(r) = report.convergence_ratio {
        passed &= (r - 4.0).abs() <= 0.5;
    }

    let beats = if args.potential == Potential::Delta && !args.skip_beats {
        let mut bp = OraclePlan::delta_beats(c)?;
        customize(&mut bp)?;
        let (dx, dt) = bp.levels[0];
        let h = bp.run_level(dx, dt)?;
        let i0 = h.t.iter().position(|&t| t >= 0.5).unwrap_or(0);
        let rho = h.density();
        let estimate = estimate_frequency_raw(&h.t[i0..], &rho[i0..], FrequencyMode::Envelope)?;
        let omega_model = bp.packet.big_omega();
        let within = estimate.significant && (estimate.omega - omega_model).abs() <= estimate.resolution;
        passed &= within;
        Some(BeatSummary { probe_x: bp.probe_x, estimate, omega_model, within_resolution: within })
    } else {
        None
    };

    if let Some(path) = &args.out {
        let mut table = Table::new();
        table.push("t_ps", report.t.clone());
        table.push("rho_analytic", report.analytic.clone());
        for (i, n) in report.numeric.iter().enumerate() {
            table.push(&format!("rho_level{i}"), n.clone());
        }
        if report.numeric.len() >= 2 {
            let k = report.numeric.len();
            table.push("rho_richardson", modwave::oracle::richardson(&report.numeric[k - 2], &report.numeric[k - 1]));
        }
        let f = std::fs::File::create(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        table.write(std::io::BufWriter::new(f), &header("oracle", &plan, c))?;
    }
    let summary = OracleSummary {
        potential: args.potential,
        constants: c,
        plan: &plan,
        report: &report,
        threshold,
        passed,
        beats,
    };
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| Failure { code: EXIT_NUMERICAL, message: e.to_string() })?;
    println!("{json}");
    Ok(if passed { 0 } else { EXIT_VALIDATION })
}

pub fn presets(name: Option<&str>) -> CmdResult {
    let mut out = std::io::stdout().lock();
    let io = |e: std::io::Error| config_error(e.to_string());
    match name {
        None => {
            for p in PRESETS {
                writeln!(out, "{:<6} {}", p.name, p.description).map_err(io)?;
            }
        }
        Some(n) => {
            let p = presets::find(n).ok_or_else(|| config_error(format!("unknown preset `{n}`")))?;
            let json = serde_json::to_string_pretty(&(p.config)()).expect("preset configs serialize");
            writeln!(out, "{json}").map_err(io)?;
        }
    }
    Ok(0)
}
