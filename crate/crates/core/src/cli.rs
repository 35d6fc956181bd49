//! The `contact-mech` command line: `simulate`, `verify` and `thermo`.
//!
//! Exit codes are 0 on success, 1 on usage or configuration errors and 2 on
//! numerical failure (a failed check, a blow-up or an evaluation error).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::dynamics::{
    conserved_i, contact_field_raw, contact_flow, evolution_field_raw, evolution_flow, herglotz_flow, FnMonitor,
    Hamiltonian, HamiltonianSystem, HerglotzKind, LagrangianSystem, Monitor, Regularity, Trajectory,
};
use crate::report::{Check, VerificationReport};
use crate::sampling::rng;
use crate::suites::{self, energy_rank_check, Suite};
use crate::thermo::{
    gas_flow, gas_hamiltonian, gas_lagrangian_family, gas_legendrian, generator_transport, potential_checks,
    GasConstants, Generator, GAS_COORDS,
};

pub const SEED_ENV: &str = "CONTACT_MECH_SEED";
pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    Numerical = 2,
}

#[derive(Parser, Debug)]
#[command(
    name = "contact-mech",
    version,
    about = "Contact Hamiltonian and Herglotz dynamics with numerical verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate the system described by a JSON config; writes CSV and diagnostics JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite and print its reports as a JSON array.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = suites::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Ideal gas checks with optional constant overrides.
    Thermo {
        #[arg(value_enum)]
        check: ThermoCheck,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        u0: f64,
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the contact trajectory of `flow` as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Maps,
    Legendrian,
    Dynamics,
    Thermo,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Maps => Suite::Maps,
            SuiteArg::Legendrian => Suite::Legendrian,
            SuiteArg::Dynamics => Suite::Dynamics,
            SuiteArg::Thermo => Suite::Thermo,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThermoCheck {
    Potentials,
    LegendreChain,
    Flow,
    Morse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Hamiltonian,
    Lagrangian,
    Thermo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    #[default]
    Contact,
    Evolution,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularityArg {
    #[default]
    Regular,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum MonitorKind {
    H,
    #[serde(rename = "dissipation")]
    Dissipation,
    R,
    #[serde(rename = "conserved_I")]
    ConservedI,
    L,
    E,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub kind: SystemKind,
    /// Degrees of freedom; 1 by default, fixed at 3 for thermo.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub expression: Option<String>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub regularity: RegularityArg,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub trajectory: PathBuf,
    pub diagnostics: PathBuf,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub dissipation: Option<f64>,
    #[serde(rename = "conserved_I")]
    pub conserved_i: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub system: SystemConfig,
    #[serde(default)]
    pub flow: FlowKind,
    pub initial_state: Vec<f64>,
    pub t_span: [f64; 2],
    pub step: f64,
    #[serde(default)]
    pub monitors: Vec<MonitorKind>,
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { exit: Exit::Usage, message: message.into() }
}

fn numerical(message: impl ToString) -> Failure {
    Failure { exit: Exit::Numerical, message: message.to_string() }
}

impl RunConfig {
    /// Parses and validates a config; error messages name the offending field.
    pub fn from_json(text: &str) -> Result<RunConfig, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                e.into_inner().to_string()
            } else {
                format!("{path}: {}", e.into_inner())
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.schema != SCHEMA {
            return Err(format!("schema: unsupported version {}, expected {SCHEMA}", self.schema));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(format!("step: must be positive and finite, got {}", self.step));
        }
        let [t0, t1] = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(format!("t_span: need finite t0 < t1, got [{t0}, {t1}]"));
        }
        let sys = &self.system;
        if sys.n == Some(0) {
            return Err("system.n: must be at least 1".into());
        }
        match (sys.kind, &sys.expression) {
            (SystemKind::Thermo, Some(_)) => {
                return Err("system.expression: thermo systems use the built-in gas Hamiltonian".into())
            }
            (SystemKind::Hamiltonian | SystemKind::Lagrangian, None) => {
                return Err("system.expression: required for this system kind".into())
            }
            _ => {}
        }
        if sys.kind == SystemKind::Thermo {
            if sys.n.is_some_and(|n| n != 3) {
                return Err("system.n: thermo systems have n = 3".into());
            }
            if let Some(k) = sys.constants.keys().find(|k| !["U0", "c", "R"].contains(&k.as_str())) {
                return Err(format!("system.constants.{k}: thermo constants are U0, c and R"));
            }
        }
        let dim = 2 * self.n() + 1;
        let thermo_base = sys.kind == SystemKind::Thermo && self.initial_state.len() == 3;
        if self.initial_state.len() != dim && !thermo_base {
            return Err(format!("initial_state: expected {dim} components, got {}", self.initial_state.len()));
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err("initial_state: components must be finite".into());
        }
        for (i, m) in self.monitors.iter().enumerate() {
            let lagrangian = matches!(m, MonitorKind::L | MonitorKind::E | MonitorKind::ConservedI);
            if lagrangian != (sys.kind == SystemKind::Lagrangian) {
                return Err(format!("monitors[{i}]: {m:?} does not apply to a {:?} system", sys.kind));
            }
        }
        for (name, tol) in [("dissipation", self.tolerances.dissipation), ("conserved_I", self.tolerances.conserved_i)]
        {
            if tol.is_some_and(|t| !(t >= 0.0)) {
                return Err(format!("tolerances.{name}: must be non-negative"));
            }
        }
        Ok(())
    }

    fn n(&self) -> usize {
        if self.system.kind == SystemKind::Thermo {
            3
        } else {
            self.system.n.unwrap_or(1)
        }
    }
}

/// Flag, then `CONTACT_MECH_SEED`, then the config, then 0.
fn resolve_seed(flag: Option<u64>, env: &dyn Fn(&str) -> Option<String>, config: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env(SEED_ENV) {
        return v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}: not an unsigned integer: {v:?}")));
    }
    Ok(config.unwrap_or(0))
}

/// Parses arguments and runs one command, writing to the given streams.
pub fn run<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return Exit::Usage;
            }
            let _ = write!(out, "{e}");
            return Exit::Success;
        }
    };
    let result = match cli.command {
        Command::Simulate { config, seed } => simulate(&config, seed, env, out),
        Command::Verify { suite, samples, seed } => {
            resolve_seed(seed, env, None).and_then(|seed| print_reports(out, &suites::run(suite.into(), samples, seed)))
        }
        Command::Thermo { check, u0, c, r, samples, seed, trajectory } => resolve_seed(seed, env, None)
            .and_then(|seed| thermo(check, (u0, c, r), samples, seed, trajectory.as_deref(), out)),
    };
    match result {
        Ok(exit) => exit,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit
        }
    }
}

fn print_reports(out: &mut dyn Write, reports: &[VerificationReport]) -> Result<Exit, Failure> {
    let json = serde_json::to_string_pretty(reports).map_err(numerical)?;
    writeln!(out, "{json}").map_err(|e| usage(format!("writing output: {e}")))?;
    Ok(if reports.iter().all(|r| r.pass) { Exit::Success } else { Exit::Numerical })
}

fn thermo(
    check: ThermoCheck,
    (u0, c, r): (f64, f64, f64),
    samples: usize,
    seed: u64,
    trajectory: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Exit, Failure> {
    let k = GasConstants::new(u0, c, r).map_err(|e| usage(e.to_string()))?;
    let mut rg = rng(seed);
    let reports = match check {
        ThermoCheck::Potentials => potential_checks(&k, samples, &mut rg),
        ThermoCheck::LegendreChain => {
            Generator::ALL.iter().map(|g| generator_transport(&k, *g, samples, &mut rg)).collect()
        }
        ThermoCheck::Flow => {
            let x0 = gas_legendrian(&k).and_then(|g| crate::legendrian::Submanifold::parametrize(&g, &[1.0, 1.0, 1.0]));
            let flow = x0.and_then(|x0| gas_flow(&k, &x0, (0.0, 1.0), 1e-3, samples, &mut rg)).map_err(numerical)?;
            if let Some(path) = trajectory {
                write_csv(path, &flow.contact)?;
            }
            flow.reports
        }
        ThermoCheck::Morse => {
            let mut reps = gas_lagrangian_family(&k, samples, &mut rg).map_err(numerical)?.reports;
            for (name, sys) in catalog::lagrangians().map_err(numerical)? {
                reps.push(energy_rank_check(name, &sys, samples, &mut rg));
            }
            reps
        }
    };
    print_reports(out, &reports)
}

fn write_csv(path: &Path, traj: &Trajectory) -> Result<(), Failure> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).map_err(numerical)?;
    fs::write(path, buf).map_err(|e| usage(format!("writing {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    schema: u32,
    system: SystemKind,
    flow: FlowKind,
    n: usize,
    seed: u64,
    samples: usize,
    columns: Vec<String>,
    final_time: Option<f64>,
    final_state: Option<&'a [f64]>,
    blowup_at: Option<f64>,
    reports: Vec<VerificationReport>,
    pass: bool,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn simulate(
    path: &Path,
    seed_flag: Option<u64>,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
) -> Result<Exit, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let cfg = RunConfig::from_json(&text).map_err(|m| usage(format!("config {}: {m}", path.display())))?;
    let seed = resolve_seed(seed_flag, env, cfg.seed)?;
    let (traj, reports) = integrate_config(&cfg)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let csv_path = resolve(base, &cfg.output.trajectory);
    write_csv(&csv_path, &traj)?;
    let blown = traj.blowup_at.is_some();
    let pass = !blown && reports.iter().all(|r| r.pass);
    let last = traj.last();
    let diag = Diagnostics {
        schema: SCHEMA,
        system: cfg.system.kind,
        flow: cfg.flow,
        n: cfg.n(),
        seed,
        samples: traj.len(),
        columns: traj.columns.clone(),
        final_time: last.map(|l| l.0),
        final_state: last.map(|l| l.1),
        blowup_at: traj.blowup_at,
        reports,
        pass,
    };
    let json = serde_json::to_string_pretty(&diag).map_err(numerical)?;
    let diag_path = resolve(base, &cfg.output.diagnostics);
    fs::write(&diag_path, json + "\n").map_err(|e| usage(format!("writing {}: {e}", diag_path.display())))?;
    let _ = writeln!(out, "wrote {} and {}", csv_path.display(), diag_path.display());
    if let Some(t) = traj.blowup_at {
        return Err(numerical(format!("trajectory blew up after t = {t}")));
    }
    Ok(if pass { Exit::Success } else { Exit::Numerical })
}

/// Runs the configured integration and evaluates the monitor reports.
pub fn integrate_config(cfg: &RunConfig) -> Result<(Trajectory, Vec<VerificationReport>), Failure> {
    match cfg.system.kind {
        SystemKind::Hamiltonian => {
            let expr = cfg.system.expression.as_deref().unwrap_or_default();
            let h = HamiltonianSystem::parse(cfg.n(), expr, &cfg.system.constants)
                .map_err(|e| usage(format!("system.expression: {e}")))?;
            hamiltonian_run(cfg, &h, &cfg.initial_state)
        }
        SystemKind::Thermo => {
            let get = |k: &str, d: f64| cfg.system.constants.get(k).copied().unwrap_or(d);
            let dk = GasConstants::default();
            let k = GasConstants::new(get("U0", dk.u0), get("c", dk.c), get("R", dk.r))
                .map_err(|e| usage(format!("system.constants: {e}")))?;
            let h = gas_hamiltonian(&k).map_err(numerical)?;
            let x0 = if cfg.initial_state.len() == 3 {
                let gas = gas_legendrian(&k).map_err(numerical)?;
                crate::legendrian::Submanifold::parametrize(&gas, &cfg.initial_state).map_err(numerical)?
            } else {
                cfg.initial_state.clone()
            };
            let (mut traj, reports) = hamiltonian_run(cfg, &h, &x0)?;
            traj.columns = GAS_COORDS.iter().map(|c| c.to_string()).collect();
            Ok((traj, reports))
        }
        SystemKind::Lagrangian => {
            let expr = cfg.system.expression.as_deref().unwrap_or_default();
            let reg = match cfg.system.regularity {
                RegularityArg::Regular => Regularity::Regular,
                RegularityArg::Degenerate => Regularity::Degenerate,
            };
            let sys = LagrangianSystem::parse(cfg.n(), expr, &cfg.system.constants, reg)
                .map_err(|e| usage(format!("system.expression: {e}")))?;
            lagrangian_run(cfg, &sys)
        }
    }
}

fn hamiltonian_run<H: Hamiltonian>(
    cfg: &RunConfig,
    h: &H,
    x0: &[f64],
) -> Result<(Trajectory, Vec<VerificationReport>), Failure> {
    let n = h.n();
    let flow = cfg.flow;
    let rate = move |x: &[f64]| -> crate::Result<f64> {
        let (hv, g) = h.value_gradient(x)?;
        let (v, rh) = match flow {
            FlowKind::Contact => contact_field_raw(h, x)?,
            FlowKind::Evolution => (evolution_field_raw(h, x)?, 0.0),
        };
        let dh: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        Ok((dh + rh * hv).abs() / (1.0 + hv.abs()))
    };
    let mut mons: Vec<Box<dyn Monitor + '_>> = Vec::new();
    for m in &cfg.monitors {
        mons.push(match m {
            MonitorKind::H => Box::new(FnMonitor::new("H", move |_, x: &[f64]| h.value(x).unwrap_or(f64::NAN))),
            MonitorKind::R => Box::new(FnMonitor::new("R(H)", move |_, x: &[f64]| {
                h.value_gradient(x).map_or(f64::NAN, |(_, g)| g[2 * n])
            })),
            MonitorKind::Dissipation => {
                Box::new(FnMonitor::new("dissipation", move |_, x: &[f64]| rate(x).unwrap_or(f64::NAN)))
            }
            _ => unreachable!("validated"),
        });
    }
    let span = (cfg.t_span[0], cfg.t_span[1]);
    let traj = match flow {
        FlowKind::Contact => contact_flow(h, x0, span, cfg.step, &mut mons),
        FlowKind::Evolution => evolution_flow(h, x0, span, cfg.step, &mut mons),
    }
    .map_err(numerical)?;
    let mut reports = Vec::new();
    if let Some(col) = traj.diagnostic("dissipation") {
        let law = match flow {
            FlowKind::Contact => "dissipation law dH/dt = -R(H) H",
            FlowKind::Evolution => "evolution flow conserves H",
        };
        let mut c = Check::new(law, cfg.tolerances.dissipation.unwrap_or(1e-6));
        col.iter().for_each(|r| c.record(*r));
        reports.push(c.finish());
    }
    Ok((traj, reports))
}

fn lagrangian_run(cfg: &RunConfig, sys: &LagrangianSystem) -> Result<(Trajectory, Vec<VerificationReport>), Failure> {
    let n = sys.n();
    let l = sys.lagrangian();
    let mut mons: Vec<Box<dyn Monitor + '_>> = Vec::new();
    for m in &cfg.monitors {
        match m {
            MonitorKind::L => {
                mons.push(Box::new(FnMonitor::new("L", move |_, s: &[f64]| l.value(s).unwrap_or(f64::NAN))))
            }
            MonitorKind::E => mons.push(Box::new(FnMonitor::new("E", move |_, s: &[f64]| {
                l.value_gradient(s).map_or(f64::NAN, |(v, g)| {
                    s[n..2 * n].iter().zip(&g[n..2 * n]).map(|(a, b)| a * b).sum::<f64>() - v
                })
            }))),
            _ => {}
        }
    }
    let kind = match cfg.flow {
        FlowKind::Contact => HerglotzKind::Contact,
        FlowKind::Evolution => HerglotzKind::Evolution,
    };
    let mut traj = herglotz_flow(sys, kind, &cfg.initial_state, (cfg.t_span[0], cfg.t_span[1]), cfg.step, &mut mons)
        .map_err(numerical)?;
    let mut reports = Vec::new();
    if cfg.monitors.contains(&MonitorKind::ConservedI) {
        let i = conserved_i(sys, &traj).map_err(numerical)?;
        let scale = i[0].abs().max(1e-300);
        let mut c = Check::new("conserved quantity I", cfg.tolerances.conserved_i.unwrap_or(1e-5));
        i.iter().for_each(|v| c.record((v - i[0]).abs() / scale));
        reports.push(c.finish());
        traj.push_diagnostic("I", i).map_err(numerical)?;
    }
    Ok((traj, reports))
}
