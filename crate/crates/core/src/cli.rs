//! Command-line front end: parses configs and flag overrides, runs the
//! solve/classify/check pipelines, and renders CSV profiles or JSON
//! reports.
//!
//! Configuration is resolved in three layers — built-in defaults, then a
//! JSON config file (`--config`), then explicit flags — and the fully
//! resolved configuration is embedded in every JSON report (and echoed by
//! `--print-config`) so a run can always be reproduced from its own
//! output. Identical configurations produce byte-identical artifacts.
//!
//! Exit codes: `0` success, `2` validation error (bad expression, bad
//! config, violated precondition), `3` numerical failure at runtime.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classify::{self, ClassifyOptions, TheoremVerdict};
use crate::conditions::{self, ConditionId, ConditionReport, DEFAULT_EPSILON_GRID};
use crate::expr::FunctionSpec;
use crate::picard::{self, Classification, ProblemSpec, SolveReport, SolveStatus, SystemSpec};
use crate::radial;
use crate::{Error, Result};

/// Default values for every configurable field, also listed in `--help`.
const DEFAULTS_HELP: &str = "\
Defaults:
  dimension = 3             k = 1
  weight_p = \"1\"            weight_q = \"1\"
  nonlinearity_h = \"u\"      nonlinearity_f, nonlinearity_g = (required for system modes)
  initial_value = 1         initial_value_v = 1
  r_max = 5                 grid_points = 800
  tol = 1e-8                max_iter = 200
  growth_ceiling = 1e8      epsilon_grid = [0.01, 0.05, 0.1, 0.5, 1]
  assume_large = false      format = csv for solve modes, json otherwise

Config file: a JSON object with the keys above plus `mode`, `condition`,
`format`, and `out`. Flags override config values, which override defaults.";

/// Command-line interface of the `khessian` binary.
#[derive(Debug, Parser)]
#[command(
    name = "khessian",
    version,
    about = "Radial solutions, cone verification, and existence/largeness \
             classification for weighted k-Hessian equations and systems",
    after_help = DEFAULTS_HELP
)]
pub struct Cli {
    /// Run mode; may also come from the config file's `mode` key.
    #[command(subcommand)]
    pub mode: Option<ModeCommand>,

    /// Path to a JSON config file providing any of the documented keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the artifact to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,

    /// Output format: `csv` (solution profile) or `json` (report).
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    pub format: Option<OutputFormat>,

    /// Condition to evaluate in `check` mode (e.g. P2, C3, EQ12S, GATE).
    #[arg(long, global = true, value_name = "ID")]
    pub condition: Option<String>,

    /// Print the fully resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,

    /// Space dimension N (default 3).
    #[arg(long, global = true, value_name = "N")]
    pub dimension: Option<u32>,

    /// Hessian order k (default 1).
    #[arg(long, global = true, value_name = "K")]
    pub k: Option<u32>,

    /// Weight p(t) for the (first) equation (default "1").
    #[arg(long = "p", global = true, value_name = "EXPR")]
    pub weight_p: Option<String>,

    /// Weight q(t) for the second equation (default "1").
    #[arg(long = "q", global = true, value_name = "EXPR")]
    pub weight_q: Option<String>,

    /// Scalar nonlinearity h(u) (default "u").
    #[arg(long = "h", global = true, value_name = "EXPR")]
    pub nonlinearity_h: Option<String>,

    /// System nonlinearity f(u, v); required for system modes.
    #[arg(long = "f", global = true, value_name = "EXPR")]
    pub nonlinearity_f: Option<String>,

    /// System nonlinearity g(u, v); required for system modes.
    #[arg(long = "g", global = true, value_name = "EXPR")]
    pub nonlinearity_g: Option<String>,

    /// Initial value u(0) (default 1).
    #[arg(long = "a", global = true, value_name = "VALUE")]
    pub initial_value: Option<f64>,

    /// Initial value v(0) for systems (default 1).
    #[arg(long = "a-v", global = true, value_name = "VALUE")]
    pub initial_value_v: Option<f64>,

    /// Domain radius r_max (default 5).
    #[arg(long, global = true, value_name = "R")]
    pub r_max: Option<f64>,

    /// Number of grid nodes (default 800).
    #[arg(long, global = true, value_name = "N")]
    pub grid_points: Option<usize>,

    /// Convergence tolerance for the iteration (default 1e-8).
    #[arg(long, global = true, value_name = "TOL")]
    pub tol: Option<f64>,

    /// Iteration budget (default 200).
    #[arg(long, global = true, value_name = "N")]
    pub max_iter: Option<usize>,

    /// Growth ceiling for blow-up detection (default 1e8).
    #[arg(long, global = true, value_name = "VALUE")]
    pub growth_ceiling: Option<f64>,

    /// Comma-separated epsilon ladder for the decay conditions
    /// (default 0.01,0.05,0.1,0.5,1).
    #[arg(
        long,
        global = true,
        value_name = "E1,E2,...",
        value_delimiter = ','
    )]
    pub epsilon_grid: Option<Vec<f64>>,

    /// Assert that a large solution exists, enabling the converse branches.
    #[arg(long, global = true)]
    pub assume_large: bool,
}

/// Subcommand selecting the run mode.
#[derive(Debug, Clone, Copy, Subcommand)]
pub enum ModeCommand {
    /// Solve the scalar equation and export the solution profile.
    Solve,
    /// Solve the two-component system and export both profiles.
    SolveSystem,
    /// Evaluate every scalar theorem branch.
    Classify,
    /// Evaluate every system theorem branch.
    ClassifySystem,
    /// Evaluate a single named condition (requires --condition).
    Check,
}

/// Run mode, as stored in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    SolveSystem,
    Classify,
    ClassifySystem,
    Check,
}

impl From<ModeCommand> for Mode {
    fn from(value: ModeCommand) -> Mode {
        match value {
            ModeCommand::Solve => Mode::Solve,
            ModeCommand::SolveSystem => Mode::SolveSystem,
            ModeCommand::Classify => Mode::Classify,
            ModeCommand::ClassifySystem => Mode::ClassifySystem,
            ModeCommand::Check => Mode::Check,
        }
    }
}

impl Mode {
    fn default_format(self) -> OutputFormat {
        match self {
            Mode::Solve | Mode::SolveSystem => OutputFormat::Csv,
            Mode::Classify | Mode::ClassifySystem | Mode::Check => OutputFormat::Json,
        }
    }
}

/// Artifact format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Per-node solution profile.
    Csv,
    /// Structured report with the resolved config embedded.
    Json,
}

/// Raw configuration as read from a JSON file: every key optional,
/// unknown keys rejected so typos cannot silently fall back to defaults.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub mode: Option<Mode>,
    pub dimension: Option<u32>,
    pub k: Option<u32>,
    pub weight_p: Option<String>,
    pub weight_q: Option<String>,
    pub nonlinearity_h: Option<String>,
    pub nonlinearity_f: Option<String>,
    pub nonlinearity_g: Option<String>,
    pub initial_value: Option<f64>,
    pub initial_value_v: Option<f64>,
    pub r_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub epsilon_grid: Option<Vec<f64>>,
    pub growth_ceiling: Option<f64>,
    pub assume_large: Option<bool>,
    pub condition: Option<String>,
    pub format: Option<OutputFormat>,
    pub out: Option<String>,
}

/// Fully resolved run configuration. Serialized into every JSON report and
/// by `--print-config`; feeding the echo back through `--config` reproduces
/// the run byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub dimension: u32,
    pub k: u32,
    pub weight_p: String,
    pub weight_q: String,
    pub nonlinearity_h: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity_f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity_g: Option<String>,
    pub initial_value: f64,
    pub initial_value_v: f64,
    pub r_max: f64,
    pub grid_points: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub epsilon_grid: Vec<f64>,
    pub growth_ceiling: f64,
    pub assume_large: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Cli {
    /// Flag values repackaged as a [`PartialConfig`] layer.
    fn as_overrides(&self) -> PartialConfig {
        PartialConfig {
            mode: self.mode.map(Mode::from),
            dimension: self.dimension,
            k: self.k,
            weight_p: self.weight_p.clone(),
            weight_q: self.weight_q.clone(),
            nonlinearity_h: self.nonlinearity_h.clone(),
            nonlinearity_f: self.nonlinearity_f.clone(),
            nonlinearity_g: self.nonlinearity_g.clone(),
            initial_value: self.initial_value,
            initial_value_v: self.initial_value_v,
            r_max: self.r_max,
            grid_points: self.grid_points,
            tol: self.tol,
            max_iter: self.max_iter,
            epsilon_grid: self.epsilon_grid.clone(),
            growth_ceiling: self.growth_ceiling,
            assume_large: self.assume_large.then_some(true),
            condition: self.condition.clone(),
            format: self.format,
            out: self.out.clone(),
        }
    }
}

impl PartialConfig {
    /// Overlays `self` on `base`: keys present here win, absent keys fall
    /// through to the base layer.
    pub fn overlay(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            mode: self.mode.or(base.mode),
            dimension: self.dimension.or(base.dimension),
            k: self.k.or(base.k),
            weight_p: self.weight_p.or(base.weight_p),
            weight_q: self.weight_q.or(base.weight_q),
            nonlinearity_h: self.nonlinearity_h.or(base.nonlinearity_h),
            nonlinearity_f: self.nonlinearity_f.or(base.nonlinearity_f),
            nonlinearity_g: self.nonlinearity_g.or(base.nonlinearity_g),
            initial_value: self.initial_value.or(base.initial_value),
            initial_value_v: self.initial_value_v.or(base.initial_value_v),
            r_max: self.r_max.or(base.r_max),
            grid_points: self.grid_points.or(base.grid_points),
            tol: self.tol.or(base.tol),
            max_iter: self.max_iter.or(base.max_iter),
            epsilon_grid: self.epsilon_grid.or(base.epsilon_grid),
            growth_ceiling: self.growth_ceiling.or(base.growth_ceiling),
            assume_large: self.assume_large.or(base.assume_large),
            condition: self.condition.or(base.condition),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
        }
    }
}

/// Resolves defaults, config file, and flags into a [`RunConfig`].
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str::<PartialConfig>(&text).map_err(|e| {
                Error::Invalid(format!("config {}: {e}", path.display()))
            })?
        }
        None => PartialConfig::default(),
    };
    resolve_partial(cli.as_overrides().overlay(file))
}

/// Fills a single merged layer with the documented defaults and validates
/// the cross-field rules. This is the whole configuration pipeline minus
/// flag/file shuffling, so embedders can feed a [`PartialConfig`] directly.
pub fn resolve_partial(layer: PartialConfig) -> Result<RunConfig> {
    let mode = layer.mode.ok_or_else(|| {
        Error::Invalid(
            "mode is required: pass a subcommand (solve, solve-system, \
             classify, classify-system, check) or a config with a `mode` key"
                .into(),
        )
    })?;
    let epsilon_grid = layer
        .epsilon_grid
        .unwrap_or_else(|| DEFAULT_EPSILON_GRID.to_vec());
    if epsilon_grid.is_empty() || epsilon_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Invalid(
            "epsilon_grid must be a non-empty list of positive finite values".into(),
        ));
    }
    let config = RunConfig {
        mode,
        dimension: layer.dimension.unwrap_or(3),
        k: layer.k.unwrap_or(1),
        weight_p: layer.weight_p.unwrap_or_else(|| "1".into()),
        weight_q: layer.weight_q.unwrap_or_else(|| "1".into()),
        nonlinearity_h: layer.nonlinearity_h.unwrap_or_else(|| "u".into()),
        nonlinearity_f: layer.nonlinearity_f,
        nonlinearity_g: layer.nonlinearity_g,
        initial_value: layer.initial_value.unwrap_or(1.0),
        initial_value_v: layer.initial_value_v.unwrap_or(1.0),
        r_max: layer.r_max.unwrap_or(5.0),
        grid_points: layer.grid_points.unwrap_or(800),
        tol: layer.tol.unwrap_or(1e-8),
        max_iter: layer.max_iter.unwrap_or(200),
        epsilon_grid,
        growth_ceiling: layer.growth_ceiling.unwrap_or(1e8),
        assume_large: layer.assume_large.unwrap_or(false),
        condition: layer.condition,
        format: layer.format.unwrap_or_else(|| mode.default_format()),
        out: layer.out,
    };
    if config.format == OutputFormat::Csv && !matches!(mode, Mode::Solve | Mode::SolveSystem) {
        return Err(Error::Invalid(
            "format = csv applies only to the solve modes; classify and \
             check emit JSON reports"
                .into(),
        ));
    }
    if mode == Mode::Check && config.condition.is_none() {
        return Err(Error::Invalid(
            "check requires `condition` (flag --condition or config key)".into(),
        ));
    }
    Ok(config)
}

impl RunConfig {
    fn problem_spec(&self) -> Result<ProblemSpec> {
        Ok(ProblemSpec {
            dimension: self.dimension,
            k: self.k,
            initial_value: self.initial_value,
            p: FunctionSpec::parse(&self.weight_p, 1)?,
            h: FunctionSpec::parse(&self.nonlinearity_h, 1)?,
            r_max: self.r_max,
            grid_points: self.grid_points,
            tol: self.tol,
            max_iter: self.max_iter,
            growth_ceiling: self.growth_ceiling,
        })
    }

    fn system_spec(&self) -> Result<SystemSpec> {
        let f = self.nonlinearity_f.as_deref().ok_or_else(|| {
            Error::Invalid("nonlinearity_f is required for system modes".into())
        })?;
        let g = self.nonlinearity_g.as_deref().ok_or_else(|| {
            Error::Invalid("nonlinearity_g is required for system modes".into())
        })?;
        Ok(SystemSpec {
            dimension: self.dimension,
            k: self.k,
            initial_value_u: self.initial_value,
            initial_value_v: self.initial_value_v,
            p: FunctionSpec::parse(&self.weight_p, 1)?,
            q: FunctionSpec::parse(&self.weight_q, 1)?,
            f: FunctionSpec::parse(f, 2)?,
            g: FunctionSpec::parse(g, 2)?,
            r_max: self.r_max,
            grid_points: self.grid_points,
            tol: self.tol,
            max_iter: self.max_iter,
            growth_ceiling: self.growth_ceiling,
        })
    }

    fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            assume_large: self.assume_large,
            epsilon_grid: self.epsilon_grid.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Report payloads
// ---------------------------------------------------------------------------

/// JSON report envelope: `config` always present, the other keys per mode.
#[derive(Serialize)]
struct Report<'a, S: Serialize> {
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    verdicts: Vec<TheoremVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<S>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition: Option<ConditionReport>,
}

/// Scalar solve summary for JSON reports.
#[derive(Serialize)]
struct SolveSummary {
    status: SolveStatus,
    iterations: usize,
    sup_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    gamma_k_certified: bool,
    classification: Classification,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl SolveSummary {
    fn from_report(report: &SolveReport) -> SolveSummary {
        SolveSummary {
            status: report.status,
            iterations: report.iterations,
            sup_value: report.sup_value,
            residual: report.residual,
            gamma_k_certified: report.gamma_k_certified,
            classification: report.classification,
            notes: report.notes.clone(),
        }
    }
}

/// Per-component part of a system solve summary.
#[derive(Serialize)]
struct ComponentSummary {
    sup_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    gamma_k_certified: bool,
    classification: Classification,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl ComponentSummary {
    fn from_report(report: &SolveReport) -> ComponentSummary {
        ComponentSummary {
            sup_value: report.sup_value,
            residual: report.residual,
            gamma_k_certified: report.gamma_k_certified,
            classification: report.classification,
            notes: report.notes.clone(),
        }
    }
}

/// System solve summary: shared iteration outcome plus both components.
#[derive(Serialize)]
struct SystemSolveSummary {
    status: SolveStatus,
    iterations: usize,
    u: ComponentSummary,
    v: ComponentSummary,
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

/// One float, 17 significant digits — round-trips exactly.
fn fmt_field(x: f64) -> String {
    format!("{x:.16e}")
}

fn scalar_csv(report: &SolveReport, problem: &ProblemSpec) -> Result<String> {
    let params = problem.params()?;
    let solution = &report.solution;
    let sk = radial::sigma_k_profile(solution, &params)?;
    let residual = radial::residual_profile(solution, problem)?;
    let mut out = String::from("r,u,du,S_k,residual\n");
    for i in 0..solution.nodes.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_field(solution.nodes[i]),
            fmt_field(solution.values[i]),
            fmt_field(solution.derivatives[i]),
            fmt_field(sk[i]),
            fmt_field(residual[i]),
        );
    }
    Ok(out)
}

fn system_csv(
    report_u: &SolveReport,
    report_v: &SolveReport,
    system: &SystemSpec,
) -> Result<String> {
    let params = system.params()?;
    let (u, v) = (&report_u.solution, &report_v.solution);
    let sk_u = radial::sigma_k_profile(u, &params)?;
    let sk_v = radial::sigma_k_profile(v, &params)?;
    let residual_u = radial::residual_profile_with(u, &params, |i, r| {
        Ok(system.p.eval1(r)? * system.f.eval2(u.values[i], v.values[i])?)
    })?;
    let residual_v = radial::residual_profile_with(v, &params, |i, r| {
        Ok(system.q.eval1(r)? * system.g.eval2(u.values[i], v.values[i])?)
    })?;
    let mut out = String::from("r,u,v,du,dv,S_k_u,S_k_v,residual_u,residual_v\n");
    for i in 0..u.nodes.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_field(u.nodes[i]),
            fmt_field(u.values[i]),
            fmt_field(v.values[i]),
            fmt_field(u.derivatives[i]),
            fmt_field(v.derivatives[i]),
            fmt_field(sk_u[i]),
            fmt_field(sk_v[i]),
            fmt_field(residual_u[i]),
            fmt_field(residual_v[i]),
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Check dispatch
// ---------------------------------------------------------------------------

/// Evaluates one named condition with only the inputs it needs.
fn run_check(config: &RunConfig) -> Result<ConditionReport> {
    let id = ConditionId::from_str(config.condition.as_deref().unwrap_or_default())?;
    let (k, n) = (config.k, config.dimension);
    let eps = &config.epsilon_grid;
    let p1 = || FunctionSpec::parse(&config.weight_p, 1);
    let q1 = || FunctionSpec::parse(&config.weight_q, 1);
    let h1 = || FunctionSpec::parse(&config.nonlinearity_h, 1);
    let f2 = || -> Result<FunctionSpec> {
        let src = config.nonlinearity_f.as_deref().ok_or_else(|| {
            Error::Invalid(format!("condition {id} needs nonlinearity_f"))
        })?;
        FunctionSpec::parse(src, 2)
    };
    let g2 = || -> Result<FunctionSpec> {
        let src = config.nonlinearity_g.as_deref().ok_or_else(|| {
            Error::Invalid(format!("condition {id} needs nonlinearity_g"))
        })?;
        FunctionSpec::parse(src, 2)
    };
    match id {
        ConditionId::P2 => conditions::check_weight_monotonicity(&[&p1()?], k, n),
        ConditionId::P3 => conditions::check_weight_monotonicity(&[&p1()?, &q1()?], k, n),
        ConditionId::C1 => conditions::check_nonlinearity_scalar(&h1()?),
        ConditionId::C2 => conditions::check_nonlinearity_system(&f2()?, &g2()?),
        ConditionId::C3 => conditions::check_keller_osserman_scalar(&h1()?, k),
        ConditionId::C4 => conditions::check_keller_osserman_system(&f2()?, &g2()?, k),
        ConditionId::Eq5 => conditions::check_weight_decay(&[&p1()?], k, eps),
        ConditionId::Eq5s => conditions::check_weight_decay(&[&p1()?, &q1()?], k, eps),
        ConditionId::Eq12 => conditions::check_weight_largeness_scalar(&p1()?, k, n),
        ConditionId::Eq12s => {
            conditions::check_weight_largeness_system(&p1()?, &q1()?, k, n)
        }
        ConditionId::Gate => conditions::dimension_gate(k, n),
        ConditionId::Eq13 => conditions::necessary_condition(&[&p1()?], k, n, eps),
        ConditionId::Eq13s => {
            conditions::necessary_condition(&[&p1()?, &q1()?], k, n, eps)
        }
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Numeric(format!("cannot serialize report: {e}")))
}

/// Runs the configured mode and renders the artifact text.
pub fn execute(config: &RunConfig) -> Result<String> {
    match config.mode {
        Mode::Solve => {
            let problem = config.problem_spec()?;
            let report = picard::solve_scalar(&problem)?;
            match config.format {
                OutputFormat::Csv => scalar_csv(&report, &problem),
                OutputFormat::Json => to_pretty_json(&Report {
                    config,
                    verdicts: Vec::new(),
                    solve: Some(SolveSummary::from_report(&report)),
                    condition: None,
                }),
            }
        }
        Mode::SolveSystem => {
            let system = config.system_spec()?;
            let (report_u, report_v) = picard::solve_system(&system)?;
            match config.format {
                OutputFormat::Csv => system_csv(&report_u, &report_v, &system),
                OutputFormat::Json => to_pretty_json(&Report {
                    config,
                    verdicts: Vec::new(),
                    solve: Some(SystemSolveSummary {
                        status: report_u.status,
                        iterations: report_u.iterations,
                        u: ComponentSummary::from_report(&report_u),
                        v: ComponentSummary::from_report(&report_v),
                    }),
                    condition: None,
                }),
            }
        }
        Mode::Classify => {
            let problem = config.problem_spec()?;
            let verdicts = classify::classify_scalar(&problem, &config.classify_options())?;
            to_pretty_json(&Report::<SolveSummary> {
                config,
                verdicts,
                solve: None,
                condition: None,
            })
        }
        Mode::ClassifySystem => {
            let system = config.system_spec()?;
            let verdicts = classify::classify_system(&system, &config.classify_options())?;
            to_pretty_json(&Report::<SolveSummary> {
                config,
                verdicts,
                solve: None,
                condition: None,
            })
        }
        Mode::Check => {
            let report = run_check(config)?;
            to_pretty_json(&Report::<SolveSummary> {
                config,
                verdicts: Vec::new(),
                solve: None,
                condition: Some(report),
            })
        }
    }
}

/// Full CLI entry point: resolve, run, deliver the artifact.
pub fn run(cli: &Cli) -> Result<()> {
    let config = resolve(cli)?;
    if cli.print_config {
        print!("{}", to_pretty_json(&config)?);
        return Ok(());
    }
    let artifact = execute(&config)?;
    match &config.out {
        Some(path) => fs::write(path, artifact)
            .map_err(|e| Error::Invalid(format!("cannot write out = {path}: {e}")))?,
        None => print!("{artifact}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("khessian").chain(args.iter().copied()))
            .expect("arguments should parse")
    }

    #[test]
    fn defaults_fill_every_field() {
        let config = resolve(&parse(&["solve"])).unwrap();
        assert_eq!(config.mode, Mode::Solve);
        assert_eq!(config.dimension, 3);
        assert_eq!(config.k, 1);
        assert_eq!(config.weight_p, "1");
        assert_eq!(config.weight_q, "1");
        assert_eq!(config.nonlinearity_h, "u");
        assert_eq!(config.nonlinearity_f, None);
        assert_eq!(config.initial_value, 1.0);
        assert_eq!(config.initial_value_v, 1.0);
        assert_eq!(config.r_max, 5.0);
        assert_eq!(config.grid_points, 800);
        assert_eq!(config.tol, 1e-8);
        assert_eq!(config.max_iter, 200);
        assert_eq!(config.epsilon_grid, DEFAULT_EPSILON_GRID.to_vec());
        assert_eq!(config.growth_ceiling, 1e8);
        assert!(!config.assume_large);
        assert_eq!(config.format, OutputFormat::Csv);
        assert_eq!(config.out, None);
    }

    #[test]
    fn classify_defaults_to_json() {
        let config = resolve(&parse(&["classify"])).unwrap();
        assert_eq!(config.format, OutputFormat::Json);
    }

    #[test]
    fn flags_override_config_file_which_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        fs::write(
            &path,
            r#"{"mode": "solve", "dimension": 5, "k": 2, "weight_p": "exp(-t)"}"#,
        )
        .unwrap();
        let cli = parse(&["--config", path.to_str().unwrap(), "--k", "1"]);
        let config = resolve(&cli).unwrap();
        assert_eq!(config.mode, Mode::Solve);
        assert_eq!(config.dimension, 5); // from file
        assert_eq!(config.k, 1); // flag wins
        assert_eq!(config.weight_p, "exp(-t)"); // from file
        assert_eq!(config.r_max, 5.0); // default
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = serde_json::from_str::<PartialConfig>(r#"{"weight": "1"}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown field"), "{err}");
    }

    #[test]
    fn mode_is_required() {
        let err = resolve(&parse(&["--k", "1"])).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("mode"));
    }

    #[test]
    fn check_requires_condition() {
        let err = resolve(&parse(&["check"])).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("condition"));
    }

    #[test]
    fn csv_is_rejected_outside_solve_modes() {
        let err = resolve(&parse(&["classify", "--format", "csv"])).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("format"));
    }

    #[test]
    fn system_modes_require_both_nonlinearities() {
        let config = resolve(&parse(&["classify-system", "--f", "(u+v)/2"])).unwrap();
        let err = execute(&config).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("nonlinearity_g"), "{err}");
    }

    #[test]
    fn bad_epsilon_grid_is_rejected() {
        let err = resolve(&parse(&["classify", "--epsilon-grid", "0.1,-0.5"])).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("epsilon_grid"));
    }

    #[test]
    fn unknown_condition_is_rejected() {
        let config = resolve(&parse(&["check", "--condition", "C9"])).unwrap();
        let err = execute(&config).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("C9"));
    }

    #[test]
    fn check_gate_runs_without_solver_inputs() {
        let config = resolve(&parse(&["check", "--condition", "gate", "--dimension", "4", "--k", "2"])).unwrap();
        let artifact = execute(&config).unwrap();
        let json: serde_json::Value = serde_json::from_str(&artifact).unwrap();
        assert_eq!(json["condition"]["condition"], "GATE");
        assert_eq!(json["condition"]["verdict"], "Fails");
        assert_eq!(json["config"]["mode"], "check");
    }

    #[test]
    fn csv_fields_have_seventeen_significant_digits() {
        let line = fmt_field(std::f64::consts::PI);
        assert_eq!(line, "3.1415926535897931e0");
        assert_eq!(line.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}
