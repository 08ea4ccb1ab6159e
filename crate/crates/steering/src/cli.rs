//! Command-line front end. The binary only parses arguments and calls [`run`].
//!
//! Every command produces one table. CSV output starts with `# key=value`
//! header lines (tool, version, command, seed, tol, method, and command
//! specific entries); JSON output carries the same header under `"meta"`.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::plateau::{
    bisect_plateau, curve_table, esi_closed_form_curve, f_eps, grid_oracle, lemma_witness_bound, pauli_bound,
    plateau_n4, seesaw_strategy, taylor_plateau, CurvePoint, Method,
};
use crate::quantum::{bloch_of, ImprecisionSpec};
use crate::relax::{
    plateau_sdp, randomness_curve, randomness_table, relaxation_bound, witness_basis, RandomnessSettings,
};
use crate::robustness::{
    detection_sdp_n4, dodecahedron_eta, dodecahedron_eta_ideal, esi_efficiency_curve, eta_crit_esi_at, eta_crit_n4,
    n4_quantum_value, pauli_eta_search, theta_limit, EfficiencyCurve, EfficiencySample,
};
use crate::table::{sig12, Table};
use crate::witness::{builtin, distinct_strategies, lhs_bound, quantum_value, Witness};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "steering", version, about = "Steering witnesses under imprecise measurements")]
pub struct Cli {
    /// Key-value config file (TOML); flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Monomial level of the moment-matrix relaxations.
    #[arg(long, global = true)]
    pub level: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Built-in witnesses with their LHS bounds and quantum values.
    Catalog,
    /// Write a witness as JSON (the format accepted wherever a witness file is).
    Export(WitnessArg),
    /// LHS bound of a witness, exact or under imprecise lab measurements.
    Lhs(LhsArgs),
    /// Plateau length: the largest imprecision keeping the LHS bound at its ideal value.
    Plateau(PlateauArgs),
    /// Critical detection efficiency.
    Robustness(RobustnessArgs),
    /// Guessing probability and certified randomness against the witness value.
    Randomness(RandomnessArgs),
}

#[derive(Args, Debug)]
pub struct WitnessArg {
    /// Built-in name (esi, pauli, dodecahedron, family, family<n>) or a witness JSON file.
    pub witness: String,
    /// Size for `family`.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct EpsArgs {
    /// Uniform imprecision for every Bob input.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps_x: Option<f64>,
    #[arg(long)]
    pub eps_y: Option<f64>,
    #[arg(long)]
    pub eps_z: Option<f64>,
}

#[derive(Args, Debug)]
pub struct LhsArgs {
    #[command(flatten)]
    pub witness: WitnessArg,
    #[command(flatten)]
    pub eps: EpsArgs,
    /// lemma (default), closed-form, grid, seesaw or sdp; ignored at ε = 0.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Args, Debug)]
pub struct PlateauArgs {
    #[command(flatten)]
    pub witness: WitnessArg,
    /// closed-form, lemma, grid, seesaw (uniform ε) or taylor, sdp (ε_Z surface).
    #[arg(long, default_value = "closed-form")]
    pub method: String,
    #[arg(long, default_value_t = 0.0)]
    pub eps_x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eps_y: f64,
    /// Surface grid `start:stop:count`, used for both ε_X and ε_Y.
    #[arg(long)]
    pub grid: Option<String>,
    /// Samples of the uniform-ε bound curve.
    #[arg(long, default_value_t = 51)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps_max: f64,
}

#[derive(Args, Debug)]
pub struct RobustnessArgs {
    /// esi, pauli, dodecahedron or family4.
    pub witness: String,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Sample the efficiency over θ ∈ (0, π/4] (esi, family4).
    #[arg(long)]
    pub theta_sweep: bool,
    /// Sample the detection program over η ∈ (0, 1] (family4).
    #[arg(long)]
    pub eta_sweep: bool,
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct RandomnessArgs {
    #[command(flatten)]
    pub witness: WitnessArg,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// A single observed witness value instead of a sweep.
    #[arg(long)]
    pub value: Option<f64>,
    /// Points of the sweep from the LHS bound to the quantum value.
    #[arg(long, default_value_t = 21)]
    pub sweep: usize,
    /// Points of the multiplier grid.
    #[arg(long, default_value_t = 81)]
    pub grid: usize,
    #[arg(long, default_value_t = 40.0)]
    pub lambda_max: f64,
}

/// Global settings after merging the config file and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub level: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 1, tol: 1e-8, out: None, format: Format::Csv, level: 1 }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    level: Option<usize>,
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = &cli.config {
            let text = std::fs::read_to_string(path)?;
            let file: ConfigFile =
                toml::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
            cfg.seed = file.seed.unwrap_or(cfg.seed);
            cfg.tol = file.tol.unwrap_or(cfg.tol);
            cfg.out = file.out.or(cfg.out);
            cfg.format = file.format.unwrap_or(cfg.format);
            cfg.level = file.level.unwrap_or(cfg.level);
        }
        cfg.seed = cli.seed.unwrap_or(cfg.seed);
        cfg.tol = cli.tol.unwrap_or(cfg.tol);
        cfg.out = cli.out.clone().or(cfg.out);
        cfg.format = cli.format.unwrap_or(cfg.format);
        cfg.level = cli.level.unwrap_or(cfg.level);
        if !(cfg.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if cfg.level == 0 {
            return Err(invalid("level must be at least 1"));
        }
        Ok(cfg)
    }
}

/// Whether the computation certified something (steering, randomness) or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// The observed or attainable value does not exceed the LHS bound.
    NoViolation,
}

/// Result of one command before rendering.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub method: String,
    pub meta: Vec<(String, String)>,
    pub table: Table,
    pub result: Option<Value>,
    /// Verbatim output that replaces the rendered table (witness export).
    pub raw: Option<String>,
    pub outcome: Outcome,
}

impl Report {
    fn new(command: &str, method: &str, table: Table) -> Self {
        Self {
            command: command.to_string(),
            method: method.to_string(),
            meta: Vec::new(),
            table,
            result: None,
            raw: None,
            outcome: Outcome::Done,
        }
    }

    fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    fn header(&self, cfg: &RunConfig) -> Vec<(String, String)> {
        let mut h = vec![
            ("tool".to_string(), TOOL.to_string()),
            ("version".to_string(), VERSION.to_string()),
            ("command".to_string(), self.command.clone()),
            ("seed".to_string(), cfg.seed.to_string()),
            ("tol".to_string(), sig12(cfg.tol)),
            ("method".to_string(), self.method.clone()),
        ];
        h.extend(self.meta.iter().cloned());
        h
    }

    /// The rendered artifact.
    pub fn render(&self, cfg: &RunConfig) -> Result<String> {
        if let Some(raw) = &self.raw {
            return Ok(raw.clone());
        }
        match cfg.format {
            Format::Csv => Ok(self.table.to_csv(&self.header(cfg))),
            Format::Json => {
                let meta: serde_json::Map<String, Value> =
                    self.header(cfg).into_iter().map(|(k, v)| (k, Value::String(v))).collect();
                let mut doc = json!({
                    "meta": meta,
                    "columns": self.table.columns,
                    "rows": self.table.rows,
                });
                if let Some(r) = &self.result {
                    doc["result"] = r.clone();
                }
                let mut s = serde_json::to_string_pretty(&doc)?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

/// Exit status: 0 success, 2 infeasible or no violation, 1 anything else.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::NoViolation) | Err(Error::Infeasible(_)) => 2,
        Err(Error::Strategy { source, .. }) if matches!(**source, Error::Infeasible(_)) => 2,
        Err(_) => 1,
    }
}

/// Runs the parsed command, writes the artifact, and reports the outcome.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(cli)?;
    let report = execute(&cli.command, &cfg)?;
    let text = report.render(&cfg)?;
    match &cfg.out {
        Some(path) => {
            write_file(path, &text)?;
            println!("{}: wrote {}", report.command, path.display());
        }
        None => print!("{text}"),
    }
    Ok(report.outcome)
}

/// Computes a command's report without writing anything.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Catalog => cmd_catalog(),
        Command::Export(a) => cmd_export(a),
        Command::Lhs(a) => cmd_lhs(a, cfg),
        Command::Plateau(a) => cmd_plateau(a, cfg),
        Command::Robustness(a) => cmd_robustness(a, cfg),
        Command::Randomness(a) => cmd_randomness(a, cfg),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// A built-in witness by name or a JSON witness file.
pub fn resolve_witness(arg: &WitnessArg) -> Result<Witness> {
    let path = Path::new(&arg.witness);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        return Witness::load(path);
    }
    match (arg.witness.as_str(), arg.n) {
        ("family", Some(n)) => builtin(&format!("family{n}")),
        ("family", None) => Err(invalid("family needs --n")),
        (name, None) => builtin(name),
        (name, Some(_)) => Err(invalid(format!("--n only applies to family, not {name}"))),
    }
}

impl EpsArgs {
    fn uniform(eps: f64) -> Self {
        Self { eps: Some(eps), ..Default::default() }
    }

    /// Per-input ε; the x/y/z flags need a three-target witness.
    pub fn spec(&self, n_y: usize) -> Result<ImprecisionSpec> {
        let base = self.eps.unwrap_or(0.0);
        if self.eps_x.is_some() || self.eps_y.is_some() || self.eps_z.is_some() {
            if n_y != 3 {
                return Err(invalid("--eps-x/y/z need a witness with three Bob inputs"));
            }
            let e = [self.eps_x, self.eps_y, self.eps_z].map(|v| v.unwrap_or(base));
            return ImprecisionSpec::per_setting(&e);
        }
        ImprecisionSpec::uniform(n_y, base)
    }
}

fn per_setting(spec: &ImprecisionSpec) -> Vec<f64> {
    (0..spec.n_y()).map(|y| spec.get(0, y).min(spec.get(1, y))).collect()
}

fn eps_label(spec: &ImprecisionSpec) -> String {
    per_setting(spec).iter().map(|e| sig12(*e)).collect::<Vec<_>>().join(";")
}

fn cmd_catalog() -> Result<Report> {
    let mut t = Table::new(&["witness", "n_x", "n_y", "dim", "lhs_bound", "quantum_value"]);
    let names = ["esi", "pauli", "dodecahedron", "family3", "family4", "family5", "family6"];
    for name in names {
        let w = builtin(name)?;
        t.push(vec![
            name.to_string(),
            w.n_x().to_string(),
            w.n_y().to_string(),
            w.dim().to_string(),
            sig12(lhs_bound(&w)?),
            sig12(quantum_value(&w)?.value),
        ]);
    }
    Ok(Report::new("catalog", "enumeration", t))
}

fn cmd_export(a: &WitnessArg) -> Result<Report> {
    let w = resolve_witness(a)?;
    let mut t = Table::new(&["witness", "n_x", "n_y", "dim"]);
    t.push(vec![w.name().to_string(), w.n_x().to_string(), w.n_y().to_string(), w.dim().to_string()]);
    let mut r = Report::new("export", "none", t);
    r.raw = Some(w.to_json()? + "\n");
    Ok(r)
}

/// Pauli X, Y, Z targets in that order, as needed by the Bloch-grid oracle.
fn has_pauli_targets(w: &Witness) -> bool {
    w.dim() == 2
        && w.n_y() == 3
        && w.targets().iter().enumerate().all(|(y, t)| {
            let b = bloch_of(t.op());
            (0..3).all(|k| (b[k] - if k == y { 1.0 } else { 0.0 }).abs() < 1e-12)
        })
}

/// max over strategies of t₀ + grid_oracle(t, ε).
fn grid_bound(w: &Witness, spec: &ImprecisionSpec) -> Result<f64> {
    if !has_pauli_targets(w) {
        return Err(invalid("the grid oracle needs Pauli X, Y, Z targets"));
    }
    let e = per_setting(spec);
    let mut best = f64::NEG_INFINITY;
    for (_, t, t0) in distinct_strategies(w)? {
        best = best.max(t0 + grid_oracle([t[0], t[1], t[2]], [e[0], e[1], e[2]], 400));
    }
    Ok(best)
}

fn seesaw_bound(w: &Witness, spec: &ImprecisionSpec, seed: u64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for (i, (_, t, t0)) in distinct_strategies(w)?.iter().enumerate() {
        best = best.max(seesaw_strategy(w, t, *t0, spec, 4, seed.wrapping_add(1000 * i as u64))?);
    }
    Ok(best)
}

fn closed_form_bound(w: &Witness, spec: &ImprecisionSpec) -> Result<f64> {
    let e = per_setting(spec);
    if e.iter().any(|v| *v != e[0]) {
        return Err(invalid("closed forms are for uniform ε"));
    }
    match w.name() {
        "esi" => Ok(f_eps(e[0])?.max(1.0)),
        "pauli" => pauli_bound(e[0]),
        other => Err(invalid(format!("no closed form for {other}; use lemma, seesaw or sdp"))),
    }
}

/// Bound by method name at one ε.
fn bound_by(w: &Witness, spec: &ImprecisionSpec, method: Method, cfg: &RunConfig) -> Result<f64> {
    match method {
        Method::ClosedForm => closed_form_bound(w, spec),
        Method::Lemma => lemma_witness_bound(w, spec),
        Method::Grid => grid_bound(w, spec),
        Method::Seesaw => seesaw_bound(w, spec, cfg.seed),
        Method::Sdp => Ok(relaxation_bound(w, spec, &witness_basis(w, cfg.level, cfg.seed)?)?.bound),
        Method::Taylor => Err(invalid("taylor gives plateau lengths, not bounds")),
    }
}

fn cmd_lhs(a: &LhsArgs, cfg: &RunConfig) -> Result<Report> {
    let w = resolve_witness(&a.witness)?;
    let spec = a.eps.spec(w.n_y())?;
    let beta0 = lhs_bound(&w)?;
    let mut t = Table::new(&["witness", "eps", "method", "beta0", "bound"]);
    let (method, bound, result) = if spec.is_exact() && a.method.is_none() {
        ("enumeration".to_string(), beta0, None)
    } else {
        let m = Method::parse(a.method.as_deref().unwrap_or("lemma"))?;
        if m == Method::Sdp {
            let basis = witness_basis(&w, cfg.level, cfg.seed)?;
            let sol = relaxation_bound(&w, &spec, &basis)?;
            let doc = json!({
                "witness": w.name(),
                "eps": per_setting(&spec),
                "level": cfg.level,
                "side": basis.side(),
                "variables": basis.num_variables(),
                "per_strategy_bounds": sol
                    .per_strategy
                    .iter()
                    .map(|(outputs, b)| json!({ "outputs": outputs, "bound": b }))
                    .collect::<Vec<_>>(),
                "bound": sol.bound,
                "solver_stats": { "iterations": sol.iterations, "max_duality_gap": sol.max_duality_gap },
            });
            (m.as_str().to_string(), sol.bound, Some(doc))
        } else {
            (m.as_str().to_string(), bound_by(&w, &spec, m, cfg)?, None)
        }
    };
    t.push(vec![w.name().to_string(), eps_label(&spec), method.clone(), sig12(beta0), sig12(bound)]);
    let mut r = Report::new("lhs", &method, t).meta("witness", w.name()).meta("eps", eps_label(&spec));
    if method == "sdp" {
        r = r.meta("level", cfg.level);
    }
    r.result = result;
    Ok(r)
}

/// `start:stop:count` → evenly spaced values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || invalid(format!("grid '{s}' is not start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match count {
        0 => Err(bad()),
        1 => Ok(vec![start]),
        n => Ok((0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()),
    }
}

fn cmd_plateau(a: &PlateauArgs, cfg: &RunConfig) -> Result<Report> {
    let w = resolve_witness(&a.witness)?;
    let method = Method::parse(&a.method)?;
    match method {
        Method::Taylor | Method::Sdp => plateau_surface(&w, a, method, cfg),
        _ => plateau_uniform(&w, a, method, cfg),
    }
}

fn plateau_uniform(w: &Witness, a: &PlateauArgs, method: Method, cfg: &RunConfig) -> Result<Report> {
    if !(a.eps_max > 0.0) || a.samples < 2 {
        return Err(invalid("need eps-max > 0 and at least two samples"));
    }
    let beta0 = lhs_bound(w)?;
    if method == Method::ClosedForm && w.name() == "esi" {
        let res = esi_closed_form_curve(a.samples, a.eps_max)?;
        return Ok(Report::new("plateau", method.as_str(), res.to_table())
            .meta("witness", w.name())
            .meta("epsilon_star", sig12(res.epsilon_star)));
    }
    if method == Method::ClosedForm && w.name() == "family4" {
        let p = plateau_n4();
        let mut t = Table::new(&["eps_tilde_star", "bisection"]);
        t.push(vec![sig12(p.eps_tilde_star), sig12(p.bisection)]);
        return Ok(Report::new("plateau", method.as_str(), t)
            .meta("witness", w.name())
            .meta("epsilon_star", sig12(p.eps_tilde_star)));
    }
    let n_y = w.n_y();
    let bound = |e: f64| -> Result<f64> { bound_by(w, &ImprecisionSpec::uniform(n_y, e)?, method, cfg) };
    // surface the first failure instead of folding it into the bisection
    bound(0.0)?;
    let mut star = bisect_plateau(|e| bound(e).unwrap_or(f64::INFINITY), beta0 + 1e-9, 0.0, a.eps_max, cfg.tol);
    if star <= 2.0 * cfg.tol {
        star = 0.0;
    }
    let mut curve = Vec::with_capacity(a.samples);
    for i in 0..a.samples {
        let e = a.eps_max * i as f64 / (a.samples - 1) as f64;
        curve.push(CurvePoint { eps: [e; 3], bound: bound(e)? });
    }
    let mut r = Report::new("plateau", method.as_str(), curve_table(&curve, method))
        .meta("witness", w.name())
        .meta("epsilon_star", sig12(star));
    if star == 0.0 {
        r.outcome = Outcome::NoViolation;
        r = r.meta("note", "no plateau: the bound grows immediately");
    }
    Ok(r)
}

fn plateau_surface(w: &Witness, a: &PlateauArgs, method: Method, cfg: &RunConfig) -> Result<Report> {
    let pairs: Vec<(f64, f64)> = match &a.grid {
        Some(g) => {
            let vals = parse_grid(g)?;
            vals.iter().flat_map(|x| vals.iter().map(move |y| (*x, *y))).collect()
        }
        None => vec![(a.eps_x, a.eps_y)],
    };
    let basis = match method {
        Method::Sdp => Some(witness_basis(w, cfg.level, cfg.seed)?),
        _ => {
            if w.name() != "esi" {
                return Err(invalid("the expansion is for the elegant inequality"));
            }
            None
        }
    };
    let mut t = Table::new(&["eps_x", "eps_y", "eps_z_star", "method"]);
    for (ex, ey) in pairs {
        let ez = match &basis {
            Some(b) => plateau_sdp(w, ex, ey, b)?,
            None => taylor_plateau(ex, ey)?,
        };
        t.push(vec![sig12(ex), sig12(ey), sig12(ez), method.as_str().to_string()]);
    }
    let mut r = Report::new("plateau", method.as_str(), t).meta("witness", w.name());
    if let Some(b) = &basis {
        r = r.meta("level", cfg.level).meta("side", b.side()).meta("variables", b.num_variables());
    }
    Ok(r)
}

fn theta_grid(samples: usize) -> Vec<f64> {
    let n = samples.max(1);
    (1..=n).map(|k| FRAC_PI_4 * k as f64 / n as f64).collect()
}

fn eta_row(t: &mut Table, witness: &str, eps: f64, beta: f64, eta: f64, extra: Option<(f64, f64, f64)>) {
    let (theta, q, c) = match extra {
        Some((a, b, c)) => (sig12(a), sig12(b), sig12(c)),
        None => (String::new(), String::new(), String::new()),
    };
    t.push(vec![witness.to_string(), sig12(eps), sig12(beta), sig12(eta), theta, q, c]);
}

fn cmd_robustness(a: &RobustnessArgs, cfg: &RunConfig) -> Result<Report> {
    let cols = ["witness", "eps", "beta", "eta_crit", "theta", "Q", "C"];
    let name = a.witness.as_str();
    let mut r = match name {
        "esi" => {
            let eta = eta_crit_esi_at(a.eps)?;
            let beta = f_eps(a.eps)?.max(1.0);
            if a.theta_sweep {
                let curve = esi_efficiency_curve(&theta_grid(a.samples), a.eps)?;
                Report::new("robustness", "closed-form", curve.to_table()).meta("eta_crit", sig12(eta))
            } else {
                let mut t = Table::new(&cols);
                eta_row(&mut t, name, a.eps, beta, eta, None);
                Report::new("robustness", "closed-form", t)
            }
        }
        "pauli" => {
            let s = pauli_eta_search(a.eps, cfg.seed)?;
            let mut t = Table::new(&cols);
            eta_row(&mut t, name, a.eps, pauli_bound(a.eps)?.max(1.0), s.eta, Some((s.theta, s.q, s.c)));
            Report::new("robustness", "search", t)
        }
        "dodecahedron" => {
            let w = builtin(name)?;
            let (beta, s) = if a.eps == 0.0 {
                (lhs_bound(&w)?, dodecahedron_eta_ideal(cfg.seed)?)
            } else {
                let beta = lemma_witness_bound(&w, &ImprecisionSpec::uniform(w.n_y(), a.eps)?)?;
                (beta, dodecahedron_eta(beta, cfg.seed)?)
            };
            let mut t = Table::new(&cols);
            eta_row(&mut t, name, a.eps, beta, s.eta, Some((s.theta, s.q, s.c)));
            Report::new("robustness", if a.eps == 0.0 { "search" } else { "lemma+search" }, t)
        }
        "family4" => {
            if a.eps != 0.0 {
                return Err(invalid("family4 efficiencies are computed at ε = 0"));
            }
            let limit = theta_limit(eta_crit_n4)?;
            if a.eta_sweep {
                let mut t = Table::new(&["eta", "value", "Q", "C", "detectable"]);
                for k in 1..=a.samples.max(1) {
                    let p = detection_sdp_n4(k as f64 / a.samples.max(1) as f64)?;
                    t.push(vec![sig12(p.eta), sig12(p.value), sig12(p.q), sig12(p.c), p.detectable.to_string()]);
                }
                Report::new("robustness", "sdp", t).meta("eta_limit", sig12(limit))
            } else if a.theta_sweep {
                let mut curve = EfficiencyCurve::default();
                for theta in theta_grid(a.samples) {
                    let (q, c) = n4_quantum_value(theta)?;
                    let eta = eta_crit_n4(theta)?;
                    curve.samples.push(EfficiencySample { parameter: theta, q, c, eta_crit: eta, eps: 0.0 });
                }
                Report::new("robustness", "ansatz", curve.to_table()).meta("eta_limit", sig12(limit))
            } else {
                let mut t = Table::new(&cols);
                eta_row(&mut t, name, 0.0, 1.0, limit, None);
                Report::new("robustness", "ansatz-limit", t)
            }
        }
        other => return Err(invalid(format!("no efficiency analysis for '{other}'"))),
    };
    r = r.meta("witness", name).meta("eps", sig12(a.eps));
    let undetectable = r.table.columns.iter().position(|c| c == "eta_crit").is_some_and(|k| {
        r.table.rows.len() == 1 && r.table.rows[0][k].parse::<f64>().is_ok_and(|v| v >= 1.0)
    });
    if undetectable {
        r.outcome = Outcome::NoViolation;
    }
    Ok(r)
}

fn cmd_randomness(a: &RandomnessArgs, cfg: &RunConfig) -> Result<Report> {
    let w = resolve_witness(&a.witness)?;
    let spec = EpsArgs::uniform(a.eps).spec(w.n_y())?;
    let beta = lemma_witness_bound(&w, &spec)?;
    let settings = RandomnessSettings { lambda_max: a.lambda_max, grid: a.grid, tol: cfg.tol };
    let values = match a.value {
        Some(v) => vec![v],
        None => {
            let q = quantum_value(&w)?.value;
            let n = a.sweep.max(2);
            (0..n).map(|i| beta + (q - beta) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let points = randomness_curve(&w, &values, &spec, &settings)?;
    let method = if spec.is_exact() { "dual-exact" } else { "dual-lifted" };
    let mut r = Report::new("randomness", method, randomness_table(&points))
        .meta("witness", w.name())
        .meta("eps", sig12(a.eps))
        .meta("lhs_bound", sig12(beta))
        .meta("grid", a.grid)
        .meta("lambda_max", sig12(a.lambda_max));
    if a.value.is_some_and(|v| v <= beta) {
        r.outcome = Outcome::NoViolation;
    }
    Ok(r)
}
