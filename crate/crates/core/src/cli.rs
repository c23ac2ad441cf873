//! Command-line front end.
//!
//! Settings come from an optional JSON config file and from flags, flags winning. The resolved
//! settings, defaults included, are embedded in every output together with the tool version:
//! as a top-level `config` object in JSON and as a leading `#` comment line in CSV.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::env::CookieEnvironment;
use crate::error::Error;
use crate::harness::{self, Verdict};
use crate::idla;
use crate::pbm::{self, PbmParams};
use crate::rng::RandomStream;
use crate::theory;
use crate::walk::{self, WalkState, DEFAULT_MAX_STEPS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const TOOL: &str = "cookie-idla";

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Mean x_N against the predicted limit.
    Lln,
    /// Empirical h_n(x) against gambler's ruin or h(x).
    #[value(name = "h-n")]
    #[serde(rename = "h-n")]
    HN,
    /// Escape-radius proxy for P(X_n -> +inf), at R and 2R.
    Transient,
    /// KS test of X_n / sqrt(n) against the perturbed Brownian motion at time 1.
    Clt,
    /// Martingale-increment diagnostics along one trajectory.
    Sa,
    /// h_n(x) under a dominating environment is not smaller.
    Dominance,
    /// Perturbed Brownian motion exit probability against h(x).
    PbmH,
}

/// Every setting a subcommand may read. Unset fields take per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pos_cookies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neg_cookies: Option<Vec<f64>>,
    /// Second environment of a dominance check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_pos_cookies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_neg_cookies: Option<Vec<f64>>,
    /// Cluster size N.
    #[serde(skip_serializing_if = "Option::is_none", alias = "N")]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux_walks: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub every: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "seed")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(&mut self, top: &RunConfig) {
        overlay!(
            self, top, pos_cookies, neg_cookies, lo_pos_cookies, lo_neg_cookies, n_max, replicas,
            n, x, alpha, beta, alphas, betas, dt, steps, right, left, max_steps, escape_radius,
            record_every, slack_c, aux_walks, every, master_seed, out, format
        );
    }
}

#[derive(Parser, Debug)]
#[command(name = TOOL, version, about = "Internal DLA driven by excited random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON file with RunConfig keys; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (required for every stochastic command).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct Params {
    /// Positive-side cookie stack, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pos_cookies: Option<Vec<f64>>,
    /// Negative-side cookie stack, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    neg_cookies: Option<Vec<f64>>,
    /// Positive stack of the dominated environment (dominance check).
    #[arg(long, value_delimiter = ',')]
    lo_pos_cookies: Option<Vec<f64>>,
    /// Negative stack of the dominated environment (dominance check).
    #[arg(long, value_delimiter = ',')]
    lo_neg_cookies: Option<Vec<f64>>,
    /// Cluster size N.
    #[arg(long = "n-max", visible_alias = "N")]
    n_max: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Walk scale n.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    betas: Option<Vec<f64>>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    right: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    left: Option<i64>,
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    escape_radius: Option<u64>,
    #[arg(long)]
    record_every: Option<u64>,
    #[arg(long)]
    slack_c: Option<f64>,
    #[arg(long)]
    aux_walks: Option<u64>,
    #[arg(long)]
    every: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Path of one excited walk: step,position,local_time.
    SimulateWalk {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Cluster trajectory: n,d,x.
    SimulateIdla {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Perturbed Brownian motion path: t,y,b,m,i.
    SimulatePbm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Deterministic theory.
    Theory {
        #[command(subcommand)]
        query: TheoryQuery,
    },
    /// Runs one experiment and reports a verdict.
    Verify {
        #[arg(value_enum)]
        experiment: Experiment,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Mean x_N against the fixed point over a grid of (alpha, beta).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Subcommand, Debug)]
enum TheoryQuery {
    /// h(x) = P(perturbed BM hits x before x - 1).
    H {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// The fixed point p with h(p) = p.
    FixedPoint {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Regime and predicted limit of x_n for an environment.
    Predict {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
}

impl Params {
    fn to_config(&self, common: &Common) -> RunConfig {
        RunConfig {
            pos_cookies: self.pos_cookies.clone(),
            neg_cookies: self.neg_cookies.clone(),
            lo_pos_cookies: self.lo_pos_cookies.clone(),
            lo_neg_cookies: self.lo_neg_cookies.clone(),
            n_max: self.n_max,
            replicas: self.replicas,
            n: self.n,
            x: self.x,
            alpha: self.alpha,
            beta: self.beta,
            alphas: self.alphas.clone(),
            betas: self.betas.clone(),
            dt: self.dt,
            steps: self.steps,
            right: self.right,
            left: self.left,
            max_steps: self.max_steps,
            escape_radius: self.escape_radius,
            record_every: self.record_every,
            slack_c: self.slack_c,
            aux_walks: self.aux_walks,
            every: self.every,
            master_seed: common.seed,
            out: common.out.clone(),
            format: common.format,
        }
    }
}

/// A failure to run: bad configuration (exit 2) or a numerical error.
#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Resolved configuration with accessors that apply defaults and record them.
struct Resolved(RunConfig);

impl Resolved {
    fn new(common: &Common, params: &Params) -> Result<Self, Failure> {
        let mut cfg = match &common.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.overlay(&params.to_config(common));
        Ok(Resolved(cfg))
    }

    fn seed(&self) -> Result<u64, Failure> {
        self.0
            .master_seed
            .ok_or_else(|| Failure("a master seed is required (--seed or master_seed)".into()))
    }

    fn env(&mut self) -> Result<CookieEnvironment, Failure> {
        let pos = self.0.pos_cookies.get_or_insert_with(Vec::new).clone();
        let neg = self.0.neg_cookies.get_or_insert_with(Vec::new).clone();
        Ok(CookieEnvironment::new(pos, neg)?)
    }

    fn lo_env(&mut self) -> Result<CookieEnvironment, Failure> {
        let pos = self.0.lo_pos_cookies.get_or_insert_with(Vec::new).clone();
        let neg = self.0.lo_neg_cookies.get_or_insert_with(Vec::new).clone();
        Ok(CookieEnvironment::new(pos, neg)?)
    }

    fn format(&mut self, default: Format) -> Format {
        *self.0.format.get_or_insert(default)
    }
}

/// `Option<T>` field with a default, stored back into the config; counts must be >= 1.
macro_rules! count {
    ($cfg:expr, $field:ident, $default:expr) => {{
        let v = *$cfg.0.$field.get_or_insert($default);
        if v == 0 {
            return Err(Failure(format!("{} must be >= 1", stringify!($field))));
        }
        v
    }};
}

macro_rules! real {
    ($cfg:expr, $field:ident, $default:expr) => {{
        let v: f64 = *$cfg.0.$field.get_or_insert($default);
        if !v.is_finite() {
            return Err(Failure(format!("{} must be finite", stringify!($field))));
        }
        v
    }};
}

macro_rules! required {
    ($cfg:expr, $field:ident) => {{
        match $cfg.0.$field {
            Some(v) => v,
            None => return Err(Failure(format!("--{} is required", stringify!($field).replace('_', "-")))),
        }
    }};
}

/// The output location is not part of the echo, so an artifact's bytes do not depend on it.
fn header(command: &str, cfg: &RunConfig) -> Value {
    let echo = RunConfig {
        out: None,
        ..cfg.clone()
    };
    json!({"tool": TOOL, "version": VERSION, "command": command, "config": echo})
}

fn json_document(command: &str, cfg: &RunConfig, result: Value) -> String {
    let mut doc = header(command, cfg);
    doc["result"] = result;
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
    s.push('\n');
    s
}

fn csv_document(command: &str, cfg: &RunConfig, columns: &str, rows: &str) -> String {
    let meta = serde_json::to_string(&header(command, cfg)).expect("serializable config");
    format!("# {meta}\n{columns}\n{rows}")
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate_walk(mut cfg: Resolved) -> Outcome {
    let seed = cfg.seed()?;
    let env = cfg.env()?;
    let format = cfg.format(Format::Csv);
    let barriers = match (cfg.0.right, cfg.0.left) {
        (Some(r), Some(l)) => {
            if !(l < 0 && r > 0) {
                return Err(Failure(format!("need left < 0 < right, got {l} and {r}")));
            }
            Some((r, l))
        }
        (None, None) => None,
        _ => return Err(Failure("--right and --left go together".into())),
    };
    let budget = if barriers.is_some() {
        count!(cfg, max_steps, DEFAULT_MAX_STEPS)
    } else {
        count!(cfg, steps, 1_000)
    };
    let mut rng = RandomStream::for_replica(seed, "simulate-walk", 0);
    let mut state = WalkState::new();
    let mut path = vec![(0u64, 0i64, 1u64)];
    let mut exit = None;
    while state.steps() < budget {
        walk::step(&env, &mut state, &mut rng);
        path.push((state.steps(), state.position(), state.current_local_time()));
        if let Some((r, l)) = barriers {
            if state.position() == r || state.position() == l {
                exit = Some(if state.position() == r { walk::Side::Right } else { walk::Side::Left });
                break;
            }
        }
    }
    if barriers.is_some() && exit.is_none() {
        return Err(Error::MaxStepsExceeded { max_steps: budget }.into());
    }
    let text = match format {
        Format::Csv => {
            let mut rows = String::new();
            for (k, x, l) in &path {
                let _ = writeln!(rows, "{k},{x},{l}");
            }
            csv_document("simulate-walk", &cfg.0, "step,position,local_time", &rows)
        }
        Format::Json => {
            let rows: Vec<Value> = path
                .iter()
                .map(|(k, x, l)| json!({"step": k, "position": x, "local_time": l}))
                .collect();
            json_document("simulate-walk", &cfg.0, json!({"exit": exit, "path": rows}))
        }
    };
    emit(&cfg.0, &text)?;
    Ok(EXIT_OK)
}

fn simulate_idla(mut cfg: Resolved) -> Outcome {
    let seed = cfg.seed()?;
    let env = cfg.env()?;
    let format = cfg.format(Format::Csv);
    let n_max = count!(cfg, n_max, 10_000);
    let every = count!(cfg, record_every, idla::default_record_every(n_max));
    let mut rng = RandomStream::for_replica(seed, "simulate-idla", 0);
    let points = idla::run_trajectory(&env, n_max, &mut rng, every)?;
    let text = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            idla::write_csv(&mut buf, &points).expect("in-memory write");
            let body = String::from_utf8(buf).expect("ascii csv");
            let (columns, rows) = body.split_once('\n').expect("header row");
            csv_document("simulate-idla", &cfg.0, columns, rows)
        }
        Format::Json => json_document("simulate-idla", &cfg.0, json!({"trajectory": points})),
    };
    emit(&cfg.0, &text)?;
    Ok(EXIT_OK)
}

fn simulate_pbm(mut cfg: Resolved) -> Outcome {
    let seed = cfg.seed()?;
    let format = cfg.format(Format::Csv);
    let alpha = real!(cfg, alpha, 0.0);
    let beta = real!(cfg, beta, 0.0);
    let dt = real!(cfg, dt, pbm::DEFAULT_DT);
    if dt <= 0.0 {
        return Err(Failure("dt must be positive".into()));
    }
    let steps = count!(cfg, steps, 10_000);
    let params = PbmParams::new(alpha, beta)?;
    let mut rng = RandomStream::for_replica(seed, "simulate-pbm", 0);
    let path = pbm::simulate_path(&params, dt, steps as usize, &mut rng);
    let text = match format {
        Format::Csv => {
            let mut rows = String::new();
            for s in &path {
                let _ = writeln!(rows, "{},{},{},{},{}", s.t, s.y, s.b, s.m, s.i);
            }
            csv_document("simulate-pbm", &cfg.0, "t,y,b,m,i", &rows)
        }
        Format::Json => json_document("simulate-pbm", &cfg.0, json!({"path": path})),
    };
    emit(&cfg.0, &text)?;
    Ok(EXIT_OK)
}

fn theory_query(query: TheoryQuery) -> Outcome {
    let (name, common, params) = match &query {
        TheoryQuery::H { common, params } => ("h", common, params),
        TheoryQuery::FixedPoint { common, params } => ("fixed-point", common, params),
        TheoryQuery::Predict { common, params } => ("predict", common, params),
    };
    let mut cfg = Resolved::new(common, params)?;
    let mut record = match name {
        "h" => {
            let (alpha, beta, x) = (required!(cfg, alpha), required!(cfg, beta), required!(cfg, x));
            let value = theory::h(alpha, beta, x)?;
            json!({"alpha": alpha, "beta": beta, "x": x, "value": value})
        }
        "fixed-point" => {
            let (alpha, beta) = (required!(cfg, alpha), required!(cfg, beta));
            let p = theory::fixed_point(alpha, beta)?;
            json!({"alpha": alpha, "beta": beta, "p": p, "value": p})
        }
        _ => {
            let env = cfg.env()?;
            let regime = env.classify()?;
            let prediction = theory::predict(&env)?;
            json!({"alpha": regime.alpha, "beta": regime.beta, "regime": regime.kind,
                   "kind": prediction.kind(), "p": prediction.p(), "value": prediction.p()})
        }
    };
    record["version"] = json!(VERSION);
    let mut text = serde_json::to_string(&record).expect("serializable record");
    text.push('\n');
    emit(&cfg.0, &text)?;
    Ok(EXIT_OK)
}

fn exit_for(v: Verdict) -> i32 {
    match v {
        Verdict::Pass | Verdict::Inconclusive => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
    }
}

fn verify(experiment: Experiment, mut cfg: Resolved) -> Outcome {
    let seed = cfg.seed()?;
    if cfg.format(Format::Json) != Format::Json {
        return Err(Failure("verify reports are JSON only".into()));
    }
    let slack_c = real!(cfg, slack_c, harness::DEFAULT_SLACK_C);
    let (verdict, result) = match experiment {
        Experiment::Lln => {
            let env = cfg.env()?;
            let n_max = count!(cfg, n_max, 10_000);
            let replicas = count!(cfg, replicas, 20);
            let r = harness::lln_experiment(&env, n_max, replicas, slack_c, seed)?;
            (r.verdict, serde_json::to_value(&r))
        }
        Experiment::HN => {
            let env = cfg.env()?;
            let n = count!(cfg, n, 1_000);
            let x = real!(cfg, x, 0.5);
            let replicas = count!(cfg, replicas, 10_000);
            let r = harness::h_n_experiment(&env, n, x, replicas, slack_c, seed)?;
            (r.verdict, serde_json::to_value(&r))
        }
        Experiment::Transient => {
            let env = cfg.env()?;
            let replicas = count!(cfg, replicas, 10_000);
            let radius = count!(cfg, escape_radius, harness::DEFAULT_ESCAPE_RADIUS);
            let r = harness::estimate_p_transient(&env, replicas, radius, seed)?;
            let v = if r.consistent { Verdict::Pass } else { Verdict::Fail };
            (v, serde_json::to_value(&r))
        }
        Experiment::Clt => {
            let env = cfg.env()?;
            let n = count!(cfg, n, 10_000);
            let replicas = count!(cfg, replicas, 10_000);
            let dt = real!(cfg, dt, pbm::DEFAULT_DT);
            let r = harness::clt_check(&env, n, replicas, dt, seed)?;
            (r.verdict, serde_json::to_value(&r))
        }
        Experiment::Sa => {
            let env = cfg.env()?;
            let n_max = count!(cfg, n_max, 10_000);
            let aux = count!(cfg, aux_walks, harness::DEFAULT_AUX_WALKS);
            let every = count!(cfg, every, (n_max / 500).max(1));
            let r = harness::sa_diagnostics(&env, n_max, aux, Some(every), seed)?;
            (r.verdict, serde_json::to_value(&r))
        }
        Experiment::Dominance => {
            let hi = cfg.env()?;
            let lo = cfg.lo_env()?;
            let n = count!(cfg, n, 1_000);
            let x = real!(cfg, x, 0.5);
            let replicas = count!(cfg, replicas, 10_000);
            let r = harness::dominance_check(&hi, &lo, n, x, replicas, seed)?;
            (r.verdict, serde_json::to_value(&r))
        }
        Experiment::PbmH => {
            let alpha = real!(cfg, alpha, 0.0);
            let beta = real!(cfg, beta, 0.0);
            let x = real!(cfg, x, 0.5);
            let dt = real!(cfg, dt, 1e-3);
            let replicas = count!(cfg, replicas, 10_000);
            let r = harness::pbm_h_experiment(alpha, beta, x, dt, replicas, seed)?;
            (r.verdict, serde_json::to_value(&r))
        }
    };
    let name = serde_json::to_value(experiment).expect("experiment name");
    let command = format!("verify {}", name.as_str().unwrap_or_default());
    let mut result = result.map_err(|e| Failure(e.to_string()))?;
    result["verdict"] = json!(verdict);
    emit(&cfg.0, &json_document(&command, &cfg.0, result))?;
    Ok(exit_for(verdict))
}

fn sweep(mut cfg: Resolved) -> Outcome {
    let seed = cfg.seed()?;
    let format = cfg.format(Format::Csv);
    let alphas = cfg.0.alphas.get_or_insert_with(Vec::new).clone();
    let betas = cfg.0.betas.get_or_insert_with(Vec::new).clone();
    let n_max = count!(cfg, n_max, 10_000);
    let replicas = count!(cfg, replicas, 10);
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let rows = harness::sweep(&grid, n_max, replicas, seed)?;
    let text = match format {
        Format::Csv => {
            let mut body = String::new();
            for r in &rows {
                let _ = writeln!(body, "{},{},{},{},{}", r.alpha, r.beta, r.p_theory, r.x_mean, r.x_stderr);
            }
            csv_document("sweep", &cfg.0, "alpha,beta,p_theory,x_mean,x_stderr", &body)
        }
        Format::Json => json_document("sweep", &cfg.0, json!({"rows": rows})),
    };
    emit(&cfg.0, &text)?;
    Ok(EXIT_OK)
}

fn dispatch(command: Command) -> Outcome {
    let with_pool = |common: &Common, job: &(dyn Fn() -> Outcome + Sync)| -> Outcome {
        match common.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Failure(e.to_string()))?
                .install(job),
            None => job(),
        }
    };
    match command {
        Command::SimulateWalk { common, params } => simulate_walk(Resolved::new(&common, &params)?),
        Command::SimulateIdla { common, params } => simulate_idla(Resolved::new(&common, &params)?),
        Command::SimulatePbm { common, params } => simulate_pbm(Resolved::new(&common, &params)?),
        Command::Theory { query } => theory_query(query),
        Command::Verify { experiment, common, params } => {
            with_pool(&common, &|| verify(experiment, Resolved::new(&common, &params)?))
        }
        Command::Sweep { common, params } => {
            with_pool(&common, &|| sweep(Resolved::new(&common, &params)?))
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
    }
}
