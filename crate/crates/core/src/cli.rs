//! Command-line driver. `run` holds all logic and returns the exit code with
//! the text to print, so the binary stays a thin wrapper.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog;
use crate::charclass::{bott_example_pipeline, haefliger_corollary_check, CohomologyData, HaefligerReason, HaefligerVerdict};
use crate::expr::{parse_document, Document, Presentation};
use crate::homotopy::{run_homotopy, HomotopyError, RunOptions, Scenario};
use crate::poisson::{
    involutivity_check, leafwise_closed_check, regular_poisson_check, CheckConfig, Distribution, InvolutivityVerdict,
    LeafwiseVerdict, RegularPoissonVerdict, VerdictRecord, DEFAULT_SEED,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_SCENARIO: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;

pub const SEED_ENV: &str = "FOLHP_SEED";

#[derive(Debug, Parser)]
#[command(name = "folhp", version, about = "Checks for Poisson structures, foliations and their obstructions")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the probe points (falls back to FOLHP_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid points per axis for homotopy runs.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a bivector is a regular Poisson structure.
    CheckPoisson {
        /// Input file, or `catalog:NAME` for a bundled one.
        file: String,
        /// Bivector to check (default: the first one).
        #[arg(long)]
        name: Option<String>,
    },
    /// Frobenius test for a distribution.
    CheckInvolutive {
        file: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Whether a 2-form is closed along the leaves of a distribution.
    CheckLeafwiseClosed {
        file: String,
        #[arg(long)]
        distribution: Option<String>,
        #[arg(long)]
        form: Option<String>,
    },
    /// Characteristic classes of the codimension-2 example on CP^{2n-1}.
    Bott {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// TOML file with `n` and optionally `q`.
        #[arg(long)]
        params: Option<String>,
    },
    /// Whether H^i(V; Z) = 0 for all i > q + 1.
    Haefliger {
        #[arg(long)]
        q: usize,
        /// H^i = 0 for every i above this degree.
        #[arg(long)]
        zero_above: Option<usize>,
        /// Degrees with vanishing cohomology.
        #[arg(long, value_delimiter = ',')]
        zero: Vec<usize>,
        /// Degrees with nonvanishing cohomology.
        #[arg(long, value_delimiter = ',')]
        nonzero: Vec<usize>,
        /// Groups as DEGREE=GROUP, e.g. 4=Z or 3=0.
        #[arg(long)]
        group: Vec<String>,
        /// Manifold dimension.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Run and verify the foliated homotopy of a scenario.
    Homotopy { file: String },
    /// Parse a file and print it in canonical form.
    Parse { file: String },
}

/// Exit code and the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn err(code: i32, stderr: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

struct Ctx {
    json: bool,
    cfg: CheckConfig,
    grid: Option<usize>,
    tolerance: f64,
}

impl Ctx {
    fn emit(&self, code: i32, value: Value) -> Outcome {
        let text = if self.json {
            serde_json::to_string_pretty(&value).expect("serialisable") + "\n"
        } else {
            let mut out = String::new();
            render_text(&value, "", &mut out);
            out
        };
        Outcome::out(code, text)
    }
}

/// `key: value` lines, nested keys joined with dots.
fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(x, &key, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object()) => {
            for (i, x) in xs.iter().enumerate() {
                render_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().map(scalar_text).collect();
            out.push_str(&format!("{prefix}: [{}]\n", parts.join(", ")));
        }
        _ => out.push_str(&format!("{prefix}: {}\n", scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn read_input(file: &str) -> Result<String, Outcome> {
    if let Some(name) = file.strip_prefix("catalog:") {
        return catalog::get(name)
            .map(str::to_string)
            .ok_or_else(|| Outcome::err(EXIT_NO_INPUT, format!("error: no bundled file named {name}\n")));
    }
    std::fs::read_to_string(Path::new(file))
        .map_err(|e| Outcome::err(EXIT_NO_INPUT, format!("error: cannot read {file}: {e}\n")))
}

fn load(file: &str) -> Result<Document, Outcome> {
    let text = read_input(file)?;
    parse_document(&text).map_err(|e| Outcome::err(EXIT_USAGE, format!("{file}:{e}\n")))
}

fn usage(msg: impl std::fmt::Display) -> Outcome {
    Outcome::err(EXIT_USAGE, format!("error: {msg}\n"))
}

/// Parses `args` (program name first) and runs the command. The probe seed
/// comes from `--seed`, then `seed_env`, then the built-in default.
pub fn run_with_env<I, T>(args: I, seed_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_PASS { Outcome::out(code, text) } else { Outcome::err(code, text) };
        }
    };
    let seed = match (cli.seed, seed_env) {
        (Some(s), _) => s,
        (None, Some(v)) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => return usage(format!("{SEED_ENV} is not an unsigned integer: {v}")),
        },
        (None, None) => DEFAULT_SEED,
    };
    if !(cli.tolerance > 0.0) {
        return usage("--tolerance must be positive");
    }
    let ctx = Ctx {
        json: cli.json,
        cfg: CheckConfig::with_seed(seed),
        grid: cli.grid,
        tolerance: cli.tolerance,
    };
    let result = match cli.command {
        Command::CheckPoisson { file, name } => check_poisson(&ctx, &file, name.as_deref()),
        Command::CheckInvolutive { file, name } => check_involutive(&ctx, &file, name.as_deref()),
        Command::CheckLeafwiseClosed { file, distribution, form } => {
            check_leafwise(&ctx, &file, distribution.as_deref(), form.as_deref())
        }
        Command::Bott { n, q, params } => bott(&ctx, n, q, params.as_deref()),
        Command::Haefliger {
            q,
            zero_above,
            zero,
            nonzero,
            group,
            dim,
        } => haefliger(&ctx, q, zero_above, &zero, &nonzero, &group, dim),
        Command::Homotopy { file } => homotopy(&ctx, &file),
        Command::Parse { file } => parse(&ctx, &file),
    };
    result.unwrap_or_else(|o| o)
}

/// `run_with_env` reading the seed fallback from the environment.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    run_with_env(args, env.as_deref())
}

fn check_poisson(ctx: &Ctx, file: &str, name: Option<&str>) -> Result<Outcome, Outcome> {
    let doc = load(file)?;
    let (item, pi) = doc
        .bivector(name)
        .ok_or_else(|| usage(format!("{file} declares no bivector{}", name.map(|n| format!(" named {n}")).unwrap_or_default())))?;
    let report = match regular_poisson_check(pi, &ctx.cfg) {
        Ok(r) => r,
        Err(e) => {
            return Ok(ctx.emit(
                EXIT_UNDECIDED,
                json!({"command": "check-poisson", "item": item, "verdict": "Unsupported", "note": e.to_string()}),
            ))
        }
    };
    let code = match report.verdict {
        RegularPoissonVerdict::RegularPoisson => EXIT_PASS,
        RegularPoissonVerdict::NotPoisson | RegularPoissonVerdict::NotRegular => EXIT_FAIL,
        RegularPoissonVerdict::Undecided(_) | RegularPoissonVerdict::Inconsistent => EXIT_UNDECIDED,
    };
    Ok(ctx.emit(code, with_header("check-poisson", item, &VerdictRecord::from_report(&report))))
}

fn with_header(command: &str, item: &str, rec: &impl Serialize) -> Value {
    let mut v = json!({"command": command, "item": item});
    if let (Value::Object(m), Value::Object(r)) = (&mut v, serde_json::to_value(rec).expect("serialisable")) {
        m.extend(r);
    }
    v
}

fn distribution_of(ctx: &Ctx, doc: &Document, file: &str, name: Option<&str>) -> Result<(String, Distribution), Outcome> {
    let (item, decl) = doc
        .distribution(name)
        .ok_or_else(|| usage(format!("{file} declares no distribution{}", name.map(|n| format!(" named {n}")).unwrap_or_default())))?;
    let built = match &decl.presentation {
        Presentation::Kernel(fs) => Distribution::from_coframe(&decl.chart, fs.clone(), &ctx.cfg),
        Presentation::Span(vs) => Distribution::from_frame(&decl.chart, vs.clone(), &ctx.cfg),
    };
    built.map(|d| (item.to_string(), d)).map_err(|e| {
        ctx.emit(
            EXIT_UNDECIDED,
            json!({"item": item, "verdict": "Unsupported", "note": e.to_string()}),
        )
    })
}

fn check_involutive(ctx: &Ctx, file: &str, name: Option<&str>) -> Result<Outcome, Outcome> {
    let doc = load(file)?;
    let (item, d) = distribution_of(ctx, &doc, file, name)?;
    let v = match involutivity_check(&d) {
        Ok(v) => v,
        Err(e) => {
            return Ok(ctx.emit(
                EXIT_UNDECIDED,
                json!({"command": "check-involutive", "item": item, "verdict": "Unsupported", "note": e.to_string()}),
            ))
        }
    };
    let code = match v {
        InvolutivityVerdict::Involutive(_) => EXIT_PASS,
        InvolutivityVerdict::NotInvolutive { .. } => EXIT_FAIL,
    };
    Ok(ctx.emit(code, with_header("check-involutive", &item, &VerdictRecord::from_involutivity(&v))))
}

fn check_leafwise(ctx: &Ctx, file: &str, dist: Option<&str>, form: Option<&str>) -> Result<Outcome, Outcome> {
    let doc = load(file)?;
    let (item, d) = distribution_of(ctx, &doc, file, dist)?;
    let (fname, w) = doc
        .form_of_degree(2, form)
        .ok_or_else(|| usage(format!("{file} declares no 2-form{}", form.map(|n| format!(" named {n}")).unwrap_or_default())))?;
    let unsupported = |e: String| {
        ctx.emit(
            EXIT_UNDECIDED,
            json!({"command": "check-leafwise-closed", "item": item, "form": fname, "verdict": "Unsupported", "note": e}),
        )
    };
    let frame = match d.frame() {
        Ok(f) => f,
        Err(e) => return Ok(unsupported(e.to_string())),
    };
    let v = match leafwise_closed_check(&d, w) {
        Ok(v) => v,
        Err(e) => return Ok(unsupported(e.to_string())),
    };
    let code = match v {
        LeafwiseVerdict::Closed => EXIT_PASS,
        LeafwiseVerdict::NotClosed { .. } => EXIT_FAIL,
    };
    let names: Vec<String> = frame.iter().map(|f| f.to_string()).collect();
    let mut value = with_header("check-leafwise-closed", &item, &VerdictRecord::from_leafwise(&v, &names));
    value["form"] = json!(fname);
    Ok(ctx.emit(code, value))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BottParams {
    n: usize,
    q: Option<usize>,
}

fn bott(ctx: &Ctx, n: Option<usize>, q: Option<usize>, params: Option<&str>) -> Result<Outcome, Outcome> {
    let from_file = match params {
        Some(p) => {
            let text = read_input(p)?;
            let parsed: BottParams = toml::from_str(&text).map_err(|e| usage(format!("{p}: {e}")))?;
            Some(parsed)
        }
        None => None,
    };
    let n = n
        .or(from_file.as_ref().map(|p| p.n))
        .ok_or_else(|| usage("bott needs --n or --params"))?;
    let q = q.or(from_file.and_then(|p| p.q)).unwrap_or(2);
    let report = bott_example_pipeline(n, q).map_err(usage)?;
    Ok(ctx.emit(EXIT_PASS, json!({"command": "bott", "report": report})))
}

fn haefliger(
    ctx: &Ctx,
    q: usize,
    zero_above: Option<usize>,
    zero: &[usize],
    nonzero: &[usize],
    groups: &[String],
    dim: Option<usize>,
) -> Result<Outcome, Outcome> {
    let mut data = CohomologyData {
        zero_above,
        dim,
        ..Default::default()
    };
    for &i in zero {
        data.flags.insert(i, true);
    }
    for &i in nonzero {
        data.flags.insert(i, false);
    }
    for g in groups {
        let (deg, desc) = g
            .split_once('=')
            .ok_or_else(|| usage(format!("--group expects DEGREE=GROUP, got {g}")))?;
        let deg: usize = deg.trim().parse().map_err(|_| usage(format!("bad degree in --group {g}")))?;
        data.set_group(deg, desc).map_err(usage)?;
    }
    let verdict = haefliger_corollary_check(&data, q);
    let (code, reason) = match verdict {
        HaefligerVerdict::Applies => (EXIT_PASS, Value::Null),
        HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(i)) => (EXIT_FAIL, json!({"nonzero_degree": i})),
        HaefligerVerdict::DoesNotApply(HaefligerReason::Unknown(i)) => (EXIT_UNDECIDED, json!({"unknown_degree": i})),
    };
    let mut v = json!({"command": "haefliger", "q": q, "verdict": verdict.name()});
    if !reason.is_null() {
        v["reason"] = reason;
    }
    Ok(ctx.emit(code, v))
}

fn homotopy(ctx: &Ctx, file: &str) -> Result<Outcome, Outcome> {
    let doc = load(file)?;
    let opts = RunOptions {
        cfg: ctx.cfg.clone(),
        grid: ctx.grid,
        tolerance: ctx.tolerance,
    };
    let invalid = |e: HomotopyError| {
        let invariant = match &e {
            HomotopyError::Invalid { invariant, .. } => invariant.clone(),
            other => other.to_string(),
        };
        let mut o = ctx.emit(
            EXIT_SCENARIO,
            json!({"command": "homotopy", "verdict": "invalid", "invariant": invariant, "detail": e.to_string()}),
        );
        o.stderr = format!("scenario rejected: {e}\n");
        o
    };
    let sc = Scenario::from_document(&doc, &opts.cfg).map_err(invalid)?;
    let k = opts.grid_per_axis(sc.dim());
    let validated = sc.validate(&opts.cfg, k).map_err(invalid)?;
    let report = run_homotopy(&validated, &opts).map_err(|e| {
        ctx.emit(
            EXIT_UNDECIDED,
            json!({"command": "homotopy", "verdict": "error", "detail": e.to_string()}),
        )
    })?;
    let code = if report.passed() { EXIT_PASS } else { EXIT_FAIL };
    Ok(ctx.emit(code, json!({"command": "homotopy", "report": report})))
}

fn parse(ctx: &Ctx, file: &str) -> Result<Outcome, Outcome> {
    let doc = load(file)?;
    if ctx.json {
        let items: Vec<Value> = doc
            .items()
            .map(|i| json!({"name": i.name, "kind": i.value.kind_name()}))
            .collect();
        return Ok(ctx.emit(EXIT_PASS, json!({"command": "parse", "items": items, "canonical": doc.to_string()})));
    }
    Ok(Outcome::out(EXIT_PASS, doc.to_string()))
}

/// Path of a bundled file in the source tree, for documentation and tests.
pub fn catalog_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog").join(name)
}
