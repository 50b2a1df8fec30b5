//! The `dphi` command line.
//!
//! Every invocation is first turned into a [`RunConfig`], which is also the
//! line format of `batch` suites, so a run can be replayed from its JSON.
//! Results go to standard output (or `--out`) as JSON carrying
//! `schema_version`; `scan` and `fixture` emit CSV.
//!
//! Exit codes: `0` success or `Pass`/`Inconclusive`, `2` for a `Fail`
//! verdict, `1` for usage and numeric errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::deformed_exp::PhiSpec;
use crate::divergence::d_phi;
use crate::error::{Error, Result};
use crate::family::{FamilyChart, U0Spec};
use crate::fixtures::counterexample_table;
use crate::properties::{
    self, characterize_tsallis, check_concave_g, check_joint_convexity, check_partition_inequality,
    check_pinsker, check_superadditive_g, g_func, h_func, pinsker_constant, unit_grid, Verdict,
};
use crate::simplex::Distribution;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

const DEFAULT_TRIALS: usize = 200;
const DEFAULT_N: usize = 4;
const CHARACTERIZE_N: usize = 3;
const DEFAULT_LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Parser)]
#[command(
    name = "dphi",
    version,
    about = "Deformed-exponential divergences and property checks"
)]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate D_phi(p || q).
    Div {
        #[arg(long)]
        phi: PhiSpec,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Include the per-coordinate terms.
        #[arg(long)]
        terms: bool,
    },
    /// Deformed exponential family operations.
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
    /// Run a property check.
    Check(CheckArgs),
    /// Tabulate g or h on the probability grid as CSV.
    Scan {
        target: ScanTarget,
        #[arg(long)]
        phi: PhiSpec,
        #[arg(long, default_value_t = properties::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = properties::DEFAULT_DELTA)]
        delta: f64,
    },
    /// Run every RunConfig line of a JSONL suite.
    Batch { suite: PathBuf },
    /// Write a reference table as CSV.
    Fixture { name: FixtureName },
}

#[derive(Debug, Subcommand)]
pub enum FamilyAction {
    /// Solve for psi_c(u) after projecting u onto the tangent space.
    Normalize {
        #[arg(long)]
        phi: PhiSpec,
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        u0: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub kind: CheckKind,
    #[arg(long)]
    pub phi: PhiSpec,
    #[arg(long, default_value_t = properties::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = properties::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of outcomes (default 4; 3 for `characterize`).
    #[arg(long)]
    pub n: Option<usize>,
    /// Pinsker constant to test, or `auto` to estimate it.
    #[arg(long)]
    pub c: Option<PinskerC>,
    /// Mixing weights for `convexity`, comma separated.
    #[arg(long)]
    pub lambdas: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Superadd,
    Concave,
    Partition,
    Convexity,
    Pinsker,
    Characterize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    G,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureName {
    Counterexample,
}

/// `--c` value: a fixed constant or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PinskerC {
    Value(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoTag {
    #[serde(rename = "auto")]
    Auto,
}

impl std::str::FromStr for PinskerC {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(PinskerC::Auto(AutoTag::Auto));
        }
        s.trim()
            .parse::<f64>()
            .map(PinskerC::Value)
            .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

/// A fully resolved run; serializes to one suite line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Div {
        phi: PhiSpec,
        p: Vec<f64>,
        q: Vec<f64>,
        #[serde(default)]
        terms: bool,
    },
    FamilyNormalize {
        phi: PhiSpec,
        p: Vec<f64>,
        u: Vec<f64>,
        #[serde(default)]
        u0: Option<Vec<f64>>,
    },
    Check {
        kind: CheckKind,
        phi: PhiSpec,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        c: Option<PinskerC>,
        #[serde(default)]
        lambdas: Option<Vec<f64>>,
    },
    Scan {
        target: ScanTarget,
        phi: PhiSpec,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    Fixture {
        name: FixtureName,
    },
}

fn default_grid() -> usize {
    properties::DEFAULT_GRID
}

fn default_delta() -> f64 {
    properties::DEFAULT_DELTA
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

/// Result of one run: the exit code and the bytes to emit.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

/// Comma-separated reals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("`{t}` is not a number in `{s}`")))
        })
        .collect()
}

/// A distribution given inline (`0.2,0.8`) or as a path to a single-column CSV.
pub fn parse_distribution(s: &str) -> Result<Vec<f64>> {
    let path = Path::new(s);
    if !s.contains(',') && path.is_file() {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut out = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            match record.get(0).map(str::parse::<f64>) {
                Some(Ok(v)) => out.push(v),
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::Usage(format!(
                        "row {} of {s} is not numeric",
                        row + 1
                    )))
                }
            }
        }
        return Ok(out);
    }
    parse_vector(s)
}

impl Command {
    /// Resolves parsed arguments into a [`RunConfig`]. `batch` has no
    /// config of its own and is handled by [`run_batch`].
    pub fn to_config(&self) -> Result<Option<RunConfig>> {
        Ok(Some(match self {
            Command::Div { phi, p, q, terms } => RunConfig::Div {
                phi: phi.clone(),
                p: parse_distribution(p)?,
                q: parse_distribution(q)?,
                terms: *terms,
            },
            Command::Family {
                action: FamilyAction::Normalize { phi, p, u, u0 },
            } => RunConfig::FamilyNormalize {
                phi: phi.clone(),
                p: parse_distribution(p)?,
                u: parse_vector(u)?,
                u0: u0.as_deref().map(parse_vector).transpose()?,
            },
            Command::Check(a) => RunConfig::Check {
                kind: a.kind,
                phi: a.phi.clone(),
                grid: a.grid,
                delta: a.delta,
                trials: a.trials,
                seed: a.seed,
                n: a.n,
                c: a.c,
                lambdas: a.lambdas.as_deref().map(parse_vector).transpose()?,
            },
            Command::Scan {
                target,
                phi,
                grid,
                delta,
            } => RunConfig::Scan {
                target: *target,
                phi: phi.clone(),
                grid: *grid,
                delta: *delta,
            },
            Command::Fixture { name } => RunConfig::Fixture { name: *name },
            Command::Batch { .. } => return Ok(None),
        }))
    }
}

impl RunConfig {
    /// Copy with relative table paths resolved against `base`.
    pub fn rebased(mut self, base: &Path) -> Self {
        let phi = match &mut self {
            RunConfig::Div { phi, .. }
            | RunConfig::FamilyNormalize { phi, .. }
            | RunConfig::Check { phi, .. }
            | RunConfig::Scan { phi, .. } => phi,
            RunConfig::Fixture { .. } => return self,
        };
        if let PhiSpec::Table(path) = phi {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        self
    }

    fn label(&self) -> String {
        match self {
            RunConfig::Div { phi, .. } => format!("div --phi {phi}"),
            RunConfig::FamilyNormalize { phi, .. } => format!("family normalize --phi {phi}"),
            RunConfig::Check { kind, phi, .. } => {
                format!("check {} --phi {phi}", serde_name(kind))
            }
            RunConfig::Scan { phi, .. } => format!("scan --phi {phi}"),
            RunConfig::Fixture { .. } => "fixture".into(),
        }
    }
}

fn serde_name<S: Serialize>(v: &S) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

/// JSON payload of a run and the verdict it carries, if any.
enum Payload {
    Json(Value, Option<Verdict>),
    Text(String),
}

fn verdict_code(v: Option<Verdict>) -> i32 {
    match v {
        Some(Verdict::Fail) => EXIT_FAIL,
        _ => EXIT_OK,
    }
}

fn execute(config: &RunConfig) -> Result<Payload> {
    match config {
        RunConfig::Div { phi, p, q, terms } => {
            let f = phi.build()?;
            let p = Distribution::new(p.clone())?;
            let q = Distribution::new(q.clone())?;
            let d = d_phi(&f, &p, &q)?;
            let mut out = json!({ "value": d.value });
            if *terms {
                out["terms"] = json!(d.terms);
            }
            Ok(Payload::Json(out, None))
        }
        RunConfig::FamilyNormalize { phi, p, u, u0 } => {
            let f = phi.build()?;
            let p = Distribution::new(p.clone())?;
            let spec = match u0 {
                Some(v) => U0Spec::Custom(v.clone()),
                None => U0Spec::Uniform,
            };
            let chart = FamilyChart::new(&f, &p, spec)?;
            let t = chart.project_tangent(u)?;
            let sol = chart.normalizer(&t)?;
            let residual = chart.verify_psi_identity(&t)?;
            Ok(Payload::Json(
                json!({
                    "psi": sol.psi,
                    "q": sol.q.weights(),
                    "dphi_residual": residual,
                    "u_projected": t.as_slice(),
                    "u0": chart.u0(),
                    "iterations": sol.iterations,
                }),
                None,
            ))
        }
        RunConfig::Check {
            kind,
            phi,
            grid,
            delta,
            trials,
            seed,
            n,
            c,
            lambdas,
        } => {
            let f = phi.build()?;
            let n_or = |d: usize| n.unwrap_or(d);
            let report = match kind {
                CheckKind::Superadd => check_superadditive_g(&f, *grid, *delta)?,
                CheckKind::Concave => check_concave_g(&f, *grid, *delta)?,
                CheckKind::Partition => {
                    check_partition_inequality(&f, n_or(DEFAULT_N), *trials, *seed)?
                }
                CheckKind::Convexity => {
                    let ls = lambdas.clone().unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec());
                    check_joint_convexity(&f, n_or(DEFAULT_N), *trials, &ls, *seed)?
                }
                CheckKind::Pinsker => match c.unwrap_or(PinskerC::Auto(AutoTag::Auto)) {
                    PinskerC::Value(c) => check_pinsker(&f, c, n_or(DEFAULT_N), *trials, *seed)?,
                    PinskerC::Auto(_) => {
                        let est = pinsker_constant(&f, *grid, *delta)?;
                        let mut v = serde_json::to_value(&est)?;
                        v["check"] = json!("pinsker_constant");
                        return Ok(Payload::Json(v, Some(est.verdict)));
                    }
                },
                CheckKind::Characterize => {
                    let ch = characterize_tsallis(&f, *grid, *delta, n_or(CHARACTERIZE_N))?;
                    let mut v = serde_json::to_value(&ch)?;
                    v["check"] = json!("characterize");
                    v["verdict"] = serde_json::to_value(ch.is_tsallis)?;
                    return Ok(Payload::Json(v, Some(ch.is_tsallis)));
                }
            };
            let verdict = report.verdict;
            Ok(Payload::Json(serde_json::to_value(&report)?, Some(verdict)))
        }
        RunConfig::Scan {
            target,
            phi,
            grid,
            delta,
        } => {
            properties::validate_grid(*grid, *delta)?;
            let f = phi.build()?;
            let xs: Vec<f64> = unit_grid(*grid, *delta);
            let mut wtr = csv::Writer::from_writer(Vec::new());
            let header = match target {
                ScanTarget::G => ["x", "g(x)"],
                ScanTarget::H => ["x", "h(x)"],
            };
            wtr.write_record(header)?;
            for p in xs {
                let (x, v) = match target {
                    ScanTarget::G => (p, g_func(&f, p)?),
                    ScanTarget::H => {
                        let x = f.phi_inv(p)?;
                        (x, h_func(&f, x)?)
                    }
                };
                wtr.write_record([format!("{x:.16e}"), format!("{v:.16e}")])?;
            }
            let bytes = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(Payload::Text(String::from_utf8_lossy(&bytes).into_owned()))
        }
        RunConfig::Fixture { name } => match name {
            FixtureName::Counterexample => {
                let mut buf = Vec::new();
                counterexample_table()?.write_csv(&mut buf)?;
                Ok(Payload::Text(String::from_utf8_lossy(&buf).into_owned()))
            }
        },
    }
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn error_value(e: &Error) -> Value {
    json!({ "kind": e.kind(), "message": e.to_string() })
}

/// Runs one configuration. Errors become exit code 1 with a JSON error body.
pub fn run(config: &RunConfig) -> Outcome {
    match execute(config) {
        Ok(Payload::Json(v, verdict)) => Outcome {
            code: verdict_code(verdict),
            body: to_json_line(&with_schema(v)),
        },
        Ok(Payload::Text(body)) => Outcome {
            code: EXIT_OK,
            body,
        },
        Err(e) => Outcome {
            code: EXIT_ERROR,
            body: to_json_line(&with_schema(json!({ "error": error_value(&e) }))),
        },
    }
}

/// Runs a JSONL suite. Blank lines and `#` comments are skipped; a line that
/// fails to parse is reported as an error entry. The aggregate exit code is
/// `2` if any run failed its check, else `1` if any line errored, else `0`.
pub fn run_batch(suite: &Path, progress: &mut dyn FnMut(&str)) -> Outcome {
    let text = match std::fs::read_to_string(suite) {
        Ok(t) => t,
        Err(e) => {
            let e = Error::Io(e);
            return Outcome {
                code: EXIT_ERROR,
                body: to_json_line(&with_schema(json!({ "error": error_value(&e) }))),
            };
        }
    };
    let base = suite.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    let (mut pass, mut fail, mut errors) = (0usize, 0usize, 0usize);
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let config: RunConfig = match serde_json::from_str(line) {
            Ok(c) => c,
            Err(e) => {
                errors += 1;
                entries.push(json!({
                    "line": k + 1,
                    "exit_code": EXIT_ERROR,
                    "error": error_value(&Error::Json(e)),
                }));
                continue;
            }
        };
        let config = config.rebased(base);
        progress(&format!("[{}] {}", k + 1, config.label()));
        let mut entry = json!({ "line": k + 1, "config": config });
        match execute(&config) {
            Ok(Payload::Json(v, verdict)) => {
                let code = verdict_code(verdict);
                match code {
                    EXIT_FAIL => fail += 1,
                    _ => pass += 1,
                }
                entry["exit_code"] = json!(code);
                entry["result"] = v;
            }
            Ok(Payload::Text(body)) => {
                pass += 1;
                entry["exit_code"] = json!(EXIT_OK);
                entry["result"] = json!({ "rows": body.lines().count().saturating_sub(1) });
            }
            Err(e) => {
                errors += 1;
                entry["exit_code"] = json!(EXIT_ERROR);
                entry["error"] = error_value(&e);
            }
        }
        entries.push(entry);
    }
    let code = if fail > 0 {
        EXIT_FAIL
    } else if errors > 0 {
        EXIT_ERROR
    } else {
        EXIT_OK
    };
    let report = json!({
        "runs": entries,
        "summary": { "total": pass + fail + errors, "ok": pass, "fail": fail, "error": errors },
        "exit_code": code,
    });
    Outcome {
        code,
        body: to_json_line(&with_schema(report)),
    }
}

/// Parses `args`, runs, writes the body and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let quiet = cli.quiet;
    let mut progress = |msg: &str| {
        if !quiet {
            eprintln!("{msg}");
        }
    };
    let outcome = match &cli.command {
        Command::Batch { suite } => run_batch(suite, &mut progress),
        cmd => match cmd.to_config() {
            Ok(Some(config)) => {
                progress(&config.label());
                run(&config)
            }
            Ok(None) => unreachable!("only batch lacks a config"),
            Err(e) => Outcome {
                code: EXIT_ERROR,
                body: to_json_line(&with_schema(json!({ "error": error_value(&e) }))),
            },
        },
    };
    if outcome.code == EXIT_ERROR && !quiet {
        eprintln!("dphi: run failed, see the error field of the output");
    }
    let written = match &cli.out {
        Some(path) => std::fs::write(path, outcome.body.as_bytes()),
        None => std::io::stdout().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("dphi: cannot write output: {e}");
        return EXIT_ERROR;
    }
    outcome.code
}

/// Writes floats with 17 significant digits and non-finite values as `null`.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `v` with [`FixedDigits`] and a trailing newline.
pub fn to_json_line<S: Serialize>(v: &S) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    // Serialization into a Vec cannot fail for these payloads.
    v.serialize(&mut ser).expect("serializable payload");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        let s = to_json_line(&json!({ "a": 0.1, "b": 3, "c": f64::NAN }));
        assert_eq!(s, "{\"a\":1.0000000000000001e-1,\"b\":3,\"c\":null}\n");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn config_round_trip() {
        let c = RunConfig::Check {
            kind: CheckKind::Pinsker,
            phi: PhiSpec::QExp(0.5),
            grid: 10,
            delta: 1e-3,
            trials: 5,
            seed: 3,
            n: None,
            c: Some(PinskerC::Auto(AutoTag::Auto)),
            lambdas: None,
        };
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"c\":\"auto\""));
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn defaults_fill_in() {
        let c: RunConfig =
            serde_json::from_str(r#"{"command":"check","kind":"superadd","phi":"exp"}"#).unwrap();
        match c {
            RunConfig::Check {
                grid,
                delta,
                trials,
                seed,
                ..
            } => {
                assert_eq!((grid, trials, seed), (200, 200, 0));
                assert_eq!(delta, 1e-4);
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn div_kl_value() {
        let out = run(&RunConfig::Div {
            phi: PhiSpec::Exp,
            p: vec![0.5, 0.5],
            q: vec![0.25, 0.75],
            terms: false,
        });
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.body).unwrap();
        let want = 0.5 * (4.0f64 / 3.0).ln();
        assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-15);
        assert_eq!(v["schema_version"], 1);
    }

    #[test]
    fn vector_parsing() {
        assert_eq!(parse_vector("1, -2.5").unwrap(), vec![1.0, -2.5]);
        assert!(parse_vector("1,x").is_err());
    }
}
