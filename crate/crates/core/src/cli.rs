//! Command-line front end.
//!
//! Exit codes: 0 pass or success, 1 input error, 2 verification failure,
//! 3 structural recovery failure. Reports go to stdout (or `--out`),
//! diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::domains::MatrixClass;
use crate::error::{Error, Result};
use crate::json::{to_stable_string, BlackBox, MapKind, MapSpec, RecoveryReport};
use crate::oracles::{counterexample_battery, dual_witness_sweep, jacobi_sweep, minkowski_sweep};
use crate::preservers::{CanonicalPreserver, NormTwistMap};
use crate::recovery::recover;
use crate::verifiers::{
    check_additivity, check_homogeneity, check_homogeneity_additivity, check_kadison_choi, default_convex_weights,
    pencil_grid, verify_det_identity, verify_trace_identity, DetMode, SampleConfig, TraceKind,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_STRUCTURAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "preserver-lab",
    version,
    about = "Verify, probe and invert determinant and trace preserving matrix maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check one identity over seeded samples of a class.
    Verify(VerifyArgs),
    /// Recover canonical parameters of a map.
    Recover(RecoverArgs),
    /// Run a standalone matrix-analysis oracle.
    Oracle(OracleArgs),
    /// Show that trace-square preservation alone does not force linearity.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Base seed for all sampling.
    #[arg(long, env = "PRESERVER_LAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// det-sum, det-convex, det-pencil, trace-inverse, trace-product,
    /// trace-power-k, trace-square, homogeneity-additivity.
    #[arg(long)]
    pub identity: String,
    #[arg(long)]
    pub class: MatrixClass,
    /// Matrix size; defaults to the size fixed by the map, else 2.
    #[arg(long)]
    pub n: Option<usize>,
    /// Map spec file, or inline JSON. Defaults to the identity map.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Convex t-values ("0,0.5,1") or pencil scalars ("1+2i,-i,3").
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// Exponent for trace-power.
    #[arg(long)]
    pub k: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub class: MatrixClass,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    Minkowski,
    Jacobi,
    KadisonChoi,
    DualWitness,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub oracle: OracleName,
    /// Class for dual-witness.
    #[arg(long, default_value = "full")]
    pub class: MatrixClass,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Defaults: 1e-6 for jacobi, 1e-8 for kadison-choi.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Map for kadison-choi; defaults to pinching.
    #[arg(long)]
    pub map: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// A remark1 spec; its "M" replaces the default generator.
    #[arg(long)]
    pub map: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

/// Failure that ends a command with a diagnostic instead of a report.
struct Abort {
    code: u8,
    message: String,
}

impl Abort {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn input_error(e: Error) -> Abort {
    Abort::input(e.to_string())
}

/// Exit code for an error raised while a check was running.
fn runtime_error(e: Error, structural: u8) -> Abort {
    let code = match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Json(_) | Error::Io(_) => EXIT_INPUT,
        _ => structural,
    };
    Abort {
        code,
        message: e.to_string(),
    }
}

struct Outcome {
    report: String,
    code: u8,
}

fn outcome<T: Serialize>(report: &T, pass: bool) -> std::result::Result<Outcome, Abort> {
    Ok(Outcome {
        report: to_stable_string(report).map_err(input_error)?,
        code: if pass { EXIT_OK } else { EXIT_FAIL },
    })
}

fn check_sizes(n: usize, samples: usize, tol: f64) -> std::result::Result<(), Abort> {
    if n == 0 || samples == 0 || !(tol > 0.0 && tol.is_finite()) {
        return Err(Abort::input("--n and --samples must be at least 1 and --tol positive"));
    }
    Ok(())
}

fn load_spec(source: &str) -> Result<MapSpec> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source)
            .map_err(|e| Error::InvalidInput(format!("cannot read map spec '{source}': {e}")))?
    };
    MapSpec::from_json(&text)
}

/// Builds the map and settles `n` against the size the map fixes.
fn load_map(source: Option<&str>, n: Option<usize>) -> std::result::Result<(BlackBox, usize), Abort> {
    let map = match source {
        Some(s) => load_spec(s).and_then(|spec| spec.build()).map_err(input_error)?,
        None => BlackBox::Canonical(CanonicalPreserver::identity(n.unwrap_or(2))),
    };
    let n = match (map.dim(), n) {
        (Some(d), Some(n)) if d != n => {
            return Err(Abort::input(format!("map acts on {d} x {d} matrices but --n is {n}")))
        }
        (Some(d), _) => d,
        (None, n) => n.unwrap_or(2),
    };
    Ok((map, n))
}

/// Parses `3`, `-2.5`, `i`, `-i`, `2i`, `1+2i`, `1e-3-4e-2i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number '{text}'"));
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (num(&body[..p])?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => num(t)?,
    };
    Ok(Complex64::new(re, im))
}

enum Check {
    Det(DetMode),
    Trace(TraceKind),
    Homogeneity,
    Additivity,
    HomogeneityAdditivity,
}

fn parse_identity(tag: &str, weights: Option<&str>, k: Option<u32>, n: usize) -> Result<Check> {
    let list = |w: &str| {
        w.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let no_weights = |c: Check| {
        if weights.is_some() {
            Err(Error::InvalidInput(format!("--weights does not apply to '{tag}'")))
        } else {
            Ok(c)
        }
    };
    if let Some(rest) = tag.strip_prefix("trace-power") {
        let from_tag = match rest {
            "" | "-k" => None,
            r => Some(
                r.strip_prefix('-')
                    .and_then(|d| d.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown identity '{tag}'")))?,
            ),
        };
        let power = match (from_tag, k) {
            (Some(a), Some(b)) if a != b => return Err(Error::InvalidInput(format!("'{tag}' conflicts with --k {b}"))),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::InvalidInput("trace-power needs --k".into())),
        };
        if power == 0 {
            return Err(Error::InvalidInput("--k must be at least 1".into()));
        }
        return no_weights(Check::Trace(TraceKind::Power(power)));
    }
    if k.is_some() {
        return Err(Error::InvalidInput(format!("--k does not apply to '{tag}'")));
    }
    match tag {
        "det-sum" => no_weights(Check::Det(DetMode::Sum)),
        "det-convex" => {
            let ts = match weights {
                Some(w) => list(w)
                    .iter()
                    .map(|t| t.parse::<f64>().ok().filter(|x| x.is_finite()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidInput(format!("cannot parse t-values '{w}'")))?,
                None => default_convex_weights(),
            };
            if ts.is_empty() {
                return Err(Error::InvalidInput("--weights must be nonempty".into()));
            }
            Ok(Check::Det(DetMode::Convex(ts)))
        }
        "det-pencil" => {
            let ls = match weights {
                Some(w) => list(w).iter().map(|t| parse_complex(t)).collect::<Result<Vec<_>>>()?,
                None => pencil_grid(n),
            };
            if ls.is_empty() {
                return Err(Error::InvalidInput("--weights must be nonempty".into()));
            }
            Ok(Check::Det(DetMode::Pencil(ls)))
        }
        "trace-inverse" => no_weights(Check::Trace(TraceKind::Inverse)),
        "trace-product" => no_weights(Check::Trace(TraceKind::Product)),
        "trace-square" => no_weights(Check::Trace(TraceKind::Square)),
        "homogeneity" => no_weights(Check::Homogeneity),
        "additivity" => no_weights(Check::Additivity),
        "homogeneity-additivity" => no_weights(Check::HomogeneityAdditivity),
        _ => Err(Error::InvalidInput(format!("unknown identity '{tag}'"))),
    }
}

fn cmd_verify(args: &VerifyArgs) -> std::result::Result<Outcome, Abort> {
    let (map, n) = load_map(args.map.as_deref(), args.n)?;
    check_sizes(n, args.samples, args.tol)?;
    let check = parse_identity(&args.identity, args.weights.as_deref(), args.k, n).map_err(input_error)?;
    let cfg = SampleConfig::new(args.class, n, args.samples, args.common.seed, args.tol);
    let report = match &check {
        Check::Det(mode) => verify_det_identity(&map, &cfg, mode),
        Check::Trace(kind) => verify_trace_identity(&map, &cfg, *kind),
        Check::Homogeneity => check_homogeneity(&map, &cfg),
        Check::Additivity => check_additivity(&map, &cfg),
        Check::HomogeneityAdditivity => check_homogeneity_additivity(&map, &cfg),
    }
    .map_err(|e| runtime_error(e, EXIT_FAIL))?;
    outcome(&report, report.pass)
}

fn cmd_recover(args: &RecoverArgs) -> std::result::Result<Outcome, Abort> {
    let (map, n) = load_map(args.map.as_deref(), args.n)?;
    check_sizes(n, 1, args.tol)?;
    let r = recover(&map, args.class, n, args.tol).map_err(|e| runtime_error(e, EXIT_STRUCTURAL))?;
    outcome(&RecoveryReport::from(&r), true)
}

#[derive(Serialize)]
struct KadisonChoiOutput {
    oracle: &'static str,
    seed: u64,
    #[serde(flatten)]
    report: crate::verifiers::KadisonChoiReport,
}

fn cmd_oracle(args: &OracleArgs) -> std::result::Result<Outcome, Abort> {
    let tol = args.tol.unwrap_or(match args.oracle {
        OracleName::Jacobi => 1e-6,
        _ => 1e-8,
    });
    check_sizes(args.n, args.samples, tol)?;
    if args.map.is_some() && args.oracle != OracleName::KadisonChoi {
        return Err(Abort::input("--map only applies to kadison-choi"));
    }
    let seed = args.common.seed;
    let fail = |e| runtime_error(e, EXIT_FAIL);
    match args.oracle {
        OracleName::Minkowski => {
            let r = minkowski_sweep(args.n, args.samples, seed).map_err(fail)?;
            outcome(&r, r.pass)
        }
        OracleName::Jacobi => {
            let r = jacobi_sweep(args.n, args.samples, seed, tol).map_err(fail)?;
            outcome(&r, r.pass)
        }
        OracleName::DualWitness => {
            let r = dual_witness_sweep(args.class, args.n, args.samples, seed).map_err(fail)?;
            outcome(&r, r.pass)
        }
        OracleName::KadisonChoi => {
            let map = match &args.map {
                Some(_) => load_map(args.map.as_deref(), Some(args.n))?.0,
                None => BlackBox::Pinching,
            };
            let report = check_kadison_choi(&map, args.n, args.samples, seed, tol).map_err(fail)?;
            let pass = report.pass;
            outcome(
                &KadisonChoiOutput {
                    oracle: "kadison-choi",
                    seed,
                    report,
                },
                pass,
            )
        }
    }
}

fn cmd_counterexample(args: &CounterexampleArgs) -> std::result::Result<Outcome, Abort> {
    check_sizes(args.n, args.samples, 1.0)?;
    let map = match &args.map {
        None => NormTwistMap::new(args.n),
        Some(source) => {
            let spec = load_spec(source).map_err(input_error)?;
            if spec.kind != MapKind::NormTwist {
                return Err(Abort::input("counterexample --map must be a remark1 spec"));
            }
            match spec.build().map_err(input_error)? {
                BlackBox::NormTwist(Some(r)) if r.dim() == args.n => r,
                BlackBox::NormTwist(Some(r)) => {
                    return Err(Abort::input(format!(
                        "generator is {0} x {0} but --n is {1}",
                        r.dim(),
                        args.n
                    )))
                }
                _ => NormTwistMap::new(args.n),
            }
        }
    };
    let r = counterexample_battery(&map, args.n, args.samples, args.common.seed)
        .map_err(|e| runtime_error(e, EXIT_FAIL))?;
    outcome(&r, r.expected_signature)
}

fn write_report(out: Option<&PathBuf>, report: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, report),
        None => stdout.write_all(report.as_bytes()),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let (result, out) = match &cli.command {
        Command::Verify(a) => (cmd_verify(a), &a.common.out),
        Command::Recover(a) => (cmd_recover(a), &a.common.out),
        Command::Oracle(a) => (cmd_oracle(a), &a.common.out),
        Command::Counterexample(a) => (cmd_counterexample(a), &a.common.out),
    };
    match result {
        Ok(o) => {
            if let Err(e) = write_report(out.as_ref(), &o.report, stdout) {
                let _ = writeln!(stderr, "error: cannot write report: {e}");
                return EXIT_INPUT;
            }
            o.code
        }
        Err(a) => {
            let _ = writeln!(stderr, "error: {}", a.message);
            a.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let cases = [
            ("3", (3.0, 0.0)),
            ("-2.5", (-2.5, 0.0)),
            ("i", (0.0, 1.0)),
            ("-i", (0.0, -1.0)),
            ("2i", (0.0, 2.0)),
            ("1+2i", (1.0, 2.0)),
            ("1 - i", (1.0, -1.0)),
            ("1e-3-4e-2i", (1e-3, -4e-2)),
            ("-1e+2+3E-1i", (-100.0, 0.3)),
        ];
        for (text, (re, im)) in cases {
            assert_eq!(parse_complex(text).unwrap(), Complex64::new(re, im), "{text}");
        }
        for bad in ["", "abc", "1+", "2ii", "1+2j"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn identity_tags() {
        assert!(matches!(
            parse_identity("trace-power-3", None, None, 2),
            Ok(Check::Trace(TraceKind::Power(3)))
        ));
        assert!(matches!(
            parse_identity("trace-power-k", None, Some(2), 2),
            Ok(Check::Trace(TraceKind::Power(2)))
        ));
        assert!(parse_identity("trace-power-3", None, Some(2), 2).is_err());
        assert!(parse_identity("trace-power", None, None, 2).is_err());
        assert!(parse_identity("det-sum", Some("1,2"), None, 2).is_err());
        assert!(matches!(
            parse_identity("det-convex", Some("0, 0.5"), None, 2),
            Ok(Check::Det(DetMode::Convex(ts))) if ts == vec![0.0, 0.5]
        ));
        assert!(matches!(
            parse_identity("det-pencil", Some("1+i,-2"), None, 2),
            Ok(Check::Det(DetMode::Pencil(ls))) if ls == vec![Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.0)]
        ));
        assert!(parse_identity("det-everything", None, None, 2).is_err());
    }
}
