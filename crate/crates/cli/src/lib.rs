//! `lyalg` command-line front end.
//!
//! Every command prints one JSON report
//! `{"command", "status": "pass"|"fail"|"error", "payload", "diagnostics"}` to
//! `--out` or stdout, plus a one-line summary on stderr. Exit codes: 0 pass,
//! 1 checks failed, 2 usage or input error, 3 size cap exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lyalg::algebra::{abelian, cross_product_lie, derivations, example_3dim, matrix_from_flat, meson, LyAlgebra};
use lyalg::bundle::{
    bundle_cohomology, check_cocycle, check_subbundle, circle_bundle, der_bundle_dims, BundleError, BundleSpec,
    Coefficients, EvalMode,
};
use lyalg::cohomology::{cohomology_report, is_23_cocycle, CohomologyError, DEFAULT_SIZE_CAP};
use lyalg::json::{self as lj, JsonError};
use lyalg::linalg::{parse_rational, SubspaceBasis};
use lyalg::representation::{check_representation, semidirect, twisted_semidirect, Representation};
use num_traits::ToPrimitive;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const EXAMPLES: [&str; 6] = [
    "3dim",
    "meson2",
    "meson3",
    "crossproduct-lie",
    "abelian2",
    "circle-bundle",
];

#[derive(Parser, Debug)]
#[command(name = "lyalg", version, about = "Exact computations for Lie-Yamaguti algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Mode {
    Exact,
    Float,
}

#[derive(clap::Args, Debug)]
struct RepArgs {
    /// `adjoint`, `trivial`, `trivial:N`, or a representation JSON file.
    #[arg(long, default_value = "adjoint")]
    rep: String,
}

#[derive(clap::Args, Debug)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Absolute entrywise tolerance for float mode.
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the six defining identities.
    Check { algebra: PathBuf },
    /// Basis of the derivation algebra.
    Derivations { algebra: PathBuf },
    /// Cohomology dimensions: p = 0 for H^1, 1 for H^(2,3), p >= 2 for H^(2p,2p+1).
    Cohomology {
        algebra: PathBuf,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[command(flatten)]
        rep: RepArgs,
        /// Largest target cochain space, in coordinates.
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
    },
    /// Check the representation conditions.
    RepCheck {
        algebra: PathBuf,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Build and check the semi-direct product.
    Semidirect {
        algebra: PathBuf,
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Build and check the semi-direct product twisted by a (2,3)-cochain.
    Twist {
        algebra: PathBuf,
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        cocycle: PathBuf,
    },
    /// Verify the transition data of a bundle.
    BundleCheck {
        bundle: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// JSON array of fibre vectors spanning a subalgebra to test as a sub-bundle.
        #[arg(long)]
        subspace: Option<PathBuf>,
    },
    /// Fibrewise cohomology (or, with --der, derivation dimensions) at every sample.
    BundleCohomology {
        bundle: PathBuf,
        #[arg(long, default_value_t = 0)]
        p: usize,
        /// `adjoint`, `trivial` or `trivial:N`.
        #[arg(long, default_value = "adjoint")]
        rep: String,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: usize,
        /// Report dim Der per sample and the conjugation invariance check.
        #[arg(long)]
        der: bool,
    },
    /// Print a bundled fixture.
    Examples { name: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Derivations { .. } => "derivations",
            Command::Cohomology { .. } => "cohomology",
            Command::RepCheck { .. } => "rep-check",
            Command::Semidirect { .. } => "semidirect",
            Command::Twist { .. } => "twist",
            Command::BundleCheck { .. } => "bundle-check",
            Command::BundleCohomology { .. } => "bundle-cohomology",
            Command::Examples { .. } => "examples",
        }
    }
}

/// Failure that stops a command before a verdict.
#[derive(Debug)]
enum Abort {
    Usage(String),
    Cap(String),
}

impl From<JsonError> for Abort {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Cohomology(c) => c.into(),
            JsonError::Bundle(b) => b.into(),
            other => Abort::Usage(other.to_string()),
        }
    }
}

impl From<CohomologyError> for Abort {
    fn from(e: CohomologyError) -> Self {
        match e {
            CohomologyError::SizeCapExceeded { .. } => Abort::Cap(e.to_string()),
            other => Abort::Usage(other.to_string()),
        }
    }
}

impl From<BundleError> for Abort {
    fn from(e: BundleError) -> Self {
        match e {
            BundleError::Cohomology(c) => c.into(),
            other => Abort::Usage(other.to_string()),
        }
    }
}

impl From<lyalg::AlgebraError> for Abort {
    fn from(e: lyalg::AlgebraError) -> Self {
        Abort::Usage(e.to_string())
    }
}

impl From<lyalg::representation::RepError> for Abort {
    fn from(e: lyalg::representation::RepError) -> Self {
        Abort::Usage(e.to_string())
    }
}

struct Outcome {
    pass: bool,
    payload: Value,
    diagnostics: Vec<String>,
    summary: String,
}

impl Outcome {
    fn verdict(pass: bool, payload: Value, summary: String) -> Self {
        Outcome {
            pass,
            payload,
            diagnostics: Vec::new(),
            summary,
        }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            if code == EXIT_PASS {
                let _ = write!(stdout, "{e}");
                return code;
            }
            let _ = write!(stderr, "{e}");
            if code == EXIT_USAGE {
                let report = report("usage", "error", Value::Null, vec![e.kind().to_string()]);
                let _ = writeln!(stdout, "{}", pretty(&report));
            }
            return code;
        }
    };
    let command = cli.command.name();
    if let Command::Examples { name } = &cli.command {
        return match example_json(name) {
            Some(v) => match emit(cli.out.as_deref(), &pretty(&v), stdout) {
                Ok(()) => EXIT_PASS,
                Err(e) => {
                    let _ = writeln!(stderr, "lyalg: cannot write output: {e}");
                    EXIT_USAGE
                }
            },
            None => {
                let msg = format!("unknown example `{name}`; known: {}", EXAMPLES.join(", "));
                let _ = writeln!(stderr, "lyalg: {msg}");
                let _ = writeln!(stdout, "{}", pretty(&report(command, "error", Value::Null, vec![msg])));
                EXIT_USAGE
            }
        };
    }
    let (code, rep, summary) = match dispatch(&cli.command) {
        Ok(o) => {
            let (code, status) = if o.pass {
                (EXIT_PASS, "pass")
            } else {
                (EXIT_FAIL, "fail")
            };
            (code, report(command, status, o.payload, o.diagnostics), o.summary)
        }
        Err(Abort::Usage(m)) => (EXIT_USAGE, report(command, "error", Value::Null, vec![m.clone()]), m),
        Err(Abort::Cap(m)) => (EXIT_CAP, report(command, "error", Value::Null, vec![m.clone()]), m),
    };
    let _ = writeln!(stderr, "{command}: {summary}");
    if let Err(e) = emit(cli.out.as_deref(), &pretty(&rep), stdout) {
        let _ = writeln!(stderr, "lyalg: cannot write output: {e}");
        return EXIT_USAGE;
    }
    code
}

fn report(command: &str, status: &str, payload: Value, diagnostics: Vec<String>) -> Value {
    json!({"command": command, "status": status, "payload": payload, "diagnostics": diagnostics})
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => writeln!(stdout, "{text}"),
    }
}

fn read_json(path: &Path) -> Result<Value, Abort> {
    let text = fs::read_to_string(path).map_err(|e| Abort::Usage(format!("{}: {e}", path.display())))?;
    lj::parse(&text).map_err(|e| Abort::Usage(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<LyAlgebra, Abort> {
    lj::algebra_from_json(&read_json(path)?).map_err(|e| Abort::Usage(format!("{}: {e}", path.display())))
}

fn load_rep(arg: &str, a: &LyAlgebra) -> Result<Representation, Abort> {
    match arg {
        "adjoint" => Ok(Representation::adjoint_unchecked(a)),
        "trivial" => Ok(Representation::trivial(a, 1)),
        s if s.starts_with("trivial:") => {
            let e = s["trivial:".len()..]
                .parse()
                .map_err(|_| Abort::Usage(format!("bad module dimension in `{s}`")))?;
            Ok(Representation::trivial(a, e))
        }
        path => {
            let p = Path::new(path);
            lj::representation_from_json(&read_json(p)?, a.dim()).map_err(|e| Abort::Usage(format!("{path}: {e}")))
        }
    }
}

fn coefficients(arg: &str) -> Result<Coefficients, Abort> {
    match arg {
        "adjoint" => Ok(Coefficients::Adjoint),
        "trivial" => Ok(Coefficients::Trivial(1)),
        s if s.starts_with("trivial:") => s["trivial:".len()..]
            .parse()
            .map(Coefficients::Trivial)
            .map_err(|_| Abort::Usage(format!("bad module dimension in `{s}`"))),
        other => Err(Abort::Usage(format!(
            "bundle cohomology takes `adjoint` or `trivial[:N]`, got `{other}`"
        ))),
    }
}

fn eval_mode(m: &ModeArgs) -> Result<EvalMode, Abort> {
    match m.mode {
        Mode::Exact => Ok(EvalMode::Exact),
        Mode::Float => {
            let tol = match &m.tol {
                None => EvalMode::DEFAULT_TOL,
                Some(t) => parse_tolerance(t).ok_or_else(|| Abort::Usage(format!("bad tolerance `{t}`")))?,
            };
            if tol.is_nan() || tol <= 0.0 {
                return Err(Abort::Usage("tolerance must be positive".into()));
            }
            Ok(EvalMode::Float { tol })
        }
    }
}

/// Decimal (`1e-9`) or rational (`1/1000000`).
fn parse_tolerance(t: &str) -> Option<f64> {
    t.parse::<f64>()
        .ok()
        .or_else(|| parse_rational(t).ok().and_then(|q| q.to_f64()))
}

fn axiom_payload(a: &LyAlgebra) -> (bool, Value, String) {
    let rep = a.check_axioms();
    let axioms: Vec<String> = rep.violated_axioms().iter().map(|x| x.to_string()).collect();
    let summary = if rep.is_empty() {
        format!("{} satisfies LY1-LY6", a.name())
    } else {
        format!("{} violates {}", a.name(), axioms.join(", "))
    };
    let payload = json!({
        "algebra": a.name(),
        "dim": a.dim(),
        "violated_axioms": axioms,
        "violations": lj::axiom_report_to_json(&rep),
    });
    (rep.is_empty(), payload, summary)
}

fn dispatch(cmd: &Command) -> Result<Outcome, Abort> {
    match cmd {
        Command::Check { algebra } => {
            let a = load_algebra(algebra)?;
            let (pass, payload, summary) = axiom_payload(&a);
            Ok(Outcome::verdict(pass, payload, summary))
        }
        Command::Derivations { algebra } => {
            let a = load_algebra(algebra)?;
            let (pass, payload, summary) = axiom_payload(&a);
            if !pass {
                let mut o = Outcome::verdict(false, payload, summary);
                o.diagnostics.push("derivations need a valid algebra".into());
                return Ok(o);
            }
            let der = derivations(&a)?;
            let basis: Vec<Value> = der
                .vectors()
                .iter()
                .map(|v| lj::matrix_to_json(&matrix_from_flat(a.dim(), v)))
                .collect();
            Ok(Outcome::verdict(
                true,
                json!({"algebra": a.name(), "dim": der.dim(), "basis": basis}),
                format!("dim Der({}) = {}", a.name(), der.dim()),
            ))
        }
        Command::Cohomology { algebra, p, rep, cap } => {
            let a = load_algebra(algebra)?;
            let r = load_rep(&rep.rep, &a)?;
            if let Some(o) = precondition_failure(&a, &r) {
                return Ok(o);
            }
            let report = cohomology_report(&a, &r, *p, *cap)?;
            let mut payload = lj::cohomology_report_to_json(&report);
            payload["algebra"] = json!(a.name());
            payload["rep"] = json!(rep.rep);
            let summary = format!(
                "dim Z = {}, dim B = {}, dim H = {}, delta^2 = 0: {}",
                report.dim_z, report.dim_b, report.dim_h, report.delta_squared_zero
            );
            let mut o = Outcome::verdict(report.delta_squared_zero, payload, summary);
            if let Some(z) = report.z_reading {
                o.diagnostics.push(z.to_string());
            }
            Ok(o)
        }
        Command::RepCheck { algebra, rep } => {
            let a = load_algebra(algebra)?;
            let r = load_rep(&rep.rep, &a)?;
            let report = check_representation(&a, &r)?;
            let mut payload = lj::rep_report_to_json(&report);
            payload["algebra"] = json!(a.name());
            payload["e"] = json!(r.module_dim());
            let summary = if report.is_valid() {
                "RLYB1-RLYB6 hold".to_string()
            } else {
                format!("{} violations", report.violations.len())
            };
            Ok(Outcome::verdict(report.is_valid(), payload, summary))
        }
        Command::Semidirect { algebra, rep } => {
            let a = load_algebra(algebra)?;
            let r = load_rep(&rep.rep, &a)?;
            let prod = semidirect(&a, &r)?;
            let (pass, mut payload, summary) = axiom_payload(&prod);
            payload["product"] = lj::algebra_to_json(&prod);
            payload["representation_valid"] = json!(check_representation(&a, &r)?.is_valid());
            Ok(Outcome::verdict(pass, payload, summary))
        }
        Command::Twist { algebra, rep, cocycle } => {
            let a = load_algebra(algebra)?;
            let r = load_rep(&rep.rep, &a)?;
            let tau = lj::cochain_pair_from_json(&read_json(cocycle)?)
                .map_err(|e| Abort::Usage(format!("{}: {e}", cocycle.display())))?;
            let prod = twisted_semidirect(&a, &r, &tau)?;
            let (pass, mut payload, summary) = axiom_payload(&prod);
            payload["product"] = lj::algebra_to_json(&prod);
            payload["is_cocycle"] = json!(is_23_cocycle(&a, &r, &tau)?);
            Ok(Outcome::verdict(pass, payload, summary))
        }
        Command::BundleCheck { bundle, mode, subspace } => {
            let b = load_bundle(bundle)?;
            let m = eval_mode(mode)?;
            let rep = check_cocycle(&b, m)?;
            let failures: Vec<Value> = rep
                .failures
                .iter()
                .map(|f| {
                    json!({
                        "check": f.check.to_string(),
                        "location": f.location,
                        "point": lj::vector_to_json(&f.point),
                        "defect": f.defect,
                        "detail": f.detail,
                    })
                })
                .collect();
            let mut pass = rep.passed();
            let mut payload = json!({"checks_run": rep.checks_run, "failures": failures});
            let mut diagnostics = Vec::new();
            if let Some(path) = subspace {
                let vs = read_json(path)?;
                let arr = vs
                    .as_array()
                    .ok_or_else(|| Abort::Usage(format!("{}: expected an array of vectors", path.display())))?;
                let vectors = arr
                    .iter()
                    .enumerate()
                    .map(|(i, v)| lj::vector_from_json(v, &format!("$[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                if vectors.iter().any(|v| v.len() != b.fiber.dim()) {
                    return Err(Abort::Usage("subspace vectors must have the fibre dimension".into()));
                }
                let h = SubspaceBasis::new(b.fiber.dim(), vectors);
                let sub = check_subbundle(&b, &h, m)?;
                pass &= sub.passed();
                payload["subbundle"] = json!({
                    "dim": h.dim(),
                    "checks_run": sub.checks_run,
                    "failures": sub.failures.iter().map(|f| json!({
                        "location": f.transition,
                        "point": lj::vector_to_json(&f.point),
                        "detail": f.detail,
                    })).collect::<Vec<_>>(),
                });
                diagnostics.push(lyalg::bundle::SubbundleReport::SCOPE.to_string());
            }
            let summary = format!("{} checks, {} failures", rep.checks_run, rep.failures.len());
            Ok(Outcome {
                pass,
                payload,
                diagnostics,
                summary,
            })
        }
        Command::BundleCohomology {
            bundle,
            p,
            rep,
            mode,
            cap,
            der,
        } => {
            let b = load_bundle(bundle)?;
            let m = eval_mode(mode)?;
            if *der {
                let r = der_bundle_dims(&b, m)?;
                let points: Vec<Value> = r
                    .points
                    .iter()
                    .map(
                        |(sp, n)| json!({"location": sp.location, "point": lj::vector_to_json(&sp.point), "dimDer": n}),
                    )
                    .collect();
                let payload = json!({
                    "points": points,
                    "constant": r.constant,
                    "conjugation_checks": r.conjugation_checks,
                    "conjugation_failures": r.conjugation_failures.iter().map(|f| json!({
                        "location": f.transition,
                        "point": lj::vector_to_json(&f.point),
                        "derivation": f.derivation + 1,
                        "defect": f.defect,
                    })).collect::<Vec<_>>(),
                });
                let summary = format!(
                    "{} points, constant: {}, {} conjugation checks, {} failures",
                    r.points.len(),
                    r.constant,
                    r.conjugation_checks,
                    r.conjugation_failures.len()
                );
                return Ok(Outcome::verdict(r.passed(), payload, summary));
            }
            let r = bundle_cohomology(&b, *p, coefficients(rep)?, m, *cap)?;
            let points: Vec<Value> = r
                .points
                .iter()
                .map(|(sp, c)| {
                    json!({
                        "location": sp.location,
                        "point": lj::vector_to_json(&sp.point),
                        "dimZ": c.dim_z,
                        "dimB": c.dim_b,
                        "dimH": c.dim_h,
                    })
                })
                .collect();
            let dims: Vec<usize> = r.points.iter().map(|(_, c)| c.dim_h).collect();
            let squared = r.points.iter().all(|(_, c)| c.delta_squared_zero);
            let payload = json!({
                "p": p,
                "rep": rep,
                "points": points,
                "constant": r.constant,
                "delta_squared_zero": squared,
            });
            let summary = format!(
                "{} points, dim H in {:?}, constant: {}",
                dims.len(),
                {
                    let mut d = dims.clone();
                    d.dedup();
                    d
                },
                r.constant
            );
            Ok(Outcome::verdict(r.constant && squared, payload, summary))
        }
        Command::Examples { .. } => unreachable!("handled before dispatch"),
    }
}

fn load_bundle(path: &Path) -> Result<BundleSpec, Abort> {
    lj::bundle_from_json(&read_json(path)?).map_err(|e| match e {
        JsonError::Bundle(BundleError::Cohomology(c)) => c.into(),
        other => Abort::Usage(format!("{}: {other}", path.display())),
    })
}

/// Algebra or representation failures reported as a failed verdict.
fn precondition_failure(a: &LyAlgebra, r: &Representation) -> Option<Outcome> {
    let (pass, payload, summary) = axiom_payload(a);
    if !pass {
        let mut o = Outcome::verdict(false, payload, summary);
        o.diagnostics.push("cohomology needs a valid algebra".into());
        return Some(o);
    }
    let rep = match check_representation(a, r) {
        Ok(rep) => rep,
        Err(e) => {
            let mut o = Outcome::verdict(false, Value::Null, e.to_string());
            o.diagnostics.push(e.to_string());
            return Some(o);
        }
    };
    if rep.is_valid() {
        return None;
    }
    let mut o = Outcome::verdict(
        false,
        lj::rep_report_to_json(&rep),
        "coefficients are not a representation".into(),
    );
    o.diagnostics.push("cohomology needs a valid representation".into());
    Some(o)
}

/// Fixture JSON for a bundled example.
pub fn example_json(name: &str) -> Option<Value> {
    let alg = |a: LyAlgebra| Some(lj::algebra_to_json(&a));
    match name {
        "3dim" => alg(example_3dim()),
        "meson2" => alg(meson(2)),
        "meson3" => alg(meson(3)),
        "crossproduct-lie" => alg(cross_product_lie()),
        "abelian2" => alg(abelian(2)),
        "circle-bundle" => Some(lj::bundle_to_json(&circle_bundle(example_3dim()))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rep_specs() {
        let a = example_3dim();
        assert_eq!(load_rep("adjoint", &a).unwrap().module_dim(), 3);
        assert_eq!(load_rep("trivial", &a).unwrap().module_dim(), 1);
        assert_eq!(load_rep("trivial:4", &a).unwrap().module_dim(), 4);
        assert!(matches!(load_rep("trivial:", &a), Err(Abort::Usage(_))));
        assert!(matches!(load_rep("no-such-file.json", &a), Err(Abort::Usage(_))));
    }

    #[test]
    fn tolerances() {
        assert_eq!(parse_tolerance("1e-6"), Some(1e-6));
        assert_eq!(parse_tolerance("1/1000"), Some(0.001));
        assert_eq!(parse_tolerance("tiny"), None);
    }

    #[test]
    fn coefficient_specs() {
        assert_eq!(coefficients("adjoint").unwrap(), Coefficients::Adjoint);
        assert_eq!(coefficients("trivial:2").unwrap(), Coefficients::Trivial(2));
        assert!(coefficients("rep.json").is_err());
    }

    #[test]
    fn every_example_has_a_fixture() {
        for name in EXAMPLES {
            assert!(example_json(name).is_some(), "{name}");
        }
        assert!(example_json("4dim").is_none());
    }

    #[test]
    fn cap_errors_map_to_exit_three() {
        let e = CohomologyError::SizeCapExceeded { needed: 10, cap: 1 };
        assert!(matches!(Abort::from(e), Abort::Cap(_)));
        let e = BundleError::Cohomology(CohomologyError::SizeCapExceeded { needed: 10, cap: 1 });
        assert!(matches!(Abort::from(e), Abort::Cap(_)));
    }
}
