//! Command line front end: every computation reads JSON or flags and writes a
//! JSON document with a `schema` field, optionally with a run manifest.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 when the
//! input cannot be used.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use fukaya_torus::ainfinity::{associativity_check, mu, CFElement, MuOptions, Precision};
use fukaya_torus::circle::{verify_circle_isotopy, PlaneDiscModel, PlaneField, RadiusPath};
use fukaya_torus::derham::{disc_scenario, non_lagrangian_counterexample, stokes_invariance_report};
use fukaya_torus::expr::Expr;
use fukaya_torus::grading::{grading_table, hom_space};
use fukaya_torus::isotopy::{verify_isotopy_theorem, LineIsotopy};
use fukaya_torus::{Brane, Error, TorusAmbient};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const SCHEMA_PREFIX: &str = "fukaya-torus";

#[derive(Parser, Debug)]
#[command(name = "fukaya-torus", version, about = "Floer complexes, A-infinity products and isotopy checks on flat tori")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a run manifest to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Leave wall-clock times out of the manifest so reruns are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Summation mode for series: double or compensated.
    #[arg(long, global = true, env = Precision::ENV, value_parser = parse_precision)]
    precision: Option<Precision>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generators of CF(b0, b1) grouped by degree.
    Hom {
        #[arg(long)]
        branes: PathBuf,
    },
    /// μ^k of the scenario's inputs (all-ones inputs when none are given).
    Mu {
        #[arg(long)]
        scenario: PathBuf,
        /// Expected number of inputs; checked against the scenario.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compares the two ways of composing three morphisms with μ².
    Assoc {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Weight changes of polygon classes under a translation of one brane.
    Isotopy {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The round circle in the plane growing from radius r0 to r1.
    Circle {
        /// Model JSON; overrides the flags below.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 2.0)]
        r1: f64,
        /// linear or smoothstep.
        #[arg(long, default_value = "linear")]
        path: String,
        /// B-field coefficient b(x, y).
        #[arg(long, default_value = "0")]
        b: String,
        /// Second B-field used for the independence check.
        #[arg(long, default_value = "exp(-x^2 - y^2)")]
        alt_b: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Refinement study of the relative pairing on the disc model.
    Stokes {
        #[arg(long, default_value_t = 4)]
        levels: u32,
        /// B-field coefficient b(x, y) of b dx∧dy.
        #[arg(long, default_value = "1 + x^2 + exp(-y^2)")]
        b: String,
        /// θ = t(s) ds on the unit circle.
        #[arg(long, default_value = "0.3 + cos(s)")]
        theta: String,
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
        kappa: f64,
        /// Also run the torus pair in R^4, Lagrangian and twisted.
        #[arg(long)]
        counterexample: bool,
        /// Write the finest mesh of the deformed disc here.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
    },
    /// Degrees between ℓ_{k0}^n and ℓ_{k1}^n.
    GradingTable {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Inclusive range such as -3..3.
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        k_range: String,
    },
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Input(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NonPrimitiveDirection(..)
            | Error::ParallelLines { .. }
            | Error::PointNotOnLine
            | Error::InvalidAmbient(_)
            | Error::InvalidBrane(_)
            | Error::DegenerateCorners(..)
            | Error::Unsupported(_)
            | Error::InvalidInput(_)
            | Error::DegenerateMesh(_)
            | Error::Expr(_) => Failure::Input(msg),
            _ => Failure::Mismatch(msg),
        }
    }
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct Scenario {
    #[serde(default)]
    ambient: Option<TorusAmbient>,
    branes: Vec<Brane>,
    #[serde(default)]
    inputs: Option<Vec<CFElement>>,
    #[serde(default)]
    isotopy: Option<LineIsotopy>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    max_cutoff: Option<f64>,
}

impl Scenario {
    fn ambient(&self) -> Result<TorusAmbient, Failure> {
        match &self.ambient {
            Some(a) => {
                a.validate()?;
                Ok(a.clone())
            }
            None => {
                let n = self.branes.first().ok_or_else(|| Failure::Input("scenario has no branes".into()))?.n();
                Ok(TorusAmbient::standard(n))
            }
        }
    }

    fn inputs(&self) -> Result<Vec<CFElement>, Failure> {
        match &self.inputs {
            Some(i) => Ok(i.clone()),
            None => self
                .branes
                .windows(2)
                .map(|w| CFElement::all_ones(&w[0], &w[1]).map_err(Failure::from))
                .collect(),
        }
    }

    fn options(&self, tol: Option<f64>, precision: Precision) -> MuOptions {
        let mut o = MuOptions { precision, ..MuOptions::default() };
        if let Some(t) = tol.or(self.tol) {
            o.tol = t;
        }
        if let Some(c) = self.max_cutoff {
            o.max_cutoff = c;
        }
        o
    }
}

/// Output of one subcommand before it is wrapped with the schema.
struct Run {
    result: Value,
    passes: bool,
    config: Value,
    tolerances: BTreeMap<String, f64>,
    counts: BTreeMap<String, usize>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, Value), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let parsed = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((parsed, raw))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<i64>, Failure> {
    let bad = || Failure::Input(format!("expected a range like -3..3, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn field(src: &str) -> Result<PlaneField, Failure> {
    Ok(PlaneField::parse(src)?)
}

fn run(cmd: &Command, precision: Precision) -> Result<Run, Failure> {
    let mut tolerances = BTreeMap::new();
    let mut counts = BTreeMap::new();
    match cmd {
        Command::Hom { branes } => {
            let (sc, raw): (Scenario, Value) = read_json(branes)?;
            if sc.branes.len() != 2 {
                return Err(Failure::Input(format!("hom needs exactly two branes, got {}", sc.branes.len())));
            }
            let amb = sc.ambient()?;
            for b in &sc.branes {
                b.check_ambient(&amb)?;
            }
            let space = hom_space(&sc.branes[0], &sc.branes[1])?;
            counts.insert("generators".into(), space.values().map(Vec::len).sum());
            let by_degree: BTreeMap<String, Value> = space.iter().map(|(d, g)| (d.to_string(), to_value(g))).collect();
            Ok(Run { result: json!({ "degrees": by_degree }), passes: true, config: raw, tolerances, counts })
        }
        Command::Mu { scenario, k, tol } => {
            let (sc, raw): (Scenario, Value) = read_json(scenario)?;
            let inputs = sc.inputs()?;
            if let Some(k) = k {
                if *k != inputs.len() {
                    return Err(Failure::Input(format!("--k {k} but the scenario has {} inputs", inputs.len())));
                }
            }
            let opts = sc.options(*tol, precision);
            tolerances.insert("tol".into(), opts.tol);
            let res = mu(&sc.branes, &inputs, &sc.ambient()?, &opts)?;
            counts.insert("classes".into(), res.classes_used);
            Ok(Run { result: to_value(&res), passes: true, config: raw, tolerances, counts })
        }
        Command::Assoc { scenario, tol } => {
            let (sc, raw): (Scenario, Value) = read_json(scenario)?;
            let opts = sc.options(*tol, precision);
            tolerances.insert("tol".into(), opts.tol);
            let rep = associativity_check(&sc.branes, &sc.inputs()?, &sc.ambient()?, &opts)?;
            tolerances.insert("combined".into(), rep.combined_tolerance);
            counts.insert("output_generators".into(), rep.left.coeffs.len());
            Ok(Run { passes: rep.passes, result: to_value(&rep), config: raw, tolerances, counts })
        }
        Command::Isotopy { scenario, tol } => {
            let (sc, raw): (Scenario, Value) = read_json(scenario)?;
            let iso = sc.isotopy.clone().ok_or_else(|| Failure::Input("scenario has no \"isotopy\" entry".into()))?;
            let opts = sc.options(*tol, precision);
            tolerances.insert("tol".into(), opts.tol);
            let rep = verify_isotopy_theorem(&sc.branes, &sc.inputs()?, &sc.ambient()?, &iso, &opts)?;
            counts.insert("classes".into(), rep.classes.len());
            Ok(Run { passes: rep.passes, result: to_value(&rep), config: raw, tolerances, counts })
        }
        Command::Circle { model, r0, r1, path, b, alt_b, beta, tol } => {
            let (m, config) = match model {
                Some(p) => read_json::<PlaneDiscModel>(p)?,
                None => {
                    let radius = match path.as_str() {
                        "linear" => RadiusPath::Linear { r0: *r0, r1: *r1 },
                        "smoothstep" => RadiusPath::Smoothstep { r0: *r0, r1: *r1 },
                        other => return Err(Failure::Input(format!("unknown radius path {other:?}"))),
                    };
                    let m = PlaneDiscModel::new(field(b)?, radius, *beta)?;
                    let v = to_value(&m);
                    (m, v)
                }
            };
            m.validate()?;
            let rep = verify_circle_isotopy(&m, &field(alt_b)?, *tol)?;
            tolerances.insert("tol".into(), *tol);
            tolerances.insert("quadrature_tol".into(), m.quadrature_tol);
            let config = json!({ "model": config, "alt_b": alt_b });
            Ok(Run { passes: rep.passes, result: to_value(&rep), config, tolerances, counts })
        }
        Command::Stokes { levels, b, theta, eps, kappa, counterexample, mesh_out } => {
            if *levels < 2 {
                return Err(Failure::Input("a refinement study needs at least two levels".into()));
            }
            let bx = Expr::parse(b, &["x", "y"])?;
            let th = Expr::parse(theta, &["s"])?;
            let (cocycle, z0, z1, a, psi) = disc_scenario(bx, th, *eps, *kappa);
            let rep = stokes_invariance_report(&cocycle, &z0, &z1, (&a, &psi), *levels, true)?;
            let finest = z1.mesh(*levels - 1)?;
            counts.insert("triangles_finest".into(), finest.triangles.len());
            if let Some(p) = mesh_out {
                write_json(p, &to_value(&finest))?;
            }
            let mut passes = rep.passes;
            let mut result = json!({ "disc": rep });
            if *counterexample {
                let ce = non_lagrangian_counterexample(0.5, *levels)?;
                passes &= ce.exhibits_gap;
                result["torus"] = to_value(&ce);
            }
            tolerances.insert("noise_floor".into(), fukaya_torus::derham::NOISE_FLOOR);
            tolerances.insert("min_order".into(), fukaya_torus::derham::MIN_ORDER);
            let config = json!({
                "levels": levels, "b": b, "theta": theta, "eps": eps, "kappa": kappa, "counterexample": counterexample,
            });
            Ok(Run { result, passes, config, tolerances, counts })
        }
        Command::GradingTable { n, k_range } => {
            let range = parse_range(k_range)?;
            if *n == 0 {
                return Err(Failure::Input("n must be positive".into()));
            }
            let rows = grading_table(*n, range)?;
            counts.insert("rows".into(), rows.len());
            let config = json!({ "n": n, "k_range": k_range });
            Ok(Run { result: to_value(&rows), passes: true, config, tolerances, counts })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Hom { .. } => "hom",
        Command::Mu { .. } => "mu",
        Command::Assoc { .. } => "assoc",
        Command::Isotopy { .. } => "isotopy",
        Command::Circle { .. } => "circle",
        Command::Stokes { .. } => "stokes",
        Command::GradingTable { .. } => "grading-table",
    }
}

/// Everything needed to rerun a command and compare its output.
#[derive(Serialize)]
struct RunManifest<'a> {
    schema: String,
    tool_version: &'static str,
    command: &'a str,
    config: &'a Value,
    tolerances: &'a BTreeMap<String, f64>,
    precision: Precision,
    threads: Option<usize>,
    deterministic: bool,
    wall_clock_seconds: Option<f64>,
    counts: &'a BTreeMap<String, usize>,
    passes: bool,
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).expect("values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Prints to stdout, treating a closed pipe as success.
fn print_stdout(v: &Value) -> Result<(), Failure> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("values serialize");
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: could not size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let precision = cli.precision.unwrap_or_default();
    let name = command_name(&cli.command);
    let start = Instant::now();
    let outcome = run(&cli.command, precision).and_then(|r| {
        let doc = json!({
            "schema": format!("{SCHEMA_PREFIX}.{name}/1"),
            "passes": r.passes,
            "result": r.result,
        });
        match &cli.out {
            Some(p) => write_json(p, &doc)?,
            None => print_stdout(&doc)?,
        }
        if let Some(p) = &cli.manifest {
            let m = RunManifest {
                schema: format!("{SCHEMA_PREFIX}.manifest/1"),
                tool_version: env!("CARGO_PKG_VERSION"),
                command: name,
                config: &r.config,
                tolerances: &r.tolerances,
                precision,
                threads: cli.threads,
                deterministic: cli.deterministic,
                wall_clock_seconds: (!cli.deterministic).then(|| start.elapsed().as_secs_f64()),
                counts: &r.counts,
                passes: r.passes,
            };
            write_json(p, &to_value(&m))?;
        }
        if r.passes {
            Ok(())
        } else {
            Err(Failure::Mismatch(format!("{name}: verification did not pass")))
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Mismatch(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
