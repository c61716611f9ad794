use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dmaj::channels::{channel_between, choi};
use dmaj::cnr::cnr_report;
use dmaj::dissipation::{b0_from_rates, equidistant_d, gibbs_vector, steady_state, thermal_rates, zero_temperature_rates, BathRates};
use dmaj::linalg::{dist1, eigvals_hermitian, trace_norm};
use dmaj::majorize::{d_majorizes, d_stochastic_transfer, doubly_stochastic_transfer, majorizes, thermo_curve, Method, WeightVector};
use dmaj::polytope::{b_vector, contains, max_corner, vertices};
use dmaj::reach::{final_state, simulate, synthesize, synthesize_from_ground, synthesize_local, reachable_bound, BoundOptions, Schedule};
use dmaj::{ComplexMatrix, Exec, RealMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Lib(#[from] dmaj::Error),
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(dmaj::Error::Numerical(_)) | CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "dmaj", version, about = "d-majorization checks, polytopes, thermal baths and steering schedules")]
struct Cli {
    /// Acceptance threshold for certificate and endpoint residuals
    #[arg(long, global = true, env = "DMAJ_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write data here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 1 forces the sequential path
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Norm,
    PositivePart,
    Curve,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Norm => Method::Norm,
            MethodArg::PositivePart => Method::PositivePart,
            MethodArg::Curve => Method::Curve,
        }
    }
}

/// Vectors and matrices are given inline as JSON or as a path to a JSON file.
#[derive(Subcommand)]
enum Command {
    /// Exit 0 if x ≺ y (or x ≺_d y with --d), 1 otherwise
    Check {
        x: String,
        y: String,
        #[arg(long)]
        d: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Curve)]
        method: MethodArg,
        /// Also emit a stochastic matrix A with Ay = x
        #[arg(long)]
        certificate: bool,
    },
    /// H-description and vertices of {x | x ≺_d y}
    Polytope {
        y: String,
        #[arg(long)]
        d: String,
        /// Exit 0 if this point lies in the polytope, 1 otherwise
        #[arg(long)]
        contains: Option<String>,
    },
    /// Elbows of the thermomajorization curve of y
    Curve {
        y: String,
        #[arg(long)]
        d: String,
    },
    /// Rates and generator B₀ of a bath
    Bath {
        #[command(flatten)]
        bath: BathArgs,
    },
    /// Trajectory of a schedule
    Simulate {
        #[arg(long)]
        x0: String,
        #[arg(long)]
        schedule: String,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[command(flatten)]
        bath: BathArgs,
    },
    /// Schedule steering x0 (default: ground state) to the target under a zero-temperature bath
    Synthesize {
        target: String,
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        /// Number of subsystems, each with its own bath
        #[arg(long)]
        local: Option<usize>,
        /// Levels per subsystem with --local
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Upper bound on the reachable set under an equidistant thermal bath
    Bound {
        x0: String,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// CPTP map T with T(B) = A
    Channel {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Bounds and Haar samples of tr(CU†TU)
    Cnr {
        #[arg(long)]
        c: String,
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Args)]
struct BathArgs {
    /// Zero-temperature bath on this many levels
    #[arg(long, conflicts_with_all = ["d", "energies"])]
    zero_temp: Option<usize>,
    /// Thermal bath with this fixed point
    #[arg(long, conflicts_with = "energies")]
    d: Option<String>,
    /// Thermal bath from level energies, with --temperature
    #[arg(long, requires = "temperature")]
    energies: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
}

impl BathArgs {
    /// Rates of the requested bath; zero temperature on `default_n` levels if nothing is given.
    fn rates(&self, default_n: Option<usize>) -> Result<(BathRates, Option<WeightVector>)> {
        if let Some(n) = self.zero_temp {
            if n < 2 {
                return Err(CliError::Input("--zero-temp needs at least 2 levels".into()));
            }
            return Ok((zero_temperature_rates(n), None));
        }
        let d = match (&self.d, &self.energies) {
            (Some(d), _) => Some(weights(d)?),
            (None, Some(e)) => Some(gibbs_vector(&vector(e)?, self.temperature.unwrap())?),
            (None, None) => None,
        };
        match (d, default_n) {
            (Some(d), _) => Ok((thermal_rates(&d), Some(d))),
            (None, Some(n)) if n >= 2 => Ok((zero_temperature_rates(n), None)),
            _ => Err(CliError::Input("give --zero-temp, --d or --energies".into())),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<bool>,
    data: Value,
    diagnostics: Vec<String>,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

struct Output {
    report: RunReport,
    table: Option<Table>,
}

impl Output {
    fn new(command: &'static str, verdict: Option<bool>, data: Value) -> Self {
        Output { report: RunReport { command, verdict, data, diagnostics: Vec::new() }, table: None }
    }

    fn table(mut self, header: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }

    fn note(mut self, msg: String) -> Self {
        self.report.diagnostics.push(msg);
        self
    }
}

fn load(arg: &str) -> Result<Value> {
    let text = match arg.trim_start().chars().next() {
        Some('[' | '{') => arg.to_string(),
        _ => fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn parse<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T> {
    serde_json::from_value(load(arg)?).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn vector(arg: &str) -> Result<Vec<f64>> {
    parse(arg)
}

fn weights(arg: &str) -> Result<WeightVector> {
    Ok(WeightVector::new(vector(arg)?)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

fn complex_matrix(arg: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Entry>> = parse(arg)?;
    let rows: Vec<Vec<Complex64>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| match e {
                    Entry::Real(v) => Complex64::new(v, 0.0),
                    Entry::Complex([re, im]) => Complex64::new(re, im),
                })
                .collect()
        })
        .collect();
    Ok(ComplexMatrix::from_rows(&rows)?)
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_rows(m: &ComplexMatrix) -> Value {
    Value::Array(m.to_rows().into_iter().map(|r| Value::Array(r.into_iter().map(complex_json).collect())).collect())
}

fn real_rows(m: &RealMatrix) -> Value {
    json!(m.to_rows())
}

fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn check(x: &str, y: &str, d: Option<&str>, method: Method, certificate: bool, tol: f64) -> Result<Output> {
    let (x, y) = (vector(x)?, vector(y)?);
    let d = d.map(weights).transpose()?;
    let verdict = match &d {
        Some(d) => d_majorizes(&x, &y, d, method)?,
        None => majorizes(&x, &y)?,
    };
    let mut data = json!({ "relation": if d.is_some() { "x ≺_d y" } else { "x ≺ y" } });
    if certificate && verdict {
        let a = match &d {
            Some(d) => d_stochastic_transfer(&x, &y, d)?,
            None => doubly_stochastic_transfer(&x, &y)?,
        };
        let residual = a.defect().max(dist1(&a.matrix.mul_vec(&y), &x));
        let scale = y.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        if residual > tol * scale {
            return Err(CliError::Numerical(format!("certificate residual {residual:e} exceeds tolerance")));
        }
        data["certificate"] = real_rows(&a.matrix);
        data["residual"] = json!(residual);
    }
    Ok(Output::new("check", Some(verdict), data))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

fn polytope(y: &str, d: &str, point: Option<&str>) -> Result<Output> {
    let (y, d) = (vector(y)?, weights(d)?);
    let p = b_vector(&y, &d)?;
    let mut points = vertices(&y, &d)?.points;
    points.sort_by(|a, b| lex_cmp(a, b));
    let verdict = point.map(|x| vector(x).and_then(|x| Ok(contains(&x, &p)?))).transpose()?;
    let mut data = json!({ "b": p.b, "vertices": points });
    if y.iter().all(|&v| v >= 0.0) {
        data["max_corner"] = json!(max_corner(&y, &d)?);
    }
    let n = y.len();
    Ok(Output::new("polytope", verdict, data).table(indexed("x", n), points))
}

fn curve(y: &str, d: &str) -> Result<Output> {
    let (y, d) = (vector(y)?, weights(d)?);
    let c = thermo_curve(&y, &d)?;
    let rows = c.elbows.iter().map(|&(a, b)| vec![a, b]).collect();
    Ok(Output::new("curve", None, json!({ "elbows": c.elbows })).table(vec!["c".into(), "f".into()], rows))
}

fn bath(args: &BathArgs) -> Result<Output> {
    let (rates, d) = args.rates(None)?;
    let g = b0_from_rates(&rates);
    let mut data = json!({ "a": rates.a, "b": rates.b, "b0": real_rows(g.matrix()) });
    if let Ok(c) = g.ground_rates() {
        data["c"] = json!(c);
    }
    if let Some(d) = d {
        data["d"] = json!(d.as_slice());
        data["steady_state"] = json!(steady_state(&g)?);
    }
    let n = g.dim();
    Ok(Output::new("bath", None, data).table(indexed("col", n), g.matrix().to_rows()))
}

/// A bare schedule or a report whose data is one.
fn schedule(arg: &str) -> Result<Schedule> {
    let v = load(arg)?;
    let v = match v.get("data") {
        Some(inner) if inner.get("segments").is_some() => inner.clone(),
        _ => v,
    };
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn simulate_cmd(x0: &str, sched: &str, dt: f64, args: &BathArgs) -> Result<Output> {
    let x0 = vector(x0)?;
    let (rates, _) = args.rates(Some(x0.len()))?;
    let g = b0_from_rates(&rates);
    let s = schedule(sched)?;
    let tr = simulate(&g, &x0, &s, dt)?;
    let n = x0.len();
    let rows: Vec<Vec<f64>> = tr.samples.iter().map(|(t, x)| std::iter::once(*t).chain(x.iter().copied()).collect()).collect();
    let header = std::iter::once("t".to_string()).chain(indexed("x", n)).collect();
    Ok(Output::new("simulate", None, serde_json::to_value(&tr).unwrap()).table(header, rows))
}

fn unit(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

fn synthesize_cmd(target: &str, x0: Option<&str>, eps: f64, local: Option<usize>, levels: usize, tol: f64) -> Result<Output> {
    let x = vector(target)?;
    let x0 = x0.map(vector).transpose()?;
    let (g, s) = match local {
        Some(m) => {
            let start = x0.clone().unwrap_or_else(|| unit(x.len()));
            let s = synthesize_local(levels, m, &start, &x, eps)?;
            let g = b0_from_rates(&zero_temperature_rates(levels)).block_diagonal(x.len() / levels);
            (g, s)
        }
        None => {
            let g = b0_from_rates(&zero_temperature_rates(x.len()));
            let s = match &x0 {
                Some(x0) => synthesize(&g, x0, &x, eps)?,
                None => synthesize_from_ground(&g, &x)?,
            };
            (g, s)
        }
    };
    // steering from the ground state is exact up to roundoff
    let allowed = if x0.is_some() || local.is_some() { eps.max(tol) } else { tol.max(1e-8) };
    let start = x0.unwrap_or_else(|| unit(x.len()));
    let err = dist1(&final_state(&g, &start, &s)?, &x);
    if err > allowed {
        return Err(CliError::Numerical(format!("endpoint error {err:e} exceeds {allowed:e}")));
    }
    let out = Output::new("synthesize", None, serde_json::to_value(&s).unwrap());
    Ok(out.note(format!("endpoint error {err:e}, total time {}", s.total_time())))
}

fn bound(x0: &str, alpha: f64, samples: usize, depth: usize, seed: u64, exec: Exec) -> Result<Output> {
    let x0 = vector(x0)?;
    let d = equidistant_d(alpha, x0.len())?;
    let r = reachable_bound(&x0, &d, BoundOptions { samples, max_depth: depth, seed, exec })?;
    Ok(Output::new("bound", Some(r.holds()), serde_json::to_value(&r).unwrap()))
}

fn channel(a: &str, b: &str) -> Result<Output> {
    let (a, b) = (complex_matrix(a)?, complex_matrix(b)?);
    let t = channel_between(&a, &b)?;
    let lam = eigvals_hermitian(&choi(&t).matrix.hermitian_part())?;
    let low = lam.iter().copied().fold(f64::INFINITY, f64::min);
    let err = trace_norm(&t.apply(&b)?.sub(&a))?;
    let data = json!({
        "superoperator": complex_rows(t.matrix()),
        "choi_min_eigenvalue": low,
        "error": err,
    });
    Ok(Output::new("channel", None, data))
}

fn cnr(c: &str, t: &str, samples: usize, seed: u64, exec: Exec) -> Result<Output> {
    let (c, t) = (complex_matrix(c)?, complex_matrix(t)?);
    let r = cnr_report(&c, &t, samples, seed, exec)?;
    let rows = r.samples.iter().map(|z| vec![z.re, z.im]).collect();
    let data = json!({
        "k_sup": r.k_sup,
        "k_inf": r.k_inf,
        "p_c": r.p_c.iter().copied().map(complex_json).collect::<Vec<_>>(),
        "samples": r.samples.iter().copied().map(complex_json).collect::<Vec<_>>(),
    });
    Ok(Output::new("cnr", None, data).table(vec!["re".into(), "im".into()], rows))
}

fn executor(jobs: Option<usize>) -> Result<Exec> {
    match jobs {
        None => Ok(Exec::default()),
        Some(0) => Err(CliError::Input("--jobs must be positive".into())),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(k) => {
            rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
    }
}

fn render(out: &Output, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&out.report).unwrap() + "\n"),
        Format::Csv => {
            let t = out.table.as_ref().ok_or_else(|| CliError::Input(format!("{} has no CSV form", out.report.command)))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header).map_err(|e| CliError::Input(e.to_string()))?;
            for r in &t.rows {
                w.write_record(r.iter().map(|v| v.to_string())).map_err(|e| CliError::Input(e.to_string()))?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| CliError::Input(e.to_string()))?).unwrap())
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let exec = executor(cli.jobs)?;
    match &cli.command {
        Command::Check { x, y, d, method, certificate } => check(x, y, d.as_deref(), (*method).into(), *certificate, cli.tol),
        Command::Polytope { y, d, contains } => polytope(y, d, contains.as_deref()),
        Command::Curve { y, d } => curve(y, d),
        Command::Bath { bath: b } => bath(b),
        Command::Simulate { x0, schedule, dt, bath } => simulate_cmd(x0, schedule, *dt, bath),
        Command::Synthesize { target, x0, eps, local, levels } => synthesize_cmd(target, x0.as_deref(), *eps, *local, *levels, cli.tol),
        Command::Bound { x0, alpha, samples, depth } => bound(x0, *alpha, *samples, *depth, cli.seed, exec),
        Command::Channel { a, b } => channel(a, b),
        Command::Cnr { c, t, samples } => cnr(c, t, *samples, cli.seed, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        let text = render(&out, cli.format)?;
        match &cli.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            for d in &out.report.diagnostics {
                eprintln!("{d}");
            }
            ExitCode::from(if out.report.verdict == Some(false) { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
