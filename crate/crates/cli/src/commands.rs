use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde_json::{json, Value};
use spectral_walk::oracle::{expm_generator, unitary_propagator};
use spectral_walk::{
    classical_propagator, classical_transition, classify, generator, quantum_amplitude,
    quantum_propagator, registry, return_probability_scan, time_grid, AmplitudeSeries, Boundary,
    ChainSpec, FamilyChain, LatticeOptions, ProbabilitySeries, TailRule,
};

use crate::{ChainArgs, GridArgs, ReturnArgs, SimulateArgs, VerifyArgs};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "SPECTRAL_WALK_THREADS";

/// A failed run, carrying its exit code: 2 for an invalid spec or argument,
/// 3 for an oracle mismatch, 1 for anything else.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Mismatch(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Mismatch(_) => 3,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Failure::Mismatch(msg) => write!(f, "oracle mismatch: {msg}"),
            Failure::Other(err) => write!(f, "{err:#}"),
        }
    }
}

impl From<spectral_walk::Error> for Failure {
    fn from(err: spectral_walk::Error) -> Self {
        use spectral_walk::Error::*;
        match err {
            Parameter { .. } | Domain { .. } | Config(_) => Failure::Invalid(err.to_string()),
            NoConvergence { .. } | Usage(_) => Failure::Other(err.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Other(err)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn chain_spec(args: &ChainArgs) -> Outcome<ChainSpec> {
    if let Some(path) = &args.spec {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read spec {}: {e}", path.display())))?;
        return Ok(ChainSpec::from_json(&text)?);
    }
    if let Some(text) = &args.spec_json {
        return Ok(ChainSpec::from_json(text)?);
    }
    let Some(family) = &args.family else {
        return Err(Failure::Invalid(
            "one of --spec, --spec-json or --family is required".into(),
        ));
    };
    // assemble the same JSON a spec file would hold, so field errors read alike
    let mut obj = serde_json::Map::new();
    obj.insert("family".into(), json!(family));
    let mut put = |key: &str, value: Option<Value>| {
        if let Some(v) = value {
            obj.insert(key.into(), v);
        }
    };
    put("beta", args.beta.map(Value::from));
    put("c", args.c.map(Value::from));
    put("k", args.k.map(Value::from));
    put("n", args.n.map(Value::from));
    put("sites", args.sites.map(Value::from));
    put("order", args.order.map(Value::from));
    put("lambdas", args.lambdas.clone().map(Value::from));
    put("mus", args.mus.clone().map(Value::from));
    put("tail", args.tail_tol.map(|tol| json!({ "mass_tol": tol })));
    Ok(ChainSpec::from_json(&Value::Object(obj).to_string())?)
}

fn tail_rule(spec: &ChainSpec) -> Option<TailRule> {
    match spec {
        ChainSpec::Meixner { tail, .. } | ChainSpec::ScC { tail, .. } | ChainSpec::ScD { tail, .. } => {
            Some(tail.unwrap_or_default())
        }
        _ => None,
    }
}

/// Chains whose measure is exactly that of their operator, so the dense
/// exponential of the operator is a valid reference.
fn is_finite(spec: &ChainSpec) -> bool {
    matches!(
        spec,
        ChainSpec::Custom { .. } | ChainSpec::PstDemo { .. } | ChainSpec::Uniform { n: Some(_), .. }
    )
}

fn thread_pool() -> Outcome<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(value) => match value.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                return Err(Failure::Invalid(format!(
                    "{THREADS_VAR} must be a positive integer, got `{value}`"
                )))
            }
        },
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot start worker threads")
        .map_err(Failure::from)
}

/// Evaluates `eval` on consecutive chunks of `times` in parallel and joins
/// the results in time order. Each value depends on its own time point
/// only, so the output does not depend on the thread count.
fn chunked<R: Send>(
    pool: &rayon::ThreadPool,
    times: &[f64],
    eval: impl Fn(&[f64]) -> spectral_walk::Result<Vec<R>> + Sync,
) -> Outcome<Vec<R>> {
    let chunk = times.len().div_ceil(4 * pool.current_num_threads()).max(1);
    let parts = pool.install(|| {
        times
            .par_chunks(chunk)
            .map(&eval)
            .collect::<spectral_walk::Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

fn grid(args: &GridArgs) -> Outcome<Vec<f64>> {
    Ok(time_grid(args.tmin, args.tmax, args.steps)?)
}

fn pairs(rows: &[usize], cols: &[usize], sites: usize) -> Outcome<Vec<(usize, usize)>> {
    let list: Vec<(usize, usize)> = match (rows.len(), cols.len()) {
        (a, b) if a == b => rows.iter().copied().zip(cols.iter().copied()).collect(),
        (1, _) => cols.iter().map(|&j| (rows[0], j)).collect(),
        (_, 1) => rows.iter().map(|&i| (i, cols[0])).collect(),
        (a, b) => {
            return Err(Failure::Invalid(format!(
                "--i has {a} sites and --j has {b}; give equal counts or a single value"
            )))
        }
    };
    for &(i, j) in &list {
        for (name, site) in [("i", i), ("j", j)] {
            if site >= sites {
                return Err(Failure::Invalid(format!(
                    "--{name} {site} is outside the chain's {sites} sites"
                )));
            }
        }
    }
    Ok(list)
}

fn create_file(dir: &Path, name: &str) -> Outcome<BufWriter<fs::File>> {
    let path = dir.join(name);
    let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Outcome {
    let mut out = create_file(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value).context("cannot write JSON")?;
    writeln!(out).and_then(|_| out.flush()).context("cannot write JSON")?;
    Ok(())
}

fn chain_record(spec: &ChainSpec, fc: &FamilyChain<f64>) -> Value {
    let measure = fc.measure();
    json!({
        "spec": spec.to_json(),
        "family": fc.name,
        "parameters": fc.info,
        "sites": fc.sites(),
        "declared_measure": fc.declared_kind,
        "measure": {
            "kind": measure.kind(),
            "nodes": measure.node_count(),
            "tail_mass": measure.tail_mass(),
        },
    })
}

fn manifest(command: &str, spec: &ChainSpec, fc: &FamilyChain<f64>, pool: &rayon::ThreadPool) -> Value {
    let mut m = json!({
        "tool": "spectral-walk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "chain": chain_record(spec, fc),
        "threads": pool.current_num_threads(),
    });
    if let Some(rule) = tail_rule(spec) {
        m["tolerances"] = json!({ "tail": rule });
    } else {
        m["tolerances"] = json!({});
    }
    m
}

#[derive(Debug, Default)]
struct OracleReport {
    classical: Option<f64>,
    quantum: Option<f64>,
}

impl OracleReport {
    fn worst(&self) -> f64 {
        self.classical.unwrap_or(0.0).max(self.quantum.unwrap_or(0.0))
    }

    fn to_json(&self, tol: f64) -> Value {
        json!({
            "classical_max_diff": self.classical,
            "quantum_max_diff": self.quantum,
            "tol": tol,
            "pass": self.worst() <= tol,
        })
    }
}

fn require_finite(spec: &ChainSpec) -> Outcome {
    if is_finite(spec) {
        Ok(())
    } else {
        Err(Failure::Other(anyhow::anyhow!(
            "the dense oracle only applies to finite chains (custom, pst-demo, uniform with n); \
             `{}` is a truncation of a semi-infinite chain",
            spec.family()
        )))
    }
}

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let spec = chain_spec(&args.chain)?;
    let fc = spec.build::<f64>()?;
    let pool = thread_pool()?;
    let times = grid(&args.grid)?;
    let pairs = pairs(&args.i, &args.j, fc.sites())?;
    let quantum = args.quantum || !args.classical;
    let rates = if args.classical {
        Some(fc.rates.as_ref().ok_or_else(|| {
            Failure::Invalid(format!(
                "family `{}` has no birth and death rates; use --quantum",
                fc.name
            ))
        })?)
    } else {
        None
    };
    if args.verify {
        require_finite(&spec)?;
    }

    fs::create_dir_all(&args.output)
        .with_context(|| format!("cannot create {}", args.output.display()))?;
    let mut files = Vec::new();
    let mut report = OracleReport::default();
    for &(i, j) in &pairs {
        if let Some(rates) = rates {
            let values = chunked(&pool, &times, |ts| {
                Ok(classical_transition(&fc.chain, rates, i, j, ts)?.values)
            })?;
            let series = ProbabilitySeries { i, j, times: times.clone(), values };
            let name = series.file_name();
            let mut out = create_file(&args.output, &name)?;
            series.write_csv(&mut out).and_then(|_| out.flush()).context("cannot write CSV")?;
            files.push(name);
            if args.verify {
                let a = generator(rates, fc.sites() - 1, Boundary::Reflecting)?;
                let oracle = chunked(&pool, &times, |ts| {
                    ts.iter().map(|&t| Ok(expm_generator(&a, t)?[(i, j)])).collect()
                })?;
                let diff = series.values.iter().zip(oracle).map(|(v, o)| (v - o).abs());
                let worst = diff.fold(report.classical.unwrap_or(0.0), f64::max);
                report.classical = Some(worst);
            }
        }
        if quantum {
            let values = chunked(&pool, &times, |ts| {
                Ok(quantum_amplitude(&fc.chain, i, j, ts)?.values)
            })?;
            let series = AmplitudeSeries { i, j, times: times.clone(), values };
            let name = series.file_name();
            let mut out = create_file(&args.output, &name)?;
            series.write_csv(&mut out).and_then(|_| out.flush()).context("cannot write CSV")?;
            files.push(name);
            if args.verify {
                let oracle = chunked(&pool, &times, |ts| {
                    ts.iter().map(|&t| Ok(unitary_propagator(fc.jacobi(), t)?[(i, j)])).collect()
                })?;
                let diff = series.values.iter().zip(oracle).map(|(v, o)| (v - o).norm());
                let worst = diff.fold(report.quantum.unwrap_or(0.0), f64::max);
                report.quantum = Some(worst);
            }
        }
    }

    let mut m = manifest("simulate", &spec, &fc, &pool);
    m["grid"] = json!({ "tmin": args.grid.tmin, "tmax": args.grid.tmax, "steps": times.len() });
    m["pairs"] = json!(pairs);
    m["modes"] = json!({ "classical": rates.is_some(), "quantum": quantum });
    m["files"] = json!(files);
    if args.verify {
        m["tolerances"]["verify"] = json!(args.tol);
        m["verify"] = report.to_json(args.tol);
    }
    write_json(&args.output, "manifest.json", &m)?;
    eprintln!("wrote {} series to {}", files.len(), args.output.display());
    if args.verify {
        emit(&report.to_json(args.tol).to_string())?;
        if report.worst() > args.tol {
            return Err(Failure::Mismatch(format!(
                "max difference {:.3e} exceeds tolerance {:.3e}",
                report.worst(),
                args.tol
            )));
        }
    }
    Ok(())
}

pub fn return_analysis(args: &ReturnArgs) -> Outcome {
    let spec = chain_spec(&args.chain)?;
    let fc = spec.build::<f64>()?;
    if !(args.lattice_tol > 0.0) {
        return Err(Failure::Invalid("--lattice-tol must be positive".into()));
    }
    let opts = LatticeOptions::default().with_tol(args.lattice_tol);
    let verdict = classify(fc.measure(), fc.declared_kind, &opts)?;
    let verdict_json = verdict.to_json();
    emit(&verdict_json.to_string())?;
    if !args.scan {
        return Ok(());
    }

    let pool = thread_pool()?;
    let times = grid(&args.grid)?;
    let sites = pairs(&args.i, &args.i, fc.sites())?;
    fs::create_dir_all(&args.output)
        .with_context(|| format!("cannot create {}", args.output.display()))?;
    let mut files = Vec::new();
    let mut peaks = serde_json::Map::new();
    for &(i, _) in &sites {
        let values = chunked(&pool, &times, |ts| Ok(quantum_amplitude(&fc.chain, i, i, ts)?.values))?;
        let series = AmplitudeSeries { i, j: i, times: times.clone(), values };
        let name = format!("scan_{i}.csv");
        let mut out = create_file(&args.output, &name)?;
        let mut write = || -> std::io::Result<()> {
            writeln!(out, "t,abs")?;
            for (t, a) in series.times.iter().zip(series.moduli()) {
                writeln!(out, "{t:.16e},{a:.16e}")?;
            }
            out.flush()
        };
        write().context("cannot write CSV")?;
        files.push(name);
        if times.len() >= 2 {
            let top: Vec<Value> = return_probability_scan(&series)?
                .into_iter()
                .take(5)
                .map(|p| json!({ "t": p.t, "abs": p.modulus }))
                .collect();
            peaks.insert(i.to_string(), Value::Array(top));
        }
    }
    let mut m = manifest("return", &spec, &fc, &pool);
    m["tolerances"]["lattice"] = json!(opts);
    m["verdict"] = verdict_json.clone();
    m["grid"] = json!({ "tmin": args.grid.tmin, "tmax": args.grid.tmax, "steps": times.len() });
    m["scan_peaks"] = Value::Object(peaks);
    m["files"] = json!(files);
    write_json(&args.output, "verdict.json", &verdict_json)?;
    write_json(&args.output, "manifest.json", &m)?;
    Ok(())
}

/// Prints `text` to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure::Other(anyhow::Error::new(e).context("cannot write to stdout")))
        }
        _ => Ok(()),
    }
}

pub fn families(as_json: bool) -> Outcome {
    let reg = registry();
    if as_json {
        return emit(&serde_json::to_string_pretty(&reg).context("cannot encode registry")?);
    }
    let mut text = String::new();
    for family in reg {
        text += &format!("{} ({} measure): {}\n", family.name, family.measure, family.description);
        for p in family.parameters {
            text += &match p.default {
                Some(d) => format!("    {:<10} {} [default {d}]\n", p.name, p.range),
                None => format!("    {:<10} {}\n", p.name, p.range),
            };
        }
    }
    emit(text.trim_end())
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let spec = chain_spec(&args.chain)?;
    require_finite(&spec)?;
    let fc = spec.build::<f64>()?;
    let pool = thread_pool()?;
    let times = grid(&args.grid)?;
    let generator_matrix = match &fc.rates {
        Some(rates) => Some(generator(rates, fc.sites() - 1, Boundary::Reflecting)?),
        None => None,
    };
    let diffs = chunked(&pool, &times, |ts| {
        ts.iter()
            .map(|&t| {
                let f = quantum_propagator(&fc.chain, t)?;
                let u = unitary_propagator(fc.jacobi(), t)?;
                let mut quantum = 0.0f64;
                for (r, row) in f.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        quantum = quantum.max((v - u[(r, c)]).norm());
                    }
                }
                let classical = match (&fc.rates, &generator_matrix) {
                    (Some(rates), Some(a)) => {
                        let p = classical_propagator(&fc.chain, rates, t)?;
                        let e = expm_generator(a, t)?;
                        let mut worst = 0.0f64;
                        for (r, row) in p.iter().enumerate() {
                            for (c, v) in row.iter().enumerate() {
                                worst = worst.max((v - e[(r, c)]).abs());
                            }
                        }
                        Some(worst)
                    }
                    _ => None,
                };
                Ok((classical, quantum))
            })
            .collect()
    })?;
    let report = OracleReport {
        classical: generator_matrix
            .as_ref()
            .map(|_| diffs.iter().filter_map(|d| d.0).fold(0.0, f64::max)),
        quantum: Some(diffs.iter().map(|d| d.1).fold(0.0, f64::max)),
    };
    let mut out = report.to_json(args.tol);
    out["family"] = json!(fc.name);
    out["sites"] = json!(fc.sites());
    out["times"] = json!(times.len());
    emit(&out.to_string())?;
    if report.worst() > args.tol {
        return Err(Failure::Mismatch(format!(
            "max difference {:.3e} exceeds tolerance {:.3e}",
            report.worst(),
            args.tol
        )));
    }
    Ok(())
}
