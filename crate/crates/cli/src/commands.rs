use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cube_interact::continuous::estimate;
use cube_interact::scalar::{format_rational, rational_from_f64, Scalar};
use cube_interact::stats::fit_report;
use cube_interact::verify::{self, Level};
use cube_interact::{
    best_k_approx, interaction, interaction_table, EstimatorKind, FunctionSpec, IntegratorConfig,
    InteractionTable, Method, Smoothness, SubsetMask, Value,
};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::report::{self, Format};
use crate::spec_file::{parse_spec, poly_document, subset_json, value_json, SpecError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] cube_interact::Error),
    #[error("{failed} of {total} properties failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    /// 0 ok, 1 verification failure, 2 malformed input, 3 unsupported, 4 degenerate.
    pub fn exit_code(&self) -> i32 {
        use cube_interact::Error as E;
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Spec(_) | CliError::Usage(_) | CliError::Io { .. } | CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidArgument(_) | E::Domain(_) => 2,
                E::Unsupported(_) => 3,
                E::Degenerate(_) | E::Evaluation(_) => 4,
                E::Inconsistent(_) => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Auto,
    Closed,
    Quad,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SmoothnessArg {
    Smooth,
    Lattice,
    Rough,
}

impl From<SmoothnessArg> for Smoothness {
    fn from(s: SmoothnessArg) -> Self {
        match s {
            SmoothnessArg::Smooth => Smoothness::Smooth,
            SmoothnessArg::Lattice => Smoothness::Lattice,
            SmoothnessArg::Rough => Smoothness::Rough,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EstimatorArg {
    Direct,
    Beta,
    Box,
    Quotient,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Direct => EstimatorKind::DirectInnerProduct,
            EstimatorArg::Beta => EstimatorKind::BetaDerivative,
            EstimatorArg::Box => EstimatorKind::BoxVolume,
            EstimatorArg::Quotient => EstimatorKind::DifferenceQuotient,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, clap::Args)]
pub struct SpecArgs {
    /// Path to a JSON function spec.
    pub spec: PathBuf,
    /// Smoothness hint for expression specs (overrides the file).
    #[arg(long, value_enum)]
    pub smoothness: Option<SmoothnessArg>,
}

impl SpecArgs {
    fn load(&self) -> CliResult<FunctionSpec> {
        let text = fs::read_to_string(&self.spec).map_err(|source| CliError::Io {
            path: self.spec.clone(),
            source,
        })?;
        Ok(parse_spec(&text, self.smoothness.map(Into::into))?)
    }
}

#[derive(Debug, clap::Args)]
pub struct MethodArgs {
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Gauss–Legendre points per axis for `--method quad`.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Monte Carlo sample count for `--method mc`.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl MethodArgs {
    fn config(&self) -> CliResult<IntegratorConfig> {
        let method = match self.method {
            MethodArg::Auto => Method::Auto,
            MethodArg::Closed => Method::ClosedForm,
            MethodArg::Quad => Method::GaussTensor { order: self.order },
            MethodArg::Mc => Method::MonteCarlo {
                samples: self.samples,
                seed: self.seed,
            },
        };
        let cfg = IntegratorConfig::new(method);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_subset(n: usize, text: &str) -> CliResult<SubsetMask> {
    SubsetMask::parse(n, text).map_err(|e| CliError::Usage(format!("--subset: {e}")))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(doc: &Json) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("in-memory JSON");
    s.push('\n');
    s
}

pub struct IndexCmd<'a> {
    pub spec: &'a SpecArgs,
    pub subset: Option<&'a str>,
    pub max_order: Option<usize>,
    pub method: &'a MethodArgs,
    pub format: FormatArg,
    pub out: Option<&'a Path>,
}

pub fn index(cmd: IndexCmd<'_>) -> CliResult<()> {
    let spec = cmd.spec.load()?;
    let cfg = cmd.method.config()?;
    let table = match (cmd.subset, cmd.max_order) {
        (Some(text), None) => {
            let s = parse_subset(spec.n(), text)?;
            let mut t = InteractionTable::new(spec.n());
            t.insert(s, interaction(&spec, s, &cfg)?)?;
            t
        }
        (None, Some(k)) => interaction_table(&spec, k.min(spec.n()), &cfg)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --subset and --max-order".into(),
            ))
        }
    };
    let format = match cmd.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    emit(cmd.out, &report::render(&table, format)?)
}

fn parse_point(n: usize, text: &str) -> CliResult<Vec<f64>> {
    let x: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "--eval: cannot parse {text:?} as comma-separated numbers"
            ))
        })?;
    if x.len() != n {
        return Err(CliError::Usage(format!(
            "--eval: expected {n} coordinates, got {}",
            x.len()
        )));
    }
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(cube_interact::Error::Domain(format!(
            "--eval: {text} is outside the unit cube"
        ))
        .into());
    }
    Ok(x)
}

fn centered_rows(table: &InteractionTable) -> Vec<Json> {
    table
        .iter()
        .map(|(s, v)| json!({ "subset": subset_json(s), "coeff": value_json(v.value()) }))
        .collect()
}

/// Writes `f_k` as a multilinear spec with its centered coefficients alongside.
/// With `--eval` and no `--out`, only the evaluation is printed.
pub fn approx(
    spec_args: &SpecArgs,
    k: usize,
    method: &MethodArgs,
    out: Option<&Path>,
    eval: Option<&str>,
) -> CliResult<()> {
    let spec = spec_args.load()?;
    let cfg = method.config()?;
    let approx = best_k_approx(&spec, k.min(spec.n()), &cfg)?;
    let mut doc = poly_document(&approx.poly);
    doc.insert("k".into(), json!(k));
    doc.insert(
        "centered".into(),
        Json::Array(centered_rows(&approx.centered)),
    );
    if out.is_some() || eval.is_none() {
        emit(out, &pretty(&Json::Object(doc)))?;
    }
    if let Some(text) = eval {
        let x = parse_point(spec.n(), text)?;
        let mut line = Map::new();
        line.insert("x".into(), json!(x));
        line.insert("value".into(), json!(approx.eval(&x)));
        let exact_x: Option<Vec<_>> = x.iter().map(|&v| rational_from_f64(v)).collect();
        if let (Some(p), Some(xr)) = (approx.exact_poly(), exact_x) {
            line.insert("exact".into(), json!(format_rational(&p.eval(&xr))));
        }
        println!("{}", Json::Object(line));
    }
    Ok(())
}

pub fn stats(
    spec_args: &SpecArgs,
    k: usize,
    method: &MethodArgs,
    out: Option<&Path>,
) -> CliResult<()> {
    let spec = spec_args.load()?;
    let cfg = method.config()?;
    let rep = fit_report(&spec, k.min(spec.n()), &cfg)?;
    let r: Vec<Json> = rep
        .r_table
        .iter()
        .map(|(s, v)| json!({ "subset": subset_json(*s), "label": s.to_string(), "r": v }))
        .collect();
    let floats = |vs: &[Value]| {
        vs.iter()
            .map(|v| json!(Scalar::to_f64(v)))
            .collect::<Vec<_>>()
    };
    let exacts = |vs: &[Value]| vs.iter().map(value_json).collect::<Vec<_>>();
    let doc = json!({
        "k": rep.k,
        "mean": Scalar::to_f64(&rep.mean),
        "mean_exact": value_json(&rep.mean),
        "variance": Scalar::to_f64(&rep.variance),
        "variance_exact": value_json(&rep.variance),
        "sigma": rep.sigma,
        "r": r,
        "r_squared": floats(&rep.r_squared),
        "r_squared_exact": exacts(&rep.r_squared),
    });
    emit(out, &pretty(&doc))
}

pub fn estimate_cmd(
    spec_args: &SpecArgs,
    subset: &str,
    estimator: EstimatorArg,
    samples: usize,
    seed: u64,
) -> CliResult<()> {
    let spec = spec_args.load()?;
    let s = parse_subset(spec.n(), subset)?;
    let kind: EstimatorKind = estimator.into();
    let e = estimate(&spec, s, kind, samples, seed)?;
    let mut doc = Map::new();
    doc.insert("subset".into(), json!(s.to_string()));
    doc.insert("estimator".into(), json!(kind.name()));
    doc.insert("samples".into(), json!(samples));
    doc.insert("seed".into(), json!(seed));
    doc.insert("estimate".into(), json!(e.value));
    doc.insert("stderr".into(), json!(e.stderr));
    doc.insert("biased".into(), json!(e.biased));
    if spec.is_structured() {
        let exact = interaction(&spec, s, &IntegratorConfig::new(Method::ClosedForm))?;
        doc.insert("exact".into(), value_json(exact.value()));
        doc.insert("exact_value".into(), json!(exact.to_f64()));
        let z = e.z_score(exact.to_f64());
        doc.insert(
            "z".into(),
            if z.is_finite() {
                json!(z)
            } else {
                json!(z.to_string())
            },
        );
    }
    println!("{}", pretty(&Json::Object(doc)).trim_end());
    Ok(())
}

pub fn verify_cmd(level: LevelArg, seed: u64, filter: Option<&str>) -> CliResult<()> {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let started = Instant::now();
    let report = verify::run_filtered(level, seed, filter);
    if report.outcomes.is_empty() {
        return Err(CliError::Usage("no property matches the filter".into()));
    }
    for o in &report.outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<32} checks={:<6} failed={:<4} {:.2}s",
            o.name,
            o.checks,
            o.failed,
            o.elapsed.as_secs_f64()
        );
        for d in &o.details {
            println!("    {d}");
        }
    }
    let failed = report.outcomes.iter().filter(|o| !o.passed()).count();
    let total = report.outcomes.len();
    println!(
        "{} properties, {} checks, {failed} failed, seed {seed}, {:.2}s",
        total,
        report.total_checks(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed, total });
    }
    Ok(())
}
