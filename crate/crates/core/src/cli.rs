//! Command-line interface.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::cases::{all_cases, case_study, cases_for, CaseStudy, Problem};
use crate::combiner::{adjust, calibrate, MinPCalibration, NullSpec, DEFAULT_CALIBRATION};
use crate::error::{Error, Result};
use crate::harness::{
    optbin_study, power_study, type1_study, type1_to_csv, MethodList, StudyConfig,
    DEFAULT_INNER, DEFAULT_N, DEFAULT_REFERENCE,
};
use crate::inference::{
    gof_test, gof_test_discrete, ts_test, ts_test_discrete, SimConfig, TestResult,
    DEFAULT_REPLICATES,
};
use crate::models::{DiscreteNull, Dist, Estimator, NullModel};
use crate::rng::entropy_seed;
use crate::sample::{BinScheme, ContinuousSample, DiscreteSample};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "nptest", version, about = "Goodness-of-fit and two-sample tests")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Random seed (falls back to NPTEST_SEED, then to a fresh random seed).
    #[arg(long, env = "NPTEST_SEED")]
    seed: Option<u64>,
}

impl SeedArgs {
    fn get(&self) -> u64 {
        self.seed.unwrap_or_else(entropy_seed)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Goodness-of-fit tests of one sample against a model.
    Gof(GofArgs),
    /// Two-sample tests.
    Twosample(TwoSampleArgs),
    /// Adjusted p-value of the smallest p-value of several tests.
    Adjust(AdjustArgs),
    /// Simulates the null distribution of the smallest p-value.
    Calibrate(CalibrateArgs),
    /// Power study over a parameter grid.
    Power(PowerArgs),
    /// Type I error study.
    Type1(Type1Args),
    /// Chi-square power as a function of the number of bins.
    Optbin(OptbinArgs),
    /// Case study registry.
    Cases {
        #[command(subcommand)]
        action: CasesAction,
    },
}

#[derive(Debug, Subcommand)]
enum CasesAction {
    /// Lists the case studies with their parameter values.
    List {
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Gof,
    Twosample,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Gof => Problem::Gof,
            ProblemArg::Twosample => Problem::TwoSample,
        }
    }
}

#[derive(Debug, Args)]
struct GofArgs {
    /// Data file: one number per line, or `value,count` lines for histogram data.
    data: PathBuf,
    /// Model `family[:p1,p2,...]`; without parameters the family is fitted to the data.
    #[arg(long, conflicts_with = "case")]
    model: Option<String>,
    /// Use the null hypothesis of a GoF case study, e.g. `gof/uniform-linear`.
    #[arg(long)]
    case: Option<String>,
    /// Comma separated methods or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    #[arg(long, short = 'B', default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Sample size is random (Poisson).
    #[arg(long)]
    random_n: bool,
    /// Chi-square with estimated parameters: keep the fitted values instead of minimising the statistic.
    #[arg(long)]
    use_phat: bool,
}

#[derive(Debug, Args)]
struct TwoSampleArgs {
    x: PathBuf,
    y: PathBuf,
    #[arg(long, default_value = "all")]
    methods: String,
    #[arg(long, short = 'B', default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Use the large-sample KS p-value regardless of the sample sizes.
    #[arg(long)]
    use_large_sample: bool,
}

#[derive(Debug, Args)]
struct AdjustArgs {
    /// Calibration file written by `calibrate`.
    #[arg(long)]
    calibration: PathBuf,
    /// Observed smallest p-value.
    #[arg(long)]
    minp: f64,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Comma separated methods.
    #[arg(long)]
    methods: String,
    /// GoF: model `family:params` (fully specified) or a family to fit to `--data`.
    #[arg(long)]
    model: Option<String>,
    /// GoF: sample size.
    #[arg(long)]
    n: Option<usize>,
    /// GoF: data file providing n (and the support for histogram data).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Two-sample: the two data files whose pooled values are split at random.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    samples: Option<Vec<PathBuf>>,
    #[arg(long = "R", default_value_t = DEFAULT_CALIBRATION)]
    r: usize,
    /// Replicates of each inner test.
    #[arg(long, default_value_t = DEFAULT_INNER)]
    inner: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StudyArgs {
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
    /// Second sample size (two-sample cases).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Replicates of each p-value.
    #[arg(long, default_value_t = DEFAULT_INNER)]
    inner: usize,
    /// Histogram version of the cases.
    #[arg(long)]
    discrete: bool,
    /// Reuse one simulated null distribution per case (fully specified GoF nulls).
    #[arg(long)]
    reuse_null: bool,
    #[arg(long, default_value_t = DEFAULT_REFERENCE)]
    reference: usize,
    #[arg(long)]
    use_phat: bool,
    #[command(flatten)]
    seed: SeedArgs,
    /// Also write the CSV into this directory as `{study}.{case}.{timestamp}.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl StudyArgs {
    fn config(&self, seed: u64) -> StudyConfig {
        StudyConfig {
            runs: self.runs,
            n: self.n,
            m: self.m,
            alpha: self.alpha,
            inner_replicates: self.inner,
            seed,
            discrete: self.discrete,
            reuse_null: self.reuse_null,
            reference_replicates: self.reference,
            use_phat: self.use_phat,
        }
    }
}

#[derive(Debug, Args)]
struct PowerArgs {
    #[arg(long)]
    case: String,
    /// Parameter grid `start:end:count`, or a single value; defaults to the reference value.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long, default_value = "all")]
    methods: String,
    #[command(flatten)]
    study: StudyArgs,
}

#[derive(Debug, Args)]
struct Type1Args {
    /// Case ids (default: every case of `--problem`).
    #[arg(long)]
    case: Vec<String>,
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    #[arg(long, default_value = "all")]
    methods: String,
    #[command(flatten)]
    study: StudyArgs,
}

#[derive(Debug, Args)]
struct OptbinArgs {
    #[arg(long)]
    case: Vec<String>,
    #[arg(long, value_enum, default_value_t = ProblemArg::Gof)]
    problem: ProblemArg,
    /// Bin counts `lo:hi` (default 2:20 for GoF, 2:40 for two-sample).
    #[arg(long)]
    bins: Option<String>,
    /// Equal-probability bins instead of equal-width.
    #[arg(long)]
    equal_prob: bool,
    #[command(flatten)]
    study: StudyArgs,
}

/// Parses `start:end:count` (or a single number) into a grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("invalid grid '{s}', expected start:end:count"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![v.trim().parse().map_err(|_| bad())?]),
        [a, b, c] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let c: usize = c.trim().parse().map_err(|_| bad())?;
            match c {
                0 => Err(bad()),
                1 => Ok(vec![a]),
                _ => Ok((0..c).map(|i| a + (b - a) * i as f64 / (c - 1) as f64).collect()),
            }
        }
        _ => Err(bad()),
    }
}

/// Data read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum DataFile {
    Continuous(ContinuousSample),
    Discrete(DiscreteSample),
}

/// Parses one number per line, or `value,count` lines. Blank lines and lines
/// starting with `#` are ignored.
pub fn parse_data(text: &str) -> Result<DataFile> {
    let mut values = Vec::new();
    let mut pairs: Vec<(f64, u64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let num = |t: &str| -> Result<f64> {
            let v: f64 = t.trim().parse().map_err(|_| err(format!("'{}' is not a number", t.trim())))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("'{}' is not finite", t.trim())))
            }
        };
        match line.split_once(',') {
            Some((v, c)) => {
                if !values.is_empty() {
                    return Err(err("mixed single values and value,count lines".into()));
                }
                let count: i64 = c
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("'{}' is not an integer count", c.trim())))?;
                if count < 0 {
                    return Err(err(format!("negative count {count}")));
                }
                pairs.push((num(v)?, count as u64));
            }
            None => {
                if !pairs.is_empty() {
                    return Err(err("mixed single values and value,count lines".into()));
                }
                values.push(num(line)?);
            }
        }
    }
    if !pairs.is_empty() {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for (v, c) in pairs {
            if support.last() == Some(&v) {
                *counts.last_mut().expect("nonempty") += c;
            } else {
                support.push(v);
                counts.push(c);
            }
        }
        return Ok(DataFile::Discrete(DiscreteSample::new(support, counts)?));
    }
    Ok(DataFile::Continuous(ContinuousSample::new(values)?))
}

pub fn read_data(path: &Path) -> Result<DataFile> {
    parse_data(&std::fs::read_to_string(path)?)
}

/// Both histograms on the union of their supports.
pub fn align_supports(x: &DiscreteSample, y: &DiscreteSample) -> Result<(DiscreteSample, DiscreteSample)> {
    let union: BTreeSet<u64> = x
        .support()
        .iter()
        .chain(y.support())
        .map(|v| v.to_bits() ^ if *v < 0.0 { u64::MAX } else { 1 << 63 })
        .collect();
    let support: Vec<f64> = union
        .into_iter()
        .map(|k| f64::from_bits(if k >> 63 == 1 { k ^ (1 << 63) } else { k ^ u64::MAX }))
        .collect();
    let place = |s: &DiscreteSample| -> Vec<u64> {
        let mut c = vec![0u64; support.len()];
        for (v, &k) in s.support().iter().zip(s.counts()) {
            let i = support.partition_point(|&u| u < *v);
            c[i] += k;
        }
        c
    };
    Ok((
        DiscreteSample::new(support.clone(), place(x))?,
        DiscreteSample::new(support.clone(), place(y))?,
    ))
}

/// Parses `family[:p1,p2,...]`.
///
/// Families: uniform, linear, beta, normal, t, exponential, truncexp, gamma,
/// weibull, cauchy. Without parameters, families with an estimator are fitted
/// to the data; the others use their standard parameters.
pub fn parse_model(spec: &str) -> Result<NullModel> {
    let (family, params) = match spec.split_once(':') {
        Some((f, p)) => {
            let ps = p
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidParameter(format!("invalid model parameter '{t}'"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            (f.trim().to_ascii_lowercase(), Some(ps))
        }
        None => (spec.trim().to_ascii_lowercase(), None),
    };
    let need = |k: usize| -> Result<&Vec<f64>> {
        match &params {
            Some(p) if p.len() == k => Ok(p),
            _ => Err(Error::InvalidParameter(format!(
                "model '{family}' takes {k} parameter(s)"
            ))),
        }
    };
    let estimated = |d: Dist, e: Estimator| NullModel::estimated(d, e);
    match (family.as_str(), params.is_some()) {
        ("uniform", false) => NullModel::fixed(Dist::Uniform { lo: 0.0, hi: 1.0 }),
        ("uniform", true) => {
            let p = need(2)?;
            NullModel::fixed(Dist::Uniform { lo: p[0], hi: p[1] })
        }
        ("linear", false) => estimated(Dist::Linear { slope: 0.0 }, Estimator::Linear),
        ("linear", true) => NullModel::fixed(Dist::Linear { slope: need(1)?[0] }),
        ("beta", true) => {
            let p = need(2)?;
            NullModel::fixed(Dist::Beta { a: p[0], b: p[1] })
        }
        ("normal", false) => estimated(Dist::Normal { mean: 0.0, sd: 1.0 }, Estimator::Normal),
        ("normal", true) => {
            let p = need(2)?;
            NullModel::fixed(Dist::Normal { mean: p[0], sd: p[1] })
        }
        ("t", true) => NullModel::fixed(Dist::StudentT { df: need(1)?[0] }),
        ("exponential" | "exp", false) => estimated(Dist::Exponential { rate: 1.0 }, Estimator::Exponential),
        ("exponential" | "exp", true) => NullModel::fixed(Dist::Exponential { rate: need(1)?[0] }),
        ("truncexp", false) => estimated(Dist::TruncExp { rate: 1.0 }, Estimator::TruncExp),
        ("truncexp", true) => NullModel::fixed(Dist::TruncExp { rate: need(1)?[0] }),
        ("gamma", false) => estimated(Dist::Gamma { shape: 1.0, rate: 1.0 }, Estimator::Gamma),
        ("gamma", true) => {
            let p = need(2)?;
            NullModel::fixed(Dist::Gamma { shape: p[0], rate: p[1] })
        }
        ("weibull", false) => estimated(Dist::Weibull { shape: 1.0, scale: 1.0 }, Estimator::Weibull),
        ("weibull", true) => {
            let p = need(2)?;
            NullModel::fixed(Dist::Weibull { shape: p[0], scale: p[1] })
        }
        ("cauchy", false) => NullModel::fixed(Dist::Cauchy { loc: 0.0, scale: 1.0 }),
        ("cauchy", true) => {
            let p = need(2)?;
            NullModel::fixed(Dist::Cauchy { loc: p[0], scale: p[1] })
        }
        _ => Err(Error::NotFound(format!("unknown model '{spec}'"))),
    }
}

fn case_of(id: &str, problem: Problem) -> Result<CaseStudy> {
    let full = if id.contains('/') {
        id.to_string()
    } else {
        format!("{}/{id}", problem.prefix())
    };
    case_study(&full)
}

#[derive(Serialize)]
struct Report<'a> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    replicates: usize,
    results: &'a [TestResult],
}

fn results_out(command: &str, seed: u64, replicates: usize, results: &[TestResult], format: Format) -> String {
    match format {
        Format::Json => {
            let r = Report {
                version: VERSION,
                command,
                seed,
                replicates,
                results,
            };
            serde_json::to_string_pretty(&r).expect("report serializes") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("method,statistic,pvalue,kind,replicates,df,seed,version\n");
            for r in results {
                let df = r.df.map(|d| d.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.method,
                    r.statistic,
                    r.pvalue,
                    r.pvalue_kind.as_str(),
                    r.replicates,
                    df,
                    r.seed,
                    VERSION
                );
            }
            s
        }
    }
}

fn cmd_gof(a: &GofArgs, format: Format) -> Result<String> {
    let seed = a.seed.get();
    let model = match (&a.model, &a.case) {
        (Some(m), None) => parse_model(m)?,
        (None, Some(c)) => case_of(c, Problem::Gof)?.null,
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of --model or --case".into(),
            ))
        }
    };
    let cfg = SimConfig {
        random_n: a.random_n,
        use_phat: a.use_phat,
        ..SimConfig::new(a.replicates, seed)
    };
    let results = match read_data(&a.data)? {
        DataFile::Continuous(x) => {
            let MethodList::Gof(ms) = MethodList::parse(Problem::Gof, false, &a.methods)? else {
                unreachable!()
            };
            gof_test(&ms, &x, &model, &cfg)?
        }
        DataFile::Discrete(x) => {
            let MethodList::Gof(ms) = MethodList::parse(Problem::Gof, true, &a.methods)? else {
                unreachable!()
            };
            let null = DiscreteNull::on_support(model, x.support().to_vec())?;
            gof_test_discrete(&ms, &x, &null, &cfg)?
        }
    };
    Ok(results_out("gof", seed, a.replicates, &results, format))
}

fn cmd_twosample(a: &TwoSampleArgs, format: Format) -> Result<String> {
    let seed = a.seed.get();
    let cfg = SimConfig {
        large_sample: a.use_large_sample,
        ..SimConfig::new(a.replicates, seed)
    };
    let results = match (read_data(&a.x)?, read_data(&a.y)?) {
        (DataFile::Continuous(x), DataFile::Continuous(y)) => {
            let MethodList::TwoSample(ms) = MethodList::parse(Problem::TwoSample, false, &a.methods)? else {
                unreachable!()
            };
            ts_test(&ms, &x, &y, &cfg)?
        }
        (DataFile::Discrete(x), DataFile::Discrete(y)) => {
            let MethodList::TwoSample(ms) = MethodList::parse(Problem::TwoSample, true, &a.methods)? else {
                unreachable!()
            };
            let (x, y) = align_supports(&x, &y)?;
            ts_test_discrete(&ms, &x, &y, &cfg)?
        }
        _ => {
            return Err(Error::InvalidParameter(
                "both files must hold the same kind of data".into(),
            ))
        }
    };
    Ok(results_out("twosample", seed, a.replicates, &results, format))
}

fn cmd_adjust(a: &AdjustArgs, format: Format) -> Result<String> {
    if !(0.0..=1.0).contains(&a.minp) {
        return Err(Error::InvalidParameter(format!(
            "minp must lie in [0, 1], got {}",
            a.minp
        )));
    }
    let cal = MinPCalibration::load(&a.calibration)?;
    let p = adjust(&cal, a.minp);
    Ok(match format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "version": VERSION,
                "minp": a.minp,
                "adjusted_pvalue": p,
                "R": cal.replicates,
                "seed": cal.seed,
                "methods": cal.methods,
            }))? + "\n"
        }
        Format::Csv => format!(
            "minp,adjusted_pvalue,R,seed,version\n{},{},{},{},{}\n",
            a.minp, p, cal.replicates, cal.seed, VERSION
        ),
    })
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn cmd_calibrate(a: &CalibrateArgs, format: Format) -> Result<String> {
    let seed = a.seed.get();
    let spec = match (&a.samples, &a.model) {
        (Some(files), None) => match (read_data(&files[0])?, read_data(&files[1])?) {
            (DataFile::Continuous(x), DataFile::Continuous(y)) => {
                let mut pooled = x.values().to_vec();
                pooled.extend_from_slice(y.values());
                NullSpec::TwoSample {
                    pooled,
                    n: x.len(),
                }
            }
            (DataFile::Discrete(x), DataFile::Discrete(y)) => {
                let (x, y) = align_supports(&x, &y)?;
                NullSpec::TwoSampleDiscrete {
                    support: x.support().to_vec(),
                    pooled: x.counts().iter().zip(y.counts()).map(|(a, b)| a + b).collect(),
                    n: x.n(),
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "both files must hold the same kind of data".into(),
                ))
            }
        },
        (None, Some(m)) => {
            let model = parse_model(m)?;
            match (&a.data, a.n) {
                (Some(path), _) => match read_data(path)? {
                    DataFile::Continuous(x) => NullSpec::Gof {
                        model: model.fit(&x)?,
                        n: x.len(),
                    },
                    DataFile::Discrete(x) => NullSpec::GofDiscrete {
                        model: DiscreteNull::on_support(model, x.support().to_vec())?
                            .fit(&x)?
                            .model()
                            .clone(),
                        support: x.support().to_vec(),
                        n: x.n(),
                    },
                },
                (None, Some(n)) => NullSpec::Gof { model, n },
                (None, None) => {
                    return Err(Error::InvalidParameter(
                        "GoF calibration needs --n or --data".into(),
                    ))
                }
            }
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give either --model (GoF) or --samples X Y (two-sample)".into(),
            ))
        }
    };
    let cal = calibrate(&split_names(&a.methods), spec, a.r, a.inner, seed)?;
    cal.save(&a.out)?;
    let lo = cal.minp_values.first().copied().unwrap_or(f64::NAN);
    let cdf05 = cal.cdf(0.05);
    Ok(match format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "version": VERSION,
                "file": a.out.display().to_string(),
                "R": cal.replicates,
                "seed": seed,
                "null_spec_hash": cal.null_spec_hash,
                "min": lo,
                "cdf_at_0.05": cdf05,
            }))? + "\n"
        }
        Format::Csv => format!(
            "file,R,seed,null_spec_hash,min,cdf_at_0.05,version\n{},{},{},{},{},{},{}\n",
            a.out.display(),
            cal.replicates,
            seed,
            cal.null_spec_hash,
            lo,
            cdf05,
            VERSION
        ),
    })
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_study(out: &Option<PathBuf>, study: &str, case: &str, csv: &str) -> Result<()> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let name = crate::harness::output_file_name(study, case, timestamp());
        std::fs::write(dir.join(name), csv)?;
    }
    Ok(())
}

fn cmd_power(a: &PowerArgs, format: Format) -> Result<String> {
    let seed = a.study.seed.get();
    let case = case_study(&a.case)?;
    let thetas = match &a.theta {
        Some(t) => parse_grid(t)?,
        None => vec![case.theta_ref],
    };
    let methods = MethodList::parse(case.problem, a.study.discrete, &a.methods)?;
    let cfg = a.study.config(seed);
    let grid = power_study(&case, &methods, &thetas, &cfg)?;
    let csv = grid.to_csv();
    write_study(&a.study.out, "power", &grid.case, &csv)?;
    Ok(match format {
        Format::Csv => csv,
        Format::Json => {
            serde_json::to_string_pretty(&json!({ "version": VERSION, "grid": grid }))? + "\n"
        }
    })
}

fn selected_cases(ids: &[String], problem: Option<ProblemArg>) -> Result<Vec<CaseStudy>> {
    if ids.is_empty() {
        return Ok(match problem {
            Some(p) => cases_for(p.into()),
            None => all_cases(),
        });
    }
    ids.iter().map(|id| case_study(id)).collect()
}

fn cmd_type1(a: &Type1Args, format: Format) -> Result<String> {
    let seed = a.study.seed.get();
    let cases = selected_cases(&a.case, a.problem)?;
    let cfg = a.study.config(seed);
    let mut rows = Vec::new();
    for case in &cases {
        let methods = MethodList::parse(case.problem, cfg.discrete, &a.methods)?;
        rows.extend(type1_study(std::slice::from_ref(case), Some(&methods), &cfg)?);
    }
    let csv = type1_to_csv(&rows);
    let label = if cases.len() == 1 { cases[0].full_id() } else { "all".into() };
    write_study(&a.study.out, "type1", &label, &csv)?;
    Ok(match format {
        Format::Csv => csv,
        Format::Json => serde_json::to_string_pretty(&json!({ "version": VERSION, "rows": rows }))? + "\n",
    })
}

fn cmd_optbin(a: &OptbinArgs, format: Format) -> Result<String> {
    let seed = a.study.seed.get();
    let cases = selected_cases(&a.case, Some(a.problem))?;
    let default_hi = if a.problem == ProblemArg::Gof { 20 } else { 40 };
    let (lo, hi) = match &a.bins {
        None => (2, default_hi),
        Some(s) => {
            let bad = || Error::InvalidParameter(format!("invalid bin range '{s}', expected lo:hi"));
            let (l, h) = s.split_once(':').ok_or_else(bad)?;
            (l.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?)
        }
    };
    let scheme = if a.equal_prob { BinScheme::EqualProb } else { BinScheme::EqualSize };
    let table = optbin_study(&cases, lo..=hi, scheme, &a.study.config(seed))?;
    let csv = table.to_csv();
    write_study(&a.study.out, "optbin", a.problem.to_possible_value().expect("named").get_name(), &csv)?;
    Ok(match format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "version": VERSION,
                "table": table,
                "histogram": table.histogram(),
                "mode": table.mode(),
            }))? + "\n"
        }
        Format::Csv => {
            let mut s = csv;
            s.push_str("# bins,times best\n");
            for (b, c) in table.histogram() {
                let _ = writeln!(s, "# {b},{c}");
            }
            s
        }
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_cases(problem: Option<ProblemArg>, format: Format) -> Result<String> {
    let cases = selected_cases(&[], problem)?;
    #[derive(Serialize)]
    struct Row {
        id: String,
        title: &'static str,
        theta_null: Option<f64>,
        theta_ref: f64,
        theta_range: (f64, f64),
        estimated: bool,
        table_matched: bool,
    }
    let rows: Vec<Row> = cases
        .iter()
        .map(|c| Row {
            id: c.full_id(),
            title: c.title,
            theta_null: c.theta_null,
            theta_ref: c.theta_ref,
            theta_range: c.theta_range,
            estimated: c.null.estimator().is_some(),
            table_matched: c.table_matched,
        })
        .collect();
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&json!({ "version": VERSION, "cases": rows }))? + "\n",
        Format::Csv => {
            let mut s = String::from("id,title,theta_null,theta_ref,theta_lo,theta_hi,estimated,table_matched\n");
            for r in rows {
                let t0 = r.theta_null.map(|t| t.to_string()).unwrap_or_else(|| "none".into());
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.id,
                    csv_field(r.title),
                    t0, r.theta_ref, r.theta_range.0, r.theta_range.1, r.estimated, r.table_matched
                );
            }
            s
        }
    })
}

fn dispatch(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Gof(a) => cmd_gof(a, cli.format),
        Command::Twosample(a) => cmd_twosample(a, cli.format),
        Command::Adjust(a) => cmd_adjust(a, cli.format),
        Command::Calibrate(a) => cmd_calibrate(a, cli.format),
        Command::Power(a) => cmd_power(a, cli.format),
        Command::Type1(a) => cmd_type1(a, cli.format),
        Command::Optbin(a) => cmd_optbin(a, cli.format),
        Command::Cases {
            action: CasesAction::List { problem },
        } => cmd_cases(*problem, cli.format),
    }
}

/// Exit code for an error: 2 for usage problems and unsupported methods, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        2
    } else {
        1
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
