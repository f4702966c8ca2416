//! Power and type I error studies over the case registry, best default
//! subsets, and the sweep over the number of chi-square bins.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::{CaseStudy, Problem};
use crate::chisq::ChiFormula;
use crate::error::{Error, Result};
use crate::gof::{
    chisq_gof, chisq_gof_discrete, gof_statistics, gof_statistics_discrete, wasserstein_grid,
    ChiSpec, GofMethod,
};
use crate::inference::{
    gof_test, gof_test_discrete, resampling_pvalue, ts_test, ts_test_discrete, SimConfig, TestResult,
};
use crate::models::DiscreteNull;
use crate::rng::{derive, stream, tag};
use crate::sample::{discretize_clamped, BinScheme, ContinuousSample, DiscreteSample};
use crate::twosample::TwoSampleMethod;

/// Default sample size (each sample) of the case studies.
pub const DEFAULT_N: usize = 500;
/// Default inner replicates for p-values inside studies.
pub const DEFAULT_INNER: usize = 500;
/// Replicates of a shared null reference distribution.
pub const DEFAULT_REFERENCE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// Simulated data sets per cell.
    pub runs: usize,
    pub n: usize,
    /// Size of the second sample (two-sample cases); defaults to `n`.
    pub m: Option<usize>,
    pub alpha: f64,
    /// Replicates of each p-value computation.
    pub inner_replicates: usize,
    pub seed: u64,
    /// Run the histogram version of each case.
    pub discrete: bool,
    /// GoF with a fully specified null: simulate the null distribution of each
    /// statistic once (with `reference_replicates`) and reuse it for every run.
    pub reuse_null: bool,
    pub reference_replicates: usize,
    /// Chi-square with estimated parameters: keep phat instead of minimising.
    pub use_phat: bool,
}

impl StudyConfig {
    pub fn new(runs: usize, seed: u64) -> Self {
        Self {
            runs,
            n: DEFAULT_N,
            m: None,
            alpha: 0.05,
            inner_replicates: DEFAULT_INNER,
            seed,
            discrete: false,
            reuse_null: false,
            reference_replicates: DEFAULT_REFERENCE,
            use_phat: false,
        }
    }

    fn m(&self) -> usize {
        self.m.unwrap_or(self.n)
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    fn sim(&self, seed: u64) -> SimConfig {
        SimConfig {
            use_phat: self.use_phat,
            ..SimConfig::new(self.inner_replicates, seed)
        }
    }
}

/// Methods of one problem type.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodList {
    Gof(Vec<GofMethod>),
    TwoSample(Vec<TwoSampleMethod>),
}

impl MethodList {
    /// Every method applicable to the problem and data type.
    pub fn all(problem: Problem, discrete: bool) -> Self {
        match (problem, discrete) {
            (Problem::Gof, false) => MethodList::Gof(GofMethod::continuous_all()),
            (Problem::Gof, true) => MethodList::Gof(GofMethod::discrete_all()),
            (Problem::TwoSample, false) => MethodList::TwoSample(TwoSampleMethod::continuous_all()),
            (Problem::TwoSample, true) => MethodList::TwoSample(TwoSampleMethod::discrete_all()),
        }
    }

    /// Parses comma separated names (`all` for every applicable method).
    pub fn parse(problem: Problem, discrete: bool, names: &str) -> Result<Self> {
        if names.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::all(problem, discrete));
        }
        let items = names.split(',').map(str::trim).filter(|s| !s.is_empty());
        let list = match problem {
            Problem::Gof => MethodList::Gof(items.map(str::parse).collect::<Result<_>>()?),
            Problem::TwoSample => MethodList::TwoSample(items.map(str::parse).collect::<Result<_>>()?),
        };
        if list.is_empty() {
            return Err(Error::InvalidParameter("no methods given".into()));
        }
        if discrete {
            let bad = match &list {
                MethodList::Gof(ms) => ms.iter().find(|m| !m.supports_discrete()).map(|m| m.label()),
                MethodList::TwoSample(ms) => ms.iter().find(|m| !m.supports_discrete()).map(|m| m.label()),
            };
            if let Some(b) = bad {
                return Err(Error::UnsupportedMethod(format!("{b} has no version for discrete data")));
            }
        }
        Ok(list)
    }

    pub fn len(&self) -> usize {
        match self {
            MethodList::Gof(v) => v.len(),
            MethodList::TwoSample(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self, discrete: bool) -> Vec<String> {
        match self {
            MethodList::Gof(v) => v.iter().map(|m| m.label_for(discrete)).collect(),
            MethodList::TwoSample(v) => v.iter().map(|m| m.label_for(discrete)).collect(),
        }
    }

    fn matches(&self, problem: Problem) -> bool {
        matches!(
            (self, problem),
            (MethodList::Gof(_), Problem::Gof) | (MethodList::TwoSample(_), Problem::TwoSample)
        )
    }
}

/// Null distribution of GoF statistics shared by all runs of a fully specified null.
struct Reference {
    methods: Vec<GofMethod>,
    sorted: Vec<Vec<f64>>,
    grid: Option<Vec<f64>>,
}

impl Reference {
    fn pvalue(&self, j: usize, t: f64) -> f64 {
        let s = &self.sorted[j];
        let below = s.partition_point(|&v| v < t);
        resampling_pvalue(s.len() - below, s.len())
    }
}

fn build_reference(case: &CaseStudy, methods: &[GofMethod], cfg: &StudyConfig) -> Result<Option<Reference>> {
    if !cfg.reuse_null || case.problem != Problem::Gof || case.null.estimator().is_some() {
        return Ok(None);
    }
    let sim: Vec<GofMethod> = methods.iter().copied().filter(|m| !m.is_chisq()).collect();
    let b = cfg.reference_replicates;
    let grid = (!cfg.discrete).then(|| wasserstein_grid(&case.null, cfg.n));
    let dnull = if cfg.discrete { Some(case.discrete_null()?) } else { None };
    let base = derive(cfg.seed, &[tag("reference"), tag(&case.full_id()), cfg.n as u64, cfg.discrete as u64]);
    let rows = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(base, &[i as u64]);
            match &dnull {
                Some(dn) => {
                    let x = dn.sample(cfg.n as u64, &mut rng);
                    gof_statistics_discrete(&sim, &x, dn)
                }
                None => {
                    let x = case.null.sample(cfg.n, &mut rng);
                    gof_statistics(&sim, &x, &case.null, grid.as_deref())
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let sorted = (0..sim.len())
        .map(|j| {
            let mut col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();
    Ok(Some(Reference {
        methods: sim,
        sorted,
        grid,
    }))
}

fn draw_sorted(dist: &crate::models::Dist, n: usize, rng: &mut crate::rng::StreamRng) -> ContinuousSample {
    let mut v = dist.draw_n(n, rng);
    v.sort_unstable_by(f64::total_cmp);
    ContinuousSample::from_sorted_unchecked(v)
}

fn binned(case: &CaseStudy, x: &ContinuousSample) -> DiscreteSample {
    discretize_clamped(x.values(), &case.layout())
}

/// P-values of every method for one simulated data set.
fn run_pvalues(
    case: &CaseStudy,
    methods: &MethodList,
    theta: f64,
    r: usize,
    cfg: &StudyConfig,
    reference: Option<&Reference>,
    dnull: Option<&DiscreteNull>,
) -> Result<Vec<f64>> {
    let run_seed = derive(
        cfg.seed,
        &[tag(&case.full_id()), theta.to_bits(), cfg.discrete as u64, r as u64],
    );
    let mut rng = stream(run_seed, &[tag("data")]);
    let sim = cfg.sim(derive(run_seed, &[tag("inference")]));
    let alt = case.alternative(theta)?;
    match methods {
        MethodList::Gof(ms) => {
            let x = draw_sorted(&alt, cfg.n, &mut rng);
            if let Some(rf) = reference {
                reference_pvalues(case, ms, &x, rf, dnull)
            } else if cfg.discrete {
                let dn = dnull.expect("discrete null prepared");
                let xb = binned(case, &x);
                tolerant_pvalues(ms, |m| gof_test_discrete(m, &xb, dn, &sim))
            } else {
                tolerant_pvalues(ms, |m| gof_test(m, &x, &case.null, &sim))
            }
        }
        MethodList::TwoSample(ms) => {
            let x = draw_sorted(case.null.dist(), cfg.n, &mut rng);
            let y = draw_sorted(&alt, cfg.m(), &mut rng);
            if cfg.discrete {
                let (xb, yb) = (binned(case, &x), binned(case, &y));
                tolerant_pvalues(ms, |m| ts_test_discrete(m, &xb, &yb, &sim))
            } else {
                tolerant_pvalues(ms, |m| ts_test(m, &x, &y, &sim))
            }
        }
    }
}

/// P-values of `methods`; a chi-square test whose bins collapse on this data
/// set cannot be carried out and counts as not rejecting (p = 1).
fn tolerant_pvalues<M>(methods: &[M], run: impl Fn(&[M]) -> Result<Vec<TestResult>>) -> Result<Vec<f64>> {
    match run(methods) {
        Ok(r) => Ok(r.into_iter().map(|t| t.pvalue).collect()),
        Err(Error::DegenerateBinning(_)) => methods
            .iter()
            .map(|m| match run(std::slice::from_ref(m)) {
                Ok(r) => Ok(r[0].pvalue),
                Err(Error::DegenerateBinning(_)) => Ok(1.0),
                Err(e) => Err(e),
            })
            .collect(),
        Err(e) => Err(e),
    }
}

fn reference_pvalues(
    case: &CaseStudy,
    methods: &[GofMethod],
    x: &ContinuousSample,
    rf: &Reference,
    dnull: Option<&DiscreteNull>,
) -> Result<Vec<f64>> {
    let observed = match dnull {
        Some(dn) => gof_statistics_discrete(&rf.methods, &binned(case, x), dn)?,
        None => gof_statistics(&rf.methods, x, &case.null, rf.grid.as_deref())?,
    };
    let mut j = 0;
    methods
        .iter()
        .map(|&m| match m {
            GofMethod::ChiSq(spec) => {
                let out = match dnull {
                    Some(dn) => chisq_gof_discrete(&binned(case, x), dn, spec, 0, false, true),
                    None => chisq_gof(x, &case.null, spec, 0, false, true),
                };
                match out {
                    Ok(o) => Ok(o.pvalue()),
                    Err(Error::DegenerateBinning(_)) => Ok(1.0),
                    Err(e) => Err(e),
                }
            }
            _ => {
                let p = rf.pvalue(j, observed[j]);
                j += 1;
                Ok(p)
            }
        })
        .collect()
}

/// Fraction of `cfg.runs` data sets at `theta` rejected by each method.
pub fn rejection_rates(case: &CaseStudy, methods: &MethodList, theta: f64, cfg: &StudyConfig) -> Result<Vec<f64>> {
    let reference = match methods {
        MethodList::Gof(ms) => build_reference(case, ms, cfg)?,
        MethodList::TwoSample(_) => None,
    };
    rates_with(case, methods, theta, cfg, reference.as_ref())
}

fn rates_with(
    case: &CaseStudy,
    methods: &MethodList,
    theta: f64,
    cfg: &StudyConfig,
    reference: Option<&Reference>,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !methods.matches(case.problem) {
        return Err(Error::InvalidParameter(format!(
            "method list does not fit case {}",
            case.full_id()
        )));
    }
    let dnull = if cfg.discrete && case.problem == Problem::Gof {
        Some(case.discrete_null()?)
    } else {
        None
    };
    let pvals = (0..cfg.runs)
        .into_par_iter()
        .map(|r| run_pvalues(case, methods, theta, r, cfg, reference, dnull.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut hits = vec![0usize; methods.len()];
    for ps in &pvals {
        for (h, &p) in hits.iter_mut().zip(ps) {
            *h += (p < cfg.alpha) as usize;
        }
    }
    Ok(hits.iter().map(|&h| h as f64 / cfg.runs as f64).collect())
}

/// Binomial standard error of a rejection rate.
pub fn binomial_se(rate: f64, runs: usize) -> f64 {
    (rate * (1.0 - rate) / runs as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub study: String,
    pub case: String,
    pub method: String,
    pub theta: f64,
    pub rate: f64,
    pub se: f64,
    pub runs: usize,
    pub n: usize,
    pub m: Option<usize>,
    pub seed: u64,
}

const CSV_HEADER: &str = "study,case,method,theta,rate,se,runs,n,m,seed";

/// Rows as CSV with a header line.
pub fn rows_to_csv(rows: &[PowerRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let m = r.m.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.study, r.case, r.method, r.theta, r.rate, r.se, r.runs, r.n, m, r.seed
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGrid {
    pub case: String,
    pub methods: Vec<String>,
    pub thetas: Vec<f64>,
    pub n: usize,
    pub m: Option<usize>,
    pub runs: usize,
    pub alpha: f64,
    pub discrete: bool,
    pub seed: u64,
    /// `rates[method][theta]`.
    pub rates: Vec<Vec<f64>>,
    pub se: Vec<Vec<f64>>,
}

impl PowerGrid {
    pub fn rows(&self, study: &str) -> Vec<PowerRow> {
        let mut out = Vec::new();
        for (i, method) in self.methods.iter().enumerate() {
            for (j, &theta) in self.thetas.iter().enumerate() {
                out.push(PowerRow {
                    study: study.into(),
                    case: self.case.clone(),
                    method: method.clone(),
                    theta,
                    rate: self.rates[i][j],
                    se: self.se[i][j],
                    runs: self.runs,
                    n: self.n,
                    m: self.m,
                    seed: self.seed,
                });
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows("power"))
    }

    /// Rate of a method at the `j`-th parameter value.
    pub fn rate(&self, method: &str, j: usize) -> Option<f64> {
        self.methods.iter().position(|m| m == method).map(|i| self.rates[i][j])
    }
}

/// Rejection rates of every method over a grid of parameter values.
pub fn power_study(case: &CaseStudy, methods: &MethodList, thetas: &[f64], cfg: &StudyConfig) -> Result<PowerGrid> {
    let reference = match methods {
        MethodList::Gof(ms) => build_reference(case, ms, cfg)?,
        MethodList::TwoSample(_) => None,
    };
    let k = methods.len();
    let mut rates = vec![Vec::with_capacity(thetas.len()); k];
    for &theta in thetas {
        let r = rates_with(case, methods, theta, cfg, reference.as_ref())?;
        for (i, v) in r.into_iter().enumerate() {
            rates[i].push(v);
        }
    }
    let se = rates
        .iter()
        .map(|row| row.iter().map(|&p| binomial_se(p, cfg.runs)).collect())
        .collect();
    Ok(PowerGrid {
        case: case.full_id(),
        methods: methods.labels(cfg.discrete),
        thetas: thetas.to_vec(),
        n: cfg.n,
        m: (case.problem == Problem::TwoSample).then(|| cfg.m()),
        runs: cfg.runs,
        alpha: cfg.alpha,
        discrete: cfg.discrete,
        seed: cfg.seed,
        rates,
        se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Row {
    pub case: String,
    pub method: String,
    /// `None` when the case has no null parameter value.
    pub rate: Option<f64>,
    pub se: Option<f64>,
    pub runs: usize,
    pub n: usize,
    pub seed: u64,
}

/// Rejection rates under the null for each case (cases without a null
/// parameter value are reported as skipped).
pub fn type1_study(cases: &[CaseStudy], methods: Option<&MethodList>, cfg: &StudyConfig) -> Result<Vec<Type1Row>> {
    let mut rows = Vec::new();
    for case in cases {
        let list = match methods {
            Some(m) if m.matches(case.problem) => m.clone(),
            Some(_) => continue,
            None => MethodList::all(case.problem, cfg.discrete),
        };
        let labels = list.labels(cfg.discrete);
        match case.theta_null {
            None => rows.extend(labels.into_iter().map(|method| Type1Row {
                case: case.full_id(),
                method,
                rate: None,
                se: None,
                runs: cfg.runs,
                n: cfg.n,
                seed: cfg.seed,
            })),
            Some(t0) => {
                let rates = rejection_rates(case, &list, t0, cfg)?;
                rows.extend(labels.into_iter().zip(rates).map(|(method, rate)| Type1Row {
                    case: case.full_id(),
                    method,
                    rate: Some(rate),
                    se: Some(binomial_se(rate, cfg.runs)),
                    runs: cfg.runs,
                    n: cfg.n,
                    seed: cfg.seed,
                }));
            }
        }
    }
    Ok(rows)
}

pub fn type1_to_csv(rows: &[Type1Row]) -> String {
    let mut s = String::from("study,case,method,rate,se,runs,n,seed\n");
    for r in rows {
        let fmt = |v: Option<f64>| v.map_or_else(|| "skipped".to_string(), |x| x.to_string());
        let _ = writeln!(
            s,
            "type1,{},{},{},{},{},{},{}",
            r.case,
            r.method,
            fmt(r.rate),
            fmt(r.se),
            r.runs,
            r.n,
            r.seed
        );
    }
    s
}

/// Powers of all methods at the reference parameter of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasePowers {
    pub case: String,
    pub methods: Vec<String>,
    pub powers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subset {
    pub methods: Vec<String>,
    /// Mean over cases of the best power within the subset.
    pub mean_power: f64,
}

/// Whether for every case some member of `subset` has power at least
/// `share` (0.9 by default) of the best method's power.
pub fn subset_qualifies(table: &[CasePowers], subset: &[String], share: f64) -> bool {
    table.iter().all(|c| {
        let best = c.powers.iter().copied().fold(0.0, f64::max);
        c.methods
            .iter()
            .zip(&c.powers)
            .any(|(m, &p)| subset.contains(m) && p >= share * best)
    })
}

fn subset_mean_power(table: &[CasePowers], subset: &[String]) -> f64 {
    let total: f64 = table
        .iter()
        .map(|c| {
            c.methods
                .iter()
                .zip(&c.powers)
                .filter(|(m, _)| subset.contains(m))
                .map(|(_, &p)| p)
                .fold(0.0, f64::max)
        })
        .sum();
    total / table.len().max(1) as f64
}

/// All subsets of `k` methods (from the first case's method list) within 90%
/// of the best method on every case, by decreasing mean power.
pub fn best_subsets(table: &[CasePowers], k: usize) -> Vec<Subset> {
    let Some(first) = table.first() else {
        return Vec::new();
    };
    let names = &first.methods;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k.min(names.len())).collect();
    if idx.len() < k {
        return out;
    }
    loop {
        let subset: Vec<String> = idx.iter().map(|&i| names[i].clone()).collect();
        if subset_qualifies(table, &subset, 0.9) {
            out.push(Subset {
                mean_power: subset_mean_power(table, &subset),
                methods: subset,
            });
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                out.sort_by(|a, b| b.mean_power.total_cmp(&a.mean_power));
                return out;
            }
            i -= 1;
            if idx[i] < names.len() - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Powers at `theta_ref` of every method for each case.
pub fn reference_powers(cases: &[CaseStudy], methods: &MethodList, cfg: &StudyConfig) -> Result<Vec<CasePowers>> {
    cases
        .iter()
        .map(|case| {
            let powers = rejection_rates(case, methods, case.theta_ref, cfg)?;
            Ok(CasePowers {
                case: case.full_id(),
                methods: methods.labels(cfg.discrete),
                powers,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptBinTable {
    pub bins: Vec<usize>,
    pub cases: Vec<String>,
    /// `powers[case][bin index]`.
    pub powers: Vec<Vec<f64>>,
    /// Bin count with the highest power for each case (smallest on ties).
    pub best: Vec<usize>,
    pub runs: usize,
    pub n: usize,
    pub seed: u64,
}

impl OptBinTable {
    /// `(bin count, number of cases where it is best)`, ascending by bin count.
    pub fn histogram(&self) -> Vec<(usize, usize)> {
        let mut h: Vec<(usize, usize)> = Vec::new();
        for &b in &self.best {
            match h.iter_mut().find(|(v, _)| *v == b) {
                Some(e) => e.1 += 1,
                None => h.push((b, 1)),
            }
        }
        h.sort();
        h
    }

    /// Most frequent best bin count (smallest on ties).
    pub fn mode(&self) -> Option<usize> {
        self.histogram()
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(b, _)| b)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("study,case,bins,power,runs,n,seed\n");
        for (c, row) in self.cases.iter().zip(&self.powers) {
            for (b, p) in self.bins.iter().zip(row) {
                let _ = writeln!(s, "optbin,{c},{b},{p},{},{},{}", self.runs, self.n, self.seed);
            }
        }
        s
    }
}

/// Chi-square power at `theta_ref` as a function of the number of bins.
pub fn optbin_study(
    cases: &[CaseStudy],
    bins: std::ops::RangeInclusive<usize>,
    scheme: BinScheme,
    cfg: &StudyConfig,
) -> Result<OptBinTable> {
    let bin_list: Vec<usize> = bins.collect();
    if bin_list.iter().any(|&b| b < 2) {
        return Err(Error::InvalidParameter("bin counts start at 2".into()));
    }
    let mut powers = Vec::new();
    let mut best = Vec::new();
    for case in cases {
        let methods = match case.problem {
            Problem::Gof => MethodList::Gof(
                bin_list
                    .iter()
                    .map(|&b| GofMethod::ChiSq(ChiSpec::new(scheme, b, ChiFormula::Pearson)))
                    .collect(),
            ),
            Problem::TwoSample => MethodList::TwoSample(
                bin_list
                    .iter()
                    .map(|&b| TwoSampleMethod::ChiSq { scheme, bins: b })
                    .collect(),
            ),
        };
        let row = rejection_rates(case, &methods, case.theta_ref, cfg)?;
        let mut bi = 0;
        for (i, &p) in row.iter().enumerate() {
            if p > row[bi] {
                bi = i;
            }
        }
        best.push(bin_list[bi]);
        powers.push(row);
    }
    Ok(OptBinTable {
        bins: bin_list,
        cases: cases.iter().map(CaseStudy::full_id).collect(),
        powers,
        best,
        runs: cfg.runs,
        n: cfg.n,
        seed: cfg.seed,
    })
}

/// `{study}.{case}.{timestamp}.csv` with `/` in the case id replaced by `-`.
pub fn output_file_name(study: &str, case: &str, timestamp: u64) -> String {
    format!("{study}.{}.{timestamp}.csv", case.replace('/', "-"))
}
