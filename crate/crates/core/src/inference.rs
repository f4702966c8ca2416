//! P-values: Monte-Carlo simulation for goodness-of-fit tests, permutation
//! for two-sample tests, and the chi-square and large-sample Kolmogorov
//! approximations.
//!
//! Every replicate draws from its own random stream derived from
//! `(seed, replicate index)`, and replicate outcomes are reduced by integer
//! counting, so results do not depend on the number of worker threads.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Hypergeometric, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gof::{
    chisq_gof, chisq_gof_discrete, gof_statistics, gof_statistics_discrete, wasserstein_grid,
    GofMethod,
};
use crate::models::{DiscreteNull, NullModel};
use crate::rng::{stream, tag};
use crate::sample::{ContinuousSample, DiscreteSample, PooledSample};
use crate::special::kolmogorov_sf;
use crate::twosample::{chisq_twosample, chisq_twosample_discrete, TsContext, TwoSampleMethod};

/// Default number of simulation or permutation replicates.
pub const DEFAULT_REPLICATES: usize = 5000;
/// Smallest allowed number of replicates.
pub const MIN_REPLICATES: usize = 100;
/// Sample size above which (for both samples) KS switches to its asymptotic p-value.
pub const LARGE_SAMPLE: usize = 1000;
/// Largest tolerated fraction of replicates whose parameter estimation fails.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueKind {
    Simulation,
    Permutation,
    Asymptotic,
}

impl PValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PValueKind::Simulation => "simulation",
            PValueKind::Permutation => "permutation",
            PValueKind::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of simulated data sets or random permutations (B).
    pub replicates: usize,
    pub seed: u64,
    /// Draw each simulated sample size from Poisson(n); changes chi-square df.
    pub random_n: bool,
    /// Force the asymptotic KS p-value for two-sample tests.
    pub large_sample: bool,
    /// Chi-square with composite nulls: keep the supplied estimate instead of
    /// minimising the statistic over the parameters.
    pub use_phat: bool,
}

impl SimConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            random_n: false,
            large_sample: false,
            use_phat: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < MIN_REPLICATES {
            return Err(Error::InvalidParameter(format!(
                "at least {MIN_REPLICATES} replicates are required, got {}",
                self.replicates
            )));
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(DEFAULT_REPLICATES, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic: f64,
    pub pvalue: f64,
    pub pvalue_kind: PValueKind,
    /// Replicates used; for an exhaustive permutation test the number of labellings.
    pub replicates: usize,
    pub seed: u64,
    /// Degrees of freedom of chi-square tests.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<usize>,
}

/// `(1 + exceed) / (B + 1)`.
pub fn resampling_pvalue(exceed: usize, replicates: usize) -> f64 {
    (1.0 + exceed as f64) / (replicates as f64 + 1.0)
}

/// Asymptotic two-sample KS p-value for statistic `d`.
pub fn ks_large_sample_pvalue(d: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    kolmogorov_sf((n * m / (n + m)).sqrt() * d)
}

/// Outcome of one simulated replicate: exceedance flags, or a failed estimation.
type Replicate = Option<Vec<bool>>;

fn reduce(outcomes: Vec<Replicate>, k: usize, replicates: usize) -> Result<(Vec<usize>, usize)> {
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    if failures as f64 > MAX_FAILURE_RATE * replicates as f64 {
        return Err(Error::EstimationFailure(format!(
            "parameter estimation failed in {failures} of {replicates} simulated data sets"
        )));
    }
    let mut exceed = vec![0usize; k];
    for flags in outcomes.into_iter().flatten() {
        for (e, f) in exceed.iter_mut().zip(flags) {
            *e += f as usize;
        }
    }
    Ok((exceed, replicates - failures))
}

fn simulated_size<R: Rng + ?Sized>(n: usize, random_n: bool, rng: &mut R) -> usize {
    if random_n {
        let p = Poisson::new(n as f64).expect("positive mean");
        (p.sample(rng) as usize).max(1)
    } else {
        n
    }
}

/// Runs several goodness-of-fit tests on continuous data.
///
/// Composite nulls are fitted to the data, simulated from at the fitted
/// parameters and refitted on every simulated sample.
pub fn gof_test(
    methods: &[GofMethod],
    data: &ContinuousSample,
    model: &NullModel,
    cfg: &SimConfig,
) -> Result<Vec<TestResult>> {
    cfg.validate()?;
    let fitted = model.fit(data)?;
    let p = model.param_count();
    let sim: Vec<GofMethod> = methods.iter().copied().filter(|m| !m.is_chisq()).collect();
    let n = data.len();
    let grid = (model.estimator().is_none() && !cfg.random_n && sim.contains(&GofMethod::Wassp1))
        .then(|| wasserstein_grid(&fitted, n));
    let observed = gof_statistics(&sim, data, &fitted, grid.as_deref())?;
    let mut exceed = vec![0usize; sim.len()];
    let mut valid = cfg.replicates;
    if !sim.is_empty() {
        let run = |b: usize| -> Result<Replicate> {
            let mut rng = stream(cfg.seed, &[tag("gof"), b as u64]);
            let nb = simulated_size(n, cfg.random_n, &mut rng);
            let x = fitted.sample(nb, &mut rng);
            let refit = match fitted.fit(&x) {
                Ok(f) => f,
                Err(Error::EstimationFailure(_)) | Err(Error::InvalidParameter(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let t = gof_statistics(&sim, &x, &refit, grid.as_deref())?;
            Ok(Some(t.iter().zip(&observed).map(|(tb, to)| tb >= to).collect()))
        };
        let outcomes = (0..cfg.replicates)
            .into_par_iter()
            .map(run)
            .collect::<Result<Vec<_>>>()?;
        (exceed, valid) = reduce(outcomes, sim.len(), cfg.replicates)?;
    }
    let mut sim_iter = observed.iter().zip(&exceed);
    methods
        .iter()
        .map(|&m| {
            if let GofMethod::ChiSq(spec) = m {
                let out = chisq_gof(data, &fitted, spec, p, cfg.random_n, cfg.use_phat)?;
                return Ok(TestResult {
                    method: m.label(),
                    statistic: out.statistic,
                    pvalue: out.pvalue(),
                    pvalue_kind: PValueKind::Asymptotic,
                    replicates: 0,
                    seed: cfg.seed,
                    df: Some(out.df),
                });
            }
            let (&t, &e) = sim_iter.next().expect("one observed statistic per simulated method");
            Ok(TestResult {
                method: m.label(),
                statistic: t,
                pvalue: resampling_pvalue(e, valid),
                pvalue_kind: PValueKind::Simulation,
                replicates: valid,
                seed: cfg.seed,
                df: None,
            })
        })
        .collect()
}

/// Single goodness-of-fit test on continuous data.
pub fn gof_pvalue(
    method: GofMethod,
    data: &ContinuousSample,
    model: &NullModel,
    cfg: &SimConfig,
) -> Result<TestResult> {
    Ok(gof_test(&[method], data, model, cfg)?.remove(0))
}

/// Runs several goodness-of-fit tests on histogram data.
pub fn gof_test_discrete(
    methods: &[GofMethod],
    data: &DiscreteSample,
    null: &DiscreteNull,
    cfg: &SimConfig,
) -> Result<Vec<TestResult>> {
    cfg.validate()?;
    if let Some(m) = methods.iter().find(|m| !m.supports_discrete()) {
        return Err(Error::UnsupportedMethod(format!(
            "{} has no version for discrete data",
            m.label()
        )));
    }
    let fitted = null.fit(data)?;
    let p = null.param_count();
    let sim: Vec<GofMethod> = methods.iter().copied().filter(|m| !m.is_chisq()).collect();
    let observed = gof_statistics_discrete(&sim, data, &fitted)?;
    let n = data.n() as usize;
    let mut exceed = vec![0usize; sim.len()];
    let mut valid = cfg.replicates;
    if !sim.is_empty() {
        let run = |b: usize| -> Result<Replicate> {
            let mut rng = stream(cfg.seed, &[tag("gof-discrete"), b as u64]);
            let nb = simulated_size(n, cfg.random_n, &mut rng);
            let x = fitted.sample(nb as u64, &mut rng);
            let refit = match fitted.fit(&x) {
                Ok(f) => f,
                Err(Error::EstimationFailure(_))
                | Err(Error::InvalidParameter(_))
                | Err(Error::ModelError(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let t = gof_statistics_discrete(&sim, &x, &refit)?;
            Ok(Some(t.iter().zip(&observed).map(|(tb, to)| tb >= to).collect()))
        };
        let outcomes = (0..cfg.replicates)
            .into_par_iter()
            .map(run)
            .collect::<Result<Vec<_>>>()?;
        (exceed, valid) = reduce(outcomes, sim.len(), cfg.replicates)?;
    }
    let mut sim_iter = observed.iter().zip(&exceed);
    methods
        .iter()
        .map(|&m| {
            if let GofMethod::ChiSq(spec) = m {
                let out = chisq_gof_discrete(data, &fitted, spec, p, cfg.random_n, cfg.use_phat)?;
                return Ok(TestResult {
                    method: m.label_discrete(),
                    statistic: out.statistic,
                    pvalue: out.pvalue(),
                    pvalue_kind: PValueKind::Asymptotic,
                    replicates: 0,
                    seed: cfg.seed,
                    df: Some(out.df),
                });
            }
            let (&t, &e) = sim_iter.next().expect("one observed statistic per simulated method");
            Ok(TestResult {
                method: m.label_discrete(),
                statistic: t,
                pvalue: resampling_pvalue(e, valid),
                pvalue_kind: PValueKind::Simulation,
                replicates: valid,
                seed: cfg.seed,
                df: None,
            })
        })
        .collect()
}

/// `C(n, k)` as a float (exact for the sizes where exhaustive enumeration is considered).
fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Calls `visit(counts, multiplicity)` for every way of choosing `n` of the
/// pooled observations as x, grouped by how many fall on each value.
fn enumerate_splits(sizes: &[u64], n: u64, visit: &mut impl FnMut(&[u64], f64)) {
    fn rec(
        sizes: &[u64],
        tail: &[u64],
        g: usize,
        left: u64,
        weight: f64,
        counts: &mut Vec<u64>,
        visit: &mut impl FnMut(&[u64], f64),
    ) {
        if g == sizes.len() {
            if left == 0 {
                visit(counts, weight);
            }
            return;
        }
        let lo = left.saturating_sub(tail[g + 1]);
        let hi = left.min(sizes[g]);
        for c in lo..=hi {
            counts[g] = c;
            rec(sizes, tail, g + 1, left - c, weight * binomial(sizes[g], c), counts, visit);
        }
    }
    // tail[g] = total size of groups g.. (for pruning)
    let mut tail = vec![0u64; sizes.len() + 1];
    for g in (0..sizes.len()).rev() {
        tail[g] = tail[g + 1] + sizes[g];
    }
    let mut counts = vec![0u64; sizes.len()];
    rec(sizes, &tail, 0, n, 1.0, &mut counts, visit);
}

/// Random split of the pooled counts: x count per value, hypergeometric given the rest.
fn hypergeometric_split<R: Rng + ?Sized>(sizes: &[u64], n: u64, rng: &mut R) -> Vec<u64> {
    let mut remaining: u64 = sizes.iter().sum();
    let mut left = n;
    sizes
        .iter()
        .map(|&s| {
            let c = if left == 0 {
                0
            } else if s == remaining {
                left
            } else {
                Hypergeometric::new(remaining, s, left)
                    .expect("valid hypergeometric parameters")
                    .sample(rng)
            };
            remaining -= s;
            left -= c;
            c
        })
        .collect()
}

fn shuffled_split<R: Rng + ?Sized>(owner: &[u32], k: usize, n: usize, rng: &mut R) -> Vec<u64> {
    let mut perm = owner.to_vec();
    let (chosen, _) = perm.partial_shuffle(rng, n);
    let mut counts = vec![0u64; k];
    for &g in chosen.iter() {
        counts[g as usize] += 1;
    }
    counts
}

/// Relative tolerance below which two permutation statistics count as tied.
const TIE_TOL: f64 = 1e-9;

fn is_extreme(method: TwoSampleMethod, tb: f64, to: f64) -> bool {
    let tol = TIE_TOL * to.abs().max(1.0);
    if method.rejects_large() {
        tb >= to - tol
    } else {
        tb <= to + tol
    }
}

fn ts_test_ctx(
    methods: &[TwoSampleMethod],
    ctx: &TsContext,
    cfg: &SimConfig,
    chisq: impl Fn(TwoSampleMethod) -> Result<crate::chisq::ChiSqOutcome>,
) -> Result<Vec<TestResult>> {
    cfg.validate()?;
    let (n, m) = (ctx.n(), ctx.m());
    let discrete = ctx.is_discrete();
    let large = cfg.large_sample || n.min(m) > LARGE_SAMPLE;
    let asymptotic_ks = |meth: &TwoSampleMethod| large && *meth == TwoSampleMethod::Ks;
    let perm: Vec<TwoSampleMethod> = methods
        .iter()
        .copied()
        .filter(|m| !m.is_chisq() && !asymptotic_ks(m))
        .collect();
    for m in methods {
        if discrete && !m.supports_discrete() {
            return Err(Error::UnsupportedMethod(format!(
                "{} has no version for discrete data",
                m.label()
            )));
        }
    }
    let observed = ctx.observed(&perm)?;
    let total = binomial((n + m) as u64, n as u64);
    let exhaustive = total <= cfg.replicates as f64;
    // (p-value, labellings used)
    let mut perm_p: Vec<f64> = Vec::new();
    let mut used = cfg.replicates;
    if !perm.is_empty() {
        if exhaustive {
            let mut hits = vec![0.0f64; perm.len()];
            let mut err = None;
            enumerate_splits(ctx.sizes(), n as u64, &mut |counts, w| {
                match ctx.statistics(&perm, counts) {
                    Ok(t) => {
                        for (j, meth) in perm.iter().enumerate() {
                            if is_extreme(*meth, t[j], observed[j]) {
                                hits[j] += w;
                            }
                        }
                    }
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            perm_p = hits.iter().map(|h| h / total).collect();
            used = total.round() as usize;
        } else {
            let owner: Vec<u32> = ctx
                .sizes()
                .iter()
                .enumerate()
                .flat_map(|(g, &s)| std::iter::repeat_n(g as u32, s as usize))
                .collect();
            let run = |b: usize| -> Result<Vec<bool>> {
                let mut rng = stream(cfg.seed, &[tag("permutation"), b as u64]);
                let counts = if discrete {
                    hypergeometric_split(ctx.sizes(), n as u64, &mut rng)
                } else {
                    shuffled_split(&owner, ctx.k(), n, &mut rng)
                };
                let t = ctx.statistics(&perm, &counts)?;
                Ok(perm
                    .iter()
                    .zip(t.iter().zip(&observed))
                    .map(|(meth, (&tb, &to))| is_extreme(*meth, tb, to))
                    .collect())
            };
            let flags = (0..cfg.replicates)
                .into_par_iter()
                .map(run)
                .collect::<Result<Vec<_>>>()?;
            let mut exceed = vec![0usize; perm.len()];
            for f in flags {
                for (e, x) in exceed.iter_mut().zip(f) {
                    *e += x as usize;
                }
            }
            perm_p = exceed
                .iter()
                .map(|&e| resampling_pvalue(e, cfg.replicates))
                .collect();
        }
    }
    let mut perm_iter = observed.iter().zip(&perm_p);
    methods
        .iter()
        .map(|&meth| {
            let label = meth.label_for(discrete);
            if meth.is_chisq() {
                let out = chisq(meth)?;
                return Ok(TestResult {
                    method: label,
                    statistic: out.statistic,
                    pvalue: out.pvalue(),
                    pvalue_kind: PValueKind::Asymptotic,
                    replicates: 0,
                    seed: cfg.seed,
                    df: Some(out.df),
                });
            }
            if asymptotic_ks(&meth) {
                let d = ctx.observed(&[TwoSampleMethod::Ks])?[0];
                return Ok(TestResult {
                    method: label,
                    statistic: d,
                    pvalue: ks_large_sample_pvalue(d, n, m),
                    pvalue_kind: PValueKind::Asymptotic,
                    replicates: 0,
                    seed: cfg.seed,
                    df: None,
                });
            }
            let (&t, &p) = perm_iter.next().expect("one observed statistic per permuted method");
            Ok(TestResult {
                method: label,
                statistic: t,
                pvalue: p,
                pvalue_kind: PValueKind::Permutation,
                replicates: used,
                seed: cfg.seed,
                df: None,
            })
        })
        .collect()
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n + m < 4 || n == 0 || m == 0 {
        return Err(Error::InsufficientData(format!(
            "two-sample tests need nonempty samples with n + m >= 4 (n = {n}, m = {m})"
        )));
    }
    Ok(())
}

/// Runs several two-sample tests on continuous data.
///
/// When the number of distinct labellings does not exceed the replicate
/// count, the permutation distribution is enumerated exhaustively and the
/// p-value is exact.
pub fn ts_test(
    methods: &[TwoSampleMethod],
    x: &ContinuousSample,
    y: &ContinuousSample,
    cfg: &SimConfig,
) -> Result<Vec<TestResult>> {
    check_sizes(x.len(), y.len())?;
    let ctx = TsContext::continuous(&PooledSample::new(x, y))?;
    ts_test_ctx(methods, &ctx, cfg, |meth| match meth {
        TwoSampleMethod::ChiSq { scheme, bins } => chisq_twosample(x, y, scheme, bins),
        _ => unreachable!("only chi-square methods are routed here"),
    })
}

/// Single two-sample test on continuous data.
pub fn ts_pvalue(
    method: TwoSampleMethod,
    x: &ContinuousSample,
    y: &ContinuousSample,
    cfg: &SimConfig,
) -> Result<TestResult> {
    Ok(ts_test(&[method], x, y, cfg)?.remove(0))
}

/// Runs several two-sample tests on histograms with a common support.
pub fn ts_test_discrete(
    methods: &[TwoSampleMethod],
    x: &DiscreteSample,
    y: &DiscreteSample,
    cfg: &SimConfig,
) -> Result<Vec<TestResult>> {
    check_sizes(x.n() as usize, y.n() as usize)?;
    let ctx = TsContext::discrete(x, y)?;
    ts_test_ctx(methods, &ctx, cfg, |meth| match meth {
        TwoSampleMethod::ChiSq { bins, .. } => chisq_twosample_discrete(x, y, bins),
        _ => unreachable!("only chi-square methods are routed here"),
    })
}
