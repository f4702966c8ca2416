//! Goodness-of-fit statistics for continuous and histogram data.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chisq::{
    chisq_formula, class_groups, gof_df, join_groups, nelder_mead, sum_groups, ChiFormula,
    reaches, ChiSqOutcome, LARGE_BINS, MIN_BIN_COUNT, SMALL_BINS,
};
use crate::error::{Error, Result};
use crate::models::{DiscreteNull, NullModel};
use crate::sample::{BinScheme, ContinuousSample, DiscreteSample};

/// Clamp for model cdf values entering logarithms.
pub const CDF_EPS: f64 = 1e-12;

/// Chi-square test variant: bin layout, number of bins and formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChiSpec {
    pub scheme: BinScheme,
    pub bins: usize,
    pub formula: ChiFormula,
}

impl ChiSpec {
    pub fn new(scheme: BinScheme, bins: usize, formula: ChiFormula) -> Self {
        Self {
            scheme,
            bins,
            formula,
        }
    }

    fn size_label(&self) -> String {
        match self.bins {
            LARGE_BINS => "l".into(),
            SMALL_BINS => "s".into(),
            b => b.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GofMethod {
    Ks,
    Kuiper,
    Cvm,
    Ad,
    Watson,
    Za,
    Zk,
    Zc,
    Wassp1,
    ChiSq(ChiSpec),
}

impl GofMethod {
    /// All methods for continuous data, in table order.
    pub fn continuous_all() -> Vec<GofMethod> {
        use GofMethod::*;
        let mut v = vec![Ks, Kuiper, Ad, Cvm, Watson, Za, Zk, Zc, Wassp1];
        for formula in [ChiFormula::Pearson, ChiFormula::LogLikelihood] {
            for scheme in [BinScheme::EqualSize, BinScheme::EqualProb] {
                for bins in [LARGE_BINS, SMALL_BINS] {
                    v.push(ChiSq(ChiSpec::new(scheme, bins, formula)));
                }
            }
        }
        v
    }

    /// All methods for histogram data, in table order.
    pub fn discrete_all() -> Vec<GofMethod> {
        use GofMethod::*;
        let mut v = vec![Ks, Kuiper, Ad, Cvm, Wassp1];
        for formula in [ChiFormula::Pearson, ChiFormula::LogLikelihood] {
            for bins in [LARGE_BINS, SMALL_BINS] {
                v.push(ChiSq(ChiSpec::new(BinScheme::EqualSize, bins, formula)));
            }
        }
        v
    }

    pub fn is_chisq(&self) -> bool {
        matches!(self, GofMethod::ChiSq(_))
    }

    pub fn supports_discrete(&self) -> bool {
        !matches!(
            self,
            GofMethod::Watson | GofMethod::Za | GofMethod::Zk | GofMethod::Zc
        )
    }

    /// Display name for continuous data, e.g. `AD` or `ES-s-P`.
    pub fn label(&self) -> String {
        match self {
            GofMethod::Ks => "KS".into(),
            GofMethod::Kuiper => "K".into(),
            GofMethod::Cvm => "CvM".into(),
            GofMethod::Ad => "AD".into(),
            GofMethod::Watson => "W".into(),
            GofMethod::Za => "ZA".into(),
            GofMethod::Zk => "ZK".into(),
            GofMethod::Zc => "ZC".into(),
            GofMethod::Wassp1 => "Wassp1".into(),
            GofMethod::ChiSq(c) => format!(
                "{}-{}-{}",
                c.scheme.label(),
                c.size_label(),
                c.formula.letter()
            ),
        }
    }

    /// Display name for histogram data (the bins are the data classes).
    pub fn label_discrete(&self) -> String {
        match self {
            GofMethod::ChiSq(c) => format!("{}-{}", c.size_label(), c.formula.letter()),
            other => other.label(),
        }
    }

    pub fn label_for(&self, discrete: bool) -> String {
        if discrete {
            self.label_discrete()
        } else {
            self.label()
        }
    }
}

impl fmt::Display for GofMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn parse_size(s: &str) -> Option<usize> {
    match s {
        "l" | "large" => Some(LARGE_BINS),
        "s" | "small" => Some(SMALL_BINS),
        n => n.parse().ok().filter(|&b: &usize| b >= 2),
    }
}

fn parse_formula(s: &str) -> Option<ChiFormula> {
    match s {
        "p" | "pearson" => Some(ChiFormula::Pearson),
        "l" | "ll" | "loglik" => Some(ChiFormula::LogLikelihood),
        _ => None,
    }
}

impl FromStr for GofMethod {
    type Err = Error;

    /// Accepts labels case-insensitively: `ks`, `kuiper`, `es-l-p`, `ep-12-l`,
    /// and the histogram forms `s-p`, `l-l`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let simple = match lower.as_str() {
            "ks" => Some(GofMethod::Ks),
            "k" | "kuiper" => Some(GofMethod::Kuiper),
            "cvm" => Some(GofMethod::Cvm),
            "ad" => Some(GofMethod::Ad),
            "w" | "watson" => Some(GofMethod::Watson),
            "za" => Some(GofMethod::Za),
            "zk" => Some(GofMethod::Zk),
            "zc" => Some(GofMethod::Zc),
            "wassp1" | "wasserstein" => Some(GofMethod::Wassp1),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        let parts: Vec<&str> = lower.split('-').collect();
        let spec = match parts.as_slice() {
            [scheme, size, formula] => {
                let scheme = match *scheme {
                    "es" => Some(BinScheme::EqualSize),
                    "ep" => Some(BinScheme::EqualProb),
                    _ => None,
                };
                scheme.zip(parse_size(size)).zip(parse_formula(formula))
            }
            [size, formula] => Some(BinScheme::EqualSize)
                .zip(parse_size(size))
                .zip(parse_formula(formula)),
            _ => None,
        };
        spec.map(|((scheme, bins), formula)| GofMethod::ChiSq(ChiSpec::new(scheme, bins, formula)))
            .ok_or_else(|| Error::UnsupportedMethod(format!("unknown goodness-of-fit method '{s}'")))
    }
}

/// Model cdf at the sorted data, checked to lie in `[0, 1]`.
fn cdf_values(data: &ContinuousSample, model: &NullModel) -> Result<Vec<f64>> {
    data.values()
        .iter()
        .map(|&x| {
            let u = model.cdf(x);
            if (0.0..=1.0).contains(&u) {
                Ok(u)
            } else {
                Err(Error::ModelError(format!("model cdf at {x} is {u}")))
            }
        })
        .collect()
}

/// Quantiles `Q((i - ½)/n)` used by the Wasserstein statistic.
pub fn wasserstein_grid(model: &NullModel, n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=n)
        .map(|i| model.quantile((i as f64 - 0.5) / nf))
        .collect()
}

fn ks_parts(u: &[f64]) -> (f64, f64) {
    let n = u.len() as f64;
    let mut dp = f64::NEG_INFINITY;
    let mut dm = f64::NEG_INFINITY;
    for (i, &ui) in u.iter().enumerate() {
        let i = i as f64;
        dp = dp.max((i + 1.0) / n - ui);
        dm = dm.max(ui - i / n);
    }
    (dp, dm)
}

fn cvm_u(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    1.0 / (12.0 * n)
        + u.iter()
            .enumerate()
            .map(|(i, &ui)| {
                let d = (2.0 * i as f64 + 1.0) / (2.0 * n) - ui;
                d * d
            })
            .sum::<f64>()
}

fn ad_u(u: &[f64]) -> f64 {
    let n = u.len();
    let nf = n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let lo = u[i].clamp(CDF_EPS, 1.0 - CDF_EPS);
            let hi = u[n - 1 - i].clamp(CDF_EPS, 1.0 - CDF_EPS);
            (2.0 * i as f64 + 1.0) * (lo.ln() + (-hi).ln_1p())
        })
        .sum();
    -nf - s / nf
}

fn watson_u(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    let mean = u.iter().sum::<f64>() / n;
    cvm_u(u) - n * (mean - 0.5) * (mean - 0.5)
}

fn zk_u(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let ui = ui.clamp(CDF_EPS, 1.0 - CDF_EPS);
            let a = i as f64 + 0.5;
            let b = n - i as f64 - 0.5;
            a * (a / (n * ui)).ln() + b * (b / (n * (1.0 - ui))).ln()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn za_u(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    -u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let ui = ui.clamp(CDF_EPS, 1.0 - CDF_EPS);
            let i1 = i as f64 + 1.0;
            ui.ln() / (n - i1 + 0.5) + (-ui).ln_1p() / (i1 - 0.5)
        })
        .sum::<f64>()
}

fn zc_u(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let ui = ui.clamp(CDF_EPS, 1.0 - CDF_EPS);
            let i1 = i as f64 + 1.0;
            let r = (1.0 / ui - 1.0) / ((n - 0.5) / (i1 - 0.75) - 1.0);
            let l = r.ln();
            l * l
        })
        .sum()
}

fn wassp1(x: &[f64], grid: &[f64]) -> f64 {
    x.iter().zip(grid).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64
}

/// Statistic of an EDF or Zhang method for continuous data under a fully evaluated model.
///
/// Chi-square methods return the chi-square statistic with the model as given
/// (no estimation).
pub fn gof_statistic(method: GofMethod, data: &ContinuousSample, model: &NullModel) -> Result<f64> {
    Ok(gof_statistics(&[method], data, model, None)?[0])
}

/// Several statistics sharing one pass over the model cdf.
///
/// `grid` optionally supplies precomputed [`wasserstein_grid`] quantiles.
pub fn gof_statistics(
    methods: &[GofMethod],
    data: &ContinuousSample,
    model: &NullModel,
    grid: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let u = cdf_values(data, model)?;
    let mut ks = None;
    let mut out = Vec::with_capacity(methods.len());
    for &m in methods {
        let mut ks_get = || *ks.get_or_insert_with(|| ks_parts(&u));
        let t = match m {
            GofMethod::Ks => {
                let (dp, dm) = ks_get();
                dp.max(dm)
            }
            GofMethod::Kuiper => {
                let (dp, dm) = ks_get();
                dp + dm
            }
            GofMethod::Cvm => cvm_u(&u),
            GofMethod::Ad => ad_u(&u),
            GofMethod::Watson => watson_u(&u),
            GofMethod::Za => za_u(&u),
            GofMethod::Zk => zk_u(&u),
            GofMethod::Zc => zc_u(&u),
            GofMethod::Wassp1 => match grid {
                Some(g) if g.len() == data.len() => wassp1(data.values(), g),
                _ => wassp1(data.values(), &wasserstein_grid(model, data.len())),
            },
            GofMethod::ChiSq(spec) => {
                chisq_gof(data, model, spec, model.param_count(), false, true)?.statistic
            }
        };
        out.push(t);
    }
    Ok(out)
}

/// Statistic for histogram data against a discrete null on the same support.
pub fn gof_statistic_discrete(
    method: GofMethod,
    data: &DiscreteSample,
    null: &DiscreteNull,
) -> Result<f64> {
    Ok(gof_statistics_discrete(&[method], data, null)?[0])
}

pub fn gof_statistics_discrete(
    methods: &[GofMethod],
    data: &DiscreteSample,
    null: &DiscreteNull,
) -> Result<Vec<f64>> {
    if data.support() != null.support() {
        return Err(Error::SupportMismatch);
    }
    if data.n() == 0 {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let fh = data.cumulative();
    let f = null.cdf_at_support();
    let v = data.support();
    let n = data.n() as f64;
    let k = fh.len();
    methods
        .iter()
        .map(|&m| {
            Ok(match m {
                GofMethod::Ks | GofMethod::Kuiper => {
                    let mut dp = 0.0f64;
                    let mut dm = 0.0f64;
                    let mut prev = 0.0;
                    for i in 0..k {
                        dp = dp.max(fh[i] - f[i]);
                        dm = dm.max(f[i] - prev);
                        prev = fh[i];
                    }
                    if m == GofMethod::Ks {
                        dp.max(dm)
                    } else {
                        dp + dm
                    }
                }
                GofMethod::Cvm => {
                    let probs = null.probs();
                    1.0 / (12.0 * n)
                        + n * (0..k)
                            .map(|i| (fh[i] - f[i]).powi(2) * probs[i])
                            .sum::<f64>()
                }
                GofMethod::Ad => (0..k)
                    .filter(|&i| fh[i] > 0.0 && fh[i] < 1.0)
                    .map(|i| (f[i] - fh[i]).powi(2) / (fh[i] * (1.0 - fh[i])))
                    .sum(),
                GofMethod::Wassp1 => (0..k.saturating_sub(1))
                    .map(|i| (fh[i] - f[i]).abs() * (v[i + 1] - v[i]))
                    .sum(),
                GofMethod::ChiSq(spec) => {
                    chisq_gof_discrete(data, null, spec, null.param_count(), false, true)?.statistic
                }
                other => {
                    return Err(Error::UnsupportedMethod(format!(
                        "{} has no version for discrete data",
                        other.label()
                    )))
                }
            })
        })
        .collect()
}

/// Internal bin edges `a_2 < ... < a_k` (outer edges are ±∞).
fn continuous_edges(data: &ContinuousSample, model: &NullModel, spec: ChiSpec) -> Result<Vec<f64>> {
    let k = spec.bins;
    if k < 2 {
        return Err(Error::InvalidParameter("chi-square needs at least 2 bins".into()));
    }
    let mut edges: Vec<f64> = match spec.scheme {
        BinScheme::EqualSize => {
            let (lo, hi) = (data.min(), data.max());
            if !(lo < hi) {
                return Err(Error::DegenerateBinning(
                    "all observations are equal".into(),
                ));
            }
            let w = (hi - lo) / k as f64;
            (1..k).map(|j| lo + w * j as f64).collect()
        }
        BinScheme::EqualProb => (1..k)
            .map(|j| model.quantile(j as f64 / k as f64))
            .collect(),
    };
    edges.dedup();
    if edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::ModelError("model quantile is not finite".into()));
    }
    Ok(edges)
}

fn bin_counts(values: &[f64], edges: &[f64]) -> Vec<f64> {
    let mut o = vec![0.0; edges.len() + 1];
    for &x in values {
        o[edges.partition_point(|&e| e < x)] += 1.0;
    }
    o
}

fn expected_counts(model: &NullModel, edges: &[f64], n: f64) -> Result<Vec<f64>> {
    let mut cdf = Vec::with_capacity(edges.len() + 2);
    cdf.push(0.0);
    for &e in edges {
        let c = model.cdf(e);
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::ModelError(format!("model cdf at {e} is {c}")));
        }
        cdf.push(c);
    }
    cdf.push(1.0);
    Ok(cdf.windows(2).map(|w| n * (w[1] - w[0]).max(0.0)).collect())
}

fn finish(
    observed: &[f64],
    expected: &[f64],
    formula: ChiFormula,
    estimated: usize,
    random_n: bool,
) -> Result<ChiSqOutcome> {
    let groups = join_groups(expected, MIN_BIN_COUNT);
    let o = sum_groups(observed, &groups);
    let e = sum_groups(expected, &groups);
    if groups.len() < 2 || e.iter().any(|&x| !reaches(x, MIN_BIN_COUNT)) {
        return Err(Error::DegenerateBinning(format!(
            "{} bin(s) with expected count at least {MIN_BIN_COUNT}",
            e.iter().filter(|&&x| reaches(x, MIN_BIN_COUNT)).count()
        )));
    }
    let df = gof_df(groups.len(), estimated, random_n)?;
    Ok(ChiSqOutcome {
        statistic: chisq_formula(formula, &o, &e),
        df,
        bins_after_join: groups.len(),
        expected: e,
        observed: o,
    })
}

/// Statistic with the bins joined into `cells`, held fixed while the
/// parameters move.
fn fixed_cell_statistic(observed: &[f64], expected: &[f64], cells: &[Range<usize>], formula: ChiFormula) -> f64 {
    let e = sum_groups(expected, cells);
    if e.iter().any(|&x| !(x > 0.0)) {
        return f64::INFINITY;
    }
    chisq_formula(formula, &sum_groups(observed, cells), &e)
}

/// Minimises `objective` over the model parameters starting at `start`;
/// returns the best parameters, never worse than the start.
fn minimum_chisq(objective: impl Fn(&[f64]) -> f64, start: &[f64]) -> Vec<f64> {
    let f0 = objective(start);
    let (p, v) = nelder_mead(&objective, start, 400);
    if v < f0 {
        p
    } else {
        start.to_vec()
    }
}

/// Chi-square goodness-of-fit test for continuous data.
///
/// `model` holds the parameter estimate (phat) for composite nulls.
/// `estimated_params` enters the degrees of freedom; `random_n` selects the
/// Poisson sample size rules. With `use_phat = false` the parameters are
/// re-chosen to minimise the statistic, starting from phat.
pub fn chisq_gof(
    data: &ContinuousSample,
    model: &NullModel,
    spec: ChiSpec,
    estimated_params: usize,
    random_n: bool,
    use_phat: bool,
) -> Result<ChiSqOutcome> {
    let n = data.len() as f64;
    let edges = continuous_edges(data, model, spec)?;
    let observed = bin_counts(data.values(), &edges);
    let mut fitted = model.clone();
    if !use_phat && model.estimator().is_some() {
        let cells = join_groups(&expected_counts(model, &edges, n)?, MIN_BIN_COUNT);
        let objective = |p: &[f64]| -> f64 {
            model
                .with_params(p)
                .and_then(|m| expected_counts(&m, &edges, n))
                .map_or(f64::INFINITY, |e| fixed_cell_statistic(&observed, &e, &cells, spec.formula))
        };
        fitted = model.with_params(&minimum_chisq(objective, &model.params()))?;
    }
    let expected = expected_counts(&fitted, &edges, n)?;
    finish(&observed, &expected, spec.formula, estimated_params, random_n)
}

/// Chi-square goodness-of-fit test for histogram data; classes are grouped
/// into `spec.bins` runs of adjacent classes first when there are more.
pub fn chisq_gof_discrete(
    data: &DiscreteSample,
    null: &DiscreteNull,
    spec: ChiSpec,
    estimated_params: usize,
    random_n: bool,
    use_phat: bool,
) -> Result<ChiSqOutcome> {
    if data.support() != null.support() {
        return Err(Error::SupportMismatch);
    }
    if spec.bins < 2 {
        return Err(Error::InvalidParameter("chi-square needs at least 2 bins".into()));
    }
    let n = data.n() as f64;
    let classes = class_groups(data.k(), spec.bins);
    let counts: Vec<f64> = data.counts().iter().map(|&c| c as f64).collect();
    let observed = sum_groups(&counts, &classes);
    let expected_of = |dn: &DiscreteNull| -> Vec<f64> {
        let e: Vec<f64> = dn.probs().iter().map(|p| n * p).collect();
        sum_groups(&e, &classes)
    };
    let mut fitted = null.clone();
    if !use_phat && null.param_count() > 0 {
        let cells = join_groups(&expected_of(null), MIN_BIN_COUNT);
        let objective = |p: &[f64]| -> f64 {
            null.with_params(p)
                .map_or(f64::INFINITY, |dn| fixed_cell_statistic(&observed, &expected_of(&dn), &cells, spec.formula))
        };
        fitted = null.with_params(&minimum_chisq(objective, &null.model().params()))?;
    }
    finish(&observed, &expected_of(&fitted), spec.formula, estimated_params, random_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Dist, Estimator};
    use crate::rng::stream;

    fn unif() -> NullModel {
        NullModel::fixed(Dist::Uniform { lo: 0.0, hi: 1.0 }).unwrap()
    }

    fn midpoint_sample(n: usize) -> ContinuousSample {
        ContinuousSample::new((1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect()).unwrap()
    }

    #[test]
    fn ks_at_midpoint_quantiles() {
        let t = gof_statistic(GofMethod::Ks, &midpoint_sample(10), &unif()).unwrap();
        assert!((t - 0.05).abs() < 1e-15);
    }

    #[test]
    fn cvm_single_observation() {
        let x = ContinuousSample::new(vec![0.5]).unwrap();
        let t = gof_statistic(GofMethod::Cvm, &x, &unif()).unwrap();
        assert!((t - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn zc_vanishes_at_its_centre() {
        let n = 3.0;
        let x: Vec<f64> = (1..=3).map(|i| (i as f64 - 0.75) / (n - 0.5)).collect();
        let t = gof_statistic(GofMethod::Zc, &ContinuousSample::new(x).unwrap(), &unif()).unwrap();
        assert!(t.abs() < 1e-24);
    }

    #[test]
    fn ad_discrete_two_point_example() {
        let data = DiscreteSample::new(vec![0.0, 1.0], vec![5, 5]).unwrap();
        let null = DiscreteNull::on_support(
            NullModel::fixed(Dist::Uniform { lo: -1.0, hi: 1.0 }).unwrap(),
            vec![0.0, 1.0],
        )
        .unwrap();
        assert_eq!(null.cdf_at_support(), &[0.5, 1.0]);
        assert_eq!(gof_statistic_discrete(GofMethod::Ad, &data, &null).unwrap(), 0.0);
    }

    #[test]
    fn zhang_rejected_on_discrete_data() {
        let data = DiscreteSample::new(vec![0.0, 1.0], vec![5, 5]).unwrap();
        let null = DiscreteNull::on_support(
            NullModel::fixed(Dist::Uniform { lo: -1.0, hi: 1.0 }).unwrap(),
            vec![0.0, 1.0],
        )
        .unwrap();
        for m in [GofMethod::Za, GofMethod::Zk, GofMethod::Zc, GofMethod::Watson] {
            assert!(matches!(
                gof_statistic_discrete(m, &data, &null),
                Err(Error::UnsupportedMethod(_))
            ));
        }
    }

    #[test]
    fn method_names_roundtrip() {
        for m in GofMethod::continuous_all() {
            assert_eq!(m.label().parse::<GofMethod>().unwrap(), m);
        }
        for m in GofMethod::discrete_all() {
            assert_eq!(m.label_discrete().parse::<GofMethod>().unwrap(), m);
        }
        assert_eq!(GofMethod::continuous_all().len(), 17);
        assert_eq!(GofMethod::discrete_all().len(), 9);
        assert!("nonsense".parse::<GofMethod>().is_err());
        assert_eq!(
            "es-7-p".parse::<GofMethod>().unwrap(),
            GofMethod::ChiSq(ChiSpec::new(BinScheme::EqualSize, 7, ChiFormula::Pearson))
        );
    }

    #[test]
    fn chisq_df_and_counts() {
        let mut rng = stream(5, &[1]);
        let model = NullModel::estimated(Dist::Normal { mean: 0.0, sd: 1.0 }, Estimator::Normal).unwrap();
        let data = model.sample(400, &mut rng);
        let fitted = model.fit(&data).unwrap();
        for scheme in [BinScheme::EqualSize, BinScheme::EqualProb] {
            let spec = ChiSpec::new(scheme, SMALL_BINS, ChiFormula::Pearson);
            let out = chisq_gof(&data, &fitted, spec, 2, false, true).unwrap();
            assert!((out.observed.iter().sum::<f64>() - 400.0).abs() < 1e-9);
            assert!((out.expected.iter().sum::<f64>() - 400.0).abs() < 1e-6);
            assert!(out.expected.iter().all(|&e| reaches(e, MIN_BIN_COUNT)));
            assert_eq!(out.df, out.bins_after_join - 3);
            let rnd = chisq_gof(&data, &fitted, spec, 2, true, true).unwrap();
            assert_eq!(rnd.df, out.df + 1);
            let min = chisq_gof(&data, &fitted, spec, 2, false, false).unwrap();
            assert!(min.statistic <= out.statistic + 1e-12);
        }
    }

    #[test]
    fn chisq_equal_probability_bins_are_balanced() {
        let mut rng = stream(6, &[1]);
        let data = unif().sample(1000, &mut rng);
        let spec = ChiSpec::new(BinScheme::EqualProb, SMALL_BINS, ChiFormula::LogLikelihood);
        let out = chisq_gof(&data, &unif(), spec, 0, false, true).unwrap();
        assert_eq!(out.bins_after_join, 10);
        assert!(out.expected.iter().all(|&e| (e - 100.0).abs() < 1e-9));
    }

    #[test]
    fn chisq_degenerate_data() {
        let data = ContinuousSample::new(vec![0.3; 20]).unwrap();
        let spec = ChiSpec::new(BinScheme::EqualSize, SMALL_BINS, ChiFormula::Pearson);
        assert!(matches!(
            chisq_gof(&data, &unif(), spec, 0, false, true),
            Err(Error::DegenerateBinning(_))
        ));
    }

    #[test]
    fn discrete_chisq_groups_classes() {
        let layout = crate::sample::BinLayout::equal_width(0.0, 1.0, 50).unwrap();
        let null = DiscreteNull::from_layout(unif(), &layout).unwrap();
        let mut rng = stream(7, &[1]);
        let data = null.sample(500, &mut rng);
        let small = chisq_gof_discrete(&data, &null, ChiSpec::new(BinScheme::EqualSize, 10, ChiFormula::Pearson), 0, false, true).unwrap();
        assert_eq!(small.bins_after_join, 10);
        assert!(small.expected.iter().all(|&e| (e - 50.0).abs() < 1e-9));
        let large = chisq_gof_discrete(&data, &null, ChiSpec::new(BinScheme::EqualSize, 50, ChiFormula::Pearson), 0, false, true).unwrap();
        assert_eq!(large.bins_after_join, 50);
    }
}
