//! Chi-square machinery shared by the goodness-of-fit and two-sample tests:
//! bin construction, joining of sparse neighbouring bins, the Pearson and
//! log-likelihood formulas and the degrees-of-freedom rules.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::chisq_sf;

/// "Large" number of bins.
pub const LARGE_BINS: usize = 50;
/// "Small" number of bins; also the recommended default.
pub const SMALL_BINS: usize = 10;
/// Minimum expected (GoF) or combined (two-sample) count per bin after joining.
pub const MIN_BIN_COUNT: f64 = 5.0;

/// Whether a bin weight reaches `min`; a relative slack of 1e-9 keeps
/// weights that equal `min` up to rounding (equal-probability bins) on the
/// same side every time.
pub fn reaches(weight: f64, min: f64) -> bool {
    weight >= min * (1.0 - 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChiFormula {
    /// `sum (O - E)^2 / E`
    Pearson,
    /// `2 sum [E - O + O log(O / E)]`
    LogLikelihood,
}

impl ChiFormula {
    pub fn letter(self) -> &'static str {
        match self {
            ChiFormula::Pearson => "P",
            ChiFormula::LogLikelihood => "L",
        }
    }
}

/// Result of a chi-square test statistic computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSqOutcome {
    pub statistic: f64,
    pub df: usize,
    pub bins_after_join: usize,
    /// Expected counts per joined bin (GoF) or combined counts (two-sample).
    pub expected: Vec<f64>,
    /// Observed counts per joined bin (x counts for two-sample).
    pub observed: Vec<f64>,
}

impl ChiSqOutcome {
    /// Asymptotic p-value from the chi-square distribution with `df` degrees of freedom.
    pub fn pvalue(&self) -> f64 {
        chisq_sf(self.statistic, self.df as f64)
    }
}

pub fn pearson(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            assert!(e > 0.0, "expected count must be positive after joining");
            (o - e) * (o - e) / e
        })
        .sum()
}

pub fn log_likelihood(observed: &[f64], expected: &[f64]) -> f64 {
    2.0 * observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let log_term = if o > 0.0 { o * (o / e).ln() } else { 0.0 };
            e - o + log_term
        })
        .sum::<f64>()
}

pub fn chisq_formula(formula: ChiFormula, observed: &[f64], expected: &[f64]) -> f64 {
    match formula {
        ChiFormula::Pearson => pearson(observed, expected),
        ChiFormula::LogLikelihood => log_likelihood(observed, expected),
    }
}

/// Groups consecutive bins so each group has weight at least `min`.
///
/// Bins are scanned left to right and a sparse bin is merged into its right
/// neighbour; a sparse remainder at the end is merged into the last group.
pub fn join_groups(weights: &[f64], min: f64) -> Vec<Range<usize>> {
    let mut groups: Vec<Range<usize>> = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if reaches(acc, min) {
            groups.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match groups.last_mut() {
            Some(last) => last.end = weights.len(),
            None => groups.push(0..weights.len()),
        }
    }
    groups
}

pub fn sum_groups(values: &[f64], groups: &[Range<usize>]) -> Vec<f64> {
    groups.iter().map(|g| values[g.clone()].iter().sum()).collect()
}

/// Splits `k` classes into at most `target` runs of adjacent classes of near equal length.
pub fn class_groups(k: usize, target: usize) -> Vec<Range<usize>> {
    if target >= k || target == 0 {
        return (0..k).map(|i| i..i + 1).collect();
    }
    (0..target)
        .map(|j| (j * k / target)..((j + 1) * k / target))
        .filter(|r| !r.is_empty())
        .collect()
}

/// Degrees of freedom of the GoF chi-square statistic.
///
/// | estimation | sample size | df |
/// |---|---|---|
/// | none | fixed | bins - 1 |
/// | none | random (Poisson) | bins |
/// | p parameters | fixed | bins - 1 - p |
/// | p parameters | random | bins - p |
pub fn gof_df(bins: usize, estimated: usize, random_n: bool) -> Result<usize> {
    let base = if random_n { bins as i64 } else { bins as i64 - 1 };
    let df = base - estimated as i64;
    if df < 1 {
        return Err(Error::DegenerateBinning(format!(
            "{bins} bins after joining leave {df} degrees of freedom"
        )));
    }
    Ok(df as usize)
}

/// Nelder-Mead minimisation used for minimum chi-square estimation.
pub(crate) fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], max_iter: usize) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..dim {
        let mut p = start.to_vec();
        let step = if p[i].abs() > 1e-8 { 0.05 * p[i].abs() } else { 0.01 };
        p[i] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let (best, worst) = (vals[0], vals[dim]);
        if (worst - best).abs() <= 1e-10 * (best.abs() + 1e-10) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|p| p[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let refl = along(-1.0);
        let fr = f(&refl);
        if fr < vals[0] {
            let exp = along(-2.0);
            let fe = f(&exp);
            if fe < fr {
                simplex[dim] = exp;
                vals[dim] = fe;
            } else {
                simplex[dim] = refl;
                vals[dim] = fr;
            }
        } else if fr < vals[dim - 1] {
            simplex[dim] = refl;
            vals[dim] = fr;
        } else {
            let con = if fr < vals[dim] { along(-0.5) } else { along(0.5) };
            let fc = f(&con);
            if fc < vals[dim].min(fr) {
                simplex[dim] = con;
                vals[dim] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=dim {
                    simplex[i] = best
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, p)| b + 0.5 * (p - b))
                        .collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let i = (0..=dim).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    (simplex[i].clone(), vals[i])
}
