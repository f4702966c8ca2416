//! Registry of case studies: parametric null/alternative pairs for the
//! goodness-of-fit and two-sample power studies.
//!
//! Alternatives whose exact form is not pinned down elsewhere use the
//! following fixed constructions (θ is the case parameter):
//!
//! * bump: `(1-θ)·base + θ·N(0.5, 0.05²)` truncated to the base support
//! * sine: density `1 + θ·sin(4πx)` on `[0, 1]`
//! * large outliers: `(1-θ)·N(0,1) + θ·N(5, 1)`
//! * symmetric outliers: `(1-θ)·N(0,1) + θ/2·N(-5, 1) + θ/2·N(5, 1)`
//! * quadratic: density `1 + θ·(12(x-½)² - 1)` on `[0, 1]`
//! * normal mixture: `½·N(-θ, 1) + ½·N(θ, 1)`
//! * mixture of uniforms: `(1-θ)·U(0,1) + θ·U(0, ½)`
//! * uniform/beta mixture: `(1-θ)·U(0,1) + θ·Beta(2,2)`
//! * triangular: `(1-θ)·U(0,1) + θ·Tri(0, ½, 1)`
//! * gamma vs normal: x ~ Gamma(2,1), y ~ `(1-θ)·Gamma(2,1) + θ·N(2, 2)`
//! * normal vs Cauchy: `(1-θ)·N(0,1) + θ·Cauchy(0,1)`
//!
//! The discrete version of every case bins the data on a fixed grid of 50
//! equal-width classes (values outside the grid go to the end classes).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{DiscreteNull, Dist, Estimator, NullModel};
use crate::sample::BinLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Gof,
    TwoSample,
}

impl Problem {
    pub fn prefix(self) -> &'static str {
        match self {
            Problem::Gof => "gof",
            Problem::TwoSample => "twosample",
        }
    }
}

/// Number of classes used when a case is run on histogram data.
pub const DISCRETE_CLASSES: usize = 50;

#[derive(Debug, Clone)]
pub struct CaseStudy {
    pub id: &'static str,
    pub problem: Problem,
    pub title: &'static str,
    /// GoF: the null hypothesis. Two-sample: the distribution of x.
    pub null: NullModel,
    alternative: fn(f64) -> Dist,
    /// Parameter value at which the alternative equals the null, if any.
    pub theta_null: Option<f64>,
    /// Parameter value used for the power tables.
    pub theta_ref: f64,
    pub theta_range: (f64, f64),
    /// Grid `(lo, hi)` for the discrete version.
    pub grid: (f64, f64),
    /// Whether the alternative is fully specified (power tables can be compared
    /// against published values).
    pub table_matched: bool,
}

impl CaseStudy {
    /// `gof/<id>` or `twosample/<id>`.
    pub fn full_id(&self) -> String {
        format!("{}/{}", self.problem.prefix(), self.id)
    }

    /// Distribution of the data (GoF) or of y (two-sample) at parameter `theta`.
    pub fn alternative(&self, theta: f64) -> Result<Dist> {
        let d = (self.alternative)(theta);
        d.validate()?;
        Ok(d)
    }

    pub fn layout(&self) -> BinLayout {
        BinLayout::equal_width(self.grid.0, self.grid.1, DISCRETE_CLASSES).expect("valid grid")
    }

    /// Null for the binned version of a GoF case.
    pub fn discrete_null(&self) -> Result<DiscreteNull> {
        DiscreteNull::from_layout(self.null.clone(), &self.layout())
    }
}

fn unif() -> Dist {
    Dist::Uniform { lo: 0.0, hi: 1.0 }
}

fn std_normal() -> Dist {
    Dist::Normal { mean: 0.0, sd: 1.0 }
}

fn exp1() -> Dist {
    Dist::Exponential { rate: 1.0 }
}

fn mix(parts: Vec<(f64, Dist)>) -> Dist {
    Dist::Mixture {
        parts: parts.into_iter().filter(|(w, _)| *w > 0.0).collect(),
    }
}

fn bump(lo: f64, hi: f64) -> Dist {
    Dist::TruncNormal { mean: 0.5, sd: 0.05, lo, hi }
}

fn alt_linear(t: f64) -> Dist {
    Dist::Linear { slope: t }
}
fn alt_quadratic(t: f64) -> Dist {
    Dist::Quadratic { a: t }
}
fn alt_uniform_bump(t: f64) -> Dist {
    mix(vec![(1.0 - t, unif()), (t, bump(0.0, 1.0))])
}
fn alt_sine(t: f64) -> Dist {
    Dist::Sine { amp: t, freq: 2 }
}
fn alt_beta_aa(t: f64) -> Dist {
    Dist::Beta { a: t, b: t }
}
fn alt_beta_2a(t: f64) -> Dist {
    Dist::Beta { a: 2.0, b: t }
}
fn alt_shift(t: f64) -> Dist {
    Dist::Normal { mean: t, sd: 1.0 }
}
fn alt_stretch(t: f64) -> Dist {
    Dist::Normal { mean: 0.0, sd: t }
}
fn alt_t(t: f64) -> Dist {
    Dist::StudentT { df: t }
}
fn alt_outlier_large(t: f64) -> Dist {
    mix(vec![(1.0 - t, std_normal()), (t, Dist::Normal { mean: 5.0, sd: 1.0 })])
}
fn alt_outlier_sym(t: f64) -> Dist {
    mix(vec![
        (1.0 - t, std_normal()),
        (0.5 * t, Dist::Normal { mean: -5.0, sd: 1.0 }),
        (0.5 * t, Dist::Normal { mean: 5.0, sd: 1.0 }),
    ])
}
fn alt_gamma(t: f64) -> Dist {
    Dist::Gamma { shape: t, rate: 1.0 }
}
fn alt_weibull(t: f64) -> Dist {
    Dist::Weibull { shape: t, scale: 1.0 }
}
fn alt_exp_bump(t: f64) -> Dist {
    mix(vec![(1.0 - t, exp1()), (t, bump(0.0, f64::INFINITY))])
}
fn alt_normal_cauchy(t: f64) -> Dist {
    mix(vec![(1.0 - t, std_normal()), (t, Dist::Cauchy { loc: 0.0, scale: 1.0 })])
}
fn alt_gamma_normal(t: f64) -> Dist {
    mix(vec![
        (1.0 - t, Dist::Gamma { shape: 2.0, rate: 1.0 }),
        (t, Dist::Normal { mean: 2.0, sd: 2f64.sqrt() }),
    ])
}
fn alt_normal_mixture(t: f64) -> Dist {
    mix(vec![
        (0.5, Dist::Normal { mean: -t, sd: 1.0 }),
        (0.5, Dist::Normal { mean: t, sd: 1.0 }),
    ])
}
fn alt_uniform_mixture(t: f64) -> Dist {
    mix(vec![(1.0 - t, unif()), (t, Dist::Uniform { lo: 0.0, hi: 0.5 })])
}
fn alt_uniform_beta(t: f64) -> Dist {
    mix(vec![(1.0 - t, unif()), (t, Dist::Beta { a: 2.0, b: 2.0 })])
}
fn alt_noncentral(t: f64) -> Dist {
    Dist::ChiSquared { df: 5.0, ncp: t }
}
fn alt_triangular(t: f64) -> Dist {
    mix(vec![(1.0 - t, unif()), (t, Dist::Triangular { lo: 0.0, mode: 0.5, hi: 1.0 })])
}

struct Row {
    id: &'static str,
    title: &'static str,
    null: fn() -> NullModel,
    alternative: fn(f64) -> Dist,
    theta_null: Option<f64>,
    theta_ref: f64,
    theta_range: (f64, f64),
    grid: (f64, f64),
    table_matched: bool,
}

fn fixed(d: Dist) -> NullModel {
    NullModel::fixed(d).expect("registry null is valid")
}

fn n_unif() -> NullModel {
    fixed(unif())
}
fn n_beta22() -> NullModel {
    fixed(Dist::Beta { a: 2.0, b: 2.0 })
}
fn n_normal() -> NullModel {
    fixed(std_normal())
}
fn n_exp() -> NullModel {
    fixed(exp1())
}
fn n_truncexp() -> NullModel {
    fixed(Dist::TruncExp { rate: 1.0 })
}
fn n_gamma2() -> NullModel {
    fixed(Dist::Gamma { shape: 2.0, rate: 1.0 })
}
fn n_chisq5() -> NullModel {
    fixed(Dist::ChiSquared { df: 5.0, ncp: 0.0 })
}
fn n_normal_est() -> NullModel {
    NullModel::estimated(std_normal(), Estimator::Normal).expect("valid")
}
fn n_exp_est() -> NullModel {
    NullModel::estimated(exp1(), Estimator::Exponential).expect("valid")
}
fn n_truncexp_est() -> NullModel {
    NullModel::estimated(Dist::TruncExp { rate: 1.0 }, Estimator::TruncExp).expect("valid")
}

const UNIT: (f64, f64) = (0.0, 1.0);
const NORMAL_GRID: (f64, f64) = (-3.0, 3.0);
const EXP_GRID: (f64, f64) = (0.0, 5.0);

#[rustfmt::skip]
fn gof_rows() -> Vec<Row> {
    vec![
        Row { id: "uniform-linear", title: "Uniform - Linear", null: n_unif, alternative: alt_linear, theta_null: Some(0.0), theta_ref: 0.22, theta_range: (0.0, 0.5), grid: UNIT, table_matched: true },
        Row { id: "uniform-quadratic", title: "Uniform - Quadratic", null: n_unif, alternative: alt_quadratic, theta_null: Some(0.0), theta_ref: 0.17, theta_range: (0.0, 0.5), grid: UNIT, table_matched: true },
        Row { id: "uniform-bump", title: "Uniform - Uniform+Bump", null: n_unif, alternative: alt_uniform_bump, theta_null: Some(0.0), theta_ref: 0.09, theta_range: (0.0, 0.2), grid: UNIT, table_matched: false },
        Row { id: "uniform-sine", title: "Uniform - Uniform+Sine", null: n_unif, alternative: alt_sine, theta_null: Some(0.0), theta_ref: 0.26, theta_range: (0.0, 0.4), grid: UNIT, table_matched: false },
        Row { id: "beta22-betaaa", title: "Beta(2,2) - Beta(a,a)", null: n_beta22, alternative: alt_beta_aa, theta_null: Some(2.0), theta_ref: 2.48, theta_range: (2.0, 3.0), grid: UNIT, table_matched: true },
        Row { id: "beta22-beta2a", title: "Beta(2,2) - Beta(2,a)", null: n_beta22, alternative: alt_beta_2a, theta_null: Some(2.0), theta_ref: 2.23, theta_range: (2.0, 3.0), grid: UNIT, table_matched: true },
        Row { id: "normal-shift", title: "Normal - Shift", null: n_normal, alternative: alt_shift, theta_null: Some(0.0), theta_ref: 0.135, theta_range: (0.0, 0.3), grid: NORMAL_GRID, table_matched: true },
        Row { id: "normal-stretch", title: "Normal - Stretch", null: n_normal, alternative: alt_stretch, theta_null: Some(1.0), theta_ref: 1.125, theta_range: (1.0, 1.3), grid: NORMAL_GRID, table_matched: true },
        Row { id: "normal-t", title: "Normal - t", null: n_normal, alternative: alt_t, theta_null: None, theta_ref: 12.0, theta_range: (2.0, 30.0), grid: NORMAL_GRID, table_matched: true },
        Row { id: "normal-outlier1", title: "Normal - Outliers large", null: n_normal, alternative: alt_outlier_large, theta_null: Some(0.0), theta_ref: 0.004, theta_range: (0.0, 0.015), grid: NORMAL_GRID, table_matched: false },
        Row { id: "normal-outlier2", title: "Normal - Outliers sym.", null: n_normal, alternative: alt_outlier_sym, theta_null: Some(0.0), theta_ref: 0.004, theta_range: (0.0, 0.015), grid: NORMAL_GRID, table_matched: false },
        Row { id: "exp-gamma", title: "Exponential - Gamma", null: n_exp, alternative: alt_gamma, theta_null: Some(1.0), theta_ref: 1.11, theta_range: (1.0, 1.3), grid: EXP_GRID, table_matched: true },
        Row { id: "exp-weibull", title: "Exponential - Weibull", null: n_exp, alternative: alt_weibull, theta_null: Some(1.0), theta_ref: 1.13, theta_range: (1.0, 1.3), grid: EXP_GRID, table_matched: true },
        Row { id: "exp-bump", title: "Exponential - Bump", null: n_exp, alternative: alt_exp_bump, theta_null: Some(0.0), theta_ref: 0.085, theta_range: (0.0, 0.15), grid: EXP_GRID, table_matched: false },
        Row { id: "truncexp-linear", title: "Truncated Exp. - Linear", null: n_truncexp, alternative: alt_linear, theta_null: None, theta_ref: -0.27, theta_range: (-0.5, 0.0), grid: UNIT, table_matched: true },
        Row { id: "normal-t-est", title: "Normal - t, est.", null: n_normal_est, alternative: alt_t, theta_null: None, theta_ref: 8.0, theta_range: (3.0, 40.0), grid: NORMAL_GRID, table_matched: true },
        Row { id: "exp-weibull-est", title: "Exponential - Weibull, est.", null: n_exp_est, alternative: alt_weibull, theta_null: Some(1.0), theta_ref: 1.12, theta_range: (1.0, 1.4), grid: EXP_GRID, table_matched: true },
        Row { id: "truncexp-linear-est", title: "Trunc Exp. - Linear, est.", null: n_truncexp_est, alternative: alt_linear, theta_null: Some(0.0), theta_ref: 0.9, theta_range: (0.0, 1.0), grid: UNIT, table_matched: true },
        Row { id: "exp-gamma-est", title: "Exponential - Gamma, est.", null: n_exp_est, alternative: alt_gamma, theta_null: Some(1.0), theta_ref: 1.2, theta_range: (1.0, 1.6), grid: EXP_GRID, table_matched: true },
        Row { id: "normal-cauchy-est", title: "Normal - Cauchy, est.", null: n_normal_est, alternative: alt_normal_cauchy, theta_null: Some(0.0), theta_ref: 0.025, theta_range: (0.0, 0.08), grid: NORMAL_GRID, table_matched: false },
    ]
}

#[rustfmt::skip]
fn twosample_rows() -> Vec<Row> {
    vec![
        Row { id: "uniform-linear", title: "Uniform - Linear", null: n_unif, alternative: alt_linear, theta_null: Some(0.0), theta_ref: 0.31, theta_range: (0.0, 0.5), grid: UNIT, table_matched: true },
        Row { id: "uniform-quadratic", title: "Uniform - Quadratic", null: n_unif, alternative: alt_quadratic, theta_null: Some(0.0), theta_ref: 0.24, theta_range: (0.0, 0.6), grid: UNIT, table_matched: true },
        Row { id: "uniform-bump", title: "Uniform - Uniform+Bump", null: n_unif, alternative: alt_uniform_bump, theta_null: Some(0.0), theta_ref: 0.13, theta_range: (0.0, 0.25), grid: UNIT, table_matched: false },
        Row { id: "uniform-sine", title: "Uniform - Sin Wave", null: n_unif, alternative: alt_sine, theta_null: Some(0.0), theta_ref: 0.37, theta_range: (0.0, 0.5), grid: UNIT, table_matched: false },
        Row { id: "beta22-betaaa", title: "Beta(2,2) - Beta(a,a)", null: n_beta22, alternative: alt_beta_aa, theta_null: Some(2.0), theta_ref: 2.7, theta_range: (2.0, 3.5), grid: UNIT, table_matched: true },
        Row { id: "beta22-beta2a", title: "Beta(2,2) - Beta(2,b)", null: n_beta22, alternative: alt_beta_2a, theta_null: Some(2.0), theta_ref: 2.37, theta_range: (2.0, 3.0), grid: UNIT, table_matched: true },
        Row { id: "normal-shift", title: "Normal - Shift", null: n_normal, alternative: alt_shift, theta_null: Some(0.0), theta_ref: 0.2, theta_range: (0.0, 0.4), grid: NORMAL_GRID, table_matched: true },
        Row { id: "normal-stretch", title: "Normal - Stretch", null: n_normal, alternative: alt_stretch, theta_null: Some(1.0), theta_ref: 1.17, theta_range: (1.0, 1.4), grid: NORMAL_GRID, table_matched: true },
        Row { id: "normal-t", title: "Normal - t", null: n_normal, alternative: alt_t, theta_null: None, theta_ref: 8.0, theta_range: (2.0, 30.0), grid: NORMAL_GRID, table_matched: true },
        Row { id: "normal-outlier1", title: "Normal - Outlier large", null: n_normal, alternative: alt_outlier_large, theta_null: Some(0.0), theta_ref: 0.015, theta_range: (0.0, 0.04), grid: NORMAL_GRID, table_matched: false },
        Row { id: "normal-outlier2", title: "Normal - Outlier symmetric", null: n_normal, alternative: alt_outlier_sym, theta_null: Some(0.0), theta_ref: 0.028, theta_range: (0.0, 0.05), grid: NORMAL_GRID, table_matched: false },
        Row { id: "exp-gamma", title: "Exp - Gamma", null: n_exp, alternative: alt_gamma, theta_null: Some(1.0), theta_ref: 1.16, theta_range: (1.0, 1.5), grid: EXP_GRID, table_matched: true },
        Row { id: "exp-weibull", title: "Exp - Weibull", null: n_exp, alternative: alt_weibull, theta_null: Some(1.0), theta_ref: 1.18, theta_range: (1.0, 1.4), grid: EXP_GRID, table_matched: true },
        Row { id: "exp-bump", title: "Exp - Exp+Bump", null: n_exp, alternative: alt_exp_bump, theta_null: Some(0.0), theta_ref: 0.11, theta_range: (0.0, 0.2), grid: EXP_GRID, table_matched: false },
        Row { id: "gamma-normal", title: "Gamma - Normal", null: n_gamma2, alternative: alt_gamma_normal, theta_null: Some(0.0), theta_ref: 0.22, theta_range: (0.0, 1.0), grid: (-2.0, 8.0), table_matched: false },
        Row { id: "normal-mixture", title: "Normal - Normal Mixture", null: n_normal, alternative: alt_normal_mixture, theta_null: Some(0.0), theta_ref: 0.6, theta_range: (0.0, 1.0), grid: NORMAL_GRID, table_matched: false },
        Row { id: "uniform-mixture", title: "Uniform - Mixture of Uniforms", null: n_unif, alternative: alt_uniform_mixture, theta_null: Some(0.0), theta_ref: 0.19, theta_range: (0.0, 0.3), grid: UNIT, table_matched: false },
        Row { id: "uniform-unibeta", title: "Uniform - Mix of Uniform and Beta", null: n_unif, alternative: alt_uniform_beta, theta_null: Some(0.0), theta_ref: 0.45, theta_range: (0.0, 0.8), grid: UNIT, table_matched: false },
        Row { id: "chisq-noncentral", title: "Chisquare - Noncentral Chisquare", null: n_chisq5, alternative: alt_noncentral, theta_null: Some(0.0), theta_ref: 0.5, theta_range: (0.0, 1.5), grid: (0.0, 20.0), table_matched: false },
        Row { id: "uniform-triangular", title: "Uniform - Triangular", null: n_unif, alternative: alt_triangular, theta_null: Some(0.0), theta_ref: 0.37, theta_range: (0.0, 0.6), grid: UNIT, table_matched: false },
    ]
}

fn build(problem: Problem, r: Row) -> CaseStudy {
    CaseStudy {
        id: r.id,
        problem,
        title: r.title,
        null: (r.null)(),
        alternative: r.alternative,
        theta_null: r.theta_null,
        theta_ref: r.theta_ref,
        theta_range: r.theta_range,
        grid: r.grid,
        table_matched: r.table_matched,
    }
}

/// All registered case studies, goodness-of-fit first.
pub fn all_cases() -> Vec<CaseStudy> {
    cases_for(Problem::Gof)
        .into_iter()
        .chain(cases_for(Problem::TwoSample))
        .collect()
}

pub fn cases_for(problem: Problem) -> Vec<CaseStudy> {
    let rows = match problem {
        Problem::Gof => gof_rows(),
        Problem::TwoSample => twosample_rows(),
    };
    rows.into_iter().map(|r| build(problem, r)).collect()
}

/// Looks up `gof/<id>` or `twosample/<id>`.
pub fn case_study(id: &str) -> Result<CaseStudy> {
    let (problem, name) = match id.split_once('/') {
        Some(("gof", name)) => (Problem::Gof, name),
        Some(("twosample", name)) => (Problem::TwoSample, name),
        _ => {
            return Err(Error::NotFound(format!(
                "case '{id}' (expected gof/<name> or twosample/<name>)"
            )))
        }
    };
    cases_for(problem)
        .into_iter()
        .find(|c| c.id == name)
        .ok_or_else(|| Error::NotFound(format!("case '{id}'")))
}
