//! Null-hypothesis models: distributions with cdf, quantile and sampler, plus
//! optional parameter estimators for composite nulls.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{BinLayout, ContinuousSample, DiscreteSample};
use crate::special::{beta_inc, gamma_p, ln_gamma, normal_cdf, normal_quantile};

/// Univariate continuous distributions used as nulls and as case-study
/// alternatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Dist {
    Uniform { lo: f64, hi: f64 },
    /// Density `2 s x + 1 - s` on `[0, 1]`.
    Linear { slope: f64 },
    /// Density `1 + a (12 (x - 1/2)^2 - 1)` on `[0, 1]`.
    Quadratic { a: f64 },
    /// Density `1 + amp sin(2 pi freq x)` on `[0, 1]`, integer `freq`.
    Sine { amp: f64, freq: u32 },
    Beta { a: f64, b: f64 },
    Normal { mean: f64, sd: f64 },
    StudentT { df: f64 },
    Exponential { rate: f64 },
    /// Exponential truncated to `[0, 1]`.
    TruncExp { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Cauchy { loc: f64, scale: f64 },
    /// Chi-square, noncentral when `ncp > 0`.
    ChiSquared { df: f64, ncp: f64 },
    Triangular { lo: f64, mode: f64, hi: f64 },
    TruncNormal { mean: f64, sd: f64, lo: f64, hi: f64 },
    Mixture { parts: Vec<(f64, Dist)> },
}

impl Dist {
    /// Checks parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Dist::Uniform { lo, hi } if !(lo < hi) => bad(format!("uniform needs lo < hi, got [{lo}, {hi}]")),
            Dist::Linear { slope } if !(slope.abs() <= 1.0) => {
                bad(format!("linear slope must lie in [-1, 1], got {slope}"))
            }
            Dist::Quadratic { a } if !(-0.5..=1.0).contains(a) => {
                bad(format!("quadratic coefficient must lie in [-0.5, 1], got {a}"))
            }
            Dist::Sine { amp, freq } if !(amp.abs() <= 1.0) || *freq == 0 => {
                bad(format!("sine needs |amp| <= 1 and freq >= 1, got {amp}, {freq}"))
            }
            Dist::Beta { a, b } if !(*a > 0.0 && *b > 0.0) => bad(format!("beta({a}, {b})")),
            Dist::Normal { sd, .. } if !(*sd > 0.0) => bad(format!("normal sd must be positive, got {sd}")),
            Dist::StudentT { df } if !(*df > 0.0) => bad(format!("t df must be positive, got {df}")),
            Dist::Exponential { rate } if !(*rate > 0.0) => bad(format!("exponential rate {rate}")),
            Dist::TruncExp { rate } if !rate.is_finite() => bad(format!("truncated exponential rate {rate}")),
            Dist::Gamma { shape, rate } if !(*shape > 0.0 && *rate > 0.0) => {
                bad(format!("gamma({shape}, {rate})"))
            }
            Dist::Weibull { shape, scale } if !(*shape > 0.0 && *scale > 0.0) => {
                bad(format!("weibull({shape}, {scale})"))
            }
            Dist::Cauchy { scale, .. } if !(*scale > 0.0) => bad(format!("cauchy scale {scale}")),
            Dist::ChiSquared { df, ncp } if !(*df >= 1.0 && *ncp >= 0.0) => {
                bad(format!("chi-square df {df}, ncp {ncp}"))
            }
            Dist::Triangular { lo, mode, hi } if !(lo <= mode && mode <= hi && lo < hi) => {
                bad(format!("triangular({lo}, {mode}, {hi})"))
            }
            Dist::TruncNormal { sd, lo, hi, .. } if !(*sd > 0.0 && lo < hi) => {
                bad("truncated normal needs sd > 0 and lo < hi".into())
            }
            Dist::Mixture { parts } => {
                if parts.is_empty() || parts.iter().any(|(w, _)| !(*w >= 0.0)) {
                    return bad("mixture weights must be nonnegative".into());
                }
                let total: f64 = parts.iter().map(|(w, _)| w).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("mixture weights sum to {total}"));
                }
                parts.iter().try_for_each(|(_, d)| d.validate())
            }
            _ => Ok(()),
        }
    }

    /// Support interval (possibly infinite).
    pub fn support(&self) -> (f64, f64) {
        const INF: f64 = f64::INFINITY;
        const NINF: f64 = f64::NEG_INFINITY;
        match self {
            Dist::Uniform { lo, hi } => (*lo, *hi),
            Dist::Linear { .. }
            | Dist::Quadratic { .. }
            | Dist::Sine { .. }
            | Dist::Beta { .. }
            | Dist::TruncExp { .. } => (0.0, 1.0),
            Dist::Normal { .. } | Dist::StudentT { .. } | Dist::Cauchy { .. } => (NINF, INF),
            Dist::Exponential { .. }
            | Dist::Gamma { .. }
            | Dist::Weibull { .. }
            | Dist::ChiSquared { .. } => (0.0, INF),
            Dist::Triangular { lo, hi, .. } | Dist::TruncNormal { lo, hi, .. } => (*lo, *hi),
            Dist::Mixture { parts } => parts.iter().fold((INF, NINF), |(a, b), (_, d)| {
                let (lo, hi) = d.support();
                (a.min(lo), b.max(hi))
            }),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match *self {
            Dist::Uniform { lo, hi } => (x - lo) / (hi - lo),
            Dist::Linear { slope } => slope * x * x + (1.0 - slope) * x,
            Dist::Quadratic { a } => {
                let c = x - 0.5;
                x + a * (4.0 * c * c * c + 0.5 - x)
            }
            Dist::Sine { amp, freq } => {
                let w = 2.0 * PI * freq as f64;
                x + amp * (1.0 - (w * x).cos()) / w
            }
            Dist::Beta { a, b } => beta_inc(a, b, x),
            Dist::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Dist::StudentT { df } => {
                let tail = 0.5 * beta_inc(0.5 * df, 0.5, df / (df + x * x));
                if x > 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
            Dist::Exponential { rate } => -(-rate * x).exp_m1(),
            Dist::TruncExp { rate } => {
                if rate.abs() < 1e-10 {
                    x
                } else {
                    (-rate * x).exp_m1() / (-rate).exp_m1()
                }
            }
            Dist::Gamma { shape, rate } => gamma_p(shape, rate * x),
            Dist::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Dist::Cauchy { loc, scale } => 0.5 + ((x - loc) / scale).atan() / PI,
            Dist::ChiSquared { df, ncp } => chisq_cdf_noncentral(x, df, ncp),
            Dist::Triangular { lo, mode, hi } => {
                if x <= mode {
                    (x - lo) * (x - lo) / ((hi - lo) * (mode - lo))
                } else {
                    1.0 - (hi - x) * (hi - x) / ((hi - lo) * (hi - mode))
                }
            }
            Dist::TruncNormal { mean, sd, lo, hi } => {
                let a = normal_cdf((lo - mean) / sd);
                let b = normal_cdf((hi - mean) / sd);
                (normal_cdf((x - mean) / sd) - a) / (b - a)
            }
            Dist::Mixture { ref parts } => parts.iter().map(|(w, d)| w * d.cdf(x)).sum(),
        }
    }

    /// Inverse cdf on `(0, 1)`; closed form where available, bisection otherwise.
    pub fn quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.support();
        if p <= 0.0 {
            return lo;
        }
        if p >= 1.0 {
            return hi;
        }
        match *self {
            Dist::Uniform { lo, hi } => lo + p * (hi - lo),
            Dist::Linear { slope } => {
                let b = 1.0 - slope;
                2.0 * p / (b + (b * b + 4.0 * slope * p).sqrt())
            }
            Dist::Normal { mean, sd } => mean + sd * normal_quantile(p),
            Dist::Exponential { rate } => -(-p).ln_1p() / rate,
            Dist::TruncExp { rate } => {
                if rate.abs() < 1e-10 {
                    p
                } else {
                    -(p * (-rate).exp_m1()).ln_1p() / rate
                }
            }
            Dist::Weibull { shape, scale } => scale * (-(-p).ln_1p()).powf(1.0 / shape),
            Dist::Cauchy { loc, scale } => loc + scale * (PI * (p - 0.5)).tan(),
            Dist::Triangular { lo, mode, hi } => {
                let pm = (mode - lo) / (hi - lo);
                if p <= pm {
                    lo + (p * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - p) * (hi - lo) * (hi - mode)).sqrt()
                }
            }
            Dist::TruncNormal { mean, sd, lo, hi } => {
                let a = normal_cdf((lo - mean) / sd);
                let b = normal_cdf((hi - mean) / sd);
                (mean + sd * normal_quantile(a + p * (b - a))).clamp(lo, hi)
            }
            _ => self.quantile_bisect(p),
        }
    }

    fn quantile_bisect(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        if !lo.is_finite() {
            lo = -1.0;
            while self.cdf(lo) > p {
                lo *= 2.0;
            }
        }
        if !hi.is_finite() {
            hi = 1.0;
            while self.cdf(hi) < p {
                hi *= 2.0;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// One random draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Dist::Normal { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            Dist::Exponential { rate } => rng.sample::<f64, _>(rand_distr::Exp1) / rate,
            Dist::Beta { a, b } => rand_distr::Beta::new(a, b).expect("validated").sample(rng),
            Dist::StudentT { df } => rand_distr::StudentT::new(df).expect("validated").sample(rng),
            Dist::Gamma { shape, rate } => {
                rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated").sample(rng)
            }
            Dist::ChiSquared { df, ncp } => {
                let central = if ncp > 0.0 { df - 1.0 } else { df };
                let mut x = if central > 0.0 {
                    rand_distr::Gamma::new(0.5 * central, 2.0).expect("validated").sample(rng)
                } else {
                    0.0
                };
                if ncp > 0.0 {
                    let z: f64 = rng.sample::<f64, _>(StandardNormal) + ncp.sqrt();
                    x += z * z;
                }
                x
            }
            Dist::Quadratic { a } => {
                let top = (1.0 - a).max(1.0 + 2.0 * a);
                let dens = |x: f64| 1.0 + a * (12.0 * (x - 0.5) * (x - 0.5) - 1.0);
                rejection(rng, top, dens)
            }
            Dist::Sine { amp, freq } => {
                let w = 2.0 * PI * freq as f64;
                rejection(rng, 1.0 + amp.abs(), |x| 1.0 + amp * (w * x).sin())
            }
            Dist::Mixture { ref parts } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, d) in parts {
                    acc += w;
                    if u < acc {
                        return d.draw(rng);
                    }
                }
                parts.last().expect("validated").1.draw(rng)
            }
            _ => {
                // open interval keeps the quantile finite
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                self.quantile(u)
            }
        }
    }

    /// `n` independent draws (unsorted).
    pub fn draw_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

fn rejection<R: Rng + ?Sized>(rng: &mut R, top: f64, dens: impl Fn(f64) -> f64) -> f64 {
    loop {
        let x: f64 = rng.random();
        if rng.random::<f64>() * top <= dens(x) {
            return x;
        }
    }
}

fn chisq_cdf_noncentral(x: f64, df: f64, ncp: f64) -> f64 {
    if ncp <= 0.0 {
        return gamma_p(0.5 * df, 0.5 * x);
    }
    // Poisson mixture of central chi-squares, summed outward from the mode.
    let lam = 0.5 * ncp;
    let weight = |j: f64| (-lam + j * lam.ln() - ln_gamma(j + 1.0)).exp();
    let mode = lam.floor();
    let mut total = 0.0;
    let mut j = mode;
    loop {
        let w = weight(j);
        total += w * gamma_p(0.5 * df + j, 0.5 * x);
        if w < 1e-17 && j > mode {
            break;
        }
        j += 1.0;
    }
    let mut j = mode - 1.0;
    while j >= 0.0 {
        let w = weight(j);
        total += w * gamma_p(0.5 * df + j, 0.5 * x);
        if w < 1e-17 {
            break;
        }
        j -= 1.0;
    }
    total.clamp(0.0, 1.0)
}

/// Parameter estimators ("phat") for composite null hypotheses. All are
/// moment based; for the normal, exponential and truncated exponential
/// families they coincide with maximum likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// (mean, sd) with the `n - 1` divisor.
    Normal,
    /// rate = 1 / mean.
    Exponential,
    /// rate solving `mean = 1/rate - 1/(e^rate - 1)`.
    TruncExp,
    /// shape = mean^2 / var, rate = mean / var.
    Gamma,
    /// shape from the coefficient of variation, scale = mean / Gamma(1 + 1/shape).
    Weibull,
    /// slope = 6 (mean - 1/2), clamped to [-1, 1].
    Linear,
}

impl Estimator {
    pub fn param_count(self) -> usize {
        match self {
            Estimator::Normal | Estimator::Gamma | Estimator::Weibull => 2,
            Estimator::Exponential | Estimator::TruncExp | Estimator::Linear => 1,
        }
    }

    /// Distribution for a parameter vector, `None` if the parameters are invalid.
    pub fn build(self, p: &[f64]) -> Option<Dist> {
        let d = match self {
            Estimator::Normal => Dist::Normal { mean: p[0], sd: p[1] },
            Estimator::Exponential => Dist::Exponential { rate: p[0] },
            Estimator::TruncExp => Dist::TruncExp { rate: p[0] },
            Estimator::Gamma => Dist::Gamma { shape: p[0], rate: p[1] },
            Estimator::Weibull => Dist::Weibull { shape: p[0], scale: p[1] },
            Estimator::Linear => Dist::Linear { slope: p[0] },
        };
        d.validate().ok().map(|_| d)
    }

    /// Parameter vector of a distribution of this estimator's family.
    pub fn params_of(self, d: &Dist) -> Option<Vec<f64>> {
        match (self, d) {
            (Estimator::Normal, Dist::Normal { mean, sd }) => Some(vec![*mean, *sd]),
            (Estimator::Exponential, Dist::Exponential { rate }) => Some(vec![*rate]),
            (Estimator::TruncExp, Dist::TruncExp { rate }) => Some(vec![*rate]),
            (Estimator::Gamma, Dist::Gamma { shape, rate }) => Some(vec![*shape, *rate]),
            (Estimator::Weibull, Dist::Weibull { shape, scale }) => Some(vec![*shape, *scale]),
            (Estimator::Linear, Dist::Linear { slope }) => Some(vec![*slope]),
            _ => None,
        }
    }

    /// Estimates parameters from weighted observations.
    pub fn estimate(self, values: &[f64], weights: Option<&[f64]>) -> Result<Vec<f64>> {
        let (mean, var) = weighted_moments(values, weights)?;
        let fail = |msg: &str| Err(Error::EstimationFailure(msg.to_string()));
        match self {
            Estimator::Normal => {
                if !(var > 0.0) {
                    return fail("zero variance");
                }
                Ok(vec![mean, var.sqrt()])
            }
            Estimator::Exponential => {
                if !(mean > 0.0) {
                    return fail("nonpositive mean");
                }
                Ok(vec![1.0 / mean])
            }
            Estimator::TruncExp => {
                if !(mean > 0.0 && mean < 1.0) {
                    return fail("mean outside (0, 1)");
                }
                Ok(vec![truncexp_rate_for_mean(mean)])
            }
            Estimator::Gamma => {
                if !(mean > 0.0 && var > 0.0) {
                    return fail("need positive mean and variance");
                }
                Ok(vec![mean * mean / var, mean / var])
            }
            Estimator::Weibull => {
                if !(mean > 0.0 && var > 0.0) {
                    return fail("need positive mean and variance");
                }
                let cv2 = var / (mean * mean);
                let shape = weibull_shape_for_cv2(cv2);
                let scale = mean / ln_gamma(1.0 + 1.0 / shape).exp();
                Ok(vec![shape, scale])
            }
            Estimator::Linear => {
                if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                    return fail("data outside [0, 1]");
                }
                Ok(vec![(6.0 * (mean - 0.5)).clamp(-1.0, 1.0)])
            }
        }
    }
}

fn weighted_moments(values: &[f64], weights: Option<&[f64]>) -> Result<(f64, f64)> {
    let (sw, sx) = match weights {
        Some(w) => (
            w.iter().sum::<f64>(),
            values.iter().zip(w).map(|(x, w)| x * w).sum::<f64>(),
        ),
        None => (values.len() as f64, values.iter().sum::<f64>()),
    };
    if !(sw > 1.0) {
        return Err(Error::EstimationFailure(
            "need at least two observations".into(),
        ));
    }
    let mean = sx / sw;
    let ss = match weights {
        Some(w) => values
            .iter()
            .zip(w)
            .map(|(x, w)| w * (x - mean) * (x - mean))
            .sum::<f64>(),
        None => values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>(),
    };
    Ok((mean, ss / (sw - 1.0)))
}

fn truncexp_mean(rate: f64) -> f64 {
    if rate.abs() < 1e-6 {
        0.5 - rate / 12.0
    } else {
        1.0 / rate - 1.0 / rate.exp_m1()
    }
}

fn truncexp_rate_for_mean(mean: f64) -> f64 {
    // the mean is decreasing in the rate
    let (mut lo, mut hi) = (-700.0, 700.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncexp_mean(mid) > mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn weibull_shape_for_cv2(cv2: f64) -> f64 {
    let cv2_of = |k: f64| (ln_gamma(1.0 + 2.0 / k) - 2.0 * ln_gamma(1.0 + 1.0 / k)).exp() - 1.0;
    // cv2 is decreasing in the shape
    let (mut lo, mut hi) = (0.05f64, 500.0f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if cv2_of(mid) > cv2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Null hypothesis for goodness-of-fit testing of continuous data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    dist: Dist,
    estimator: Option<Estimator>,
}

impl NullModel {
    /// Fully specified null.
    pub fn fixed(dist: Dist) -> Result<Self> {
        dist.validate()?;
        Ok(Self {
            dist,
            estimator: None,
        })
    }

    /// Composite null; `dist` holds the current parameter values and is
    /// replaced by [`fit`](Self::fit).
    pub fn estimated(dist: Dist, estimator: Estimator) -> Result<Self> {
        dist.validate()?;
        if estimator.params_of(&dist).is_none() {
            return Err(Error::InvalidParameter(format!(
                "{estimator:?} estimator does not match the {dist:?} family"
            )));
        }
        Ok(Self {
            dist,
            estimator: Some(estimator),
        })
    }

    pub fn dist(&self) -> &Dist {
        &self.dist
    }

    pub fn estimator(&self) -> Option<Estimator> {
        self.estimator
    }

    /// Number of parameters estimated from the data.
    pub fn param_count(&self) -> usize {
        self.estimator.map_or(0, Estimator::param_count)
    }

    pub fn params(&self) -> Vec<f64> {
        self.estimator
            .and_then(|e| e.params_of(&self.dist))
            .unwrap_or_default()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.dist.cdf(x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.dist.quantile(p)
    }

    pub fn support(&self) -> (f64, f64) {
        self.dist.support()
    }

    /// Sorted sample of size `n`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> ContinuousSample {
        let mut v = self.dist.draw_n(n, rng);
        v.sort_unstable_by(f64::total_cmp);
        ContinuousSample::from_sorted_unchecked(v)
    }

    /// Same family with parameters replaced.
    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        let est = self
            .estimator
            .ok_or_else(|| Error::InvalidParameter("model has no free parameters".into()))?;
        let dist = est.build(params).ok_or_else(|| {
            Error::InvalidParameter(format!("invalid parameters {params:?} for {est:?}"))
        })?;
        Ok(Self {
            dist,
            estimator: self.estimator,
        })
    }

    /// Parameters estimated from the data (empty for a fully specified null).
    pub fn estimate_params(&self, data: &ContinuousSample) -> Result<Vec<f64>> {
        match self.estimator {
            Some(e) => e.estimate(data.values(), None),
            None => Ok(Vec::new()),
        }
    }

    /// The null with parameters fitted to `data`; a fully specified null is returned as is.
    pub fn fit(&self, data: &ContinuousSample) -> Result<Self> {
        match self.estimator {
            Some(e) => self.with_params(&e.estimate(data.values(), None)?),
            None => Ok(self.clone()),
        }
    }

    pub(crate) fn fit_weighted(&self, points: &[f64], weights: &[f64]) -> Result<Self> {
        match self.estimator {
            Some(e) => self.with_params(&e.estimate(points, Some(weights))?),
            None => Ok(self.clone()),
        }
    }
}

/// Estimates the parameters of `model` from continuous data.
pub fn estimate_params(model: &NullModel, data: &ContinuousSample) -> Result<Vec<f64>> {
    if model.estimator.is_none() {
        return Err(Error::InvalidParameter("model has no estimator".into()));
    }
    model.estimate_params(data)
}

/// `f(x) = 2 s x + 1 - s` on `[0, 1]` as a fully specified null.
pub fn linear_model(slope: f64) -> Result<NullModel> {
    NullModel::fixed(Dist::Linear { slope })
}

/// Null for histogram data: a continuous model evaluated at the right edge of
/// each class, with the last class absorbing the upper tail.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNull {
    model: NullModel,
    support: Vec<f64>,
    /// Representative points of the classes, used for parameter estimation.
    points: Vec<f64>,
    cdf: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteNull {
    /// Classes are the bins of `layout`; support = right edges, estimation uses midpoints.
    pub fn from_layout(model: NullModel, layout: &BinLayout) -> Result<Self> {
        Self::build(model, layout.edges()[1..].to_vec(), layout.midpoints())
    }

    /// Classes are the given support values (for data that is discrete by nature).
    pub fn on_support(model: NullModel, support: Vec<f64>) -> Result<Self> {
        let points = support.clone();
        Self::build(model, support, points)
    }

    fn build(model: NullModel, support: Vec<f64>, points: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "support must be nonempty and strictly increasing".into(),
            ));
        }
        let k = support.len();
        let mut cdf: Vec<f64> = support.iter().map(|&v| model.cdf(v)).collect();
        if cdf.iter().any(|c| !(0.0..=1.0).contains(c)) || cdf.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::ModelError(
                "model cdf is not a nondecreasing function into [0, 1]".into(),
            ));
        }
        cdf[k - 1] = 1.0;
        let mut prev = 0.0;
        let probs = cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect();
        Ok(Self {
            model,
            support,
            points,
            cdf,
            probs,
        })
    }

    pub fn model(&self) -> &NullModel {
        &self.model
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Model cdf `F(v_1), ..., F(v_k)` with `F(v_k) = 1`.
    pub fn cdf_at_support(&self) -> &[f64] {
        &self.cdf
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn param_count(&self) -> usize {
        self.model.param_count()
    }

    /// Multinomial sample of total size `n`.
    pub fn sample<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> DiscreteSample {
        let mut counts = vec![0u64; self.probs.len()];
        let mut left = n;
        let mut mass = 1.0;
        for (c, &p) in counts.iter_mut().zip(&self.probs) {
            if left == 0 {
                break;
            }
            let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
            let draw = if q >= 1.0 {
                left
            } else if q <= 0.0 {
                0
            } else {
                Binomial::new(left, q).expect("probability in range").sample(rng)
            };
            *c = draw;
            left -= draw;
            mass -= p;
        }
        if left > 0 {
            *counts.last_mut().expect("nonempty") += left;
        }
        DiscreteSample::from_parts_unchecked(self.support.clone(), counts)
    }

    /// Refits the continuous model to histogram data.
    pub fn fit(&self, data: &DiscreteSample) -> Result<Self> {
        if self.model.estimator.is_none() {
            return Ok(self.clone());
        }
        if data.support() != self.support.as_slice() {
            return Err(Error::SupportMismatch);
        }
        let w: Vec<f64> = data.counts().iter().map(|&c| c as f64).collect();
        let model = self.model.fit_weighted(&self.points, &w)?;
        Self::build(model, self.support.clone(), self.points.clone())
    }

    /// Same classes with model parameters replaced.
    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        let model = self.model.with_params(params)?;
        Self::build(model, self.support.clone(), self.points.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn all_dists() -> Vec<Dist> {
        vec![
            Dist::Uniform { lo: -1.0, hi: 3.0 },
            Dist::Linear { slope: 0.0 },
            Dist::Linear { slope: 1.0 },
            Dist::Linear { slope: -0.7 },
            Dist::Quadratic { a: 0.6 },
            Dist::Quadratic { a: -0.4 },
            Dist::Sine { amp: 0.5, freq: 2 },
            Dist::Beta { a: 2.0, b: 2.0 },
            Dist::Beta { a: 2.0, b: 3.5 },
            Dist::Normal { mean: 1.0, sd: 2.0 },
            Dist::StudentT { df: 3.0 },
            Dist::Exponential { rate: 2.0 },
            Dist::TruncExp { rate: 1.0 },
            Dist::TruncExp { rate: -2.0 },
            Dist::Gamma { shape: 2.5, rate: 1.5 },
            Dist::Weibull { shape: 1.5, scale: 2.0 },
            Dist::Cauchy { loc: 0.0, scale: 1.0 },
            Dist::ChiSquared { df: 5.0, ncp: 0.0 },
            Dist::ChiSquared { df: 5.0, ncp: 3.0 },
            Dist::Triangular { lo: 0.0, mode: 0.3, hi: 1.0 },
            Dist::TruncNormal { mean: 0.5, sd: 0.05, lo: 0.0, hi: 1.0 },
            Dist::Mixture {
                parts: vec![
                    (0.7, Dist::Uniform { lo: 0.0, hi: 1.0 }),
                    (0.3, Dist::TruncNormal { mean: 0.5, sd: 0.05, lo: 0.0, hi: 1.0 }),
                ],
            },
        ]
    }

    #[test]
    fn linear_model_examples() {
        assert_eq!(linear_model(0.0).unwrap().cdf(0.5), 0.5);
        assert!((linear_model(1.0).unwrap().cdf(0.5) - 0.25).abs() < 1e-15);
        assert_eq!(linear_model(0.5).unwrap().cdf(1.0), 1.0);
        assert!(matches!(linear_model(1.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cdf_quantile_roundtrip() {
        for d in all_dists() {
            d.validate().unwrap();
            let mut prev = 0.0;
            for i in 1..1000 {
                let p = 0.001 * i as f64;
                let x = d.quantile(p);
                let c = d.cdf(x);
                assert!((c - p).abs() < 1e-8, "{d:?}: p={p} cdf(q)={c}");
                assert!(c >= prev - 1e-12);
                prev = c;
            }
        }
    }

    // One-sample KS distance between draws and the model cdf; 1.95/sqrt(n) is
    // the 0.001 critical value.
    #[test]
    fn samplers_agree_with_cdfs() {
        let n = 100_000;
        for (i, d) in all_dists().into_iter().enumerate() {
            let mut rng = stream(99, &[i as u64]);
            let mut v = d.draw_n(n, &mut rng);
            v.sort_by(f64::total_cmp);
            let mut dmax = 0.0f64;
            for (j, &x) in v.iter().enumerate() {
                let f = d.cdf(x);
                dmax = dmax
                    .max((j + 1) as f64 / n as f64 - f)
                    .max(f - j as f64 / n as f64);
            }
            assert!(dmax < 1.95 / (n as f64).sqrt(), "{d:?}: D = {dmax}");
        }
    }

    #[test]
    fn estimator_examples() {
        let p = Estimator::Normal.estimate(&[-1.0, 0.0, 1.0], None).unwrap();
        assert!((p[0]).abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        let p = Estimator::Exponential.estimate(&[2.0, 2.0, 2.0], None).unwrap();
        assert_eq!(p, vec![0.5]);
        assert!(matches!(
            Estimator::Normal.estimate(&[5.0, 5.0, 5.0], None),
            Err(Error::EstimationFailure(_))
        ));
        let model = NullModel::fixed(Dist::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
        let data = ContinuousSample::new(vec![0.1, 0.2]).unwrap();
        assert!(estimate_params(&model, &data).is_err());
    }

    #[test]
    fn estimators_recover_parameters() {
        let mut rng = stream(5, &[]);
        let cases = [
            (Estimator::Normal, Dist::Normal { mean: 2.0, sd: 3.0 }),
            (Estimator::Exponential, Dist::Exponential { rate: 0.5 }),
            (Estimator::TruncExp, Dist::TruncExp { rate: 2.0 }),
            (Estimator::Gamma, Dist::Gamma { shape: 3.0, rate: 2.0 }),
            (Estimator::Weibull, Dist::Weibull { shape: 2.0, scale: 1.5 }),
            (Estimator::Linear, Dist::Linear { slope: 0.4 }),
        ];
        for (e, d) in cases {
            let v = d.draw_n(200_000, &mut rng);
            let got = e.estimate(&v, None).unwrap();
            let want = e.params_of(&d).unwrap();
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 0.03 * w.abs().max(1.0), "{e:?}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn discrete_null_probabilities() {
        let model = NullModel::fixed(Dist::Normal { mean: 0.0, sd: 1.0 }).unwrap();
        let layout = BinLayout::equal_width(-2.0, 2.0, 4).unwrap();
        let dn = DiscreteNull::from_layout(model, &layout).unwrap();
        assert_eq!(dn.support(), &[-1.0, 0.0, 1.0, 2.0]);
        let c = dn.cdf_at_support();
        assert!((c[1] - 0.5).abs() < 1e-15);
        assert_eq!(c[3], 1.0);
        assert!((dn.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let mut rng = stream(1, &[]);
        let s = dn.sample(1000, &mut rng);
        assert_eq!(s.n(), 1000);
        let bad = NullModel::fixed(Dist::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
        assert!(DiscreteNull::on_support(bad, vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn estimated_null_requires_matching_family() {
        assert!(NullModel::estimated(Dist::Normal { mean: 0.0, sd: 1.0 }, Estimator::Exponential).is_err());
        let m = NullModel::estimated(Dist::Normal { mean: 0.0, sd: 1.0 }, Estimator::Normal).unwrap();
        assert_eq!(m.param_count(), 2);
        let data = ContinuousSample::new(vec![1.0, 2.0, 3.0]).unwrap();
        let fitted = m.fit(&data).unwrap();
        assert_eq!(fitted.params(), vec![2.0, 1.0]);
    }
}
