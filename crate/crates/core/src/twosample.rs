//! Two-sample statistics for continuous and histogram data.
//!
//! All EDF and rank statistics are computed from the pooled data reduced to
//! distinct values with per-value counts, so the permutation engine only has
//! to redraw how many x observations fall on each value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chisq::{join_groups, sum_groups, ChiSqOutcome, LARGE_BINS, MIN_BIN_COUNT, SMALL_BINS};
use crate::error::{Error, Result};
use crate::sample::{BinScheme, ContinuousSample, DiscreteSample, Origin, PooledSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwoSampleMethod {
    Ks,
    Kuiper,
    Cvm,
    Ad,
    Lr,
    Za,
    Zk,
    Zc,
    Wassp1,
    ChiSq { scheme: BinScheme, bins: usize },
}

impl TwoSampleMethod {
    /// All methods for continuous data, in table order.
    pub fn continuous_all() -> Vec<TwoSampleMethod> {
        use TwoSampleMethod::*;
        let mut v = vec![Ks, Kuiper, Cvm, Ad, Lr, Za, Zk, Zc, Wassp1];
        for scheme in [BinScheme::EqualSize, BinScheme::EqualProb] {
            for bins in [LARGE_BINS, SMALL_BINS] {
                v.push(ChiSq { scheme, bins });
            }
        }
        v
    }

    /// All methods for histogram data, in table order.
    pub fn discrete_all() -> Vec<TwoSampleMethod> {
        use TwoSampleMethod::*;
        let mut v = vec![Ks, Kuiper, Cvm, Ad, Lr, Za, Wassp1];
        for bins in [LARGE_BINS, SMALL_BINS] {
            v.push(ChiSq {
                scheme: BinScheme::EqualSize,
                bins,
            });
        }
        v
    }

    pub fn is_chisq(&self) -> bool {
        matches!(self, TwoSampleMethod::ChiSq { .. })
    }

    pub fn supports_discrete(&self) -> bool {
        !matches!(self, TwoSampleMethod::Zk | TwoSampleMethod::Zc)
    }

    /// Direction of the test: ZA and ZC reject for small values.
    pub fn rejects_large(&self) -> bool {
        !matches!(self, TwoSampleMethod::Za | TwoSampleMethod::Zc)
    }

    fn size_label(bins: usize) -> String {
        match bins {
            LARGE_BINS => "large".into(),
            SMALL_BINS => "small".into(),
            b => b.to_string(),
        }
    }

    pub fn label(&self) -> String {
        use TwoSampleMethod::*;
        match self {
            Ks => "KS".into(),
            Kuiper => "Kuiper".into(),
            Cvm => "CvM".into(),
            Ad => "AD".into(),
            Lr => "LR".into(),
            Za => "ZA".into(),
            Zk => "ZK".into(),
            Zc => "ZC".into(),
            Wassp1 => "Wassp1".into(),
            ChiSq { scheme, bins } => format!("{}-{}", scheme.label(), Self::size_label(*bins)),
        }
    }

    /// Display name for histogram data (the bins are the data classes).
    pub fn label_discrete(&self) -> String {
        match self {
            TwoSampleMethod::ChiSq { bins, .. } => Self::size_label(*bins),
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

impl fmt::Display for TwoSampleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for TwoSampleMethod {
    type Err = Error;

    /// Accepts `ks`, `kuiper`, `es-large`, `ep-small`, `ep-12`, and the
    /// histogram forms `large`, `small`, `12`, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        use TwoSampleMethod::*;
        let lower = s.trim().to_ascii_lowercase();
        let simple = match lower.as_str() {
            "ks" => Some(Ks),
            "k" | "kuiper" => Some(Kuiper),
            "cvm" => Some(Cvm),
            "ad" => Some(Ad),
            "lr" => Some(Lr),
            "za" => Some(Za),
            "zk" => Some(Zk),
            "zc" => Some(Zc),
            "wassp1" | "wasserstein" => Some(Wassp1),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        let size = |t: &str| match t {
            "large" | "l" => Some(LARGE_BINS),
            "small" | "s" => Some(SMALL_BINS),
            t => t.parse().ok().filter(|&b: &usize| b >= 2),
        };
        let parsed = match lower.split_once('-') {
            Some(("es", t)) => size(t).map(|bins| (BinScheme::EqualSize, bins)),
            Some(("ep", t)) => size(t).map(|bins| (BinScheme::EqualProb, bins)),
            Some(_) => None,
            None => size(&lower).map(|bins| (BinScheme::EqualSize, bins)),
        };
        parsed
            .map(|(scheme, bins)| ChiSq { scheme, bins })
            .ok_or_else(|| Error::UnsupportedMethod(format!("unknown two-sample method '{s}'")))
    }
}

/// Pooled data reduced to distinct values with precomputed weights.
#[derive(Debug, Clone)]
pub struct TsContext {
    values: Vec<f64>,
    /// Number of pooled observations at each value.
    sizes: Vec<u64>,
    /// Observed number of x observations at each value.
    x_counts: Vec<u64>,
    /// First pooled position (0-based) of each value.
    starts: Vec<usize>,
    n: usize,
    m: usize,
    discrete: bool,
    ad_w: Vec<f64>,
    za_w: Vec<f64>,
    ln_t: Vec<f64>,
    ln_1mt: Vec<f64>,
    /// `ln(N/(R - ½) - 1)` per pooled position R.
    zc_pos: Vec<f64>,
    zc_x: Vec<f64>,
    zc_y: Vec<f64>,
    ent_x: Vec<f64>,
    ent_y: Vec<f64>,
}

/// `p ln p + (1 - p) ln(1 - p)` for p = c/size, c = 0..=size.
fn entropy_table(size: usize) -> Vec<f64> {
    let s = size as f64;
    (0..=size)
        .map(|c| {
            let p = c as f64 / s;
            let a = if p > 0.0 { p * p.ln() } else { 0.0 };
            let b = if p < 1.0 { (1.0 - p) * (1.0 - p).ln() } else { 0.0 };
            a + b
        })
        .collect()
}

impl TsContext {
    fn build(values: Vec<f64>, sizes: Vec<u64>, x_counts: Vec<u64>, discrete: bool) -> Result<Self> {
        let n = x_counts.iter().sum::<u64>() as usize;
        let total = sizes.iter().sum::<u64>() as usize;
        let m = total - n;
        if n == 0 || m == 0 {
            return Err(Error::InsufficientData("both samples must be nonempty".into()));
        }
        let nn = total as f64;
        let mut starts = Vec::with_capacity(sizes.len());
        let mut ad_w = Vec::with_capacity(sizes.len());
        let mut za_w = Vec::with_capacity(sizes.len());
        let mut pos = 0usize;
        for &s in &sizes {
            starts.push(pos);
            let (mut a, mut z) = (0.0, 0.0);
            for j in pos + 1..=pos + s as usize {
                let j = j as f64;
                a += 1.0 / (j * (nn + 1.0 - j));
                z += 1.0 / ((j - 0.5) * (nn - j + 0.5));
            }
            ad_w.push(a);
            za_w.push(z);
            pos += s as usize;
        }
        let t: Vec<f64> = (1..=total).map(|i| (i as f64 - 0.5) / nn).collect();
        let zc_side = |k: usize| -> Vec<f64> {
            (1..=k)
                .map(|i| (k as f64 / (i as f64 - 0.5) - 1.0).ln())
                .collect()
        };
        Ok(Self {
            ln_t: t.iter().map(|t| t.ln()).collect(),
            ln_1mt: t.iter().map(|t| (-t).ln_1p()).collect(),
            zc_pos: (1..=total)
                .map(|r| (nn / (r as f64 - 0.5) - 1.0).ln())
                .collect(),
            zc_x: zc_side(n),
            zc_y: zc_side(m),
            ent_x: entropy_table(n),
            ent_y: entropy_table(m),
            values,
            sizes,
            x_counts,
            starts,
            n,
            m,
            discrete,
            ad_w,
            za_w,
        })
    }

    /// Context for continuous data (ties are grouped by value).
    pub fn continuous(pooled: &PooledSample) -> Result<Self> {
        let z = pooled.z();
        let flags = pooled.flags();
        let mut values = Vec::new();
        let mut sizes = Vec::new();
        let mut xc = Vec::new();
        let mut i = 0;
        while i < z.len() {
            let mut j = i;
            let mut cx = 0;
            while j < z.len() && z[j] == z[i] {
                if flags[j] == Origin::X {
                    cx += 1;
                }
                j += 1;
            }
            values.push(z[i]);
            sizes.push((j - i) as u64);
            xc.push(cx);
            i = j;
        }
        Self::build(values, sizes, xc, false)
    }

    /// Context for two histograms on a common support.
    pub fn discrete(x: &DiscreteSample, y: &DiscreteSample) -> Result<Self> {
        if !x.same_support(y) {
            return Err(Error::SupportMismatch);
        }
        let sizes: Vec<u64> = x.counts().iter().zip(y.counts()).map(|(a, b)| a + b).collect();
        Self::build(x.support().to_vec(), sizes, x.counts().to_vec(), true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_discrete(&self) -> bool {
        self.discrete
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pooled count at each distinct value.
    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Observed x count at each distinct value.
    pub fn x_counts(&self) -> &[u64] {
        &self.x_counts
    }

    /// Number of distinct values.
    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// Statistics for the observed labelling.
    pub fn observed(&self, methods: &[TwoSampleMethod]) -> Result<Vec<f64>> {
        self.statistics(methods, &self.x_counts)
    }

    /// Statistics when `x_counts[g]` of the pooled observations at value g are x.
    /// Chi-square methods are not handled here.
    pub fn statistics(&self, methods: &[TwoSampleMethod], x_counts: &[u64]) -> Result<Vec<f64>> {
        let (nf, mf) = (self.n as f64, self.m as f64);
        let nn = nf + mf;
        let k = self.k();
        let mut cx = 0u64;
        let mut cy = 0u64;
        let mut fx = Vec::with_capacity(k);
        let mut gy = Vec::with_capacity(k);
        for g in 0..k {
            cx += x_counts[g];
            cy += self.sizes[g] - x_counts[g];
            fx.push(cx);
            gy.push(cy);
        }
        let diff = |g: usize| fx[g] as f64 / nf - gy[g] as f64 / mf;
        methods
            .iter()
            .map(|&method| {
                if self.discrete && !method.supports_discrete() {
                    return Err(Error::UnsupportedMethod(format!(
                        "{} has no version for discrete data",
                        method.label()
                    )));
                }
                Ok(match method {
                    TwoSampleMethod::Ks => (0..k).map(|g| diff(g).abs()).fold(0.0, f64::max),
                    TwoSampleMethod::Kuiper => {
                        let (mut hi, mut lo) = (0.0f64, 0.0f64);
                        for g in 0..k {
                            let d = diff(g);
                            hi = hi.max(d);
                            lo = lo.min(d);
                        }
                        hi - lo
                    }
                    TwoSampleMethod::Cvm => {
                        let s: f64 = (0..k)
                            .map(|g| {
                                let d = diff(g);
                                let w = if self.discrete { 1.0 } else { self.sizes[g] as f64 };
                                w * d * d
                            })
                            .sum();
                        nf * mf / (nn * nn) * s
                    }
                    TwoSampleMethod::Ad => {
                        nf * mf
                            * (0..k)
                                .map(|g| {
                                    let d = diff(g);
                                    d * d * self.ad_w[g]
                                })
                                .sum::<f64>()
                    }
                    TwoSampleMethod::Lr => self.lr(x_counts),
                    TwoSampleMethod::Za => {
                        -(0..k)
                            .map(|g| {
                                (nf * self.ent_x[fx[g] as usize] + mf * self.ent_y[gy[g] as usize])
                                    * self.za_w[g]
                            })
                            .sum::<f64>()
                    }
                    TwoSampleMethod::Zk => {
                        let mut best = f64::NEG_INFINITY;
                        for g in 0..k {
                            let f = fx[g] as f64 / nf;
                            let gg = gy[g] as f64 / mf;
                            let base = nf * self.ent_x[fx[g] as usize] + mf * self.ent_y[gy[g] as usize];
                            let (a, b) = (nf * f + mf * gg, nf * (1.0 - f) + mf * (1.0 - gg));
                            for p in self.starts[g]..self.starts[g] + self.sizes[g] as usize {
                                best = best.max(base - a * self.ln_t[p] - b * self.ln_1mt[p]);
                            }
                        }
                        best
                    }
                    TwoSampleMethod::Zc => {
                        let (mut sx, mut sy) = (0.0, 0.0);
                        let (mut ix, mut iy) = (0usize, 0usize);
                        for g in 0..k {
                            let start = self.starts[g];
                            let cxg = x_counts[g] as usize;
                            for r in start..start + cxg {
                                sx += self.zc_x[ix] * self.zc_pos[r];
                                ix += 1;
                            }
                            for r in start + cxg..start + self.sizes[g] as usize {
                                sy += self.zc_y[iy] * self.zc_pos[r];
                                iy += 1;
                            }
                        }
                        sx / nf + sy / mf
                    }
                    TwoSampleMethod::Wassp1 => (0..k.saturating_sub(1))
                        .map(|g| diff(g).abs() * (self.values[g + 1] - self.values[g]))
                        .sum(),
                    TwoSampleMethod::ChiSq { .. } => {
                        return Err(Error::InvalidParameter(
                            "chi-square statistics need the binned data".into(),
                        ))
                    }
                })
            })
            .collect()
    }

    /// Lehmann-Rosenblatt with midranks for tied values.
    fn lr(&self, x_counts: &[u64]) -> f64 {
        let (nf, mf) = (self.n as f64, self.m as f64);
        let mut sx = 0.0;
        let mut sy = 0.0;
        let (mut ix, mut iy) = (0usize, 0usize);
        for g in 0..self.k() {
            let mid = self.starts[g] as f64 + (self.sizes[g] as f64 + 1.0) / 2.0;
            for _ in 0..x_counts[g] {
                ix += 1;
                sx += (mid - ix as f64).powi(2);
            }
            for _ in 0..self.sizes[g] - x_counts[g] {
                iy += 1;
                sy += (mid - iy as f64).powi(2);
            }
        }
        (nf * sx + mf * sy) / (nf * mf * (nf + mf))
    }
}

/// Statistic of a two-sample method for continuous data.
pub fn ts_statistic(method: TwoSampleMethod, x: &ContinuousSample, y: &ContinuousSample) -> Result<f64> {
    if let TwoSampleMethod::ChiSq { scheme, bins } = method {
        return Ok(chisq_twosample(x, y, scheme, bins)?.statistic);
    }
    Ok(TsContext::continuous(&PooledSample::new(x, y))?.observed(&[method])?[0])
}

/// Statistic of a two-sample method for histograms on a common support.
pub fn ts_statistic_discrete(method: TwoSampleMethod, x: &DiscreteSample, y: &DiscreteSample) -> Result<f64> {
    if let TwoSampleMethod::ChiSq { bins, .. } = method {
        return Ok(chisq_twosample_discrete(x, y, bins)?.statistic);
    }
    Ok(TsContext::discrete(x, y)?.observed(&[method])?[0])
}

fn chisq_from_counts(o: &[f64], mm: &[f64]) -> Result<ChiSqOutcome> {
    let z: Vec<f64> = o.iter().zip(mm).map(|(a, b)| a + b).collect();
    let groups = join_groups(&z, MIN_BIN_COUNT);
    let o = sum_groups(o, &groups);
    let mm = sum_groups(mm, &groups);
    let z = sum_groups(&z, &groups);
    if groups.len() < 2 || z.iter().any(|&v| v < MIN_BIN_COUNT) {
        return Err(Error::DegenerateBinning(
            "fewer than 2 bins with a combined count of at least 5".into(),
        ));
    }
    let n1: f64 = o.iter().sum();
    let n2: f64 = mm.iter().sum();
    let s = (n1 / n2).sqrt();
    let statistic = o
        .iter()
        .zip(&mm)
        .zip(&z)
        .map(|((&a, &b), &zz)| (a / s - s * b).powi(2) / zz)
        .sum();
    Ok(ChiSqOutcome {
        statistic,
        df: groups.len() - 1,
        bins_after_join: groups.len(),
        expected: z,
        observed: o,
    })
}

/// Chi-square two-sample test for continuous data; bins come from the pooled
/// sample (equal width over its range, or its quantiles).
pub fn chisq_twosample(
    x: &ContinuousSample,
    y: &ContinuousSample,
    scheme: BinScheme,
    bins: usize,
) -> Result<ChiSqOutcome> {
    if bins < 2 {
        return Err(Error::InvalidParameter("chi-square needs at least 2 bins".into()));
    }
    let pooled = PooledSample::new(x, y);
    let z = pooled.z();
    let total = z.len();
    let (lo, hi) = (z[0], z[total - 1]);
    if !(lo < hi) {
        return Err(Error::DegenerateBinning("all observations are equal".into()));
    }
    let mut edges: Vec<f64> = match scheme {
        BinScheme::EqualSize => {
            let w = (hi - lo) / bins as f64;
            (1..bins).map(|j| lo + w * j as f64).collect()
        }
        BinScheme::EqualProb => (1..bins)
            .map(|j| {
                let pos = (j * total).div_ceil(bins);
                z[pos.clamp(1, total) - 1]
            })
            .collect(),
    };
    edges.dedup();
    let mut o = vec![0.0; edges.len() + 1];
    let mut mm = vec![0.0; edges.len() + 1];
    for (&v, &f) in z.iter().zip(pooled.flags()) {
        let b = edges.partition_point(|&e| e < v);
        match f {
            Origin::X => o[b] += 1.0,
            Origin::Y => mm[b] += 1.0,
        }
    }
    chisq_from_counts(&o, &mm)
}

/// Chi-square two-sample test for histograms; classes are grouped into
/// `bins` runs of adjacent classes first when there are more.
pub fn chisq_twosample_discrete(x: &DiscreteSample, y: &DiscreteSample, bins: usize) -> Result<ChiSqOutcome> {
    if !x.same_support(y) {
        return Err(Error::SupportMismatch);
    }
    if bins < 2 {
        return Err(Error::InvalidParameter("chi-square needs at least 2 bins".into()));
    }
    let classes = crate::chisq::class_groups(x.k(), bins);
    let to_f = |c: &[u64]| c.iter().map(|&v| v as f64).collect::<Vec<_>>();
    chisq_from_counts(
        &sum_groups(&to_f(x.counts()), &classes),
        &sum_groups(&to_f(y.counts()), &classes),
    )
}
