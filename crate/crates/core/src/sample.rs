//! Samples, empirical distribution functions, pooling, ranks and binning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation of an empirical distribution function.
pub trait Edf {
    /// Fraction of observations `<= t`.
    fn edf(&self, t: f64) -> f64;
}

/// Ordered real observations for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSample {
    values: Vec<f64>,
}

impl ContinuousSample {
    /// Validates and sorts the observations.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        // -0.0 and 0.0 are one value
        values.iter_mut().for_each(|v| *v += 0.0);
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Wraps observations that must already be in ascending order.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        check_sorted(&values)?;
        Ok(Self { values })
    }

    // Trusted constructor for replicates generated inside the engines.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Edf for ContinuousSample {
    fn edf(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.len() as f64
    }
}

/// Histogram data: strictly increasing support values with counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSample {
    support: Vec<f64>,
    counts: Vec<u64>,
    n: u64,
}

impl DiscreteSample {
    pub fn new(support: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if support.len() != counts.len() {
            return Err(Error::InvalidSample(format!(
                "{} support values but {} counts",
                support.len(),
                counts.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidSample("empty support".into()));
        }
        check_finite(&support)?;
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSample(
                "support must be strictly increasing".into(),
            ));
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidSample("total count is zero".into()));
        }
        Ok(Self { support, counts, n })
    }

    pub(crate) fn from_parts_unchecked(support: Vec<f64>, counts: Vec<u64>) -> Self {
        let n = counts.iter().sum();
        Self { support, counts, n }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total count.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of support points.
    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// EDF at each support point, `F(v_1), ..., F(v_k)`.
    pub fn cumulative(&self) -> Vec<f64> {
        let n = self.n as f64;
        let mut acc = 0u64;
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / n
            })
            .collect()
    }

    /// Expands counts into a sorted list of observations.
    pub fn expand(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n as usize);
        for (&v, &c) in self.support.iter().zip(&self.counts) {
            out.extend(std::iter::repeat_n(v, c as usize));
        }
        out
    }

    pub fn same_support(&self, other: &DiscreteSample) -> bool {
        self.support == other.support
    }
}

impl Edf for DiscreteSample {
    fn edf(&self, t: f64) -> f64 {
        let upto = self.support.partition_point(|&v| v <= t);
        self.counts[..upto].iter().sum::<u64>() as f64 / self.n as f64
    }
}

/// Evaluates the EDF of either kind of sample.
pub fn edf_eval<S: Edf + ?Sized>(sample: &S, t: f64) -> f64 {
    sample.edf(t)
}

/// Group label of an observation in a pooled sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    X,
    Y,
}

/// Merged, sorted observations of two samples with group labels.
///
/// Ties are ordered x before y, so labels, ranks and every statistic derived
/// from them are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledSample {
    z: Vec<f64>,
    flags: Vec<Origin>,
    n: usize,
    m: usize,
}

impl PooledSample {
    pub fn new(x: &ContinuousSample, y: &ContinuousSample) -> Self {
        Self::merge(x.values(), y.values())
    }

    /// Pools raw slices; both must be finite and ascending (either may be empty).
    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        check_finite(x)?;
        check_finite(y)?;
        check_sorted(x)?;
        check_sorted(y)?;
        Ok(Self::merge(x, y))
    }

    fn merge(x: &[f64], y: &[f64]) -> Self {
        let (n, m) = (x.len(), y.len());
        let mut z = Vec::with_capacity(n + m);
        let mut flags = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0, 0);
        while i < n || j < m {
            if j == m || (i < n && x[i] <= y[j]) {
                z.push(x[i]);
                flags.push(Origin::X);
                i += 1;
            } else {
                z.push(y[j]);
                flags.push(Origin::Y);
                j += 1;
            }
        }
        Self { z, flags, n, m }
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn flags(&self) -> &[Origin] {
        &self.flags
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Values labelled x, ascending.
    pub fn x_values(&self) -> Vec<f64> {
        self.values_of(Origin::X)
    }

    /// Values labelled y, ascending.
    pub fn y_values(&self) -> Vec<f64> {
        self.values_of(Origin::Y)
    }

    fn values_of(&self, who: Origin) -> Vec<f64> {
        self.z
            .iter()
            .zip(&self.flags)
            .filter(|(_, &f)| f == who)
            .map(|(&v, _)| v)
            .collect()
    }

    /// EDFs of x and y evaluated at every pooled value `z_i`.
    ///
    /// Values are EDFs in the usual sense: at a tied value all tied
    /// observations are counted.
    pub fn edfs_at_z(&self) -> (Vec<f64>, Vec<f64>) {
        let total = self.z.len();
        let mut fx = vec![0.0; total];
        let mut gy = vec![0.0; total];
        let (nf, mf) = (self.n.max(1) as f64, self.m.max(1) as f64);
        let (mut cx, mut cy) = (0usize, 0usize);
        let mut i = 0;
        while i < total {
            let mut j = i;
            while j < total && self.z[j] == self.z[i] {
                match self.flags[j] {
                    Origin::X => cx += 1,
                    Origin::Y => cy += 1,
                }
                j += 1;
            }
            for k in i..j {
                fx[k] = cx as f64 / nf;
                gy[k] = cy as f64 / mf;
            }
            i = j;
        }
        (fx, gy)
    }
}

/// Pools two samples (ties: x before y).
pub fn pool(x: &ContinuousSample, y: &ContinuousSample) -> PooledSample {
    PooledSample::new(x, y)
}

/// Ranks (1-based) of the x and y observations in the pooled ordering.
pub fn ranks(pooled: &PooledSample) -> (Vec<usize>, Vec<usize>) {
    let mut r = Vec::with_capacity(pooled.n);
    let mut s = Vec::with_capacity(pooled.m);
    for (i, f) in pooled.flags.iter().enumerate() {
        match f {
            Origin::X => r.push(i + 1),
            Origin::Y => s.push(i + 1),
        }
    }
    (r, s)
}

/// How bin edges were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinScheme {
    /// Equal width.
    #[serde(rename = "ES")]
    EqualSize,
    /// Equal probability.
    #[serde(rename = "EP")]
    EqualProb,
}

impl BinScheme {
    pub fn label(self) -> &'static str {
        match self {
            BinScheme::EqualSize => "ES",
            BinScheme::EqualProb => "EP",
        }
    }
}

/// Ascending bin boundaries `a_1 < ... < a_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinLayout {
    edges: Vec<f64>,
    scheme: BinScheme,
    requested_bins: usize,
}

impl BinLayout {
    pub fn new(edges: Vec<f64>, scheme: BinScheme) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidParameter(
                "a bin layout needs at least two edges".into(),
            ));
        }
        if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "bin edges must be strictly increasing".into(),
            ));
        }
        let requested_bins = edges.len() - 1;
        Ok(Self {
            edges,
            scheme,
            requested_bins,
        })
    }

    /// `bins` equal-width bins over `[lo, hi]`.
    pub fn equal_width(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cannot build {bins} equal-width bins on [{lo}, {hi}]"
            )));
        }
        let w = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
        edges[bins] = hi;
        Self::new(edges, BinScheme::EqualSize)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn scheme(&self) -> BinScheme {
        self.scheme
    }

    pub fn requested_bins(&self) -> usize {
        self.requested_bins
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    /// Bin index of `x`: bins are `(a_i, a_{i+1}]`, the first closed on the left.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(x >= self.lo() && x <= self.hi()) {
            return Err(Error::OutOfRange {
                value: x,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        Ok(self.locate_clamped(x))
    }

    /// Like [`locate`](Self::locate) but values outside the range fall in the end bins.
    pub fn locate_clamped(&self, x: f64) -> usize {
        let idx = self.edges.partition_point(|&e| e < x);
        idx.clamp(1, self.bins()) - 1
    }

    /// Bin midpoints.
    pub fn midpoints(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Bins a continuous sample; the support of the result is the right bin edges.
pub fn discretize(sample: &ContinuousSample, layout: &BinLayout) -> Result<DiscreteSample> {
    let mut counts = vec![0u64; layout.bins()];
    for &x in sample.values() {
        counts[layout.locate(x)?] += 1;
    }
    Ok(DiscreteSample::from_parts_unchecked(
        layout.edges()[1..].to_vec(),
        counts,
    ))
}

/// Bins values, putting anything outside the layout into the end bins.
pub fn discretize_clamped(values: &[f64], layout: &BinLayout) -> DiscreteSample {
    let mut counts = vec![0u64; layout.bins()];
    for &x in values {
        counts[layout.locate_clamped(x)] += 1;
    }
    DiscreteSample::from_parts_unchecked(layout.edges()[1..].to_vec(), counts)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidSample(format!(
            "observation {} is not finite ({})",
            i + 1,
            values[i]
        ))),
        None => Ok(()),
    }
}

fn check_sorted(values: &[f64]) -> Result<()> {
    match values.windows(2).position(|w| w[0] > w[1]) {
        Some(i) => Err(Error::InvalidSample(format!(
            "observations not in ascending order at position {}",
            i + 2
        ))),
        None => Ok(()),
    }
}
