//! Running several tests at once: reject when the smallest p-value is small,
//! with the threshold calibrated by simulating the minimum p-value under the
//! null hypothesis.

use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gof::GofMethod;
use crate::inference::{gof_test, gof_test_discrete, ts_test, ts_test_discrete, SimConfig, TestResult};
use crate::models::{DiscreteNull, NullModel};
use crate::rng::{derive, stream, tag};
use crate::sample::{ContinuousSample, DiscreteSample};
use crate::twosample::TwoSampleMethod;

/// Default number of calibration data sets.
pub const DEFAULT_CALIBRATION: usize = 1000;

/// Where the calibration data sets come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NullSpec {
    /// Samples of size `n` from the model (a composite model is refitted per data set).
    Gof { model: NullModel, n: usize },
    /// Multinomial samples of size `n` on `support`.
    GofDiscrete {
        model: NullModel,
        support: Vec<f64>,
        n: u64,
    },
    /// Random splits of the pooled observations into samples of sizes `n` and `m`.
    TwoSample { pooled: Vec<f64>, n: usize },
    /// Random splits of pooled histogram counts.
    TwoSampleDiscrete {
        support: Vec<f64>,
        pooled: Vec<u64>,
        n: u64,
    },
}

impl NullSpec {
    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("null spec serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn is_gof(&self) -> bool {
        matches!(self, NullSpec::Gof { .. } | NullSpec::GofDiscrete { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinPCalibration {
    pub methods: Vec<String>,
    pub null_spec: NullSpec,
    pub null_spec_hash: String,
    #[serde(rename = "R")]
    pub replicates: usize,
    /// Replicates of each inner test.
    pub inner_replicates: usize,
    pub seed: u64,
    /// Null minimum p-values, ascending.
    pub minp_values: Vec<f64>,
}

/// Parsed method list matching the kind of null.
enum Methods {
    Gof(Vec<GofMethod>),
    TwoSample(Vec<TwoSampleMethod>),
}

fn parse_methods(names: &[String], spec: &NullSpec) -> Result<Methods> {
    if names.is_empty() {
        return Err(Error::InvalidParameter("at least one method is required".into()));
    }
    if spec.is_gof() {
        Ok(Methods::Gof(names.iter().map(|s| s.parse()).collect::<Result<_>>()?))
    } else {
        Ok(Methods::TwoSample(
            names.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        ))
    }
}

/// Smallest p-value of a set of test results.
pub fn min_pvalue(results: &[TestResult]) -> f64 {
    results.iter().map(|r| r.pvalue).fold(1.0, f64::min)
}

/// Minimum p-value over `methods` for one null data set drawn with `seed`.
fn null_minp(methods: &Methods, spec: &NullSpec, inner: &SimConfig, seed: u64) -> Result<f64> {
    let mut rng = stream(seed, &[tag("calibration-data")]);
    let results = match (spec, methods) {
        (NullSpec::Gof { model, n }, Methods::Gof(ms)) => {
            let x = model.sample(*n, &mut rng);
            gof_test(ms, &x, model, inner)?
        }
        (NullSpec::GofDiscrete { model, support, n }, Methods::Gof(ms)) => {
            let null = DiscreteNull::on_support(model.clone(), support.clone())?;
            let x = null.sample(*n, &mut rng);
            gof_test_discrete(ms, &x, &null, inner)?
        }
        (NullSpec::TwoSample { pooled, n }, Methods::TwoSample(ms)) => {
            let mut z = pooled.clone();
            z.shuffle(&mut rng);
            let (a, b) = z.split_at(*n);
            ts_test(
                ms,
                &ContinuousSample::new(a.to_vec())?,
                &ContinuousSample::new(b.to_vec())?,
                inner,
            )?
        }
        (NullSpec::TwoSampleDiscrete { support, pooled, n }, Methods::TwoSample(ms)) => {
            let owner: Vec<usize> = pooled
                .iter()
                .enumerate()
                .flat_map(|(g, &c)| std::iter::repeat_n(g, c as usize))
                .collect();
            let mut perm = owner;
            perm.shuffle(&mut rng);
            let mut xc = vec![0u64; support.len()];
            for &g in &perm[..*n as usize] {
                xc[g] += 1;
            }
            let yc: Vec<u64> = pooled.iter().zip(&xc).map(|(p, x)| p - x).collect();
            ts_test_discrete(
                ms,
                &DiscreteSample::new(support.clone(), xc)?,
                &DiscreteSample::new(support.clone(), yc)?,
                inner,
            )?
        }
        _ => unreachable!("methods are parsed for the null kind"),
    };
    Ok(min_pvalue(&results))
}

/// Simulates the null distribution of the minimum p-value over `methods`.
pub fn calibrate(
    methods: &[String],
    null_spec: NullSpec,
    replicates: usize,
    inner_replicates: usize,
    seed: u64,
) -> Result<MinPCalibration> {
    if replicates < 100 {
        return Err(Error::InvalidParameter(format!(
            "at least 100 calibration data sets are required, got {replicates}"
        )));
    }
    if let NullSpec::TwoSample { pooled, n } = &null_spec {
        if *n == 0 || *n >= pooled.len() {
            return Err(Error::InvalidParameter("both samples must be nonempty".into()));
        }
    }
    let parsed = parse_methods(methods, &null_spec)?;
    let mut minp = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let s = derive(seed, &[tag("calibration"), r as u64]);
            let inner = SimConfig::new(inner_replicates, derive(s, &[tag("inner")]));
            null_minp(&parsed, &null_spec, &inner, s)
        })
        .collect::<Result<Vec<_>>>()?;
    minp.sort_by(f64::total_cmp);
    Ok(MinPCalibration {
        methods: methods.to_vec(),
        null_spec_hash: null_spec.hash(),
        null_spec,
        replicates,
        inner_replicates,
        seed,
        minp_values: minp,
    })
}

/// Adjusted p-value `(1 + #{stored <= minp}) / (R + 1)`, capped at 1.
pub fn adjust(cal: &MinPCalibration, minp_observed: f64) -> f64 {
    let below = cal.minp_values.partition_point(|&v| v <= minp_observed);
    ((1 + below) as f64 / (cal.replicates as f64 + 1.0)).min(1.0)
}

impl MinPCalibration {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Loads a calibration file and checks its consistency.
    pub fn load(path: &Path) -> Result<Self> {
        let cal: MinPCalibration = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if cal.null_spec.hash() != cal.null_spec_hash {
            return Err(Error::InvalidParameter(
                "calibration null spec does not match its hash".into(),
            ));
        }
        if cal.minp_values.len() != cal.replicates
            || cal.minp_values.windows(2).any(|w| w[0] > w[1])
            || cal.minp_values.iter().any(|v| !(0.0..=1.0).contains(v))
        {
            return Err(Error::InvalidParameter(
                "calibration values must be R sorted numbers in [0, 1]".into(),
            ));
        }
        Ok(cal)
    }

    /// Empirical cdf of the null minimum p-value at `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.minp_values.partition_point(|&v| v <= t) as f64 / self.replicates as f64
    }
}
