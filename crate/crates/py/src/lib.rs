//! Python bindings for `nptest`.
//!
//! Results come back as plain dicts and lists; samples are passed as lists of
//! floats (continuous) or `(support, counts)` pairs (histogram data).

use std::path::PathBuf;

use nptest::cases::{all_cases, case_study};
use nptest::cli::{align_supports, parse_model};
use nptest::combiner::{self, NullSpec};
use nptest::harness::{power_study, type1_study, MethodList, StudyConfig};
use nptest::inference::{self, SimConfig, TestResult};
use nptest::models::DiscreteNull;
use nptest::rng::entropy_seed;
use nptest::sample::{ContinuousSample, DiscreteSample};
use nptest::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn from_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn result_dict<'py>(py: Python<'py>, r: &TestResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("method", &r.method)?;
    d.set_item("statistic", r.statistic)?;
    d.set_item("pvalue", r.pvalue)?;
    d.set_item("kind", r.pvalue_kind.as_str())?;
    d.set_item("replicates", r.replicates)?;
    d.set_item("seed", r.seed)?;
    d.set_item("df", r.df)?;
    Ok(d)
}

fn results<'py>(py: Python<'py>, rs: &[TestResult]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rs.iter().map(|r| result_dict(py, r)).collect()
}

fn gof_methods(discrete: bool, names: &str) -> Result<Vec<nptest::gof::GofMethod>, Error> {
    match MethodList::parse(nptest::cases::Problem::Gof, discrete, names)? {
        MethodList::Gof(v) => Ok(v),
        MethodList::TwoSample(_) => unreachable!(),
    }
}

fn ts_methods(discrete: bool, names: &str) -> Result<Vec<nptest::twosample::TwoSampleMethod>, Error> {
    match MethodList::parse(nptest::cases::Problem::TwoSample, discrete, names)? {
        MethodList::TwoSample(v) => Ok(v),
        MethodList::Gof(_) => unreachable!(),
    }
}

/// Goodness-of-fit tests of `data` against `model` (`"family[:p1,p2]"`).
#[pyfunction]
#[pyo3(signature = (data, model, methods = "all", replicates = 5000, seed = None, random_n = false, use_phat = false))]
#[allow(clippy::too_many_arguments)]
fn gof_test<'py>(
    py: Python<'py>,
    data: Vec<f64>,
    model: &str,
    methods: &str,
    replicates: usize,
    seed: Option<u64>,
    random_n: bool,
    use_phat: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SimConfig {
        random_n,
        use_phat,
        ..SimConfig::new(replicates, seed.unwrap_or_else(entropy_seed))
    };
    let out = py
        .detach(|| {
            let model = parse_model(model)?;
            let ms = gof_methods(false, methods)?;
            inference::gof_test(&ms, &ContinuousSample::new(data)?, &model, &cfg)
        })
        .map_err(err)?;
    results(py, &out)
}

/// Goodness-of-fit tests of histogram data; the model is discretised on `support`.
#[pyfunction]
#[pyo3(signature = (support, counts, model, methods = "all", replicates = 5000, seed = None, random_n = false, use_phat = false))]
#[allow(clippy::too_many_arguments)]
fn gof_test_discrete<'py>(
    py: Python<'py>,
    support: Vec<f64>,
    counts: Vec<u64>,
    model: &str,
    methods: &str,
    replicates: usize,
    seed: Option<u64>,
    random_n: bool,
    use_phat: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SimConfig {
        random_n,
        use_phat,
        ..SimConfig::new(replicates, seed.unwrap_or_else(entropy_seed))
    };
    let out = py
        .detach(|| {
            let ms = gof_methods(true, methods)?;
            let x = DiscreteSample::new(support, counts)?;
            let null = DiscreteNull::on_support(parse_model(model)?, x.support().to_vec())?;
            inference::gof_test_discrete(&ms, &x, &null, &cfg)
        })
        .map_err(err)?;
    results(py, &out)
}

/// Two-sample tests with permutation p-values.
#[pyfunction]
#[pyo3(signature = (x, y, methods = "all", replicates = 5000, seed = None, use_large_sample = false))]
fn twosample_test<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    y: Vec<f64>,
    methods: &str,
    replicates: usize,
    seed: Option<u64>,
    use_large_sample: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SimConfig {
        large_sample: use_large_sample,
        ..SimConfig::new(replicates, seed.unwrap_or_else(entropy_seed))
    };
    let out = py
        .detach(|| {
            let ms = ts_methods(false, methods)?;
            inference::ts_test(&ms, &ContinuousSample::new(x)?, &ContinuousSample::new(y)?, &cfg)
        })
        .map_err(err)?;
    results(py, &out)
}

/// Two-sample tests of histogram data; each sample is `(support, counts)`.
#[pyfunction]
#[pyo3(signature = (x, y, methods = "all", replicates = 5000, seed = None))]
fn twosample_test_discrete<'py>(
    py: Python<'py>,
    x: (Vec<f64>, Vec<u64>),
    y: (Vec<f64>, Vec<u64>),
    methods: &str,
    replicates: usize,
    seed: Option<u64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = SimConfig::new(replicates, seed.unwrap_or_else(entropy_seed));
    let out = py
        .detach(|| {
            let ms = ts_methods(true, methods)?;
            let (a, b) = align_supports(&DiscreteSample::new(x.0, x.1)?, &DiscreteSample::new(y.0, y.1)?)?;
            inference::ts_test_discrete(&ms, &a, &b, &cfg)
        })
        .map_err(err)?;
    results(py, &out)
}

/// Null distribution of the smallest p-value of several tests.
#[pyclass(module = "pynptest", frozen)]
struct MinPCalibration(combiner::MinPCalibration);

#[pymethods]
impl MinPCalibration {
    /// GoF calibration: samples of size `n` from `model`.
    #[staticmethod]
    #[pyo3(signature = (methods, model, n, replicates = 1000, inner_replicates = 500, seed = None))]
    fn gof(
        py: Python<'_>,
        methods: Vec<String>,
        model: &str,
        n: usize,
        replicates: usize,
        inner_replicates: usize,
        seed: Option<u64>,
    ) -> PyResult<Self> {
        let seed = seed.unwrap_or_else(entropy_seed);
        py.detach(|| {
            let spec = NullSpec::Gof { model: parse_model(model)?, n };
            combiner::calibrate(&methods, spec, replicates, inner_replicates, seed)
        })
        .map(Self)
        .map_err(err)
    }

    /// Two-sample calibration: random splits of the pooled samples.
    #[staticmethod]
    #[pyo3(signature = (methods, x, y, replicates = 1000, inner_replicates = 500, seed = None))]
    fn twosample(
        py: Python<'_>,
        methods: Vec<String>,
        x: Vec<f64>,
        y: Vec<f64>,
        replicates: usize,
        inner_replicates: usize,
        seed: Option<u64>,
    ) -> PyResult<Self> {
        let seed = seed.unwrap_or_else(entropy_seed);
        let n = x.len();
        let mut pooled = x;
        pooled.extend(y);
        py.detach(|| {
            combiner::calibrate(&methods, NullSpec::TwoSample { pooled, n }, replicates, inner_replicates, seed)
        })
        .map(Self)
        .map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        combiner::MinPCalibration::load(&path).map(Self).map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(&path).map_err(err)
    }

    /// Adjusted p-value of an observed smallest p-value.
    fn adjust(&self, minp: f64) -> f64 {
        combiner::adjust(&self.0, minp)
    }

    /// Empirical cdf of the null smallest p-value.
    fn cdf(&self, t: f64) -> f64 {
        self.0.cdf(t)
    }

    #[getter]
    fn methods(&self) -> Vec<String> {
        self.0.methods.clone()
    }

    #[getter]
    fn replicates(&self) -> usize {
        self.0.replicates
    }

    #[getter]
    fn minp_values(&self) -> Vec<f64> {
        self.0.minp_values.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "MinPCalibration(methods={:?}, R={}, seed={})",
            self.0.methods, self.0.replicates, self.0.seed
        )
    }
}

/// Smallest p-value in a list of result dicts.
#[pyfunction]
fn min_pvalue(results: Vec<Bound<'_, PyDict>>) -> PyResult<f64> {
    let mut m = 1.0f64;
    for r in results {
        let p: f64 = r
            .get_item("pvalue")?
            .ok_or_else(|| PyValueError::new_err("result without 'pvalue'"))?
            .extract()?;
        m = m.min(p);
    }
    Ok(m)
}

/// Registry of case studies.
#[pyfunction]
fn cases(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    all_cases()
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("id", c.full_id())?;
            d.set_item("title", c.title)?;
            d.set_item("theta_null", c.theta_null)?;
            d.set_item("theta_ref", c.theta_ref)?;
            d.set_item("theta_range", c.theta_range)?;
            d.set_item("table_matched", c.table_matched)?;
            Ok(d)
        })
        .collect()
}

fn study_config(runs: usize, n: usize, m: Option<usize>, seed: Option<u64>, discrete: bool, reuse_null: bool) -> StudyConfig {
    StudyConfig {
        n,
        m,
        discrete,
        reuse_null,
        ..StudyConfig::new(runs, seed.unwrap_or_else(entropy_seed))
    }
}

/// Rejection rates of `methods` for `case` at each parameter in `thetas`.
#[pyfunction]
#[pyo3(signature = (case, thetas = None, methods = "all", runs = 1000, n = 500, m = None, seed = None, discrete = false, reuse_null = false))]
#[allow(clippy::too_many_arguments)]
fn power<'py>(
    py: Python<'py>,
    case: &str,
    thetas: Option<Vec<f64>>,
    methods: &str,
    runs: usize,
    n: usize,
    m: Option<usize>,
    seed: Option<u64>,
    discrete: bool,
    reuse_null: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = study_config(runs, n, m, seed, discrete, reuse_null);
    let grid = py
        .detach(|| {
            let c = case_study(case)?;
            let ms = MethodList::parse(c.problem, discrete, methods)?;
            let thetas = thetas.unwrap_or_else(|| vec![c.theta_ref]);
            power_study(&c, &ms, &thetas, &cfg)
        })
        .map_err(err)?;
    from_json(py, &grid.rows("power"))
}

/// Type I error rates of every method for `case`.
#[pyfunction]
#[pyo3(signature = (case, methods = "all", runs = 1000, n = 500, m = None, seed = None, discrete = false, reuse_null = false))]
#[allow(clippy::too_many_arguments)]
fn type1<'py>(
    py: Python<'py>,
    case: &str,
    methods: &str,
    runs: usize,
    n: usize,
    m: Option<usize>,
    seed: Option<u64>,
    discrete: bool,
    reuse_null: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = study_config(runs, n, m, seed, discrete, reuse_null);
    let rows = py
        .detach(|| {
            let c = case_study(case)?;
            let ms = MethodList::parse(c.problem, discrete, methods)?;
            type1_study(std::slice::from_ref(&c), Some(&ms), &cfg)
        })
        .map_err(err)?;
    from_json(py, &rows)
}

#[pymodule]
fn pynptest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", nptest::cli::VERSION)?;
    m.add_function(wrap_pyfunction!(gof_test, m)?)?;
    m.add_function(wrap_pyfunction!(gof_test_discrete, m)?)?;
    m.add_function(wrap_pyfunction!(twosample_test, m)?)?;
    m.add_function(wrap_pyfunction!(twosample_test_discrete, m)?)?;
    m.add_function(wrap_pyfunction!(min_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(cases, m)?)?;
    m.add_function(wrap_pyfunction!(power, m)?)?;
    m.add_function(wrap_pyfunction!(type1, m)?)?;
    m.add_class::<MinPCalibration>()?;
    Ok(())
}
