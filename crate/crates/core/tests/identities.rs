use nptest::chisq::ChiFormula;
use nptest::gof::{chisq_gof, gof_statistic, ChiSpec, GofMethod};
use nptest::models::{Dist, NullModel};
use nptest::sample::{BinScheme, ContinuousSample};
use nptest::twosample::{chisq_twosample, ts_statistic, TwoSampleMethod};
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestCaseError, TestRng, TestRunner};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn sample(v: Vec<f64>) -> ContinuousSample {
    ContinuousSample::new(v).unwrap()
}

fn unit_data(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..0.999, 1..max)
}

/// Values on a coarse grid so ties are common.
fn tied_data(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..12).prop_map(|k| k as f64 * 0.25 - 1.0), 1..max)
}

fn uniform01() -> NullModel {
    NullModel::fixed(Dist::Uniform { lo: 0.0, hi: 1.0 }).unwrap()
}

/// Runs a property on a fixed-seed runner so every run checks the same inputs.
pub fn check<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) {
    let mut runner = TestRunner::new_with_rng(
        ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    if let Err(e) = runner.run(&strategy, test) {
        panic!("{e}");
    }
}

#[test]
pub fn pearson_shortcut() {
    let inputs = (prop::collection::vec(0.001f64..0.999, 30..300), 2usize..25, any::<bool>());
    check(200, inputs, |(x, bins, ep)| {
        let scheme = if ep { BinScheme::EqualProb } else { BinScheme::EqualSize };
        let spec = ChiSpec::new(scheme, bins, ChiFormula::Pearson);
        let n = x.len() as f64;
        if let Ok(out) = chisq_gof(&sample(x), &uniform01(), spec, 0, false, true) {
            let shortcut: f64 = out.observed.iter().zip(&out.expected).map(|(o, e)| o * o / e).sum::<f64>() - n;
            prop_assert!(rel_close(out.statistic, shortcut, 1e-9), "{} vs {shortcut}", out.statistic);
            prop_assert!(rel_close(out.observed.iter().sum::<f64>(), n, 1e-12));
            prop_assert!(rel_close(out.expected.iter().sum::<f64>(), n, 1e-9));
        }
        Ok(())
    });
}

#[test]
pub fn twosample_chisq_full_equals_simplified() {
    let inputs = (
        prop::collection::vec(-3.0f64..3.0, 10..200),
        prop::collection::vec(-2.0f64..4.0, 10..200),
        2usize..25,
        any::<bool>(),
    );
    check(200, inputs, |(x, y, bins, ep)| {
        let scheme = if ep { BinScheme::EqualProb } else { BinScheme::EqualSize };
        let (n, m) = (x.len() as f64, y.len() as f64);
        if let Ok(out) = chisq_twosample(&sample(x), &sample(y), scheme, bins) {
            let full: f64 = out
                .observed
                .iter()
                .zip(&out.expected)
                .map(|(&a, &z)| {
                    let b = z - a;
                    let (ea, eb) = (n * z / (n + m), m * z / (n + m));
                    (a - ea).powi(2) / ea + (b - eb).powi(2) / eb
                })
                .sum();
            prop_assert!(rel_close(out.statistic, full, 1e-10), "{} vs {full}", out.statistic);
        }
        Ok(())
    });
}

#[test]
pub fn wasserstein_equal_sizes_reduces_to_order_statistics() {
    check(200, prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..100), |pairs| {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (cx, cy) = (sample(x), sample(y));
        let n = cx.len() as f64;
        let direct: f64 = cx.values().iter().zip(cy.values()).map(|(a, b)| (a - b).abs()).sum::<f64>() / n;
        let w = ts_statistic(TwoSampleMethod::Wassp1, &cx, &cy).unwrap();
        prop_assert!(rel_close(w, direct, 1e-12), "{w} vs {direct}");
        Ok(())
    });
}

#[test]
pub fn ks_le_kuiper() {
    check(200, unit_data(200), |x| {
        let cx = sample(x);
        let ks = gof_statistic(GofMethod::Ks, &cx, &uniform01()).unwrap();
        let ku = gof_statistic(GofMethod::Kuiper, &cx, &uniform01()).unwrap();
        prop_assert!((0.0..=1.0).contains(&ks) && (0.0..=2.0).contains(&ku) && ks <= ku);
        Ok(())
    });
    check(200, (tied_data(100), tied_data(100)), |(x, y)| {
        let (cx, cy) = (sample(x), sample(y));
        let ks = ts_statistic(TwoSampleMethod::Ks, &cx, &cy).unwrap();
        let ku = ts_statistic(TwoSampleMethod::Kuiper, &cx, &cy).unwrap();
        prop_assert!((0.0..=1.0).contains(&ks) && (0.0..=2.0).contains(&ku) && ks <= ku);
        Ok(())
    });
}

/// Rank statistics see the pooled order only, so a strictly increasing
/// transform of both samples leaves them bit-identical.
#[test]
pub fn twosample_rank_invariance() {
    check(200, (tied_data(80), tied_data(80)), |(x, y)| {
        let g = |v: &[f64]| -> Vec<f64> { v.iter().map(|&t| (2.0 * t).exp() + t * t * t).collect() };
        let (a, b) = (sample(x.clone()), sample(y.clone()));
        let (ga, gb) = (sample(g(&x)), sample(g(&y)));
        for method in TwoSampleMethod::continuous_all() {
            let invariant = match method {
                TwoSampleMethod::Wassp1 => false,
                TwoSampleMethod::ChiSq { scheme, .. } => scheme == BinScheme::EqualProb,
                _ => true,
            };
            if !invariant {
                continue;
            }
            match (ts_statistic(method, &a, &b), ts_statistic(method, &ga, &gb)) {
                (Ok(s), Ok(t)) => prop_assert_eq!(s.to_bits(), t.to_bits(), "{}", method),
                (Err(_), Err(_)) => {}
                (s, t) => prop_assert!(false, "{method}: {s:?} vs {t:?}"),
            }
        }
        Ok(())
    });
}

/// GoF statistics depend on the data only through F(x_i): scaling the
/// data by 4 under Uniform(0, 4) gives the same u_i exactly.
#[test]
pub fn gof_probability_integral_invariance() {
    check(200, unit_data(150), |x| {
        let scaled = NullModel::fixed(Dist::Uniform { lo: 0.0, hi: 4.0 }).unwrap();
        let a = sample(x.clone());
        let b = sample(x.iter().map(|v| v * 4.0).collect());
        for method in GofMethod::continuous_all() {
            if matches!(method, GofMethod::Wassp1 | GofMethod::ChiSq(_)) {
                continue;
            }
            let s = gof_statistic(method, &a, &uniform01()).unwrap();
            let t = gof_statistic(method, &b, &scaled).unwrap();
            prop_assert_eq!(s.to_bits(), t.to_bits(), "{}", method);
        }
        Ok(())
    });
}

#[test]
pub fn statistics_are_nonnegative() {
    check(200, (tied_data(60), tied_data(60)), |(x, y)| {
        let (a, b) = (sample(x), sample(y));
        for method in TwoSampleMethod::continuous_all() {
            if matches!(method, TwoSampleMethod::Za | TwoSampleMethod::Zc) {
                continue;
            }
            if let Ok(s) = ts_statistic(method, &a, &b) {
                prop_assert!(s >= -1e-12, "{method}: {s}");
            }
        }
        Ok(())
    });
}

#[test]
pub fn pearson_shortcut_worked_example() {
    let (o, e) = ([8.0, 12.0], [10.0, 10.0]);
    let p = nptest::chisq::pearson(&o, &e);
    assert!((p - 0.8).abs() < 1e-15);
    assert!((p - (64.0 / 10.0 + 144.0 / 10.0 - 20.0)).abs() < 1e-12);
}
