use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nptest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nptest"))
        .args(args)
        .env_remove("NPTEST_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, lines: impl IntoIterator<Item = String>) -> PathBuf {
    let path = dir.join(name);
    let body: Vec<String> = lines.into_iter().collect();
    std::fs::write(&path, body.join("\n") + "\n").unwrap();
    path
}

fn normal_file(dir: &Path, name: &str, n: usize, shift: f64, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    write(
        dir,
        name,
        (0..n).map(|_| {
            // Box-Muller, enough for test data
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            format!("{}", shift + (-2.0 * (1.0 - u).ln()).sqrt() * (std::f64::consts::TAU * v).cos())
        }),
    )
}

/// Data rows of a CSV report, split into fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
pub fn gof_two_methods_give_two_results() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "u.txt", (1..=40).map(|i| format!("{}", i as f64 / 41.0)));
    let out = stdout(&nptest(&["gof", "--model", "uniform", "--methods", "ks,ad", "-B", "200", "--seed", "4", p(&data)]));
    let r = rows(&out);
    assert_eq!(out.lines().next().unwrap(), "method,statistic,pvalue,kind,replicates,df,seed,version");
    assert_eq!(r.len(), 2);
    assert_eq!((r[0][0].as_str(), r[1][0].as_str()), ("KS", "AD"));
    assert!(r.iter().all(|row| row[6] == "4" && row[4] == "200"));
}

#[test]
pub fn negative_count_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.txt", ["1,3".into(), "2,-1".into()]);
    let out = nptest(&["gof", "--model", "uniform:0,3", p(&data)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
pub fn zhang_on_discrete_data_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.txt", ["1,3".into(), "2,4".into(), "3,5".into()]);
    let out = nptest(&["gof", "--model", "normal:2,1", "--methods", "zc", p(&data)]);
    assert_eq!(out.status.code(), Some(2));
    let x = write(dir.path(), "x.txt", ["1,3".into(), "2,4".into()]);
    let out = nptest(&["twosample", "--methods", "zk", p(&x), p(&data)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
pub fn unknown_method_and_bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "u.txt", (1..=10).map(|i| format!("{}", i as f64 / 11.0)));
    assert_eq!(nptest(&["gof", "--model", "uniform", "--methods", "nope", p(&data)]).status.code(), Some(2));
    assert_eq!(nptest(&["gof", "--bogus"]).status.code(), Some(2));
    assert_eq!(nptest(&["gof", "--model", "uniform", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
pub fn identical_files_give_pvalue_one() {
    let dir = tempfile::tempdir().unwrap();
    let x = normal_file(dir.path(), "x.txt", 30, 0.0, 1);
    let out = stdout(&nptest(&["twosample", "--methods", "ks", "-B", "300", "--seed", "1", p(&x), p(&x)]));
    let r = rows(&out);
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(r[0][2].parse::<f64>().unwrap(), 1.0);
}

#[test]
pub fn all_methods_give_thirteen_results() {
    let dir = tempfile::tempdir().unwrap();
    let x = normal_file(dir.path(), "x.txt", 60, 0.0, 2);
    let y = normal_file(dir.path(), "y.txt", 70, 0.3, 3);
    let out = stdout(&nptest(&["twosample", "--methods", "all", "-B", "100", "--seed", "2", p(&x), p(&y)]));
    assert_eq!(rows(&out).len(), 13);
}

#[test]
pub fn large_samples_use_the_asymptotic_ks_pvalue() {
    let dir = tempfile::tempdir().unwrap();
    let x = normal_file(dir.path(), "x.txt", 2000, 0.0, 4);
    let y = normal_file(dir.path(), "y.txt", 2000, 0.05, 5);
    let out = stdout(&nptest(&["twosample", "--methods", "ks", "--seed", "3", p(&x), p(&y)]));
    assert_eq!(rows(&out)[0][3], "asymptotic");

    let small_x = normal_file(dir.path(), "sx.txt", 50, 0.0, 6);
    let small_y = normal_file(dir.path(), "sy.txt", 50, 0.0, 7);
    let forced = stdout(&nptest(&[
        "twosample", "--methods", "ks", "--use-large-sample", "--seed", "3", p(&small_x), p(&small_y),
    ]));
    assert_eq!(rows(&forced)[0][3], "asymptotic");
}

#[test]
pub fn json_report_embeds_seed_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let x = normal_file(dir.path(), "x.txt", 40, 0.0, 8);
    let out = stdout(&nptest(&["--format", "json", "gof", "--model", "normal", "--methods", "ad", "-B", "100", "--seed", "9", p(&x)]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["results"].as_array().unwrap().len(), 1);
}

#[test]
pub fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let x = normal_file(dir.path(), "x.txt", 40, 0.0, 10);
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_nptest"))
            .args(["gof", "--model", "normal", "--methods", "ks", "-B", "100", p(&x)])
            .env("NPTEST_SEED", "77")
            .output()
            .unwrap();
        stdout(&out)
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(rows(&a)[0][6], "77");
}

#[test]
pub fn calibrate_then_adjust() {
    let dir = tempfile::tempdir().unwrap();
    let cal = dir.path().join("cal.json");
    stdout(&nptest(&[
        "calibrate", "--methods", "ks,ad", "--model", "uniform:0,1", "--n", "30", "--R", "100", "--inner", "100",
        "--seed", "5", "--out", p(&cal),
    ]));
    let out = stdout(&nptest(&["adjust", "--calibration", p(&cal), "--minp", "0.01"]));
    assert_eq!(out.lines().next().unwrap(), "minp,adjusted_pvalue,R,seed,version");
    let adjusted: f64 = rows(&out)[0][1].parse().unwrap();
    assert!(adjusted > 0.0 && adjusted <= 1.0);
    let loose = stdout(&nptest(&["adjust", "--calibration", p(&cal), "--minp", "1"]));
    assert_eq!(rows(&loose)[0][1].parse::<f64>().unwrap(), 1.0);
}

#[test]
pub fn power_grid_and_registry() {
    let out = stdout(&nptest(&[
        "power", "--case", "gof/uniform-linear", "--theta", "0:0.5:6", "--runs", "20", "--n", "50", "--methods", "ks,ad",
        "--reuse-null", "--reference", "500", "--seed", "1",
    ]));
    assert_eq!(out.lines().next().unwrap(), "study,case,method,theta,rate,se,runs,n,m,seed");
    assert_eq!(rows(&out).len(), 12);

    let cases = stdout(&nptest(&["cases", "list"]));
    assert!(cases.lines().next().unwrap().contains("theta_ref"));
    assert!(cases.lines().any(|l| l.starts_with("gof/uniform-linear,")));
    assert!(cases.lines().any(|l| l.starts_with("twosample/normal-shift,")));
}

#[test]
pub fn study_writes_named_file() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&nptest(&[
        "type1", "--case", "gof/uniform-linear", "--runs", "10", "--n", "20", "--methods", "ks", "--inner", "100",
        "--seed", "1", "--out", p(dir.path()),
    ]));
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 1);
    let parts: Vec<&str> = names[0].split('.').collect();
    assert_eq!(parts[0], "type1");
    assert!(parts.last() == Some(&"csv") && parts[parts.len() - 2].parse::<u64>().is_ok());
}

/// Same seed, one worker vs eight: identical output for every command.
#[test]
pub fn output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let x = normal_file(dir.path(), "x.txt", 80, 0.0, 11);
    let y = normal_file(dir.path(), "y.txt", 90, 0.4, 12);
    let hist = write(dir.path(), "h.txt", ["0,5".into(), "1,9".into(), "2,14".into(), "3,8".into(), "4,4".into()]);
    let cal1 = dir.path().join("c1.json");
    let cal8 = dir.path().join("c8.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["gof", "--model", "normal", "-B", "200", "--seed", "3", p(&x)],
        vec!["gof", "--model", "exponential:1", "--methods", "ks,cvm,ad,ep-s-p", "-B", "200", "--seed", "3", p(&hist)],
        vec!["twosample", "-B", "200", "--seed", "3", p(&x), p(&y)],
        vec!["twosample", "--methods", "ks,ad,lr", "-B", "200", "--seed", "3", p(&hist), p(&hist)],
        vec![
            "power", "--case", "twosample/normal-shift", "--theta", "0:0.4:3", "--runs", "12", "--n", "40",
            "--methods", "ks,wassp1", "--inner", "100", "--seed", "3",
        ],
        vec![
            "type1", "--case", "gof/normal-t-est", "--runs", "8", "--n", "40", "--methods", "ad,zc", "--inner", "100",
            "--seed", "3",
        ],
        vec![
            "optbin", "--case", "gof/uniform-linear", "--problem", "gof", "--bins", "2:5", "--runs", "10", "--n", "60",
            "--inner", "100", "--seed", "3",
        ],
    ];
    for cmd in &commands {
        let one = stdout(&nptest(&[&["--jobs", "1"], cmd.as_slice()].concat()));
        let eight = stdout(&nptest(&[&["--jobs", "8"], cmd.as_slice()].concat()));
        assert_eq!(one, eight, "{cmd:?}");
    }
    let cal = |jobs: &str, out: &Path| {
        stdout(&nptest(&[
            "--jobs", jobs, "calibrate", "--methods", "ks,kuiper", "--model", "uniform:0,1", "--n", "25", "--R", "100",
            "--inner", "100", "--seed", "3", "--out", p(out),
        ]))
    };
    cal("1", &cal1);
    cal("8", &cal8);
    assert_eq!(std::fs::read(&cal1).unwrap(), std::fs::read(&cal8).unwrap());
}
