use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn urkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("URKIT_THREADS")
        .output()
        .expect("run urkit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(text: &str) -> &str {
    let end = "# end manifest\n";
    &text[text.find(end).expect("manifest") + end.len()..]
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// Value of `key` in a `quantity,value` CSV report.
fn csv_value(text: &str, key: &str) -> String {
    body(text)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no {key}"))
        .to_string()
}

const EXPERIMENT: &str = "\
[experiment]
methods = onestep, zeropad
det = c
T = 100
k = 0
reps = 400
seed = 1
analyses = cv, size_power, variance

[dgp.a90]
alpha = 0.9
";

#[test]
fn simulate_is_deterministic_and_reruns_from_manifest() {
    let d = TempDir::new().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = urkit(d.path(), &["simulate", "--alpha", "1", "--sigma", "1", "--T", "200", "--seed", "7", "--out", name]);
        assert!(o.status.success());
    }
    let a = read(d.path(), "a.csv");
    assert_eq!(body(&a), body(&read(d.path(), "b.csv")));
    assert!(a.starts_with("# urkit manifest\n# command: simulate\n"));
    assert!(a.contains("# seed: 7\n") && a.contains("# version: ") && a.contains("# timestamp: "));
    assert_eq!(body(&a).lines().count(), 201);

    let o = urkit(d.path(), &["simulate", "--config", "a.csv", "--out", "c.csv"]);
    assert!(o.status.success());
    assert_eq!(body(&a), body(&read(d.path(), "c.csv")));

    // stdout variant matches the file body too
    let o = urkit(d.path(), &["simulate", "--alpha", "1", "--T", "200", "--seed", "7"]);
    assert_eq!(body(&stdout(&o)), body(&a));
}

#[test]
fn simulate_validation_split() {
    let d = TempDir::new().unwrap();
    let o = urkit(d.path(), &["simulate", "--error-ar", "1.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not stationary"));
    let o = urkit(d.path(), &["simulate", "--alpha", "1.5", "--T", "30"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn noiseless_simulation_is_the_trend() {
    let d = TempDir::new().unwrap();
    let o = urkit(d.path(), &["simulate", "--gamma", "1,0.5", "--det", "ct", "--sigma", "1e-300", "--T", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in body(&text).lines().skip(1) {
        let (t, y) = line.split_once(',').unwrap();
        let t: f64 = t.parse().unwrap();
        let y: f64 = y.parse().unwrap();
        assert!((y - (1.0 + 0.5 * t)).abs() < 1e-12);
    }
}

fn simulated(d: &Path) {
    let o = urkit(d, &["simulate", "--alpha", "0.95", "--det", "ct", "--gamma", "2,0.1", "--T", "250", "--seed", "3", "--out", "y.csv"]);
    assert!(o.status.success());
}

#[test]
fn test_reports_zero_padded_statistics() {
    let d = TempDir::new().unwrap();
    simulated(d.path());
    let o = urkit(d.path(), &["test", "--data", "y.csv", "--method", "zeropad", "--det", "ct", "--k", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("# urkit manifest\n# command: test\n"));
    for field in ["t_DF*", "t_LM*", "T_eff", "chi", "gamma structural", "design"] {
        assert!(s.contains(field), "missing {field}:\n{s}");
    }
    assert!(s.contains("critical values: none supplied"));
    assert!(!s.to_lowercase().contains("p-value"));
}

#[test]
fn one_step_and_two_step_print_equal_statistics() {
    let d = TempDir::new().unwrap();
    simulated(d.path());
    let mut t = Vec::new();
    for m in ["onestep", "twostep"] {
        let out = format!("{m}.csv");
        let o = urkit(d.path(), &["test", "--data", "y.csv", "--method", m, "--det", "ct", "--k", "3", "--out", &out]);
        assert!(o.status.success());
        t.push(csv_value(&read(d.path(), &out), "t_df").parse::<f64>().unwrap());
    }
    assert!((t[0] - t[1]).abs() < 1e-8, "{t:?}");
    assert_eq!(format!("{:.8}", t[0]), format!("{:.8}", t[1]));
}

#[test]
fn break_design_lists_lagged_dummies() {
    let d = TempDir::new().unwrap();
    simulated(d.path());
    let o = urkit(d.path(), &["test", "--data", "y.csv", "--method", "onestep", "--det", "break:120", "--k", "1"]);
    let s = stdout(&o);
    let design = s.lines().find(|l| l.trim_start().starts_with("design")).unwrap();
    for l in ["DU", "DU(t-1)", "DU(t-2)"] {
        assert!(design.contains(l), "{design}");
    }
}

#[test]
fn k_auto_uses_schwert_rule() {
    let d = TempDir::new().unwrap();
    simulated(d.path());
    let o = urkit(d.path(), &["test", "--data", "y.csv", "--k", "auto", "--out", "r.csv"]);
    assert!(o.status.success());
    // floor(4 * 2.5^0.25) = 5
    assert_eq!(csv_value(&read(d.path(), "r.csv"), "k"), "5");
}

#[test]
fn human_output_has_six_significant_digits() {
    let d = TempDir::new().unwrap();
    simulated(d.path());
    let o = urkit(d.path(), &["test", "--data", "y.csv", "--k", "0", "--out", "r.csv"]);
    let s = stdout(&o);
    let line = s.lines().find(|l| l.trim_start().starts_with("t_DF")).unwrap();
    let printed = line.split_whitespace().last().unwrap();
    let full: f64 = csv_value(&read(d.path(), "r.csv"), "t_df").parse().unwrap();
    let rounded: f64 = format!("{full:.5e}").parse().unwrap();
    assert_eq!(printed.parse::<f64>().unwrap(), rounded);
    let digits = printed.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
    assert!(digits <= 6, "{printed}");
}

#[test]
fn degenerate_series_exits_2() {
    let d = TempDir::new().unwrap();
    let line: String = (1..=30).map(|t| format!("{t}\n")).collect();
    fs::write(d.path().join("line.csv"), line).unwrap();
    let o = urkit(d.path(), &["test", "--data", "line.csv", "--det", "ct", "--k", "0", "--method", "onestep"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn parse_errors_name_the_row_and_exit_1() {
    let d = TempDir::new().unwrap();
    let mut text: String = (1..=20).map(|t| format!("{}\n", t as f64 * 0.3)).collect();
    text.push_str("oops\n");
    fs::write(d.path().join("bad.csv"), text).unwrap();
    let o = urkit(d.path(), &["test", "--data", "bad.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 21") && err.contains("column 1"), "{err}");

    assert_eq!(urkit(d.path(), &["test", "--method", "nope", "--data", "bad.csv"]).status.code(), Some(1));
    assert_eq!(urkit(d.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(urkit(d.path(), &["test", "--k"]).status.code(), Some(1));
    assert_eq!(urkit(d.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_output_feeds_test_and_reruns() {
    let d = TempDir::new().unwrap();
    simulated(d.path());
    let o = urkit(d.path(), &["test", "--data", "y.csv", "--det", "ct", "--k", "1", "--out", "r1.csv"]);
    assert!(o.status.success());
    let o = urkit(d.path(), &["test", "--config", "r1.csv", "--out", "r2.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(body(&read(d.path(), "r1.csv")), body(&read(d.path(), "r2.csv")));
}

#[test]
fn cv_table_and_rejection_decisions() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("exp.ini"), EXPERIMENT).unwrap();
    let o = urkit(d.path(), &["cv", "--config", "exp.ini", "--out", "cv.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = read(d.path(), "cv.csv");
    assert!(table.contains("# command: cv"));
    for q in ["0.01", "0.05", "0.1"] {
        assert!(body(&table).contains(&format!("onestep,t_df,{q},")), "{table}");
    }
    // rerun from the emitted manifest
    let o = urkit(d.path(), &["cv", "--config", "cv.csv", "--out", "cv2.csv"]);
    assert!(o.status.success());
    assert_eq!(body(&table), body(&read(d.path(), "cv2.csv")));

    let o = urkit(d.path(), &["simulate", "--T", "100", "--seed", "4", "--out", "rw.csv"]);
    assert!(o.status.success());
    let o = urkit(d.path(), &["test", "--data", "rw.csv", "--method", "onestep", "--k", "0", "--cv", "cv.csv", "--out", "r.csv"]);
    let s = stdout(&o);
    assert!(s.contains("5% t_DF"), "{s}");
    let r = read(d.path(), "r.csv");
    let t: f64 = csv_value(&r, "t_df").parse().unwrap();
    let c: f64 = csv_value(&r, "cv:t_df:0.05").parse().unwrap();
    assert_eq!(csv_value(&r, "reject:t_df:0.05"), (t < c).to_string());
}

#[test]
fn experiment_outputs_and_thread_invariance() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("exp.ini"), EXPERIMENT).unwrap();
    let mut bodies = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = format!("rep{threads}.csv");
        let o = urkit(d.path(), &["experiment", "--config", "exp.ini", "--threads", threads, "--out", &out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let files = [out.clone(), format!("rep{threads}_power.csv"), format!("rep{threads}_cv.csv")];
        bodies.push(files.map(|f| body(&read(d.path(), &f)).to_string()));
    }
    assert!(bodies.iter().all(|b| *b == bodies[0]));
    let report = &bodies[0][0];
    assert!(report.contains("variance,null,residual,,mean_sigma2,"));
    assert!(report.contains("ordering_fraction"));
    assert!(bodies[0][1].starts_with("dgp,alpha,method,statistic,power,mc_se\n"));

    // URKIT_THREADS is honored as a fallback and does not change results.
    let o = Command::new(env!("CARGO_BIN_EXE_urkit"))
        .args(["experiment", "--config", "exp.ini", "--out", "env.csv"])
        .current_dir(d.path())
        .env("URKIT_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(body(&read(d.path(), "env.csv")), bodies[0][0]);

    let o = urkit(d.path(), &["experiment", "--config", "rep1.csv", "--out", "again.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(body(&read(d.path(), "again.csv")), bodies[0][0]);
}

#[test]
fn config_errors_are_field_level() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("bad.ini"), "[experiment]\nreps = many\n").unwrap();
    let o = urkit(d.path(), &["cv", "--config", "bad.ini"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[experiment] reps"));
}

#[test]
fn shipped_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "ini") {
            let text = fs::read_to_string(&path).unwrap();
            let mut cfg = urkit::config::parse_experiment(&text)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.reps = 200;
            urkit::montecarlo::run_experiment(&cfg, None, 0)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 4);
}
