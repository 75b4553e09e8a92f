//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ini::Ini;
use urkit::config::{dgp_to_ini, parse_dgp, parse_experiment, parse_innovations, to_ini_string};
use urkit::io::read_series;
use urkit::montecarlo::{
    run_experiment, tabulate_critical_values, CriticalValueTable, ExperimentConfig, ExperimentReport,
};
use urkit::simulation::{simulate as simulate_series, DgpConfig, SeedSpec, STATIONARY_BURN_IN};
use urkit::unitroot::{run_method, schwert_lags};
use urkit::{DetSpec, Error, Method, Statistic, UnitRootResult};

use crate::format::{sig6, sig6_list};
use crate::manifest::{split_body, Manifest};
use crate::{ExperimentArgs, McArgs, SimulateArgs, TestArgs};

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateResidualVariance
            | Error::DegenerateDof { .. }
            | Error::ZeroStandardError { .. }
            | Error::TooManyDegenerate { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a config file, unwrapping it when it carries a manifest.
fn load_config(path: &Path, command: &str) -> Result<(String, Option<Manifest>), Failure> {
    let text = read_text(path)?;
    match Manifest::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))? {
        Some(m) if m.command != command => Err(usage(format!(
            "{}: manifest is for `{}`, not `{command}`",
            path.display(),
            m.command
        ))),
        Some(m) => Ok((m.config.clone(), Some(m))),
        None => Ok((text, None)),
    }
}

fn parse_ini(text: &str, path: &Path) -> Result<Ini, Failure> {
    Ini::load_from_str(text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_f64_list(flag: &str, v: &str) -> Result<Vec<f64>, Failure> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| usage(format!("--{flag}: cannot parse `{s}`"))))
        .collect()
}

fn load_cv_table(path: &Path) -> Result<CriticalValueTable, Failure> {
    let text = read_text(path)?;
    CriticalValueTable::from_csv(split_body(&text))
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------- test

struct TestSettings {
    data: Option<PathBuf>,
    method: String,
    det: String,
    k: String,
    cv: Option<PathBuf>,
}

fn stat_labels(method: Method) -> [&'static str; 2] {
    if method == Method::ZeroPadded {
        ["t_DF*", "t_LM*"]
    } else {
        ["t_DF", "t_LM"]
    }
}

const TEST_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

pub fn test(a: &TestArgs) -> Result<(), Failure> {
    let mut s = TestSettings {
        data: None,
        method: Method::TwoStep.to_string(),
        det: "c".into(),
        k: "auto".into(),
        cv: None,
    };
    if let Some(path) = &a.config {
        let (text, _) = load_config(path, "test")?;
        let ini = parse_ini(&text, path)?;
        let sec = ini
            .section(Some("test"))
            .ok_or_else(|| usage(format!("{}: missing [test] section", path.display())))?;
        for (key, v) in sec.iter() {
            match key {
                "data" => s.data = Some(v.into()),
                "method" => s.method = v.into(),
                "det" => s.det = v.into(),
                "k" => s.k = v.into(),
                "cv" => s.cv = Some(v.into()),
                _ => return Err(usage(format!("[test] {key}: unknown key"))),
            }
        }
    }
    if let Some(v) = &a.data {
        s.data = Some(v.clone());
    }
    if let Some(v) = &a.method {
        s.method = v.clone();
    }
    if let Some(v) = &a.det {
        s.det = v.clone();
    }
    if let Some(v) = &a.k {
        s.k = v.clone();
    }
    if let Some(v) = &a.cv {
        s.cv = Some(v.clone());
    }

    let data = s.data.ok_or_else(|| usage("--data is required"))?;
    let series = read_series(&data)?;
    let method: Method = s.method.parse()?;
    let spec: DetSpec = s.det.parse().map_err(|e: Error| usage(format!("--det: {e}")))?;
    let t = series.values.len();
    let k = match s.k.trim() {
        "auto" | "schwert" => schwert_lags(t),
        v => v
            .parse()
            .map_err(|_| usage(format!("--k must be a non-negative integer or `auto`, got `{v}`")))?,
    };
    let cv = s.cv.as_deref().map(load_cv_table).transpose()?;
    let result = run_method(method, &series.values, &spec, k)?;

    let data_abs = fs::canonicalize(&data).unwrap_or(data);
    let mut config = format!(
        "[test]\ndata = {}\nmethod = {method}\ndet = {spec}\nk = {k}\n",
        data_abs.display()
    );
    if let Some(p) = &s.cv {
        let p = fs::canonicalize(p).unwrap_or_else(|_| p.clone());
        let _ = writeln!(config, "cv = {}", p.display());
    }
    let manifest = Manifest::new("test", None, config).render();

    if let Some(table) = &cv {
        let m = &table.meta;
        if m.spec != spec.to_string() || m.t != t || m.k != k {
            eprintln!(
                "urkit: warning: critical values were tabulated for det={}, T={}, k={}; this test uses det={spec}, T={t}, k={k}",
                m.spec, m.t, m.k
            );
        }
    }
    print!("{manifest}{}", human_test_report(&result, &spec, t, cv.as_ref()));
    if let Some(out) = &a.out {
        emit(Some(out), &format!("{manifest}{}", csv_test_report(&result, &spec, t, cv.as_ref())))?;
    }
    Ok(())
}

fn decisions(r: &UnitRootResult, cv: &CriticalValueTable) -> Vec<(f64, Statistic, Option<f64>)> {
    let mut out = Vec::new();
    for q in TEST_LEVELS {
        for stat in Statistic::ALL {
            out.push((q, stat, cv.lookup(r.method, stat, q)));
        }
    }
    out
}

fn named(labels: &[String], values: &[f64]) -> String {
    labels
        .iter()
        .zip(values)
        .map(|(l, v)| format!("{l}={}", sig6(*v)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn human_test_report(r: &UnitRootResult, spec: &DetSpec, t: usize, cv: Option<&CriticalValueTable>) -> String {
    let [df, lm] = stat_labels(r.method);
    let mut o = String::new();
    let _ = writeln!(o, "unit root test: method {}, deterministics {spec}", r.method);
    let rows: [(&str, String); 10] = [
        ("observations", t.to_string()),
        ("T_eff", r.t_effective.to_string()),
        ("k", r.k.to_string()),
        ("m", r.m.to_string()),
        ("rho", sig6(r.rho_hat)),
        ("se(rho)", sig6(r.se_rho)),
        (df, sig6(r.t_df)),
        ("F", sig6(r.f_stat)),
        ("chi", sig6(r.chi)),
        (lm, sig6(r.t_lm)),
    ];
    for (name, v) in rows {
        let _ = writeln!(o, "  {name:<18}{v}");
    }
    if !r.beta.is_empty() {
        let _ = writeln!(o, "  {:<18}{}", "beta", sig6_list(&r.beta));
    }
    let det_labels = &r.design.labels()[..r.det_columns];
    if let Some(g) = &r.gamma_structural {
        let _ = writeln!(o, "  {:<18}{}", "gamma structural", named(det_labels, g));
    }
    if let Some(g) = &r.gamma_step1 {
        let _ = writeln!(o, "  {:<18}{}", "gamma step 1", named(&spec.labels(), g));
    }
    let _ = writeln!(o, "  {:<18}{}", "design", r.design.labels().join(", "));
    match cv {
        None => {
            let _ = writeln!(o, "critical values: none supplied (pass --cv TABLE for rejection decisions)");
        }
        Some(table) => {
            let _ = writeln!(o, "left-tail decisions (reject when statistic < critical value):");
            for (q, stat, c) in decisions(r, table) {
                let label = if stat == Statistic::TDf { df } else { lm };
                let level = format!("{}%", sig6(100.0 * q));
                match c {
                    Some(c) => {
                        let verdict = if r.statistic(stat) < c { "reject" } else { "do not reject" };
                        let _ = writeln!(o, "  {level:>4} {label:<6} cv {:<12}{verdict}", sig6(c));
                    }
                    None => {
                        let _ = writeln!(o, "  {level:>4} {label:<6} no critical value in table");
                    }
                }
            }
        }
    }
    o
}

fn csv_test_report(r: &UnitRootResult, spec: &DetSpec, t: usize, cv: Option<&CriticalValueTable>) -> String {
    let mut o = String::from("quantity,value\n");
    let _ = writeln!(o, "method,{}", r.method);
    let _ = writeln!(o, "det,{spec}");
    let _ = writeln!(o, "observations,{t}");
    let _ = writeln!(o, "t_effective,{}", r.t_effective);
    let _ = writeln!(o, "k,{}", r.k);
    let _ = writeln!(o, "m,{}", r.m);
    let _ = writeln!(o, "rho,{}", r.rho_hat);
    let _ = writeln!(o, "se_rho,{}", r.se_rho);
    let _ = writeln!(o, "t_df,{}", r.t_df);
    let _ = writeln!(o, "f,{}", r.f_stat);
    let _ = writeln!(o, "chi,{}", r.chi);
    let _ = writeln!(o, "t_lm,{}", r.t_lm);
    for (j, b) in r.beta.iter().enumerate() {
        let _ = writeln!(o, "beta:{},{b}", j + 1);
    }
    let det_labels = &r.design.labels()[..r.det_columns];
    if let Some(g) = &r.gamma_structural {
        for (l, v) in det_labels.iter().zip(g) {
            let _ = writeln!(o, "gamma_structural:{l},{v}");
        }
    }
    if let Some(g) = &r.gamma_step1 {
        for (l, v) in spec.labels().iter().zip(g) {
            let _ = writeln!(o, "gamma_step1:{l},{v}");
        }
    }
    let _ = writeln!(o, "design,{}", r.design.labels().join(";"));
    if let Some(table) = cv {
        for (q, stat, c) in decisions(r, table) {
            if let Some(c) = c {
                let _ = writeln!(o, "cv:{stat}:{q},{c}");
                let _ = writeln!(o, "reject:{stat}:{q},{}", r.statistic(stat) < c);
            }
        }
    }
    o
}

// ------------------------------------------------------------ simulate

pub fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let mut t = 100;
    let mut seed = 1;
    let mut dgp = DgpConfig::default();
    if let Some(path) = &a.config {
        let (text, _) = load_config(path, "simulate")?;
        let ini = parse_ini(&text, path)?;
        for (name, props) in ini.iter() {
            match name {
                None if props.iter().next().is_none() => {}
                Some("simulate") => {
                    for (key, v) in props.iter() {
                        let bad = || usage(format!("[simulate] {key}: cannot parse `{v}`"));
                        match key {
                            "T" => t = v.parse().map_err(|_| bad())?,
                            "seed" => seed = v.parse().map_err(|_| bad())?,
                            _ => return Err(usage(format!("[simulate] {key}: unknown key"))),
                        }
                    }
                }
                Some(s) if s.starts_with("dgp.") => dgp = parse_dgp(s, props)?,
                Some(s) => return Err(usage(format!("[{s}]: unknown section"))),
                None => return Err(usage("keys must appear inside a [section]")),
            }
        }
    }
    if let Some(v) = a.t {
        t = v;
    }
    if let Some(v) = a.seed {
        seed = v;
    }
    if let Some(v) = a.alpha {
        dgp.alpha = v;
    }
    if let Some(v) = a.sigma {
        dgp.sigma = v;
    }
    if let Some(v) = &a.det {
        dgp.det = v.parse().map_err(|e: Error| usage(format!("--det: {e}")))?;
    }
    if let Some(v) = &a.gamma {
        dgp.gamma = parse_f64_list("gamma", v)?;
    }
    if let Some(v) = &a.error_ar {
        dgp.error_ar = parse_f64_list("error-ar", v)?;
    }
    if let Some(v) = a.z0 {
        dgp.z0 = v;
    }
    if let Some(v) = &a.burn_in {
        dgp.burn_in = match v.trim() {
            "stationary" => STATIONARY_BURN_IN,
            s => s.parse().map_err(|_| usage(format!("--burn-in: cannot parse `{s}`")))?,
        };
    }
    if let Some(v) = &a.innovations {
        dgp.innovations = parse_innovations(v).map_err(|e| usage(format!("--innovations: {e}")))?;
    }
    // A deterministic spec without coefficients gets a zero mean.
    if dgp.gamma.is_empty() {
        dgp.gamma = vec![0.0; dgp.det.column_count()];
    }

    let y = simulate_series(&dgp, t, SeedSpec::new(seed, 0))?;
    let config = format!("[simulate]\nT = {t}\nseed = {seed}\n\n{}", dgp_to_ini("series", &dgp));
    let mut text = Manifest::new("simulate", Some(seed), config).render();
    text.push_str("t,y\n");
    for (i, v) in y.iter().enumerate() {
        let _ = writeln!(text, "{},{v}", i + 1);
    }
    emit(a.out.as_deref(), &text)
}

// ------------------------------------------------------- cv / experiment

fn load_experiment(a: &McArgs, command: &str) -> Result<(ExperimentConfig, Option<Manifest>), Failure> {
    let (text, manifest) = load_config(&a.config, command)?;
    let mut cfg = parse_experiment(&text).map_err(|e| usage(format!("{}: {e}", a.config.display())))?;
    if let Some(seed) = a.seed {
        cfg.base_seed = seed;
    }
    Ok((cfg, manifest))
}

fn human_cv(table: &CriticalValueTable) -> String {
    let mut o = format!(
        "critical values: det {}, T {}, k {}, reps {}, dropped {}\n",
        table.meta.spec, table.meta.t, table.meta.k, table.meta.reps, table.meta.dropped
    );
    for e in &table.entries {
        let _ = writeln!(
            o,
            "  {:<9}{:<6}q {:<7}{:<12}s.e. {}",
            e.method.to_string(),
            e.statistic.to_string(),
            sig6(e.quantile),
            sig6(e.value),
            sig6(e.std_error)
        );
    }
    o
}

pub fn cv(a: &McArgs, threads: usize) -> Result<(), Failure> {
    let (cfg, _) = load_experiment(a, "cv")?;
    let table = tabulate_critical_values(&cfg, threads)?;
    let manifest = Manifest::new("cv", Some(cfg.base_seed), to_ini_string(&cfg)).render();
    emit(a.out.as_deref(), &format!("{manifest}{}", table.to_csv()))?;
    if a.out.is_some() {
        print!("{manifest}{}", human_cv(&table));
    }
    Ok(())
}

fn human_report(r: &ExperimentReport) -> String {
    let mut o = format!(
        "experiment: det {}, T {}, k {}, reps {}, dropped {}\n",
        r.meta.spec, r.meta.t, r.meta.k, r.meta.reps, r.meta.dropped
    );
    if !r.rejection_rates.is_empty() {
        o.push_str("rejection rates:\n");
        for x in &r.rejection_rates {
            let _ = writeln!(
                o,
                "  {:<10}alpha {:<9}{:<9}{:<6}{:<10}(s.e. {})",
                x.dgp,
                sig6(x.alpha),
                x.method.to_string(),
                x.statistic.to_string(),
                sig6(x.rate),
                sig6(x.mc_se)
            );
        }
    }
    if !r.variance_comparison.is_empty() {
        o.push_str("residual variance, two-step vs residual-only:\n");
        for v in &r.variance_comparison {
            let _ = writeln!(
                o,
                "  {:<10}alpha {:<9}sigma2 {} vs {}, difference {} (s.e. {}), ordered {}",
                v.dgp,
                sig6(v.alpha),
                sig6(v.mean_sigma2_two_step),
                sig6(v.mean_sigma2_residual_only),
                sig6(v.mean_difference),
                sig6(v.difference_mc_se),
                sig6(v.ordering_fraction)
            );
        }
    }
    if !r.gamma_mse.is_empty() {
        o.push_str("gamma MSE:\n");
        for g in &r.gamma_mse {
            let _ = writeln!(
                o,
                "  {:<10}{:<10}{:<8}{} (s.e. {})",
                g.dgp,
                g.estimator.name(),
                g.coefficient,
                sig6(g.mse),
                sig6(g.mc_se)
            );
        }
    }
    o
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

pub fn experiment(a: &ExperimentArgs, threads: usize) -> Result<(), Failure> {
    let (cfg, manifest) = load_experiment(&a.mc, "experiment")?;
    let cv_path = a
        .cv
        .clone()
        .or_else(|| manifest.as_ref().and_then(|m| m.extra("cv")).map(PathBuf::from));
    let cv = cv_path.as_deref().map(load_cv_table).transpose()?;
    let (report, table) = run_experiment(&cfg, cv.as_ref(), threads)?;

    let mut m = Manifest::new("experiment", Some(cfg.base_seed), to_ini_string(&cfg));
    if let Some(p) = &cv_path {
        let p = fs::canonicalize(p).unwrap_or_else(|_| p.clone());
        m = m.with_extra("cv", p.display().to_string());
    }
    let header = m.render();
    let out = a.mc.out.as_deref();
    emit(out, &format!("{header}{}", report.to_csv()))?;

    let plot_out = a.plot_out.clone().or_else(|| out.map(|o| sibling(o, "power")));
    if let Some(p) = plot_out.filter(|_| !report.rejection_rates.is_empty()) {
        emit(Some(&p), &format!("{header}{}", report.power_curve_csv()))?;
    }
    let cv_out = a.cv_out.clone().or_else(|| out.map(|o| sibling(o, "cv")));
    if let (Some(p), Some(t)) = (cv_out, &table) {
        emit(Some(&p), &format!("{header}{}", t.to_csv()))?;
    }
    if out.is_some() {
        print!("{header}{}", human_report(&report));
        if let Some(t) = &table {
            print!("{}", human_cv(t));
        }
    }
    Ok(())
}
