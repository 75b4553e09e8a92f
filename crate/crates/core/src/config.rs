//! INI-style experiment configuration.
//!
//! ```text
//! # comment
//! [experiment]
//! methods = onestep, zeropad
//! det = c
//! T = 100
//! k = 0            # or `schwert` / `auto`
//! reps = 2000
//! seed = 1
//! nominal_size = 0.05
//! quantiles = 0.01, 0.05, 0.10
//! analyses = cv, size_power
//!
//! [dgp.null]       # defaults to a driftless Gaussian random walk
//! alpha = 1
//!
//! [dgp.a085]
//! alpha = 0.85
//! det = c
//! gamma = 0.5
//! error_ar = 0.3
//! sigma = 1
//! z0 = 0
//! burn_in = 0      # or `stationary`
//! innovations = gaussian   # or `t:5`
//! ```

use std::fmt::Write as _;

use ini::{Ini, Properties};

use crate::error::{Error, Result};
use crate::montecarlo::{Analysis, ExperimentConfig, KRule, NamedDgp, NULL_DGP_NAME};
use crate::simulation::{DgpConfig, Innovations, STATIONARY_BURN_IN};
use crate::unitroot::Method;

const EXPERIMENT_KEYS: &[&str] = &[
    "methods",
    "det",
    "T",
    "k",
    "reps",
    "seed",
    "nominal_size",
    "quantiles",
    "analyses",
];
const DGP_KEYS: &[&str] = &[
    "alpha",
    "det",
    "gamma",
    "error_ar",
    "sigma",
    "z0",
    "burn_in",
    "innovations",
];

fn field_err(section: &str, key: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("[{section}] {key}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(section: &str, key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| field_err(section, key, format!("cannot parse `{v}`")))
}

fn parse_list(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(section, key, s))
        .collect()
}

fn check_keys(section: &str, props: &Properties, allowed: &[&str]) -> Result<()> {
    for (key, _) in props.iter() {
        if !allowed.contains(&key) {
            return Err(field_err(section, key, "unknown key"));
        }
    }
    Ok(())
}

/// Parses a DGP section; keys that are absent keep the random-walk defaults.
pub fn parse_dgp(section: &str, props: &Properties) -> Result<DgpConfig> {
    check_keys(section, props, DGP_KEYS)?;
    let mut dgp = DgpConfig::default();
    for (key, v) in props.iter() {
        match key {
            "alpha" => dgp.alpha = parse_num(section, key, v)?,
            "det" => dgp.det = v.parse().map_err(|e| field_err(section, key, e))?,
            "gamma" => dgp.gamma = parse_list(section, key, v)?,
            "error_ar" => dgp.error_ar = parse_list(section, key, v)?,
            "sigma" => dgp.sigma = parse_num(section, key, v)?,
            "z0" => dgp.z0 = parse_num(section, key, v)?,
            "burn_in" => {
                dgp.burn_in = if v.trim() == "stationary" {
                    STATIONARY_BURN_IN
                } else {
                    parse_num(section, key, v)?
                }
            }
            "innovations" => dgp.innovations = parse_innovations(v).map_err(|e| field_err(section, key, e))?,
            _ => unreachable!("keys checked above"),
        }
    }
    Ok(dgp)
}

pub fn parse_innovations(v: &str) -> Result<Innovations> {
    let v = v.trim();
    if v == "gaussian" || v == "normal" {
        return Ok(Innovations::Gaussian);
    }
    if let Some(df) = v.strip_prefix("t:") {
        let df: f64 = df
            .parse()
            .map_err(|_| Error::Parse(format!("bad Student-t degrees of freedom `{df}`")))?;
        return Ok(Innovations::StudentT(df));
    }
    Err(Error::Parse(format!("unknown innovations `{v}` (gaussian or t:DF)")))
}

pub fn innovations_to_string(i: Innovations) -> String {
    match i {
        Innovations::Gaussian => "gaussian".into(),
        Innovations::StudentT(df) => format!("t:{df}"),
    }
}

pub fn parse_k_rule(v: &str) -> Result<KRule> {
    match v.trim() {
        "schwert" | "auto" => Ok(KRule::Schwert),
        s => s
            .parse()
            .map(KRule::Fixed)
            .map_err(|_| Error::Parse(format!("k must be an integer or `auto`, got `{s}`"))),
    }
}

/// Drops `#` comments, including trailing ones after a value or header.
fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.find('#').map_or(l, |i| &l[..i]).trim_end())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses and validates an experiment config.
pub fn parse_experiment(text: &str) -> Result<ExperimentConfig> {
    let ini = Ini::load_from_str(&strip_comments(text))
        .map_err(|e| Error::Parse(format!("config: {e}")))?;
    let mut cfg = ExperimentConfig::default();
    let mut saw_experiment = false;
    for (name, props) in ini.iter() {
        match name {
            None => {
                if props.iter().next().is_some() {
                    return Err(Error::InvalidConfig(
                        "keys must appear inside a [section]".into(),
                    ));
                }
            }
            Some("experiment") => {
                saw_experiment = true;
                parse_experiment_section(props, &mut cfg)?;
            }
            Some(s) => {
                let Some(dgp_name) = s.strip_prefix("dgp.") else {
                    return Err(Error::InvalidConfig(format!("[{s}]: unknown section")));
                };
                let dgp = parse_dgp(s, props)?;
                if dgp_name == NULL_DGP_NAME {
                    cfg.dgp_null = dgp;
                } else {
                    cfg.dgp_alts.push(NamedDgp {
                        name: dgp_name.to_string(),
                        config: dgp,
                    });
                }
            }
        }
    }
    if !saw_experiment {
        return Err(Error::InvalidConfig("missing [experiment] section".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_experiment_section(props: &Properties, cfg: &mut ExperimentConfig) -> Result<()> {
    const S: &str = "experiment";
    check_keys(S, props, EXPERIMENT_KEYS)?;
    for (key, v) in props.iter() {
        match key {
            "methods" => {
                let mut methods = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<Method>)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| field_err(S, key, e))?;
                methods.sort();
                methods.dedup();
                cfg.methods = methods;
            }
            "det" => cfg.spec = v.parse().map_err(|e| field_err(S, key, e))?,
            "T" => cfg.t = parse_num(S, key, v)?,
            "k" => cfg.k_rule = parse_k_rule(v).map_err(|e| field_err(S, key, e))?,
            "reps" => cfg.reps = parse_num(S, key, v)?,
            "seed" => cfg.base_seed = parse_num(S, key, v)?,
            "nominal_size" => cfg.nominal_size = parse_num(S, key, v)?,
            "quantiles" => cfg.quantiles = parse_list(S, key, v)?,
            "analyses" => {
                let mut a = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(Analysis::parse)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| field_err(S, key, e))?;
                a.sort();
                a.dedup();
                cfg.analyses = a;
            }
            _ => unreachable!("keys checked above"),
        }
    }
    Ok(())
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

/// Canonical `[dgp.NAME]` section; [`parse_dgp`] reads it back.
pub fn dgp_to_ini(name: &str, dgp: &DgpConfig) -> String {
    let mut out = String::new();
    write_dgp(&mut out, name, dgp);
    out
}

fn write_dgp(out: &mut String, name: &str, dgp: &DgpConfig) {
    let _ = writeln!(out, "[dgp.{name}]");
    let _ = writeln!(out, "alpha = {}", dgp.alpha);
    let _ = writeln!(out, "det = {}", dgp.det);
    let _ = writeln!(out, "gamma = {}", join(&dgp.gamma));
    let _ = writeln!(out, "error_ar = {}", join(&dgp.error_ar));
    let _ = writeln!(out, "sigma = {}", dgp.sigma);
    let _ = writeln!(out, "z0 = {}", dgp.z0);
    let _ = writeln!(out, "burn_in = {}", dgp.burn_in);
    let _ = writeln!(out, "innovations = {}", innovations_to_string(dgp.innovations));
}

/// Canonical text form; parsing it back yields an equal config.
pub fn to_ini_string(cfg: &ExperimentConfig) -> String {
    let mut out = String::from("[experiment]\n");
    let methods: Vec<&str> = cfg.methods.iter().map(Method::name).collect();
    let _ = writeln!(out, "methods = {}", methods.join(", "));
    let _ = writeln!(out, "det = {}", cfg.spec);
    let _ = writeln!(out, "T = {}", cfg.t);
    match cfg.k_rule {
        KRule::Fixed(k) => {
            let _ = writeln!(out, "k = {k}");
        }
        KRule::Schwert => out.push_str("k = schwert\n"),
    }
    let _ = writeln!(out, "reps = {}", cfg.reps);
    let _ = writeln!(out, "seed = {}", cfg.base_seed);
    let _ = writeln!(out, "nominal_size = {}", cfg.nominal_size);
    let _ = writeln!(out, "quantiles = {}", join(&cfg.quantiles));
    let analyses: Vec<&str> = cfg.analyses.iter().map(Analysis::name).collect();
    let _ = writeln!(out, "analyses = {}", analyses.join(", "));
    out.push('\n');
    write_dgp(&mut out, NULL_DGP_NAME, &cfg.dgp_null);
    for d in &cfg.dgp_alts {
        out.push('\n');
        write_dgp(&mut out, &d.name, &d.config);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deterministics::DetSpec;

    const SAMPLE: &str = "\
# power study
[experiment]
methods = zeropad, onestep
det = ct
T = 150
k = auto
reps = 1500
seed = 42
quantiles = 0.01, 0.05, 0.1
analyses = size_power, variance

[dgp.near]
alpha = 0.95
det = ct
gamma = 1, 0.1
error_ar = 0.3
burn_in = stationary
innovations = t:6
";

    #[test]
    fn parses_sample() {
        let cfg = parse_experiment(SAMPLE).unwrap();
        assert_eq!(cfg.methods, vec![Method::OneStep, Method::ZeroPadded]);
        assert_eq!(cfg.spec, DetSpec::linear_trend());
        assert_eq!((cfg.t, cfg.reps, cfg.base_seed), (150, 1500, 42));
        assert_eq!(cfg.k_rule, KRule::Schwert);
        assert_eq!(cfg.analyses, vec![Analysis::SizePower, Analysis::Variance]);
        assert_eq!(cfg.dgp_null, DgpConfig::default());
        let near = &cfg.dgp_alts[0];
        assert_eq!(near.name, "near");
        assert_eq!(near.config.gamma, vec![1.0, 0.1]);
        assert_eq!(near.config.burn_in, STATIONARY_BURN_IN);
        assert_eq!(near.config.innovations, Innovations::StudentT(6.0));
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = parse_experiment(SAMPLE).unwrap();
        let text = to_ini_string(&cfg);
        assert_eq!(parse_experiment(&text).unwrap(), cfg);
    }

    #[test]
    fn inline_comments_are_stripped() {
        let cfg = parse_experiment("[experiment]\nk = 3   # fixed\n\n[dgp.null]   # rw\nalpha = 1\n")
            .unwrap();
        assert_eq!(cfg.k_rule, KRule::Fixed(3));
    }

    #[test]
    fn field_level_errors() {
        let err = parse_experiment("[experiment]\nT = ten\n").unwrap_err().to_string();
        assert!(err.contains("[experiment] T"), "{err}");
        let err = parse_experiment("[experiment]\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        let err = parse_experiment("[experiment]\n[dgp.x]\nerror_ar = 1.2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("dgp.x"), "{err}");
        assert!(parse_experiment("[dgp.null]\nalpha = 1\n").is_err());
        assert!(parse_experiment("[experiment]\n[dgp.null]\nalpha = 0.9\n").is_err());
    }
}
