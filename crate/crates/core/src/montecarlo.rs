//! Monte Carlo critical values, size/power, and efficiency experiments.
//!
//! Replication `i` of every DGP draws from `SeedSpec(base_seed, i)`.
//! Replications run on a rayon pool and are collected back in index order
//! before any reduction, so results are bit-identical for any worker count.

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config;
use crate::deterministics::DetSpec;
use crate::error::{Error, Result};
use crate::simulation::{simulate, DgpConfig, SeedSpec};
use crate::unitroot::{
    run_method, schwert_lags, two_step_df, zero_padded_df, Method, Statistic, TwoStepForm,
    UnitRootResult,
};

/// Maximum fraction of degenerate replications tolerated in one run.
pub const MAX_DROP_FRACTION: f64 = 0.001;

/// Augmentation lag choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    Fixed(usize),
    /// `floor(4 (T/100)^{1/4})`.
    Schwert,
}

impl KRule {
    pub fn lags(&self, t: usize) -> usize {
        match self {
            KRule::Fixed(k) => *k,
            KRule::Schwert => schwert_lags(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Analysis {
    CriticalValues,
    SizePower,
    Variance,
    Efficiency,
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::CriticalValues => "cv",
            Analysis::SizePower => "size_power",
            Analysis::Variance => "variance",
            Analysis::Efficiency => "efficiency",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "cv" => Ok(Analysis::CriticalValues),
            "size_power" | "power" => Ok(Analysis::SizePower),
            "variance" => Ok(Analysis::Variance),
            "efficiency" => Ok(Analysis::Efficiency),
            other => Err(Error::Parse(format!(
                "unknown analysis `{other}` (expected cv, size_power, variance, efficiency)"
            ))),
        }
    }
}

/// A DGP with the name used to key report rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedDgp {
    pub name: String,
    pub config: DgpConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub spec: DetSpec,
    pub t: usize,
    pub k_rule: KRule,
    pub reps: usize,
    pub base_seed: u64,
    pub dgp_null: DgpConfig,
    pub dgp_alts: Vec<NamedDgp>,
    pub nominal_size: f64,
    pub quantiles: Vec<f64>,
    pub analyses: Vec<Analysis>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::OneStep],
            spec: DetSpec::constant(),
            t: 100,
            k_rule: KRule::Fixed(0),
            reps: 1000,
            base_seed: 1,
            dgp_null: DgpConfig::default(),
            dgp_alts: Vec::new(),
            nominal_size: 0.05,
            quantiles: vec![0.01, 0.05, 0.10],
            analyses: vec![Analysis::CriticalValues],
        }
    }
}

pub const NULL_DGP_NAME: &str = "null";

impl ExperimentConfig {
    pub fn k(&self) -> usize {
        self.k_rule.lags(self.t)
    }

    /// The null DGP followed by every alternative.
    pub fn dgps(&self) -> Vec<NamedDgp> {
        let mut out = vec![NamedDgp {
            name: NULL_DGP_NAME.into(),
            config: self.dgp_null.clone(),
        }];
        out.extend(self.dgp_alts.iter().cloned());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.methods.is_empty() {
            return bad("[experiment] methods: at least one method required".into());
        }
        if self.t < 2 {
            return bad(format!("[experiment] T: must be at least 2, got {}", self.t));
        }
        if self.reps == 0 {
            return bad("[experiment] reps: must be positive".into());
        }
        if !(self.nominal_size > 0.0 && self.nominal_size < 1.0) {
            return bad(format!(
                "[experiment] nominal_size: must lie in (0, 1), got {}",
                self.nominal_size
            ));
        }
        if let Some(q) = self.quantiles.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return bad(format!("[experiment] quantiles: {q} is outside (0, 1)"));
        }
        if self.dgp_null.alpha != 1.0 {
            return bad(format!(
                "[dgp.null] alpha: the null DGP must have alpha = 1, got {}",
                self.dgp_null.alpha
            ));
        }
        for dgp in self.dgps() {
            dgp.config.validate().map_err(|e| {
                Error::InvalidConfig(format!("[dgp.{}] {e}", dgp.name))
            })?;
        }
        Ok(())
    }

    /// Short hash of the canonical config text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(config::to_ini_string(self).as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

/// Runs `f(i)` for `i in 0..reps` on `threads` workers (0 = rayon default)
/// and returns the results in replication order.
pub fn run_replications<T, F>(reps: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| (0..reps as u64).into_par_iter().map(&f).collect())
}

fn is_degenerate_error(e: &Error) -> bool {
    matches!(
        e,
        Error::DegenerateResidualVariance | Error::RankDeficient { .. } | Error::ZeroStandardError { .. }
    )
}

/// Collapses per-replication outcomes: degenerate replications are dropped
/// and counted, any other error aborts.
fn collect_outcomes<T>(outcomes: Vec<Result<T>>) -> Result<(Vec<T>, usize)> {
    let reps = outcomes.len();
    let mut kept = Vec::with_capacity(reps);
    let mut dropped = 0;
    for o in outcomes {
        match o {
            Ok(v) => kept.push(v),
            Err(e) if is_degenerate_error(&e) => dropped += 1,
            Err(e) => return Err(e),
        }
    }
    if dropped as f64 > MAX_DROP_FRACTION * reps as f64 {
        return Err(Error::TooManyDegenerate { dropped, reps });
    }
    Ok((kept, dropped))
}

/// Test statistics of every configured method over all kept replications.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticsSample {
    /// Per method, `(t_df, t_lm)` per kept replication.
    pub by_method: Vec<(Method, Vec<(f64, f64)>)>,
    pub dropped: usize,
}

impl StatisticsSample {
    pub fn values(&self, method: Method, stat: Statistic) -> Option<Vec<f64>> {
        self.by_method.iter().find(|(m, _)| *m == method).map(|(_, v)| {
            v.iter()
                .map(|&(df, lm)| match stat {
                    Statistic::TDf => df,
                    Statistic::TLm => lm,
                })
                .collect()
        })
    }
}

/// Simulates `config.reps` paths from `dgp` and runs every configured method.
pub fn simulate_statistics(
    config: &ExperimentConfig,
    dgp: &DgpConfig,
    threads: usize,
) -> Result<StatisticsSample> {
    let k = config.k();
    let outcomes = run_replications(config.reps, threads, |i| -> Result<Vec<(f64, f64)>> {
        let y = simulate(dgp, config.t, SeedSpec::new(config.base_seed, i))?;
        config
            .methods
            .iter()
            .map(|&m| run_method(m, &y, &config.spec, k).map(|r| (r.t_df, r.t_lm)))
            .collect()
    });
    let (kept, dropped) = collect_outcomes(outcomes)?;
    let by_method = config
        .methods
        .iter()
        .enumerate()
        .map(|(j, &m)| (m, kept.iter().map(|row| row[j]).collect()))
        .collect();
    Ok(StatisticsSample { by_method, dropped })
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of empty sample");
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Standard error of an empirical quantile from the binomial order-statistic
/// interval `np ± √(np(1-p))`, halved.
pub fn quantile_standard_error(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len() as f64;
    let half = (n * q * (1.0 - q)).sqrt();
    let clamp = |x: f64| x.clamp(0.0, n - 1.0) as usize;
    let lo = clamp((n * q - half).floor());
    let hi = clamp((n * q + half).ceil());
    (sorted[hi] - sorted[lo]) / 2.0
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvEntry {
    pub method: Method,
    pub statistic: Statistic,
    pub quantile: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Run metadata written as `#` comments above every CSV table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMeta {
    pub config_hash: String,
    pub spec: String,
    pub t: usize,
    pub k: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub dropped: usize,
}

impl RunMeta {
    fn from_config(config: &ExperimentConfig, dropped: usize) -> Self {
        Self {
            config_hash: config.hash(),
            spec: config.spec.to_string(),
            t: config.t,
            k: config.k(),
            reps: config.reps,
            base_seed: config.base_seed,
            dropped,
        }
    }

    fn write_header(&self, out: &mut String) {
        let _ = writeln!(out, "# config_hash: {}", self.config_hash);
        let _ = writeln!(out, "# det: {}", self.spec);
        let _ = writeln!(out, "# T: {}", self.t);
        let _ = writeln!(out, "# k: {}", self.k);
        let _ = writeln!(out, "# reps: {}", self.reps);
        let _ = writeln!(out, "# seed: {}", self.base_seed);
        let _ = writeln!(out, "# dropped: {}", self.dropped);
    }

    fn read_header(text: &str) -> Self {
        let mut meta = RunMeta::default();
        for line in text.lines() {
            let Some(rest) = line.strip_prefix("# ") else { continue };
            let Some((key, value)) = rest.split_once(": ") else { continue };
            let value = value.trim();
            match key {
                "config_hash" => meta.config_hash = value.into(),
                "det" => meta.spec = value.into(),
                "T" => meta.t = value.parse().unwrap_or_default(),
                "k" => meta.k = value.parse().unwrap_or_default(),
                "reps" => meta.reps = value.parse().unwrap_or_default(),
                "seed" => meta.base_seed = value.parse().unwrap_or_default(),
                "dropped" => meta.dropped = value.parse().unwrap_or_default(),
                _ => {}
            }
        }
        meta
    }
}

/// Empirical null quantiles per (method, statistic, quantile).
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueTable {
    pub entries: Vec<CvEntry>,
    pub meta: RunMeta,
}

const QUANTILE_MATCH_TOL: f64 = 1e-12;

impl CriticalValueTable {
    pub fn lookup(&self, method: Method, statistic: Statistic, quantile: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| {
                e.method == method
                    && e.statistic == statistic
                    && (e.quantile - quantile).abs() < QUANTILE_MATCH_TOL
            })
            .map(|e| e.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.meta.write_header(&mut out);
        out.push_str("method,statistic,quantile,value,std_error\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.method, e.statistic, e.quantile, e.value, e.std_error
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let meta = RunMeta::read_header(text);
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("critical value table: {e}")))?;
            let field = |j: usize| {
                rec.get(j).ok_or_else(|| {
                    Error::Parse(format!("critical value table row {}: missing column {}", i + 1, j + 1))
                })
            };
            let num = |j: usize| -> Result<f64> {
                field(j)?.parse().map_err(|_| {
                    Error::Parse(format!("critical value table row {}: column {} is not numeric", i + 1, j + 1))
                })
            };
            entries.push(CvEntry {
                method: field(0)?.parse()?,
                statistic: field(1)?.parse()?,
                quantile: num(2)?,
                value: num(3)?,
                std_error: num(4)?,
            });
        }
        Ok(Self { entries, meta })
    }
}

/// Simulates the null DGP and tabulates empirical quantiles of `t_df` and
/// `t_lm` for each method.
pub fn tabulate_critical_values(config: &ExperimentConfig, threads: usize) -> Result<CriticalValueTable> {
    config.validate()?;
    let sample = simulate_statistics(config, &config.dgp_null, threads)?;
    let mut entries = Vec::new();
    for &method in &config.methods {
        for stat in Statistic::ALL {
            let values = sorted(sample.values(method, stat).unwrap_or_default());
            if values.is_empty() {
                return Err(Error::TooManyDegenerate {
                    dropped: sample.dropped,
                    reps: config.reps,
                });
            }
            let mut qs = config.quantiles.clone();
            qs.sort_by(f64::total_cmp);
            qs.dedup();
            for q in qs {
                entries.push(CvEntry {
                    method,
                    statistic: stat,
                    quantile: q,
                    value: quantile_sorted(&values, q),
                    std_error: quantile_standard_error(&values, q),
                });
            }
        }
    }
    Ok(CriticalValueTable {
        entries,
        meta: RunMeta::from_config(config, sample.dropped),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionRate {
    pub method: Method,
    pub statistic: Statistic,
    pub dgp: String,
    pub alpha: f64,
    pub critical_value: f64,
    pub rate: f64,
    /// `√(r(1-r)/reps)`.
    pub mc_se: f64,
    pub reps_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceComparison {
    pub dgp: String,
    pub alpha: f64,
    pub mean_sigma2_two_step: f64,
    pub mean_sigma2_residual_only: f64,
    /// Mean of `sigma2(residual-only) - sigma2(two-step)`.
    pub mean_difference: f64,
    pub difference_mc_se: f64,
    /// Share of replications with `sigma2(residual-only) >= sigma2(two-step)`.
    pub ordering_fraction: f64,
    /// Fraction with `rss(residual_only) >= rss(two_step)`.
    pub rss_ordering_fraction: f64,
    pub reps_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaEstimator {
    /// γ̂ from the detrending regression.
    StepOne,
    /// γ̃ from the two-step levels regression.
    TwoStep,
    /// γ̄ from the zero-padded regression.
    ZeroPadded,
}

impl GammaEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            GammaEstimator::StepOne => "step1",
            GammaEstimator::TwoStep => "twostep",
            GammaEstimator::ZeroPadded => "zeropad",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaMse {
    pub dgp: String,
    pub estimator: GammaEstimator,
    pub coefficient: String,
    pub mse: f64,
    pub mc_se: f64,
    pub reps_used: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub meta: RunMeta,
    pub rejection_rates: Vec<RejectionRate>,
    pub variance_comparison: Vec<VarianceComparison>,
    pub gamma_mse: Vec<GammaMse>,
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            meta: RunMeta::from_config(config, 0),
            ..Self::default()
        }
    }

    pub fn merge(&mut self, other: ExperimentReport) {
        self.meta.dropped += other.meta.dropped;
        self.rejection_rates.extend(other.rejection_rates);
        self.variance_comparison.extend(other.variance_comparison);
        self.gamma_mse.extend(other.gamma_mse);
    }

    pub fn rate(&self, method: Method, statistic: Statistic, dgp: &str) -> Option<&RejectionRate> {
        self.rejection_rates
            .iter()
            .find(|r| r.method == method && r.statistic == statistic && r.dgp == dgp)
    }

    /// One row per reported quantity:
    /// `section,dgp,method,statistic,quantity,value,mc_se`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.meta.write_header(&mut out);
        out.push_str("section,dgp,method,statistic,quantity,value,mc_se\n");
        for r in &self.rejection_rates {
            let _ = writeln!(
                out,
                "rejection,{},{},{},critical_value,{},",
                r.dgp, r.method, r.statistic, r.critical_value
            );
            let _ = writeln!(
                out,
                "rejection,{},{},{},rate,{},{}",
                r.dgp, r.method, r.statistic, r.rate, r.mc_se
            );
        }
        for v in &self.variance_comparison {
            let _ = writeln!(out, "variance,{},twostep,,mean_sigma2,{},", v.dgp, v.mean_sigma2_two_step);
            let _ = writeln!(
                out,
                "variance,{},residual,,mean_sigma2,{},",
                v.dgp, v.mean_sigma2_residual_only
            );
            let _ = writeln!(
                out,
                "variance,{},residual-twostep,,mean_difference,{},{}",
                v.dgp, v.mean_difference, v.difference_mc_se
            );
            let _ = writeln!(
                out,
                "variance,{},residual-twostep,,ordering_fraction,{},",
                v.dgp, v.ordering_fraction
            );
            let _ = writeln!(
                out,
                "variance,{},residual-twostep,,rss_ordering_fraction,{},",
                v.dgp, v.rss_ordering_fraction
            );
        }
        for g in &self.gamma_mse {
            let _ = writeln!(
                out,
                "gamma_mse,{},{},,mse:{},{},{}",
                g.dgp,
                g.estimator.name(),
                g.coefficient,
                g.mse,
                g.mc_se
            );
        }
        out
    }

    /// Power-curve plot data: `dgp,alpha,method,statistic,power,mc_se`.
    pub fn power_curve_csv(&self) -> String {
        let mut out = String::from("dgp,alpha,method,statistic,power,mc_se\n");
        let mut rows: Vec<&RejectionRate> = self.rejection_rates.iter().collect();
        rows.sort_by(|a, b| {
            (a.method, a.statistic)
                .cmp(&(b.method, b.statistic))
                .then(b.alpha.total_cmp(&a.alpha))
        });
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.dgp, r.alpha, r.method, r.statistic, r.rate, r.mc_se
            );
        }
        out
    }
}

/// Rejection frequencies of every (method, statistic) under each DGP, using
/// left-tail critical values at `nominal_size` from `cv`.
pub fn size_power(
    config: &ExperimentConfig,
    cv: &CriticalValueTable,
    threads: usize,
) -> Result<ExperimentReport> {
    config.validate()?;
    let mut crit = Vec::new();
    for &method in &config.methods {
        for stat in Statistic::ALL {
            let value = cv
                .lookup(method, stat, config.nominal_size)
                .ok_or_else(|| Error::MissingCriticalValue {
                    method: method.to_string(),
                    statistic: stat.to_string(),
                    quantile: config.nominal_size,
                })?;
            crit.push((method, stat, value));
        }
    }
    let mut report = ExperimentReport::new(config);
    for dgp in config.dgps() {
        let sample = simulate_statistics(config, &dgp.config, threads)?;
        report.meta.dropped += sample.dropped;
        for &(method, statistic, critical_value) in &crit {
            let values = sample.values(method, statistic).unwrap_or_default();
            let n = values.len();
            let rate = values.iter().filter(|&&v| v < critical_value).count() as f64 / n as f64;
            report.rejection_rates.push(RejectionRate {
                method,
                statistic,
                dgp: dgp.name.clone(),
                alpha: dgp.config.alpha,
                critical_value,
                rate,
                mc_se: (rate * (1.0 - rate) / n as f64).sqrt(),
                reps_used: n,
            });
        }
    }
    Ok(report)
}

/// Residual variance of the two-step regression against the residual-only
/// regression on the same simulated paths, per DGP.
pub fn variance_comparison(config: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    config.validate()?;
    let k = config.k();
    let mut report = ExperimentReport::new(config);
    for dgp in config.dgps() {
        let outcomes = run_replications(config.reps, threads, |i| -> Result<(f64, f64, bool)> {
            let y = simulate(&dgp.config, config.t, SeedSpec::new(config.base_seed, i))?;
            let two = two_step_df(&y, &config.spec, k, TwoStepForm::Residual)?;
            let res = crate::unitroot::residual_only_df(&y, &config.spec, k)?;
            Ok((two.sigma2(), res.sigma2(), res.fit.rss >= two.fit.rss))
        });
        let (kept, dropped) = collect_outcomes(outcomes)?;
        report.meta.dropped += dropped;
        let two: Vec<f64> = kept.iter().map(|p| p.0).collect();
        let res: Vec<f64> = kept.iter().map(|p| p.1).collect();
        let diff: Vec<f64> = kept.iter().map(|p| p.1 - p.0).collect();
        let (mean_difference, difference_mc_se) = mean_and_se(&diff);
        report.variance_comparison.push(VarianceComparison {
            dgp: dgp.name.clone(),
            alpha: dgp.config.alpha,
            mean_sigma2_two_step: mean_and_se(&two).0,
            mean_sigma2_residual_only: mean_and_se(&res).0,
            mean_difference,
            difference_mc_se,
            ordering_fraction: kept.iter().filter(|p| p.1 >= p.0).count() as f64 / kept.len() as f64,
            rss_ordering_fraction: kept.iter().filter(|p| p.2).count() as f64 / kept.len() as f64,
            reps_used: kept.len(),
        });
    }
    Ok(report)
}

/// Mean squared error of γ̂, γ̃ and γ̄ against the true γ for every DGP with
/// `|α| < 1`. Each DGP must use the tested deterministic spec.
pub fn efficiency_comparison(config: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    config.validate()?;
    if config.spec.is_none() {
        return Err(Error::InvalidConfig(
            "[experiment] det: efficiency comparison needs deterministic regressors".into(),
        ));
    }
    let k = config.k();
    let labels = config.spec.labels();
    let dgps: Vec<NamedDgp> = config
        .dgps()
        .into_iter()
        .filter(|d| d.config.alpha.abs() < 1.0)
        .collect();
    if dgps.is_empty() {
        return Err(Error::InvalidConfig(
            "efficiency comparison needs at least one DGP with |alpha| < 1".into(),
        ));
    }
    let mut report = ExperimentReport::new(config);
    for dgp in dgps {
        if dgp.config.det.labels() != labels {
            return Err(Error::InvalidConfig(format!(
                "[dgp.{}] det: must match the tested spec `{}` for gamma MSE",
                dgp.name, config.spec
            )));
        }
        let gamma = &dgp.config.gamma;
        let outcomes = run_replications(config.reps, threads, |i| -> Result<[Vec<f64>; 3]> {
            let y = simulate(&dgp.config, config.t, SeedSpec::new(config.base_seed, i))?;
            let two: UnitRootResult = two_step_df(&y, &config.spec, k, TwoStepForm::Levels)?;
            let zp = zero_padded_df(&y, &config.spec, k)?;
            let sq = |est: &[f64]| -> Vec<f64> {
                est.iter().zip(gamma).map(|(e, g)| (e - g).powi(2)).collect()
            };
            Ok([
                sq(two.gamma_step1.as_deref().unwrap_or_default()),
                sq(two.gamma_structural.as_deref().unwrap_or_default()),
                sq(zp.gamma_structural.as_deref().unwrap_or_default()),
            ])
        });
        let (kept, dropped) = collect_outcomes(outcomes)?;
        report.meta.dropped += dropped;
        let estimators = [GammaEstimator::StepOne, GammaEstimator::TwoStep, GammaEstimator::ZeroPadded];
        for (e, estimator) in estimators.into_iter().enumerate() {
            for (j, label) in labels.iter().enumerate() {
                let sq: Vec<f64> = kept.iter().map(|row| row[e][j]).collect();
                let (mse, mc_se) = mean_and_se(&sq);
                report.gamma_mse.push(GammaMse {
                    dgp: dgp.name.clone(),
                    estimator,
                    coefficient: label.clone(),
                    mse,
                    mc_se,
                    reps_used: kept.len(),
                });
            }
        }
    }
    Ok(report)
}

/// Runs every analysis listed in the config except critical values, which
/// are tabulated first when size/power needs them and `cv` is not given.
pub fn run_experiment(
    config: &ExperimentConfig,
    cv: Option<&CriticalValueTable>,
    threads: usize,
) -> Result<(ExperimentReport, Option<CriticalValueTable>)> {
    let mut report = ExperimentReport::new(config);
    let mut table = None;
    if config.analyses.contains(&Analysis::CriticalValues)
        || (config.analyses.contains(&Analysis::SizePower) && cv.is_none())
    {
        table = Some(tabulate_critical_values(config, threads)?);
    }
    if config.analyses.contains(&Analysis::SizePower) {
        let cv = cv.or(table.as_ref()).expect("critical values tabulated above");
        report.merge(size_power(config, cv, threads)?);
    }
    if config.analyses.contains(&Analysis::Variance) {
        report.merge(variance_comparison(config, threads)?);
    }
    if config.analyses.contains(&Analysis::Efficiency) {
        report.merge(efficiency_comparison(config, threads)?);
    }
    Ok((report, table))
}
