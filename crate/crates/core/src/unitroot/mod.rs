//! Dickey-Fuller estimation pipelines and the F/LM statistic algebra.
//!
//! Four autoregressions estimate the root `ρ`:
//!
//! * [`one_step_df`]: `y_t` on `y_{t-1}`, `Δy_{t-1..k}` and the lagged
//!   expansion of `x_t`, rows `t = p+1..T`.
//! * [`two_step_df`]: detrend by least squares over the full sample, then
//!   `y_t` (or `ẑ_t`) on `x_t`, `ẑ_{t-1}`, `Δẑ_{t-1..k}`, rows `t = p+1..T`.
//! * [`residual_only_df`]: the two-step regression with `x_t` dropped.
//! * [`zero_padded_df`]: the two-step levels regression over all `t = 1..T`
//!   with `ẑ_t = 0` for `t <= 0`.
//!
//! Each returns a [`UnitRootResult`] whose Wald and LM statistics satisfy
//! `t_df = sign(ρ̂ - 1)·√F` and `χ = T·F / ((T - m) + F)` by construction.

mod estimators;

pub use estimators::{
    one_step_df, one_step_df_contemporaneous, residual_only_df, run_method, two_step_ar_levels,
    two_step_df, zero_padded_df, ArLevelsFit,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::regression::{wald_single, DesignMatrix, OlsFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    OneStep,
    TwoStep,
    ResidualOnly,
    ZeroPadded,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::OneStep,
        Method::TwoStep,
        Method::ResidualOnly,
        Method::ZeroPadded,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::OneStep => "onestep",
            Method::TwoStep => "twostep",
            Method::ResidualOnly => "residual",
            Method::ZeroPadded => "zeropad",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "onestep" | "one_step" | "one-step" => Ok(Method::OneStep),
            "twostep" | "two_step" | "two-step" => Ok(Method::TwoStep),
            "residual" | "residualonly" | "residual_only" | "residual-only" => Ok(Method::ResidualOnly),
            "zeropad" | "zeropadded" | "zero_padded" | "zero-padded" => Ok(Method::ZeroPadded),
            _ => Err(Error::Parse(format!(
                "unknown method `{s}` (expected onestep, twostep, residual, zeropad)"
            ))),
        }
    }
}

/// Dependent variable of the two-step second stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoStepForm {
    /// `y_t` on `x_t` and lagged residuals; deterministic coefficients are γ̃.
    Levels,
    /// `ẑ_t` on the same regressors; deterministic coefficients are γ̃ - γ̂.
    Residual,
}

/// Which test statistic of a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    TDf,
    TLm,
}

impl Statistic {
    pub const ALL: [Statistic; 2] = [Statistic::TDf, Statistic::TLm];

    pub fn name(&self) -> &'static str {
        match self {
            Statistic::TDf => "t_df",
            Statistic::TLm => "t_lm",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "t_df" => Ok(Statistic::TDf),
            "t_lm" => Ok(Statistic::TLm),
            _ => Err(Error::Parse(format!("unknown statistic `{s}`"))),
        }
    }
}

/// `sign(x)` with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Lag order `floor(4 (T/100)^{1/4})`.
pub fn schwert_lags(t: usize) -> usize {
    (4.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Converts an exclusion F statistic into the LM statistic `χ` and its
/// signed root.
pub fn lm_from_f(f_stat: f64, t_effective: usize, m: usize, sign: f64) -> Result<(f64, f64)> {
    if t_effective <= m {
        return Err(Error::DegenerateDof { t_effective, m });
    }
    let t = t_effective as f64;
    let chi = t * f_stat / ((t - m as f64) + f_stat);
    Ok((chi, sign * chi.sqrt()))
}

/// Inverse of [`lm_from_f`]: `F = (T - m) χ / (T - χ)`.
pub fn f_from_lm(chi: f64, t_effective: usize, m: usize) -> Result<f64> {
    if t_effective <= m {
        return Err(Error::DegenerateDof { t_effective, m });
    }
    let t = t_effective as f64;
    Ok((t - m as f64) * chi / (t - chi))
}

/// Level-lag coefficients `ρ_1..ρ_p` and their ADF form `(ρ, β_1..β_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagReparam {
    pub rho_j: Vec<f64>,
    pub rho: f64,
    pub beta: Vec<f64>,
}

/// `ρ = Σ ρ_j`, `β_j = -(ρ_{j+1} + ... + ρ_p)`.
pub fn reparam_levels_to_adf(rho_j: &[f64]) -> LagReparam {
    let p = rho_j.len();
    let beta = (1..p).map(|j| -rho_j[j..].iter().sum::<f64>()).collect();
    LagReparam {
        rho_j: rho_j.to_vec(),
        rho: rho_j.iter().sum(),
        beta,
    }
}

/// Inverse of [`reparam_levels_to_adf`].
pub fn reparam_adf_to_levels(rho: f64, beta: &[f64]) -> Vec<f64> {
    let k = beta.len();
    let mut out = Vec::with_capacity(k + 1);
    out.push(rho + beta.first().copied().unwrap_or(0.0));
    for j in 1..k {
        out.push(beta[j] - beta[j - 1]);
    }
    if k > 0 {
        out.push(-beta[k - 1]);
    }
    out
}

/// Relative residual sum of squares below which a fit counts as exact.
pub const DEGENERATE_RSS_REL: f64 = 1e-20;

pub(crate) fn is_degenerate(rss: f64, response: &[f64]) -> bool {
    let scale: f64 = response.iter().map(|v| v * v).sum();
    !(rss > DEGENERATE_RSS_REL * scale)
}

/// Output of one estimation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRootResult {
    pub method: Method,
    /// ρ̂ (one-step), ρ̃ (two-step, residual-only) or ρ̄ (zero-padded).
    pub rho_hat: f64,
    pub se_rho: f64,
    /// Wald t; `t_DF*` for the zero-padded method.
    pub t_df: f64,
    pub f_stat: f64,
    pub chi: f64,
    /// LM t; `t_LM*` for the zero-padded method.
    pub t_lm: f64,
    pub k: usize,
    pub p: usize,
    pub t_effective: usize,
    pub m: usize,
    /// γ̃ or γ̄ when the final regression identifies γ.
    pub gamma_structural: Option<Vec<f64>>,
    /// Step-one detrending coefficients γ̂ (two-step style methods only).
    pub gamma_step1: Option<Vec<f64>>,
    pub beta: Vec<f64>,
    /// Index of the lagged level in the final design.
    pub rho_index: usize,
    /// Number of deterministic columns leading the final design.
    pub det_columns: usize,
    pub fit: OlsFit,
    pub design: DesignMatrix,
    pub response: Vec<f64>,
}

pub(crate) struct FinalRegression {
    pub method: Method,
    pub k: usize,
    pub response: Vec<f64>,
    pub design: DesignMatrix,
    pub det_columns: usize,
    pub report_gamma: bool,
    pub gamma_step1: Option<Vec<f64>>,
}

impl UnitRootResult {
    pub(crate) fn from_regression(reg: FinalRegression, fit: OlsFit) -> Result<Self> {
        if is_degenerate(fit.rss, &reg.response) {
            return Err(Error::DegenerateResidualVariance);
        }
        let rho_index = reg.det_columns;
        let wald = wald_single(&fit, rho_index, 1.0).map_err(|e| match e {
            Error::ZeroStandardError { .. } => Error::DegenerateResidualVariance,
            other => other,
        })?;
        let rho_hat = fit.coefficients[rho_index];
        let s = sign(rho_hat - 1.0);
        let f_stat = wald.f;
        let t_df = s * f_stat.sqrt();
        let t_effective = fit.n;
        let m = fit.m;
        let (chi, t_lm) = lm_from_f(f_stat, t_effective, m, s)?;
        let beta = fit.coefficients[rho_index + 1..rho_index + 1 + reg.k].to_vec();
        let gamma_structural = reg
            .report_gamma
            .then(|| fit.coefficients[..reg.det_columns].to_vec());
        Ok(Self {
            method: reg.method,
            rho_hat,
            se_rho: fit.std_errors[rho_index],
            t_df,
            f_stat,
            chi,
            t_lm,
            k: reg.k,
            p: reg.k + 1,
            t_effective,
            m,
            gamma_structural,
            gamma_step1: reg.gamma_step1,
            beta,
            rho_index,
            det_columns: reg.det_columns,
            fit,
            design: reg.design,
            response: reg.response,
        })
    }

    pub fn statistic(&self, which: Statistic) -> f64 {
        match which {
            Statistic::TDf => self.t_df,
            Statistic::TLm => self.t_lm,
        }
    }

    /// Coefficients on the deterministic columns of the final regression.
    pub fn deterministic_coefficients(&self) -> &[f64] {
        &self.fit.coefficients[..self.det_columns]
    }

    pub fn sigma2(&self) -> f64 {
        self.fit.sigma2
    }
}
