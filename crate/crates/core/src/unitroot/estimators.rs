use crate::deterministics::{build, lagged_expansion, DetSpec};
use crate::error::{Error, Result};
use crate::regression::{ols_fit, prune_collinear, DesignMatrix, OlsFit, DEFAULT_RANK_TOL};

use super::{is_degenerate, FinalRegression, Method, TwoStepForm, UnitRootResult};

/// `s_t` for 1-based `t`, zero before the sample.
fn padded(s: &[f64], t: i64) -> f64 {
    if t >= 1 {
        s[(t - 1) as usize]
    } else {
        0.0
    }
}

/// Appends `s_{t-1}` and `Δs_{t-1..k}` for `t = t_first..=T`.
fn push_lag_columns(design: &mut DesignMatrix, s: &[f64], name: &str, k: usize, t_first: i64) -> Result<()> {
    let t_last = s.len() as i64;
    let level = (t_first..=t_last).map(|t| padded(s, t - 1)).collect();
    design.push_column(format!("{name}(t-1)"), level)?;
    for j in 1..=k as i64 {
        let diff = (t_first..=t_last)
            .map(|t| padded(s, t - j) - padded(s, t - j - 1))
            .collect();
        design.push_column(format!("d{name}(t-{j})"), diff)?;
    }
    Ok(())
}

fn check_length(t: usize, k: usize, det: usize) -> Result<()> {
    let rows = t.saturating_sub(k + 1);
    let m = det + 1 + k;
    if rows <= m {
        return Err(Error::InsufficientObservations { n: rows, m });
    }
    Ok(())
}

/// Least-squares detrending over `t = 1..T`: `(γ̂, ẑ)`.
///
/// With no deterministic columns, `γ̂` is empty and `ẑ = y`.
fn detrend(y: &[f64], spec: &DetSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = build(spec, 1, y.len() as i64)?;
    if x.ncols() == 0 {
        if is_degenerate(y.iter().map(|v| v * v).sum(), y) {
            return Err(Error::DegenerateResidualVariance);
        }
        return Ok((Vec::new(), y.to_vec()));
    }
    let fit = ols_fit(y, &x)?;
    if is_degenerate(fit.rss, y) {
        return Err(Error::DegenerateResidualVariance);
    }
    Ok((fit.coefficients, fit.residuals))
}

fn fit_final(reg: FinalRegression) -> Result<UnitRootResult> {
    let fit = match ols_fit(&reg.response, &reg.design) {
        Ok(fit) => fit,
        Err(err @ Error::RankDeficient { .. }) => {
            // A collinear lag block with an exact fit on what remains is a
            // noiseless input, not a design problem.
            let (pruned, _) = prune_collinear(&reg.design, DEFAULT_RANK_TOL);
            return match ols_fit(&reg.response, &pruned) {
                Ok(f) if is_degenerate(f.rss, &reg.response) => Err(Error::DegenerateResidualVariance),
                _ => Err(err),
            };
        }
        Err(err) => return Err(err),
    };
    UnitRootResult::from_regression(reg, fit)
}

fn one_step_impl(y: &[f64], spec: &DetSpec, k: usize, expand: bool) -> Result<UnitRootResult> {
    let t = y.len();
    let p = k + 1;
    check_length(t, k, spec.column_count())?;
    detrend(y, spec)?;
    let (first, last) = (p as i64 + 1, t as i64);
    let mut design = if expand {
        lagged_expansion(spec, p, first, last, DEFAULT_RANK_TOL)?
    } else {
        build(spec, first, last)?
    };
    let det_columns = design.ncols();
    push_lag_columns(&mut design, y, "y", k, first)?;
    fit_final(FinalRegression {
        method: Method::OneStep,
        k,
        response: y[p..].to_vec(),
        design,
        det_columns,
        report_gamma: false,
        gamma_step1: None,
    })
}

/// One-step Dickey-Fuller autoregression: `y_t` on `y_{t-1}`, `Δy_{t-1..k}`
/// and the pruned span of `x_t, ..., x_{t-p}`, over `t = p+1..T`.
///
/// For a full polynomial trend the deterministic block collapses to
/// `{1, t, ..., t^r}`; for break specs the lagged dummies are retained.
pub fn one_step_df(y: &[f64], spec: &DetSpec, k: usize) -> Result<UnitRootResult> {
    one_step_impl(y, spec, k, true)
}

/// One-step regression using only the contemporaneous `x_t`.
///
/// Misspecified for anything but a full polynomial trend; exposed only so
/// tests can show the effect of dropping the lagged deterministics.
#[doc(hidden)]
pub fn one_step_df_contemporaneous(y: &[f64], spec: &DetSpec, k: usize) -> Result<UnitRootResult> {
    one_step_impl(y, spec, k, false)
}

struct SecondStage<'a> {
    method: Method,
    y: &'a [f64],
    spec: &'a DetSpec,
    k: usize,
    /// Include `x_t` in the second stage.
    with_det: bool,
    /// Regress `ẑ_t` instead of `y_t`.
    residual_response: bool,
    /// Zero-pad pre-sample residuals and use all `T` rows.
    pad: bool,
}

impl SecondStage<'_> {
    fn run(self) -> Result<UnitRootResult> {
        let t = self.y.len();
        let det_count = if self.with_det { self.spec.column_count() } else { 0 };
        if self.pad {
            let m = det_count + 1 + self.k;
            if t <= m + 1 {
                return Err(Error::InsufficientObservations { n: t, m });
            }
        } else {
            check_length(t, self.k, det_count)?;
        }
        let (gamma_hat, zhat) = detrend(self.y, self.spec)?;

        let first: i64 = if self.pad { 1 } else { self.k as i64 + 2 };
        let skip = (first - 1) as usize;
        let rows = t - skip;
        let mut design = if self.with_det {
            build(self.spec, first, t as i64)?
        } else {
            DesignMatrix::empty(rows)
        };
        let det_columns = design.ncols();
        push_lag_columns(&mut design, &zhat, "z", self.k, first)?;
        let response = if self.residual_response {
            zhat[skip..].to_vec()
        } else {
            self.y[skip..].to_vec()
        };
        let has_gamma = !self.spec.is_none();
        fit_final(FinalRegression {
            method: self.method,
            k: self.k,
            response,
            design,
            det_columns,
            report_gamma: self.with_det && !self.residual_response,
            gamma_step1: has_gamma.then_some(gamma_hat),
        })
    }
}

/// Two-step Dickey-Fuller autoregression.
///
/// Step one fits `y_t = γ′x_t + z_t` over `t = 1..T`. Step two regresses
/// `y_t` ([`TwoStepForm::Levels`]) or `ẑ_t` ([`TwoStepForm::Residual`]) on
/// `x_t`, `ẑ_{t-1}` and `Δẑ_{t-1..k}` over `t = p+1..T`. Both forms share
/// ρ̃, its standard error and every test statistic.
pub fn two_step_df(y: &[f64], spec: &DetSpec, k: usize, form: TwoStepForm) -> Result<UnitRootResult> {
    SecondStage {
        method: Method::TwoStep,
        y,
        spec,
        k,
        with_det: true,
        residual_response: form == TwoStepForm::Residual,
        pad: false,
    }
    .run()
}

/// Second stage on detrended residuals alone, without `x_t`.
///
/// This is the inefficient residual-based variant; its error absorbs
/// `(γ - γ̂)′x_t`.
pub fn residual_only_df(y: &[f64], spec: &DetSpec, k: usize) -> Result<UnitRootResult> {
    SecondStage {
        method: Method::ResidualOnly,
        y,
        spec,
        k,
        with_det: false,
        residual_response: true,
        pad: false,
    }
    .run()
}

/// Zero-padded two-step regression over all `t = 1..T`.
///
/// Pre-sample residuals are set to zero before differencing, so the first
/// row regresses `y_1` on `x_1` alone (`ẑ_0 = 0`, `Δẑ_0 = 0`) and
/// `Δẑ_1 = ẑ_1`. The statistics are `t_DF*` and `t_LM*`.
pub fn zero_padded_df(y: &[f64], spec: &DetSpec, k: usize) -> Result<UnitRootResult> {
    SecondStage {
        method: Method::ZeroPadded,
        y,
        spec,
        k,
        with_det: true,
        residual_response: false,
        pad: true,
    }
    .run()
}

/// Dispatch by method tag; the two-step method uses its levels form.
pub fn run_method(method: Method, y: &[f64], spec: &DetSpec, k: usize) -> Result<UnitRootResult> {
    match method {
        Method::OneStep => one_step_df(y, spec, k),
        Method::TwoStep => two_step_df(y, spec, k, TwoStepForm::Levels),
        Method::ResidualOnly => residual_only_df(y, spec, k),
        Method::ZeroPadded => zero_padded_df(y, spec, k),
    }
}

/// Two-step second stage written with level lags `ẑ_{t-1..p}` instead of
/// the `(ẑ_{t-1}, Δẑ)` form.
#[derive(Debug, Clone)]
pub struct ArLevelsFit {
    pub rho_j: Vec<f64>,
    pub fit: OlsFit,
    pub design: DesignMatrix,
}

pub fn two_step_ar_levels(y: &[f64], spec: &DetSpec, k: usize) -> Result<ArLevelsFit> {
    let t = y.len();
    let p = k + 1;
    check_length(t, k, spec.column_count())?;
    let (_, zhat) = detrend(y, spec)?;
    let first = p as i64 + 1;
    let mut design = build(spec, first, t as i64)?;
    let det = design.ncols();
    for j in 1..=p as i64 {
        let col = (first..=t as i64).map(|s| padded(&zhat, s - j)).collect();
        design.push_column(format!("z(t-{j})"), col)?;
    }
    let fit = ols_fit(&y[p..], &design)?;
    Ok(ArLevelsFit {
        rho_j: fit.coefficients[det..].to_vec(),
        fit,
        design,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::{simulate, DgpConfig, SeedSpec};

    fn rw(t: usize, seed: u64) -> Vec<f64> {
        simulate(&DgpConfig::default(), t, SeedSpec::new(seed, 0)).unwrap()
    }

    #[test]
    fn deterministic_line_is_degenerate() {
        let y: Vec<f64> = (1..=50).map(|t| t as f64).collect();
        for m in crate::unitroot::Method::ALL {
            assert_eq!(
                run_method(m, &y, &DetSpec::linear_trend(), 0).unwrap_err(),
                Error::DegenerateResidualVariance,
                "{m}"
            );
        }
        let c = vec![3.0; 30];
        assert_eq!(
            one_step_df(&c, &DetSpec::None, 1).unwrap_err(),
            Error::DegenerateResidualVariance
        );
    }

    #[test]
    fn too_short() {
        let y = rw(5, 1);
        assert!(matches!(
            one_step_df(&y, &DetSpec::linear_trend(), 2),
            Err(Error::InsufficientObservations { .. })
        ));
        assert!(matches!(
            zero_padded_df(&y[..4], &DetSpec::linear_trend(), 0),
            Err(Error::InsufficientObservations { .. })
        ));
    }

    #[test]
    fn design_labels_and_shapes() {
        let y = rw(60, 2);
        let r = one_step_df(&y, &DetSpec::linear_trend(), 2).unwrap();
        assert_eq!(r.design.labels(), &["const", "trend", "y(t-1)", "dy(t-1)", "dy(t-2)"]);
        assert_eq!((r.t_effective, r.m, r.p), (57, 5, 3));

        let r = zero_padded_df(&y, &DetSpec::linear_trend(), 2).unwrap();
        assert_eq!(r.design.labels(), &["const", "trend", "z(t-1)", "dz(t-1)", "dz(t-2)"]);
        assert_eq!((r.t_effective, r.m), (60, 5));
        // first row: x_1 then all-zero lags
        assert_eq!(r.design.row(0), vec![1.0, 1.0, 0.0, 0.0, 0.0]);
        // second row: ẑ_1 and Δẑ_1 = ẑ_1, Δẑ_0 = 0
        let row = r.design.row(1);
        assert_eq!(row[2], row[3]);
        assert_eq!(row[4], 0.0);

        let r = residual_only_df(&y, &DetSpec::linear_trend(), 1).unwrap();
        assert_eq!(r.design.labels(), &["z(t-1)", "dz(t-1)"]);
        assert!(r.gamma_structural.is_none());
        assert_eq!(r.t_effective, 58);
    }

    #[test]
    fn break_one_step_keeps_dummy_lags() {
        let y = rw(80, 3);
        let spec = DetSpec::Break { order: 0, date: 40, trend_break: false };
        let r = one_step_df(&y, &spec, 1).unwrap();
        let labels = r.design.labels();
        for l in ["DU", "DU(t-1)", "DU(t-2)"] {
            assert!(labels.iter().any(|x| x == l), "{l} missing from {labels:?}");
        }
    }

    #[test]
    fn no_deterministics_residual_only_matches_two_step() {
        let y = rw(100, 4);
        let a = residual_only_df(&y, &DetSpec::None, 2).unwrap();
        let b = two_step_df(&y, &DetSpec::None, 2, TwoStepForm::Residual).unwrap();
        assert_eq!(a.rho_hat, b.rho_hat);
        assert_eq!(a.sigma2(), b.sigma2());
    }
}
