//! Deterministic regressors `x_t` and their lagged expansion.
//!
//! Time is 1-based. Lagged evaluation may reach `t <= 0`; polynomial and
//! break functions extend there analytically (`t^0 = 1`, `DU = 0`).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::io;
use crate::regression::{prune_collinear, DesignMatrix};

type ColumnFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

/// A user-supplied deterministic column, evaluated pointwise in `t`.
#[derive(Clone)]
pub struct CustomColumn {
    pub label: String,
    func: ColumnFn,
}

impl CustomColumn {
    pub fn new(label: impl Into<String>, func: impl Fn(i64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            func: Arc::new(func),
        }
    }

    /// Column backed by observed values for `t = 1..=values.len()`, zero elsewhere.
    pub fn from_values(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self::new(label, move |t| {
            if t >= 1 && (t as usize) <= values.len() {
                values[t as usize - 1]
            } else {
                0.0
            }
        })
    }

    pub fn eval(&self, t: i64) -> f64 {
        (self.func)(t)
    }
}

impl fmt::Debug for CustomColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomColumn").field("label", &self.label).finish()
    }
}

#[derive(Debug, Clone)]
pub struct CustomColumns {
    pub columns: Vec<CustomColumn>,
    /// File the columns were read from, when any; used for display.
    pub source: Option<String>,
}

/// Declarative description of the deterministic component.
#[derive(Debug, Clone)]
pub enum DetSpec {
    None,
    /// Full polynomial `{1, t, ..., t^r}`.
    Polynomial(u32),
    /// Polynomial base plus a level break `DU_t = 1{t > date}` and,
    /// optionally, a trend break `DT_t = max(0, t - date)`.
    Break {
        order: u32,
        date: i64,
        trend_break: bool,
    },
    Custom(CustomColumns),
}

impl PartialEq for DetSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (DetSpec::None, DetSpec::None) => true,
            (DetSpec::Polynomial(a), DetSpec::Polynomial(b)) => a == b,
            (
                DetSpec::Break { order: o1, date: d1, trend_break: t1 },
                DetSpec::Break { order: o2, date: d2, trend_break: t2 },
            ) => o1 == o2 && d1 == d2 && t1 == t2,
            (DetSpec::Custom(a), DetSpec::Custom(b)) => {
                a.source == b.source
                    && a.columns.len() == b.columns.len()
                    && a.columns
                        .iter()
                        .zip(&b.columns)
                        .all(|(x, y)| x.label == y.label && Arc::ptr_eq(&x.func, &y.func))
            }
            _ => false,
        }
    }
}

fn poly_label(power: u32) -> String {
    match power {
        0 => "const".into(),
        1 => "trend".into(),
        r => format!("trend^{r}"),
    }
}

fn lag_label(label: &str, lag: usize) -> String {
    if lag == 0 {
        label.to_string()
    } else {
        format!("{label}(t-{lag})")
    }
}

impl DetSpec {
    pub fn constant() -> Self {
        DetSpec::Polynomial(0)
    }

    pub fn linear_trend() -> Self {
        DetSpec::Polynomial(1)
    }

    pub fn custom(columns: Vec<CustomColumn>) -> Self {
        DetSpec::Custom(CustomColumns { columns, source: None })
    }

    pub fn is_none(&self) -> bool {
        self.column_count() == 0
    }

    /// Number of columns `build` produces; independent of the time range.
    pub fn column_count(&self) -> usize {
        match self {
            DetSpec::None => 0,
            DetSpec::Polynomial(r) => *r as usize + 1,
            DetSpec::Break { order, trend_break, .. } => *order as usize + 2 + usize::from(*trend_break),
            DetSpec::Custom(c) => c.columns.len(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            DetSpec::None => Vec::new(),
            DetSpec::Polynomial(r) => (0..=*r).map(poly_label).collect(),
            DetSpec::Break { order, trend_break, .. } => {
                let mut l: Vec<String> = (0..=*order).map(poly_label).collect();
                l.push("DU".into());
                if *trend_break {
                    l.push("DT".into());
                }
                l
            }
            DetSpec::Custom(c) => c.columns.iter().map(|c| c.label.clone()).collect(),
        }
    }

    /// Values of every column at time `t`, no validation.
    pub fn eval(&self, t: i64) -> Vec<f64> {
        let tf = t as f64;
        match self {
            DetSpec::None => Vec::new(),
            DetSpec::Polynomial(r) => (0..=*r as i32).map(|i| tf.powi(i)).collect(),
            DetSpec::Break { order, date, trend_break } => {
                let mut v: Vec<f64> = (0..=*order as i32).map(|i| tf.powi(i)).collect();
                v.push(if t > *date { 1.0 } else { 0.0 });
                if *trend_break {
                    v.push((t - date).max(0) as f64);
                }
                v
            }
            DetSpec::Custom(c) => c.columns.iter().map(|c| c.eval(t)).collect(),
        }
    }

    fn validate(&self, t_first: i64, t_last: i64) -> Result<()> {
        if t_first > t_last {
            return Err(Error::InvalidConfig(format!(
                "empty time range {t_first}..={t_last}"
            )));
        }
        if let DetSpec::Break { date, .. } = self {
            if *date < t_first || *date >= t_last {
                return Err(Error::InvalidBreakDate {
                    tb: *date,
                    t_first,
                    t_last,
                });
            }
        }
        Ok(())
    }

    fn design_at_lag(&self, lag: usize, t_first: i64, t_last: i64) -> Result<DesignMatrix> {
        let n = (t_last - t_first + 1) as usize;
        let labels = self.labels();
        let mut cols = vec![Vec::with_capacity(n); labels.len()];
        for t in t_first..=t_last {
            for (c, v) in cols.iter_mut().zip(self.eval(t - lag as i64)) {
                c.push(v);
            }
        }
        DesignMatrix::from_columns(
            n,
            labels.iter().map(|l| lag_label(l, lag)).zip(cols).collect(),
        )
    }
}

/// One row per `t` in `t_first..=t_last`.
pub fn build(spec: &DetSpec, t_first: i64, t_last: i64) -> Result<DesignMatrix> {
    spec.validate(t_first, t_last)?;
    spec.design_at_lag(0, t_first, t_last)
}

/// `{x_t, x_{t-1}, ..., x_{t-p}}` over `t_first..=t_last`, with collinear
/// columns pruned (earlier lags win).
///
/// For a full polynomial the result spans exactly `{1, t, ..., t^r}`. For
/// break and custom specs the lagged columns generally survive.
pub fn lagged_expansion(
    spec: &DetSpec,
    p: usize,
    t_first: i64,
    t_last: i64,
    rank_tol: f64,
) -> Result<DesignMatrix> {
    spec.validate(t_first, t_last)?;
    let n = (t_last - t_first + 1) as usize;
    let mut full = DesignMatrix::empty(n);
    for lag in 0..=p {
        full.extend(&spec.design_at_lag(lag, t_first, t_last)?)?;
    }
    let (pruned, _) = prune_collinear(&full, rank_tol);
    if pruned.ncols() == 0 && full.ncols() > 0 {
        return Err(Error::InsufficientRegressors);
    }
    Ok(pruned)
}

impl fmt::Display for DetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetSpec::None => write!(f, "none"),
            DetSpec::Polynomial(0) => write!(f, "c"),
            DetSpec::Polynomial(1) => write!(f, "ct"),
            DetSpec::Polynomial(r) => write!(f, "poly:{r}"),
            DetSpec::Break { order, date, trend_break } => {
                write!(f, "break:{date}")?;
                if *trend_break {
                    write!(f, ":trend")?;
                }
                let default_order = u32::from(*trend_break);
                if *order != default_order {
                    write!(f, ":poly={order}")?;
                }
                Ok(())
            }
            DetSpec::Custom(c) => match &c.source {
                Some(path) => write!(f, "custom:{path}"),
                None => write!(f, "custom:<{} columns>", c.columns.len()),
            },
        }
    }
}

impl FromStr for DetSpec {
    type Err = Error;

    /// `none | c | ct | poly:R | break:TB[:trend][:poly=R] | custom:PATH`.
    ///
    /// A break spec has an intercept base, or a linear-trend base when
    /// `:trend` is given, unless `:poly=R` overrides the base order.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid deterministic spec `{s}`"));
        match s {
            "none" | "n" => return Ok(DetSpec::None),
            "c" => return Ok(DetSpec::Polynomial(0)),
            "ct" => return Ok(DetSpec::Polynomial(1)),
            _ => {}
        }
        if let Some(r) = s.strip_prefix("poly:") {
            return r.parse().map(DetSpec::Polynomial).map_err(|_| bad());
        }
        if let Some(path) = s.strip_prefix("custom:") {
            let (labels, cols) = io::read_columns(std::path::Path::new(path))?;
            let columns = labels
                .into_iter()
                .zip(cols)
                .map(|(l, v)| CustomColumn::from_values(l, v))
                .collect();
            return Ok(DetSpec::Custom(CustomColumns {
                columns,
                source: Some(path.to_string()),
            }));
        }
        if let Some(rest) = s.strip_prefix("break:") {
            let mut parts = rest.split(':');
            let date: i64 = parts.next().and_then(|d| d.parse().ok()).ok_or_else(bad)?;
            let mut trend_break = false;
            let mut order = None;
            for part in parts {
                if part == "trend" {
                    trend_break = true;
                } else if let Some(r) = part.strip_prefix("poly=") {
                    order = Some(r.parse().map_err(|_| bad())?);
                } else {
                    return Err(bad());
                }
            }
            return Ok(DetSpec::Break {
                order: order.unwrap_or(u32::from(trend_break)),
                date,
                trend_break,
            });
        }
        Err(bad())
    }
}
