//! Rank-aware ordinary least squares with classical inference.
//!
//! Every autoregression in the crate is fitted through [`ols_fit`]. The solver
//! is a Householder QR (no normal equations), so polynomial trend columns of
//! order two or three stay well conditioned.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::IncrementalQr;

/// Default relative rank tolerance, scaled by the largest column norm.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Dense regressor matrix stored by column, with a label per column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    columns: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl DesignMatrix {
    /// A design with `n` rows and no columns yet.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            columns: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_columns<S: Into<String>>(n: usize, columns: Vec<(S, Vec<f64>)>) -> Result<Self> {
        let mut out = Self::empty(n);
        for (label, values) in columns {
            out.push_column(label, values)?;
        }
        Ok(out)
    }

    /// Builds a design from row-major data with generated labels `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let cols = (0..m)
            .map(|j| (format!("x{j}"), rows.iter().map(|r| r[j]).collect()))
            .collect();
        Self::from_columns(n, cols)
    }

    pub fn push_column(&mut self, label: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let label = label.into();
        if values.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "column `{label}` has {} rows, expected {}",
                values.len(),
                self.n
            )));
        }
        if self.labels.contains(&label) {
            return Err(Error::DimensionMismatch(format!("duplicate column label `{label}`")));
        }
        self.columns.push(values);
        self.labels.push(label);
        Ok(())
    }

    /// Appends all columns of `other` (row counts must agree).
    pub fn extend(&mut self, other: &DesignMatrix) -> Result<()> {
        for (label, col) in other.labels.iter().zip(&other.columns) {
            self.push_column(label.clone(), col.clone())?;
        }
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Rows `start..end` of every column.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        Self {
            n: end - start,
            columns: self.columns.iter().map(|c| c[start..end].to_vec()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn select_columns(&self, keep: &[usize]) -> Self {
        Self {
            n: self.n,
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            labels: keep.iter().map(|&j| self.labels[j].clone()).collect(),
        }
    }

    /// `X b`.
    pub fn mul_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (col, &bj) in self.columns.iter().zip(b) {
            for (o, x) in out.iter_mut().zip(col) {
                *o += x * bj;
            }
        }
        out
    }

    /// `Xᵀ v`.
    pub fn t_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| c.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn max_column_norm(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    fn has_unique_labels(&self) -> bool {
        let set: HashSet<&String> = self.labels.iter().collect();
        set.len() == self.labels.len()
    }
}

/// Full least-squares output.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// `rss / (n - m)`.
    pub sigma2: f64,
    pub std_errors: Vec<f64>,
    /// Row-major `m × m` covariance `sigma2 · (XᵀX)⁻¹`.
    pub cov: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub labels: Vec<String>,
}

impl OlsFit {
    pub fn cov_at(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.m + j]
    }

    pub fn df_resid(&self) -> usize {
        self.n - self.m
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Result of a single-coefficient Wald test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldSingle {
    pub t: f64,
    pub f: f64,
}

pub fn ols_fit(y: &[f64], x: &DesignMatrix) -> Result<OlsFit> {
    ols_fit_with_tol(y, x, DEFAULT_RANK_TOL)
}

pub fn ols_fit_with_tol(y: &[f64], x: &DesignMatrix, rank_tol: f64) -> Result<OlsFit> {
    let n = x.nrows();
    let m = x.ncols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if m == 0 {
        return Err(Error::InsufficientRegressors);
    }
    if n <= m {
        return Err(Error::InsufficientObservations { n, m });
    }
    debug_assert!(x.has_unique_labels());

    let tol = rank_tol * x.max_column_norm();
    let mut qr = IncrementalQr::new(n);
    for (j, col) in x.columns().iter().enumerate() {
        if !qr.push(col, tol) {
            return Err(Error::RankDeficient {
                column: x.labels()[j].clone(),
            });
        }
    }

    let (coefficients, residuals) = qr.solve(y);
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (n - m) as f64;
    let mut cov = qr.inverse_gram();
    for c in cov.iter_mut() {
        *c *= sigma2;
    }
    let std_errors = (0..m).map(|j| cov[j * m + j].max(0.0).sqrt()).collect();

    Ok(OlsFit {
        coefficients,
        residuals,
        rss,
        sigma2,
        std_errors,
        cov,
        n,
        m,
        labels: x.labels().to_vec(),
    })
}

/// Drops columns that are linearly dependent on earlier ones.
///
/// Returns the pruned design together with the surviving original column
/// indices. Columns are scanned left to right, so earlier columns win.
pub fn prune_collinear(x: &DesignMatrix, rank_tol: f64) -> (DesignMatrix, Vec<usize>) {
    let tol = rank_tol * x.max_column_norm();
    let mut qr = IncrementalQr::new(x.nrows());
    let kept: Vec<usize> = x
        .columns()
        .iter()
        .enumerate()
        .filter_map(|(j, col)| qr.push(col, tol).then_some(j))
        .collect();
    (x.select_columns(&kept), kept)
}

/// t and F statistics for `H0: coefficients[index] = null_value`.
pub fn wald_single(fit: &OlsFit, index: usize, null_value: f64) -> Result<WaldSingle> {
    if index >= fit.m {
        return Err(Error::DimensionMismatch(format!(
            "coefficient index {index} out of range for {} regressors",
            fit.m
        )));
    }
    let se = fit.std_errors[index];
    if !(se > 0.0) {
        return Err(Error::ZeroStandardError { index });
    }
    let t = (fit.coefficients[index] - null_value) / se;
    Ok(WaldSingle { t, f: t * t })
}
