//! Householder QR built one column at a time.
//!
//! Columns are offered in order; a column whose component orthogonal to the
//! already accepted columns has norm at or below the tolerance is rejected.
//! This gives rank detection that prefers earlier columns, which is exactly
//! what both collinearity pruning and the rank check of least squares need.

/// A Householder reflector `H = I - beta * v vᵀ` acting on rows `start..n`.
#[derive(Debug, Clone)]
struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.start..];
        let dot: f64 = self.v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum();
        let s = self.beta * dot;
        for (xi, vi) in tail.iter_mut().zip(&self.v) {
            *xi -= s * vi;
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct IncrementalQr {
    n: usize,
    reflectors: Vec<Reflector>,
    /// Column `j` of R holds `j + 1` entries.
    r_cols: Vec<Vec<f64>>,
}

impl IncrementalQr {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            reflectors: Vec::new(),
            r_cols: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.reflectors.len()
    }

    /// Offers a column. Returns `true` when it is linearly independent of
    /// the accepted columns at absolute tolerance `tol`.
    pub(crate) fn push(&mut self, column: &[f64], tol: f64) -> bool {
        debug_assert_eq!(column.len(), self.n);
        let k = self.rank();
        if k >= self.n {
            return false;
        }
        let mut a = column.to_vec();
        for h in &self.reflectors {
            h.apply(&mut a);
        }
        let norm = a[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > tol) {
            return false;
        }
        let alpha = if a[k] >= 0.0 { -norm } else { norm };
        let mut v = a[k..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };
        let mut r = a[..k].to_vec();
        r.push(alpha);
        self.reflectors.push(Reflector { start: k, v, beta });
        self.r_cols.push(r);
        true
    }

    /// Computes `Qᵀ y` in place.
    fn apply_qt(&self, y: &mut [f64]) {
        for h in &self.reflectors {
            h.apply(y);
        }
    }

    /// Computes `Q c` in place.
    fn apply_q(&self, c: &mut [f64]) {
        for h in self.reflectors.iter().rev() {
            h.apply(c);
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.r_cols[j][i]
        } else {
            0.0
        }
    }

    /// Least-squares coefficients and residuals for `y` against the accepted
    /// columns. Residuals come from the orthogonal complement, so they are
    /// orthogonal to the design to rounding.
    pub(crate) fn solve(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.rank();
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let mut b = vec![0.0; m];
        for i in (0..m).rev() {
            let mut s = qty[i];
            for j in (i + 1)..m {
                s -= self.r(i, j) * b[j];
            }
            b[i] = s / self.r(i, i);
        }
        for c in qty.iter_mut().take(m) {
            *c = 0.0;
        }
        self.apply_q(&mut qty);
        (b, qty)
    }

    /// `(RᵀR)⁻¹ = R⁻¹R⁻ᵀ`, row-major `m × m`.
    pub(crate) fn inverse_gram(&self) -> Vec<f64> {
        let m = self.rank();
        // R⁻¹ is upper triangular; solve R x = e_j column by column.
        let mut rinv = vec![0.0; m * m];
        for j in 0..m {
            for i in (0..=j).rev() {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for l in (i + 1)..=j {
                    s -= self.r(i, l) * rinv[l * m + j];
                }
                rinv[i * m + j] = s / self.r(i, i);
            }
        }
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let s: f64 = (j..m).map(|l| rinv[i * m + l] * rinv[j * m + l]).sum();
                out[i * m + j] = s;
                out[j * m + i] = s;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_column() {
        let mut qr = IncrementalQr::new(3);
        assert!(qr.push(&[1.0, 2.0, 3.0], 1e-12));
        assert!(!qr.push(&[2.0, 4.0, 6.0], 1e-9));
        assert!(qr.push(&[1.0, 0.0, 0.0], 1e-12));
        assert_eq!(qr.rank(), 2);
    }

    #[test]
    fn solves_square_system() {
        let mut qr = IncrementalQr::new(2);
        qr.push(&[2.0, 0.0], 1e-12);
        qr.push(&[1.0, 3.0], 1e-12);
        // [2 1; 0 3] b = [4, 6] -> b = [1, 2]
        let (b, e) = qr.solve(&[4.0, 6.0]);
        assert!((b[0] - 1.0).abs() < 1e-14 && (b[1] - 2.0).abs() < 1e-14);
        assert!(e.iter().all(|x| x.abs() < 1e-14));
        let g = qr.inverse_gram();
        // XᵀX = [4 2; 2 10], inverse = [10 -2; -2 4] / 36
        assert!((g[0] - 10.0 / 36.0).abs() < 1e-14);
        assert!((g[1] + 2.0 / 36.0).abs() < 1e-14);
        assert!((g[3] - 4.0 / 36.0).abs() < 1e-14);
    }
}
