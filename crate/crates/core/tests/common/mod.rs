//! Independent oracles for integration tests. Nothing here calls the
//! crate's least-squares kernel.
#![allow(dead_code)]

/// OLS by explicit normal equations and Gauss-Jordan inversion.
pub struct NormalEqFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub rss: f64,
}

pub fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let m = a.len();
    let mut inv: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..m {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..m {
            if i != col {
                let f = a[i][col];
                for j in 0..m {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

pub fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> NormalEqFit {
    let m = cols.len();
    let n = y.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let xtx: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| dot(&cols[i], &cols[j])).collect())
        .collect();
    let xty: Vec<f64> = cols.iter().map(|c| dot(c, y)).collect();
    let inv = invert(xtx);
    let b: Vec<f64> = (0..m).map(|i| dot(&inv[i], &xty)).collect();
    let rss: f64 = (0..n)
        .map(|t| {
            let fit: f64 = (0..m).map(|j| cols[j][t] * b[j]).sum();
            (y[t] - fit).powi(2)
        })
        .sum();
    let s2 = rss / (n - m) as f64;
    NormalEqFit {
        std_errors: (0..m).map(|j| (s2 * inv[j][j]).sqrt()).collect(),
        coefficients: b,
        rss,
    }
}

/// Rank by Gaussian elimination with full pivoting, relative tolerance.
pub fn brute_rank(cols: &[Vec<f64>], rel_tol: f64) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let n = cols[0].len();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let m = cols.len();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut rank = 0;
    let mut used_cols = vec![false; m];
    for row in 0..n.min(m) {
        let mut best = (0.0, 0, 0);
        for i in row..n {
            for j in 0..m {
                if !used_cols[j] && a[i][j].abs() > best.0 {
                    best = (a[i][j].abs(), i, j);
                }
            }
        }
        if best.0 <= rel_tol * scale {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(row, pi);
        used_cols[pj] = true;
        for i in (row + 1)..n {
            let f = a[i][pj] / a[row][pj];
            for j in 0..m {
                a[i][j] -= f * a[row][j];
            }
        }
        rank += 1;
    }
    rank
}
