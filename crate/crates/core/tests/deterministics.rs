mod common;

use urkit::regression::{ols_fit, DEFAULT_RANK_TOL};
use urkit::{build, lagged_expansion, DetSpec};

/// Columns of x_t, x_{t-1}, ..., x_{t-p} evaluated directly, before pruning.
fn unpruned(spec: &DetSpec, p: usize, t_first: i64, t_last: i64) -> Vec<Vec<f64>> {
    let mut cols = Vec::new();
    for lag in 0..=p as i64 {
        for j in 0..spec.column_count() {
            cols.push((t_first..=t_last).map(|t| spec.eval(t - lag)[j]).collect());
        }
    }
    cols
}

#[test]
fn linear_trend_expansion_rank_two() {
    let spec = DetSpec::linear_trend();
    let raw = unpruned(&spec, 2, 3, 10);
    assert_eq!(raw.len(), 6);
    assert_eq!(common::brute_rank(&raw, 1e-12), 2);
    let x = lagged_expansion(&spec, 2, 3, 10, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(x.labels(), &["const", "trend"]);
}

#[test]
fn polynomial_expansion_rank_is_order_plus_one() {
    for r in 0..=2u32 {
        for p in [1usize, 2, 5] {
            let spec = DetSpec::Polynomial(r);
            let (first, last) = (p as i64 + 1, 60);
            let raw = unpruned(&spec, p, first, last);
            assert_eq!(common::brute_rank(&raw, 1e-12), r as usize + 1, "r={r} p={p}");
            let x = lagged_expansion(&spec, p, first, last, DEFAULT_RANK_TOL).unwrap();
            assert_eq!(x.ncols(), r as usize + 1, "r={r} p={p}");
            assert_eq!(x.labels(), &spec.labels()[..], "r={r} p={p}");
        }
    }
}

#[test]
fn break_expansion_exceeds_unlagged_rank() {
    let spec = DetSpec::Break { order: 0, date: 5, trend_break: false };
    let raw = unpruned(&spec, 1, 2, 10);
    assert_eq!(common::brute_rank(&raw, 1e-12), 3);
    let x = lagged_expansion(&spec, 1, 2, 10, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(x.ncols(), 3);
    assert!(x.ncols() > build(&spec, 2, 10).unwrap().ncols());

    for p in 1..=4 {
        let spec = DetSpec::Break { order: 1, date: 30, trend_break: true };
        let raw = unpruned(&spec, p, p as i64 + 1, 80);
        let x = lagged_expansion(&spec, p, p as i64 + 1, 80, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(x.ncols(), common::brute_rank(&raw, 1e-12), "p={p}");
        assert!(x.ncols() > spec.column_count());
    }
}

#[test]
fn column_count_independent_of_range() {
    let specs = [
        DetSpec::None,
        DetSpec::Polynomial(0),
        DetSpec::Polynomial(3),
        DetSpec::Break { order: 1, date: 4, trend_break: true },
    ];
    for spec in &specs {
        for last in [6, 20, 200] {
            let x = build(spec, 1, last).unwrap();
            assert_eq!(x.ncols(), spec.column_count());
            assert_eq!(x.nrows(), last as usize);
            assert_eq!(x, build(spec, 1, last).unwrap());
        }
    }
}

#[test]
fn shifted_polynomial_spans_same_space() {
    let y: Vec<f64> = (0..40).map(|i| ((i * 7919) % 23) as f64 - 0.3 * i as f64).collect();
    for r in 0..=2 {
        let spec = DetSpec::Polynomial(r);
        let a = build(&spec, 1, 40).unwrap();
        let b = build(&spec, 11, 50).unwrap();
        let fa = ols_fit(&y, &a).unwrap();
        let fb = ols_fit(&y, &b).unwrap();
        for (ea, eb) in fa.residuals.iter().zip(&fb.residuals) {
            assert!((ea - eb).abs() < 1e-10, "r={r}");
        }
    }
}
