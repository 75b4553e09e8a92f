use urkit::simulation::{simulate, DgpConfig, Innovations, SeedSpec};
use urkit::{build, DetSpec, Error};

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn white_noise_variance() {
    for sigma in [1.0, 2.5] {
        let cfg = DgpConfig { alpha: 0.0, sigma, ..DgpConfig::default() };
        let y = simulate(&cfg, 1_000_000, SeedSpec::new(17, 0)).unwrap();
        let v = variance(&y);
        assert!((v / (sigma * sigma) - 1.0).abs() < 0.01, "sigma={sigma}: {v}");
    }
}

#[test]
fn student_t_innovations_keep_variance() {
    let cfg = DgpConfig { alpha: 0.0, innovations: Innovations::StudentT(6.0), ..DgpConfig::default() };
    let y = simulate(&cfg, 1_000_000, SeedSpec::new(5, 0)).unwrap();
    assert!((variance(&y) - 1.0).abs() < 0.02);
}

#[test]
fn stationary_ar1_variance() {
    let cfg = DgpConfig { alpha: 0.5, ..DgpConfig::default() }.with_stationary_start();
    let y = simulate(&cfg, 1_000_000, SeedSpec::new(23, 1)).unwrap();
    let want = 1.0 / (1.0 - 0.25);
    assert!((variance(&y) / want - 1.0).abs() < 0.02, "{}", variance(&y));
}

#[test]
fn bit_identical_reruns_and_independent_streams() {
    let cfg = DgpConfig { alpha: 0.0, ..DgpConfig::default() };
    let a = simulate(&cfg, 10_000, SeedSpec::new(99, 0)).unwrap();
    let b = simulate(&cfg, 10_000, SeedSpec::new(99, 1)).unwrap();
    let a2 = simulate(&cfg, 10_000, SeedSpec::new(99, 0)).unwrap();
    assert!(a.iter().zip(&a2).all(|(x, y)| x.to_bits() == y.to_bits()));

    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let r = cov / ((variance(&a) * variance(&b)).sqrt() * (n - 1.0));
    assert!(r.abs() < 4.0 / n.sqrt(), "r = {r}");
}

#[test]
fn unit_root_differences_are_iid_innovations() {
    let y = simulate(&DgpConfig::default(), 5_000, SeedSpec::new(3, 8)).unwrap();
    let d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    assert!((variance(&d) - 1.0).abs() < 0.06);
}

#[test]
fn gamma_adds_exactly_the_deterministic_mean() {
    let spec = DetSpec::Break { order: 1, date: 40, trend_break: true };
    let gamma = vec![2.0, -0.1, 1.5, 0.05];
    let with = DgpConfig { gamma: gamma.clone(), det: spec.clone(), alpha: 0.7, ..DgpConfig::default() };
    let without = DgpConfig { gamma: vec![0.0; 4], ..with.clone() };
    let seed = SeedSpec::new(1234, 56);
    let a = simulate(&with, 100, seed).unwrap();
    let b = simulate(&without, 100, seed).unwrap();
    let mean = build(&spec, 1, 100).unwrap().mul_vec(&gamma);
    for t in 0..100 {
        assert!((a[t] - b[t] - mean[t]).abs() < 1e-12);
    }
}

#[test]
fn noiseless_trend() {
    let cfg = DgpConfig {
        gamma: vec![1.0, 0.5],
        det: DetSpec::linear_trend(),
        sigma: 1e-300,
        ..DgpConfig::default()
    };
    let y = simulate(&cfg, 50, SeedSpec::new(7, 0)).unwrap();
    for (i, v) in y.iter().enumerate() {
        assert!((v - (1.0 + 0.5 * (i + 1) as f64)).abs() < 1e-12);
    }
}

#[test]
fn rejects_nonstationary_error_polynomial() {
    let cfg = DgpConfig { error_ar: vec![0.7, 0.4], ..DgpConfig::default() };
    assert_eq!(simulate(&cfg, 20, SeedSpec::new(1, 0)), Err(Error::NonStationaryErrorPolynomial));
}
