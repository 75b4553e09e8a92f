//! Simulation of `y_t = γ′x_t + z_t`, `z_t = α z_{t-1} + u_t`, with `u_t` a
//! finite autoregression in the innovations.
//!
//! Every draw comes from a ChaCha8 generator keyed by `base_seed` and
//! positioned on stream `replication_index`, so a replication's path does not
//! depend on which thread produced it or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, StudentT};

use crate::deterministics::{build, DetSpec};
use crate::error::{Error, Result};

/// Innovation law of `ε_t`, always scaled to variance `sigma²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Innovations {
    Gaussian,
    /// Student-t with the given degrees of freedom (at least 5).
    StudentT(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgpConfig {
    pub gamma: Vec<f64>,
    pub det: DetSpec,
    pub alpha: f64,
    /// `b_1..b_k` of `u_t = Σ b_j u_{t-j} + ε_t`; empty for iid errors.
    pub error_ar: Vec<f64>,
    pub sigma: f64,
    pub z0: f64,
    pub burn_in: usize,
    pub innovations: Innovations,
}

impl Default for DgpConfig {
    /// Driftless Gaussian random walk started at zero.
    fn default() -> Self {
        Self {
            gamma: Vec::new(),
            det: DetSpec::None,
            alpha: 1.0,
            error_ar: Vec::new(),
            sigma: 1.0,
            z0: 0.0,
            burn_in: 0,
            innovations: Innovations::Gaussian,
        }
    }
}

/// Burn-in used by [`DgpConfig::with_stationary_start`].
pub const STATIONARY_BURN_IN: usize = 1000;

impl DgpConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    /// Draws the initial condition from (approximately) the stationary law
    /// by running a long discarded burn-in.
    pub fn with_stationary_start(mut self) -> Self {
        self.burn_in = STATIONARY_BURN_IN;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidConfig("alpha must be finite".into()));
        }
        if self.gamma.len() != self.det.column_count() {
            return Err(Error::InvalidConfig(format!(
                "gamma has {} entries but `{}` has {} columns",
                self.gamma.len(),
                self.det,
                self.det.column_count()
            )));
        }
        if let Innovations::StudentT(df) = self.innovations {
            if !(df >= 5.0) {
                return Err(Error::InvalidConfig(format!(
                    "Student-t innovations need df >= 5, got {df}"
                )));
            }
        }
        if !is_stationary_ar(&self.error_ar) {
            return Err(Error::NonStationaryErrorPolynomial);
        }
        Ok(())
    }
}

/// Whether `1 - b_1 L - ... - b_k L^k` has all roots outside the unit
/// circle, via the step-down (reverse Durbin-Levinson) recursion: the
/// polynomial is stationary iff every partial autocorrelation is inside
/// `(-1, 1)`.
pub fn is_stationary_ar(coefs: &[f64]) -> bool {
    if coefs.iter().any(|c| !c.is_finite()) {
        return false;
    }
    let mut a = coefs.to_vec();
    while let Some(&kappa) = a.last() {
        if kappa.abs() >= 1.0 {
            return false;
        }
        let m = a.len();
        let denom = 1.0 - kappa * kappa;
        let next: Vec<f64> = (0..m - 1).map(|j| (a[j] + kappa * a[m - 2 - j]) / denom).collect();
        a = next;
    }
    true
}

/// Identifies one replication's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub replication_index: u64,
}

impl SeedSpec {
    pub fn new(base_seed: u64, replication_index: u64) -> Self {
        Self {
            base_seed,
            replication_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.replication_index);
        rng
    }
}

fn draw(rng: &mut ChaCha8Rng, innovations: Innovations, sigma: f64) -> f64 {
    match innovations {
        Innovations::Gaussian => sigma * rng.sample::<f64, _>(StandardNormal),
        Innovations::StudentT(df) => {
            // Validated df >= 5, so the distribution constructor cannot fail.
            let t = StudentT::new(df).expect("valid df");
            sigma * ((df - 2.0) / df).sqrt() * rng.sample(t)
        }
    }
}

/// Simulates `y_1..y_T`.
pub fn simulate(config: &DgpConfig, t: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    config.validate()?;
    if t == 0 {
        return Err(Error::InvalidConfig("T must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let k = config.error_ar.len();
    let total = config.burn_in + t;

    // u history kept in a ring of the last k values; pre-sample u = 0.
    let mut u_hist = vec![0.0; k];
    let mut z = config.z0;
    let mut out = Vec::with_capacity(t);
    for step in 0..total {
        let eps = draw(&mut rng, config.innovations, config.sigma);
        let mut u = eps;
        for (j, b) in config.error_ar.iter().enumerate() {
            u += b * u_hist[(step + k - 1 - j) % k];
        }
        if k > 0 {
            u_hist[step % k] = u;
        }
        z = config.alpha * z + u;
        if step >= config.burn_in {
            out.push(z);
        }
    }

    if config.det.column_count() > 0 {
        let x = build(&config.det, 1, t as i64)?;
        let mean = x.mul_vec(&config.gamma);
        for (y, m) in out.iter_mut().zip(mean) {
            *y += m;
        }
    }
    Ok(out)
}
