use serde::{Deserialize, Serialize};

use crate::error::SamplerError;
use crate::estimator::EstimatorMode;

/// Parameters of one preprocessing run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Approximation parameter ε, in `(0, 1/2)`.
    pub eps: f64,
    /// Failure probability δ, in `(0, 1)`.
    pub delta: f64,
    /// Trade-off parameter, `≥ 1`. Larger values make preprocessing cheaper
    /// and each sample more expensive.
    pub x: f64,
    pub seed: u64,
    pub estimator: EstimatorMode,
}

impl SamplerConfig {
    pub fn new(eps: f64, delta: f64, x: f64, seed: u64) -> Self {
        SamplerConfig {
            eps,
            delta,
            x,
            seed,
            estimator: EstimatorMode::Exact,
        }
    }

    pub fn with_estimator(mut self, estimator: EstimatorMode) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(SamplerError::InvalidConfig(format!("ε={} not in (0, 1/2)", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(SamplerError::InvalidConfig(format!("δ={} not in (0, 1)", self.delta)));
        }
        if !(self.x >= 1.0 && self.x.is_finite()) {
            return Err(SamplerError::InvalidConfig(format!("x={} must be a finite value ≥ 1", self.x)));
        }
        Ok(())
    }

    /// Number of candidate multisets, `⌈log₃(3/δ)⌉`.
    pub fn repetitions(&self) -> u32 {
        repetitions(self.delta)
    }
}

/// Smallest `t ≥ 1` with `3^t ≥ 3/δ`. Computed by integer powers so that
/// exact powers of three (δ = 1/3, 1/9, …) do not round up.
pub fn repetitions(delta: f64) -> u32 {
    let target = 3.0 / delta * (1.0 - 1e-12);
    let mut t = 1;
    let mut power = 3.0;
    while power < target {
        t += 1;
        power *= 3.0;
    }
    t
}

/// Multiset size `s = (n/τ)·35·ln(6nt/δ)/ε²`, rounded up.
pub fn multiset_size(n: usize, tau: f64, eps: f64, delta: f64, t: u32) -> usize {
    let n = n as f64;
    let s = (n / tau) * 35.0 * (6.0 * n * t as f64 / delta).ln() / (eps * eps);
    s.ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetitions_from_delta() {
        assert_eq!(repetitions(1.0 / 3.0), 2);
        assert_eq!(repetitions(0.1), 4);
        assert_eq!(repetitions(0.5), 2);
        assert_eq!(repetitions(0.99), 2);
        assert_eq!(repetitions(1.0 / 9.0), 3);
        assert_eq!(repetitions(0.01), 6);
    }

    #[test]
    fn validation() {
        assert!(SamplerConfig::new(0.25, 0.1, 1.0, 0).validate().is_ok());
        assert!(SamplerConfig::new(0.5, 0.1, 1.0, 0).validate().is_err());
        assert!(SamplerConfig::new(0.0, 0.1, 1.0, 0).validate().is_err());
        assert!(SamplerConfig::new(0.25, 1.0, 1.0, 0).validate().is_err());
        assert!(SamplerConfig::new(0.25, 0.1, 0.99, 0).validate().is_err());
        assert!(SamplerConfig::new(0.25, 0.1, f64::NAN, 0).validate().is_err());
    }

    #[test]
    fn multiset_size_formula() {
        // n=100, τ=10, ε=0.4, δ=0.1, t=4: 10·35·ln(24000)/0.16
        let want = (10.0 * 35.0 * 24_000f64.ln() / 0.16).ceil() as usize;
        assert_eq!(multiset_size(100, 10.0, 0.4, 0.1, 4), want);
    }
}
