//! Rate-of-spread model `s = beta + gamma * omega` and its wind forcing.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the spread model.
///
/// `beta` is the no-wind front speed (m/s), `gamma` the gain applied to the
/// wind component along the front normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosParams {
    pub beta: f64,
    pub gamma: f64,
}

impl RosParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        let p = RosParams { beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::invalid("beta", format!("must be finite and >= 0, got {}", self.beta)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be finite"));
        }
        Ok(())
    }

    /// Upper bound of `|speed|` over all front orientations for a wind vector.
    pub fn max_speed(&self, wind: (f64, f64)) -> f64 {
        let w = wind.0.hypot(wind.1);
        self.beta.abs().max((self.beta + self.gamma * w).abs())
    }
}

/// Gaussian prior over [`RosParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosPrior {
    pub mu_beta: f64,
    pub sigma_beta: f64,
    pub mu_gamma: f64,
    pub sigma_gamma: f64,
}

impl RosPrior {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu_beta", self.mu_beta), ("mu_gamma", self.mu_gamma)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [("sigma_beta", self.sigma_beta), ("sigma_gamma", self.sigma_gamma)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Prior with zero variance around `params`.
    pub fn degenerate(params: RosParams) -> Self {
        RosPrior {
            mu_beta: params.beta,
            sigma_beta: 0.0,
            mu_gamma: params.gamma,
            sigma_gamma: 0.0,
        }
    }

    pub fn mean(&self) -> RosParams {
        RosParams {
            beta: self.mu_beta.max(0.0),
            gamma: self.mu_gamma,
        }
    }
}

/// Independent Gaussian draws for `beta` and `gamma`; `beta` is then clamped
/// at zero.
pub fn sample_prior<R: Rng + ?Sized>(prior: &RosPrior, rng: &mut R) -> RosParams {
    let draw = |mu: f64, sigma: f64, rng: &mut R| {
        if sigma == 0.0 {
            mu
        } else {
            // sigma validated > 0 and finite
            Normal::new(mu, sigma).map(|n| n.sample(rng)).unwrap_or(mu)
        }
    };
    let beta = draw(prior.mu_beta, prior.sigma_beta, rng);
    let gamma = draw(prior.mu_gamma, prior.sigma_gamma, rng);
    RosParams {
        beta: beta.max(0.0),
        gamma,
    }
}

/// Normal front speed for a unit `normal`.
///
/// With `clamp_upwind` the wind component is floored at zero so the upwind
/// flank never retreats; without it this is the bare linear model.
#[inline]
pub fn speed(params: &RosParams, wind: (f64, f64), normal: (f64, f64), clamp_upwind: bool) -> f64 {
    let omega = wind.0 * normal.0 + wind.1 * normal.1;
    let omega = if clamp_upwind { omega.max(0.0) } else { omega };
    params.beta + params.gamma * omega
}

/// `beta + gamma * max(0, wind . normal)`, checking that `normal` is a unit vector.
pub fn normal_speed(params: &RosParams, wind: (f64, f64), normal: (f64, f64)) -> Result<f64> {
    let len = normal.0.hypot(normal.1);
    if (len - 1.0).abs() > 1e-6 {
        return Err(Error::invalid("normal", format!("must be a unit vector, |n| = {len}")));
    }
    Ok(speed(params, wind, normal, true))
}

/// One wind observation: the vector the wind blows toward, in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindSample {
    pub time: f64,
    pub wx: f64,
    pub wy: f64,
}

/// Time-ordered wind samples held constant between sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct WindSeries {
    samples: Vec<WindSample>,
}

impl WindSeries {
    pub fn new(samples: Vec<WindSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("wind", "series must not be empty"));
        }
        for (k, s) in samples.iter().enumerate() {
            if !(s.time.is_finite() && s.time >= 0.0 && s.wx.is_finite() && s.wy.is_finite()) {
                return Err(Error::invalid(
                    "wind",
                    format!("sample {k} has a negative or non-finite field"),
                ));
            }
            if k > 0 && s.time <= samples[k - 1].time {
                return Err(Error::invalid(
                    "wind",
                    format!("sample {k} at t = {} is not after t = {}", s.time, samples[k - 1].time),
                ));
            }
        }
        Ok(WindSeries { samples })
    }

    /// A single sample at t = 0.
    pub fn constant(wx: f64, wy: f64) -> Result<Self> {
        WindSeries::new(vec![WindSample { time: 0.0, wx, wy }])
    }

    pub fn samples(&self) -> &[WindSample] {
        &self.samples
    }

    /// Zero-order hold: the latest sample at or before `t`, or the first
    /// sample for `t` before the series starts.
    pub fn wind_at(&self, t: f64) -> (f64, f64) {
        let k = self.samples.partition_point(|s| s.time <= t);
        let s = &self.samples[k.saturating_sub(1)];
        (s.wx, s.wy)
    }

    /// First sample time strictly after `t`.
    pub fn next_change_after(&self, t: f64) -> Option<f64> {
        let k = self.samples.partition_point(|s| s.time <= t);
        self.samples.get(k).map(|s| s.time)
    }
}

/// Free-function form of [`WindSeries::wind_at`].
pub fn wind_at(series: &WindSeries, t: f64) -> (f64, f64) {
    series.wind_at(t)
}
