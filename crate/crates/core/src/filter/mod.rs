//! Data assimilation: a particle filter over level-set fields and an ensemble
//! Kalman filter over the spread parameters.

mod enkf;
mod likelihood;
mod particle;
mod resample;

use serde::{Deserialize, Serialize};

pub use enkf::{downsample_block_mean, enkf_run, kalman_update, EnkfEnsemble};
pub use likelihood::{blurred_front, likelihood_score, predicted_image};
pub use particle::{
    pf_init, pf_predict, pf_run, pf_update, pf_weight, resample_systematic, Particle, ParticleSet,
    UpdateReport,
};
pub use resample::{copy_counts, ess, systematic_indices, systematic_resample};

use crate::error::{Error, Result};
use crate::field::{extract_contour, variance_field, FrontContour, LevelSetField, ScalarField};
use crate::solver::{SolverConfig, StepStats};
use crate::spread::RosParams;

/// Mapped fire front at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub time: f64,
    pub front: FrontContour,
}

/// Checks that observation times are finite and strictly increasing.
pub fn validate_observations(obs: &[Observation]) -> Result<()> {
    for (k, o) in obs.iter().enumerate() {
        if !o.time.is_finite() || o.time < 0.0 {
            return Err(Error::invalid("observations", format!("observation {k} has time {}", o.time)));
        }
        if k > 0 && o.time <= obs[k - 1].time {
            return Err(Error::invalid(
                "observations",
                format!("observation {k} at t = {} s does not follow t = {} s", o.time, obs[k - 1].time),
            ));
        }
        o.front.validate()?;
    }
    Ok(())
}

/// Tunables shared by both filters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub solver: SolverConfig,
    pub n_particles: usize,
    pub n_members: usize,
    /// Blur of predicted contour images, in cells.
    pub sigma_blur: f64,
    /// Particle weights scale with `score^likelihood_exponent`; 1 uses the
    /// overlap score as the likelihood itself.
    pub likelihood_exponent: f64,
    /// Resample at every update; otherwise only when ESS < n/2.
    pub resample_always: bool,
    /// Random-walk variances of the EnKF parameters per cycle.
    pub q_beta: f64,
    pub q_gamma: f64,
    /// EnKF observation-noise variance per pixel.
    pub r_scale: f64,
    /// Block size of the EnKF observation downsampling.
    pub downsample: usize,
    /// Number of member contours kept per cycle.
    pub n_member_contours: usize,
    pub seed: u64,
    /// Output cadence between observations; `None` reports at observation
    /// times only.
    pub obs_interval: Option<f64>,
    /// Last report time; `None` means the last observation time.
    pub t_end: Option<f64>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            solver: SolverConfig::default(),
            n_particles: 100,
            n_members: 10,
            sigma_blur: 2.0,
            likelihood_exponent: 1.0,
            resample_always: true,
            q_beta: 1e-6,
            q_gamma: 1e-5,
            r_scale: 0.01,
            downsample: 4,
            n_member_contours: 20,
            seed: 0,
            obs_interval: None,
            t_end: None,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.n_particles == 0 {
            return Err(Error::invalid("n_particles", "must be at least 1"));
        }
        if self.n_members < 2 {
            return Err(Error::invalid("n_members", "must be at least 2"));
        }
        if !(self.sigma_blur.is_finite() && self.sigma_blur > 0.0) {
            return Err(Error::invalid("sigma_blur", "must be finite and > 0"));
        }
        if !(self.likelihood_exponent.is_finite() && self.likelihood_exponent > 0.0) {
            return Err(Error::invalid("likelihood_exponent", "must be finite and > 0"));
        }
        for (name, v) in [("q_beta", self.q_beta), ("q_gamma", self.q_gamma), ("r_scale", self.r_scale)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        if self.downsample == 0 {
            return Err(Error::invalid("downsample", "must be at least 1"));
        }
        if let Some(i) = self.obs_interval {
            if !(i.is_finite() && i > 0.0) {
                return Err(Error::invalid("obs_interval", "must be finite and > 0"));
            }
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::invalid("t_end", "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Report times with the index of the observation made at each, if any.
///
/// The union of observation times and multiples of `obs_interval` up to
/// `t_end`; times closer than 1e-9 s are merged.
pub fn schedule(obs: &[Observation], config: &FilterConfig) -> Vec<(f64, Option<usize>)> {
    let t_end = config
        .t_end
        .unwrap_or_else(|| obs.last().map_or(0.0, |o| o.time));
    let mut times: Vec<(f64, Option<usize>)> =
        obs.iter().enumerate().map(|(k, o)| (o.time, Some(k))).collect();
    if let Some(dt) = config.obs_interval {
        let mut k = 1u64;
        loop {
            let t = k as f64 * dt;
            if t > t_end + 1e-9 {
                break;
            }
            if !obs.iter().any(|o| (o.time - t).abs() < 1e-9) {
                times.push((t, None));
            }
            k += 1;
        }
    }
    times.retain(|(t, _)| *t > 1e-9);
    times.sort_by(|a, b| a.0.total_cmp(&b.0));
    times
}

/// Spread statistics of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub mean_beta: f64,
    pub mean_gamma: f64,
    pub std_beta: f64,
    pub std_gamma: f64,
}

impl ParamSummary {
    /// Weighted mean and standard deviation; weights need not be normalised.
    pub fn weighted(params: &[RosParams], weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        let mean = |f: fn(&RosParams) -> f64| {
            params.iter().zip(weights).map(|(p, w)| w * f(p)).sum::<f64>() / total
        };
        let mb = mean(|p| p.beta);
        let mg = mean(|p| p.gamma);
        let var = |f: fn(&RosParams) -> f64, m: f64| {
            params.iter().zip(weights).map(|(p, w)| w * (f(p) - m).powi(2)).sum::<f64>() / total
        };
        ParamSummary {
            mean_beta: mb,
            mean_gamma: mg,
            std_beta: var(|p| p.beta, mb).sqrt(),
            std_gamma: var(|p| p.gamma, mg).sqrt(),
        }
    }

    pub fn mean(&self) -> RosParams {
        RosParams {
            beta: self.mean_beta,
            gamma: self.mean_gamma,
        }
    }
}

/// Summary of the cellwise ensemble variance of `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSummary {
    pub max: f64,
    pub mean: f64,
    /// Mean over cells within two cells of the mean front.
    pub front_mean: f64,
}

impl VarianceSummary {
    pub fn of(variance: &ScalarField, mean: &LevelSetField) -> Self {
        let band = 2.0 * mean.grid().min_spacing();
        let (sum, count) = variance
            .values()
            .iter()
            .zip(mean.values())
            .filter(|(_, m)| m.abs() <= band)
            .fold((0.0, 0usize), |(s, c), (v, _)| (s + v, c + 1));
        VarianceSummary {
            max: variance.max(),
            mean: variance.mean(),
            front_mean: if count > 0 { sum / count as f64 } else { 0.0 },
        }
    }
}

/// Everything recorded at one report time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub time: f64,
    /// Index into the observation list when an observation was assimilated.
    pub observation: Option<usize>,
    /// Ensemble-mean front before the update.
    pub forecast: FrontContour,
    /// Ensemble-mean front after the update; equals `forecast` when nothing
    /// was assimilated.
    pub analysis: FrontContour,
    /// Leading members after the update.
    pub members: Vec<FrontContour>,
    pub variance: VarianceSummary,
    /// Per-particle or per-member parameters, with the weights used for
    /// `summary`.
    pub params: Vec<RosParams>,
    pub weights: Vec<f64>,
    pub summary: ParamSummary,
    pub ess: Option<f64>,
    pub resampled: bool,
    /// Set when the update was skipped: all likelihood scores were zero (PF)
    /// or the Kalman gain was not finite (EnKF).
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutput {
    pub initial: FrontContour,
    pub initial_summary: ParamSummary,
    pub records: Vec<CycleRecord>,
    pub stats: StepStats,
}

impl FilterOutput {
    pub fn flagged_times(&self) -> Vec<f64> {
        self.records.iter().filter(|r| r.flagged).map(|r| r.time).collect()
    }
}

/// Mean contour plus variance summary of a weighted ensemble.
pub(crate) fn ensemble_front(
    fields: &[LevelSetField],
    weights: &[f64],
) -> Result<(FrontContour, VarianceSummary)> {
    let mean = crate::field::mean_field(fields, weights)?;
    let var = variance_field(fields, weights)?;
    Ok((extract_contour(&mean), VarianceSummary::of(&var, &mean)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(t: f64) -> Observation {
        Observation {
            time: t,
            front: FrontContour::new(vec![vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]], t),
        }
    }

    #[test]
    fn schedule_unions_cadence_and_observations() {
        let cfg = FilterConfig {
            obs_interval: Some(10.0),
            t_end: Some(90.0),
            ..Default::default()
        };
        let all: Vec<_> = (1..=9).map(|k| obs(10.0 * k as f64)).collect();
        let s = schedule(&all, &cfg);
        assert_eq!(s.len(), 9);
        assert!(s.iter().enumerate().all(|(k, (_, o))| *o == Some(k)));

        let s = schedule(&[obs(15.0)], &cfg);
        assert_eq!(s.len(), 10);
        assert_eq!(s[1], (15.0, Some(0)));
        assert!(schedule(&[], &FilterConfig::default()).is_empty());
    }

    #[test]
    fn observation_ordering() {
        assert!(validate_observations(&[obs(10.0), obs(20.0)]).is_ok());
        assert!(validate_observations(&[obs(10.0), obs(10.0)]).is_err());
    }

    #[test]
    fn weighted_summary() {
        let p = [RosParams { beta: 1.0, gamma: 0.0 }, RosParams { beta: 3.0, gamma: 2.0 }];
        let s = ParamSummary::weighted(&p, &[1.0, 1.0]);
        assert_eq!((s.mean_beta, s.mean_gamma, s.std_beta, s.std_gamma), (2.0, 1.0, 1.0, 1.0));
        let s = ParamSummary::weighted(&p, &[0.0, 2.0]);
        assert_eq!((s.mean_beta, s.std_beta), (3.0, 0.0));
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::default().validate().is_ok());
        assert!(FilterConfig { n_members: 1, ..Default::default() }.validate().is_err());
        assert!(FilterConfig { sigma_blur: 0.0, ..Default::default() }.validate().is_err());
        assert!(FilterConfig { obs_interval: Some(0.0), ..Default::default() }.validate().is_err());
    }
}
