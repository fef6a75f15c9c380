use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, Ignition};
use crate::filter::FilterConfig;
use crate::solver::SolverConfig;
use crate::spread::{RosParams, RosPrior, WindSample, WindSeries};

/// Wind used when no wind file is given: a per-second series of
/// `(wx, wy) * (1 + gust_amplitude * sin(2 pi t / gust_period))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindConfig {
    pub wx: f64,
    pub wy: f64,
    pub gust_amplitude: f64,
    pub gust_period: f64,
}

impl Default for WindConfig {
    fn default() -> Self {
        WindConfig {
            wx: 0.0,
            wy: 0.0,
            gust_amplitude: 0.0,
            gust_period: 30.0,
        }
    }
}

impl WindConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.wx.is_finite() && self.wy.is_finite() && self.gust_amplitude.is_finite()) {
            return Err(Error::Config("wind: components must be finite".into()));
        }
        if !(self.gust_period.is_finite() && self.gust_period > 0.0) {
            return Err(Error::Config("wind.gust_period: must be > 0".into()));
        }
        Ok(())
    }

    /// Samples at every whole second in `[0, t_end]`.
    pub fn series(&self, t_end: f64) -> Result<WindSeries> {
        if self.gust_amplitude == 0.0 {
            return WindSeries::constant(self.wx, self.wy);
        }
        let n = t_end.ceil().max(0.0) as usize;
        let samples = (0..=n)
            .map(|s| {
                let t = s as f64;
                let f = 1.0 + self.gust_amplitude * (2.0 * std::f64::consts::PI * t / self.gust_period).sin();
                WindSample {
                    time: t,
                    wx: self.wx * f,
                    wy: self.wy * f,
                }
            })
            .collect();
        WindSeries::new(samples)
    }
}

/// Settings of the synthetic-truth generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    /// Process noise of the truth run (m per step, before smoothing).
    pub noise_sigma: f64,
    /// Standard deviation (m) of the mapping error applied to each observed
    /// vertex along the local front normal.
    pub obs_jitter: f64,
}

fn default_t_end() -> f64 {
    90.0
}

fn default_obs_interval() -> f64 {
    10.0
}

fn defaults() -> FilterConfig {
    FilterConfig::default()
}

/// Everything needed to reproduce a run; mirrors `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: Grid,
    pub ignition: Ignition,
    /// Fixed spread parameters: the simulation parameters and the synthetic
    /// truth.
    #[serde(default)]
    pub params: Option<RosParams>,
    /// Parameter prior of the filters; defaults to a point mass at `params`.
    #[serde(default)]
    pub prior: Option<RosPrior>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub wind: WindConfig,
    #[serde(default)]
    pub synthetic: SyntheticConfig,
    #[serde(default = "default_n_particles")]
    pub n_particles: usize,
    #[serde(default = "default_n_members")]
    pub n_members: usize,
    #[serde(default = "default_sigma_blur")]
    pub sigma_blur: f64,
    #[serde(default = "default_likelihood_exponent")]
    pub likelihood_exponent: f64,
    #[serde(default = "default_resample_always")]
    pub resample_always: bool,
    #[serde(default = "default_q_beta")]
    pub q_beta: f64,
    #[serde(default = "default_q_gamma")]
    pub q_gamma: f64,
    #[serde(default = "default_r_scale")]
    pub r_scale: f64,
    #[serde(default = "default_downsample")]
    pub downsample: usize,
    #[serde(default = "default_n_member_contours")]
    pub n_member_contours: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_obs_interval")]
    pub obs_interval: f64,
}

fn default_n_particles() -> usize {
    defaults().n_particles
}
fn default_n_members() -> usize {
    defaults().n_members
}
fn default_sigma_blur() -> f64 {
    defaults().sigma_blur
}
fn default_likelihood_exponent() -> f64 {
    defaults().likelihood_exponent
}
fn default_resample_always() -> bool {
    defaults().resample_always
}
fn default_q_beta() -> f64 {
    defaults().q_beta
}
fn default_q_gamma() -> f64 {
    defaults().q_gamma
}
fn default_r_scale() -> f64 {
    defaults().r_scale
}
fn default_downsample() -> usize {
    defaults().downsample
}
fn default_n_member_contours() -> usize {
    defaults().n_member_contours
}

impl RunConfig {
    /// A config with every optional field at its default.
    pub fn new(grid: Grid, ignition: Ignition) -> Self {
        let f = defaults();
        RunConfig {
            grid,
            ignition,
            params: None,
            prior: None,
            solver: SolverConfig::default(),
            wind: WindConfig::default(),
            synthetic: SyntheticConfig::default(),
            n_particles: f.n_particles,
            n_members: f.n_members,
            sigma_blur: f.sigma_blur,
            likelihood_exponent: f.likelihood_exponent,
            resample_always: f.resample_always,
            q_beta: f.q_beta,
            q_gamma: f.q_gamma,
            r_scale: f.r_scale,
            downsample: f.downsample,
            n_member_contours: f.n_member_contours,
            seed: 0,
            t_end: default_t_end(),
            obs_interval: default_obs_interval(),
        }
    }

    /// Parses and validates JSON text. Errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("{path}: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid
            .validate()
            .map_err(|e| Error::Config(format!("grid: {e}")))?;
        self.ignition
            .level_set(&self.grid)
            .map_err(|e| Error::Config(format!("ignition: {e}")))?;
        if let Some(p) = &self.params {
            p.validate().map_err(|e| Error::Config(format!("params: {e}")))?;
        }
        if let Some(p) = &self.prior {
            p.validate().map_err(|e| Error::Config(format!("prior: {e}")))?;
        }
        self.wind.validate()?;
        for (name, v) in [
            ("synthetic.noise_sigma", self.synthetic.noise_sigma),
            ("synthetic.obs_jitter", self.synthetic.obs_jitter),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name}: must be finite and >= 0")));
            }
        }
        if !(self.obs_interval.is_finite() && self.obs_interval > 0.0) {
            return Err(Error::Config(format!(
                "obs_interval: must be > 0, got {}",
                self.obs_interval
            )));
        }
        // t_end = 0 is allowed: a run that only reports the initial front
        if !(self.t_end.is_finite() && (self.t_end == 0.0 || self.t_end >= self.obs_interval)) {
            return Err(Error::Config(format!(
                "t_end: must be 0 or >= obs_interval ({}), got {}",
                self.obs_interval, self.t_end
            )));
        }
        self.filter()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Fixed parameters, required by simulation and synthesis.
    pub fn require_params(&self) -> Result<RosParams> {
        self.params
            .ok_or_else(|| Error::Config("params: required for this command".into()))
    }

    /// The filter prior, falling back to a point mass at `params`.
    pub fn effective_prior(&self) -> Result<RosPrior> {
        match (self.prior, self.params) {
            (Some(p), _) => Ok(p),
            (None, Some(p)) => Ok(RosPrior::degenerate(p)),
            (None, None) => Err(Error::Config("prior: required (or give params)".into())),
        }
    }

    pub fn filter(&self) -> FilterConfig {
        FilterConfig {
            solver: self.solver,
            n_particles: self.n_particles,
            n_members: self.n_members,
            sigma_blur: self.sigma_blur,
            likelihood_exponent: self.likelihood_exponent,
            resample_always: self.resample_always,
            q_beta: self.q_beta,
            q_gamma: self.q_gamma,
            r_scale: self.r_scale,
            downsample: self.downsample,
            n_member_contours: self.n_member_contours,
            seed: self.seed,
            obs_interval: Some(self.obs_interval),
            t_end: Some(self.t_end),
        }
    }

    /// Report times `k * obs_interval` for `k = 1..` up to `t_end`.
    pub fn report_times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 1u64;
        while k as f64 * self.obs_interval <= self.t_end + 1e-9 {
            out.push(k as f64 * self.obs_interval);
            k += 1;
        }
        out
    }
}
