use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::likelihood::{blurred_front, predicted_image};
use super::{ensemble_front, schedule, validate_observations, CycleRecord, FilterConfig, FilterOutput, Observation, ParamSummary};
use crate::error::{Error, Result};
use crate::field::{extract_contour, Grid, Ignition, LevelSetField, RasterImage};
use crate::rng::{substream, FilterRng, Purpose};
use crate::solver::{propagate_with_stats, SolverConfig, StepStats};
use crate::spread::{sample_prior, RosParams, RosPrior, WindSeries};

/// Parameter ensemble with its random-walk and observation noise levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EnkfEnsemble {
    pub members: Vec<RosParams>,
    pub q_beta: f64,
    pub q_gamma: f64,
    pub r_scale: f64,
}

impl EnkfEnsemble {
    pub fn new(members: Vec<RosParams>, q_beta: f64, q_gamma: f64, r_scale: f64) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::invalid("n_members", "must be at least 2"));
        }
        for (name, v) in [("q_beta", q_beta), ("q_gamma", q_gamma), ("r_scale", r_scale)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, "must be finite and >= 0"));
            }
        }
        Ok(EnkfEnsemble {
            members,
            q_beta,
            q_gamma,
            r_scale,
        })
    }

    pub fn summary(&self) -> ParamSummary {
        ParamSummary::weighted(&self.members, &vec![1.0; self.members.len()])
    }

    /// Adds `N(0, q)` to each parameter and clamps `beta` at zero.
    pub fn random_walk(&mut self, seed: u64, cycle: u64) {
        for (k, m) in self.members.iter_mut().enumerate() {
            let mut rng = substream(seed, Purpose::EnkfRandomWalk, cycle, k as u64);
            m.beta = (m.beta + gaussian(self.q_beta, &mut rng)).max(0.0);
            m.gamma += gaussian(self.q_gamma, &mut rng);
        }
    }
}

fn gaussian(variance: f64, rng: &mut FilterRng) -> f64 {
    if variance == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, variance.sqrt()).map_or(0.0, |n| n.sample(rng))
}

/// Block-mean downsampling of an image by `factor`; edge blocks average the
/// cells they contain.
pub fn downsample_block_mean(image: &RasterImage, factor: usize) -> Vec<f64> {
    let g = image.grid();
    let (mx, my) = (g.nx.div_ceil(factor), g.ny.div_ceil(factor));
    let mut sum = vec![0.0; mx * my];
    let mut count = vec![0usize; mx * my];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let b = (j / factor) * mx + i / factor;
            sum[b] += image.get(i, j);
            count[b] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect()
}

/// Stochastic EnKF analysis of the parameter vectors.
///
/// `predicted[k]` is member `k`'s predicted observation and `perturbed[k]`
/// its perturbed copy of the observation. Uses the low-rank form
/// `K d = A_h (A_y^T A_y + (n-1) r I)^-1 A_y^T d` with anomaly matrices
/// `A_h` (2 x n) and `A_y` (p x n). Returns `None` when the gain is not
/// finite.
pub fn kalman_update(
    states: &[RosParams],
    predicted: &[Vec<f64>],
    perturbed: &[Vec<f64>],
    r_scale: f64,
) -> Option<Vec<RosParams>> {
    let n = states.len();
    let p = predicted.first().map_or(0, Vec::len);
    let mean_b = states.iter().map(|s| s.beta).sum::<f64>() / n as f64;
    let mean_g = states.iter().map(|s| s.gamma).sum::<f64>() / n as f64;
    let a_h = DMatrix::from_fn(2, n, |r, k| {
        if r == 0 {
            states[k].beta - mean_b
        } else {
            states[k].gamma - mean_g
        }
    });
    if states.iter().all(|s| s == &states[0]) {
        return Some(states.to_vec());
    }
    let mut y_mean = vec![0.0; p];
    for y in predicted {
        for (m, v) in y_mean.iter_mut().zip(y) {
            *m += v / n as f64;
        }
    }
    let a_y = DMatrix::from_fn(p, n, |i, k| predicted[k][i] - y_mean[i]);
    let d = DMatrix::from_fn(p, n, |i, k| perturbed[k][i] - predicted[k][i]);

    let mut m = a_y.tr_mul(&a_y);
    for k in 0..n {
        m[(k, k)] += (n as f64 - 1.0) * r_scale;
    }
    let x = m.cholesky()?.solve(&a_y.tr_mul(&d));
    let delta = a_h * x;
    if delta.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(
        states
            .iter()
            .enumerate()
            .map(|(k, s)| RosParams {
                beta: s.beta + delta[(0, k)],
                gamma: s.gamma + delta[(1, k)],
            })
            .collect(),
    )
}

fn propagate_members(
    reference: &LevelSetField,
    members: &[RosParams],
    t: f64,
    wind: &WindSeries,
    solver: &SolverConfig,
    seed: u64,
    cycle: u64,
) -> Result<(Vec<LevelSetField>, StepStats)> {
    let results: Vec<Result<(LevelSetField, StepStats)>> = members
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let mut rng = substream(seed, Purpose::ProcessNoise, cycle, k as u64);
            propagate_with_stats(reference, t, m, wind, solver, &mut rng)
        })
        .collect();
    let mut stats = StepStats::default();
    let mut fields = Vec::with_capacity(members.len());
    for (k, r) in results.into_iter().enumerate() {
        let (f, s) = r.map_err(|e| Error::Member {
            index: k,
            source: Box::new(e),
        })?;
        stats += s;
        fields.push(f);
    }
    Ok((fields, stats))
}

/// Ensemble Kalman filter over `(beta, gamma)` with the level-set
/// propagation as the observation operator.
///
/// One reference field is carried between cycles. In each cycle the members
/// take a random-walk step, propagate copies of the reference over the
/// window and are compared, as blurred and block-downsampled front images,
/// with the observation processed the same way. The reference then advances
/// with the updated ensemble-mean parameters. `forecast` is the ensemble-mean
/// front before the update, `analysis` the advanced reference front, and
/// `members` the fronts re-propagated with the updated parameters.
pub fn enkf_run(
    grid: &Grid,
    ignition: &Ignition,
    prior: &RosPrior,
    observations: &[Observation],
    wind: &WindSeries,
    config: &FilterConfig,
) -> Result<FilterOutput> {
    config.validate()?;
    validate_observations(observations)?;
    prior.validate()?;
    let n = config.n_members;
    let seed = config.seed;
    let members = (0..n)
        .map(|k| sample_prior(prior, &mut substream(seed, Purpose::Prior, k as u64, 0)))
        .collect();
    let mut ens = EnkfEnsemble::new(members, config.q_beta, config.q_gamma, config.r_scale)?;
    let mut reference = ignition.level_set(grid)?;
    let initial = extract_contour(&reference);
    let initial_summary = ens.summary();
    let uniform = vec![1.0 / n as f64; n];
    let mut stats = StepStats::default();
    let mut records = Vec::new();

    for (cycle, (t, obs_index)) in schedule(observations, config).into_iter().enumerate() {
        let c = cycle as u64;
        let tag = |e: Error| Error::Observation {
            index: cycle,
            time: t,
            source: Box::new(e),
        };
        ens.random_walk(seed, c);
        let (forecast_fields, s) =
            propagate_members(&reference, &ens.members, t, wind, &config.solver, seed, c).map_err(tag)?;
        stats += s;
        let (forecast, forecast_var) = ensemble_front(&forecast_fields, &uniform)?;

        let mut updated = false;
        let mut flagged = false;
        if let Some(k) = obs_index {
            let sigma = config.sigma_blur;
            let predicted = forecast_fields
                .par_iter()
                .map(|f| Ok(downsample_block_mean(&predicted_image(f, sigma)?, config.downsample)))
                .collect::<Vec<Result<Vec<f64>>>>()
                .into_iter()
                .collect::<Result<Vec<_>>>()
                .map_err(tag)?;
            let observed = downsample_block_mean(
                &blurred_front(&observations[k].front, grid, sigma).map_err(tag)?,
                config.downsample,
            );
            let perturbed: Vec<Vec<f64>> = (0..n)
                .map(|m| {
                    let mut rng = substream(seed, Purpose::EnkfObsPerturbation, c, m as u64);
                    observed.iter().map(|y| y + gaussian(config.r_scale, &mut rng)).collect()
                })
                .collect();
            match kalman_update(&ens.members, &predicted, &perturbed, config.r_scale) {
                Some(next) => {
                    updated = next != ens.members;
                    ens.members = next
                        .into_iter()
                        .map(|p| RosParams {
                            beta: p.beta.max(0.0),
                            ..p
                        })
                        .collect();
                }
                None => flagged = true,
            }
        }

        let (member_fields, variance) = if updated {
            let (fields, s) =
                propagate_members(&reference, &ens.members, t, wind, &config.solver, seed, c).map_err(tag)?;
            stats += s;
            let (_, var) = ensemble_front(&fields, &uniform)?;
            (fields, var)
        } else {
            (forecast_fields, forecast_var)
        };

        let summary = ens.summary();
        let mut rng = substream(seed, Purpose::ProcessNoise, c, n as u64);
        let (next_ref, s) = propagate_with_stats(&reference, t, &summary.mean(), wind, &config.solver, &mut rng)
            .map_err(tag)?;
        stats += s;
        reference = next_ref;

        records.push(CycleRecord {
            time: t,
            observation: obs_index,
            forecast,
            analysis: extract_contour(&reference),
            members: member_fields
                .iter()
                .take(config.n_member_contours)
                .map(extract_contour)
                .collect(),
            variance,
            params: ens.members.clone(),
            weights: uniform.clone(),
            summary,
            ess: None,
            resampled: false,
            flagged,
        });
    }
    Ok(FilterOutput {
        initial,
        initial_summary,
        records,
        stats,
    })
}
