use rand::Rng;
use rayon::prelude::*;

use super::likelihood::{likelihood_score, predicted_image};
use super::resample::{ess, systematic_resample};
use super::{ensemble_front, schedule, validate_observations, CycleRecord, FilterConfig, FilterOutput, Observation, ParamSummary};
use crate::error::{Error, Result};
use crate::field::{extract_contour, rasterize_contour, Grid, Ignition, LevelSetField};
use crate::rng::{substream, Purpose};
use crate::solver::{propagate_with_stats, SolverConfig, StepStats};
use crate::spread::{sample_prior, RosParams, RosPrior, WindSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub phi: LevelSetField,
    pub params: RosParams,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub particles: Vec<Particle>,
    pub time: f64,
    pub rng_seed: u64,
    /// Number of prediction windows run so far; keys the noise substreams.
    pub epoch: u64,
    /// Solver work accumulated over all particles.
    pub stats: StepStats,
}

impl ParticleSet {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.weight).collect()
    }

    pub fn params(&self) -> Vec<RosParams> {
        self.particles.iter().map(|p| p.params).collect()
    }

    pub fn fields(&self) -> Vec<LevelSetField> {
        self.particles.iter().map(|p| p.phi.clone()).collect()
    }
}

/// Result of weighting a particle set against one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateReport {
    pub scores: Vec<f64>,
    /// Normalised weights before any resampling.
    pub weights: Vec<f64>,
    pub ess: f64,
    /// All scores were zero; the previous weights were kept.
    pub degenerate: bool,
    pub resampled: bool,
}

/// Particles sharing the ignition field, with independent prior draws and
/// uniform weights.
pub fn pf_init(
    grid: &Grid,
    ignition: &Ignition,
    prior: &RosPrior,
    n: usize,
    solver: &SolverConfig,
    seed: u64,
) -> Result<ParticleSet> {
    if n == 0 {
        return Err(Error::invalid("n_particles", "must be at least 1"));
    }
    prior.validate()?;
    solver.validate()?;
    let phi = ignition.level_set(grid)?;
    let particles = (0..n)
        .map(|k| Particle {
            phi: phi.clone(),
            params: sample_prior(prior, &mut substream(seed, Purpose::Prior, k as u64, 0)),
            weight: 1.0 / n as f64,
        })
        .collect();
    Ok(ParticleSet {
        particles,
        time: 0.0,
        rng_seed: seed,
        epoch: 0,
        stats: StepStats::default(),
    })
}

/// Propagates every particle to `t_next` with its own parameters.
pub fn pf_predict(ps: &ParticleSet, t_next: f64, wind: &WindSeries, solver: &SolverConfig) -> Result<ParticleSet> {
    if !(t_next >= ps.time) {
        return Err(Error::invalid(
            "t_next",
            format!("{t_next} is before the particle time {}", ps.time),
        ));
    }
    if t_next == ps.time {
        return Ok(ps.clone());
    }
    let results: Vec<Result<(LevelSetField, StepStats)>> = ps
        .particles
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let mut rng = substream(ps.rng_seed, Purpose::ProcessNoise, ps.epoch, k as u64);
            propagate_with_stats(&p.phi, t_next, &p.params, wind, solver, &mut rng)
        })
        .collect();
    let mut stats = ps.stats;
    let mut particles = Vec::with_capacity(ps.len());
    for (k, (r, p)) in results.into_iter().zip(&ps.particles).enumerate() {
        let (phi, s) = r.map_err(|e| Error::Particle {
            index: k,
            source: Box::new(e),
        })?;
        stats += s;
        particles.push(Particle {
            phi,
            params: p.params,
            weight: p.weight,
        });
    }
    Ok(ParticleSet {
        particles,
        time: t_next,
        rng_seed: ps.rng_seed,
        epoch: ps.epoch + 1,
        stats,
    })
}

/// Multiplies each weight by the image-overlap score of `obs` raised to
/// `exponent` and normalises. When every score is zero the previous weights
/// are kept and the report is marked degenerate.
pub fn pf_weight(
    ps: &ParticleSet,
    obs: &Observation,
    sigma_blur: f64,
    exponent: f64,
) -> Result<(ParticleSet, UpdateReport)> {
    if (obs.time - ps.time).abs() > 1e-6 {
        return Err(Error::invalid(
            "observation",
            format!("observation at t = {} s but particles are at t = {} s", obs.time, ps.time),
        ));
    }
    let grid = *ps.particles[0].phi.grid();
    let truth = rasterize_contour(&obs.front, &grid);
    let scores = ps
        .particles
        .par_iter()
        .map(|p| likelihood_score(&truth, &predicted_image(&p.phi, sigma_blur)?))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    // relative to the best score so large exponents cannot overflow
    let best = scores.iter().cloned().fold(0.0, f64::max);
    let raw: Vec<f64> = ps
        .particles
        .iter()
        .zip(&scores)
        .map(|(p, s)| if best > 0.0 { p.weight * (s / best).powf(exponent) } else { 0.0 })
        .collect();
    let total: f64 = raw.iter().sum();
    let degenerate = !(total > 0.0 && total.is_finite());
    let weights: Vec<f64> = if degenerate {
        let old: f64 = ps.particles.iter().map(|p| p.weight).sum();
        ps.particles.iter().map(|p| p.weight / old).collect()
    } else {
        raw.iter().map(|w| w / total).collect()
    };
    let mut out = ps.clone();
    for (p, &w) in out.particles.iter_mut().zip(&weights) {
        p.weight = w;
    }
    let report = UpdateReport {
        scores,
        ess: ess(&weights),
        weights,
        degenerate,
        resampled: false,
    };
    Ok((out, report))
}

/// Systematic resampling; the copies get weight `1/n`.
pub fn resample_systematic<R: Rng + ?Sized>(ps: &ParticleSet, rng: &mut R) -> ParticleSet {
    let n = ps.len();
    let idx = systematic_resample(&ps.weights(), n, rng);
    let particles = idx
        .into_iter()
        .map(|i| Particle {
            weight: 1.0 / n as f64,
            ..ps.particles[i].clone()
        })
        .collect();
    ParticleSet { particles, ..ps.clone() }
}

fn maybe_resample(weighted: ParticleSet, report: &mut UpdateReport, resample_always: bool) -> ParticleSet {
    let n = weighted.len() as f64;
    if report.degenerate || !(resample_always || report.ess < n / 2.0) {
        return weighted;
    }
    report.resampled = true;
    let mut rng = substream(weighted.rng_seed, Purpose::Resample, weighted.epoch, 0);
    resample_systematic(&weighted, &mut rng)
}

/// [`pf_weight`] with the plain overlap likelihood, followed by systematic
/// resampling, always or when ESS < n/2.
pub fn pf_update(
    ps: &ParticleSet,
    obs: &Observation,
    sigma_blur: f64,
    resample_always: bool,
) -> Result<(ParticleSet, UpdateReport)> {
    let (weighted, mut report) = pf_weight(ps, obs, sigma_blur, 1.0)?;
    let out = maybe_resample(weighted, &mut report, resample_always);
    Ok((out, report))
}

fn member_contours(ps: &ParticleSet, count: usize) -> Vec<crate::field::FrontContour> {
    ps.particles.iter().take(count).map(|p| extract_contour(&p.phi)).collect()
}

/// Full predict/update loop over the report schedule.
pub fn pf_run(
    grid: &Grid,
    ignition: &Ignition,
    prior: &RosPrior,
    observations: &[Observation],
    wind: &WindSeries,
    config: &FilterConfig,
) -> Result<FilterOutput> {
    config.validate()?;
    validate_observations(observations)?;
    let mut ps = pf_init(grid, ignition, prior, config.n_particles, &config.solver, config.seed)?;
    let initial = extract_contour(&ps.particles[0].phi);
    let initial_summary = ParamSummary::weighted(&ps.params(), &ps.weights());
    let mut records = Vec::new();

    for (cycle, (t, obs_index)) in schedule(observations, config).into_iter().enumerate() {
        let tag = |e: Error| Error::Observation {
            index: cycle,
            time: t,
            source: Box::new(e),
        };
        ps = pf_predict(&ps, t, wind, &config.solver).map_err(tag)?;
        ps.time = t;
        let (forecast, forecast_var) = ensemble_front(&ps.fields(), &ps.weights())?;

        let record = match obs_index {
            Some(k) => {
                let obs = Observation {
                    time: t,
                    front: observations[k].front.clone(),
                };
                let (weighted, mut report) = pf_weight(&ps, &obs, config.sigma_blur, config.likelihood_exponent).map_err(tag)?;
                let (analysis, variance) = ensemble_front(&weighted.fields(), &report.weights)?;
                let params = weighted.params();
                let summary = ParamSummary::weighted(&params, &report.weights);
                ps = maybe_resample(weighted, &mut report, config.resample_always);
                CycleRecord {
                    time: t,
                    observation: Some(k),
                    forecast,
                    analysis,
                    members: member_contours(&ps, config.n_member_contours),
                    variance,
                    params,
                    weights: report.weights,
                    summary,
                    ess: Some(report.ess),
                    resampled: report.resampled,
                    flagged: report.degenerate,
                }
            }
            None => {
                let weights = ps.weights();
                let params = ps.params();
                CycleRecord {
                    time: t,
                    observation: None,
                    analysis: forecast.clone(),
                    forecast,
                    members: member_contours(&ps, config.n_member_contours),
                    variance: forecast_var,
                    summary: ParamSummary::weighted(&params, &weights),
                    ess: None,
                    params,
                    weights,
                    resampled: false,
                    flagged: false,
                }
            }
        };
        records.push(record);
    }
    Ok(FilterOutput {
        initial,
        initial_summary,
        records,
        stats: ps.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FrontContour;
    use crate::solver::propagate;

    fn grid() -> Grid {
        Grid::new(60, 60, 1.0, 1.0, (-30.0, -30.0)).unwrap()
    }

    fn ignition() -> Ignition {
        Ignition::Circle {
            center: (0.0, 0.0),
            radius: 5.0,
        }
    }

    fn prior(sigma_gamma: f64) -> RosPrior {
        RosPrior {
            mu_beta: 0.3,
            sigma_beta: 0.0,
            mu_gamma: 0.2,
            sigma_gamma,
        }
    }

    fn circle_front(center: (f64, f64), r: f64, t: f64) -> FrontContour {
        let phi = Ignition::Circle { center, radius: r }.level_set(&grid()).unwrap();
        FrontContour { time: t, ..extract_contour(&phi) }
    }

    fn wind() -> WindSeries {
        WindSeries::constant(1.0, 0.0).unwrap()
    }

    #[test]
    fn init_examples() {
        let s = SolverConfig::default();
        let one = pf_init(&grid(), &ignition(), &RosPrior::degenerate(RosParams { beta: 0.3, gamma: 0.2 }), 1, &s, 1).unwrap();
        assert_eq!(one.particles[0].params, RosParams { beta: 0.3, gamma: 0.2 });
        let a = pf_init(&grid(), &ignition(), &prior(0.1), 100, &s, 7).unwrap();
        assert!(a.particles.iter().all(|p| p.weight == 0.01));
        assert_eq!(a, pf_init(&grid(), &ignition(), &prior(0.1), 100, &s, 7).unwrap());
        assert_ne!(a.params(), pf_init(&grid(), &ignition(), &prior(0.1), 100, &s, 8).unwrap().params());
        assert!(pf_init(&grid(), &ignition(), &prior(0.1), 0, &s, 7).is_err());
        let outside = Ignition::Circle { center: (500.0, 0.0), radius: 1.0 };
        assert!(pf_init(&grid(), &outside, &prior(0.1), 3, &s, 7).is_err());
    }

    #[test]
    fn predict_examples() {
        let s = SolverConfig::default();
        let ps = pf_init(&grid(), &ignition(), &prior(0.0), 4, &s, 3).unwrap();
        assert_eq!(pf_predict(&ps, 0.0, &wind(), &s).unwrap(), ps);
        let next = pf_predict(&ps, 10.0, &wind(), &s).unwrap();
        assert_eq!(next.time, 10.0);
        assert!(next.particles.iter().all(|p| p.phi == next.particles[0].phi && p.weight == 0.25));
        assert!(pf_predict(&next, 5.0, &wind(), &s).is_err());
    }

    fn downwind_spread(sigma_gamma: f64) -> f64 {
        let s = SolverConfig::default();
        let ps = pf_init(&grid(), &ignition(), &prior(sigma_gamma), 20, &s, 11).unwrap();
        let next = pf_predict(&ps, 10.0, &wind(), &s).unwrap();
        let extents: Vec<f64> = next
            .particles
            .iter()
            .map(|p| extract_contour(&p.phi).vertices().map(|v| v.0).fold(f64::MIN, f64::max))
            .collect();
        extents.iter().cloned().fold(f64::MIN, f64::max) - extents.iter().cloned().fold(f64::MAX, f64::min)
    }

    #[test]
    fn spread_grows_with_gamma_prior() {
        assert!(downwind_spread(0.1) > downwind_spread(0.01));
    }

    #[test]
    fn domain_error_names_particle() {
        let s = SolverConfig::default();
        let mut ps = pf_init(&grid(), &ignition(), &prior(0.0), 3, &s, 3).unwrap();
        ps.particles[2].params.beta = 5.0;
        match pf_predict(&ps, 10.0, &wind(), &s).unwrap_err() {
            Error::Particle { index, .. } => assert_eq!(index, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn identical_particles_stay_uniform() {
        let s = SolverConfig::default();
        let ps = pf_init(&grid(), &ignition(), &prior(0.0), 5, &s, 3).unwrap();
        let obs = Observation { time: 0.0, front: circle_front((0.0, 0.0), 6.0, 0.0) };
        let (out, report) = pf_update(&ps, &obs, 2.0, true).unwrap();
        assert!(report.weights.iter().all(|w| (w - 0.2).abs() < 1e-12));
        assert!(report.resampled);
        assert_eq!(out.particles, ps.particles);
    }

    #[test]
    fn matching_particle_takes_over() {
        let s = SolverConfig::default();
        let mut ps = pf_init(&grid(), &ignition(), &prior(0.0), 2, &s, 3).unwrap();
        ps.particles[1].phi = Ignition::Circle { center: (18.0, 18.0), radius: 4.0 }.level_set(&grid()).unwrap();
        ps.particles[1].params.beta = 0.9;
        let obs = Observation { time: 0.0, front: circle_front((0.0, 0.0), 5.0, 0.0) };
        let (out, report) = pf_update(&ps, &obs, 2.0, true).unwrap();
        assert!(report.weights[0] > 1.0 - 1e-9);
        assert!((report.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(out.particles.iter().all(|p| p.params.beta == 0.3));
    }

    #[test]
    fn uninformative_observation_keeps_weights() {
        let s = SolverConfig::default();
        let mut ps = pf_init(&grid(), &ignition(), &prior(0.1), 4, &s, 3).unwrap();
        for (p, w) in ps.particles.iter_mut().zip([0.1, 0.2, 0.3, 0.4]) {
            p.weight = w;
        }
        let obs = Observation { time: 0.0, front: FrontContour::default() };
        let (out, report) = pf_update(&ps, &obs, 2.0, true).unwrap();
        assert!(report.degenerate && !report.resampled);
        assert_eq!(out.weights(), vec![0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn update_requires_matching_time() {
        let s = SolverConfig::default();
        let ps = pf_init(&grid(), &ignition(), &prior(0.0), 2, &s, 3).unwrap();
        let obs = Observation { time: 10.0, front: circle_front((0.0, 0.0), 5.0, 10.0) };
        assert!(pf_update(&ps, &obs, 2.0, true).is_err());
    }

    #[test]
    fn ess_trigger() {
        let s = SolverConfig::default();
        let mut ps = pf_init(&grid(), &ignition(), &prior(0.0), 4, &s, 3).unwrap();
        ps.particles[3].phi = Ignition::Circle { center: (18.0, 18.0), radius: 4.0 }.level_set(&grid()).unwrap();
        let obs = Observation { time: 0.0, front: circle_front((0.0, 0.0), 5.0, 0.0) };
        // ESS = 3 >= 2: kept
        let (_, r) = pf_update(&ps, &obs, 2.0, false).unwrap();
        assert!(!r.resampled && (r.ess - 3.0).abs() < 1e-9);
        let far = ps.particles[3].phi.clone();
        for p in &mut ps.particles[1..] {
            p.phi = far.clone();
        }
        let (out, r) = pf_update(&ps, &obs, 2.0, false).unwrap();
        assert!(r.resampled);
        assert!(out.particles.iter().all(|p| p.phi == ps.particles[0].phi));
    }

    #[test]
    fn no_observations_reduce_to_simulation() {
        let params = RosParams { beta: 0.3, gamma: 0.2 };
        let cfg = FilterConfig {
            n_particles: 3,
            obs_interval: Some(5.0),
            t_end: Some(10.0),
            ..Default::default()
        };
        let out = pf_run(&grid(), &ignition(), &RosPrior::degenerate(params), &[], &wind(), &cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        let mut phi = ignition().level_set(&grid()).unwrap();
        let mut rng = substream(0, Purpose::ProcessNoise, 0, 0);
        for r in &out.records {
            phi = propagate(&phi, r.time, &params, &wind(), &cfg.solver, &mut rng).unwrap();
            let direct = extract_contour(&phi);
            assert_eq!(r.forecast.polylines.len(), direct.polylines.len());
            for (a, b) in r.forecast.vertices().zip(direct.vertices()) {
                assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
            }
            assert_eq!(r.analysis, r.forecast);
        }
    }

    #[test]
    fn run_is_thread_count_independent() {
        let truth = RosParams { beta: 0.3, gamma: 0.2 };
        let cfg = FilterConfig {
            n_particles: 12,
            solver: SolverConfig { noise_sigma: 0.05, ..Default::default() },
            seed: 5,
            ..Default::default()
        };
        let mut phi = ignition().level_set(&grid()).unwrap();
        let mut obs = Vec::new();
        for t in [5.0, 10.0] {
            phi = propagate(&phi, t, &truth, &wind(), &SolverConfig::default(), &mut substream(0, Purpose::Synthetic, 0, 0)).unwrap();
            obs.push(Observation { time: t, front: extract_contour(&phi) });
        }
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| pf_run(&grid(), &ignition(), &prior(0.1), &obs, &wind(), &cfg).unwrap())
        };
        let one = run(1);
        assert_eq!(one.records.len(), 2);
        assert!(one.records.iter().all(|r| r.resampled && !r.flagged));
        assert_eq!(one, run(4));
    }
}
