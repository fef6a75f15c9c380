use rand_distr::{Distribution, Normal};

use super::RunConfig;
use crate::error::Result;
use crate::field::{extract_contour, FrontContour};
use crate::filter::Observation;
use crate::rng::{substream, FilterRng, Purpose};
use crate::solver::{propagate_with_stats, SolverConfig, StepStats};
use crate::spread::{RosParams, WindSeries};

/// Moves every vertex along its local front normal by `N(0, sigma^2)`.
pub fn jitter_front(front: &FrontContour, sigma: f64, rng: &mut FilterRng) -> FrontContour {
    if sigma == 0.0 {
        return front.clone();
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated");
    let polylines = front
        .polylines
        .iter()
        .map(|poly| {
            let n = poly.len();
            (0..n)
                .map(|k| {
                    let (ax, ay) = poly[(k + n - 1) % n];
                    let (bx, by) = poly[(k + 1) % n];
                    let (tx, ty) = (bx - ax, by - ay);
                    let len = tx.hypot(ty);
                    let (nx, ny) = if len > 0.0 { (ty / len, -tx / len) } else { (1.0, 0.0) };
                    let d = normal.sample(rng);
                    (poly[k].0 + d * nx, poly[k].1 + d * ny)
                })
                .collect()
        })
        .collect();
    FrontContour::new(polylines, front.time)
}

/// Fronts at time 0 and every report time, propagated with `params`.
///
/// Process noise of standard deviation `noise_sigma` is drawn from a
/// substream of `config.seed`.
pub fn simulate_fronts(
    config: &RunConfig,
    params: &RosParams,
    wind: &WindSeries,
    noise_sigma: f64,
) -> Result<(Vec<FrontContour>, StepStats)> {
    params.validate()?;
    let solver = SolverConfig {
        noise_sigma,
        ..config.solver
    };
    let mut noise = substream(config.seed, Purpose::Synthetic, 0, 0);
    let mut phi = config.ignition.level_set(&config.grid)?;
    let mut fronts = vec![extract_contour(&phi)];
    let mut stats = StepStats::default();
    for t in config.report_times() {
        let (next, s) = propagate_with_stats(&phi, t, params, wind, &solver, &mut noise)?;
        stats += s;
        phi = next;
        fronts.push(extract_contour(&phi));
    }
    Ok((fronts, stats))
}

/// Truth fronts at every `obs_interval` up to `t_end`, propagated with
/// `true_params` under the configured wind, plus that wind as a per-second
/// series. Randomness comes from substreams of `config.seed`.
pub fn generate_synthetic(config: &RunConfig, true_params: &RosParams) -> Result<(Vec<Observation>, WindSeries)> {
    let wind = config.wind.series(config.t_end)?;
    let (fronts, _) = simulate_fronts(config, true_params, &wind, config.synthetic.noise_sigma)?;
    let mut jitter = substream(config.seed, Purpose::Jitter, 0, 0);
    let obs = fronts
        .iter()
        .skip(1)
        .map(|f| Observation {
            time: f.time,
            front: jitter_front(f, config.synthetic.obs_jitter, &mut jitter),
        })
        .collect();
    Ok((obs, wind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Grid, Ignition};

    fn config() -> RunConfig {
        let grid = Grid::new(100, 100, 1.0, 1.0, (-50.0, -50.0)).unwrap();
        let mut c = RunConfig::new(
            grid,
            Ignition::Circle {
                center: (0.0, 0.0),
                radius: 5.0,
            },
        );
        c.params = Some(RosParams { beta: 0.3, gamma: 0.0 });
        c
    }

    #[test]
    fn nine_circles() {
        let c = config();
        let (obs, wind) = generate_synthetic(&c, &c.params.unwrap()).unwrap();
        assert_eq!(obs.len(), 9);
        assert_eq!(wind.wind_at(50.0), (0.0, 0.0));
        for (k, o) in obs.iter().enumerate() {
            assert_eq!(o.time, 10.0 * (k + 1) as f64);
            let r = 5.0 + 0.3 * o.time;
            for (x, y) in o.front.vertices() {
                assert!((x.hypot(y) - r).abs() <= 2.0, "t={} r={}", o.time, x.hypot(y));
            }
        }
        assert!(obs.windows(2).all(|w| w[0].time < w[1].time));
    }

    #[test]
    fn jitter_half_normal_mean() {
        let c = config();
        let clean = generate_synthetic(&c, &c.params.unwrap()).unwrap().0;
        let mut noisy_cfg = c.clone();
        noisy_cfg.synthetic.obs_jitter = 0.5;
        let noisy = generate_synthetic(&noisy_cfg, &c.params.unwrap()).unwrap().0;
        let mut total = 0.0;
        let mut count = 0;
        for (a, b) in clean.iter().zip(&noisy) {
            for (p, q) in a.front.vertices().zip(b.front.vertices()) {
                total += (p.0 - q.0).hypot(p.1 - q.1);
                count += 1;
            }
        }
        assert!(count >= 1000, "{count}");
        let mean = total / count as f64;
        // half-normal mean 0.5 * sqrt(2 / pi) = 0.399
        assert!((0.3..=0.6).contains(&mean), "{mean}");
    }

    #[test]
    fn deterministic_and_guarded() {
        let mut c = config();
        c.synthetic.noise_sigma = 0.05;
        c.synthetic.obs_jitter = 0.2;
        let a = generate_synthetic(&c, &c.params.unwrap()).unwrap();
        let b = generate_synthetic(&c, &c.params.unwrap()).unwrap();
        assert_eq!(a, b);

        let fast = RosParams { beta: 1.0, gamma: 0.0 };
        let err = generate_synthetic(&c, &fast).unwrap_err();
        assert!(err.to_string().contains("enlarge the grid"), "{err}");
    }
}
