//! Explicit integration of the level-set equation `phi_t + u |grad phi| = 0`.
//!
//! Space: Godunov upwinding with first- or second-order ENO one-sided
//! differences. Time: forward Euler under a CFL limit. Because the speed is
//! `beta + gamma * max(0, w . n)` with `n = grad phi / |grad phi|`, the
//! advective term `u |grad phi|` splits into an isotropic eikonal part and a
//! clamped transport part along the wind, each upwinded on its own.

mod reinit;
mod stencil;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use reinit::{eikonal_gradient, reinitialize};

use crate::error::{Error, Result};
use crate::field::{convolve_separable, gaussian_kernel, LevelSetField, ScalarField};
use crate::spread::{speed, RosParams, WindSeries};
use stencil::{godunov_sum, one_sided, Padded};

/// Discretisation of the wind part of the front speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindTerm {
    /// `gamma * max(0, w . grad phi)` with differences upwinded along the
    /// wind, added to the Godunov `beta |grad phi|` term. Monotone.
    #[default]
    Upwind,
    /// `u(n) |grad phi|` with `n` from central differences of `phi`.
    /// Overshoots the flanks of wind-driven fronts with second-order ENO.
    CentralNormal,
}

/// Boundary treatment of `phi` outside the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Linear extrapolation from the two nearest interior cells.
    #[default]
    Extrapolate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Courant number in `(0, 1]`.
    pub cfl: f64,
    /// ENO order of the one-sided differences, 1 or 2.
    pub eno_order: u8,
    /// Reinitialise every this many steps; 0 disables reinitialisation.
    pub reinit_every: usize,
    pub reinit_iterations: usize,
    /// Standard deviation (m) of the per-step additive field noise before
    /// spatial smoothing; 0 disables process noise.
    pub noise_sigma: f64,
    pub boundary: Boundary,
    /// Floor the normal wind component at zero so fronts never retreat.
    pub clamp_upwind: bool,
    pub wind_term: WindTerm,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: 0.5,
            eno_order: 2,
            reinit_every: 10,
            reinit_iterations: 20,
            noise_sigma: 0.0,
            boundary: Boundary::Extrapolate,
            clamp_upwind: true,
            wind_term: WindTerm::Upwind,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::invalid("cfl", format!("must be in (0, 1], got {}", self.cfl)));
        }
        if !(self.eno_order == 1 || self.eno_order == 2) {
            return Err(Error::invalid("eno_order", format!("must be 1 or 2, got {}", self.eno_order)));
        }
        if self.reinit_every > 0 && self.reinit_iterations == 0 {
            return Err(Error::invalid(
                "reinit_iterations",
                "must be at least 1 when reinit_every > 0",
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::invalid("noise_sigma", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Counters reported by [`propagate_with_stats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub steps: usize,
    pub reinits: usize,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, rhs: Self) {
        self.steps += rhs.steps;
        self.reinits += rhs.reinits;
    }
}

/// Upwind `|grad phi|` for an expanding front (nonnegative speed).
pub fn grad_mag_upwind(phi: &LevelSetField, order: u8) -> ScalarField {
    let grid = *phi.grid();
    let p = Padded::new(&grid, phi.values());
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = p.at(i, j);
            let (dmx, dpx) = one_sided(&p.data, k, 1, grid.dx, order);
            let (dmy, dpy) = one_sided(&p.data, k, p.w, grid.dy, order);
            out.push(godunov_sum(dmx, dpx, dmy, dpy, true));
        }
    }
    ScalarField::from_raw(grid, out)
}

/// Largest stable step, capped at `remaining`.
///
/// `dt = cfl * min(dx, dy) / u_max` where `u_max` bounds the front speed over
/// all orientations. A static front (`u_max = 0`) may jump the whole budget.
pub fn stable_dt(
    phi: &LevelSetField,
    params: &RosParams,
    wind: (f64, f64),
    config: &SolverConfig,
    remaining: f64,
) -> f64 {
    let u_max = params.max_speed(wind);
    if u_max <= 0.0 {
        return remaining;
    }
    (config.cfl * phi.grid().min_spacing() / u_max).min(remaining)
}

/// One forward-Euler step of length `dt`.
///
/// Fails with [`Error::CflViolation`] when `dt` exceeds [`stable_dt`]; steps
/// are never shortened silently.
pub fn step<R: Rng + ?Sized>(
    phi: &LevelSetField,
    dt: f64,
    params: &RosParams,
    wind: (f64, f64),
    config: &SolverConfig,
    rng: &mut R,
) -> Result<LevelSetField> {
    let limit = stable_dt(phi, params, wind, config, f64::INFINITY);
    if !(dt >= 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    if dt == 0.0 {
        return Ok(phi.clone());
    }
    let grid = *phi.grid();
    let p = Padded::new(&grid, phi.values());
    let (dx, dy) = (grid.dx, grid.dy);
    let order = config.eno_order;
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = p.at(i, j);
            let (dmx, dpx) = one_sided(&p.data, k, 1, dx, order);
            let (dmy, dpy) = one_sided(&p.data, k, p.w, dy, order);
            let rate = match config.wind_term {
                WindTerm::Upwind => {
                    // u |grad phi| = beta |grad phi| + gamma * max(0, w . grad phi)
                    let iso = params.beta * godunov_sum(dmx, dpx, dmy, dpy, true);
                    let c = params.gamma;
                    let gx = if c * wind.0 > 0.0 { dmx } else { dpx };
                    let gy = if c * wind.1 > 0.0 { dmy } else { dpy };
                    let along = wind.0 * gx + wind.1 * gy;
                    let along = if config.clamp_upwind { along.max(0.0) } else { along };
                    iso + c * along
                }
                WindTerm::CentralNormal => {
                    let gx = (p.data[k + 1] - p.data[k - 1]) / (2.0 * dx);
                    let gy = (p.data[k + p.w] - p.data[k - p.w]) / (2.0 * dy);
                    let norm = gx.hypot(gy);
                    let u = if norm < 1e-9 {
                        params.beta
                    } else {
                        speed(params, wind, (gx / norm, gy / norm), config.clamp_upwind)
                    };
                    u * godunov_sum(dmx, dpx, dmy, dpy, u >= 0.0)
                }
            };
            out.push(p.data[k] - dt * rate);
        }
    }
    if config.noise_sigma > 0.0 {
        add_smoothed_noise(&mut out, grid.nx, grid.ny, config.noise_sigma, rng);
    }
    Ok(LevelSetField::new(
        ScalarField::from_raw(grid, out),
        phi.time + dt,
    ))
}

fn add_smoothed_noise<R: Rng + ?Sized>(values: &mut [f64], nx: usize, ny: usize, sigma: f64, rng: &mut R) {
    let white: Vec<f64> = (0..values.len())
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let kernel = gaussian_kernel(1.0).expect("unit sigma is valid");
    let smooth = convolve_separable(&white, nx, ny, &kernel);
    for (v, n) in values.iter_mut().zip(smooth) {
        *v += n;
    }
}

/// `true` when any cell within two cells of the border is burned or on the
/// front.
pub fn touches_boundary(phi: &LevelSetField) -> bool {
    let g = phi.grid();
    let v = phi.values();
    let band = 2;
    for j in 0..g.ny {
        let full_row = j <= band || j + band >= g.ny - 1;
        for i in 0..g.nx {
            if !full_row && i > band && i + band < g.nx - 1 {
                continue;
            }
            if v[g.index(i, j)] <= 0.0 {
                return true;
            }
        }
    }
    false
}

/// Advances `phi` to `t_end`, see [`propagate_with_stats`].
pub fn propagate<R: Rng + ?Sized>(
    phi: &LevelSetField,
    t_end: f64,
    params: &RosParams,
    wind: &WindSeries,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<LevelSetField> {
    propagate_with_stats(phi, t_end, params, wind, config, rng).map(|(phi, _)| phi)
}

/// Advances `phi` to exactly `t_end`.
///
/// Steps never straddle a wind-sample time. The field is reinitialised every
/// `reinit_every` steps and once more at the end if steps were taken since the
/// last reinitialisation, so the returned field is a signed distance function.
/// Fails with [`Error::DomainTooSmall`] as soon as the front comes within two
/// cells of the grid border.
pub fn propagate_with_stats<R: Rng + ?Sized>(
    phi: &LevelSetField,
    t_end: f64,
    params: &RosParams,
    wind: &WindSeries,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<(LevelSetField, StepStats)> {
    if !(t_end >= phi.time) {
        return Err(Error::invalid(
            "t_end",
            format!("{t_end} is before the field time {}", phi.time),
        ));
    }
    let mut stats = StepStats::default();
    let mut cur = phi.clone();
    let mut since_reinit = 0;
    while cur.time < t_end {
        let t = cur.time;
        let w = wind.wind_at(t);
        let target = wind.next_change_after(t).map_or(t_end, |b| b.min(t_end));
        let remaining = target - t;
        let dt = stable_dt(&cur, params, w, config, remaining);
        let mut next = step(&cur, dt, params, w, config, rng)?;
        if dt >= remaining {
            next.time = target;
        }
        stats.steps += 1;
        since_reinit += 1;
        if touches_boundary(&next) {
            return Err(Error::DomainTooSmall { time: next.time });
        }
        if config.reinit_every > 0 && since_reinit == config.reinit_every {
            next = reinit_or_keep(next, config, &mut stats)?;
            since_reinit = 0;
        }
        cur = next;
    }
    if config.reinit_every > 0 && since_reinit > 0 {
        cur = reinit_or_keep(cur, config, &mut stats)?;
    }
    Ok((cur, stats))
}

fn reinit_or_keep(phi: LevelSetField, config: &SolverConfig, stats: &mut StepStats) -> Result<LevelSetField> {
    if !phi.has_zero_crossing() {
        // nothing burned (or everything): there is no front to measure from
        return Ok(phi);
    }
    stats.reinits += 1;
    reinitialize(&phi, config.reinit_iterations)
}
