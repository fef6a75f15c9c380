//! Restoring the signed-distance property without moving the front.

use super::stencil::{godunov_max, one_sided, Padded};
use crate::error::{Error, Result};
use crate::field::{LevelSetField, ScalarField};

/// First-order Godunov `|grad phi|` with the upwind branch picked by the sign
/// of `phi`. This is the discretisation [`reinitialize`] drives to one, so it
/// is also the yardstick for how close a field is to a distance function.
pub fn eikonal_gradient(phi: &LevelSetField) -> ScalarField {
    let grid = *phi.grid();
    let p = Padded::new(&grid, phi.values());
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = p.at(i, j);
            let (dmx, dpx) = one_sided(&p.data, k, 1, grid.dx, 1);
            let (dmy, dpy) = one_sided(&p.data, k, p.w, grid.dy, 1);
            out.push(godunov_max(dmx, dpx, dmy, dpy, p.data[k] >= 0.0));
        }
    }
    ScalarField::from_raw(grid, out)
}

/// Iterates `phi_tau = S(phi0) (1 - |grad phi|)` with the smoothed sign
/// `S = phi0 / sqrt(phi0^2 + h^2)` and pseudo-time step `h / 2`,
/// `h = min(dx, dy)`.
///
/// Cells next to the front are handled by the Russo-Smereka subcell fix:
/// they relax toward `phi0 / |grad phi0|`, an estimate of their distance to
/// the original front, which pins the zero level set in place.
pub fn reinitialize(phi: &LevelSetField, iterations: usize) -> Result<LevelSetField> {
    if !phi.has_zero_crossing() {
        return Err(Error::NoZeroCrossing);
    }
    let grid = *phi.grid();
    let (nx, ny) = (grid.nx, grid.ny);
    let h = grid.min_spacing();
    let dtau = 0.5 * h;
    let phi0 = phi.values();
    let p0 = Padded::new(&grid, phi0);

    let sign: Vec<f64> = phi0.iter().map(|&v| v / (v * v + h * h).sqrt()).collect();
    // distance-to-front targets for cells straddling the front, NaN elsewhere
    let mut target = vec![f64::NAN; grid.len()];
    for j in 0..ny {
        for i in 0..nx {
            let c = phi0[grid.index(i, j)];
            let inside = c < 0.0;
            let neighbours = [
                (i > 0).then(|| phi0[grid.index(i - 1, j)]),
                (i + 1 < nx).then(|| phi0[grid.index(i + 1, j)]),
                (j > 0).then(|| phi0[grid.index(i, j - 1)]),
                (j + 1 < ny).then(|| phi0[grid.index(i, j + 1)]),
            ];
            if !neighbours.iter().flatten().any(|&n| (n < 0.0) != inside) {
                continue;
            }
            let k = p0.at(i, j);
            let d = &p0.data;
            let spread = |s: usize, step: f64| {
                let (l, r) = (d[k - s], d[k + s]);
                (c - l).abs().max((r - c).abs()).max(0.5 * (r - l).abs()) / step
            };
            let g = spread(1, grid.dx).hypot(spread(p0.w, grid.dy));
            target[grid.index(i, j)] = if g > 1e-12 { c / g } else { 0.0 };
        }
    }

    let mut cur = phi0.to_vec();
    for _ in 0..iterations {
        let p = Padded::new(&grid, &cur);
        let mut next = Vec::with_capacity(cur.len());
        for j in 0..ny {
            for i in 0..nx {
                let idx = grid.index(i, j);
                let v = cur[idx];
                let d = target[idx];
                if !d.is_nan() {
                    let s0 = if phi0[idx] > 0.0 {
                        1.0
                    } else if phi0[idx] < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    next.push(v - (dtau / h) * (s0 * v.abs() - d));
                    continue;
                }
                let k = p.at(i, j);
                let (dmx, dpx) = one_sided(&p.data, k, 1, grid.dx, 1);
                let (dmy, dpy) = one_sided(&p.data, k, p.w, grid.dy, 1);
                let g = godunov_max(dmx, dpx, dmy, dpy, phi0[idx] > 0.0);
                next.push(v - dtau * sign[idx] * (g - 1.0));
            }
        }
        cur = next;
    }
    Ok(LevelSetField::new(ScalarField::from_raw(grid, cur), phi.time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{extract_contour, signed_distance_circle, Grid};
    use crate::metrics::{burned_mask, jaccard};

    fn grid() -> Grid {
        Grid::new(64, 64, 1.0, 1.0, (-31.5, -31.5)).unwrap()
    }

    #[test]
    fn signed_distance_is_nearly_a_fixed_point() {
        let phi = signed_distance_circle(&grid(), (0.3, -0.2), 10.0).unwrap();
        let out = reinitialize(&phi, 20).unwrap();
        for (x, y) in extract_contour(&out).vertices() {
            let r = (x - 0.3).hypot(y + 0.2);
            assert!((r - 10.0).abs() < 0.1, "front moved to r={r}");
        }
    }

    #[test]
    fn steep_field_is_flattened_to_unit_slope() {
        // 20 pseudo-time steps carry the correction about 10 cells out; the
        // band checked here has fully converged
        let g = grid();
        let base = signed_distance_circle(&g, (0.0, 0.0), 10.0).unwrap();
        let steep = LevelSetField::new(
            ScalarField::new(g, base.values().iter().map(|v| 3.0 * v).collect()).unwrap(),
            0.0,
        );
        let out = reinitialize(&steep, 20).unwrap();
        let grad = eikonal_gradient(&out);
        let mut checked = 0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let d = base.field.get(i, j).abs();
                if d > 2.0 && d < 6.0 {
                    checked += 1;
                    let v = grad.get(i, j);
                    assert!((v - 1.0).abs() <= 0.1, "|grad| {v} at distance {d}");
                }
            }
        }
        assert!(checked > 300);
        let before = burned_mask(&extract_contour(&steep), &g);
        let after = burned_mask(&extract_contour(&out), &g);
        assert!(jaccard(&before, &after).unwrap() >= 0.98);
        for (x, y) in extract_contour(&out).vertices() {
            assert!((x.hypot(y) - 10.0).abs() <= 0.5);
        }
    }

    #[test]
    fn requires_a_front() {
        let phi = LevelSetField::new(ScalarField::filled(grid(), 1.0), 0.0);
        assert!(matches!(reinitialize(&phi, 5), Err(Error::NoZeroCrossing)));
    }
}
