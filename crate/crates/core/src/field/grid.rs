use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular cell-centred lattice.
///
/// Cell `(i, j)` has its centre at `origin + (i * dx, j * dy)`; `i` runs along
/// x (columns, `0..nx`) and `j` along y (rows, `0..ny`). Values attached to a
/// grid are stored row-major: index `j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    #[serde(default)]
    pub origin: (f64, f64),
}

impl Grid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin: (f64, f64)) -> Result<Self> {
        let grid = Grid {
            nx,
            ny,
            dx,
            dy,
            origin,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 4 || self.ny < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4x4 cells, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.dx.is_finite() && self.dx > 0.0 && self.dy.is_finite() && self.dy > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "cell size must be positive, got dx={} dy={}",
                self.dx, self.dy
            )));
        }
        if !(self.origin.0.is_finite() && self.origin.1.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    #[inline]
    pub fn min_spacing(&self) -> f64 {
        self.dx.min(self.dy)
    }

    /// World coordinates of the centre of cell `(i, j)`.
    #[inline]
    pub fn index_to_world(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + i as f64 * self.dx,
            self.origin.1 + j as f64 * self.dy,
        )
    }

    /// Cell whose centre is nearest to `(x, y)`, or `None` outside the lattice.
    pub fn world_to_index(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let (fi, fj) = self.world_to_fractional(x, y);
        let (i, j) = (fi.round(), fj.round());
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some((i as usize, j as usize))
    }

    /// Continuous index coordinates (cell centres at integers).
    #[inline]
    pub fn world_to_fractional(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.origin.0) / self.dx, (y - self.origin.1) / self.dy)
    }

    /// World-space bounds of the cell centres: `((xmin, ymin), (xmax, ymax))`.
    pub fn extent(&self) -> ((f64, f64), (f64, f64)) {
        (
            self.origin,
            self.index_to_world(self.nx - 1, self.ny - 1),
        )
    }

    /// Distance in cells from `(i, j)` to the nearest border cell.
    #[inline]
    pub fn border_distance(&self, i: usize, j: usize) -> usize {
        i.min(j).min(self.nx - 1 - i).min(self.ny - 1 - j)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid::new(3, 10, 1.0, 1.0, (0.0, 0.0)).is_err());
        assert!(Grid::new(10, 10, 0.0, 1.0, (0.0, 0.0)).is_err());
        assert!(Grid::new(10, 10, 1.0, -1.0, (0.0, 0.0)).is_err());
        assert!(Grid::new(4, 4, 1.0, 1.0, (0.0, 0.0)).is_ok());
    }

    #[test]
    fn outside_points_have_no_index() {
        let g = Grid::new(10, 10, 1.0, 1.0, (0.0, 0.0)).unwrap();
        assert_eq!(g.world_to_index(-0.6, 0.0), None);
        assert_eq!(g.world_to_index(9.4, 9.4), Some((9, 9)));
        assert_eq!(g.world_to_index(9.6, 0.0), None);
    }

    proptest! {
        #[test]
        fn index_world_round_trip(
            nx in 4usize..300, ny in 4usize..300,
            dx in 1e-3f64..50.0, dy in 1e-3f64..50.0,
            x0 in -1e4f64..1e4, y0 in -1e4f64..1e4,
            fi in 0.0f64..1.0, fj in 0.0f64..1.0,
        ) {
            let g = Grid::new(nx, ny, dx, dy, (x0, y0)).unwrap();
            let i = ((nx - 1) as f64 * fi) as usize;
            let j = ((ny - 1) as f64 * fj) as usize;
            let (x, y) = g.index_to_world(i, j);
            prop_assert_eq!(g.world_to_index(x, y), Some((i, j)));
        }
    }
}
