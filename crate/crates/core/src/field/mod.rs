//! Spatial substrate: grids, fields, fronts and images.

mod blur;
mod contour;
mod grid;
mod raster;
mod sdf;
mod stats;

use serde::{Deserialize, Serialize};

pub(crate) use blur::convolve_separable;
pub use blur::{gaussian_blur, gaussian_convolve, gaussian_kernel};
pub use contour::extract_contour;
pub use grid::Grid;
pub use raster::rasterize_contour;
pub use sdf::{Ignition, signed_distance_circle, signed_distance_polygon, union};
#[cfg(test)]
pub(crate) use sdf::point_in_polygon as sdf_point_in_polygon;
pub use stats::{mean_field, variance_field};

use crate::error::{Error, Result};

/// Real value per cell of a [`Grid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} entries, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "values",
                format!("non-finite value at cell {k}"),
            ));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn filled(grid: Grid, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.index_to_world(i, j);
                values.push(f(x, y));
            }
        }
        ScalarField { grid, values }
    }

    // Callers inside the crate guarantee length and finiteness.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Level-set function `phi(x, y, t)`.
///
/// Negative inside the burned region, positive outside; the fire front is the
/// zero level set.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetField {
    pub field: ScalarField,
    pub time: f64,
}

impl LevelSetField {
    pub fn new(field: ScalarField, time: f64) -> Self {
        LevelSetField { field, time }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn burned_cells(&self) -> usize {
        self.values().iter().filter(|&&v| v < 0.0).count()
    }

    pub fn has_zero_crossing(&self) -> bool {
        let v = self.values();
        v.iter().any(|&p| p < 0.0) && v.iter().any(|&p| p >= 0.0)
    }
}

/// Zero level set as closed polygons in world coordinates.
///
/// Closure is implicit: the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrontContour {
    pub polylines: Vec<Vec<(f64, f64)>>,
    pub time: f64,
}

impl FrontContour {
    pub fn new(polylines: Vec<Vec<(f64, f64)>>, time: f64) -> Self {
        FrontContour { polylines, time }
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.polylines.iter().flatten().copied()
    }

    /// Signed shoelace area summed over polygons (counter-clockwise positive).
    pub fn signed_area(&self) -> f64 {
        self.polylines
            .iter()
            .map(|poly| {
                let n = poly.len();
                (0..n)
                    .map(|k| {
                        let (x0, y0) = poly[k];
                        let (x1, y1) = poly[(k + 1) % n];
                        x0 * y1 - x1 * y0
                    })
                    .sum::<f64>()
                    * 0.5
            })
            .sum()
    }

    /// Checks the polygon invariants: at least three finite vertices each.
    pub fn validate(&self) -> Result<()> {
        for (k, poly) in self.polylines.iter().enumerate() {
            if poly.len() < 3 {
                return Err(Error::invalid(
                    "polygons",
                    format!("polygon {k} has {} vertices, need at least 3", poly.len()),
                ));
            }
            if poly.iter().any(|&(x, y)| !(x.is_finite() && y.is_finite())) {
                return Err(Error::invalid(
                    "polygons",
                    format!("polygon {k} has a non-finite vertex"),
                ));
            }
        }
        Ok(())
    }
}

/// Greyscale image on a grid with pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    grid: Grid,
    pixels: Vec<f64>,
}

impl RasterImage {
    pub fn new(grid: Grid, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != grid.len() {
            return Err(Error::invalid(
                "pixels",
                format!("expected {} entries, got {}", grid.len(), pixels.len()),
            ));
        }
        if let Some(k) = pixels
            .iter()
            .position(|p| !(p.is_finite() && (0.0..=1.0).contains(p)))
        {
            return Err(Error::invalid(
                "pixels",
                format!("pixel {k} = {} outside [0, 1]", pixels[k]),
            ));
        }
        Ok(RasterImage { grid, pixels })
    }

    pub fn zeros(grid: Grid) -> Self {
        RasterImage {
            grid,
            pixels: vec![0.0; grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: Grid, pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), grid.len());
        RasterImage { grid, pixels }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pixels[self.grid.index(i, j)]
    }

    pub fn count_nonzero(&self) -> usize {
        self.pixels.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.pixels.iter().sum()
    }
}
