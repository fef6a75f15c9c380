//! Exact signed-distance initial conditions.

use serde::{Deserialize, Serialize};

use super::{Grid, LevelSetField, ScalarField};
use crate::error::{Error, Result};

/// Initial burned region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Ignition {
    Circle { center: (f64, f64), radius: f64 },
    Polygon(Vec<(f64, f64)>),
}

impl Ignition {
    /// Signed-distance field of the ignition region at time 0.
    pub fn level_set(&self, grid: &Grid) -> Result<LevelSetField> {
        match self {
            Ignition::Circle { center, radius } => signed_distance_circle(grid, *center, *radius),
            Ignition::Polygon(vertices) => signed_distance_polygon(grid, vertices),
        }
    }
}

/// `phi(p) = |p - center| - radius` at time 0.
pub fn signed_distance_circle(grid: &Grid, center: (f64, f64), radius: f64) -> Result<LevelSetField> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::DegenerateFront(format!(
            "circle radius must be positive, got {radius}"
        )));
    }
    if !(center.0.is_finite() && center.1.is_finite()) {
        return Err(Error::DegenerateFront("circle centre is not finite".into()));
    }
    let ((xmin, ymin), (xmax, ymax)) = grid.extent();
    let nearest = (center.0.clamp(xmin, xmax), center.1.clamp(ymin, ymax));
    if (nearest.0 - center.0).hypot(nearest.1 - center.1) >= radius {
        return Err(Error::DegenerateFront(format!(
            "circle at ({}, {}) with radius {radius} lies outside the grid",
            center.0, center.1
        )));
    }
    let field = ScalarField::from_fn(*grid, |x, y| (x - center.0).hypot(y - center.1) - radius);
    Ok(LevelSetField::new(field, 0.0))
}

/// Signed distance to a simple polygon (even-odd inside test) at time 0.
pub fn signed_distance_polygon(grid: &Grid, polygon: &[(f64, f64)]) -> Result<LevelSetField> {
    if polygon.len() < 3 {
        return Err(Error::DegenerateFront(format!(
            "ignition polygon needs at least 3 vertices, got {}",
            polygon.len()
        )));
    }
    if polygon.iter().any(|&(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(Error::DegenerateFront("ignition polygon has a non-finite vertex".into()));
    }
    let field = ScalarField::from_fn(*grid, |x, y| {
        let d = distance_to_boundary(polygon, (x, y));
        if point_in_polygon(polygon, (x, y)) {
            -d
        } else {
            d
        }
    });
    let phi = LevelSetField::new(field, 0.0);
    if !phi.has_zero_crossing() {
        return Err(Error::DegenerateFront(
            "ignition polygon does not cross the grid".into(),
        ));
    }
    Ok(phi)
}

/// Cellwise minimum: the union of two burned regions.
pub fn union(a: &LevelSetField, b: &LevelSetField) -> Result<LevelSetField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&p, &q)| p.min(q))
        .collect();
    Ok(LevelSetField::new(
        ScalarField::from_raw(*a.grid(), values),
        a.time.max(b.time),
    ))
}

pub(crate) fn distance_to_boundary(polygon: &[(f64, f64)], p: (f64, f64)) -> f64 {
    let n = polygon.len();
    (0..n)
        .map(|k| segment_distance(polygon[k], polygon[(k + 1) % n], p))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (ex, ey) = (b.0 - a.0, b.1 - a.1);
    let len2 = ex * ex + ey * ey;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * ex + (p.1 - a.1) * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a.0 + t * ex - p.0).hypot(a.1 + t * ey - p.1)
}

/// Even-odd crossing test.
pub(crate) fn point_in_polygon(polygon: &[(f64, f64)], p: (f64, f64)) -> bool {
    let n = polygon.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = polygon[i];
        let (xj, yj) = polygon[j];
        if (yi > p.1) != (yj > p.1) {
            let x_cross = xi + (p.1 - yi) * (xj - xi) / (yj - yi);
            if p.0 < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid64() -> Grid {
        Grid::new(64, 64, 1.0, 1.0, (0.0, 0.0)).unwrap()
    }

    #[test]
    fn circle_values() {
        let g = grid64();
        let phi = signed_distance_circle(&g, (32.0, 32.0), 10.0).unwrap();
        assert_eq!(phi.field.get(32, 32), -10.0);
        assert!(phi.field.get(42, 32).abs() <= 1e-12);
        assert!(phi.field.get(32, 22).abs() <= 1e-12);
        assert_eq!(phi.time, 0.0);
    }

    #[test]
    fn circle_outside_grid_is_degenerate() {
        let g = grid64();
        assert!(matches!(
            signed_distance_circle(&g, (-50.0, 10.0), 5.0),
            Err(Error::DegenerateFront(_))
        ));
        assert!(signed_distance_circle(&g, (10.0, 10.0), 0.0).is_err());
        // partially overlapping is fine
        assert!(signed_distance_circle(&g, (-3.0, 10.0), 5.0).is_ok());
    }

    #[test]
    fn polygon_sign_and_distance() {
        let g = grid64();
        let square = [(20.0, 20.0), (40.0, 20.0), (40.0, 40.0), (20.0, 40.0)];
        let phi = signed_distance_polygon(&g, &square).unwrap();
        assert_eq!(phi.field.get(30, 30), -10.0);
        assert_eq!(phi.field.get(45, 30), 5.0);
        assert_eq!(phi.field.get(20, 30), 0.0);
        assert!(signed_distance_polygon(&g, &square[..2]).is_err());
    }

    #[test]
    fn point_in_polygon_basic() {
        let tri = [(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)];
        assert!(point_in_polygon(&tri, (1.0, 1.0)));
        assert!(!point_in_polygon(&tri, (3.0, 3.0)));
    }
}
