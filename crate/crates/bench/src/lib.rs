//! Benchmark fixtures shared by the criterion targets.

use firefilter_core::field::{signed_distance_circle, Grid};
use firefilter_core::LevelSetField;

/// Square grid of `n` cells per side with a centred circular front.
pub fn circle_field(n: usize, dx: f64, radius: f64) -> LevelSetField {
    let half = (n as f64 - 1.0) * dx / 2.0;
    let grid = Grid::new(n, n, dx, dx, (-half, -half)).expect("valid grid");
    signed_distance_circle(&grid, (0.0, 0.0), radius).expect("circle inside grid")
}
