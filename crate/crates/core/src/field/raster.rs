//! Contour rasterization by grid traversal.

use super::{FrontContour, Grid, RasterImage};

/// Marks every cell crossed by any polygon edge with 1.
///
/// Cell `(i, j)` is the square of side `dx x dy` centred on its cell centre.
/// Edges are walked cell by cell (Amanatides-Woo traversal), so the line is
/// one cell thick. Parts of edges outside the grid are clipped.
pub fn rasterize_contour(contour: &FrontContour, grid: &Grid) -> RasterImage {
    let mut pixels = vec![0.0; grid.len()];
    for poly in &contour.polylines {
        let n = poly.len();
        for k in 0..n {
            let a = to_cell_space(grid, poly[k]);
            let b = to_cell_space(grid, poly[(k + 1) % n]);
            if let Some((a, b)) = clip(a, b, grid.nx as f64, grid.ny as f64) {
                traverse(a, b, grid.nx, grid.ny, |i, j| pixels[j * grid.nx + i] = 1.0);
            }
        }
    }
    RasterImage::from_raw(*grid, pixels)
}

// cell (i, j) becomes the unit square [i, i+1) x [j, j+1)
fn to_cell_space(grid: &Grid, p: (f64, f64)) -> (f64, f64) {
    let (fi, fj) = grid.world_to_fractional(p.0, p.1);
    (fi + 0.5, fj + 0.5)
}

/// Liang-Barsky clip of segment `a -> b` against `[0, w] x [0, h]`.
fn clip(a: (f64, f64), b: (f64, f64), w: f64, h: f64) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [(-dx, a.0), (dx, w - a.0), (-dy, a.1), (dy, h - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (a.0 + t0 * dx, a.1 + t0 * dy),
        (a.0 + t1 * dx, a.1 + t1 * dy),
    ))
}

fn cell_of(v: f64, n: usize) -> usize {
    (v.floor().max(0.0) as usize).min(n - 1)
}

fn traverse(a: (f64, f64), b: (f64, f64), nx: usize, ny: usize, mut mark: impl FnMut(usize, usize)) {
    let (mut i, mut j) = (cell_of(a.0, nx), cell_of(a.1, ny));
    let (i_end, j_end) = (cell_of(b.0, nx), cell_of(b.1, ny));
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let axis = |d: f64, start: f64, cell: usize| -> (i64, f64, f64) {
        if d > 0.0 {
            (1, ((cell + 1) as f64 - start) / d, 1.0 / d)
        } else if d < 0.0 {
            (-1, (start - cell as f64) / -d, -1.0 / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_i, mut t_max_x, t_delta_x) = axis(dx, a.0, i);
    let (step_j, mut t_max_y, t_delta_y) = axis(dy, a.1, j);

    mark(i, j);
    let budget = i.abs_diff(i_end) + j.abs_diff(j_end) + 2;
    for _ in 0..budget {
        if i == i_end && j == j_end {
            break;
        }
        if t_max_x < t_max_y {
            if t_max_x > 1.0 {
                break;
            }
            let ni = i as i64 + step_i;
            if ni < 0 || ni >= nx as i64 {
                break;
            }
            i = ni as usize;
            t_max_x += t_delta_x;
        } else {
            if t_max_y > 1.0 {
                break;
            }
            let nj = j as i64 + step_j;
            if nj < 0 || nj >= ny as i64 {
                break;
            }
            j = nj as usize;
            t_max_y += t_delta_y;
        }
        mark(i, j);
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;

    fn grid() -> Grid {
        Grid::new(40, 40, 1.0, 1.0, (0.0, 0.0)).unwrap()
    }

    /// Oracle: dense point sampling along each edge.
    fn sampled_cells(contour: &FrontContour, grid: &Grid) -> BTreeSet<(usize, usize)> {
        let mut cells = BTreeSet::new();
        for poly in &contour.polylines {
            for k in 0..poly.len() {
                let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
                let steps = 20_000;
                for s in 0..=steps {
                    let t = s as f64 / steps as f64;
                    let (x, y) = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                    if let Some(c) = grid.world_to_index(x, y) {
                        cells.insert(c);
                    }
                }
            }
        }
        cells
    }

    fn marked(img: &RasterImage) -> BTreeSet<(usize, usize)> {
        let g = img.grid();
        (0..g.ny)
            .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
            .filter(|&(i, j)| img.get(i, j) > 0.0)
            .collect()
    }

    #[test]
    fn square_pixel_count() {
        let sq = FrontContour::new(
            vec![vec![(10.0, 10.0), (20.0, 10.0), (20.0, 20.0), (10.0, 20.0)]],
            0.0,
        );
        let img = rasterize_contour(&sq, &grid());
        let n = img.count_nonzero();
        assert!((36..=44).contains(&n), "count {n}");
        assert_eq!(marked(&img), sampled_cells(&sq, &grid()));
        assert!(img.pixels().iter().all(|&p| p == 0.0 || p == 1.0));
    }

    #[test]
    fn empty_contour_is_blank() {
        let img = rasterize_contour(&FrontContour::default(), &grid());
        assert_eq!(img.count_nonzero(), 0);
    }

    #[test]
    fn tiny_contour_marks_its_cell() {
        let c = FrontContour::new(vec![vec![(5.1, 5.1), (5.2, 5.1), (5.15, 5.2)]], 0.0);
        let img = rasterize_contour(&c, &grid());
        assert!(img.count_nonzero() >= 1);
        assert_eq!(img.get(5, 5), 1.0);
    }

    #[test]
    fn segments_outside_are_clipped() {
        let c = FrontContour::new(vec![vec![(-10.0, 5.0), (50.0, 5.0), (50.0, 80.0)]], 0.0);
        let img = rasterize_contour(&c, &grid());
        // the horizontal edge crosses the whole grid in row 5
        assert!((0..40).all(|i| img.get(i, 5) == 1.0));
    }

    proptest! {
        #[test]
        fn traversal_covers_sampled_cells(
            pts in proptest::collection::vec((0.0f64..39.0, 0.0f64..39.0), 3..7)
        ) {
            let c = FrontContour::new(vec![pts], 0.0);
            let g = grid();
            let img = rasterize_contour(&c, &g);
            let ours = marked(&img);
            let oracle = sampled_cells(&c, &g);
            prop_assert!(oracle.is_subset(&ours));
            // extra cells only where an edge grazes a cell corner
            prop_assert!(ours.len() <= oracle.len() + c.polylines[0].len() * 2);
        }

        #[test]
        fn invariant_under_vertex_rotation(
            pts in proptest::collection::vec((0.0f64..39.0, 0.0f64..39.0), 3..8),
            shift in 0usize..8,
        ) {
            let g = grid();
            let mut rotated = pts.clone();
            let s = shift % pts.len();
            rotated.rotate_left(s);
            let a = rasterize_contour(&FrontContour::new(vec![pts], 0.0), &g);
            let b = rasterize_contour(&FrontContour::new(vec![rotated], 0.0), &g);
            prop_assert_eq!(a, b);
        }
    }
}
