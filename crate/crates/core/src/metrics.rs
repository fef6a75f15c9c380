//! Burned-area agreement between fronts.

use crate::error::{Error, Result};
use crate::field::{FrontContour, Grid, RasterImage};

/// Binary mask of cells whose centre lies inside the front.
///
/// Even-odd rule across all polygons, so a polygon nested in another cuts a
/// hole. Filled by scanlines through the cell centres.
pub fn burned_mask(front: &FrontContour, grid: &Grid) -> RasterImage {
    let mut pixels = vec![0.0; grid.len()];
    let mut crossings = Vec::new();
    for j in 0..grid.ny {
        let (_, y) = grid.index_to_world(0, j);
        crossings.clear();
        for poly in &front.polylines {
            let n = poly.len();
            for k in 0..n {
                let (x0, y0) = poly[k];
                let (x1, y1) = poly[(k + 1) % n];
                if (y0 > y) != (y1 > y) {
                    crossings.push(x0 + (y - y0) * (x1 - x0) / (y1 - y0));
                }
            }
        }
        crossings.sort_by(f64::total_cmp);
        // a centre at x is inside iff an odd number of crossings lie strictly
        // right of it, i.e. x in [c0, c1) for consecutive sorted pairs
        let x_of = |i: i64| grid.origin.0 + i as f64 * grid.dx;
        for pair in crossings.chunks_exact(2) {
            let (c0, c1) = (pair[0], pair[1]);
            let mut lo = ((c0 - grid.origin.0) / grid.dx).ceil() as i64;
            while x_of(lo - 1) >= c0 {
                lo -= 1;
            }
            while x_of(lo) < c0 {
                lo += 1;
            }
            let mut hi = ((c1 - grid.origin.0) / grid.dx).ceil() as i64 - 1;
            while x_of(hi + 1) < c1 {
                hi += 1;
            }
            while hi >= lo && x_of(hi) >= c1 {
                hi -= 1;
            }
            let lo = lo.max(0);
            let hi = hi.min(grid.nx as i64 - 1);
            for i in lo..=hi {
                pixels[grid.index(i as usize, j)] = 1.0;
            }
        }
    }
    RasterImage::from_raw(*grid, pixels)
}

fn check_pair(a: &RasterImage, b: &RasterImage) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn counts(a: &RasterImage, b: &RasterImage) -> (usize, usize, usize) {
    let (mut both, mut only_a, mut only_b) = (0, 0, 0);
    for (&p, &q) in a.pixels().iter().zip(b.pixels()) {
        match (p > 0.5, q > 0.5) {
            (true, true) => both += 1,
            (true, false) => only_a += 1,
            (false, true) => only_b += 1,
            (false, false) => {}
        }
    }
    (both, only_a, only_b)
}

/// Intersection over union of two masks; 1 when both are empty.
pub fn jaccard(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    check_pair(a, b)?;
    let (both, only_a, only_b) = counts(a, b);
    let union = both + only_a + only_b;
    Ok(if union == 0 {
        1.0
    } else {
        both as f64 / union as f64
    })
}

/// Area (m^2) burned in exactly one of the two masks.
pub fn symmetric_difference_area(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    check_pair(a, b)?;
    let (_, only_a, only_b) = counts(a, b);
    Ok((only_a + only_b) as f64 * a.grid().cell_area())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::field::{extract_contour, signed_distance_circle, sdf_point_in_polygon};

    fn grid() -> Grid {
        Grid::new(40, 40, 1.0, 1.0, (0.0, 0.0)).unwrap()
    }

    fn square(x0: f64, y0: f64, side: f64) -> Vec<(f64, f64)> {
        vec![(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]
    }

    /// Oracle: explicit parity count of polygons containing each centre.
    fn oracle_mask(front: &FrontContour, grid: &Grid) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let p = grid.index_to_world(i, j);
                let hits = front
                    .polylines
                    .iter()
                    .filter(|poly| sdf_point_in_polygon(poly, p))
                    .count();
                if hits % 2 == 1 {
                    out[grid.index(i, j)] = 1.0;
                }
            }
        }
        out
    }

    #[test]
    fn square_mask_count() {
        let f = FrontContour::new(vec![square(10.3, 10.7, 10.0)], 0.0);
        let m = burned_mask(&f, &grid());
        let n = m.count_nonzero();
        assert!((81..=121).contains(&n), "{n}");
        assert_eq!(m.pixels(), &oracle_mask(&f, &grid())[..]);
    }

    #[test]
    fn empty_front_gives_empty_mask() {
        assert_eq!(burned_mask(&FrontContour::default(), &grid()).count_nonzero(), 0);
    }

    #[test]
    fn nested_squares_make_an_annulus() {
        let f = FrontContour::new(vec![square(5.5, 5.5, 20.0), square(10.5, 10.5, 10.0)], 0.0);
        let m = burned_mask(&f, &grid());
        assert_eq!(m.get(15, 15), 0.0);
        assert_eq!(m.get(7, 7), 1.0);
        assert_eq!(m.count_nonzero(), 400 - 100);
        assert_eq!(m.pixels(), &oracle_mask(&f, &grid())[..]);
    }

    #[test]
    fn jaccard_examples() {
        let g = grid();
        let a = burned_mask(&FrontContour::new(vec![square(4.5, 4.5, 10.0)], 0.0), &g);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        let far = burned_mask(&FrontContour::new(vec![square(24.5, 24.5, 10.0)], 0.0), &g);
        assert_eq!(jaccard(&a, &far).unwrap(), 0.0);
        // left half of a 10x10 block
        let half = burned_mask(
            &FrontContour::new(vec![vec![(4.5, 4.5), (9.5, 4.5), (9.5, 14.5), (4.5, 14.5)]], 0.0),
            &g,
        );
        assert_eq!(jaccard(&a, &half).unwrap(), 0.5);
        let empty = RasterImage::zeros(g);
        assert_eq!(jaccard(&empty, &empty).unwrap(), 1.0);
        assert_eq!(symmetric_difference_area(&a, &far).unwrap(), 200.0);
        assert_eq!(symmetric_difference_area(&a, &a).unwrap(), 0.0);
        let other = RasterImage::zeros(Grid::new(8, 8, 1.0, 1.0, (0.0, 0.0)).unwrap());
        assert!(jaccard(&a, &other).is_err());
        assert!(symmetric_difference_area(&a, &other).is_err());
    }

    #[test]
    fn mask_agrees_with_level_set_sign() {
        let g = grid();
        for (cx, cy, r) in [(20.0, 20.0, 9.3), (17.2, 21.9, 12.1), (22.0, 18.0, 4.4)] {
            let phi = signed_distance_circle(&g, (cx, cy), r).unwrap();
            let m = burned_mask(&extract_contour(&phi), &g);
            let agree = phi
                .values()
                .iter()
                .zip(m.pixels())
                .filter(|(v, p)| (**v < 0.0) == (**p > 0.5))
                .count();
            assert!(agree as f64 >= 0.98 * g.len() as f64);
        }
    }

    proptest! {
        #[test]
        fn sym_diff_matches_brute_force(
            a in proptest::collection::vec(any::<bool>(), 64),
            b in proptest::collection::vec(any::<bool>(), 64),
            dx in 0.1f64..3.0,
        ) {
            let g = Grid::new(8, 8, dx, 2.0 * dx, (0.0, 0.0)).unwrap();
            let img = |v: &Vec<bool>| RasterImage::new(g, v.iter().map(|&x| x as u8 as f64).collect()).unwrap();
            let (ma, mb) = (img(&a), img(&b));
            let brute = a.iter().zip(&b).filter(|(x, y)| x != y).count() as f64 * dx * 2.0 * dx;
            let sd = symmetric_difference_area(&ma, &mb).unwrap();
            prop_assert!((sd - brute).abs() < 1e-9);
            let j = jaccard(&ma, &mb).unwrap();
            prop_assert!((j - jaccard(&mb, &ma).unwrap()).abs() == 0.0);
            prop_assert_eq!(j == 1.0, a == b);
            if a.iter().any(|&x| x) || b.iter().any(|&x| x) {
                prop_assert_eq!(sd == 0.0, j == 1.0);
            }
        }

        #[test]
        fn mask_matches_parity_oracle(
            pts in proptest::collection::vec((0.0f64..39.0, 0.0f64..39.0), 3..9)
        ) {
            let f = FrontContour::new(vec![pts], 0.0);
            let m = burned_mask(&f, &grid());
            prop_assert_eq!(m.pixels(), &oracle_mask(&f, &grid())[..]);
        }
    }
}
