//! Marching-squares extraction of the zero level set.

use super::{FrontContour, LevelSetField};

const NONE: u32 = u32::MAX;

/// All zero-crossing polygons of `phi`.
///
/// Squares are formed by four neighbouring cell centres and vertices are
/// linearly interpolated along square edges. Polygons are oriented with the
/// burned side (`phi < 0`) on the left, so outer fronts run counter-clockwise.
/// Ambiguous saddle squares are resolved by the sign of the mean of their
/// corners. A field of uniform sign yields an empty contour.
pub fn extract_contour(phi: &LevelSetField) -> FrontContour {
    let grid = *phi.grid();
    let (nx, ny) = (grid.nx, grid.ny);
    let v = phi.values();
    let n_h = (nx - 1) * ny;
    let n_edges = n_h + nx * (ny - 1);
    let h_edge = |i: usize, j: usize| j * (nx - 1) + i;
    let v_edge = |i: usize, j: usize| n_h + j * nx + i;

    let mut next = vec![NONE; n_edges];
    let mut has_incoming = vec![false; n_edges];
    let mut order = Vec::new();

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let vals = [
                v[grid.index(i, j)],
                v[grid.index(i + 1, j)],
                v[grid.index(i + 1, j + 1)],
                v[grid.index(i, j + 1)],
            ];
            let inside = vals.map(|p| p < 0.0);
            if inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
                continue;
            }
            let edges = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            // crossings in counter-clockwise order: (edge slot, is_exit)
            let mut crossings = [(0usize, false); 4];
            let mut n = 0;
            for k in 0..4 {
                let (a, b) = (inside[k], inside[(k + 1) % 4]);
                if a != b {
                    crossings[n] = (k, a);
                    n += 1;
                }
            }
            let mut link = |from: usize, to: usize| {
                let (f, t) = (edges[from], edges[to]);
                next[f] = t as u32;
                has_incoming[t] = true;
                order.push(f);
            };
            if n == 2 {
                let (exit, entry) = if crossings[0].1 {
                    (crossings[0].0, crossings[1].0)
                } else {
                    (crossings[1].0, crossings[0].0)
                };
                link(exit, entry);
            } else {
                let centre_inside = vals.iter().sum::<f64>() < 0.0;
                for p in 0..4 {
                    if crossings[p].1 {
                        let q = if centre_inside { (p + 1) % 4 } else { (p + 3) % 4 };
                        link(crossings[p].0, crossings[q].0);
                    }
                }
            }
        }
    }

    let point = |e: usize| -> (f64, f64) {
        let ((ia, ja), (ib, jb)) = if e < n_h {
            let (i, j) = (e % (nx - 1), e / (nx - 1));
            ((i, j), (i + 1, j))
        } else {
            let k = e - n_h;
            let (i, j) = (k % nx, k / nx);
            ((i, j), (i, j + 1))
        };
        let (va, vb) = (v[grid.index(ia, ja)], v[grid.index(ib, jb)]);
        let t = va / (va - vb);
        let (xa, ya) = grid.index_to_world(ia, ja);
        let (xb, yb) = grid.index_to_world(ib, jb);
        (xa + t * (xb - xa), ya + t * (yb - ya))
    };

    let mut visited = vec![false; n_edges];
    let mut polylines = Vec::new();
    let tol = 1e-12 * grid.min_spacing();
    let walk = |start: usize, visited: &mut [bool], polylines: &mut Vec<Vec<(f64, f64)>>| {
        let mut poly = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            push_distinct(&mut poly, point(cur), tol);
            let nxt = next[cur];
            if nxt == NONE {
                break;
            }
            cur = nxt as usize;
            if cur == start {
                break;
            }
            if visited[cur] {
                // open chain running into an already-walked edge; cannot happen
                // for a consistent sign field but guard against looping
                push_distinct(&mut poly, point(cur), tol);
                break;
            }
        }
        while poly.len() > 1 && close(poly[0], poly[poly.len() - 1], tol) {
            poly.pop();
        }
        if poly.len() >= 3 {
            polylines.push(poly);
        }
    };
    // chains cut by the grid border first, from their heads
    for &e in &order {
        if !visited[e] && !has_incoming[e] {
            walk(e, &mut visited, &mut polylines);
        }
    }
    for &e in &order {
        if !visited[e] {
            walk(e, &mut visited, &mut polylines);
        }
    }

    FrontContour::new(polylines, phi.time)
}

fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
}

fn push_distinct(poly: &mut Vec<(f64, f64)>, p: (f64, f64), tol: f64) {
    if poly.last().is_none_or(|&q| !close(p, q, tol)) {
        poly.push(p);
    }
}
