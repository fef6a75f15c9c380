//! Ghost-padded copies of a field and one-sided ENO differences.

use crate::field::Grid;

pub(crate) const GHOST: usize = 2;

/// Field values with two ghost layers filled by linear extrapolation.
pub(crate) struct Padded {
    pub w: usize,
    pub data: Vec<f64>,
}

impl Padded {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        let w = nx + 2 * GHOST;
        let h = ny + 2 * GHOST;
        let mut data = vec![0.0; w * h];
        for j in 0..ny {
            let row = (j + GHOST) * w;
            data[row + GHOST..row + GHOST + nx].copy_from_slice(&values[j * nx..(j + 1) * nx]);
            let (a, b) = (values[j * nx], values[j * nx + 1]);
            data[row + 1] = 2.0 * a - b;
            data[row] = 3.0 * a - 2.0 * b;
            let (a, b) = (values[j * nx + nx - 1], values[j * nx + nx - 2]);
            data[row + GHOST + nx] = 2.0 * a - b;
            data[row + GHOST + nx + 1] = 3.0 * a - 2.0 * b;
        }
        // bottom and top ghost rows, including corners, from the x-extended rows
        for i in 0..w {
            let a = data[GHOST * w + i];
            let b = data[(GHOST + 1) * w + i];
            data[w + i] = 2.0 * a - b;
            data[i] = 3.0 * a - 2.0 * b;
            let a = data[(GHOST + ny - 1) * w + i];
            let b = data[(GHOST + ny - 2) * w + i];
            data[(GHOST + ny) * w + i] = 2.0 * a - b;
            data[(GHOST + ny + 1) * w + i] = 3.0 * a - 2.0 * b;
        }
        Padded { w, data }
    }

    /// Flat index of interior cell `(i, j)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> usize {
        (j + GHOST) * self.w + i + GHOST
    }
}

/// Backward and forward differences `(D-, D+)` at flat index `k` along a
/// direction with flat stride `s` and spacing `h`.
#[inline]
pub(crate) fn one_sided(p: &[f64], k: usize, s: usize, h: f64, order: u8) -> (f64, f64) {
    let c = p[k];
    let (l, r) = (p[k - s], p[k + s]);
    if order < 2 {
        return ((c - l) / h, (r - c) / h);
    }
    let (ll, rr) = (p[k - 2 * s], p[k + 2 * s]);
    let d2l = c - 2.0 * l + ll;
    let d2c = r - 2.0 * c + l;
    let d2r = rr - 2.0 * r + c;
    let minus = (c - l + 0.5 * smaller(d2l, d2c)) / h;
    let plus = (r - c - 0.5 * smaller(d2c, d2r)) / h;
    (minus, plus)
}

#[inline]
fn smaller(a: f64, b: f64) -> f64 {
    if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}

/// Godunov gradient magnitude in the Osher-Sethian sum form for a front
/// moving with speed of the given sign.
#[inline]
pub(crate) fn godunov_sum(dmx: f64, dpx: f64, dmy: f64, dpy: f64, expanding: bool) -> f64 {
    if expanding {
        (dmx.max(0.0).powi(2) + dpx.min(0.0).powi(2) + dmy.max(0.0).powi(2) + dpy.min(0.0).powi(2))
            .sqrt()
    } else {
        (dmx.min(0.0).powi(2) + dpx.max(0.0).powi(2) + dmy.min(0.0).powi(2) + dpy.max(0.0).powi(2))
            .sqrt()
    }
}

/// Godunov gradient magnitude in the per-axis max form used for the eikonal
/// problem; `positive` selects the branch for `phi > 0`.
#[inline]
pub(crate) fn godunov_max(dmx: f64, dpx: f64, dmy: f64, dpy: f64, positive: bool) -> f64 {
    if positive {
        (dmx.max(0.0).powi(2).max(dpx.min(0.0).powi(2))
            + dmy.max(0.0).powi(2).max(dpy.min(0.0).powi(2)))
        .sqrt()
    } else {
        (dmx.min(0.0).powi(2).max(dpx.max(0.0).powi(2))
            + dmy.min(0.0).powi(2).max(dpy.max(0.0).powi(2)))
        .sqrt()
    }
}
