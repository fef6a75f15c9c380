use crate::error::{Error, Result};
use crate::field::{extract_contour, gaussian_blur, rasterize_contour, FrontContour, LevelSetField, RasterImage};

/// Image overlap `sum_ij A_ij * B_ij` between a binary truth contour image
/// `A` and a blurred predicted contour image `B`. Proportional to the
/// observation likelihood used for particle weights.
pub fn likelihood_score(truth: &RasterImage, predicted_blurred: &RasterImage) -> Result<f64> {
    if truth.grid() != predicted_blurred.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(truth
        .pixels()
        .iter()
        .zip(predicted_blurred.pixels())
        .map(|(a, b)| a * b)
        .sum())
}

/// Rasterized front blurred with `sigma` cells.
pub fn blurred_front(front: &FrontContour, phi_grid: &crate::field::Grid, sigma: f64) -> Result<RasterImage> {
    gaussian_blur(&rasterize_contour(front, phi_grid), sigma)
}

/// Predicted observation image of a level-set field.
pub fn predicted_image(phi: &LevelSetField, sigma: f64) -> Result<RasterImage> {
    blurred_front(&extract_contour(phi), phi.grid(), sigma)
}
