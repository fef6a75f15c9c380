//! Weighted cellwise statistics over an ensemble of level-set fields.

use super::{Grid, LevelSetField, ScalarField};
use crate::error::{Error, Result};

fn normalised_weights(fields: &[LevelSetField], weights: &[f64]) -> Result<(Grid, Vec<f64>)> {
    let first = fields
        .first()
        .ok_or_else(|| Error::invalid("fields", "at least one field is required"))?;
    if fields.len() != weights.len() {
        return Err(Error::invalid(
            "weights",
            format!("{} weights for {} fields", weights.len(), fields.len()),
        ));
    }
    let grid = *first.grid();
    if fields.iter().any(|f| *f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::invalid("weights", "weights must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("weights", "weights sum to zero"));
    }
    Ok((grid, weights.iter().map(|w| w / total).collect()))
}

/// Cellwise weighted mean; weights are normalised internally.
pub fn mean_field(fields: &[LevelSetField], weights: &[f64]) -> Result<LevelSetField> {
    let (grid, w) = normalised_weights(fields, weights)?;
    let mut acc = vec![0.0; grid.len()];
    for (f, &wk) in fields.iter().zip(&w) {
        if wk == 0.0 {
            continue;
        }
        for (a, &v) in acc.iter_mut().zip(f.values()) {
            *a += wk * v;
        }
    }
    Ok(LevelSetField::new(
        ScalarField::from_raw(grid, acc),
        fields[0].time,
    ))
}

/// Cellwise weighted (population) variance, accumulated in one pass.
pub fn variance_field(fields: &[LevelSetField], weights: &[f64]) -> Result<ScalarField> {
    let (grid, w) = normalised_weights(fields, weights)?;
    let n = grid.len();
    let mut mean = vec![0.0; n];
    let mut m2 = vec![0.0; n];
    let mut w_sum = 0.0;
    for (f, &wk) in fields.iter().zip(&w) {
        if wk == 0.0 {
            continue;
        }
        w_sum += wk;
        let r = wk / w_sum;
        for ((m, s), &x) in mean.iter_mut().zip(m2.iter_mut()).zip(f.values()) {
            let delta = x - *m;
            *m += r * delta;
            *s += wk * delta * (x - *m);
        }
    }
    let var = m2.into_iter().map(|s| (s / w_sum).max(0.0)).collect();
    Ok(ScalarField::from_raw(grid, var))
}
