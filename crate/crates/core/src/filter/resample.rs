use rand::Rng;

/// Effective sample size `1 / sum w_i^2` of normalised weights.
pub fn ess(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Systematic resampling with offset `u` in `[0, 1)`: ancestor index for
/// each of the `n` positions `(u + k) / n`.
pub fn systematic_indices(weights: &[f64], n: usize, u: f64) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut cumulative = weights[0] / total;
    let mut i = 0;
    for k in 0..n {
        let pos = (u + k as f64) / n as f64;
        while pos >= cumulative && i + 1 < weights.len() {
            i += 1;
            cumulative += weights[i] / total;
        }
        out.push(i);
    }
    out
}

/// [`systematic_indices`] with a fresh uniform offset.
pub fn systematic_resample<R: Rng + ?Sized>(weights: &[f64], n: usize, rng: &mut R) -> Vec<usize> {
    let u: f64 = rng.random();
    systematic_indices(weights, n, u)
}

/// Number of copies of each particle in an index list.
pub fn copy_counts(indices: &[usize], n: usize) -> Vec<usize> {
    let mut counts = vec![0; n];
    for &i in indices {
        counts[i] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn ess_examples() {
        assert!((ess(&[0.01; 100]) - 100.0).abs() < 1e-9);
        assert_eq!(ess(&[1.0, 0.0, 0.0]), 1.0);
        assert_eq!(ess(&[0.5, 0.5, 0.0, 0.0]), 2.0);
    }

    #[test]
    fn exact_multiples() {
        for u in [0.0, 0.3, 0.999] {
            assert_eq!(copy_counts(&systematic_indices(&[0.25; 4], 4, u), 4), vec![1; 4]);
            assert_eq!(copy_counts(&systematic_indices(&[0.75, 0.25], 4, u), 2), vec![3, 1]);
            let idx = systematic_indices(&[1.0, 0.0, 0.0, 0.0], 4, u);
            assert_eq!(idx, vec![0; 4]);
        }
    }

    #[test]
    fn unbiased_over_offsets() {
        // averaging over a fine grid of offsets recovers n * w_i
        let w = [0.13, 0.4, 0.07, 0.2, 0.2];
        let m = 10_000;
        let mut avg = [0.0; 5];
        for s in 0..m {
            let u = (s as f64 + 0.5) / m as f64;
            for (a, c) in avg.iter_mut().zip(copy_counts(&systematic_indices(&w, 5, u), 5)) {
                *a += c as f64 / m as f64;
            }
        }
        for (a, wi) in avg.iter().zip(w) {
            assert!((a - 5.0 * wi).abs() < 1e-3, "{a} vs {}", 5.0 * wi);
        }
    }

    proptest! {
        #[test]
        fn counts_within_floor_and_ceil(
            raw in proptest::collection::vec(0.0f64..1.0, 1..60), u in 0.0f64..1.0,
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 0.0);
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let n = w.len();
            let counts = copy_counts(&systematic_indices(&w, n, u), n);
            prop_assert_eq!(counts.iter().sum::<usize>(), n);
            for (c, wi) in counts.iter().zip(&w) {
                let e = n as f64 * wi;
                prop_assert!(*c as f64 >= (e - 1e-9).floor() && *c as f64 <= (e + 1e-9).ceil());
            }
        }
    }
}
