//! Deterministic random-number substreams.
//!
//! Every stochastic consumer (a particle's process noise in one assimilation
//! window, the resampler of one update, ...) gets its own ChaCha stream keyed
//! by `(seed, purpose, a, b)`. Results therefore do not depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type FilterRng = ChaCha8Rng;

/// What a substream is used for. Keeps streams of different consumers apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Prior = 1,
    ProcessNoise = 2,
    Resample = 3,
    EnkfRandomWalk = 4,
    EnkfObsPerturbation = 5,
    Synthetic = 6,
    Jitter = 7,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, purpose, a, b)`.
pub fn substream(seed: u64, purpose: Purpose, a: u64, b: u64) -> FilterRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = splitmix(splitmix(splitmix(purpose as u64) ^ a) ^ b);
    rng.set_stream(stream);
    rng
}
