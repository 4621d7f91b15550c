//! Reproducible random streams and gamma variates.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Result};

/// Generator used by every sampler in the crate.
pub type StreamRng = ChaCha20Rng;

/// Identifies one independent random stream. Two streams with the same
/// `(seed, stream_id)` produce identical draws; different `stream_id`s under
/// one seed select disjoint ChaCha20 streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Draws from the gamma law with the given shape and unit scale.
///
/// Shapes below one use the `u^{1/θ}` boost on top of a shape `θ + 1` draw.
pub fn sample_gamma_variate<R: rand::Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    check_positive("gamma shape", shape)?;
    let g = Gamma::new(shape, 1.0).map_err(|e| crate::error::domain(e.to_string()))?;
    Ok(g.sample(rng))
}

/// Uniform draw on `(0, 1]`, safe to take the logarithm of.
pub(crate) fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
