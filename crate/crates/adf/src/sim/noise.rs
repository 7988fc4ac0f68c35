//! Bounded measurement noise.
//!
//! Every model here is hard-bounded by the magnitude `d`: the filter's
//! accuracy band assumes `|w| <= d`, so even the Gaussian variant is
//! truncated rather than tailed. Generation is deterministic for a
//! given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Error;

/// Shape of the bounded disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Uniform on `[-d, d]`.
    Uniform,
    /// Zero-mean Gaussian with `sigma = d/2`, resampled until the draw
    /// lands inside `[-d, d]` (about 95.4% acceptance), so the bound
    /// holds exactly.
    GaussianTruncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Magnitude bound (same unit as the measured signal). Zero
    /// disables the noise.
    pub d: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(Error::InvalidParam("noise magnitude d must be >= 0"));
        }
        Ok(())
    }
}

/// Stateful generator; one draw per sample.
pub struct NoiseGen {
    model: NoiseModel,
    rng: ChaCha8Rng,
    normal: Normal<f64>,
}

impl NoiseGen {
    pub fn new(model: NoiseModel) -> Result<Self, Error> {
        model.validate()?;
        let sigma = if model.d > 0.0 { model.d / 2.0 } else { 1.0 };
        Ok(NoiseGen {
            model,
            rng: ChaCha8Rng::seed_from_u64(model.seed),
            normal: Normal::new(0.0, sigma).expect("sigma is positive"),
        })
    }

    pub fn model(&self) -> NoiseModel {
        self.model
    }

    pub fn sample(&mut self) -> f64 {
        let d = self.model.d;
        if d == 0.0 {
            return 0.0;
        }
        match self.model.kind {
            NoiseKind::Uniform => self.rng.gen_range(-d..=d),
            NoiseKind::GaussianTruncated => loop {
                let w = self.normal.sample(&mut self.rng);
                if w.abs() <= d {
                    return w;
                }
            },
        }
    }
}
