use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{PerturbError, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Zero-mean, unit-variance entry laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum EntryDistribution {
    Gaussian,
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    UniformPm1,
    /// `N(0,1)` conditioned on `|x| ≤ c`, rescaled to unit variance.
    TruncatedGaussian {
        c: f64,
    },
}

impl EntryDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EntryDistribution::TruncatedGaussian { c } if !(c > 0.0 && c.is_finite()) => Err(
                PerturbError::Domain(format!("truncated_gaussian needs c > 0, got {c}")),
            ),
            _ => Ok(()),
        }
    }

    /// Almost-sure bound on |x|, if the law is bounded.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            EntryDistribution::Gaussian => None,
            EntryDistribution::Rademacher => Some(1.0),
            EntryDistribution::UniformPm1 => Some(SQRT_3),
            EntryDistribution::TruncatedGaussian { c } => Some(c / truncated_std(c)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            EntryDistribution::Gaussian => rng.sample(StandardNormal),
            EntryDistribution::Rademacher => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDistribution::UniformPm1 => rng.random_range(-SQRT_3..=SQRT_3),
            EntryDistribution::TruncatedGaussian { c } => loop {
                let x: f64 = rng.sample(StandardNormal);
                if x.abs() <= c {
                    break x / truncated_std(c);
                }
            },
        }
    }
}

/// Standard deviation of `N(0,1)` truncated to `[−c, c]`.
fn truncated_std(c: f64) -> f64 {
    let phi = (-0.5 * c * c).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mass = libm::erf(c / std::f64::consts::SQRT_2);
    (1.0 - 2.0 * c * phi / mass).sqrt()
}
