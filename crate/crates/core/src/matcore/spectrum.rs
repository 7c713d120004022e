use serde::{Deserialize, Serialize};

use crate::error::{PerturbError, Result};

/// Nonincreasing eigenvalue list with a simple top eigenvalue (`λ₁ > λ₂`).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum {
    lambdas: Vec<f64>,
}

impl Spectrum {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(PerturbError::InvalidSpectrum(format!(
                "need at least two eigenvalues, got {}",
                lambdas.len()
            )));
        }
        if let Some(i) = lambdas.iter().position(|x| !x.is_finite()) {
            return Err(PerturbError::InvalidSpectrum(format!(
                "eigenvalue {i} is not finite"
            )));
        }
        if let Some(i) = lambdas.windows(2).position(|w| w[0] < w[1]) {
            return Err(PerturbError::InvalidSpectrum(format!(
                "eigenvalues must be nonincreasing (λ{} < λ{})",
                i + 1,
                i + 2
            )));
        }
        if lambdas[0] <= lambdas[1] {
            return Err(PerturbError::InvalidSpectrum(
                "top eigenvalue is not simple (λ1 = λ2)".into(),
            ));
        }
        Ok(Self { lambdas })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.lambdas
    }

    #[inline]
    pub fn top(&self) -> f64 {
        self.lambdas[0]
    }

    /// Eigengap `λ₁ − λ₂`.
    pub fn eigengap(&self) -> f64 {
        self.lambdas[0] - self.lambdas[1]
    }

    /// Unshifted gaps `λ₁ − λ_{j+1}`, `j = 1..n−1`.
    pub fn gaps(&self) -> Vec<f64> {
        let top = self.lambdas[0];
        self.lambdas[1..].iter().map(|&l| top - l).collect()
    }

    pub fn shifted(&self, c: f64) -> Spectrum {
        Spectrum {
            lambdas: self.lambdas.iter().map(|&l| l + c).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Spectrum> {
        Spectrum::new(self.lambdas.iter().map(|&l| l * c).collect())
    }

    /// `ln n`, the log factor used by every bound.
    pub fn log_n(&self) -> f64 {
        (self.n() as f64).ln()
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Spectrum::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tied_top() {
        assert!(matches!(
            Spectrum::new(vec![5.0, 5.0, 1.0]),
            Err(PerturbError::InvalidSpectrum(_))
        ));
    }

    #[test]
    fn rejects_increasing() {
        assert!(Spectrum::new(vec![3.0, 1.0, 2.0]).is_err());
        assert!(Spectrum::new(vec![3.0]).is_err());
    }

    #[test]
    fn allows_ties_below_top() {
        let s = Spectrum::new(vec![3.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.gaps(), vec![2.0, 2.0]);
        assert_eq!(s.eigengap(), 2.0);
    }
}
