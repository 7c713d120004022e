use serde::{Deserialize, Serialize};

use crate::error::{PerturbError, Result};
use crate::matcore::Spectrum;

/// Declarative spectrum: `{"family": ..., "n": ..., "params": {...}}`.
/// `n` may be omitted inside experiment configs, which set it per size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    #[serde(flatten)]
    pub family: SpectrumFamily,
    #[serde(default)]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum SpectrumFamily {
    Explicit {
        values: Vec<f64>,
    },
    /// `λ_j = (n+1−j)·scale`.
    Linear {
        scale: f64,
    },
    /// `λ_j = (n+1−j)·(ln n)^{2+ε}`.
    Multiscale {
        #[serde(alias = "eps")]
        epsilon: f64,
    },
    /// `λ₁`, then `r − 1` copies of `λ₁ − δ`, then `n − r` zeros.
    Lowrank {
        r: usize,
        #[serde(alias = "lambda_1")]
        lambda1: f64,
        delta: f64,
    },
    /// `λ_{j+1} = 3√n + ((n−1)^{(p−2)/p} − j^{(p−2)/p})·n^{1/p}/ln²n`.
    Inconsistency {
        #[serde(with = "crate::exponent")]
        p: f64,
    },
}

impl SpectrumSpec {
    pub fn new(family: SpectrumFamily, n: usize) -> Self {
        Self { family, n }
    }

    pub fn linear(n: usize, scale: f64) -> Self {
        Self::new(SpectrumFamily::Linear { scale }, n)
    }

    pub fn multiscale(n: usize, epsilon: f64) -> Self {
        Self::new(SpectrumFamily::Multiscale { epsilon }, n)
    }

    pub fn lowrank(n: usize, r: usize, lambda1: f64, delta: f64) -> Self {
        Self::new(SpectrumFamily::Lowrank { r, lambda1, delta }, n)
    }

    pub fn inconsistency(n: usize, p: f64) -> Self {
        Self::new(SpectrumFamily::Inconsistency { p }, n)
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        let n = values.len();
        Self::new(SpectrumFamily::Explicit { values }, n)
    }

    /// Same family at another dimension.  Explicit lists cannot be resized.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        if let SpectrumFamily::Explicit { values } = &self.family {
            if values.len() != n {
                return Err(PerturbError::Config(format!(
                    "explicit spectrum has {} values, cannot realise n = {n}",
                    values.len()
                )));
            }
        }
        Ok(Self::new(self.family.clone(), n))
    }
}

pub fn realize_spectrum(spec: &SpectrumSpec) -> Result<Spectrum> {
    let n = spec.n;
    if n < 2 {
        return Err(PerturbError::InvalidSpectrum(format!(
            "need n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    let values = match &spec.family {
        SpectrumFamily::Explicit { values } => {
            if values.len() != n {
                return Err(PerturbError::InvalidSpectrum(format!(
                    "n = {n} but {} values given",
                    values.len()
                )));
            }
            values.clone()
        }
        SpectrumFamily::Linear { scale } => {
            (1..=n).map(|j| (nf + 1.0 - j as f64) * scale).collect()
        }
        SpectrumFamily::Multiscale { epsilon } => {
            let c = nf.ln().powf(2.0 + epsilon);
            (1..=n).map(|j| (nf + 1.0 - j as f64) * c).collect()
        }
        SpectrumFamily::Lowrank { r, lambda1, delta } => {
            if *r < 1 || *r > n {
                return Err(PerturbError::InvalidSpectrum(format!(
                    "lowrank needs 1 <= r <= n, got r = {r}"
                )));
            }
            let mut v = vec![0.0; n];
            v[0] = *lambda1;
            for x in v.iter_mut().take(*r).skip(1) {
                *x = lambda1 - delta;
            }
            v
        }
        SpectrumFamily::Inconsistency { p } => {
            if !(*p >= 2.0) || p.is_infinite() {
                return Err(PerturbError::Domain(format!(
                    "inconsistency spectrum needs p in [2, inf), got {p}"
                )));
            }
            let e = (p - 2.0) / p;
            // 0^0 is taken as 0 so that λ₁ − λ_{j+1} = j^e·n^{1/p}/ln²n also at p = 2.
            let pw = |j: f64| if j == 0.0 { 0.0 } else { j.powf(e) };
            let scale = nf.powf(1.0 / p) / nf.ln().powi(2);
            let base = 3.0 * nf.sqrt();
            let top = pw(nf - 1.0);
            let mut v: Vec<f64> = (0..n)
                .map(|j| base + (top - pw(j as f64)) * scale)
                .collect();
            v[n - 1] = base;
            v
        }
    };
    Spectrum::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_three() {
        let s = realize_spectrum(&SpectrumSpec::linear(3, 1.0)).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn multiscale_formula() {
        let s = realize_spectrum(&SpectrumSpec::multiscale(8, 1.0)).unwrap();
        let l3 = 8f64.ln().powi(3);
        for j in 1..=8 {
            assert_relative_eq!(s.values()[j - 1], (9 - j) as f64 * l3, max_relative = 1e-14);
        }
    }

    #[test]
    fn explicit_tie_rejected() {
        assert!(matches!(
            realize_spectrum(&SpectrumSpec::explicit(vec![5.0, 5.0, 1.0])),
            Err(PerturbError::InvalidSpectrum(_))
        ));
    }

    #[test]
    fn lowrank_pattern() {
        let s = realize_spectrum(&SpectrumSpec::lowrank(6, 3, 10.0, 2.0)).unwrap();
        assert_eq!(s.values(), &[10.0, 8.0, 8.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn inconsistency_gaps() {
        let n = 100;
        for p in [2.0, 3.0, 4.0] {
            let s = realize_spectrum(&SpectrumSpec::inconsistency(n, p)).unwrap();
            let v = s.values();
            assert_eq!(v[n - 1], 30.0);
            let scale = (n as f64).powf(1.0 / p) / (n as f64).ln().powi(2);
            for j in 1..n {
                let want = (j as f64).powf((p - 2.0) / p) * scale;
                assert_relative_eq!(v[0] - v[j], want, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn json_shape() {
        let spec: SpectrumSpec =
            serde_json::from_str(r#"{"family":"linear","n":3,"params":{"scale":1}}"#).unwrap();
        assert_eq!(spec, SpectrumSpec::linear(3, 1.0));
        let text = serde_json::to_string(&SpectrumSpec::multiscale(4, 1.0)).unwrap();
        let back: SpectrumSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, SpectrumSpec::multiscale(4, 1.0));
    }
}
