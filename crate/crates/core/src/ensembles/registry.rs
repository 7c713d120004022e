//! Noise ensembles selectable by name from experiment configs.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::dist::EntryDistribution;
use super::samplers::{
    arrowhead_g_from, arrowhead_matrix, goe_from, gue_from, subgaussian_complex, subgaussian_real,
    GOE_CONVENTION, GUE_CONVENTION,
};
use super::seed::Seed;
use crate::error::{PerturbError, Result};
use crate::matcore::io::AnyHermitian;
use crate::matcore::{HermitianMatrix, ScalarKind};

pub type Params = Map<String, Value>;

/// `{"tag": "goe", "params": {"scale": "edge"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub tag: String,
    #[serde(default)]
    pub params: Params,
}

impl EnsembleSpec {
    pub fn new(tag: &str) -> Self {
        Self {
            tag: tag.into(),
            params: Params::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.into(), value);
        self
    }
}

pub trait NoiseEnsemble: Send + Sync {
    fn name(&self) -> &'static str;
    fn scalar(&self) -> ScalarKind;
    /// Entry-law convention, recorded in experiment metadata.
    fn convention(&self) -> String;
    fn sample_from(&self, n: usize, rng: &mut ChaCha8Rng) -> AnyHermitian;
}

struct Goe;
struct Gue;
struct Zero;
struct Arrowhead;
struct Subgaussian {
    dist: EntryDistribution,
    scalar: ScalarKind,
}

impl NoiseEnsemble for Goe {
    fn name(&self) -> &'static str {
        "goe"
    }
    fn scalar(&self) -> ScalarKind {
        ScalarKind::Real
    }
    fn convention(&self) -> String {
        GOE_CONVENTION.into()
    }
    fn sample_from(&self, n: usize, rng: &mut ChaCha8Rng) -> AnyHermitian {
        AnyHermitian::Real(goe_from(n, rng))
    }
}

impl NoiseEnsemble for Gue {
    fn name(&self) -> &'static str {
        "gue"
    }
    fn scalar(&self) -> ScalarKind {
        ScalarKind::Complex
    }
    fn convention(&self) -> String {
        GUE_CONVENTION.into()
    }
    fn sample_from(&self, n: usize, rng: &mut ChaCha8Rng) -> AnyHermitian {
        AnyHermitian::Complex(gue_from(n, rng))
    }
}

impl NoiseEnsemble for Zero {
    fn name(&self) -> &'static str {
        "zero"
    }
    fn scalar(&self) -> ScalarKind {
        ScalarKind::Real
    }
    fn convention(&self) -> String {
        "E = 0".into()
    }
    fn sample_from(&self, n: usize, _rng: &mut ChaCha8Rng) -> AnyHermitian {
        AnyHermitian::Real(HermitianMatrix::zeros(n))
    }
}

impl NoiseEnsemble for Arrowhead {
    fn name(&self) -> &'static str {
        "arrowhead"
    }
    fn scalar(&self) -> ScalarKind {
        ScalarKind::Real
    }
    fn convention(&self) -> String {
        "first row/column g ~ N(0, I_{n-1}), zero elsewhere".into()
    }
    fn sample_from(&self, n: usize, rng: &mut ChaCha8Rng) -> AnyHermitian {
        AnyHermitian::Real(arrowhead_matrix(&arrowhead_g_from(n, rng)))
    }
}

impl NoiseEnsemble for Subgaussian {
    fn name(&self) -> &'static str {
        "subgaussian"
    }
    fn scalar(&self) -> ScalarKind {
        self.scalar
    }
    fn convention(&self) -> String {
        let mut s = format!("i.i.d. unit-variance {:?} entries", self.dist);
        if self.scalar == ScalarKind::Complex {
            s.push_str("; off-diagonal re, im each scaled by 1/sqrt(2)");
        }
        s
    }
    fn sample_from(&self, n: usize, rng: &mut ChaCha8Rng) -> AnyHermitian {
        match self.scalar {
            ScalarKind::Real => AnyHermitian::Real(subgaussian_real(n, &self.dist, rng)),
            ScalarKind::Complex => AnyHermitian::Complex(subgaussian_complex(n, &self.dist, rng)),
        }
    }
}

/// Multiplier applied to every sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseScale {
    Fixed(f64),
    /// `1/√n`, which puts the GOE spectral edge at 2.
    Edge,
}

impl NoiseScale {
    pub fn factor(&self, n: usize) -> f64 {
        match *self {
            NoiseScale::Fixed(s) => s,
            NoiseScale::Edge => 1.0 / (n as f64).sqrt(),
        }
    }

    fn from_params(params: &Params) -> Result<Self> {
        match params.get("scale") {
            None => Ok(NoiseScale::Fixed(1.0)),
            Some(Value::String(s)) if s == "edge" => Ok(NoiseScale::Edge),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(NoiseScale::Fixed)
                .ok_or_else(|| PerturbError::Config(format!("bad ensemble scale {v}"))),
        }
    }
}

/// A configured ensemble: the registered sampler plus its scale.
pub struct Ensemble {
    pub sampler: Box<dyn NoiseEnsemble>,
    pub scale: NoiseScale,
}

impl Ensemble {
    pub fn from_spec(spec: &EnsembleSpec) -> Result<Self> {
        registry().build(spec)
    }

    pub fn sample_with(&self, n: usize, rng: &mut ChaCha8Rng) -> AnyHermitian {
        let m = self.sampler.sample_from(n, rng);
        let f = self.scale.factor(n);
        if f == 1.0 {
            return m;
        }
        match m {
            AnyHermitian::Real(h) => AnyHermitian::Real(h.scaled(f)),
            AnyHermitian::Complex(h) => AnyHermitian::Complex(h.scaled(f)),
        }
    }

    pub fn sample(&self, n: usize, seed: Seed) -> AnyHermitian {
        self.sample_with(n, &mut seed.rng())
    }

    pub fn convention(&self) -> String {
        match self.scale {
            NoiseScale::Fixed(1.0) => self.sampler.convention(),
            NoiseScale::Fixed(s) => format!("{} scaled by {s}", self.sampler.convention()),
            NoiseScale::Edge => format!("{} scaled by 1/sqrt(n)", self.sampler.convention()),
        }
    }
}

type Factory = fn(&Params) -> Result<Box<dyn NoiseEnsemble>>;

pub struct EnsembleRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

fn scalar_param(params: &Params) -> Result<ScalarKind> {
    match params.get("scalar") {
        None => Ok(ScalarKind::Real),
        Some(v) => Ok(serde_json::from_value(v.clone())?),
    }
}

fn subgaussian_factory(params: &Params) -> Result<Box<dyn NoiseEnsemble>> {
    let dist = match params.get("dist") {
        None => EntryDistribution::Gaussian,
        Some(Value::String(tag)) => {
            let mut obj = Map::new();
            obj.insert("tag".into(), Value::String(tag.clone()));
            if let Some(c) = params.get("c") {
                obj.insert("c".into(), c.clone());
            }
            serde_json::from_value(Value::Object(obj))?
        }
        Some(v) => serde_json::from_value(v.clone())?,
    };
    dist.validate()?;
    Ok(Box::new(Subgaussian {
        dist,
        scalar: scalar_param(params)?,
    }))
}

impl EnsembleRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn build(&self, spec: &EnsembleSpec) -> Result<Ensemble> {
        let factory = self.factories.get(spec.tag.as_str()).ok_or_else(|| {
            PerturbError::Config(format!(
                "unknown ensemble `{}` (available: {})",
                spec.tag,
                self.names().join(", ")
            ))
        })?;
        Ok(Ensemble {
            sampler: factory(&spec.params)?,
            scale: NoiseScale::from_params(&spec.params)?,
        })
    }
}

impl Default for EnsembleRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("goe", |_| Ok(Box::new(Goe)));
        r.register("gue", |_| Ok(Box::new(Gue)));
        r.register("zero", |_| Ok(Box::new(Zero)));
        r.register("arrowhead", |_| Ok(Box::new(Arrowhead)));
        r.register("subgaussian", subgaussian_factory);
        r
    }
}

pub fn registry() -> &'static EnsembleRegistry {
    static REGISTRY: OnceLock<EnsembleRegistry> = OnceLock::new();
    REGISTRY.get_or_init(EnsembleRegistry::default)
}
