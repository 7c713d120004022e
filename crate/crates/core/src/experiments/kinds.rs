//! Experiment kinds, registered by name.  A kind turns `(config, n)` into a
//! [`TrialRunner`] holding everything that does not depend on the draw.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::ExperimentConfig;
use super::record::Stats;
use crate::arrowhead::{lower_bound_check, solve_arrowhead};
use crate::bounds::{davis_kahan_bound, opnorm_dual_lower, rs_sin_theta_bound, MuVector};
use crate::ensembles::{
    arrowhead_g_from, realize_spectrum, sample_inconsistency_instance, Ensemble, EnsembleSpec,
    Seed, SpectrumFamily, SpectrumSpec,
};
use crate::error::{PerturbError, Result};
use crate::matcore::io::AnyHermitian;
use crate::matcore::{
    dot, dual_exponent, eigenvalues, lp_norm, norm2, spectral_norm, top_eigenpair, HermitianMatrix,
    Scalar, Spectrum,
};
use crate::rs_solver::{
    build_shifted_gaps, verify_shifted_domination, InnerSolver, RsSolver, SolveOptions,
    DEFAULT_CERTIFICATE_LIMIT,
};

pub const DEFAULT_N_LIST: [usize; 3] = [64, 128, 256];
pub const INCONSISTENCY_N_LIST: [usize; 3] = [200, 500, 1000];

/// Runs single draws at a fixed size.
pub trait TrialRunner: Send + Sync {
    fn run(&self, seed: Seed) -> Result<Stats>;
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    /// Sorted statistic names carried by every record of this kind.
    fn schema(&self) -> &'static [&'static str];
    fn default_n_list(&self) -> Vec<usize> {
        DEFAULT_N_LIST.to_vec()
    }
    /// Description of the noise law, for the summary metadata.
    fn convention(&self, cfg: &ExperimentConfig) -> Result<String> {
        Ok(ensemble_for(cfg, "goe")?.convention())
    }
    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>>;
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn stats<const N: usize>(pairs: [(&str, f64); N]) -> Stats {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn spectrum_for(cfg: &ExperimentConfig, n: usize) -> Result<Spectrum> {
    let spec = match &cfg.spectrum {
        Some(s) => s.with_n(n)?,
        None => SpectrumSpec::multiscale(n, 1.0),
    };
    realize_spectrum(&spec)
}

fn ensemble_for(cfg: &ExperimentConfig, default_tag: &str) -> Result<Ensemble> {
    match &cfg.ensemble {
        Some(spec) => Ensemble::from_spec(spec),
        None => Ensemble::from_spec(&EnsembleSpec::new(default_tag)),
    }
}

fn sqrt_log(n: usize) -> f64 {
    (n as f64).ln().sqrt()
}

fn with_diagonal<T: Scalar>(diag: &[f64], e: &HermitianMatrix<T>) -> HermitianMatrix<T> {
    HermitianMatrix::<T>::from_real_diagonal(diag).add(e)
}

// ---------------------------------------------------------------- upper_bound

struct UpperBound;

struct UpperRunner {
    n: usize,
    spectrum: Spectrum,
    ensemble: Ensemble,
    real: RsSolver<f64>,
    complex: RsSolver<Complex64>,
    opts: SolveOptions,
    rs_bound: f64,
}

impl Experiment for UpperBound {
    fn name(&self) -> &'static str {
        "upper_bound"
    }

    fn schema(&self) -> &'static [&'static str] {
        &[
            "contraction_upper",
            "dk_bound",
            "eig_error",
            "fallback",
            "gap_collapse",
            "inner_iters",
            "leading_certified",
            "linearized_ratio",
            "max_coord_ratio",
            "oracle_defect",
            "outer_iters",
            "q_norm2",
            "rs_bound",
            "sin_theta",
            "sin_theta_oracle",
        ]
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        let spectrum = spectrum_for(cfg, n)?;
        Ok(Box::new(UpperRunner {
            n,
            ensemble: ensemble_for(cfg, "goe")?,
            real: RsSolver::from_spectrum(spectrum.clone()),
            complex: RsSolver::from_spectrum(spectrum.clone()),
            opts: SolveOptions::default().with_p(cfg.p).with_tol(cfg.tol),
            rs_bound: rs_sin_theta_bound(&spectrum, 1.0)?,
            spectrum,
        }))
    }
}

impl UpperRunner {
    fn trial<T: Scalar>(&self, solver: &RsSolver<T>, e: &HermitianMatrix<T>) -> Result<Stats> {
        let report = solver.solve(e, &self.opts)?;
        let (lmax, v) = top_eigenpair(&with_diagonal(self.spectrum.values(), e))?;
        let e_norm = spectral_norm(e.matrix())?;

        // D𝓛⁻¹E₂₁, the first outer iterate rescaled by the shifted gaps.
        let linearized = if report.is_fallback() {
            0.0
        } else {
            let part = solver.partition(e)?;
            let d = build_shifted_gaps(&self.spectrum, part.e11)?;
            let inner = InnerSolver::new(d, &part.e22, self.opts.p, f64::INFINITY)?;
            let ctl = &self.opts.control;
            let (x, _) = inner.apply_inverse(&part.e21, ctl.tol, ctl.inner_cap)?;
            inner
                .d
                .apply(&x)
                .iter()
                .map(|z| z.abs())
                .fold(0.0, f64::max)
                / sqrt_log(self.n)
        };

        Ok(stats([
            ("contraction_upper", report.contraction_upper.unwrap_or(0.0)),
            ("dk_bound", davis_kahan_bound(&self.spectrum, e_norm)),
            (
                "eig_error",
                (report.lambda_tilde - lmax).abs() / (1.0 + report.lambda_tilde.abs()),
            ),
            ("fallback", flag(report.is_fallback())),
            ("gap_collapse", flag(report.contraction_upper.is_none())),
            ("inner_iters", report.inner_iters_total as f64),
            ("leading_certified", flag(report.leading_certified)),
            ("linearized_ratio", linearized),
            ("max_coord_ratio", report.max_coord_ratio()),
            ("oracle_defect", 1.0 - dot(&v, &report.u_tilde).abs()),
            ("outer_iters", report.outer_iters as f64),
            ("q_norm2", report.q_norm2),
            ("rs_bound", self.rs_bound),
            // A = diag(λ), so u₁ = e₁ and sin θ is the norm of the tail.
            ("sin_theta", norm2(&report.u_tilde[1..])),
            ("sin_theta_oracle", norm2(&v[1..])),
        ]))
    }
}

impl TrialRunner for UpperRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        match self.ensemble.sample(self.n, seed) {
            AnyHermitian::Real(e) => self.trial(&self.real, &e),
            AnyHermitian::Complex(e) => self.trial(&self.complex, &e),
        }
    }
}

// ---------------------------------------------------------------- lower_bound

struct LowerBound;

struct LowerRunner {
    n: usize,
    spectrum: Spectrum,
}

impl Experiment for LowerBound {
    fn name(&self) -> &'static str {
        "lower_bound"
    }

    fn schema(&self) -> &'static [&'static str] {
        &[
            "a",
            "a_ge_half",
            "gamma",
            "gamma_le_delta",
            "lower_bound_holds",
            "min_slack",
            "secular_residual",
            "top_eigenvalue",
        ]
    }

    fn convention(&self, _cfg: &ExperimentConfig) -> Result<String> {
        Ok("arrowhead noise [[0, g^T], [g, 0]], g_j iid N(0,1)".into())
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        Ok(Box::new(LowerRunner {
            n,
            spectrum: spectrum_for(cfg, n)?,
        }))
    }
}

impl TrialRunner for LowerRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        let g = arrowhead_g_from(self.n, &mut seed.rng());
        let sol = solve_arrowhead(&self.spectrum, &g)?;
        let check = lower_bound_check(&sol, &self.spectrum, &g)?;
        Ok(stats([
            ("a", sol.a),
            ("a_ge_half", flag(sol.a >= 0.5)),
            ("gamma", sol.gamma),
            (
                "gamma_le_delta",
                flag(sol.gamma <= self.spectrum.eigengap()),
            ),
            ("lower_bound_holds", flag(check.holds)),
            ("min_slack", check.min_slack.unwrap_or(0.0)),
            ("secular_residual", sol.secular_residual),
            ("top_eigenvalue", sol.top_eigenvalue),
        ]))
    }
}

// -------------------------------------------------------------- inconsistency

struct Inconsistency;

struct InconsistencyRunner {
    n: usize,
    p: f64,
}

impl Experiment for Inconsistency {
    fn name(&self) -> &'static str {
        "inconsistency"
    }

    fn schema(&self) -> &'static [&'static str] {
        &[
            "lambda1",
            "lambda_max",
            "lambda_max_exceeds",
            "lower_target",
            "norm_sq",
        ]
    }

    fn default_n_list(&self) -> Vec<usize> {
        INCONSISTENCY_N_LIST.to_vec()
    }

    fn convention(&self, _cfg: &ExperimentConfig) -> Result<String> {
        Ok(
            "E = [[0, 0], [0, G]], G a GOE of size n-1 (off-diagonal N(0,1), diagonal N(0,2))"
                .into(),
        )
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        if cfg.p.is_infinite() {
            return Err(PerturbError::Config(
                "inconsistency needs a finite p >= 2".into(),
            ));
        }
        realize_spectrum(&SpectrumSpec::new(
            SpectrumFamily::Inconsistency { p: cfg.p },
            n,
        ))?;
        Ok(Box::new(InconsistencyRunner { n, p: cfg.p }))
    }
}

impl TrialRunner for InconsistencyRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        let (a, e) = sample_inconsistency_instance(self.n, self.p, seed)?;
        let lambda1 = a[(0, 0)];
        let lambda2 = a[(1, 1)];
        let full = a.add(&e);
        let n = self.n;
        // Ã₀ = A₀ + G, the trailing block.
        let a0 = HermitianMatrix::new(full.matrix().block(1, n, 1, n))?;
        let ev = eigenvalues(&a0)?;
        let lmax = ev[0];
        let norm = lmax.abs().max(ev[ev.len() - 1].abs());
        Ok(stats([
            ("lambda1", lambda1),
            ("lambda_max", lmax),
            ("lambda_max_exceeds", flag(lmax > lambda1)),
            ("lower_target", lambda2 * lambda2 + n as f64),
            ("norm_sq", norm * norm),
        ]))
    }
}

// ----------------------------------------------------------------------- weyl

struct Weyl;

struct WeylRunner {
    n: usize,
    ensemble: Ensemble,
    mu: MuVector,
    tau: f64,
}

impl Experiment for Weyl {
    fn name(&self) -> &'static str {
        "weyl"
    }

    fn schema(&self) -> &'static [&'static str] {
        &["domination_holds", "margin"]
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        Ok(Box::new(WeylRunner {
            n,
            ensemble: ensemble_for(cfg, "goe")?,
            mu: MuVector::weyl_profile(n, cfg.param_f64("c", 10.0)?)?,
            tau: cfg.param_f64("tau", 0.0)?,
        }))
    }
}

impl WeylRunner {
    fn check<T: Scalar>(&self, x: &HermitianMatrix<T>, g: &[T]) -> Result<Stats> {
        let d = verify_shifted_domination(x, &self.mu, self.tau, g)?;
        Ok(stats([
            ("domination_holds", flag(d.holds)),
            ("margin", d.margin),
        ]))
    }
}

impl TrialRunner for WeylRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        let mut rng = seed.rng();
        let x = self.ensemble.sample_with(self.n, &mut rng);
        let draws = if self.tau > 0.0 { self.n } else { 0 };
        match x {
            AnyHermitian::Real(x) => {
                let g: Vec<f64> = (0..draws).map(|_| rng.sample(StandardNormal)).collect();
                self.check(&x, &g)
            }
            AnyHermitian::Complex(x) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let g: Vec<Complex64> = (0..draws)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                self.check(&x, &g)
            }
        }
    }
}

// ----------------------------------------------------------------- dk_compare

struct DkCompare;

struct DkRunner {
    n: usize,
    spectrum: Spectrum,
    ensemble: Ensemble,
    rs_bound: f64,
}

impl Experiment for DkCompare {
    fn name(&self) -> &'static str {
        "dk_compare"
    }

    fn schema(&self) -> &'static [&'static str] {
        &["dk_bound", "dk_ratio", "rs_bound", "rs_ratio", "sin_theta"]
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        let spectrum = spectrum_for(cfg, n)?;
        Ok(Box::new(DkRunner {
            n,
            ensemble: ensemble_for(cfg, "goe")?,
            rs_bound: rs_sin_theta_bound(&spectrum, 1.0)?,
            spectrum,
        }))
    }
}

impl DkRunner {
    fn trial<T: Scalar>(&self, e: &HermitianMatrix<T>) -> Result<Stats> {
        let (_, v) = top_eigenpair(&with_diagonal(self.spectrum.values(), e))?;
        let sin_theta = norm2(&v[1..]);
        let dk = davis_kahan_bound(&self.spectrum, spectral_norm(e.matrix())?);
        let ratio = |b: f64| if b > 0.0 { sin_theta / b } else { 0.0 };
        Ok(stats([
            ("dk_bound", dk),
            ("dk_ratio", ratio(dk)),
            ("rs_bound", self.rs_bound),
            ("rs_ratio", ratio(self.rs_bound)),
            ("sin_theta", sin_theta),
        ]))
    }
}

impl TrialRunner for DkRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        match self.ensemble.sample(self.n, seed) {
            AnyHermitian::Real(e) => self.trial(&e),
            AnyHermitian::Complex(e) => self.trial(&e),
        }
    }
}

// ------------------------------------------------------------- opnorm_scaling

struct OpnormScaling;

struct OpnormRunner {
    n: usize,
    p: f64,
    restarts: usize,
    ensemble: Ensemble,
}

impl Experiment for OpnormScaling {
    fn name(&self) -> &'static str {
        "opnorm_scaling"
    }

    fn schema(&self) -> &'static [&'static str] {
        &["opnorm_lower", "scaling_ratio"]
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        if !(cfg.p >= 2.0) || cfg.p.is_infinite() {
            return Err(PerturbError::Config(format!(
                "opnorm_scaling needs a finite p >= 2, got {}",
                cfg.p
            )));
        }
        Ok(Box::new(OpnormRunner {
            n,
            p: cfg.p,
            restarts: cfg.param_usize("restarts", 4)?,
            ensemble: ensemble_for(cfg, "goe")?,
        }))
    }
}

impl TrialRunner for OpnormRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        let x = self.ensemble.sample(self.n, seed);
        let est = seed.child(1);
        let lower = match &x {
            AnyHermitian::Real(m) => opnorm_dual_lower(m.matrix(), self.p, self.restarts, est)?,
            AnyHermitian::Complex(m) => opnorm_dual_lower(m.matrix(), self.p, self.restarts, est)?,
        };
        let nf = self.n as f64;
        let scale = (self.p * nf.ln()).sqrt() * nf.powf(1.0 / self.p);
        Ok(stats([
            ("opnorm_lower", lower),
            ("scaling_ratio", lower / scale),
        ]))
    }
}

// ---------------------------------------------------------- event_diagnostics

struct EventDiagnostics;

struct EventRunner {
    n: usize,
    spectrum: Spectrum,
    ensemble: Ensemble,
    real: RsSolver<f64>,
    complex: RsSolver<Complex64>,
    p: f64,
}

impl Experiment for EventDiagnostics {
    fn name(&self) -> &'static str {
        "event_diagnostics"
    }

    fn schema(&self) -> &'static [&'static str] {
        &[
            "cert_le_half",
            "cert_le_limit",
            "certificate",
            "d_ge_half",
            "d_inv_e21_dual",
            "d_inv_e21_le_half",
            "d_ratio_min",
            "e_tilde_ratio",
            "gap_collapse",
        ]
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        if !(cfg.p >= 2.0) {
            return Err(PerturbError::Config(format!(
                "event_diagnostics needs p >= 2, got {}",
                cfg.p
            )));
        }
        let spectrum = spectrum_for(cfg, n)?;
        Ok(Box::new(EventRunner {
            n,
            ensemble: ensemble_for(cfg, "goe")?,
            real: RsSolver::from_spectrum(spectrum.clone()),
            complex: RsSolver::from_spectrum(spectrum.clone()),
            spectrum,
            p: cfg.p,
        }))
    }
}

impl EventRunner {
    fn trial<T: Scalar>(&self, solver: &RsSolver<T>, e: &HermitianMatrix<T>) -> Result<Stats> {
        let part = solver.partition(e)?;
        let e_tilde = part.assemble_blocks().max_abs() / sqrt_log(self.n);
        let top = self.spectrum.top();
        let d_ratio_min = self.spectrum.values()[1..]
            .iter()
            .map(|l| (top - l + part.e11) / (top - l))
            .fold(f64::INFINITY, f64::min);

        let (certificate, dual) = match build_shifted_gaps(&self.spectrum, part.e11) {
            Err(PerturbError::GapCollapse { .. }) => (None, None),
            Err(err) => return Err(err),
            Ok(d) => {
                let dual = lp_norm(&d.solve(&part.e21), dual_exponent(self.p))?;
                let inner = InnerSolver::new(d, &part.e22, self.p, f64::INFINITY)?;
                (Some(inner.certificate), Some(dual))
            }
        };
        let cert = certificate.unwrap_or(0.0);
        Ok(stats([
            ("cert_le_half", flag(certificate.is_some() && cert <= 0.5)),
            (
                "cert_le_limit",
                flag(certificate.is_some() && cert <= DEFAULT_CERTIFICATE_LIMIT),
            ),
            ("certificate", cert),
            ("d_ge_half", flag(d_ratio_min >= 0.5)),
            ("d_inv_e21_dual", dual.unwrap_or(0.0)),
            ("d_inv_e21_le_half", flag(dual.is_some_and(|x| x <= 0.5))),
            ("d_ratio_min", d_ratio_min),
            ("e_tilde_ratio", e_tilde),
            ("gap_collapse", flag(certificate.is_none())),
        ]))
    }
}

impl TrialRunner for EventRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        match self.ensemble.sample(self.n, seed) {
            AnyHermitian::Real(e) => self.trial(&self.real, &e),
            AnyHermitian::Complex(e) => self.trial(&self.complex, &e),
        }
    }
}

// ----------------------------------------------------------- phase_transition

struct PhaseTransition;

struct PhaseRunner {
    n: usize,
    theta: f64,
    ensemble: Ensemble,
}

/// Phase-transition noise: the configured ensemble, edge-normalised unless
/// the config sets its own `scale`.
fn phase_ensemble(cfg: &ExperimentConfig) -> Result<Ensemble> {
    let mut spec = cfg
        .ensemble
        .clone()
        .unwrap_or_else(|| EnsembleSpec::new("goe"));
    if !spec.params.contains_key("scale") {
        spec.params.insert("scale".into(), "edge".into());
    }
    Ensemble::from_spec(&spec)
}

impl Experiment for PhaseTransition {
    fn name(&self) -> &'static str {
        "phase_transition"
    }

    fn schema(&self) -> &'static [&'static str] {
        &[
            "lambda_max",
            "lambda_theory",
            "overlap_sq",
            "overlap_theory",
        ]
    }

    fn convention(&self, cfg: &ExperimentConfig) -> Result<String> {
        Ok(phase_ensemble(cfg)?.convention())
    }

    fn prepare(&self, cfg: &ExperimentConfig, n: usize) -> Result<Box<dyn TrialRunner>> {
        let theta = cfg.param_f64("theta", 3.0)?;
        if !(theta > 0.0) {
            return Err(PerturbError::Config(format!(
                "theta must be positive, got {theta}"
            )));
        }
        Ok(Box::new(PhaseRunner {
            n,
            theta,
            ensemble: phase_ensemble(cfg)?,
        }))
    }
}

impl PhaseRunner {
    fn trial<T: Scalar>(&self, e: &HermitianMatrix<T>) -> Result<Stats> {
        let mut diag = vec![0.0; self.n];
        diag[0] = self.theta;
        let (lmax, v) = top_eigenpair(&with_diagonal(&diag, e))?;
        let t = self.theta;
        let (overlap, edge) = if t > 1.0 {
            (1.0 - 1.0 / (t * t), t + 1.0 / t)
        } else {
            (0.0, 2.0)
        };
        Ok(stats([
            ("lambda_max", lmax),
            ("lambda_theory", edge),
            ("overlap_sq", v[0].abs_sq()),
            ("overlap_theory", overlap),
        ]))
    }
}

impl TrialRunner for PhaseRunner {
    fn run(&self, seed: Seed) -> Result<Stats> {
        match self.ensemble.sample(self.n, seed) {
            AnyHermitian::Real(e) => self.trial(&e),
            AnyHermitian::Complex(e) => self.trial(&e),
        }
    }
}

// ------------------------------------------------------------------- registry

pub struct ExperimentRegistry {
    kinds: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            kinds: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, kind: Box<dyn Experiment>) {
        self.kinds.insert(kind.name(), kind);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.kinds.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Experiment> {
        self.kinds.get(name).map(|k| k.as_ref()).ok_or_else(|| {
            PerturbError::Config(format!(
                "unknown experiment kind `{name}` (available: {})",
                self.names().join(", ")
            ))
        })
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(UpperBound));
        r.register(Box::new(LowerBound));
        r.register(Box::new(Inconsistency));
        r.register(Box::new(Weyl));
        r.register(Box::new(DkCompare));
        r.register(Box::new(OpnormScaling));
        r.register(Box::new(EventDiagnostics));
        r.register(Box::new(PhaseTransition));
        r
    }
}

pub fn registry() -> &'static ExperimentRegistry {
    static REGISTRY: OnceLock<ExperimentRegistry> = OnceLock::new();
    REGISTRY.get_or_init(ExperimentRegistry::default)
}
