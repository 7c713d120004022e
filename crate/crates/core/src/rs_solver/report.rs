use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::assemble::{assemble_eigvec, coordinate_bounds, eigenvalue_from_q, overlap_ratios};
use super::inner::{build_shifted_gaps, InnerSolver, DEFAULT_CERTIFICATE_LIMIT};
use super::outer::{solve_q, IterationControl};
use super::partition::{partition, PartitionedPerturbation};
use crate::error::{PerturbError, Result};
use crate::matcore::{
    dot, eigenvalues, hermitian_eig, norm2, top_eigenpair, EigDecomposition, HermitianMatrix,
    Scalar, Spectrum,
};

pub const METHOD_RS: &str = "rs";
pub const METHOD_FALLBACK: &str = "oracle-fallback";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: DeserializeOwned"))]
pub struct SolverReport<T> {
    pub q: Vec<T>,
    pub u_tilde: Vec<T>,
    pub lambda_tilde: f64,
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    /// Certified bound on `‖E₂₂D⁻¹‖_{p,p}`; absent when the shifted gaps collapsed.
    pub contraction_upper: Option<f64>,
    pub residual2: f64,
    pub orth_residual: f64,
    pub coord_ratios: Vec<f64>,
    pub q_norm2: f64,
    pub leading_certified: bool,
    /// `"rs"` or `"oracle-fallback"`.
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_reason: Option<String>,
    /// `‖𝓛q − E₂₁ + q(E₁₂q)‖₂` on the RS path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point_residual: Option<f64>,
    #[serde(with = "crate::exponent")]
    pub p: f64,
}

impl<T: Scalar> SolverReport<T> {
    pub fn is_fallback(&self) -> bool {
        self.method == METHOD_FALLBACK
    }

    pub fn max_coord_ratio(&self) -> f64 {
        self.coord_ratios.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Norm for the certificate and the outer stopping rule.
    #[serde(with = "crate::exponent")]
    pub p: f64,
    pub control: IterationControl,
    pub certificate_limit: f64,
    /// Fall back to the dense oracle instead of returning the error.
    pub fallback: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            p: 2.0,
            control: IterationControl::default(),
            certificate_limit: DEFAULT_CERTIFICATE_LIMIT,
            fallback: true,
        }
    }
}

impl SolveOptions {
    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.control = IterationControl::with_tol(tol);
        self
    }
}

/// Fills `residual2`, `orth_residual` and `leading_certified`.
/// `λ̃` must exceed `(λ₁ + λ₂)/2` and match the dense top eigenvalue of
/// `A + E` to `1e−9·(1 + |λ̃|)`.
pub fn verify_solution<T: Scalar>(
    a: &HermitianMatrix<T>,
    e: &HermitianMatrix<T>,
    mut report: SolverReport<T>,
    lambda: &Spectrum,
) -> Result<SolverReport<T>> {
    let at = a.add(e);
    let u = &report.u_tilde;
    let y = at.matrix().matvec(u);
    let lt = report.lambda_tilde;
    report.residual2 = y
        .iter()
        .zip(u)
        .map(|(&yi, &ui)| (yi - ui.scale(lt)).abs_sq())
        .sum::<f64>()
        .sqrt();
    // ‖Ũ_⊥* y‖ for any orthonormal basis of ũ^⊥ is the norm of the projection.
    let proj = dot(u, &y);
    report.orth_residual = y
        .iter()
        .zip(u)
        .map(|(&yi, &ui)| (yi - ui * proj).abs_sq())
        .sum::<f64>()
        .sqrt();
    let values = lambda.values();
    let above_mid = lt > 0.5 * (values[0] + values[1]);
    let top = eigenvalues(&at)?[0];
    report.leading_certified = above_mid && (lt - top).abs() <= 1e-9 * (1.0 + lt.abs());
    Ok(report)
}

/// Holds `A`, its eigendecomposition and spectrum, reused across noise draws.
#[derive(Debug, Clone)]
pub struct RsSolver<T> {
    pub a: HermitianMatrix<T>,
    pub eig: EigDecomposition<T>,
    pub spectrum: Spectrum,
}

fn is_fallback_trigger(e: &PerturbError) -> bool {
    matches!(
        e,
        PerturbError::GapCollapse { .. }
            | PerturbError::ContractionFailure { .. }
            | PerturbError::NonConvergence { .. }
            | PerturbError::Inconsistency(_)
    )
}

impl<T: Scalar> RsSolver<T> {
    pub fn new(a: HermitianMatrix<T>) -> Result<Self> {
        let eig = hermitian_eig(&a)?;
        let spectrum = eig.spectrum()?;
        Ok(Self { a, eig, spectrum })
    }

    /// For `A = diag(λ)` with `λ` already sorted: `U = I` exactly.
    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        let eig = EigDecomposition::from_spectrum(&spectrum);
        let a = HermitianMatrix::from_real_diagonal(spectrum.values());
        Self { a, eig, spectrum }
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn partition(&self, e: &HermitianMatrix<T>) -> Result<PartitionedPerturbation<T>> {
        partition(&self.eig, e)
    }

    /// RS construction only; errors are returned, never replaced.
    pub fn solve_rs(&self, e: &HermitianMatrix<T>, opts: &SolveOptions) -> Result<SolverReport<T>> {
        let part = self.partition(e)?;
        let report = self.rs_path(&part, opts, &mut None)?;
        verify_solution(&self.a, e, report, &self.spectrum)
    }

    fn rs_path(
        &self,
        part: &PartitionedPerturbation<T>,
        opts: &SolveOptions,
        cert: &mut Option<f64>,
    ) -> Result<SolverReport<T>> {
        let d = build_shifted_gaps(&self.spectrum, part.e11)?;
        let inner = match InnerSolver::new(d, &part.e22, opts.p, opts.certificate_limit) {
            Ok(s) => s,
            Err(err) => {
                if let PerturbError::ContractionFailure { bound, .. } = err {
                    *cert = Some(bound);
                }
                return Err(err);
            }
        };
        *cert = Some(inner.certificate);
        let (q, stats) = solve_q(part, &inner, &opts.control)?;
        let u_tilde = assemble_eigvec(&self.eig, &q)?;
        let lambda_tilde = eigenvalue_from_q(self.spectrum.top(), part.e11, &part.e12, &q)?;
        Ok(SolverReport {
            coord_ratios: coordinate_bounds(&q, &self.spectrum),
            q_norm2: norm2(&q),
            q,
            u_tilde,
            lambda_tilde,
            outer_iters: stats.outer_iters,
            inner_iters_total: stats.inner_iters_total,
            contraction_upper: Some(inner.certificate),
            residual2: 0.0,
            orth_residual: 0.0,
            leading_certified: false,
            method: METHOD_RS.into(),
            fallback_reason: None,
            fixed_point_residual: Some(stats.fixed_point_residual),
            p: opts.p,
        })
    }

    /// Dense-oracle eigenpair of `A + E`, phased so `⟨u₁, ũ⟩ ≥ 0`.
    pub fn oracle_report(
        &self,
        e: &HermitianMatrix<T>,
        opts: &SolveOptions,
        reason: String,
        certificate: Option<f64>,
    ) -> Result<SolverReport<T>> {
        let at = self.a.add(e);
        let (lt, mut u) = top_eigenpair(&at)?;
        let coeffs = self.eig.basis.adjoint_matvec(&u);
        let head = coeffs[0];
        if head.abs() > 0.0 {
            let rot = head.phase().conj();
            u.iter_mut().for_each(|x| *x *= rot);
        }
        let coeffs = self.eig.basis.adjoint_matvec(&u);
        let h = coeffs[0].abs().max(1e-300);
        let q: Vec<T> = coeffs[1..].iter().map(|&c| c.scale(1.0 / h)).collect();
        let report = SolverReport {
            coord_ratios: overlap_ratios(coeffs[1..].iter().map(|c| c.abs()), &self.spectrum),
            q_norm2: norm2(&q),
            q,
            u_tilde: u,
            lambda_tilde: lt,
            outer_iters: 0,
            inner_iters_total: 0,
            contraction_upper: certificate,
            residual2: 0.0,
            orth_residual: 0.0,
            leading_certified: false,
            method: METHOD_FALLBACK.into(),
            fallback_reason: Some(reason),
            fixed_point_residual: None,
            p: opts.p,
        };
        // The certificate concerns the RS continuation of u₁, which the
        // oracle path does not produce.
        let mut report = verify_solution(&self.a, e, report, &self.spectrum)?;
        report.leading_certified = false;
        Ok(report)
    }

    /// RS construction, falling back to the dense oracle (tagged
    /// `"oracle-fallback"`) when the construction's preconditions fail.
    pub fn solve(&self, e: &HermitianMatrix<T>, opts: &SolveOptions) -> Result<SolverReport<T>> {
        let part = self.partition(e)?;
        let mut cert = None;
        match self.rs_path(&part, opts, &mut cert) {
            Ok(report) => verify_solution(&self.a, e, report, &self.spectrum),
            Err(err) if opts.fallback && is_fallback_trigger(&err) => {
                self.oracle_report(e, opts, err.to_string(), cert)
            }
            Err(err) => Err(err),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{realize_spectrum, sample_goe, Seed, SpectrumSpec};
    use crate::matcore::{Matrix, Spectrum};
    use num_complex::Complex64;

    #[test]
    fn zero_noise_certified() {
        let s = RsSolver::<f64>::from_spectrum(Spectrum::new(vec![3.0, 2.0, 1.0]).unwrap());
        let r = s
            .solve(&HermitianMatrix::zeros(3), &SolveOptions::default())
            .unwrap();
        assert_eq!(r.method, METHOD_RS);
        assert_eq!(r.q, vec![0.0, 0.0]);
        assert_eq!(r.residual2, 0.0);
        assert_eq!(r.orth_residual, 0.0);
        assert!(r.leading_certified);
        assert_eq!(r.lambda_tilde, 3.0);
    }

    #[test]
    fn adversarial_swap_not_certified() {
        // E = (λ₁ − λ₂ + 0.1) u₂u₂*.
        let l = Spectrum::new(vec![3.0, 2.0, 1.0]).unwrap();
        let s = RsSolver::<f64>::from_spectrum(l);
        let mut m = Matrix::zeros(3, 3);
        m[(1, 1)] = 1.1;
        let e = HermitianMatrix::new(m).unwrap();
        let r = s.solve(&e, &SolveOptions::default()).unwrap();
        assert!(!r.leading_certified);
        assert_eq!(r.method, METHOD_FALLBACK);
        assert!((r.lambda_tilde - 3.1).abs() < 1e-12);
        // The RS answer continuing u₁ is λ̃ = 3, which is not the top eigenvalue.
        let rs = SolverReport {
            q: vec![0.0, 0.0],
            u_tilde: vec![1.0, 0.0, 0.0],
            lambda_tilde: 3.0,
            method: METHOD_RS.into(),
            fallback_reason: None,
            ..r
        };
        let v = verify_solution(&s.a, &e, rs, &s.spectrum).unwrap();
        assert!(!v.leading_certified);
        assert_eq!(v.residual2, 0.0);
    }

    #[test]
    fn random_instance_matches_oracle() {
        let l = realize_spectrum(&SpectrumSpec::multiscale(16, 1.0)).unwrap();
        let s = RsSolver::<f64>::from_spectrum(l);
        let e = sample_goe(16, Seed::new(10, 0));
        let r = s.solve(&e, &SolveOptions::default()).unwrap();
        assert_eq!(r.method, METHOD_RS);
        assert!(r.leading_certified);
        let at = s.a.add(&e);
        let (top, v) = top_eigenpair(&at).unwrap();
        assert!(1.0 - dot(&v, &r.u_tilde).abs() <= 1e-12);
        assert!((top - r.lambda_tilde).abs() <= 1e-9 * (1.0 + top.abs()));
        assert!(r.residual2 <= 1e-9 * crate::matcore::spectral_norm(at.matrix()).unwrap());
        assert!((r.lambda_tilde - at.quadratic_form(&r.u_tilde)).abs() <= 1e-11 * top.abs());
    }

    #[test]
    fn complex_noise() {
        let l = realize_spectrum(&SpectrumSpec::multiscale(12, 1.0)).unwrap();
        let s = RsSolver::<Complex64>::from_spectrum(l);
        let e = crate::ensembles::sample_gue(12, Seed::new(10, 1));
        let r = s.solve(&e, &SolveOptions::default()).unwrap();
        assert!(r.leading_certified, "{r:?}");
        let json = serde_json::to_string(&r).unwrap();
        let back: SolverReport<Complex64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.q.len(), 11);
    }

    #[test]
    fn large_noise_falls_back() {
        let l = Spectrum::new(vec![1.0, 0.9, 0.8, 0.7]).unwrap();
        let s = RsSolver::<f64>::from_spectrum(l);
        let e = sample_goe(4, Seed::new(1, 7)).scaled(5.0);
        let r = s.solve(&e, &SolveOptions::default()).unwrap();
        assert_eq!(r.method, METHOD_FALLBACK);
        assert!(r.fallback_reason.is_some());
        let strict = SolveOptions {
            fallback: false,
            ..SolveOptions::default()
        };
        assert!(s.solve(&e, &strict).is_err());
    }
}
