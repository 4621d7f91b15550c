//! Laplace transform `Ψ_θ(f) = ∫ e^{−⟨f, ξ⟩} dℒ^θ(ξ)` of the σ-finite
//! Lebesgue measure, its Monte Carlo estimate through gamma-process
//! importance weights, and the quasi-invariance and linear-functional checks
//! built on it.
//!
//! With `m = θ·(uniform on [0, 1))` the transform is
//! `Ψ_θ(f) = exp(−∫ ln f dm)`, so `f ≡ d` gives `d^{−θ}`.

use serde::Serialize;

use crate::error::{check_positive, Error, Result};
use crate::estimate::{run_streams, run_streams_multi, EstimatorResult, McConfig};
use crate::processes::{sample_gamma_process, SeriesTag};
use crate::special::log_gamma;
use crate::step::StepFunction;

/// `∫ ln f dm = θ Σ (bᵢ − bᵢ₋₁) ln dᵢ`.
pub fn log_mean(theta: f64, f: &StepFunction) -> Result<f64> {
    check_positive("theta", theta)?;
    Ok(theta * f.mean_log())
}

/// `φ(a) = exp(∫ ln a dm)`.
pub fn phi(theta: f64, a: &StepFunction) -> Result<f64> {
    Ok(log_mean(theta, a)?.exp())
}

/// `Ψ_θ(f) = exp(−∫ ln f dm)`.
pub fn analytic_laplace(theta: f64, f: &StepFunction) -> Result<f64> {
    Ok((-log_mean(theta, f)?).exp())
}

/// Monte Carlo settings shared by the Laplace estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceMc {
    pub mc: McConfig,
    pub eps: f64,
    /// Run even when the weighted second moment is infinite.
    pub allow_high_variance: bool,
}

fn check_variance(f: &StepFunction, allow: bool) -> Result<()> {
    if f.min() > 0.5 || allow {
        Ok(())
    } else {
        Err(Error::HighVariance(format!(
            "min f = {} <= 1/2 gives the weighted estimator infinite variance",
            f.min()
        )))
    }
}

/// Estimates `Ψ_θ(f)` as `E_Λ[exp(−Σ cₖ (f(xₖ) − 1))]` under the gamma process.
///
/// The estimator's second moment is `Ψ_θ(2f − 1)`, finite only when
/// `min f > 1/2`; other `f` are refused unless `allow_high_variance` is set.
pub fn mc_laplace(theta: f64, f: &StepFunction, cfg: &LaplaceMc) -> Result<EstimatorResult> {
    check_positive("theta", theta)?;
    check_variance(f, cfg.allow_high_variance)?;
    let seed = cfg.mc.seed;
    run_streams(&cfg.mc, |rng| {
        let s = sample_gamma_process(theta, cfg.eps, SeriesTag { seed, stream_id: 0 }, rng)?;
        let exponent: f64 = s.masses.iter().zip(&s.locations).map(|(c, &x)| c * (f.eval(x) - 1.0)).sum();
        Ok((-exponent).exp())
    })
}

/// Exact and Monte Carlo legs of the quasi-invariance identity
/// `Ψ(a·f)·φ(a) = Ψ(f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiInvarianceReport {
    pub phi_a: f64,
    pub analytic_f: f64,
    pub analytic_af: f64,
    /// `|Ψ(a·f)·φ(a) − Ψ(f)|`.
    pub analytic_residual: f64,
    pub mc_af: EstimatorResult,
    pub z_score: f64,
}

pub fn quasi_invariance_check(
    theta: f64,
    a: &StepFunction,
    f: &StepFunction,
    cfg: &LaplaceMc,
) -> Result<QuasiInvarianceReport> {
    let af = a.product(f);
    let phi_a = phi(theta, a)?;
    let analytic_f = analytic_laplace(theta, f)?;
    let analytic_af = analytic_laplace(theta, &af)?;
    let mc_af = mc_laplace(theta, &af, cfg)?;
    Ok(QuasiInvarianceReport {
        phi_a,
        analytic_f,
        analytic_af,
        analytic_residual: (analytic_af * phi_a - analytic_f).abs(),
        z_score: mc_af.z_score(analytic_af),
        mc_af,
    })
}

/// Weighted and exact `ℒ^θ`-mass of the window `{ξ : ⟨f, ξ⟩ ≤ t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowMass {
    pub t: f64,
    pub weighted: EstimatorResult,
    pub exact: f64,
    pub z_score: f64,
}

/// Exact `ℒ^θ`-mass of `{⟨f, ξ⟩ ≤ t}`.
///
/// Under `ℒ^θ` the functional `⟨f, ξ⟩` is distributed as
/// `e^{−∫ ln f dm}·L_θ`, where `L_θ` has density `x^{θ−1}/Γ(θ)`.
pub fn window_mass(theta: f64, f: &StepFunction, t: f64) -> Result<f64> {
    check_positive("window t", t)?;
    Ok((theta * t.ln() - log_gamma(theta + 1.0)? - log_mean(theta, f)?).exp())
}

/// Compares importance-weighted window masses `E_Λ[e^{Σcₖ} 1{⟨f,ξ⟩ ≤ t}]`
/// with [`window_mass`] for each `t` in `windows`.
pub fn functional_distribution_check(
    theta: f64,
    f: &StepFunction,
    windows: &[f64],
    cfg: &LaplaceMc,
) -> Result<Vec<WindowMass>> {
    check_positive("theta", theta)?;
    for &t in windows {
        check_positive("window t", t)?;
    }
    let seed = cfg.mc.seed;
    let weighted = run_streams_multi(&cfg.mc, windows.len(), |rng, out| {
        let s = sample_gamma_process(theta, cfg.eps, SeriesTag { seed, stream_id: 0 }, rng)?;
        let pairing = s.pair(f);
        let w = s.total_mass.unwrap_or(0.0).exp();
        for (o, &t) in out.iter_mut().zip(windows) {
            *o = if pairing <= t { w } else { 0.0 };
        }
        Ok(())
    })?;
    windows
        .iter()
        .zip(weighted)
        .map(|(&t, weighted)| {
            let exact = window_mass(theta, f, t)?;
            Ok(WindowMass { t, weighted, exact, z_score: weighted.z_score(exact) })
        })
        .collect()
}
