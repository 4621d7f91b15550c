//! Characteristic functionals of uniform measures on spheres of radius `√n`
//! and their convergence to the Gaussian `exp(−‖s‖²/2)`.
//!
//! By rotation invariance the functional depends on `s` only through
//! `‖s‖`, and the first coordinate of a uniform point on the sphere of
//! radius `R` in `ℝⁿ` has density proportional to `(1 − r²)^{(n−3)/2}` in
//! `r = x₁/R`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{check_positive, domain, Result};
use crate::estimate::{run_streams, EstimatorResult, McConfig};
use crate::quad::tanh_sinh_tol;
use crate::special::{bessel_j, log_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereConfig {
    pub dim: usize,
    pub radius: f64,
}

impl SphereConfig {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(domain(format!("sphere dimension must be >= 2, got {dim}")));
        }
        check_positive("radius", radius)?;
        Ok(Self { dim, radius })
    }

    /// The sphere of radius `√n`.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(dim, (dim as f64).sqrt())
    }
}

fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut().take(dim) {
            *v = rng.sample(StandardNormal);
            norm2 += *v * *v;
        }
        if norm2 > 0.0 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Monte Carlo estimate of `∫ cos⟨s, x⟩ dω(x)` with `s = (‖s‖, 0, …, 0)`.
pub fn sphere_charfun_mc(cfg: &SphereConfig, s_norm: f64, mc: &McConfig) -> Result<EstimatorResult> {
    if !(s_norm >= 0.0 && s_norm.is_finite()) {
        return Err(domain(format!("|s| must be finite and >= 0, got {s_norm}")));
    }
    let dim = cfg.dim;
    run_streams(mc, |rng| {
        let mut x = vec![0.0; dim];
        unit_vector(dim, rng, &mut x);
        Ok((s_norm * cfg.radius * x[0]).cos())
    })
}

/// Same functional with `s` pointing in a fresh uniformly random direction
/// for every sample.
pub fn sphere_charfun_mc_random_direction(cfg: &SphereConfig, s_norm: f64, mc: &McConfig) -> Result<EstimatorResult> {
    if !(s_norm >= 0.0 && s_norm.is_finite()) {
        return Err(domain(format!("|s| must be finite and >= 0, got {s_norm}")));
    }
    let dim = cfg.dim;
    run_streams(mc, |rng| {
        let mut x = vec![0.0; dim];
        let mut u = vec![0.0; dim];
        unit_vector(dim, rng, &mut x);
        unit_vector(dim, rng, &mut u);
        let dot: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
        Ok((s_norm * cfg.radius * dot).cos())
    })
}

/// `∫₋₁¹ (1 − r²)^{(n−3)/2} cos(‖s‖ R r) dr`, normalized by its value at
/// `s = 0`; both integrals by tanh-sinh quadrature.
pub fn sphere_charfun_quad(cfg: &SphereConfig, s_norm: f64) -> Result<f64> {
    if !(s_norm >= 0.0 && s_norm.is_finite()) {
        return Err(domain(format!("|s| must be finite and >= 0, got {s_norm}")));
    }
    let k = (cfg.dim as f64 - 3.0) / 2.0;
    let weight = |da: f64, db: f64| (k * (da.ln() + db.ln())).exp();
    let norm = tanh_sinh_tol(|_, da, db| weight(da, db), -1.0, 1.0, 0.0, 1e-13)?.value;
    if s_norm == 0.0 {
        return Ok(1.0);
    }
    let w = s_norm * cfg.radius;
    let q = tanh_sinh_tol(|r, da, db| weight(da, db) * (w * r).cos(), -1.0, 1.0, 1e-15 * norm, 1e-12)?;
    Ok(q.value / norm)
}

/// Closed form `Γ(n/2) (2/w)^ν J_ν(w)` with `ν = (n − 2)/2`, `w = ‖s‖ R`.
pub fn sphere_charfun_bessel(cfg: &SphereConfig, s_norm: f64) -> Result<f64> {
    if !(s_norm >= 0.0 && s_norm.is_finite()) {
        return Err(domain(format!("|s| must be finite and >= 0, got {s_norm}")));
    }
    let w = s_norm * cfg.radius;
    if w == 0.0 {
        return Ok(1.0);
    }
    let nu = (cfg.dim as f64 - 2.0) / 2.0;
    let log_prefactor = log_gamma(cfg.dim as f64 / 2.0)? + nu * (2.0 / w).ln();
    Ok(log_prefactor.exp() * bessel_j(nu, w)?)
}

/// `exp(−‖s‖²/2)`.
pub fn gaussian_charfun(s_norm: f64) -> f64 {
    (-0.5 * s_norm * s_norm).exp()
}

/// Largest quadrature gap to the Gaussian over an `s` grid, for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpRow {
    pub n: usize,
    pub sup_gap: f64,
    pub argmax_s: f64,
}

/// `sup_s |sphere_charfun_quad(n, s) − exp(−s²/2)|` for each `n` in `n_list`
/// on spheres of radius `√n`.
pub fn mp_convergence_table(s_grid: &[f64], n_list: &[usize]) -> Result<Vec<MpRow>> {
    n_list
        .iter()
        .map(|&n| {
            let cfg = SphereConfig::standard(n)?;
            let mut row = MpRow { n, sup_gap: 0.0, argmax_s: 0.0 };
            for &s in s_grid {
                let gap = (sphere_charfun_quad(&cfg, s)? - gaussian_charfun(s)).abs();
                if gap > row.sup_gap {
                    row = MpRow { n, sup_gap: gap, argmax_s: s };
                }
            }
            Ok(row)
        })
        .collect()
}

/// `count` equally spaced points on `[0, s_max]`.
pub fn s_grid(s_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(s_max > 0.0 && s_max.is_finite()) || count < 2 {
        return Err(domain("s grid needs s_max > 0 and at least two points"));
    }
    Ok((0..count).map(|i| s_max * i as f64 / (count - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_charfun(0.0), 1.0);
        assert!((gaussian_charfun(1.0) - (-0.5f64).exp()).abs() < 1e-16);
        assert!((gaussian_charfun(2f64.sqrt()) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn three_dimensional_hat_box() {
        let cfg = SphereConfig::standard(3).unwrap();
        for s in [0.3, 1.0, 2.0, 5.0] {
            let w = 3f64.sqrt() * s;
            assert!((sphere_charfun_quad(&cfg, s).unwrap() - w.sin() / w).abs() < 1e-12, "{s}");
        }
        assert_eq!(sphere_charfun_quad(&cfg, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn quadrature_matches_bessel_form() {
        // the prefactor amplifies absolute Bessel errors once J is deep in its tail
        for n in [2, 3, 4, 10, 30] {
            let cfg = SphereConfig::standard(n).unwrap();
            for s in [0.5, 1.0, 2.0, 3.0] {
                let q = sphere_charfun_quad(&cfg, s).unwrap();
                let b = sphere_charfun_bessel(&cfg, s).unwrap();
                assert!((q - b).abs() < 1e-9, "n={n} s={s}: {q} vs {b}");
            }
        }
        let cfg = SphereConfig::standard(2).unwrap();
        let j0 = bessel_j(0.0, 2f64.sqrt() * 1.7).unwrap();
        assert!((sphere_charfun_quad(&cfg, 1.7).unwrap() - j0).abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_matches_quadrature() {
        let mc = McConfig::new(40_000, 9, 4).unwrap();
        for n in [3, 10] {
            let cfg = SphereConfig::standard(n).unwrap();
            let q = sphere_charfun_quad(&cfg, 1.0).unwrap();
            assert!(sphere_charfun_mc(&cfg, 1.0, &mc).unwrap().covers(q, 4.0));
            assert!(sphere_charfun_mc_random_direction(&cfg, 1.0, &mc).unwrap().covers(q, 4.0));
        }
        let r = sphere_charfun_mc(&SphereConfig::standard(5).unwrap(), 0.0, &mc).unwrap();
        assert_eq!((r.estimate, r.stderr), (1.0, 0.0));
    }

    #[test]
    fn config_validation() {
        assert!(SphereConfig::new(1, 1.0).is_err());
        assert!(SphereConfig::new(3, 0.0).is_err());
        assert!(s_grid(3.0, 1).is_err());
        assert_eq!(s_grid(3.0, 4).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
    }
}
