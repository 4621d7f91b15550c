//! Mellin–Barnes functions `F_n(λ) = ∫_{Σxₖ=0} exp(−λ Σ e^{xₖ}) dx`, the
//! saddle equation `ψ(γ) = ln λ`, the rate function
//! `L(λ) = lim ln F_n(λ)/n = ln Γ(γ) − γ ln λ`, hypersphere Laplace
//! transforms and the divergence sweep over radius schedules.
//!
//! The measure on the hyperplane is Lebesgue measure in the first `n − 1`
//! coordinates. With that normalization `F_n` is the inverse Mellin
//! transform `(1/2πi) ∫ Γ(s)ⁿ λ^{−ns} ds` along any vertical line `Re s > 0`.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, domain, Error, Result};
use crate::quad::gauss_kronrod;
use crate::special::{digamma, log_gamma, log_gamma_complex, trigamma};

/// Largest dimension accepted by [`f_direct`].
pub const DIRECT_MAX_N: usize = 4;
/// Largest dimension accepted by the contour route.
pub const CONTOUR_MAX_N: usize = 200;

/// Integrand values below `e^{-DECAY}` of the peak are dropped.
const DECAY: f64 = 45.0;

/// `F_n(λ)` by nested adaptive quadrature over the free coordinates of the
/// hyperplane `Σ xₖ = 0`, for `n ≤ 4`.
pub fn f_direct(n: usize, lambda: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    if n == 0 || n > DIRECT_MAX_N {
        return Err(domain(format!("f_direct needs 1 <= n <= {DIRECT_MAX_N}, got {n}")));
    }
    if n == 1 {
        return Ok((-lambda).exp());
    }
    // Outside |xᵢ| ≤ R some coordinate exceeds R/(n−1), so the integrand
    // is below exp(−λ e^{R/(n−1)}) ≤ e^{−DECAY} times its peak e^{−nλ}.
    let big_r = (n - 1) as f64 * (n as f64 + DECAY / lambda).ln();
    let failure = Cell::new(None);
    let value = nested(n - 1, 0.0, 0.0, lambda, big_r, &failure);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

fn nested(free: usize, sum_x: f64, sum_exp: f64, lambda: f64, big_r: f64, failure: &Cell<Option<Error>>) -> f64 {
    let integrand = |x: f64| {
        if free == 1 {
            let s = sum_x + x;
            (-lambda * (sum_exp + x.exp() + (-s).exp())).exp()
        } else {
            nested(free - 1, sum_x + x, sum_exp + x.exp(), lambda, big_r, failure)
        }
    };
    let tol = if free == 1 { 1e-13 } else { 1e-11 };
    match gauss_kronrod(integrand, -big_r, big_r, 1e-300, tol) {
        Ok(q) => q.value,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    }
}

/// Solution of the saddle equation `ψ(γ) = ln λ` and the rate there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleSolution {
    pub lambda: f64,
    pub gamma: f64,
    /// `ln Γ(γ) − γ ln λ`, the limit of `ln F_n(λ)/n`.
    pub l_value: f64,
    /// `Γ(γ)/λ^γ`, the exponential of `l_value`.
    pub l_ratio: f64,
    /// `ψ′(γ)`.
    pub curvature: f64,
    /// `|ψ(γ) − ln λ|`.
    pub residual: f64,
}

/// Solves `ψ(γ) = ln λ` by bracketing and safeguarded Newton steps.
pub fn solve_saddle(lambda: f64) -> Result<SaddleSolution> {
    check_positive("lambda", lambda)?;
    let target = lambda.ln();
    let g = |x: f64| digamma(x).map(|d| d - target);
    let (mut lo, mut hi) = (1.0, 2.0);
    while g(lo)? > 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Numerical(format!("saddle bracket underflow for lambda {lambda}")));
        }
    }
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical(format!("saddle bracket overflow for lambda {lambda}")));
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = g(x)?;
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / trigamma(x)?;
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            x = next;
            break;
        }
        x = next;
    }
    let l_value = log_gamma(x)? - x * target;
    Ok(SaddleSolution {
        lambda,
        gamma: x,
        l_value,
        l_ratio: l_value.exp(),
        curvature: trigamma(x)?,
        residual: (digamma(x)? - target).abs(),
    })
}

/// `ln F_n(λ)` from the real form of the inverse Mellin integral,
/// `(1/π) ∫₀^∞ Re exp(n[ln Γ(c + it) − (c + it) ln λ]) dt`, on the line
/// `Re s = c` (the saddle point by default).
pub fn log_f_contour(n: usize, lambda: f64, abscissa: Option<f64>) -> Result<f64> {
    check_positive("lambda", lambda)?;
    if n == 0 || n > CONTOUR_MAX_N {
        return Err(domain(format!("contour route needs 1 <= n <= {CONTOUR_MAX_N}, got {n}")));
    }
    let c = match abscissa {
        Some(c) => {
            check_positive("abscissa", c)?;
            c
        }
        None => solve_saddle(lambda)?.gamma,
    };
    let nf = n as f64;
    let ln_lambda = lambda.ln();
    let lg_c = log_gamma(c)?;
    // integrand scaled by its value at t = 0
    let exponent = |t: f64| -> Result<Complex64> {
        let lg = log_gamma_complex(Complex64::new(c, t))?;
        Ok(nf * (lg - lg_c - Complex64::new(0.0, t * ln_lambda)))
    };
    let width = 1.0 / (nf * trigamma(c)?).sqrt();
    let mut cutoff = width;
    while exponent(cutoff)?.re > -DECAY {
        cutoff *= 1.5;
        if cutoff > 1e6 {
            return Err(Error::Numerical(format!("contour integrand of n={n} does not decay")));
        }
    }
    let failure = Cell::new(None);
    let integrand = |t: f64| match exponent(t) {
        Ok(z) => z.exp().re,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let q = gauss_kronrod(integrand, 0.0, cutoff, 1e-300, 1e-13);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let q = q?;
    if !(q.value > 0.0) {
        return Err(Error::Numerical(format!(
            "contour integral for n={n}, lambda={lambda}, abscissa={c} is not positive \
             (value {:e}, error {:e}, cutoff {cutoff})",
            q.value, q.error
        )));
    }
    Ok(nf * (lg_c - c * ln_lambda) + (q.value / PI).ln())
}

/// `F_n(λ)` by the contour route; see [`log_f_contour`].
pub fn f_contour(n: usize, lambda: f64, abscissa: Option<f64>) -> Result<f64> {
    Ok(log_f_contour(n, lambda, abscissa)?.exp())
}

/// One row of a limit study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub n: usize,
    pub ln_f_over_n: f64,
    /// `ln F_n/n − L(λ)`.
    pub gap: f64,
}

/// Convergence of `ln F_n(λ)/n` to `L(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitStudy {
    pub saddle: SaddleSolution,
    pub rows: Vec<LimitRow>,
    /// Limit extrapolated by least squares on `a + b ln n/n + c/n + d/n²`
    /// over `n ≥ 10`.
    pub extrapolated: f64,
    /// `extrapolated − L(λ)`.
    pub extrapolated_gap: f64,
    /// Least-squares `C` in `|gap| ≈ C ln n / n` over `n ≥ 5`.
    pub envelope_c: f64,
    /// Every `|gap|` with `n ≥ 5` lies within `ENVELOPE_SLACK · C ln n / n`.
    pub envelope_ok: bool,
    /// `|gap|` strictly decreasing from `n = 5` on.
    pub monotone: bool,
}

/// Slack factor on the fitted envelope.
pub const ENVELOPE_SLACK: f64 = 1.5;

/// Smallest `n` used by the limit fit.
const FIT_MIN_N: usize = 10;

pub fn l_limit_study(lambda: f64, n_max: usize) -> Result<LimitStudy> {
    if !(FIT_MIN_N + 4..=CONTOUR_MAX_N).contains(&n_max) {
        return Err(domain(format!("n_max must lie in [{}, {CONTOUR_MAX_N}]", FIT_MIN_N + 4)));
    }
    let saddle = solve_saddle(lambda)?;
    let rows: Vec<LimitRow> = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let v = log_f_contour(n, lambda, Some(saddle.gamma))? / n as f64;
            Ok(LimitRow { n, ln_f_over_n: v, gap: v - saddle.l_value })
        })
        .collect::<Result<_>>()?;
    let extrapolated = extrapolate(rows.iter().map(|r| (r.n, r.ln_f_over_n)))?;

    let tail: Vec<&LimitRow> = rows.iter().filter(|r| r.n >= 5).collect();
    let scale = |n: usize| (n as f64).ln() / n as f64;
    let (sxy, sxx) = tail.iter().fold((0.0, 0.0), |(a, b), r| {
        let x = scale(r.n);
        (a + x * r.gap.abs(), b + x * x)
    });
    let envelope_c = sxy / sxx;
    let envelope_ok = tail.iter().all(|r| r.gap.abs() <= ENVELOPE_SLACK * envelope_c * scale(r.n));
    let monotone = tail.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs());
    Ok(LimitStudy {
        saddle,
        extrapolated,
        extrapolated_gap: extrapolated - saddle.l_value,
        rows,
        envelope_c,
        envelope_ok,
        monotone,
    })
}

/// Least-squares limit of a sequence `(n, yₙ)` with corrections
/// `ln n/n`, `1/n` and `1/n²`, fitted on `n ≥ 10`.
pub fn extrapolate(points: impl IntoIterator<Item = (usize, f64)>) -> Result<f64> {
    let basis = |n: f64| [1.0, n.ln() / n, 1.0 / n, 1.0 / (n * n)];
    let mut ata = [[0.0; 4]; 4];
    let mut atb = [0.0; 4];
    let mut count = 0;
    for (n, y) in points {
        if n < FIT_MIN_N {
            continue;
        }
        let phi = basis(n as f64);
        for i in 0..4 {
            atb[i] += phi[i] * y;
            for j in 0..4 {
                ata[i][j] += phi[i] * phi[j];
            }
        }
        count += 1;
    }
    if count < 4 {
        return Err(domain("extrapolation needs at least four points with n >= 10"));
    }
    Ok(solve4(ata, atb)?[0])
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Result<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Numerical("singular least-squares system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let m = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Geometric mean `(∏ fₖ)^{1/n}`.
pub fn rho_geometric_mean(f: &[f64]) -> Result<f64> {
    if f.is_empty() {
        return Err(domain("geometric mean of an empty vector"));
    }
    let mut acc = 0.0;
    for (i, &v) in f.iter().enumerate() {
        check_positive(&format!("f_{}", i + 1), v)?;
        acc += v.ln();
    }
    Ok((acc / f.len() as f64).exp())
}

/// `ln D_n(f) = ln F_n(ρ_n(f)·r)` for the invariant measure on the
/// hypersphere of radius `r`.
pub fn log_d_n(f: &[f64], r: f64) -> Result<f64> {
    check_positive("radius", r)?;
    log_f_contour(f.len(), rho_geometric_mean(f)? * r, None)
}

pub fn d_n(f: &[f64], r: f64) -> Result<f64> {
    Ok(log_d_n(f, r)?.exp())
}

/// Radius `r_n` as a function of the dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusSchedule {
    Constant { scale: f64 },
    SqrtN { scale: f64 },
    /// Radii for `n = 1, 2, …` in order.
    Custom { radii: Vec<f64> },
}

impl RadiusSchedule {
    pub fn radius(&self, n: usize) -> Result<f64> {
        let r = match self {
            RadiusSchedule::Constant { scale } => *scale,
            RadiusSchedule::SqrtN { scale } => scale * (n as f64).sqrt(),
            RadiusSchedule::Custom { radii } => *radii
                .get(n.wrapping_sub(1))
                .ok_or_else(|| domain(format!("custom schedule has no radius for n = {n}")))?,
        };
        check_positive("radius", r)?;
        Ok(r)
    }
}

/// One row of the divergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub n: usize,
    pub r: f64,
    /// Saddle point at the effective argument `λ·r`.
    pub gamma: f64,
    /// `L(λ·r)`.
    pub l_value: f64,
    pub ln_d_over_n: f64,
    /// `ln D_n/n − L(λ·r)`.
    pub gap: f64,
}

/// Tabulates `ln D_n(f ≡ λ, r_n)/n` against `L(λ r_n)` over `ns`.
pub fn divergence_experiment(lambda: f64, schedule: &RadiusSchedule, ns: &[usize]) -> Result<Vec<DivergenceRow>> {
    check_positive("lambda", lambda)?;
    ns.par_iter()
        .map(|&n| {
            let r = schedule.radius(n)?;
            let saddle = solve_saddle(lambda * r)?;
            let v = log_f_contour(n, lambda * r, Some(saddle.gamma))? / n as f64;
            Ok(DivergenceRow { n, r, gamma: saddle.gamma, l_value: saddle.l_value, ln_d_over_n: v, gap: v - saddle.l_value })
        })
        .collect()
}

/// The unique `λ` with `L(λ) = 0`.
///
/// Along the saddle curve `L = ln Γ(γ) − γψ(γ)`, whose derivative in `γ` is
/// `−γψ′(γ) < 0`, so the zero is found by bisection in `γ`.
pub fn l_zero() -> Result<SaddleSolution> {
    let h = |g: f64| -> Result<f64> { Ok(log_gamma(g)? - g * digamma(g)?) };
    let (mut lo, mut hi) = (0.1, 10.0);
    if !(h(lo)? > 0.0 && h(hi)? < 0.0) {
        return Err(Error::Numerical("zero of L not bracketed".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    solve_saddle(digamma(0.5 * (lo + hi))?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_k0;

    #[test]
    fn direct_route_oracles() {
        assert_eq!(f_direct(1, 0.7).unwrap(), (-0.7f64).exp());
        for lambda in [0.5, 1.0, 2.0] {
            let want = 2.0 * bessel_k0(2.0 * lambda).unwrap();
            assert!((f_direct(2, lambda).unwrap() / want - 1.0).abs() < 1e-10);
        }
        // inverse Mellin transforms of Γ(s)³, Γ(s)⁴ (Meijer G, 30 digits)
        assert!((f_direct(3, 1.0).unwrap() / 0.164_041_606_748_376_07 - 1.0).abs() < 1e-8);
        assert!((f_direct(4, 2.0).unwrap() / 8.678_383_844_115_492e-4 - 1.0).abs() < 1e-8);
        assert!(f_direct(2, 1.0).unwrap() > f_direct(2, 1.1).unwrap());
        assert!(f_direct(5, 1.0).is_err());
        assert!(f_direct(2, 0.0).is_err());
    }

    #[test]
    fn saddle_examples() {
        let s = solve_saddle(1.0).unwrap();
        assert!((s.gamma - 1.461_632_144_968_362_3).abs() < 1e-12);
        assert!((s.l_value + 0.121_486_290_535_849_6).abs() < 1e-12);
        assert!((s.l_ratio - s.l_value.exp()).abs() < 1e-15);
        let s = solve_saddle(digamma(2.0).unwrap().exp()).unwrap();
        assert!((s.gamma - 2.0).abs() < 1e-12);
        assert!((s.l_value + 2.0 * digamma(2.0).unwrap()).abs() < 1e-12);
        let mut prev = 0.0;
        for k in -30..=30 {
            let lambda = 10f64.powf(k as f64 / 10.0);
            let s = solve_saddle(lambda).unwrap();
            assert!(s.residual <= 1e-12, "{lambda}: {}", s.residual);
            assert!(s.gamma > prev);
            prev = s.gamma;
        }
    }

    #[test]
    fn contour_matches_closed_forms() {
        assert!((f_contour(1, 1.0, None).unwrap() / (-1.0f64).exp() - 1.0).abs() < 1e-10);
        for lambda in [0.5, 1.0, 2.0] {
            let want = 2.0 * bessel_k0(2.0 * lambda).unwrap();
            assert!((f_contour(2, lambda, None).unwrap() / want - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn contour_shift_invariance() {
        for (n, lambda) in [(3, 0.5), (5, 1.0), (10, 2.0)] {
            let g = solve_saddle(lambda).unwrap().gamma;
            let base = log_f_contour(n, lambda, None).unwrap();
            for k in [0.8, 1.2, 1.5] {
                let shifted = log_f_contour(n, lambda, Some(k * g)).unwrap();
                assert!((shifted - base).abs() < 1e-8, "n={n} lambda={lambda} k={k}: {shifted} vs {base}");
            }
        }
    }

    #[test]
    fn geometric_mean_examples() {
        assert!((rho_geometric_mean(&[2.0, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert!((rho_geometric_mean(&[3.0; 5]).unwrap() - 3.0).abs() < 1e-15);
        assert!((rho_geometric_mean(&[1.0, 2.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(rho_geometric_mean(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn hypersphere_transform() {
        assert!((d_n(&[0.7], 2.0).unwrap() - (-1.4f64).exp()).abs() < 1e-10);
        let f = [0.5, 1.5, 2.0];
        let lhs = log_d_n(&f.map(|v| 3.0 * v), 1.0).unwrap();
        let rhs = log_d_n(&f, 3.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        assert!((d_n(&[1.3; 3], 1.0).unwrap() / f_direct(3, 1.3).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn l_is_decreasing_with_one_zero() {
        let z = l_zero().unwrap();
        assert!(z.l_value.abs() < 1e-12);
        let mut prev = f64::INFINITY;
        let mut sign_changes = 0;
        let mut prev_sign = true;
        for k in -20..=20 {
            let l = solve_saddle(10f64.powf(k as f64 / 10.0)).unwrap().l_value;
            assert!(l < prev);
            if k > -20 && (l > 0.0) != prev_sign {
                sign_changes += 1;
            }
            prev_sign = l > 0.0;
            prev = l;
        }
        assert_eq!(sign_changes, 1);
    }

    #[test]
    fn schedules() {
        assert_eq!(RadiusSchedule::Constant { scale: 2.0 }.radius(7).unwrap(), 2.0);
        assert_eq!(RadiusSchedule::SqrtN { scale: 2.0 }.radius(4).unwrap(), 4.0);
        let c = RadiusSchedule::Custom { radii: vec![1.0, 3.0] };
        assert_eq!(c.radius(2).unwrap(), 3.0);
        assert!(c.radius(3).is_err());
        assert!(c.radius(0).is_err());
        assert!(RadiusSchedule::Constant { scale: -1.0 }.radius(1).is_err());
    }
}
