//! Finite-dimensional log-densities of the Dirichlet, gamma and σ-finite
//! Lebesgue systems attached to a partition with masses `θ₁, …, θₙ`, and
//! checks of their structural identities.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, domain, Error, Result};
use crate::quad;
use crate::special::log_gamma;

/// Part masses `θ₁, …, θₙ` of a partition of the base space, with `θ = Σ θᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    weights: Vec<f64>,
    theta: f64,
}

impl PartitionSpec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(domain("partition needs at least one part"));
        }
        for (i, &w) in weights.iter().enumerate() {
            check_positive(&format!("theta_{}", i + 1), w)?;
        }
        let theta = weights.iter().sum();
        Ok(Self { weights, theta })
    }

    /// A single part carrying all of `θ`.
    pub fn single(theta: f64) -> Result<Self> {
        Self::new(vec![theta])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `θᵢ / θ`, the probability that an atom falls into part `i`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.theta).collect()
    }
}

/// A point of the standard simplex `{u : uᵢ ≥ 0, Σ uᵢ = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(domain("simplex point needs at least one coordinate"));
        }
        if coords.iter().any(|&c| !(c.is_finite() && c >= 0.0)) {
            return Err(domain("simplex coordinates must be finite and >= 0"));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(domain(format!("simplex coordinates sum to {sum}, not 1")));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// A point of the open orthant: every coordinate strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthantPoint(Vec<f64>);

impl OrthantPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(domain("orthant point needs at least one coordinate"));
        }
        for (i, &c) in coords.iter().enumerate() {
            check_positive(&format!("x_{}", i + 1), c)?;
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

fn check_dims(spec: &PartitionSpec, n: usize) -> Result<()> {
    if spec.len() != n {
        return Err(domain(format!(
            "dimension mismatch: partition has {} parts, point has {n} coordinates",
            spec.len()
        )));
    }
    Ok(())
}

fn log_normalizers(spec: &PartitionSpec) -> Result<f64> {
    spec.weights().iter().map(|&w| log_gamma(w)).sum()
}

/// Log-density of the Dirichlet law `D^θ̄` on the simplex.
///
/// The reference measure is Lebesgue measure in the first `n − 1`
/// coordinates, so the uniform case `θ̄ = (1, …, 1)` has density `Γ(n)`.
/// A zero coordinate with `θᵢ < 1` is a [`Error::Singularity`]; with
/// `θᵢ > 1` the density vanishes and `-∞` is returned.
pub fn dirichlet_log_density(spec: &PartitionSpec, u: &SimplexPoint) -> Result<f64> {
    check_dims(spec, u.coords().len())?;
    let mut acc = log_gamma(spec.theta())? - log_normalizers(spec)?;
    for (i, (&w, &c)) in spec.weights().iter().zip(u.coords()).enumerate() {
        if c == 0.0 {
            if w < 1.0 {
                return Err(Error::Singularity(format!(
                    "Dirichlet density unbounded at u_{} = 0 (theta_{} = {w} < 1)",
                    i + 1,
                    i + 1
                )));
            } else if w > 1.0 {
                return Ok(f64::NEG_INFINITY);
            }
            continue;
        }
        acc += (w - 1.0) * c.ln();
    }
    Ok(acc)
}

/// Log-density of the one-dimensional gamma law with shape `theta`, unit scale.
pub fn gamma_1d_log_density(theta: f64, x: f64) -> Result<f64> {
    check_positive("theta", theta)?;
    check_positive("x", x)?;
    Ok((theta - 1.0) * x.ln() - x - log_gamma(theta)?)
}

/// Log-density of the product gamma law `λ^θ̄` on the orthant.
pub fn gamma_log_density(spec: &PartitionSpec, x: &OrthantPoint) -> Result<f64> {
    check_dims(spec, x.coords().len())?;
    let mut acc = -log_normalizers(spec)?;
    for (&w, &c) in spec.weights().iter().zip(x.coords()) {
        acc += (w - 1.0) * c.ln() - c;
    }
    Ok(acc)
}

/// Log-density of the σ-finite product measure `L_θ̄` with density
/// `∏ xᵢ^{θᵢ−1} / Γ(θᵢ)`; equals [`gamma_log_density`] plus `Σ xᵢ`.
pub fn lebesgue_log_density(spec: &PartitionSpec, x: &OrthantPoint) -> Result<f64> {
    check_dims(spec, x.coords().len())?;
    let mut acc = -log_normalizers(spec)?;
    for (&w, &c) in spec.weights().iter().zip(x.coords()) {
        acc += (w - 1.0) * c.ln();
    }
    Ok(acc)
}

/// Exact `L_θ̄`-mass of the box `[0, b]ⁿ`: `∏ b^{θᵢ} / Γ(θᵢ + 1)`.
pub fn box_mass_l(spec: &PartitionSpec, b: f64) -> Result<f64> {
    check_positive("box side b", b)?;
    let mut log_mass = 0.0;
    for &w in spec.weights() {
        log_mass += w * b.ln() - log_gamma(w + 1.0)?;
    }
    Ok(log_mass.exp())
}

/// Evaluation grid for [`semigroup_convolution_check`]: `points` equally
/// spaced values of `z` in `(0, z_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionGrid {
    pub z_max: f64,
    pub points: usize,
}

impl Default for ConvolutionGrid {
    fn default() -> Self {
        Self { z_max: 5.0, points: 50 }
    }
}

/// Largest absolute deviation between the numerical convolution
/// `(L_{θ₁} * L_{θ₂})(z)` and the density `z^{θ₁+θ₂−1} / Γ(θ₁+θ₂)` over the grid.
pub fn semigroup_convolution_check(theta1: f64, theta2: f64, grid: ConvolutionGrid) -> Result<f64> {
    check_positive("theta1", theta1)?;
    check_positive("theta2", theta2)?;
    if !(grid.z_max >= 5.0 && grid.z_max.is_finite()) || grid.points == 0 {
        return Err(domain("convolution grid must cover [0, z_max] with z_max >= 5"));
    }
    let norm = log_gamma(theta1)? + log_gamma(theta2)?;
    let target_norm = log_gamma(theta1 + theta2)?;
    let mut worst = 0.0_f64;
    for k in 1..=grid.points {
        let z = grid.z_max * k as f64 / grid.points as f64;
        let conv = quad::tanh_sinh_endpoints(
            |_, x, zx| ((theta1 - 1.0) * x.ln() + (theta2 - 1.0) * zx.ln() - norm).exp(),
            0.0,
            z,
            1e-14,
        )?;
        let exact = ((theta1 + theta2 - 1.0) * z.ln() - target_norm).exp();
        worst = worst.max((conv.value - exact).abs());
    }
    Ok(worst)
}

/// Pointwise residual of the decomposition `λ^θ̄ = D^θ̄ × λ^θ` in cone
/// coordinates `s = Σ xᵢ`, `u = x / s`; the factor `s^{n−1}` is the
/// Jacobian of `x ↦ (u, s)`.
pub fn cone_decomposition_check(spec: &PartitionSpec, x: &OrthantPoint) -> Result<f64> {
    check_dims(spec, x.coords().len())?;
    let s = x.sum();
    let n = x.coords().len();
    let mut u: Vec<f64> = x.coords().iter().map(|c| c / s).collect();
    // renormalize so the simplex check sees an exact unit sum up to rounding
    let total: f64 = u.iter().sum();
    u.iter_mut().for_each(|c| *c /= total);
    let u = SimplexPoint::new(u)?;
    let lhs = gamma_log_density(spec, x)?;
    let rhs = dirichlet_log_density(spec, &u)? + gamma_1d_log_density(spec.theta(), s)?
        - (n as f64 - 1.0) * s.ln();
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(w: &[f64]) -> PartitionSpec {
        PartitionSpec::new(w.to_vec()).unwrap()
    }

    fn pt(x: &[f64]) -> OrthantPoint {
        OrthantPoint::new(x.to_vec()).unwrap()
    }

    #[test]
    fn constructors_validate() {
        assert!(PartitionSpec::new(vec![]).is_err());
        assert!(PartitionSpec::new(vec![1.0, 0.0]).is_err());
        assert!(PartitionSpec::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(spec(&[0.5, 1.5]).theta(), 2.0);
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![-0.1, 1.1]).is_err());
        assert!(OrthantPoint::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let u = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        assert!(dirichlet_log_density(&spec(&[1.0, 1.0]), &u).unwrap().abs() < 1e-14);
        let half = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        assert!(dirichlet_log_density(&spec(&[2.0, 1.0]), &half).unwrap().abs() < 1e-14);
        let uniform3 = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let got = dirichlet_log_density(&spec(&[1.0, 1.0, 1.0]), &uniform3).unwrap();
        assert!((got - 2.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_boundary_and_dimension_errors() {
        let edge = SimplexPoint::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            dirichlet_log_density(&spec(&[0.5, 0.5]), &edge),
            Err(Error::Singularity(_))
        ));
        assert_eq!(
            dirichlet_log_density(&spec(&[2.0, 1.0]), &edge).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(dirichlet_log_density(&spec(&[1.0, 2.0]), &edge).unwrap().is_finite());
        let u3 = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(dirichlet_log_density(&spec(&[1.0, 1.0]), &u3), Err(Error::Domain(_))));
    }

    #[test]
    fn dirichlet_normalizes_in_one_and_two_dimensions() {
        for w in [[0.5, 0.5], [1.0, 1.0], [2.5, 0.7], [0.3, 4.0]] {
            let s = spec(&w);
            let q = quad::tanh_sinh_endpoints(
                |_, a, b| {
                    let u = SimplexPoint::new(vec![a, b]).unwrap();
                    dirichlet_log_density(&s, &u).unwrap().exp()
                },
                0.0,
                1.0,
                1e-12,
            )
            .unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "{w:?}: {}", q.value);
        }
        for w in [[1.0, 1.0, 1.0], [0.6, 1.3, 2.0], [2.0, 3.0, 1.0]] {
            let s = spec(&w);
            let outer = quad::tanh_sinh_endpoints(
                |u1, _, rest| {
                    quad::tanh_sinh_endpoints(
                        |_, u2, u3| {
                            let p = SimplexPoint::new(vec![u1, u2, u3]).ok();
                            p.map_or(0.0, |p| dirichlet_log_density(&s, &p).unwrap().exp())
                        },
                        0.0,
                        rest,
                        1e-10,
                    )
                    .map_or(f64::NAN, |q| q.value)
                },
                0.0,
                1.0,
                1e-9,
            )
            .unwrap();
            assert!((outer.value - 1.0).abs() < 1e-6, "{w:?}: {}", outer.value);
        }
    }

    #[test]
    fn gamma_examples_and_normalization() {
        assert!((gamma_log_density(&spec(&[1.0]), &pt(&[3.5])).unwrap() + 3.5).abs() < 1e-14);
        let two = gamma_log_density(&spec(&[1.0, 1.0]), &pt(&[0.4, 2.0])).unwrap();
        assert!((two + 2.4).abs() < 1e-14);
        let got = gamma_log_density(&spec(&[2.5, 0.7]), &pt(&[1.0, 1.0])).unwrap();
        let want = -2.0 - log_gamma(2.5).unwrap() - log_gamma(0.7).unwrap();
        assert!((got - want).abs() < 1e-14);
        for w in [0.3, 1.0, 2.5, 7.0] {
            let q = quad::tanh_sinh(|x| gamma_1d_log_density(w, x).unwrap().exp(), 0.0, 40.0, 1e-12)
                .unwrap();
            assert!((q.value - 1.0).abs() < 1e-6, "shape {w}: {}", q.value);
        }
    }

    #[test]
    fn lebesgue_examples() {
        for x in [0.1, 1.0, 17.0] {
            assert!(lebesgue_log_density(&spec(&[1.0]), &pt(&[x])).unwrap().abs() < 1e-14);
        }
        assert!(lebesgue_log_density(&spec(&[1.0, 1.0]), &pt(&[3.0, 0.2])).unwrap().abs() < 1e-14);
        let got = lebesgue_log_density(&spec(&[0.5, 1.5]), &pt(&[4.0, 1.0])).unwrap();
        let want = -0.5 * 4.0_f64.ln() - log_gamma(0.5).unwrap() - log_gamma(1.5).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn box_mass_examples() {
        assert!((box_mass_l(&spec(&[1.0]), 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((box_mass_l(&spec(&[1.0, 1.0]), 2.0).unwrap() - 4.0).abs() < 1e-13);
        let q = quad::tanh_sinh(
            |x| lebesgue_log_density(&spec(&[0.5]), &pt(&[x])).unwrap().exp(),
            0.0,
            1.0,
            1e-13,
        )
        .unwrap();
        let got = box_mass_l(&spec(&[0.5]), 1.0).unwrap();
        assert!((got - q.value).abs() < 1e-12);
        assert!((got - 1.0 / log_gamma(1.5).unwrap().exp()).abs() < 1e-14);
        assert!(box_mass_l(&spec(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn semigroup_examples() {
        let grid = ConvolutionGrid::default();
        assert!(semigroup_convolution_check(1.0, 1.0, grid).unwrap() < 1e-12);
        assert!(semigroup_convolution_check(0.5, 0.5, grid).unwrap() < 1e-8);
        assert!(semigroup_convolution_check(2.0, 3.0, grid).unwrap() < 1e-8);
        assert!(semigroup_convolution_check(0.3, 1.7, grid).unwrap() < 1e-8);
        assert!(semigroup_convolution_check(1.0, 1.0, ConvolutionGrid { z_max: 2.0, points: 5 }).is_err());
    }

    #[test]
    fn cone_decomposition_hand_example_and_one_dimension() {
        let r = cone_decomposition_check(&spec(&[1.0, 1.0]), &pt(&[1.0, 1.0])).unwrap();
        assert!(r < 1e-14);
        let r = cone_decomposition_check(&spec(&[2.7]), &pt(&[0.9])).unwrap();
        assert!(r < 1e-14);
    }

    proptest! {
        #[test]
        fn reweighting_identity(
            w in prop::collection::vec(0.05f64..6.0, 1..6),
            xs in prop::collection::vec(1e-3f64..30.0, 6),
        ) {
            let s = PartitionSpec::new(w.clone()).unwrap();
            let x = OrthantPoint::new(xs[..w.len()].to_vec()).unwrap();
            let diff = lebesgue_log_density(&s, &x).unwrap() - gamma_log_density(&s, &x).unwrap();
            prop_assert!((diff - x.sum()).abs() <= 1e-12 * (1.0 + x.sum()));
        }

        #[test]
        fn cone_decomposition_random_points(
            w in prop::collection::vec(0.05f64..6.0, 1..7),
            xs in prop::collection::vec(1e-3f64..30.0, 6),
        ) {
            let s = PartitionSpec::new(w.clone()).unwrap();
            let x = OrthantPoint::new(xs[..w.len()].to_vec()).unwrap();
            prop_assert!(cone_decomposition_check(&s, &x).unwrap() <= 1e-10);
        }
    }
}
