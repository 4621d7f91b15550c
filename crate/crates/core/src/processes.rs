//! Samplers for stick-breaking (GEM) sequences, Poisson–Dirichlet masses,
//! the Dirichlet and gamma processes on `X = [0, 1)`, importance weights for
//! the σ-finite Lebesgue measure `ℒ^θ`, the multiplicative action of positive
//! step functions, and partition sums by random marking.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::densities::{box_mass_l, PartitionSpec};
use crate::error::{check_positive, domain, Error, Result};
use crate::estimate::{run_streams_multi, EstimatorResult, McConfig};
use crate::rng::{open_unit, sample_gamma_variate};
use crate::step::StepFunction;

/// Default truncation tolerance on the discarded stick mass.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Sticks `y₁, y₂, …` of one stick-breaking draw and the mass left unbroken.
#[derive(Debug, Clone, PartialEq)]
pub struct GemDraw {
    sticks: Vec<f64>,
    residual: f64,
}

impl GemDraw {
    /// Validates the sticks and computes the residual `∏(1 − yⱼ)`.
    pub fn new(sticks: Vec<f64>) -> Result<Self> {
        if sticks.iter().any(|&y| !(y > 0.0 && y < 1.0)) {
            return Err(domain("sticks must lie in (0, 1)"));
        }
        let residual = sticks.iter().map(|y| 1.0 - y).product();
        Ok(Self { sticks, residual })
    }

    pub fn sticks(&self) -> &[f64] {
        &self.sticks
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// Stick count after which [`sample_gem`] gives up; far beyond any
/// realistic draw (the expected count is `ln(1/eps) / ln(1 + 1/θ)`).
fn stick_cap(theta: f64, eps: f64) -> usize {
    let expected = (1.0 / eps).ln() / (1.0 / theta).ln_1p();
    (50.0 * expected + 10_000.0).min(1e8) as usize
}

/// Draws sticks until the unbroken mass falls to `eps` or below.
///
/// Each stick is an independent Beta(1, θ) fraction, `y = 1 − U^{1/θ}`, so
/// the broken masses form a GEM(θ) sequence and their decreasing
/// rearrangement is PD(θ). The complement `U^{1/θ}` has density `θx^{θ−1}`.
pub fn sample_gem<R: Rng + ?Sized>(theta: f64, eps: f64, rng: &mut R) -> Result<GemDraw> {
    check_positive("theta", theta)?;
    check_eps(eps)?;
    let log_eps = eps.ln();
    let cap = stick_cap(theta, eps);
    let mut sticks = Vec::new();
    let mut log_residual = 0.0;
    while log_residual > log_eps {
        // ln(1 − y) = ln(U)/θ, kept in log space so tiny sticks stay exact
        let log_keep = open_unit(rng).ln() / theta;
        let y = -log_keep.exp_m1();
        if y <= 0.0 || y >= 1.0 {
            continue;
        }
        sticks.push(y);
        log_residual += log_keep;
        if sticks.len() > cap {
            return Err(Error::Numerical(format!(
                "stick-breaking did not reach residual {eps} after {cap} sticks"
            )));
        }
    }
    Ok(GemDraw { sticks, residual: log_residual.exp() })
}

/// Masses `cᵢ = yᵢ ∏_{j<i} (1 − yⱼ)` in stick order.
pub fn stick_break(draw: &GemDraw) -> Vec<f64> {
    let mut keep = 1.0;
    draw.sticks
        .iter()
        .map(|&y| {
            let c = y * keep;
            keep *= 1.0 - y;
            c
        })
        .collect()
}

/// Stable sort into non-increasing order.
pub fn sort_decreasing(mut masses: Vec<f64>) -> Vec<f64> {
    masses.sort_by(|a, b| b.total_cmp(a));
    masses
}

/// Truncated discrete measure `Σ cₖ δ_{xₖ}` on `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtomSeries {
    pub theta: f64,
    pub eps: f64,
    /// Non-increasing positive masses.
    pub masses: Vec<f64>,
    pub locations: Vec<f64>,
    /// Total mass for points of the cone; `None` for normalized series.
    pub total_mass: Option<f64>,
    /// Upper bound on the mass dropped by truncation.
    pub tail_bound: f64,
    /// Log importance weight; zero for draws from a probability law.
    pub log_weight: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl WeightedAtomSeries {
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Sum of the retained masses.
    pub fn retained_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Pairing `⟨f, ξ⟩ = Σ cₖ f(xₖ)` over the retained atoms.
    pub fn pair(&self, f: &StepFunction) -> f64 {
        self.masses.iter().zip(&self.locations).map(|(c, &x)| c * f.eval(x)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serializes")
    }
}

/// Seed and stream recorded on sampled series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SeriesTag {
    pub seed: u64,
    pub stream_id: u64,
}

/// A draw of the Dirichlet process `D^θ`: PD(θ) masses with i.i.d. uniform
/// locations.
pub fn sample_dirichlet_process<R: Rng + ?Sized>(
    theta: f64,
    eps: f64,
    tag: SeriesTag,
    rng: &mut R,
) -> Result<WeightedAtomSeries> {
    let draw = sample_gem(theta, eps, rng)?;
    let masses = sort_decreasing(stick_break(&draw));
    let locations = (0..masses.len()).map(|_| rng.random::<f64>()).collect();
    Ok(WeightedAtomSeries {
        theta,
        eps,
        masses,
        locations,
        total_mass: None,
        tail_bound: draw.residual,
        log_weight: 0.0,
        seed: tag.seed,
        stream_id: tag.stream_id,
    })
}

/// A draw of the gamma process `Λ^θ`: a Dirichlet-process draw scaled by an
/// independent gamma(θ) total mass.
pub fn sample_gamma_process<R: Rng + ?Sized>(
    theta: f64,
    eps: f64,
    tag: SeriesTag,
    rng: &mut R,
) -> Result<WeightedAtomSeries> {
    let mut s = sample_dirichlet_process(theta, eps, tag, rng)?;
    let total = sample_gamma_variate(theta, rng)?;
    s.masses.iter_mut().for_each(|c| *c *= total);
    s.tail_bound *= total;
    s.total_mass = Some(total);
    Ok(s)
}

/// Log density `dℒ^θ / dΛ^θ` at a gamma-process draw: its total mass.
pub fn lebesgue_log_weight(series: &WeightedAtomSeries) -> Result<f64> {
    series
        .total_mass
        .ok_or_else(|| domain("the Lebesgue weight needs a series with a total mass"))
}

/// Gamma-process draw carrying its `ℒ^θ` importance weight.
pub fn sample_lebesgue_weighted<R: Rng + ?Sized>(
    theta: f64,
    eps: f64,
    tag: SeriesTag,
    rng: &mut R,
) -> Result<WeightedAtomSeries> {
    let mut s = sample_gamma_process(theta, eps, tag, rng)?;
    s.log_weight = lebesgue_log_weight(&s)?;
    Ok(s)
}

/// Multiplies each mass by `a` at its location and re-sorts the atoms.
///
/// The truncated tail is bounded by `max a` times the old bound; the total
/// mass moves the tail at the average rate of `a`, the expected effect on
/// atoms with uniform locations.
pub fn apply_multiplicator(a: &StepFunction, series: &WeightedAtomSeries) -> WeightedAtomSeries {
    let mut atoms: Vec<(f64, f64)> = series
        .masses
        .iter()
        .zip(&series.locations)
        .map(|(&c, &x)| (a.eval(x) * c, x))
        .collect();
    atoms.sort_by(|p, q| q.0.total_cmp(&p.0));
    let (masses, locations): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
    let total_mass = series.total_mass.map(|t| {
        let old_tail = (t - series.retained_mass()).max(0.0);
        masses.iter().sum::<f64>() + old_tail * a.mean()
    });
    WeightedAtomSeries {
        masses,
        locations,
        total_mass,
        tail_bound: series.tail_bound * a.max(),
        ..series.clone()
    }
}

/// Assigns each atom independently to part `i` with probability `θᵢ/θ` and
/// returns the part sums of the masses. The truncated tail is not assigned.
pub fn partition_sums<R: Rng + ?Sized>(
    series: &WeightedAtomSeries,
    spec: &PartitionSpec,
    rng: &mut R,
) -> Vec<f64> {
    let n = spec.len();
    let mut sums = vec![0.0; n];
    if n == 1 {
        sums[0] = series.retained_mass();
        return sums;
    }
    let mut cumulative = spec.probabilities();
    for i in 1..n {
        cumulative[i] += cumulative[i - 1];
    }
    for &c in &series.masses {
        let u = rng.random::<f64>();
        let part = cumulative[..n - 1].partition_point(|&p| p <= u);
        sums[part] += c;
    }
    sums
}

/// Masses aggregated over the intervals `[bᵢ, bᵢ₊₁)` of a partition of
/// `[0, 1)` given by its increasing breakpoints `0 = b₀ < … < bₙ = 1`.
pub fn aggregate_by_location(series: &WeightedAtomSeries, breakpoints: &[f64]) -> Result<Vec<f64>> {
    if breakpoints.len() < 2
        || breakpoints[0] != 0.0
        || *breakpoints.last().unwrap() != 1.0
        || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(domain("breakpoints must increase strictly from 0 to 1"));
    }
    let n = breakpoints.len() - 1;
    let mut sums = vec![0.0; n];
    for (&c, &x) in series.masses.iter().zip(&series.locations) {
        let i = breakpoints[1..n].partition_point(|&b| b <= x);
        sums[i] += c;
    }
    Ok(sums)
}

/// Breakpoints splitting `[0, 1)` into intervals of lengths `θᵢ/θ`.
pub fn proportional_breakpoints(spec: &PartitionSpec) -> Vec<f64> {
    let mut bps = vec![0.0];
    let mut acc = 0.0;
    for p in spec.probabilities() {
        acc += p;
        bps.push(acc);
    }
    *bps.last_mut().unwrap() = 1.0;
    bps
}

/// Importance-weighted and exact `L_θ̄`-mass of the box `[0, b]ⁿ` of
/// partition sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxMassEstimate {
    pub b: f64,
    pub weighted: EstimatorResult,
    pub exact: f64,
    pub z_score: f64,
}

/// Estimates `E_Λ[e^{Σcₖ} 1{all partition sums ≤ b}]` for each `b`, one set
/// of gamma-process draws serving every box. The weight is bounded by
/// `e^{nb}` on the event, so the estimator has finite variance.
pub fn weighted_box_mass(
    spec: &PartitionSpec,
    boxes: &[f64],
    eps: f64,
    mc: &McConfig,
) -> Result<Vec<BoxMassEstimate>> {
    for &b in boxes {
        check_positive("box side b", b)?;
    }
    let theta = spec.theta();
    let weighted = run_streams_multi(mc, boxes.len(), |rng, out| {
        let s = sample_lebesgue_weighted(theta, eps, SeriesTag::default(), rng)?;
        let sums = partition_sums(&s, spec, rng);
        let largest = sums.iter().copied().fold(0.0, f64::max);
        let w = s.log_weight.exp();
        for (o, &b) in out.iter_mut().zip(boxes) {
            *o = if largest <= b { w } else { 0.0 };
        }
        Ok(())
    })?;
    boxes
        .iter()
        .zip(weighted)
        .map(|(&b, weighted)| {
            let exact = box_mass_l(spec, b)?;
            Ok(BoxMassEstimate { b, weighted, exact, z_score: weighted.z_score(exact) })
        })
        .collect()
}
