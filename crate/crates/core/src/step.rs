//! Positive step functions on the unit interval `[0, 1)`.
//!
//! These serve as Laplace test functions and as multiplicators acting on
//! discrete measures. Textual form: `v1@b0:b1,v2@b1:b2,...`, one segment per
//! piece, segments in increasing order and together covering `[0, 1)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Piecewise-constant function with strictly positive values.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// `breakpoints` must run strictly increasing from 0 to 1 and hold one
    /// more entry than `values`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(domain(format!(
                "step function needs n values and n+1 breakpoints, got {} and {}",
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(domain("step function breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("step function breakpoints must be strictly increasing"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!(
                    "step function value {v} on [{}, {}) is not finite and positive",
                    breakpoints[i],
                    breakpoints[i + 1]
                )));
            }
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c])
    }

    /// `n` equal-width pieces with the given values.
    pub fn uniform_grid(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let breakpoints = (0..=n).map(|i| i as f64 / n.max(1) as f64).collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at `x`, with `x` clamped into `[0, 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints[1..].partition_point(|&b| b <= x);
        self.values[i.min(self.values.len() - 1)]
    }

    /// Iterator over `(width, value)` pairs.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, &v)| (w[1] - w[0], v))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Lebesgue average `∫₀¹ f`.
    pub fn mean(&self) -> f64 {
        self.pieces().map(|(w, v)| w * v).sum()
    }

    /// `∫₀¹ ln f`.
    pub fn mean_log(&self) -> f64 {
        self.pieces().map(|(w, v)| w * v.ln()).sum()
    }

    /// Pointwise product on the common refinement of both breakpoint sets.
    pub fn product(&self, other: &StepFunction) -> StepFunction {
        let mut cuts: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let values = cuts
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.eval(mid) * other.eval(mid)
            })
            .collect();
        StepFunction { breakpoints: cuts, values }
    }

    pub fn scale(&self, c: f64) -> Result<StepFunction> {
        Self::new(self.breakpoints.clone(), self.values.iter().map(|v| v * c).collect())
    }

    pub fn recip(&self) -> StepFunction {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| 1.0 / v).collect(),
        }
    }

    /// Pointwise `2f − 1`, which stays positive only when `min f > 1/2`.
    pub fn doubled_minus_one(&self) -> Result<StepFunction> {
        Self::new(self.breakpoints.clone(), self.values.iter().map(|v| 2.0 * v - 1.0).collect())
    }
}

fn parse_number(text: &str, what: &str, segment: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("segment '{segment}': bad {what} '{}'", text.trim())))
}

impl FromStr for StepFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut breakpoints = vec![];
        let mut values = vec![];
        for raw in s.split(',') {
            let segment = raw.trim();
            if segment.is_empty() {
                return Err(Error::Parse(format!("empty segment in '{s}'")));
            }
            let (v, range) = segment
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("segment '{segment}' is not of the form v@lo:hi")))?;
            let (lo, hi) = range
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("segment '{segment}' is not of the form v@lo:hi")))?;
            let v = parse_number(v, "value", segment)?;
            let lo = parse_number(lo, "lower breakpoint", segment)?;
            let hi = parse_number(hi, "upper breakpoint", segment)?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse(format!("segment '{segment}': value must be positive")));
            }
            if !(lo < hi) {
                return Err(Error::Parse(format!("segment '{segment}': empty interval [{lo},{hi})")));
            }
            match breakpoints.last() {
                None if lo != 0.0 => {
                    return Err(Error::Parse(format!("gap at [0,{lo}): first segment must start at 0")));
                }
                Some(&prev) if lo > prev => {
                    return Err(Error::Parse(format!("gap at [{prev},{lo}) before segment '{segment}'")));
                }
                Some(&prev) if lo < prev => {
                    return Err(Error::Parse(format!("overlap at [{lo},{prev}) in segment '{segment}'")));
                }
                None => breakpoints.push(lo),
                Some(_) => {}
            }
            breakpoints.push(hi);
            values.push(v);
        }
        let last = *breakpoints.last().unwrap_or(&0.0);
        if last < 1.0 {
            return Err(Error::Parse(format!("gap at [{last},1): segments must reach 1")));
        }
        if last > 1.0 {
            return Err(Error::Parse(format!("segments extend past 1 (to {last})")));
        }
        StepFunction::new(breakpoints, values).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}@{}:{}", self.breakpoints[i], self.breakpoints[i + 1])?;
        }
        Ok(())
    }
}
