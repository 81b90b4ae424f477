//! Value types shared by learners, environments and the harness.
//!
//! Losses live in `[0, 1]^M` and are validated on construction; nothing is
//! ever clamped on ingestion. Weight vectors are points of the probability
//! simplex, checked against an absolute tolerance of `SIMPLEX_TOL` on the sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of a weight vector's sum from 1.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// One round of expert losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LossVector(Vec<f64>);

impl LossVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewExperts(values.len()));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(Error::LossOutOfRange { index, value });
        }
        Ok(LossVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for LossVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        LossVector::new(values)
    }
}

impl From<LossVector> for Vec<f64> {
    fn from(l: LossVector) -> Self {
        l.0
    }
}

/// A probability vector over the experts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_simplex(&values)?;
        Ok(WeightVector(values))
    }

    pub fn uniform(m: usize) -> Self {
        WeightVector(vec![1.0 / m as f64; m])
    }

    /// Wraps values that were normalized by the caller. Checked in debug builds.
    pub(crate) fn from_normalized(values: Vec<f64>) -> Self {
        debug_assert!(validate_simplex(&values).is_ok(), "{values:?}");
        WeightVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Checks that `w` is a probability vector: nonnegative entries summing to 1
/// within [`SIMPLEX_TOL`]. A negative entry is reported before a bad sum.
pub fn validate_simplex(w: &[f64]) -> Result<()> {
    if let Some(index) = w.iter().position(|&v| v < 0.0) {
        return Err(Error::NegativeWeight(index));
    }
    let sum: f64 = w.iter().sum();
    if sum.is_nan() || (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::NotNormalized(sum));
    }
    Ok(())
}

/// Loss suffered by the learner when playing `w` against `l`.
///
/// The dot product is clamped to `[min l, max l]`, which absorbs the rounding
/// slack allowed by [`SIMPLEX_TOL`].
pub fn mix_loss(w: &WeightVector, l: &LossVector) -> Result<f64> {
    if w.len() != l.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            actual: l.len(),
        });
    }
    let dot: f64 = w.values().iter().zip(l.values()).map(|(a, b)| a * b).sum();
    let (lo, hi) = l
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    Ok(dot.clamp(lo, hi))
}

/// Running per-expert loss totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeLoss {
    totals: Vec<f64>,
    rounds_seen: u64,
}

impl CumulativeLoss {
    pub fn zeros(m: usize) -> Self {
        CumulativeLoss {
            totals: vec![0.0; m],
            rounds_seen: 0,
        }
    }

    pub fn add(&mut self, l: &LossVector) -> Result<()> {
        if l.len() != self.totals.len() {
            return Err(Error::DimensionMismatch {
                expected: self.totals.len(),
                actual: l.len(),
            });
        }
        for (acc, x) in self.totals.iter_mut().zip(l.values()) {
            *acc += x;
        }
        self.rounds_seen += 1;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.totals.iter_mut().for_each(|x| *x = 0.0);
        self.rounds_seen = 0;
    }

    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn rounds_seen(&self) -> u64 {
        self.rounds_seen
    }

    pub fn experts(&self) -> usize {
        self.totals.len()
    }

    pub fn min(&self) -> f64 {
        self.totals.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// What happened in round `t`: the learner's loss and the expert losses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub t: u64,
    pub mix_loss: f64,
    pub losses: LossVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightVector>,
}
