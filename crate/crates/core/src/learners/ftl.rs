use crate::error::Result;
use crate::learners::{Learner, LearnerId, RoundClock};
use crate::types::{CumulativeLoss, LossVector, WeightVector};

/// Uniform distribution over `argmin_i L_i`.
///
/// Ties are resolved by splitting the mass evenly, which is the expectation
/// of uniform random tie-breaking and keeps the learner deterministic.
pub fn ftl_weights(totals: &[f64]) -> WeightVector {
    let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let leaders = totals.iter().filter(|&&l| l == min).count();
    let share = 1.0 / leaders as f64;
    WeightVector::from_normalized(
        totals
            .iter()
            .map(|&l| if l == min { share } else { 0.0 })
            .collect(),
    )
}

/// Follow-the-Leader.
#[derive(Debug, Clone)]
pub struct FtlLearner {
    cum: CumulativeLoss,
    clock: RoundClock,
}

impl FtlLearner {
    pub fn new(experts: usize) -> Self {
        FtlLearner {
            cum: CumulativeLoss::zeros(experts),
            clock: RoundClock::default(),
        }
    }

    pub fn totals(&self) -> &CumulativeLoss {
        &self.cum
    }
}

impl Learner for FtlLearner {
    fn id(&self) -> LearnerId {
        LearnerId::Ftl
    }

    fn experts(&self) -> usize {
        self.cum.experts()
    }

    fn step(&mut self, t: u64, previous: Option<&LossVector>) -> Result<WeightVector> {
        if let Some(l) = self.clock.advance(t, previous)? {
            self.cum.add(l)?;
        }
        Ok(ftl_weights(self.cum.totals()))
    }
}
