//! Learners share one step contract: at round `t` they absorb the loss vector
//! of round `t - 1` (if any) and commit to the weights for round `t`, before
//! `l_t` is revealed.

mod adahedge;
mod ftl;
mod hedge;
mod schedule;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{LossVector, WeightVector};

pub use adahedge::{mix_loss_exp, AdaHedgeLearner};
pub use ftl::{ftl_weights, FtlLearner};
pub use hedge::{hedge_weights, HedgeLearner};
pub use schedule::{epoch_index, epoch_start, EtaKind, EtaSchedule};

pub trait Learner: Send {
    fn id(&self) -> LearnerId;

    fn experts(&self) -> usize;

    /// Weights for round `t`. `previous` is `l_{t-1}` and must be given for
    /// every `t > 1`; rounds must be presented as `1, 2, 3, ...`.
    fn step(&mut self, t: u64, previous: Option<&LossVector>) -> Result<WeightVector>;
}

/// Stable learner identifiers used by the CLI and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LearnerId {
    Hedge,
    HedgeConstant,
    HedgeDoubling,
    AdaHedge,
    Ftl,
}

impl LearnerId {
    pub const ALL: [LearnerId; 5] = [
        LearnerId::Hedge,
        LearnerId::HedgeConstant,
        LearnerId::HedgeDoubling,
        LearnerId::AdaHedge,
        LearnerId::Ftl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerId::Hedge => "hedge",
            LearnerId::HedgeConstant => "hedge_constant",
            LearnerId::HedgeDoubling => "hedge_doubling",
            LearnerId::AdaHedge => "adahedge",
            LearnerId::Ftl => "ftl",
        }
    }

    /// Default `c0` of the Hedge variants; `None` for untuned learners.
    pub fn default_c0(self) -> Option<f64> {
        match self {
            LearnerId::Hedge => Some(2.0),
            LearnerId::HedgeConstant | LearnerId::HedgeDoubling => Some(8f64.sqrt()),
            LearnerId::AdaHedge | LearnerId::Ftl => None,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            LearnerId::Hedge => "Hedge, eta_t = c0 sqrt(ln M / t), c0 = 2",
            LearnerId::HedgeConstant => "Hedge, eta = c0 sqrt(ln M / T), c0 = sqrt(8)",
            LearnerId::HedgeDoubling => "Hedge restarted on epochs [2^k, 2^(k+1)), c0 = sqrt(8)",
            LearnerId::AdaHedge => "Hedge tuned by the cumulative mixability gap",
            LearnerId::Ftl => "Follow-the-Leader, uniform over tied leaders",
        }
    }
}

impl fmt::Display for LearnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownLearner(s.to_string()))
    }
}

impl TryFrom<String> for LearnerId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LearnerId> for String {
    fn from(id: LearnerId) -> Self {
        id.as_str().to_string()
    }
}

/// A learner id plus an optional `c0` override.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub id: LearnerId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
}

impl LearnerSpec {
    pub fn new(id: LearnerId) -> Self {
        LearnerSpec { id, c0: None }
    }

    pub fn with_c0(id: LearnerId, c0: f64) -> Self {
        LearnerSpec { id, c0: Some(c0) }
    }

    pub fn c0(&self) -> Option<f64> {
        self.c0.or(self.id.default_c0())
    }

    /// Fresh learner for `experts` experts; `horizon` is only read by
    /// Constant Hedge.
    pub fn build(&self, experts: usize, horizon: u64) -> Result<Box<dyn Learner>> {
        if experts < 2 {
            return Err(Error::TooFewExperts(experts));
        }
        let c0 = self.c0();
        Ok(match self.id {
            LearnerId::Hedge => Box::new(HedgeLearner::new(EtaSchedule::decreasing(
                c0.unwrap(),
                experts,
            )?)),
            LearnerId::HedgeConstant => Box::new(HedgeLearner::new(EtaSchedule::constant(
                c0.unwrap(),
                experts,
                horizon,
            )?)),
            LearnerId::HedgeDoubling => Box::new(HedgeLearner::new(EtaSchedule::doubling(
                c0.unwrap(),
                experts,
            )?)),
            LearnerId::AdaHedge => Box::new(AdaHedgeLearner::new(experts)),
            LearnerId::Ftl => Box::new(FtlLearner::new(experts)),
        })
    }
}

/// Enforces in-order rounds and hands back the loss to absorb.
#[derive(Debug, Clone, Default)]
pub(crate) struct RoundClock {
    last: u64,
}

impl RoundClock {
    pub(crate) fn advance<'a>(
        &mut self,
        t: u64,
        previous: Option<&'a LossVector>,
    ) -> Result<Option<&'a LossVector>> {
        if t == 0 {
            return Err(Error::InvalidRound(t));
        }
        if t != self.last + 1 {
            return Err(Error::OutOfOrderRound {
                expected: self.last + 1,
                got: t,
            });
        }
        let absorbed = match (t, previous) {
            (1, _) => None,
            (_, None) => return Err(Error::MissingLoss(t)),
            (_, Some(l)) => Some(l),
        };
        self.last = t;
        Ok(absorbed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in LearnerId::ALL {
            assert_eq!(id.as_str().parse::<LearnerId>().unwrap(), id);
        }
        assert_eq!(
            "hedgehog".parse::<LearnerId>(),
            Err(Error::UnknownLearner("hedgehog".into()))
        );
    }

    #[test]
    fn every_learner_starts_uniform() {
        for id in LearnerId::ALL {
            let mut l = LearnerSpec::new(id).build(5, 100).unwrap();
            assert_eq!(l.id(), id);
            assert_eq!(l.step(1, None).unwrap(), WeightVector::uniform(5));
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut l = LearnerSpec::new(LearnerId::Hedge).build(3, 10).unwrap();
        l.step(1, None).unwrap();
        let bad = LossVector::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            l.step(2, Some(&bad)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn doubling_epoch_equals_fresh_constant_run() {
        // Within [2^k, 2^(k+1)) the doubling learner must reproduce Constant
        // Hedge with T = 2^k started at 2^k, bit for bit.
        let m = 6;
        let losses: Vec<LossVector> = (0..200u64)
            .map(|t| {
                LossVector::new(
                    (0..m)
                        .map(|i| ((t * 31 + i as u64 * 17) % 11) as f64 / 10.0)
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let c0 = 8f64.sqrt();
        let mut dbl = HedgeLearner::new(EtaSchedule::doubling(c0, m).unwrap());
        let mut dbl_weights = Vec::new();
        for t in 1..=losses.len() as u64 {
            let prev = (t > 1).then(|| &losses[t as usize - 2]);
            dbl_weights.push(dbl.step(t, prev).unwrap());
        }
        for k in 0..7u32 {
            let start = 1u64 << k;
            let mut cst = HedgeLearner::new(EtaSchedule::constant(c0, m, start).unwrap());
            for t in start..(2 * start).min(losses.len() as u64 + 1) {
                let local = t - start + 1;
                let prev = (local > 1).then(|| &losses[t as usize - 2]);
                let w = cst.step(local, prev).unwrap();
                assert_eq!(w, dbl_weights[t as usize - 1], "epoch {k}, round {t}");
            }
        }
    }
}
