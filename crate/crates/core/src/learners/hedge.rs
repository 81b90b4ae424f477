//! Exponential weights with a scheduled learning rate.

use crate::error::{Error, Result};
use crate::learners::schedule::{epoch_index, EtaKind, EtaSchedule};
use crate::learners::Learner;
use crate::learners::{LearnerId, RoundClock};
use crate::types::{CumulativeLoss, LossVector, WeightVector};

/// `v_i = exp(-eta L_i) / sum_j exp(-eta L_j)`, evaluated after shifting the
/// totals by their minimum so the largest term is exactly `exp(0) = 1`.
pub fn hedge_weights(totals: &[f64], eta: f64) -> Result<WeightVector> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidEta(eta));
    }
    if totals.len() < 2 {
        return Err(Error::TooFewExperts(totals.len()));
    }
    if let Some((index, &value)) = totals.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::LossOutOfRange { index, value });
    }
    let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = totals.iter().map(|&l| (-eta * (l - min)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    Ok(WeightVector::from_normalized(w))
}

/// Hedge with decreasing, constant, or doubling-trick learning rates.
///
/// For the doubling variant `cum` only holds losses since the start of the
/// current epoch `T_k = 2^k`.
#[derive(Debug, Clone)]
pub struct HedgeLearner {
    schedule: EtaSchedule,
    cum: CumulativeLoss,
    epoch: u32,
    clock: RoundClock,
}

impl HedgeLearner {
    pub fn new(schedule: EtaSchedule) -> Self {
        HedgeLearner {
            cum: CumulativeLoss::zeros(schedule.experts()),
            schedule,
            epoch: 0,
            clock: RoundClock::default(),
        }
    }

    pub fn schedule(&self) -> &EtaSchedule {
        &self.schedule
    }

    /// Totals the next weights are computed from.
    pub fn totals(&self) -> &CumulativeLoss {
        &self.cum
    }

    /// Current doubling epoch `k`; always 0 for the other schedules.
    pub fn epoch(&self) -> u32 {
        self.epoch
    }
}

impl Learner for HedgeLearner {
    fn id(&self) -> LearnerId {
        match self.schedule.kind() {
            EtaKind::Decreasing => LearnerId::Hedge,
            EtaKind::Constant => LearnerId::HedgeConstant,
            EtaKind::DoublingEpoch => LearnerId::HedgeDoubling,
        }
    }

    fn experts(&self) -> usize {
        self.schedule.experts()
    }

    fn step(&mut self, t: u64, previous: Option<&LossVector>) -> Result<WeightVector> {
        if let Some(l) = self.clock.advance(t, previous)? {
            self.cum.add(l)?;
        }
        if self.schedule.kind() == EtaKind::DoublingEpoch {
            let k = epoch_index(t);
            if k != self.epoch {
                self.epoch = k;
                self.cum.reset();
            }
        }
        hedge_weights(self.cum.totals(), self.schedule.eta_at(t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn loss(v: &[f64]) -> LossVector {
        LossVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn equal_totals_give_uniform() {
        for eta in [1e-6, 0.3, 7.0, 1e6] {
            let w = hedge_weights(&[0.0, 0.0, 0.0], eta).unwrap();
            for &x in w.values() {
                assert_abs_diff_eq!(x, 1.0 / 3.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn matches_high_precision_reference() {
        // mpmath, 30 digits.
        let w = hedge_weights(&[0.0, 1.0, 1.0], 1.0).unwrap();
        let expected = [0.5761168847658291, 0.21194155761708545, 0.21194155761708545];
        for (a, b) in w.values().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-6);
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_dominance_does_not_overflow() {
        let w = hedge_weights(&[0.0, 1e6], 1.0).unwrap();
        assert_abs_diff_eq!(w.values()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.values()[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_eta() {
        assert_eq!(hedge_weights(&[0.0, 1.0], 0.0), Err(Error::InvalidEta(0.0)));
        assert!(hedge_weights(&[0.0, 1.0], f64::INFINITY).is_err());
        assert!(hedge_weights(&[0.0, f64::NAN], 1.0).is_err());
    }

    #[test]
    fn first_round_is_uniform() {
        for schedule in [
            EtaSchedule::decreasing(2.0, 4).unwrap(),
            EtaSchedule::constant(8f64.sqrt(), 4, 10).unwrap(),
            EtaSchedule::doubling(8f64.sqrt(), 4).unwrap(),
        ] {
            let mut h = HedgeLearner::new(schedule);
            assert_eq!(h.step(1, None).unwrap(), WeightVector::uniform(4));
        }
    }

    #[test]
    fn doubling_restarts_at_epoch_boundary() {
        let mut h = HedgeLearner::new(EtaSchedule::doubling(8f64.sqrt(), 2).unwrap());
        h.step(1, None).unwrap();
        let w = h.step(2, Some(&loss(&[0.0, 1.0]))).unwrap();
        assert_eq!(w, WeightVector::uniform(2));
        assert_eq!(h.epoch(), 1);
        let w3 = h.step(3, Some(&loss(&[0.0, 1.0]))).unwrap();
        assert!(w3.values()[0] > 0.5);
    }

    #[test]
    fn decreasing_second_round() {
        // hedge_weights([0, 1], 2 sqrt(ln 2 / 2)), mpmath reference.
        let mut h = HedgeLearner::new(EtaSchedule::decreasing(2.0, 2).unwrap());
        h.step(1, None).unwrap();
        let w = h.step(2, Some(&loss(&[0.0, 1.0]))).unwrap();
        assert_abs_diff_eq!(w.values()[0], 0.7644817994035712, epsilon = 1e-12);
        assert_abs_diff_eq!(w.values()[1], 0.2355182005964288, epsilon = 1e-12);
    }

    #[test]
    fn rounds_must_be_in_order() {
        let mut h = HedgeLearner::new(EtaSchedule::decreasing(2.0, 2).unwrap());
        assert_eq!(
            h.step(2, Some(&loss(&[0.0, 1.0]))),
            Err(Error::OutOfOrderRound {
                expected: 1,
                got: 2
            })
        );
        h.step(1, None).unwrap();
        assert_eq!(h.step(2, None), Err(Error::MissingLoss(2)));
    }

    proptest! {
        #[test]
        fn shift_invariance(
            totals in prop::collection::vec(0.0f64..50.0, 2..12),
            shift in -20.0f64..20.0,
            eta in 1e-3f64..5.0,
        ) {
            let a = hedge_weights(&totals, eta).unwrap();
            let shifted: Vec<f64> = totals.iter().map(|x| x + shift).collect();
            let b = hedge_weights(&shifted, eta).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn smaller_loss_gets_more_weight(
            totals in prop::collection::vec(0.0f64..20.0, 2..12),
            eta in 1e-3f64..3.0,
        ) {
            let w = hedge_weights(&totals, eta).unwrap();
            for i in 0..totals.len() {
                for j in 0..totals.len() {
                    if totals[i] < totals[j] {
                        prop_assert!(w.values()[i] > w.values()[j]);
                    }
                }
            }
        }

        #[test]
        fn vanishing_eta_is_uniform(totals in prop::collection::vec(0.0f64..1e3, 2..50)) {
            let w = hedge_weights(&totals, 1e-12).unwrap();
            let u = 1.0 / totals.len() as f64;
            for x in w.values() {
                prop_assert!((x - u).abs() <= 1e-9);
            }
        }
    }
}
