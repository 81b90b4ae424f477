//! AdaHedge: Hedge tuned by the cumulative mixability gap.
//!
//! With `gap_total` the sum of past mixability gaps, the learning rate is
//! `eta = ln M / gap_total` (infinite while `gap_total == 0`, in which case the
//! learner plays Follow-the-Leader). After round `t` the gap
//! `delta_t = mix_t - m_t` is added, where
//! `m_t = -(1/eta) ln sum_i v_i exp(-eta l_i)` is the mix loss; for infinite
//! `eta` the mix loss is the smallest loss on the support of `v`.

use crate::error::Result;
use crate::learners::ftl::ftl_weights;
use crate::learners::hedge::hedge_weights;
use crate::learners::{Learner, LearnerId, RoundClock};
use crate::types::{mix_loss, CumulativeLoss, LossVector, WeightVector};

#[derive(Debug, Clone)]
pub struct AdaHedgeLearner {
    cum: CumulativeLoss,
    gap_total: f64,
    last_gap: f64,
    played: Option<(WeightVector, f64)>,
    clock: RoundClock,
}

impl AdaHedgeLearner {
    pub fn new(experts: usize) -> Self {
        AdaHedgeLearner {
            cum: CumulativeLoss::zeros(experts),
            gap_total: 0.0,
            last_gap: 0.0,
            played: None,
            clock: RoundClock::default(),
        }
    }

    /// Cumulative mixability gap.
    pub fn gap_total(&self) -> f64 {
        self.gap_total
    }

    /// Mixability gap of the last observed round before clamping at zero.
    pub fn last_gap(&self) -> f64 {
        self.last_gap
    }

    /// Learning rate used for the most recently emitted weights.
    pub fn eta(&self) -> Option<f64> {
        self.played.as_ref().map(|(_, eta)| *eta)
    }

    pub fn totals(&self) -> &CumulativeLoss {
        &self.cum
    }

    fn current_eta(&self) -> f64 {
        if self.gap_total > 0.0 {
            (self.cum.experts() as f64).ln() / self.gap_total
        } else {
            f64::INFINITY
        }
    }
}

/// `-(1/eta) ln sum_i v_i exp(-eta l_i)`, restricted to the support of `v`.
pub fn mix_loss_exp(w: &WeightVector, l: &LossVector, eta: f64) -> f64 {
    let support = || w.values().iter().zip(l.values()).filter(|(&v, _)| v > 0.0);
    let lmin = support().map(|(_, &x)| x).fold(f64::INFINITY, f64::min);
    if eta.is_infinite() {
        return lmin;
    }
    let s: f64 = support()
        .map(|(&v, &x)| v * (-eta * (x - lmin)).exp())
        .sum();
    lmin - s.ln() / eta
}

impl Learner for AdaHedgeLearner {
    fn id(&self) -> LearnerId {
        LearnerId::AdaHedge
    }

    fn experts(&self) -> usize {
        self.cum.experts()
    }

    fn step(&mut self, t: u64, previous: Option<&LossVector>) -> Result<WeightVector> {
        if let Some(l) = self.clock.advance(t, previous)? {
            let (w, eta) = self
                .played
                .as_ref()
                .expect("weights played before the first loss");
            let delta = mix_loss(w, l)? - mix_loss_exp(w, l, *eta);
            self.last_gap = delta;
            self.gap_total += delta.max(0.0);
            self.cum.add(l)?;
        }
        let eta = self.current_eta();
        let w = if eta.is_finite() {
            hedge_weights(self.cum.totals(), eta)?
        } else {
            ftl_weights(self.cum.totals())
        };
        self.played = Some((w.clone(), eta));
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn loss(v: &[f64]) -> LossVector {
        LossVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn first_step_by_hand() {
        let mut a = AdaHedgeLearner::new(2);
        let w = a.step(1, None).unwrap();
        assert_eq!(w.values(), &[0.5, 0.5]);
        assert_eq!(a.eta(), Some(f64::INFINITY));
        a.step(2, Some(&loss(&[0.0, 1.0]))).unwrap();
        // mix 0.5, mix-loss 0, so the gap is 0.5 and eta = ln 2 / 0.5.
        assert_eq!(a.last_gap(), 0.5);
        assert_eq!(a.gap_total(), 0.5);
        assert_abs_diff_eq!(a.eta().unwrap(), 1.3862943611198906, epsilon = 1e-15);
    }

    #[test]
    fn equal_losses_keep_uniform_weights() {
        let mut a = AdaHedgeLearner::new(3);
        let l = loss(&[0.3, 0.3, 0.3]);
        let mut prev = None;
        for t in 1..=50 {
            let w = a.step(t, prev).unwrap();
            assert_eq!(w, WeightVector::uniform(3));
            assert_eq!(a.gap_total(), 0.0);
            prev = Some(&l);
        }
    }

    #[test]
    fn gap_is_nonnegative_and_total_nondecreasing() {
        let mut a = AdaHedgeLearner::new(4);
        let mut prev_total = 0.0;
        let stream = [
            [0.1, 0.9, 0.5, 0.5],
            [1.0, 0.0, 0.2, 0.3],
            [0.0, 1.0, 0.7, 0.1],
            [0.4, 0.4, 0.4, 0.9],
        ];
        let mut prev: Option<LossVector> = None;
        for t in 1..=200u64 {
            a.step(t, prev.as_ref()).unwrap();
            assert!(a.last_gap() >= -1e-12);
            assert!(a.gap_total() >= prev_total);
            prev_total = a.gap_total();
            prev = Some(loss(&stream[(t as usize * 7) % 4]));
        }
    }

    #[test]
    fn mix_loss_exp_limits() {
        let w = WeightVector::new(vec![0.25, 0.75]).unwrap();
        let l = loss(&[0.2, 0.6]);
        // Small eta tends to the dot product, large eta to the support minimum.
        assert_abs_diff_eq!(mix_loss_exp(&w, &l, 1e-8), 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(mix_loss_exp(&w, &l, 1e6), 0.2, epsilon = 1e-5);
        assert_eq!(mix_loss_exp(&w, &l, f64::INFINITY), 0.2);
    }
}
