//! Regret accounting.
//!
//! `R_T = sum_t mix_t - min_i L_{i,T}` and, against a fixed expert `i`,
//! `R_{i,T} = sum_t mix_t - L_{i,T}`. [`regret_of_trace`] recomputes both from
//! stored records; [`RegretTracker`] maintains them incrementally for the
//! harness, which never keeps whole traces when aggregating trials.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{CumulativeLoss, LossVector, RoundRecord};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretSummary {
    pub horizon: u64,
    pub regret: f64,
    /// `R_{i,T}` for every expert `i`.
    pub pseudo_regret_vs: Vec<f64>,
    /// Running value of `R_t` for `t = 1..=T`.
    pub series: Vec<f64>,
}

impl RegretSummary {
    pub fn pseudo_regret(&self, expert: usize) -> Option<f64> {
        self.pseudo_regret_vs.get(expert).copied()
    }
}

pub fn regret_of_trace(records: &[RoundRecord]) -> Result<RegretSummary> {
    let first = records.first().ok_or(Error::EmptyTrace)?;
    let mut tracker = RegretTracker::new(first.losses.len());
    let mut series = Vec::with_capacity(records.len());
    for rec in records {
        tracker.record(rec.mix_loss, &rec.losses)?;
        series.push(tracker.regret());
    }
    Ok(RegretSummary {
        horizon: tracker.rounds(),
        regret: tracker.regret(),
        pseudo_regret_vs: tracker.pseudo_regret_vs(),
        series,
    })
}

/// Incremental regret bookkeeping.
#[derive(Debug, Clone)]
pub struct RegretTracker {
    learner_total: f64,
    cum: CumulativeLoss,
}

impl RegretTracker {
    pub fn new(experts: usize) -> Self {
        RegretTracker {
            learner_total: 0.0,
            cum: CumulativeLoss::zeros(experts),
        }
    }

    pub fn record(&mut self, mix_loss: f64, losses: &LossVector) -> Result<()> {
        self.cum.add(losses)?;
        self.learner_total += mix_loss;
        Ok(())
    }

    pub fn rounds(&self) -> u64 {
        self.cum.rounds_seen()
    }

    pub fn learner_loss(&self) -> f64 {
        self.learner_total
    }

    pub fn regret(&self) -> f64 {
        self.learner_total - self.cum.min()
    }

    pub fn regret_vs(&self, expert: usize) -> f64 {
        self.learner_total - self.cum.totals()[expert]
    }

    pub fn pseudo_regret_vs(&self) -> Vec<f64> {
        self.cum
            .totals()
            .iter()
            .map(|l| self.learner_total - l)
            .collect()
    }
}
