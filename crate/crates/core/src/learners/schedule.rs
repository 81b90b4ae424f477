use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaKind {
    /// `c0 * sqrt(ln M / t)`
    Decreasing,
    /// `c0 * sqrt(ln M / T)` for a known horizon `T`.
    Constant,
    /// `c0 * sqrt(ln M / T_k)` on epochs `[2^k, 2^(k+1))`.
    DoublingEpoch,
}

/// Learning-rate sequence of the Hedge variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSchedule {
    kind: EtaKind,
    c0: f64,
    experts: usize,
    horizon: Option<u64>,
}

impl EtaSchedule {
    pub fn decreasing(c0: f64, experts: usize) -> Result<Self> {
        Self::new(EtaKind::Decreasing, c0, experts, None)
    }

    pub fn constant(c0: f64, experts: usize, horizon: u64) -> Result<Self> {
        Self::new(EtaKind::Constant, c0, experts, Some(horizon))
    }

    pub fn doubling(c0: f64, experts: usize) -> Result<Self> {
        Self::new(EtaKind::DoublingEpoch, c0, experts, None)
    }

    pub fn new(kind: EtaKind, c0: f64, experts: usize, horizon: Option<u64>) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "c0 must be positive, got {c0}"
            )));
        }
        if experts < 2 {
            return Err(Error::TooFewExperts(experts));
        }
        match (kind, horizon) {
            (EtaKind::Constant, None) | (EtaKind::Constant, Some(0)) => {
                return Err(Error::InvalidSchedule(
                    "constant learning rate needs a horizon T >= 1".into(),
                ))
            }
            _ => {}
        }
        Ok(EtaSchedule {
            kind,
            c0,
            experts,
            horizon: if kind == EtaKind::Constant {
                horizon
            } else {
                None
            },
        })
    }

    pub fn kind(&self) -> EtaKind {
        self.kind
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn experts(&self) -> usize {
        self.experts
    }

    pub fn horizon(&self) -> Option<u64> {
        self.horizon
    }

    pub fn eta_at(&self, t: u64) -> Result<f64> {
        if t == 0 {
            return Err(Error::InvalidRound(t));
        }
        let denom = match self.kind {
            EtaKind::Decreasing => t,
            EtaKind::Constant => self.horizon.expect("validated on construction"),
            EtaKind::DoublingEpoch => epoch_start(t),
        };
        Ok(rate(self.c0, self.experts, denom))
    }
}

/// `c0 * sqrt(ln M / n)`. Constant and doubling schedules both go through here
/// so that a doubling epoch reproduces a fresh constant-rate run bit for bit.
fn rate(c0: f64, experts: usize, n: u64) -> f64 {
    c0 * ((experts as f64).ln() / n as f64).sqrt()
}

/// Epoch index `k` with `2^k <= t < 2^(k+1)`; `t >= 1`.
pub fn epoch_index(t: u64) -> u32 {
    debug_assert!(t >= 1);
    63 - t.leading_zeros()
}

/// `T_k = 2^k` for the epoch containing `t`.
pub fn epoch_start(t: u64) -> u64 {
    1u64 << epoch_index(t)
}
