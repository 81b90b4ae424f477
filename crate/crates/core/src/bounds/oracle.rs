use crate::error::{Error, Result};

/// Exact regret of Constant Hedge (`eta = c0 sqrt(ln M / T)`) on the instance
/// where expert 0 always loses 0 and every other expert always loses 1:
///
/// `R_T = sum_{t=1}^T x_t / (1 + x_t)`, `x_t = (M - 1) exp(-c (t - 1) / sqrt(T))`,
/// `c = c0 sqrt(ln M)`.
///
/// This is a closed form, evaluated without running any learner.
pub fn constant_hedge_exact_regret(horizon: u64, experts: usize, c0: f64) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon(0));
    }
    if experts < 2 {
        return Err(Error::TooFewExperts(experts));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidSchedule(format!(
            "c0 must be positive, got {c0}"
        )));
    }
    let c = c0 * (experts as f64).ln().sqrt();
    let step = c / (horizon as f64).sqrt();
    let others = (experts - 1) as f64;
    Ok((0..horizon)
        .map(|s| {
            let x = others * (-step * s as f64).exp();
            x / (1.0 + x)
        })
        .sum())
}
