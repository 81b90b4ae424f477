use serde::Serialize;

use crate::environments::{InstanceKind, InstanceSpec, RngStream};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinEstimate {
    /// Smallest `B` for which the sample satisfies the condition at `beta`.
    pub b: f64,
    /// Expert attaining the maximum ratio.
    pub worst_expert: usize,
    /// Rounds actually drawn (1 for deterministic instances).
    pub samples: u64,
}

/// Plug-in estimate of the smallest `B` in
/// `E[(l_i - l_i*)^2] <= B E[l_i - l_i*]^beta` for all `i != i*`.
///
/// Deterministic stationary instances are evaluated exactly from one round.
pub fn bernstein_estimate(
    spec: &InstanceSpec,
    beta: f64,
    n_samples: u64,
    rng: RngStream,
) -> Result<BernsteinEstimate> {
    let best = spec
        .i_star
        .ok_or_else(|| Error::UndeclaredBestExpert(spec.id.clone()))?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::OutOfValidityDomain {
            id: "bernstein".into(),
            condition: "0 ≤ β ≤ 1".into(),
        });
    }
    if matches!(spec.kind, InstanceKind::AdversarialGapD) {
        return Err(Error::NotIid(spec.id.clone()));
    }
    // A declared tie makes the ratio undefined however many samples are drawn.
    if let Some(means) = spec.kind.means() {
        if let Some(i) = (0..means.len()).find(|&i| i != best && means[i] <= means[best]) {
            return Err(Error::ZeroGapDivision(i));
        }
    }
    let n = if spec.is_deterministic() {
        1
    } else {
        n_samples
    };
    if n == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    let m = spec.experts();
    let source = spec.source();
    let mut first = vec![0.0; m];
    let mut second = vec![0.0; m];
    for t in 1..=n {
        let l = source.sample(t, &rng);
        let l = l.values();
        for i in 0..m {
            let d = l[i] - l[best];
            first[i] += d;
            second[i] += d * d;
        }
    }
    let mut out = BernsteinEstimate {
        b: f64::NEG_INFINITY,
        worst_expert: best,
        samples: n,
    };
    for i in (0..m).filter(|&i| i != best) {
        let mean = first[i] / n as f64;
        if mean <= 0.0 {
            return Err(Error::ZeroGapDivision(i));
        }
        let ratio = (second[i] / n as f64) / mean.powf(beta);
        if ratio > out.b {
            out.b = ratio;
            out.worst_expert = i;
        }
    }
    Ok(out)
}
