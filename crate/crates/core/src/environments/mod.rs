//! Loss-generating instances.
//!
//! Every instance is a pure function of `(spec, round, RngStream)`. The
//! builtin catalogue covers the four experiment panels and the constructions
//! behind the lower bounds:
//!
//! | id      | kind                 | experts                                       |
//! |---------|----------------------|-----------------------------------------------|
//! | `fig-a` | Bernoulli            | 0.3, 2 x 0.4, 7 x 0.5                          |
//! | `fig-b` | Bernoulli            | 2 x 0.5, 8 x 0.7 (two tied leaders)            |
//! | `fig-c` | Beta                 | (0.04, 0.96), 4 x (0.08, 0.92), 5 x (0.5, 0.5) |
//! | `fig-d` | deterministic        | alternating leaders until round 80             |
//! | `prop3` | deterministic        | 0 for expert 0, 1 for the rest                 |
//! | `t4`    | deterministic        | 0 for expert 0, `min(1, sqrt(ln M / T)/c0)` else |
//! | `prop2` | Bernoulli            | 1/2 - delta at the best expert, 1/2 elsewhere  |

mod rng;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CumulativeLoss, LossVector};

pub use rng::{RngStream, RoundRng};

/// Builtin instance ids, in catalogue order.
pub const INSTANCE_IDS: [&str; 7] = ["fig-a", "fig-b", "fig-c", "fig-d", "prop3", "t4", "prop2"];

pub fn describe_instance(id: &str) -> Option<&'static str> {
    Some(match id {
        "fig-a" => "M=10 Bernoulli: one 0.3, two 0.4, seven 0.5 (gap 0.1)",
        "fig-b" => "M=10 Bernoulli: two 0.5, eight 0.7 (gap 0)",
        "fig-c" => "M=10 Beta: (0.04,0.96), 4x(0.08,0.92), 5x(0.5,0.5) (gap 0.04)",
        "fig-d" => "M=3 deterministic adversarial instance with a gap after round 80",
        "prop3" => "constant losses 0 for expert 0 and 1 for the rest (default M=10)",
        "t4" => "constant losses 0 and min(1, sqrt(ln M / T)/c0) (default M=10, c0=2)",
        "prop2" => {
            "Bernoulli(1/2 - delta) at the best expert, 1/2 elsewhere (default M=16, delta=0.1)"
        }
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceKind {
    /// Independent Bernoulli losses with the given means.
    BernoulliGap { means: Vec<f64> },
    /// Independent Beta losses with the given `(a, b)` shapes.
    BetaSmallLoss { shapes: Vec<(f64, f64)> },
    /// Deterministic three-expert instance: expert 2 always loses 3/4; experts
    /// 0 and 1 get (1/2, 0) in round 1, (0, 1) on even rounds and from round
    /// 80 on, and (1, 0) otherwise.
    AdversarialGapD,
    /// Expert 0 loses 0, every other expert loses 1, every round.
    ConstantProp3 { experts: usize },
    /// Expert 0 loses 0, every other expert loses `delta`, every round.
    BernsteinT4 { experts: usize, delta: f64 },
    /// Bernoulli(1/2 - delta) at `best`, Bernoulli(1/2) elsewhere.
    MinimaxProp2 {
        experts: usize,
        delta: f64,
        best: usize,
    },
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::BernoulliGap { .. } => "bernoulli-gap",
            InstanceKind::BetaSmallLoss { .. } => "beta-small-loss",
            InstanceKind::AdversarialGapD => "adversarial-gap-d",
            InstanceKind::ConstantProp3 { .. } => "constant-prop3",
            InstanceKind::BernsteinT4 { .. } => "bernstein-t4",
            InstanceKind::MinimaxProp2 { .. } => "minimax-prop2",
        }
    }

    pub fn experts(&self) -> usize {
        match self {
            InstanceKind::BernoulliGap { means } => means.len(),
            InstanceKind::BetaSmallLoss { shapes } => shapes.len(),
            InstanceKind::AdversarialGapD => 3,
            InstanceKind::ConstantProp3 { experts }
            | InstanceKind::BernsteinT4 { experts, .. }
            | InstanceKind::MinimaxProp2 { experts, .. } => *experts,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            InstanceKind::AdversarialGapD
                | InstanceKind::ConstantProp3 { .. }
                | InstanceKind::BernsteinT4 { .. }
        )
    }

    /// Per-round expected losses, for instances that are i.i.d. over rounds.
    pub fn means(&self) -> Option<Vec<f64>> {
        Some(match self {
            InstanceKind::BernoulliGap { means } => means.clone(),
            InstanceKind::BetaSmallLoss { shapes } => {
                shapes.iter().map(|&(a, b)| a / (a + b)).collect()
            }
            InstanceKind::AdversarialGapD => return None,
            InstanceKind::ConstantProp3 { experts } => (0..*experts)
                .map(|i| if i == 0 { 0.0 } else { 1.0 })
                .collect(),
            InstanceKind::BernsteinT4 { experts, delta } => (0..*experts)
                .map(|i| if i == 0 { 0.0 } else { *delta })
                .collect(),
            InstanceKind::MinimaxProp2 {
                experts,
                delta,
                best,
            } => (0..*experts)
                .map(|i| if i == *best { 0.5 - delta } else { 0.5 })
                .collect(),
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        let m = self.experts();
        if m < 2 {
            return Err(Error::TooFewExperts(m));
        }
        match self {
            InstanceKind::BernoulliGap { means } => {
                if let Some(p) = means.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return bad(format!("Bernoulli mean {p} outside [0, 1]"));
                }
            }
            InstanceKind::BetaSmallLoss { shapes } => {
                if let Some(s) = shapes
                    .iter()
                    .find(|(a, b)| !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()))
                {
                    return bad(format!("Beta shape {s:?} must be positive"));
                }
            }
            InstanceKind::BernsteinT4 { delta, .. } => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return bad(format!("delta {delta} outside (0, 1]"));
                }
            }
            InstanceKind::MinimaxProp2 { delta, best, .. } => {
                if !(*delta > 0.0 && *delta <= 0.5) {
                    return bad(format!("delta {delta} outside (0, 1/2]"));
                }
                if *best >= m {
                    return bad(format!("best expert {best} out of range for M={m}"));
                }
            }
            InstanceKind::AdversarialGapD | InstanceKind::ConstantProp3 { .. } => {}
        }
        Ok(())
    }
}

/// A loss-generating environment together with its declared best expert and
/// gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSpec {
    pub id: String,
    pub kind: InstanceKind,
    pub i_star: Option<usize>,
    pub gap: Option<f64>,
    /// Round from which `L_i - L_{i*} >= gap * t` is claimed to hold
    /// (deterministic adversarial instances only).
    pub tau0: Option<u64>,
}

impl InstanceSpec {
    /// Builds a spec, deriving `i*` (first minimizer of the mean loss) and the
    /// gap from the distribution parameters when they are defined.
    pub fn from_kind(id: impl Into<String>, kind: InstanceKind) -> Result<Self> {
        kind.validate()?;
        let (i_star, gap, tau0) = match (&kind, kind.means()) {
            (InstanceKind::MinimaxProp2 { best, delta, .. }, _) => {
                (Some(*best), Some(*delta), None)
            }
            (_, Some(means)) => {
                let (best, gap) = best_and_gap(&means);
                (Some(best), Some(gap), None)
            }
            (InstanceKind::AdversarialGapD, None) => (Some(0), None, Some(80)),
            _ => (None, None, None),
        };
        Ok(InstanceSpec {
            id: id.into(),
            kind,
            i_star,
            gap,
            tau0,
        })
    }

    /// Overrides the declared best expert, recomputing the gap against it.
    pub fn with_best(mut self, best: usize) -> Result<Self> {
        if best >= self.experts() {
            return Err(Error::InvalidInstance(format!(
                "best expert {best} out of range for M={}",
                self.experts()
            )));
        }
        self.i_star = Some(best);
        if let Some(means) = self.kind.means() {
            self.gap = Some(gap_against(&means, best));
        }
        Ok(self)
    }

    pub fn experts(&self) -> usize {
        self.kind.experts()
    }

    pub fn is_deterministic(&self) -> bool {
        self.kind.is_deterministic()
    }

    /// Prepared sampler; building it once avoids re-validating distribution
    /// parameters every round.
    pub fn source(&self) -> LossSource {
        let samplers = match &self.kind {
            InstanceKind::BernoulliGap { means } => {
                means.iter().map(|&p| Sampler::Bernoulli(p)).collect()
            }
            InstanceKind::MinimaxProp2 { .. } => self
                .kind
                .means()
                .unwrap()
                .into_iter()
                .map(Sampler::Bernoulli)
                .collect(),
            InstanceKind::BetaSmallLoss { shapes } => shapes
                .iter()
                .map(|&(a, b)| Sampler::Beta(Beta::new(a, b).expect("validated shapes")))
                .collect(),
            InstanceKind::AdversarialGapD
            | InstanceKind::ConstantProp3 { .. }
            | InstanceKind::BernsteinT4 { .. } => Vec::new(),
        };
        LossSource {
            kind: self.kind.clone(),
            samplers,
        }
    }
}

fn best_and_gap(means: &[f64]) -> (usize, f64) {
    let best = means
        .iter()
        .enumerate()
        .fold(0, |b, (i, &x)| if x < means[b] { i } else { b });
    (best, gap_against(means, best))
}

fn gap_against(means: &[f64], best: usize) -> f64 {
    means
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &x)| x - means[best])
        .fold(f64::INFINITY, f64::min)
}

/// Optional parameters for the builtin catalogue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub experts: Option<usize>,
    pub delta: Option<f64>,
    pub best: Option<usize>,
    /// Horizon `T`; `t4` sizes its gap from it.
    pub horizon: Option<u64>,
    /// `c0` of the Decreasing Hedge `t4` is built against.
    pub c0: Option<f64>,
}

pub fn builtin_instance(name: &str, params: &InstanceParams) -> Result<InstanceSpec> {
    let spec = match name {
        "fig-a" => InstanceSpec::from_kind(
            name,
            InstanceKind::BernoulliGap {
                means: repeat(&[(0.3, 1), (0.4, 2), (0.5, 7)]),
            },
        )?,
        "fig-b" => InstanceSpec::from_kind(
            name,
            InstanceKind::BernoulliGap {
                means: repeat(&[(0.5, 2), (0.7, 8)]),
            },
        )?,
        "fig-c" => {
            let mut shapes = vec![(0.04, 0.96)];
            shapes.extend(std::iter::repeat_n((0.08, 0.92), 4));
            shapes.extend(std::iter::repeat_n((0.5, 0.5), 5));
            InstanceSpec::from_kind(name, InstanceKind::BetaSmallLoss { shapes })?
        }
        "fig-d" => InstanceSpec::from_kind(name, InstanceKind::AdversarialGapD)?,
        "prop3" => InstanceSpec::from_kind(
            name,
            InstanceKind::ConstantProp3 {
                experts: params.experts.unwrap_or(10),
            },
        )?,
        "t4" => {
            let experts = params.experts.unwrap_or(10);
            let horizon = params
                .horizon
                .ok_or_else(|| Error::InvalidInstance("t4 needs a horizon T".into()))?;
            let delta = params
                .delta
                .unwrap_or_else(|| t4_delta(experts, horizon, params.c0.unwrap_or(2.0)));
            InstanceSpec::from_kind(name, InstanceKind::BernsteinT4 { experts, delta })?
        }
        "prop2" => InstanceSpec::from_kind(
            name,
            InstanceKind::MinimaxProp2 {
                experts: params.experts.unwrap_or(16),
                delta: params.delta.unwrap_or(0.1),
                best: params.best.unwrap_or(0),
            },
        )?,
        _ => return Err(Error::UnknownInstance(name.to_string())),
    };
    match (name, params.best) {
        ("prop2", _) | (_, None) => Ok(spec),
        (_, Some(best)) => spec.with_best(best),
    }
}

/// `min(1, sqrt(ln M / T) / c0)`: the gap of the constant-loss instance on
/// which Decreasing Hedge with constant `c0` pays `sqrt(T ln M)`.
pub fn t4_delta(experts: usize, horizon: u64, c0: f64) -> f64 {
    (((experts as f64).ln() / horizon as f64).sqrt() / c0).min(1.0)
}

fn repeat(groups: &[(f64, usize)]) -> Vec<f64> {
    groups
        .iter()
        .flat_map(|&(p, n)| std::iter::repeat_n(p, n))
        .collect()
}

/// Declared best expert and exact mean gap.
pub fn gap_of(spec: &InstanceSpec) -> Result<(usize, f64)> {
    match (spec.i_star, spec.gap) {
        (Some(i), Some(gap)) => Ok((i, gap)),
        _ => Err(Error::UndefinedGap(spec.id.clone())),
    }
}

enum Sampler {
    Bernoulli(f64),
    Beta(Beta<f64>),
}

/// Sampler for one instance.
pub struct LossSource {
    kind: InstanceKind,
    samplers: Vec<Sampler>,
}

impl LossSource {
    pub fn experts(&self) -> usize {
        self.kind.experts()
    }

    /// Losses of round `t >= 1`.
    pub fn sample(&self, t: u64, rng: &RngStream) -> LossVector {
        let values = match &self.kind {
            InstanceKind::AdversarialGapD => {
                let (a, b) = if t == 1 {
                    (0.5, 0.0)
                } else if t >= 80 || t.is_multiple_of(2) {
                    (0.0, 1.0)
                } else {
                    (1.0, 0.0)
                };
                vec![a, b, 0.75]
            }
            InstanceKind::ConstantProp3 { experts } => (0..*experts)
                .map(|i| if i == 0 { 0.0 } else { 1.0 })
                .collect(),
            InstanceKind::BernsteinT4 { experts, delta } => (0..*experts)
                .map(|i| if i == 0 { 0.0 } else { *delta })
                .collect(),
            _ => {
                let mut round = rng.round(t);
                self.samplers
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let r = round.expert(i);
                        match s {
                            Sampler::Bernoulli(p) => {
                                if r.random::<f64>() < *p {
                                    1.0
                                } else {
                                    0.0
                                }
                            }
                            Sampler::Beta(d) => d.sample(r),
                        }
                    })
                    .collect()
            }
        };
        LossVector::new(values).expect("instance losses lie in [0, 1]")
    }
}

pub fn sample_losses(spec: &InstanceSpec, t: u64, rng: &RngStream) -> LossVector {
    spec.source().sample(t, rng)
}

/// Result of scanning a deterministic instance for a linear lead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapScan {
    pub tau0: u64,
    pub horizon: u64,
    /// `min_{tau0 <= t <= horizon, i != i*} (L_i,t - L_i*,t) / t`.
    pub delta: f64,
}

/// Smallest normalized lead of the declared best expert over `[tau0, horizon]`.
pub fn scan_gap(spec: &InstanceSpec, tau0: u64, horizon: u64) -> Result<GapScan> {
    if !spec.is_deterministic() {
        return Err(Error::InvalidInstance(format!(
            "{} is random; scan a realization instead",
            spec.id
        )));
    }
    let best = spec
        .i_star
        .ok_or_else(|| Error::UndeclaredBestExpert(spec.id.clone()))?;
    if tau0 == 0 || tau0 > horizon {
        return Err(Error::InvalidRound(tau0));
    }
    let source = spec.source();
    let rng = RngStream::new(0, 0);
    let mut cum = CumulativeLoss::zeros(spec.experts());
    let mut delta = f64::INFINITY;
    for t in 1..=horizon {
        cum.add(&source.sample(t, &rng))?;
        if t >= tau0 {
            let lead = cum.totals();
            for (i, &l) in lead.iter().enumerate() {
                if i != best {
                    delta = delta.min((l - lead[best]) / t as f64);
                }
            }
        }
    }
    Ok(GapScan {
        tau0,
        horizon,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn builtin(name: &str) -> InstanceSpec {
        builtin_instance(name, &InstanceParams::default()).unwrap()
    }

    #[test]
    fn figure_parameterizations() {
        let a = builtin("fig-a");
        assert_eq!(
            a.kind,
            InstanceKind::BernoulliGap {
                means: vec![0.3, 0.4, 0.4, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]
            }
        );
        assert_eq!(a.i_star, Some(0));
        assert_abs_diff_eq!(a.gap.unwrap(), 0.1, epsilon = 1e-12);

        let c = builtin("fig-c");
        let InstanceKind::BetaSmallLoss { shapes } = &c.kind else {
            panic!()
        };
        assert_eq!(shapes[0], (0.04, 0.96));
        assert_eq!(&shapes[1..5], &[(0.08, 0.92); 4]);
        assert_eq!(&shapes[5..], &[(0.5, 0.5); 5]);
        assert_abs_diff_eq!(c.gap.unwrap(), 0.04, epsilon = 1e-12);

        let d = builtin("fig-d");
        assert_eq!(d.experts(), 3);
        assert_eq!(d.tau0, Some(80));
    }

    #[test]
    fn t4_gap() {
        let p = InstanceParams {
            horizon: Some(10_000),
            c0: Some(2.0),
            ..Default::default()
        };
        let t4 = builtin_instance("t4", &p).unwrap();
        // sqrt(ln 10 / 1e4) / 2, mpmath.
        assert_abs_diff_eq!(t4.gap.unwrap(), 0.007587135646925732, epsilon = 1e-15);
        assert!(builtin_instance("t4", &InstanceParams::default()).is_err());
        // Large ln M / T saturates at 1.
        assert_eq!(t4_delta(10, 1, 1.0), 1.0);
    }

    #[test]
    fn gaps() {
        let (i, g) = gap_of(&builtin("fig-a")).unwrap();
        assert_eq!(i, 0);
        assert_abs_diff_eq!(g, 0.1, epsilon = 1e-12);
        assert_eq!(gap_of(&builtin("fig-b")).unwrap(), (0, 0.0));
        let p2 = builtin_instance(
            "prop2",
            &InstanceParams {
                experts: Some(16),
                delta: Some(0.1),
                best: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(gap_of(&p2).unwrap(), (3, 0.1));
        assert_eq!(
            gap_of(&builtin("fig-d")),
            Err(Error::UndefinedGap("fig-d".into()))
        );
        assert_eq!(gap_of(&builtin("prop3")).unwrap(), (0, 1.0));
    }

    #[test]
    fn unknown_instance() {
        assert_eq!(
            builtin_instance("nope", &InstanceParams::default()),
            Err(Error::UnknownInstance("nope".into()))
        );
    }

    #[test]
    fn deterministic_sequences() {
        let d = builtin("fig-d").source();
        let rng = RngStream::new(0, 0);
        assert_eq!(d.sample(1, &rng).values(), &[0.5, 0.0, 0.75]);
        assert_eq!(d.sample(2, &rng).values(), &[0.0, 1.0, 0.75]);
        assert_eq!(d.sample(3, &rng).values(), &[1.0, 0.0, 0.75]);
        assert_eq!(d.sample(79, &rng).values(), &[1.0, 0.0, 0.75]);
        assert_eq!(d.sample(81, &rng).values(), &[0.0, 1.0, 0.75]);

        let p3 = builtin_instance(
            "prop3",
            &InstanceParams {
                experts: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        for t in [1, 2, 1000] {
            assert_eq!(sample_losses(&p3, t, &rng).values(), &[0.0, 1.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        for name in ["fig-a", "fig-c"] {
            let src = builtin(name).source();
            let a: Vec<LossVector> = (1..100)
                .map(|t| src.sample(t, &RngStream::new(3, 2)))
                .collect();
            let b: Vec<LossVector> = (1..100)
                .map(|t| src.sample(t, &RngStream::new(3, 2)))
                .collect();
            let c: Vec<LossVector> = (1..100)
                .map(|t| src.sample(t, &RngStream::new(3, 1)))
                .collect();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn empirical_means_within_five_sigma() {
        let prop2 = builtin("prop2");
        for spec in [builtin("fig-a"), builtin("fig-b"), builtin("fig-c"), prop2] {
            let src = spec.source();
            let n = 100_000u64;
            let m = spec.experts();
            let mut sum = vec![0.0; m];
            let rng = RngStream::new(11, 0);
            for t in 1..=n {
                for (s, x) in sum.iter_mut().zip(src.sample(t, &rng).values()) {
                    *s += x;
                }
            }
            let means = spec.kind.means().unwrap();
            let variances: Vec<f64> = match &spec.kind {
                InstanceKind::BetaSmallLoss { shapes } => shapes
                    .iter()
                    .map(|&(a, b)| a * b / ((a + b).powi(2) * (a + b + 1.0)))
                    .collect(),
                _ => means.iter().map(|p| p * (1.0 - p)).collect(),
            };
            for i in 0..m {
                let se = (variances[i] / n as f64).sqrt();
                let emp = sum[i] / n as f64;
                assert!(
                    (emp - means[i]).abs() <= 5.0 * se,
                    "{} expert {i}: {emp} vs {}",
                    spec.id,
                    means[i]
                );
            }
        }
    }

    #[test]
    fn fig_d_has_a_linear_lead_after_round_80() {
        let d = builtin("fig-d");
        let scan = scan_gap(&d, 80, 10_000).unwrap();
        assert!(scan.delta > 0.0);
        // L_1 - L_0 = 0.5 at t = 80, the tightest point of the scan.
        assert_abs_diff_eq!(scan.delta, 0.5 / 80.0, epsilon = 1e-15);
        assert!(scan_gap(&d, 79, 10_000).unwrap().delta < 0.0);
        assert!(scan_gap(&builtin("fig-a"), 1, 10).is_err());
    }

    #[test]
    fn t4_is_one_one_bernstein() {
        let spec = builtin_instance(
            "t4",
            &InstanceParams {
                horizon: Some(100),
                ..Default::default()
            },
        )
        .unwrap();
        let l = sample_losses(&spec, 1, &RngStream::new(0, 0));
        for i in 1..spec.experts() {
            let d = l.values()[i] - l.values()[0];
            assert!(d * d <= d);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(InstanceSpec::from_kind(
            "x",
            InstanceKind::BernoulliGap {
                means: vec![0.2, 1.2]
            }
        )
        .is_err());
        assert!(InstanceSpec::from_kind(
            "x",
            InstanceKind::BetaSmallLoss {
                shapes: vec![(0.0, 1.0), (1.0, 1.0)]
            }
        )
        .is_err());
        assert!(InstanceSpec::from_kind("x", InstanceKind::ConstantProp3 { experts: 1 }).is_err());
        assert!(InstanceSpec::from_kind(
            "x",
            InstanceKind::MinimaxProp2 {
                experts: 4,
                delta: 0.1,
                best: 4
            }
        )
        .is_err());
    }
}
