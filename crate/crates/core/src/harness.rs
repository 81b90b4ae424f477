//! Runs learners against instances and aggregates regret curves over trials.
//!
//! Trials are the unit of parallelism. Within a trial every learner sees the
//! same loss stream (losses are a pure function of `(seed, trial, round)`),
//! and per-trial results are merged in trial order, so output does not depend
//! on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environments::{
    builtin_instance, InstanceKind, InstanceParams, InstanceSpec, RngStream,
};
use crate::error::{Error, Result};
use crate::learners::{LearnerId, LearnerSpec};
use crate::regret::{regret_of_trace, RegretSummary, RegretTracker};
use crate::types::{mix_loss, LossVector, RoundRecord};

/// Environment variable capping the number of trial workers (0 = automatic).
pub const THREADS_ENV: &str = "HEDGEBENCH_THREADS";

/// CSV header of [`AggregatedResult::to_csv`].
pub const CSV_HEADER: &str = "instance,learner,t,mean_regret,mean_pseudo_regret,std_regret,trials";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Builtin instance id, or the label of `custom`.
    pub instance: String,
    pub params: InstanceParams,
    /// Replaces the builtin catalogue lookup when set.
    pub custom: Option<InstanceKind>,
    pub learners: Vec<LearnerSpec>,
    pub horizon: u64,
    pub trials: usize,
    pub seed: u64,
    pub record_weights: bool,
    /// Extra checkpoint stride on top of the powers of two; 0 disables it.
    pub checkpoint_every: u64,
}

impl ExperimentConfig {
    pub fn new(instance: impl Into<String>, learners: Vec<LearnerSpec>, horizon: u64) -> Self {
        ExperimentConfig {
            instance: instance.into(),
            params: InstanceParams::default(),
            custom: None,
            learners,
            horizon,
            trials: 1,
            seed: 0,
            record_weights: false,
            checkpoint_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidHorizon(0));
        }
        if self.trials == 0 {
            return Err(Error::InvalidTrials(0));
        }
        if self.learners.is_empty() {
            return Err(Error::Config("at least one learner is required".into()));
        }
        Ok(())
    }

    /// The instance this config runs against. Builtins that depend on the
    /// horizon (`t4`) are sized with [`ExperimentConfig::horizon`] unless the
    /// params say otherwise.
    pub fn resolve_instance(&self) -> Result<InstanceSpec> {
        let spec = match &self.custom {
            Some(kind) => InstanceSpec::from_kind(self.instance.clone(), kind.clone())?,
            None => {
                let mut params = self.params;
                params.horizon.get_or_insert(self.horizon);
                return builtin_instance(&self.instance, &params);
            }
        };
        match self.params.best {
            Some(best) => spec.with_best(best),
            None => Ok(spec),
        }
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        checkpoint_grid(self.horizon, self.checkpoint_every)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.try_into()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

/// On-disk experiment config (TOML).
///
/// ```toml
/// instance = "prop3"          # builtin id, or a label when [custom] is given
/// learners = ["hedge", "hedge_constant"]
/// horizon = 1000
/// trials = 1
/// seed = 0
/// record_weights = false
/// checkpoint_every = 0
///
/// [params]                    # builtin overrides: experts, delta, best, horizon, c0
/// experts = 2
///
/// [c0]                        # per-learner c0 overrides
/// hedge_constant = 2.0
///
/// [custom]                    # optional custom instance
/// kind = "bernoulli-gap"
/// means = [0.2, 0.5, 0.5]
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    instance: String,
    #[serde(default)]
    params: InstanceParams,
    custom: Option<InstanceKind>,
    learners: Vec<String>,
    #[serde(default)]
    c0: BTreeMap<String, f64>,
    horizon: u64,
    #[serde(default = "one")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    record_weights: bool,
    #[serde(default)]
    checkpoint_every: u64,
}

fn one() -> usize {
    1
}

impl TryFrom<ConfigFile> for ExperimentConfig {
    type Error = Error;

    fn try_from(f: ConfigFile) -> Result<Self> {
        let learners = f
            .learners
            .iter()
            .map(|s| s.parse::<LearnerId>().map(LearnerSpec::new))
            .collect::<Result<Vec<_>>>()?;
        let mut cfg = ExperimentConfig {
            instance: f.instance,
            params: f.params,
            custom: f.custom,
            learners,
            horizon: f.horizon,
            trials: f.trials,
            seed: f.seed,
            record_weights: f.record_weights,
            checkpoint_every: f.checkpoint_every,
        };
        for (name, c0) in f.c0 {
            let id: LearnerId = name.parse()?;
            set_c0(&mut cfg.learners, id, c0)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Sets `c0` on the learner `id`, which must be a tuned Hedge variant present
/// in `learners`.
pub fn set_c0(learners: &mut [LearnerSpec], id: LearnerId, c0: f64) -> Result<()> {
    if id.default_c0().is_none() {
        return Err(Error::Config(format!("{id} does not take a c0")));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::Config(format!(
            "c0 for {id} must be positive, got {c0}"
        )));
    }
    let spec = learners
        .iter_mut()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Config(format!("c0 given for {id}, which is not selected")))?;
    spec.c0 = Some(c0);
    Ok(())
}

/// Powers of two up to `horizon`, multiples of `stride` (when nonzero), and
/// `horizon` itself; sorted and deduplicated.
pub fn checkpoint_grid(horizon: u64, stride: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = std::iter::successors(Some(1u64), |&t| t.checked_mul(2))
        .take_while(|&t| t <= horizon)
        .collect();
    if let Some(n) = horizon.checked_div(stride) {
        grid.extend((1..=n).map(|k| k * stride));
    }
    grid.push(horizon);
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// All rounds of one learner on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub instance: String,
    pub learner: LearnerId,
    pub i_star: Option<usize>,
    pub records: Vec<RoundRecord>,
}

impl Trace {
    pub fn summary(&self) -> Result<RegretSummary> {
        regret_of_trace(&self.records)
    }

    /// `R_{i*,T}`, or `None` when the instance declares no best expert.
    pub fn pseudo_regret(&self) -> Result<Option<f64>> {
        let s = self.summary()?;
        Ok(self.i_star.and_then(|i| s.pseudo_regret(i)))
    }
}

/// Runs one learner for `horizon` rounds, keeping every round.
pub fn run_trial(
    learner: &LearnerSpec,
    spec: &InstanceSpec,
    horizon: u64,
    rng: RngStream,
    record_weights: bool,
) -> Result<Trace> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon(0));
    }
    let source = spec.source();
    let mut l = learner.build(spec.experts(), horizon)?;
    let mut records = Vec::with_capacity(horizon as usize);
    let mut prev: Option<LossVector> = None;
    for t in 1..=horizon {
        // Weights are committed before the round's losses are drawn.
        let w = l.step(t, prev.as_ref())?;
        let losses = source.sample(t, &rng);
        let mix = mix_loss(&w, &losses)?;
        records.push(RoundRecord {
            t,
            mix_loss: mix,
            losses: losses.clone(),
            weights: record_weights.then_some(w),
        });
        prev = Some(losses);
    }
    Ok(Trace {
        instance: spec.id.clone(),
        learner: learner.id,
        i_star: spec.i_star,
        records,
    })
}

/// Regret and pseudo-regret of one trial at the checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSeries {
    pub checkpoints: Vec<u64>,
    pub regret: Vec<f64>,
    pub pseudo_regret: Vec<f64>,
}

/// Runs all `learners` on one shared loss stream, recording only checkpoint
/// values. Pseudo-regret is `NaN` when the instance has no declared best
/// expert.
pub fn simulate_trial(
    learners: &[LearnerSpec],
    spec: &InstanceSpec,
    horizon: u64,
    rng: RngStream,
    checkpoints: &[u64],
) -> Result<Vec<TrialSeries>> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon(0));
    }
    let source = spec.source();
    let m = spec.experts();
    let mut running = learners
        .iter()
        .map(|s| Ok((s.build(m, horizon)?, RegretTracker::new(m))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![
        TrialSeries {
            checkpoints: Vec::with_capacity(checkpoints.len()),
            regret: Vec::with_capacity(checkpoints.len()),
            pseudo_regret: Vec::with_capacity(checkpoints.len()),
        };
        learners.len()
    ];
    let mut next_checkpoint = checkpoints
        .iter()
        .copied()
        .filter(|&c| c <= horizon)
        .peekable();
    let mut prev: Option<LossVector> = None;
    let mut weights = Vec::with_capacity(learners.len());
    for t in 1..=horizon {
        weights.clear();
        for (learner, _) in running.iter_mut() {
            weights.push(learner.step(t, prev.as_ref())?);
        }
        let losses = source.sample(t, &rng);
        for ((_, tracker), w) in running.iter_mut().zip(&weights) {
            tracker.record(mix_loss(w, &losses)?, &losses)?;
        }
        if next_checkpoint.peek() == Some(&t) {
            next_checkpoint.next();
            for ((_, tracker), series) in running.iter().zip(out.iter_mut()) {
                series.checkpoints.push(t);
                series.regret.push(tracker.regret());
                series
                    .pseudo_regret
                    .push(spec.i_star.map_or(f64::NAN, |i| tracker.regret_vs(i)));
            }
        }
        prev = Some(losses);
    }
    Ok(out)
}

/// One line of the result table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance: String,
    pub learner: String,
    pub t: u64,
    pub mean_regret: f64,
    pub mean_pseudo_regret: f64,
    /// Population standard deviation (divide by `trials`).
    pub std_regret: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedResult {
    pub rows: Vec<ResultRow>,
}

impl AggregatedResult {
    pub fn rows_for<'a>(&'a self, learner: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.learner == learner)
    }

    /// Row of `learner` at checkpoint `t`.
    pub fn at(&self, learner: &str, t: u64) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.learner == learner && r.t == t)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.instance,
                r.learner,
                r.t,
                r.mean_regret,
                r.mean_pseudo_regret,
                r.std_regret,
                r.trials
            );
        }
        s
    }

    /// JSON array of row objects with the CSV's field names. `NaN` is written
    /// as `null`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.rows).expect("rows serialize");
        s.push('\n');
        s
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    // Shifting by the first value makes identical inputs give exactly (x, 0).
    let mut it = values.clone();
    let Some(first) = it.next() else {
        return (f64::NAN, 0.0);
    };
    let mean = first + values.clone().map(|x| x - first).sum::<f64>() / n as f64;
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Pointwise mean and population standard deviation over trials, in trial
/// order.
pub fn average_series(
    instance: &str,
    learner: &str,
    trials: &[TrialSeries],
) -> Result<Vec<ResultRow>> {
    let Some(first) = trials.first() else {
        return Ok(Vec::new());
    };
    if trials.iter().any(|s| {
        s.checkpoints != first.checkpoints
            || s.regret.len() != first.checkpoints.len()
            || s.pseudo_regret.len() != first.checkpoints.len()
    }) {
        return Err(Error::GridMismatch);
    }
    let n = trials.len();
    Ok(first
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (mean_regret, std_regret) = mean_std(trials.iter().map(|s| s.regret[k]), n);
            let (mean_pseudo_regret, _) = mean_std(trials.iter().map(|s| s.pseudo_regret[k]), n);
            ResultRow {
                instance: instance.to_string(),
                learner: learner.to_string(),
                t,
                mean_regret,
                mean_pseudo_regret,
                std_regret,
                trials: n,
            }
        })
        .collect())
}

/// Worker count from [`THREADS_ENV`]; 0 or unset means automatic.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregatedResult> {
    run_experiment_with_threads(config, threads_from_env())
}

/// Runs `config.trials` trials with streams `(seed, 1..=N)` on up to
/// `threads` workers (0 = automatic).
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<AggregatedResult> {
    config.validate()?;
    let spec = config.resolve_instance()?;
    let grid = config.checkpoints();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let per_trial: Vec<Vec<TrialSeries>> = pool.install(|| {
        (1..=config.trials as u64)
            .into_par_iter()
            .map(|trial| {
                simulate_trial(
                    &config.learners,
                    &spec,
                    config.horizon,
                    RngStream::new(config.seed, trial),
                    &grid,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows = Vec::with_capacity(config.learners.len() * grid.len());
    for (k, learner) in config.learners.iter().enumerate() {
        let series: Vec<TrialSeries> = per_trial.iter().map(|t| t[k].clone()).collect();
        rows.extend(average_series(&spec.id, learner.id.as_str(), &series)?);
    }
    Ok(AggregatedResult { rows })
}
