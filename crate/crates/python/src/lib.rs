//! Python bindings for `hedgebench`.

use std::sync::Mutex;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hedgebench::bounds::{self, BoundId, BoundParams};
use hedgebench::environments::{self, InstanceParams, InstanceSpec, RngStream, INSTANCE_IDS};
use hedgebench::harness::{self, ExperimentConfig};
use hedgebench::learners::{self, EtaKind, EtaSchedule, LearnerId, LearnerSpec};
use hedgebench::types::{self, LossVector, WeightVector};

create_exception!(hedgebench_py, HedgebenchError, PyValueError);

fn err(e: hedgebench::Error) -> PyErr {
    HedgebenchError::new_err(e.to_string())
}

fn learner_id(name: &str) -> PyResult<LearnerId> {
    name.parse().map_err(err)
}

fn weights(w: Vec<f64>) -> PyResult<WeightVector> {
    WeightVector::new(w).map_err(err)
}

fn losses(l: Vec<f64>) -> PyResult<LossVector> {
    LossVector::new(l).map_err(err)
}

/// Hedge weights `exp(-eta L_i) / sum_j exp(-eta L_j)`, computed stably.
#[pyfunction]
fn hedge_weights(totals: Vec<f64>, eta: f64) -> PyResult<Vec<f64>> {
    Ok(learners::hedge_weights(&totals, eta)
        .map_err(err)?
        .into_inner())
}

/// Uniform weights over the experts with the smallest cumulative loss.
#[pyfunction]
fn ftl_weights(totals: Vec<f64>) -> Vec<f64> {
    learners::ftl_weights(&totals).into_inner()
}

/// Raises `HedgebenchError` unless `w` is a probability vector.
#[pyfunction]
fn validate_simplex(w: Vec<f64>) -> PyResult<()> {
    types::validate_simplex(&w).map_err(err)
}

#[pyfunction]
fn mix_loss(w: Vec<f64>, l: Vec<f64>) -> PyResult<f64> {
    types::mix_loss(&weights(w)?, &losses(l)?).map_err(err)
}

/// Learning rate at round `t`; `kind` is "decreasing", "constant" or
/// "doubling" (the latter two need `horizon` only for "constant").
#[pyfunction]
#[pyo3(signature = (kind, c0, experts, t, horizon=None))]
fn eta_at(kind: &str, c0: f64, experts: usize, t: u64, horizon: Option<u64>) -> PyResult<f64> {
    let kind = match kind {
        "decreasing" => EtaKind::Decreasing,
        "constant" => EtaKind::Constant,
        "doubling" | "doubling-epoch" => EtaKind::DoublingEpoch,
        other => return Err(PyValueError::new_err(format!("unknown schedule: {other}"))),
    };
    EtaSchedule::new(kind, c0, experts, horizon)
        .and_then(|s| s.eta_at(t))
        .map_err(err)
}

#[pyfunction]
fn instance_ids() -> Vec<&'static str> {
    INSTANCE_IDS.to_vec()
}

#[pyfunction]
fn learner_ids() -> Vec<&'static str> {
    LearnerId::ALL.iter().map(|id| id.as_str()).collect()
}

#[pyfunction]
fn bound_ids() -> Vec<&'static str> {
    BoundId::ALL.iter().map(|id| id.as_str()).collect()
}

/// A builtin loss instance.
#[pyclass(frozen, name = "Instance")]
struct PyInstance {
    spec: InstanceSpec,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (name, experts=None, delta=None, best=None, horizon=None, c0=None))]
    fn new(
        name: &str,
        experts: Option<usize>,
        delta: Option<f64>,
        best: Option<usize>,
        horizon: Option<u64>,
        c0: Option<f64>,
    ) -> PyResult<Self> {
        let params = InstanceParams {
            experts,
            delta,
            best,
            horizon,
            c0,
        };
        let spec = environments::builtin_instance(name, &params).map_err(err)?;
        Ok(PyInstance { spec })
    }

    #[getter]
    fn id(&self) -> &str {
        &self.spec.id
    }

    #[getter]
    fn experts(&self) -> usize {
        self.spec.experts()
    }

    #[getter]
    fn i_star(&self) -> Option<usize> {
        self.spec.i_star
    }

    #[getter]
    fn gap(&self) -> Option<f64> {
        self.spec.gap
    }

    #[getter]
    fn is_deterministic(&self) -> bool {
        self.spec.is_deterministic()
    }

    /// Loss vector of round `t` for the given seed and trial.
    #[pyo3(signature = (t, seed=0, trial=0))]
    fn sample(&self, t: u64, seed: u64, trial: u64) -> Vec<f64> {
        environments::sample_losses(&self.spec, t, &RngStream::new(seed, trial))
            .values()
            .to_vec()
    }

    /// `(i_star, gap)`; raises when the gap is undefined.
    fn gap_of(&self) -> PyResult<(usize, f64)> {
        environments::gap_of(&self.spec).map_err(err)
    }

    #[pyo3(signature = (beta, n_samples, seed=0, trial=0))]
    fn bernstein_estimate(
        &self,
        beta: f64,
        n_samples: u64,
        seed: u64,
        trial: u64,
    ) -> PyResult<f64> {
        let est =
            bounds::bernstein_estimate(&self.spec, beta, n_samples, RngStream::new(seed, trial))
                .map_err(err)?;
        Ok(est.b)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance({:?}, experts={})",
            self.spec.id,
            self.spec.experts()
        )
    }
}

/// A learner stepped one round at a time.
#[pyclass(name = "Learner")]
struct PyLearner {
    inner: Mutex<Box<dyn learners::Learner>>,
    id: LearnerId,
    experts: usize,
}

#[pymethods]
impl PyLearner {
    #[new]
    #[pyo3(signature = (name, experts, horizon=1, c0=None))]
    fn new(name: &str, experts: usize, horizon: u64, c0: Option<f64>) -> PyResult<Self> {
        let id = learner_id(name)?;
        let spec = LearnerSpec { id, c0 };
        let inner = spec.build(experts, horizon).map_err(err)?;
        Ok(PyLearner {
            inner: Mutex::new(inner),
            id,
            experts,
        })
    }

    #[getter]
    fn id(&self) -> &'static str {
        self.id.as_str()
    }

    #[getter]
    fn experts(&self) -> usize {
        self.experts
    }

    /// Weights for round `t` after absorbing `previous` (the losses of
    /// round `t - 1`; omit at `t = 1`).
    #[pyo3(signature = (t, previous=None))]
    fn step(&self, t: u64, previous: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let previous = previous.map(losses).transpose()?;
        let mut inner = self.inner.lock().expect("learner lock");
        Ok(inner.step(t, previous.as_ref()).map_err(err)?.into_inner())
    }
}

/// Runs one learner on one instance and returns its regret summary.
#[pyfunction]
#[pyo3(signature = (learner, instance, horizon, seed=0, trial=0, c0=None))]
fn run_trial<'py>(
    py: Python<'py>,
    learner: &str,
    instance: &PyInstance,
    horizon: u64,
    seed: u64,
    trial: u64,
    c0: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = LearnerSpec {
        id: learner_id(learner)?,
        c0,
    };
    let trace = py
        .detach(|| {
            harness::run_trial(
                &spec,
                &instance.spec,
                horizon,
                RngStream::new(seed, trial),
                false,
            )
        })
        .map_err(err)?;
    let summary = trace.summary().map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("horizon", summary.horizon)?;
    d.set_item("regret", summary.regret)?;
    d.set_item("pseudo_regret", trace.pseudo_regret().map_err(err)?)?;
    d.set_item("pseudo_regret_vs", summary.pseudo_regret_vs)?;
    d.set_item("series", summary.series)?;
    Ok(d)
}

/// Averaged regret curves; rows are `(instance, learner, t, mean_regret,
/// mean_pseudo_regret, std_regret, trials)`.
#[pyclass(frozen, name = "ExperimentResult")]
struct PyExperimentResult {
    inner: harness::AggregatedResult,
}

#[pymethods]
impl PyExperimentResult {
    fn rows(&self) -> Vec<(String, String, u64, f64, f64, f64, usize)> {
        self.inner
            .rows
            .iter()
            .map(|r| {
                (
                    r.instance.clone(),
                    r.learner.clone(),
                    r.t,
                    r.mean_regret,
                    r.mean_pseudo_regret,
                    r.std_regret,
                    r.trials,
                )
            })
            .collect()
    }

    /// Mean regret of `learner` at checkpoint `t`.
    fn mean_regret(&self, learner: &str, t: u64) -> Option<f64> {
        self.inner.at(learner, t).map(|r| r.mean_regret)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

#[pyfunction]
#[pyo3(signature = (
    instance, learners, horizon, trials=1, seed=0, c0=None,
    experts=None, delta=None, best=None, checkpoint_every=0
))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    instance: &str,
    learners: Vec<String>,
    horizon: u64,
    trials: usize,
    seed: u64,
    c0: Option<std::collections::BTreeMap<String, f64>>,
    experts: Option<usize>,
    delta: Option<f64>,
    best: Option<usize>,
    checkpoint_every: u64,
) -> PyResult<PyExperimentResult> {
    let specs = learners
        .iter()
        .map(|s| learner_id(s).map(LearnerSpec::new))
        .collect::<PyResult<Vec<_>>>()?;
    let mut cfg = ExperimentConfig::new(instance, specs, horizon);
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.checkpoint_every = checkpoint_every;
    cfg.params = InstanceParams {
        experts,
        delta,
        best,
        ..Default::default()
    };
    for (name, value) in c0.unwrap_or_default() {
        harness::set_c0(&mut cfg.learners, learner_id(&name)?, value).map_err(err)?;
    }
    let inner = py.detach(|| harness::run_experiment(&cfg)).map_err(err)?;
    Ok(PyExperimentResult { inner })
}

/// Evaluates a closed-form bound; returns `{id, value, direction, validity}`.
#[pyfunction]
#[pyo3(signature = (
    id, experts=None, horizon=None, delta=None, c0=None, c1=None, tau0=None,
    beta=None, b=None, epsilon=None, second_order_c1=None, second_order_c2=None
))]
#[allow(clippy::too_many_arguments)]
fn theory_value<'py>(
    py: Python<'py>,
    id: &str,
    experts: Option<usize>,
    horizon: Option<u64>,
    delta: Option<f64>,
    c0: Option<f64>,
    c1: Option<f64>,
    tau0: Option<u64>,
    beta: Option<f64>,
    b: Option<f64>,
    epsilon: Option<f64>,
    second_order_c1: Option<f64>,
    second_order_c2: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let id: BoundId = id.parse().map_err(err)?;
    let params = BoundParams {
        experts,
        horizon,
        delta,
        c0,
        c1,
        tau0,
        beta,
        b,
        epsilon,
        second_order_c1,
        second_order_c2,
    };
    let v = bounds::theory_value(id, &params).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("id", v.id.as_str())?;
    d.set_item("value", v.value)?;
    d.set_item("direction", v.direction.as_str())?;
    d.set_item("validity", v.validity)?;
    d.set_item("defaulted", v.defaulted)?;
    Ok(d)
}

/// Closed-form regret of Constant Hedge on the constant-loss instance.
#[pyfunction]
fn constant_hedge_exact_regret(horizon: u64, experts: usize, c0: f64) -> PyResult<f64> {
    bounds::constant_hedge_exact_regret(horizon, experts, c0).map_err(err)
}

#[pymodule]
fn hedgebench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HedgebenchError", m.py().get_type::<HedgebenchError>())?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyLearner>()?;
    m.add_class::<PyExperimentResult>()?;
    m.add_function(wrap_pyfunction!(hedge_weights, m)?)?;
    m.add_function(wrap_pyfunction!(ftl_weights, m)?)?;
    m.add_function(wrap_pyfunction!(validate_simplex, m)?)?;
    m.add_function(wrap_pyfunction!(mix_loss, m)?)?;
    m.add_function(wrap_pyfunction!(eta_at, m)?)?;
    m.add_function(wrap_pyfunction!(instance_ids, m)?)?;
    m.add_function(wrap_pyfunction!(learner_ids, m)?)?;
    m.add_function(wrap_pyfunction!(bound_ids, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(theory_value, m)?)?;
    m.add_function(wrap_pyfunction!(constant_hedge_exact_regret, m)?)?;
    m.add("CSV_HEADER", harness::CSV_HEADER)?;
    Ok(())
}
