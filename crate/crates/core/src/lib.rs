//! Prediction with expert advice under full information: Hedge with several
//! learning-rate schedules, AdaHedge and Follow-the-Leader, a catalogue of
//! stochastic and adversarial loss instances, a seeded Monte-Carlo harness and
//! closed-form regret bounds to compare against.
//!
//! Experts and rounds: experts are indexed `0..M`, rounds `1..=T`.

pub mod bounds;
pub mod cli;
pub mod environments;
pub mod error;
pub mod harness;
pub mod learners;
pub mod regret;
pub mod types;

pub use bounds::{theory_value, BoundId, BoundParams, BoundValue};
pub use environments::{builtin_instance, InstanceKind, InstanceParams, InstanceSpec, RngStream};
pub use error::{Error, Result};
pub use harness::{run_experiment, AggregatedResult, ExperimentConfig, ResultRow};
pub use learners::{Learner, LearnerId, LearnerSpec};
pub use types::{mix_loss, validate_simplex, LossVector, WeightVector};
