//! Synthetic users, content and follow graph, and the five-condition experiment.

pub mod config;
pub mod pipeline;
pub mod run;
pub mod world;

pub use config::{
    default_prior, ClickModel, RelevanceMode, ScenarioConfig, SocialConfig, WorldConfig,
};
pub use pipeline::{Recommendation, Recommender};
pub use run::{
    run_condition, run_conditions, run_experiment, ConditionRun, Experiment, ListRecord,
};
pub use world::{generate_world, GroundTruth, Observables, World};
