mod config;
mod metropolis;
mod solver;

pub use config::{EngineConfig, Termination, Variant};
pub use metropolis::{accept_solution, accepts, compute_temperature};
pub use solver::{first_action, run, run_dqig, run_ig, EpisodeRecord, RunResult};
