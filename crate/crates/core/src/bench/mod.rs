mod experiment;
mod metrics;
mod parse;
mod registry;
pub mod taillard;
mod wilcoxon;

pub use experiment::{
    run_experiment, run_seed, BudgetMode, ExperimentPlan, ExperimentReport, PairwiseTest, PlanEcho,
    PlanInstance, RunRecord, SetSummary, Skipped, VariantSpec, CSV_HEADER,
};
pub use metrics::{arpd, normalize, rpd, time_budget};
pub use parse::{parse_instance, write_instance, Format, ParseError, ParseErrorKind};
pub use registry::BestKnownRegistry;
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonOutcome, WilcoxonResult, MIN_PAIRS};
