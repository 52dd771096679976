//! Permutation flowshop primitives: instances, makespan evaluation, the
//! accelerated insertion neighbourhood, NEH and insertion local search.

mod insertion;
mod instance;
mod local_search;
mod makespan;
mod neh;

pub use insertion::{best_insertion_position, evaluate_all_insertions, InsertionEvaluator};
pub use instance::{Instance, Job, PartialSolution, Solution, Time};
pub use local_search::{insertion_local_search, LocalSearch};
pub(crate) use makespan::makespan_with;
pub use makespan::{compute_makespan, idle_time, lower_bound, validate_sequence};
pub use neh::{neh_construct, neh_construct_with_local_search, neh_order};
