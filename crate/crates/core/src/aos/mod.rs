//! Adaptive operator selection: episode rewards, the Q-learning selector, and
//! the random and score-based alternatives.

mod qlearning;
mod reward;
mod score;

pub use qlearning::{select_random, AosParams, QLearning, SearchState, Selection};
pub use reward::{calculate_reward, EpisodeSnapshot};
pub use score::{EpisodeOutcome, ScoreParams, ScoreState};
