use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How an episode went, for score accrual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeOutcome {
    NewBest,
    LocalImprovement,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreParams {
    /// Episodes per weight-update segment.
    pub segment_length: usize,
    /// Reaction factor `rho` in `w <- (1 - rho) w + rho * score / uses`.
    pub reaction: f64,
    /// Scores for a new best, a local improvement, and an accepted
    /// non-improving episode.
    pub scores: [f64; 3],
}

impl Default for ScoreParams {
    fn default() -> Self {
        Self { segment_length: 20, reaction: 0.1, scores: [10.0, 5.0, 1.0] }
    }
}

/// Roulette-wheel operator selection with segment-wise adaptive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreState {
    weights: Vec<f64>,
    scores: Vec<f64>,
    uses: Vec<u32>,
    episodes: usize,
    params: ScoreParams,
}

impl ScoreState {
    pub fn new(operators: usize, params: ScoreParams) -> Result<Self> {
        if operators == 0 {
            return Err(Error::InvalidArgument("score state needs at least one operator".into()));
        }
        if params.segment_length == 0 || !(0.0..=1.0).contains(&params.reaction) {
            return Err(Error::Config(format!("invalid score parameters {params:?}")));
        }
        if params.scores.iter().any(|s| *s < 0.0) {
            return Err(Error::Config("scores must be non-negative".into()));
        }
        Ok(Self {
            weights: vec![1.0; operators],
            scores: vec![0.0; operators],
            uses: vec![0; operators],
            episodes: 0,
            params,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.weights.len() || weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be non-negative, one per operator".into()));
        }
        self.weights = weights;
        Ok(())
    }

    /// Draws an operator with probability proportional to its weight.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let dist = WeightedIndex::new(&self.weights).map_err(|e| {
            Error::StateCorruption(format!("operator weights unusable for selection: {e}"))
        })?;
        Ok(dist.sample(rng))
    }

    /// Credits `operator` for one episode; closes the segment when it is full.
    pub fn record(&mut self, operator: usize, outcome: EpisodeOutcome) {
        let [best, local, accepted] = self.params.scores;
        self.scores[operator] += match outcome {
            EpisodeOutcome::NewBest => best,
            EpisodeOutcome::LocalImprovement => local,
            EpisodeOutcome::Accepted => accepted,
            EpisodeOutcome::Rejected => 0.0,
        };
        self.uses[operator] += 1;
        self.episodes += 1;
        if self.episodes == self.params.segment_length {
            self.close_segment();
        }
    }

    fn close_segment(&mut self) {
        let rho = self.params.reaction;
        for ((w, s), u) in self.weights.iter_mut().zip(&mut self.scores).zip(&mut self.uses) {
            if *u > 0 {
                *w = (1.0 - rho) * *w + rho * (*s / f64::from(*u));
            }
            *s = 0.0;
            *u = 0;
        }
        self.episodes = 0;
    }
}
