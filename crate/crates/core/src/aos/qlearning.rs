use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::reward::{calculate_reward, EpisodeSnapshot};
use crate::error::{Error, Result};
use crate::portfolio::Portfolio;

/// Whether the last episode improved the best-found solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchState {
    Stuck = 0,
    Improved = 1,
}

impl SearchState {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Learning parameters. Defaults are the tuned values for the flowshop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AosParams {
    /// Initial exploration probability.
    pub epsilon: f64,
    /// Multiplicative decay applied to epsilon after each selection.
    pub beta: f64,
    /// Learning rate.
    pub alpha: f64,
    /// Discount factor.
    pub gamma: f64,
    /// Weight of the local reward term.
    pub eta: f64,
}

impl Default for AosParams {
    fn default() -> Self {
        Self { epsilon: 0.8, beta: 0.996, alpha: 0.6, gamma: 0.8, eta: 0.3 }
    }
}

impl AosParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} = {v} is out of range")))
            }
        };
        check(self.alpha > 0.0 && self.alpha <= 1.0, "alpha", self.alpha)?;
        check(self.gamma > 0.0 && self.gamma <= 1.0, "gamma", self.gamma)?;
        check((0.0..=1.0).contains(&self.epsilon), "epsilon", self.epsilon)?;
        check(self.beta > 0.0 && self.beta <= 1.0, "beta", self.beta)?;
        check((0.0..=1.0).contains(&self.eta), "eta", self.eta)
    }
}

/// Outcome of one end-of-episode selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub reward: f64,
    pub state: SearchState,
    pub operator: usize,
}

/// Q-table over `{stuck, improved} x operators` with epsilon-greedy selection.
#[derive(Debug, Clone, PartialEq)]
pub struct QLearning {
    q: [Vec<f64>; 2],
    state: SearchState,
    params: AosParams,
    selections: u64,
    all: Vec<usize>,
}

impl QLearning {
    /// Zero-filled table, initial state `Stuck`.
    pub fn new(operators: usize, params: AosParams) -> Result<Self> {
        params.validate()?;
        if operators == 0 {
            return Err(Error::InvalidArgument("Q-table needs at least one operator".into()));
        }
        Ok(Self {
            q: [vec![0.0; operators], vec![0.0; operators]],
            state: SearchState::Stuck,
            params,
            selections: 0,
            all: (0..operators).collect(),
        })
    }

    pub fn q(&self, state: SearchState, operator: usize) -> f64 {
        self.q[state.index()][operator]
    }

    pub fn row(&self, state: SearchState) -> &[f64] {
        &self.q[state.index()]
    }

    pub fn set_q(&mut self, state: SearchState, operator: usize, value: f64) {
        self.q[state.index()][operator] = value;
    }

    pub fn state(&self) -> SearchState {
        self.state
    }

    pub fn params(&self) -> &AosParams {
        &self.params
    }

    /// Current exploration probability, `epsilon_0 * beta^k` after `k` selections.
    pub fn epsilon(&self) -> f64 {
        self.params.epsilon * self.params.beta.powf(self.selections as f64)
    }

    pub fn selections(&self) -> u64 {
        self.selections
    }

    fn check_operator(&self, operator: usize) -> Result<()> {
        if operator >= self.q[0].len() {
            return Err(Error::InvalidArgument(format!(
                "operator {operator} outside the Q-table 0..{}",
                self.q[0].len()
            )));
        }
        Ok(())
    }

    /// `Q(s,a) += alpha * (r + gamma * max_{a' in active} Q(s',a') - Q(s,a))`.
    pub fn update_q(
        &mut self,
        state: SearchState,
        operator: usize,
        next: SearchState,
        reward: f64,
        active: &[usize],
    ) -> Result<()> {
        self.check_operator(operator)?;
        if active.is_empty() {
            return Err(Error::StateCorruption("no active operators for the Q-update".into()));
        }
        let next_row = &self.q[next.index()];
        let mut future = f64::NEG_INFINITY;
        for &a in active {
            self.check_operator(a)?;
            future = future.max(next_row[a]);
        }
        let AosParams { alpha, gamma, .. } = self.params;
        let q = &mut self.q[state.index()][operator];
        *q += alpha * (reward + gamma * future - *q);
        Ok(())
    }

    /// Epsilon-greedy choice among `active` for `state`; greedy ties are broken
    /// uniformly at random. Epsilon decays once per call.
    pub fn select_action<R: Rng + ?Sized>(
        &mut self,
        state: SearchState,
        active: &[usize],
        rng: &mut R,
    ) -> Result<usize> {
        if active.is_empty() {
            return Err(Error::StateCorruption("no active operators to select from".into()));
        }
        let epsilon = self.epsilon();
        self.selections += 1;
        if active.len() == 1 {
            return Ok(active[0]);
        }
        if rng.gen::<f64>() >= epsilon {
            let row = &self.q[state.index()];
            let best = active.iter().map(|&a| row[a]).fold(f64::NEG_INFINITY, f64::max);
            let tied: Vec<usize> = active.iter().copied().filter(|&a| row[a] == best).collect();
            Ok(*tied.choose(rng).expect("non-empty"))
        } else {
            Ok(*active.choose(rng).expect("non-empty"))
        }
    }

    /// End-of-episode step: reward, state transition, Q-update, portfolio
    /// update (when a portfolio is given) and selection of the next operator.
    ///
    /// The Q-update's future term ranges over the active set as it was before
    /// the portfolio update. Without a portfolio every operator stays active.
    pub fn select_operator<R: Rng + ?Sized>(
        &mut self,
        snap: &EpisodeSnapshot,
        portfolio: Option<&mut Portfolio>,
        operator: usize,
        rng: &mut R,
    ) -> Result<Selection> {
        let reward = calculate_reward(snap, self.params.eta)?;
        let next = if snap.improved_best() { SearchState::Improved } else { SearchState::Stuck };
        let next_operator = match portfolio {
            Some(portfolio) => {
                if !portfolio.is_active(operator)? {
                    return Err(Error::StateCorruption(format!(
                        "operator {operator} ran an episode while tabu"
                    )));
                }
                self.update_q(self.state, operator, next, reward, portfolio.active())?;
                portfolio.update(operator, reward)?;
                self.select_action(next, portfolio.active(), rng)?
            }
            None => {
                let all = std::mem::take(&mut self.all);
                let picked = self
                    .update_q(self.state, operator, next, reward, &all)
                    .and_then(|_| self.select_action(next, &all, rng));
                self.all = all;
                picked?
            }
        };
        self.state = next;
        Ok(Selection { reward, state: next, operator: next_operator })
    }

    /// Tab-separated dump of the table: header row of operator ids, then one
    /// row per state.
    pub fn to_table(&self) -> String {
        let mut out = String::from("state");
        for a in &self.all {
            out.push_str(&format!("\t{a}"));
        }
        out.push('\n');
        for (name, row) in ["stuck", "improved"].iter().zip(&self.q) {
            out.push_str(name);
            for v in row {
                out.push_str(&format!("\t{v:.6}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Uniform choice among the active operators.
pub fn select_random<R: Rng + ?Sized>(active: &[usize], rng: &mut R) -> Result<usize> {
    active
        .choose(rng)
        .copied()
        .ok_or_else(|| Error::StateCorruption("no active operators to select from".into()))
}
