use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{EngineConfig, Termination, Variant};
use super::metropolis::{accepts, compute_temperature};
use crate::aos::{
    calculate_reward, select_random, EpisodeOutcome, EpisodeSnapshot, QLearning, ScoreState,
    SearchState,
};
use crate::error::{Error, Result};
use crate::operators::{destruct, Constructor, Operator, OperatorCatalog};
use crate::pfsp::{
    makespan_with, neh_construct, neh_construct_with_local_search, Instance, Job, LocalSearch,
    Solution, Time,
};
use crate::portfolio::Portfolio;

/// One line of the per-episode trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeRecord {
    pub episode: u64,
    pub operator: usize,
    pub destruction: usize,
    pub strategy: &'static str,
    pub reward: f64,
    /// Search state after the episode.
    pub state: SearchState,
    /// Active portfolio size after the end-of-episode update.
    pub active: usize,
    pub best_makespan: Time,
    pub current_makespan: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub best_sequence: Vec<Job>,
    pub best_makespan: Time,
    /// Makespan after NEH and the initial local search.
    pub initial_makespan: Time,
    pub elapsed_ms: u64,
    pub iterations: u64,
    pub episodes: u64,
    pub trace: Vec<EpisodeRecord>,
    /// Time spent in end-of-episode bookkeeping (reward, learning update,
    /// portfolio update, selection), summed over episodes.
    pub selection_nanos: u64,
    /// Final Q-table for the Q-learning variants.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_table: Option<String>,
}

impl RunResult {
    /// Trace as line-delimited JSON.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace records serialize") + "\n")
            .collect()
    }

    pub fn mean_selection_nanos(&self) -> f64 {
        if self.episodes == 0 {
            0.0
        } else {
            self.selection_nanos as f64 / self.episodes as f64
        }
    }
}

/// Uniform draw over the whole catalog.
pub fn first_action<R: Rng + ?Sized>(catalog: &OperatorCatalog, rng: &mut R) -> Result<usize> {
    if catalog.is_empty() {
        return Err(Error::Config("empty operator catalog".into()));
    }
    Ok(rng.gen_range(0..catalog.len()))
}

struct Budget {
    start: Instant,
    termination: Termination,
}

impl Budget {
    fn exhausted(&self, iterations: u64) -> bool {
        match self.termination {
            Termination::Iterations(max) => iterations >= max,
            Termination::Millis(ms) => self.start.elapsed() >= Duration::from_millis(ms),
        }
    }
}

/// Shared iterated-greedy machinery: current and best solutions plus the
/// working buffers of one run.
struct Search<'a> {
    instance: &'a Instance,
    rng: ChaCha8Rng,
    local_search: LocalSearch,
    constructor: Constructor,
    front: Vec<Time>,
    current: Solution,
    best: Solution,
    temperature: f64,
    partial_local_search: bool,
    iterations: u64,
}

impl<'a> Search<'a> {
    fn start(instance: &'a Instance, config: &EngineConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut local_search = LocalSearch::new();
        let mut current = if config.neh_local_search {
            neh_construct_with_local_search(instance, &mut rng)
        } else {
            neh_construct(instance)
        };
        current.makespan =
            local_search.run(instance, &mut current.sequence, current.makespan, &mut rng);
        Self {
            instance,
            rng,
            local_search,
            constructor: Constructor::new(),
            front: vec![0; instance.machines()],
            best: current.clone(),
            current,
            temperature: compute_temperature(instance, config.tau),
            partial_local_search: config.partial_local_search(),
            iterations: 0,
        }
    }

    /// One destruction/construction/local-search/acceptance step. Returns
    /// whether the candidate replaced the current solution.
    fn iterate(&mut self, op: &Operator) -> bool {
        let mut partial = destruct(&self.current.sequence, op.destruction, &mut self.rng)
            .expect("catalog restricted to d < n");
        if self.partial_local_search {
            let c = makespan_with(self.instance, &partial.sequence, &mut self.front);
            self.local_search.run(self.instance, &mut partial.sequence, c, &mut self.rng);
        }
        let mut candidate =
            self.constructor.apply(self.instance, partial, op.construction, &mut self.rng);
        candidate.makespan = self.local_search.run(
            self.instance,
            &mut candidate.sequence,
            candidate.makespan,
            &mut self.rng,
        );
        self.iterations += 1;
        if candidate.makespan < self.best.makespan {
            self.best = candidate.clone();
        }
        if accepts(self.current.makespan, candidate.makespan, self.temperature, &mut self.rng) {
            self.current = candidate;
            true
        } else {
            false
        }
    }

    fn finish(self, budget: &Budget, episodes: u64, trace: Vec<EpisodeRecord>) -> RunResult {
        RunResult {
            best_sequence: self.best.sequence,
            best_makespan: self.best.makespan,
            initial_makespan: 0,
            elapsed_ms: budget.start.elapsed().as_millis() as u64,
            iterations: self.iterations,
            episodes,
            trace,
            selection_nanos: 0,
            q_table: None,
        }
    }
}

fn trivial_result(instance: &Instance, start: Instant) -> RunResult {
    let sol = neh_construct(instance);
    RunResult {
        best_sequence: sol.sequence,
        best_makespan: sol.makespan,
        initial_makespan: sol.makespan,
        elapsed_ms: start.elapsed().as_millis() as u64,
        iterations: 0,
        episodes: 0,
        trace: Vec::new(),
        selection_nanos: 0,
        q_table: None,
    }
}

/// Runs the configured variant.
pub fn run(instance: &Instance, config: &EngineConfig) -> Result<RunResult> {
    match config.variant {
        Variant::Igrs => run_ig(instance, config),
        _ => run_dqig(instance, config),
    }
}

/// Iterated greedy with a single operator: best insertion and the baseline
/// destruction size.
pub fn run_ig(instance: &Instance, config: &EngineConfig) -> Result<RunResult> {
    config.validate()?;
    let budget = Budget { start: Instant::now(), termination: config.termination };
    if instance.jobs() < 2 {
        return Ok(trivial_result(instance, budget.start));
    }
    let catalog = OperatorCatalog::build(
        [config.baseline_destruction],
        &[crate::operators::ConstructionStrategy::Best],
    )?
    .for_jobs(instance.jobs())?;
    let op = catalog[0];
    let mut search = Search::start(instance, config);
    let initial = search.current.makespan;
    while !budget.exhausted(search.iterations) {
        search.iterate(&op);
    }
    let mut result = search.finish(&budget, 0, Vec::new());
    result.initial_makespan = initial;
    Ok(result)
}

enum Selector {
    Learning { q: QLearning, portfolio: Option<Portfolio> },
    Random { portfolio: Portfolio },
    Score { scores: ScoreState },
}

impl Selector {
    fn active_len(&self, catalog: usize) -> usize {
        match self {
            Self::Learning { portfolio: Some(p), .. } | Self::Random { portfolio: p } => {
                p.active().len()
            }
            _ => catalog,
        }
    }
}

/// Episode-based iterated greedy with operator management. The variant picks
/// the selector run at the end of each episode.
pub fn run_dqig(instance: &Instance, config: &EngineConfig) -> Result<RunResult> {
    config.validate()?;
    let budget = Budget { start: Instant::now(), termination: config.termination };
    if instance.jobs() < 2 {
        return Ok(trivial_result(instance, budget.start));
    }
    let catalog = config.catalog()?.for_jobs(instance.jobs())?;
    let mut search = Search::start(instance, config);
    let initial = search.current.makespan;

    let ops = catalog.len();
    let mut selector = match config.variant {
        Variant::Dqig => Selector::Learning {
            q: QLearning::new(ops, config.aos)?,
            portfolio: Some(Portfolio::new(ops, config.tenure)?),
        },
        Variant::Sqig => Selector::Learning { q: QLearning::new(ops, config.aos)?, portfolio: None },
        Variant::Rig => Selector::Random { portfolio: Portfolio::new(ops, config.tenure)? },
        Variant::Scig => Selector::Score { scores: ScoreState::new(ops, config.score)? },
        Variant::Igrs => unreachable!("handled by run_ig"),
    };
    let mut operator = first_action(&catalog, &mut search.rng)?;
    let mut trace = Vec::new();
    let mut selection = Duration::ZERO;
    let mut episodes = 0u64;

    while !budget.exhausted(search.iterations) {
        let op = catalog[operator];
        let mut snap = EpisodeSnapshot::start(search.current.makespan, search.best.makespan);
        let mut accepted_any = false;
        for _ in 0..config.episode_length {
            if budget.exhausted(search.iterations) {
                break;
            }
            accepted_any |= search.iterate(&op);
            snap.observe(search.current.makespan, search.best.makespan);
        }

        let timer = Instant::now();
        let state;
        let (reward, next) = match &mut selector {
            Selector::Learning { q, portfolio } => {
                let sel = q.select_operator(&snap, portfolio.as_mut(), operator, &mut search.rng)?;
                if let Some(p) = portfolio {
                    debug_assert!(p.is_active(sel.operator)?, "selected a tabu operator");
                }
                state = sel.state;
                (sel.reward, sel.operator)
            }
            Selector::Random { portfolio } => {
                let reward = calculate_reward(&snap, config.aos.eta)?;
                state = if snap.improved_best() { SearchState::Improved } else { SearchState::Stuck };
                portfolio.update(operator, reward)?;
                (reward, select_random(portfolio.active(), &mut search.rng)?)
            }
            Selector::Score { scores } => {
                let reward = calculate_reward(&snap, config.aos.eta)?;
                state = if snap.improved_best() { SearchState::Improved } else { SearchState::Stuck };
                let outcome = if snap.improved_best() {
                    EpisodeOutcome::NewBest
                } else if snap.improved_local() {
                    EpisodeOutcome::LocalImprovement
                } else if accepted_any {
                    EpisodeOutcome::Accepted
                } else {
                    EpisodeOutcome::Rejected
                };
                scores.record(operator, outcome);
                (reward, scores.select(&mut search.rng)?)
            }
        };
        selection += timer.elapsed();

        trace.push(EpisodeRecord {
            episode: episodes,
            operator,
            destruction: op.destruction,
            strategy: op.construction.name(),
            reward,
            state,
            active: selector.active_len(ops),
            best_makespan: search.best.makespan,
            current_makespan: search.current.makespan,
        });
        episodes += 1;
        operator = next;
    }

    let q_table = match &selector {
        Selector::Learning { q, .. } => Some(q.to_table()),
        _ => None,
    };
    let mut result = search.finish(&budget, episodes, trace);
    result.initial_makespan = initial;
    result.selection_nanos = selection.as_nanos() as u64;
    result.q_table = q_table;
    Ok(result)
}
