//! Destruction/construction perturbation operators.

use std::collections::BTreeSet;
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pfsp::{
    makespan_with, validate_sequence, Instance, InsertionEvaluator, Job, PartialSolution, Solution,
    Time,
};

/// How removed jobs are put back into the partial sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionStrategy {
    /// Best position, idle-time tie-breaking.
    Best,
    /// Uniformly random position.
    Random,
    /// Best position with probability `fraction`, otherwise a random one.
    SemiRandom { fraction: f64 },
    /// Position `k` drawn with weight `(C_worst - C_k + 1)^greediness`.
    Probabilistic { greediness: f64 },
}

impl ConstructionStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::SemiRandom { fraction } if !(0.0..=1.0).contains(&fraction) => Err(
                Error::InvalidArgument(format!("semi-random fraction {fraction} outside [0, 1]")),
            ),
            Self::Probabilistic { greediness } if !(greediness > 0.0 && greediness.is_finite()) => {
                Err(Error::InvalidArgument(format!(
                    "greediness {greediness} must be a positive finite number"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Best => "best",
            Self::Random => "random",
            Self::SemiRandom { .. } => "semi_random",
            Self::Probabilistic { .. } => "probabilistic",
        }
    }

    /// The four strategies with the given parameters, in catalog order.
    pub fn standard_set(fraction: f64, greediness: f64) -> Vec<Self> {
        vec![
            Self::Best,
            Self::Random,
            Self::SemiRandom { fraction },
            Self::Probabilistic { greediness },
        ]
    }
}

impl fmt::Display for ConstructionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `best`, `random`, `semi_random[:fraction]` or
/// `probabilistic[:greediness]`; omitted parameters take 0.5 and 2.
impl std::str::FromStr for ConstructionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.trim().split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.trim(), None),
        };
        let param = |default: f64| -> Result<f64> {
            arg.map_or(Ok(default), |a| {
                a.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad parameter in '{s}'")))
            })
        };
        let strategy = match (name.to_ascii_lowercase().replace('-', "_").as_str(), arg) {
            ("best", None) => Self::Best,
            ("random", None) => Self::Random,
            ("semi_random", _) => Self::SemiRandom { fraction: param(0.5)? },
            ("probabilistic", _) => Self::Probabilistic { greediness: param(2.0)? },
            _ => return Err(Error::InvalidArgument(format!("unknown construction strategy '{s}'"))),
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

/// A `(destruction size, construction strategy)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    pub id: usize,
    pub destruction: usize,
    pub construction: ConstructionStrategy,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} (d={}, {})", self.id, self.destruction, self.construction)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCatalog {
    operators: Vec<Operator>,
    destruction_sizes: Vec<usize>,
}

impl OperatorCatalog {
    /// Cross product of destruction sizes and strategies, ids assigned
    /// d-major then strategy. Duplicates in either input are dropped.
    pub fn build(
        destruction_sizes: impl IntoIterator<Item = usize>,
        strategies: &[ConstructionStrategy],
    ) -> Result<Self> {
        let sizes: BTreeSet<usize> = destruction_sizes.into_iter().collect();
        if sizes.is_empty() {
            return Err(Error::InvalidArgument("no destruction sizes".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidArgument("destruction size must be positive".into()));
        }
        let mut unique: Vec<ConstructionStrategy> = Vec::with_capacity(strategies.len());
        for s in strategies {
            s.validate()?;
            if !unique.contains(s) {
                unique.push(*s);
            }
        }
        if unique.is_empty() {
            return Err(Error::InvalidArgument("no construction strategies".into()));
        }
        let destruction_sizes: Vec<usize> = sizes.into_iter().collect();
        let operators = destruction_sizes
            .iter()
            .flat_map(|&d| unique.iter().map(move |&s| (d, s)))
            .enumerate()
            .map(|(id, (destruction, construction))| Operator { id, destruction, construction })
            .collect();
        Ok(Self { operators, destruction_sizes })
    }

    /// The catalog restricted to operators applicable on `jobs` jobs
    /// (`d < jobs`), renumbered. When no size fits, the single size `jobs - 1`
    /// is used instead. Needs `jobs >= 2`.
    pub fn for_jobs(&self, jobs: usize) -> Result<Self> {
        if jobs < 2 {
            return Err(Error::InvalidArgument(format!(
                "cannot perturb an instance with {jobs} job(s)"
            )));
        }
        let mut sizes: Vec<usize> =
            self.destruction_sizes.iter().copied().filter(|&d| d < jobs).collect();
        if sizes.is_empty() {
            sizes.push(jobs - 1);
        }
        Self::build(sizes, &self.strategies())
    }

    pub fn strategies(&self) -> Vec<ConstructionStrategy> {
        let mut out: Vec<ConstructionStrategy> = Vec::new();
        for op in &self.operators {
            if !out.contains(&op.construction) {
                out.push(op.construction);
            }
        }
        out
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn destruction_sizes(&self) -> &[usize] {
        &self.destruction_sizes
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Operator> {
        self.operators.get(id)
    }
}

impl std::ops::Index<usize> for OperatorCatalog {
    type Output = Operator;

    fn index(&self, id: usize) -> &Operator {
        &self.operators[id]
    }
}

/// Removes `d` distinct jobs chosen uniformly at random. Surviving jobs keep
/// their relative order; removed jobs are listed in removal order.
pub fn destruct<R: Rng + ?Sized>(sequence: &[Job], d: usize, rng: &mut R) -> Result<PartialSolution> {
    if d == 0 || d >= sequence.len() {
        return Err(Error::InvalidArgument(format!(
            "destruction size {d} must be in 1..{}",
            sequence.len()
        )));
    }
    let mut remaining = sequence.to_vec();
    let removed = (0..d)
        .map(|_| {
            let at = rng.gen_range(0..remaining.len());
            remaining.remove(at)
        })
        .collect();
    Ok(PartialSolution { sequence: remaining, removed })
}

/// Reinserts the removed jobs one at a time, in removal order.
#[derive(Debug, Default, Clone)]
pub struct Constructor {
    eval: InsertionEvaluator,
    weights: Vec<f64>,
    front: Vec<Time>,
}

impl Constructor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consumes `partial` and returns the completed solution. Inputs are not
    /// validated; see [`construct`] for the checked entry point.
    pub fn apply<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        partial: PartialSolution,
        strategy: ConstructionStrategy,
        rng: &mut R,
    ) -> Solution {
        let PartialSolution { mut sequence, removed } = partial;
        // makespan of the last insertion, when the strategy evaluated it
        let mut makespan = None;
        for job in removed {
            let pos = match strategy {
                ConstructionStrategy::Best => {
                    let (pos, c) = self.eval.best_position(instance, &sequence, job, true);
                    makespan = Some(c);
                    pos
                }
                ConstructionStrategy::Random => {
                    makespan = None;
                    rng.gen_range(0..=sequence.len())
                }
                ConstructionStrategy::SemiRandom { fraction } => {
                    if rng.gen_bool(fraction) {
                        let (pos, c) = self.eval.best_position(instance, &sequence, job, true);
                        makespan = Some(c);
                        pos
                    } else {
                        makespan = None;
                        rng.gen_range(0..=sequence.len())
                    }
                }
                ConstructionStrategy::Probabilistic { greediness } => {
                    let costs = self.eval.evaluate(instance, &sequence, job);
                    let worst = *costs.iter().max().expect("at least one position");
                    self.weights.clear();
                    self.weights.extend(
                        costs.iter().map(|&c| ((worst - c + 1) as f64).powf(greediness)),
                    );
                    let pos = WeightedIndex::new(&self.weights)
                        .expect("weights are positive")
                        .sample(rng);
                    makespan = Some(costs[pos]);
                    pos
                }
            };
            sequence.insert(pos, job);
        }
        let makespan = makespan.unwrap_or_else(|| {
            self.front.resize(instance.machines(), 0);
            makespan_with(instance, &sequence, &mut self.front)
        });
        Solution::new(sequence, makespan)
    }
}

/// Checked construction step.
pub fn construct<R: Rng + ?Sized>(
    instance: &Instance,
    partial: &PartialSolution,
    strategy: ConstructionStrategy,
    rng: &mut R,
) -> Result<Solution> {
    if partial.removed.is_empty() {
        return Err(Error::InvalidArgument("no removed jobs to reinsert".into()));
    }
    strategy.validate()?;
    let mut all = partial.sequence.clone();
    all.extend_from_slice(&partial.removed);
    validate_sequence(instance, &all)?;
    if all.len() != instance.jobs() {
        return Err(Error::InvalidArgument(format!(
            "partial solution covers {} of {} jobs",
            all.len(),
            instance.jobs()
        )));
    }
    Ok(Constructor::new().apply(instance, partial.clone(), strategy, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfsp::compute_makespan;
    use rand::rngs::mock::StepRng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> Instance {
        Instance::from_rows(vec![vec![2, 1, 3], vec![3, 2, 1]]).unwrap()
    }

    #[test]
    fn parses_strategies() {
        use ConstructionStrategy::*;
        assert_eq!("best".parse::<ConstructionStrategy>().unwrap(), Best);
        assert_eq!("Random".parse::<ConstructionStrategy>().unwrap(), Random);
        assert_eq!("semi-random".parse::<ConstructionStrategy>().unwrap(), SemiRandom { fraction: 0.5 });
        assert_eq!("probabilistic:3".parse::<ConstructionStrategy>().unwrap(), Probabilistic { greediness: 3.0 });
        for bad in ["best:1", "semi_random:2", "probabilistic:x", "greedy"] {
            assert!(bad.parse::<ConstructionStrategy>().is_err(), "{bad}");
        }
    }

    #[test]
    fn destruct_with_forced_index() {
        let mut rng = StepRng::new(0, 0);
        let p = destruct(&[2, 0, 1], 1, &mut rng).unwrap();
        assert_eq!(p.sequence, vec![0, 1]);
        assert_eq!(p.removed, vec![2]);
    }

    #[test]
    fn destruct_size_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(destruct(&[0, 1, 2], 0, &mut rng).is_err());
        assert!(destruct(&[0, 1, 2], 3, &mut rng).is_err());
        let p = destruct(&[0, 1, 2, 3], 3, &mut rng).unwrap();
        assert_eq!(p.sequence.len(), 1);
        assert_eq!(p.removed.len(), 3);
    }

    #[test]
    fn destruct_preserves_survivor_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let seq = vec![5, 3, 8, 1, 0, 2, 7, 4, 6];
        for _ in 0..100 {
            let p = destruct(&seq, 4, &mut rng).unwrap();
            let filtered: Vec<Job> = seq.iter().copied().filter(|j| !p.removed.contains(j)).collect();
            assert_eq!(p.sequence, filtered);
        }
    }

    #[test]
    fn destruct_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let seq: Vec<Job> = (0..10).collect();
        let mut counts = [0usize; 10];
        let trials = 10_000;
        for _ in 0..trials {
            for j in destruct(&seq, 3, &mut rng).unwrap().removed {
                counts[j] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.3).abs() <= 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn best_construction_on_small_instance() {
        // [2,0,1]=10, [0,2,1]=8, [0,1,2]=8 with equal idle -> position 1
        let partial = PartialSolution { sequence: vec![0, 1], removed: vec![2] };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sol = construct(&small(), &partial, ConstructionStrategy::Best, &mut rng).unwrap();
        assert_eq!(sol.sequence, vec![0, 2, 1]);
        assert_eq!(sol.makespan, 8);
    }

    #[test]
    fn random_construction_with_forced_head() {
        let partial = PartialSolution { sequence: vec![0, 1], removed: vec![2] };
        let sol = construct(&small(), &partial, ConstructionStrategy::Random, &mut StepRng::new(0, 0))
            .unwrap();
        assert_eq!(sol.sequence, vec![2, 0, 1]);
        assert_eq!(sol.makespan, 10);
    }

    #[test]
    fn probabilistic_is_uniform_when_costs_tie() {
        // one machine: every insertion position has the same makespan
        let inst = Instance::from_rows(vec![vec![1, 2, 3]]).unwrap();
        let partial = PartialSolution { sequence: vec![0, 1], removed: vec![2] };
        let strategy = ConstructionStrategy::Probabilistic { greediness: 2.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut counts = [0usize; 3];
        let trials = 9000;
        for _ in 0..trials {
            let sol = construct(&inst, &partial, strategy, &mut rng).unwrap();
            counts[sol.sequence.iter().position(|&j| j == 2).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn probabilistic_prefers_cheaper_positions() {
        // costs 10, 8, 8 -> weights 1, 9, 9
        let partial = PartialSolution { sequence: vec![0, 1], removed: vec![2] };
        let strategy = ConstructionStrategy::Probabilistic { greediness: 2.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut head = 0;
        let trials = 19_000;
        for _ in 0..trials {
            let sol = construct(&small(), &partial, strategy, &mut rng).unwrap();
            head += usize::from(sol.sequence[0] == 2);
        }
        assert!((head as f64 / trials as f64 - 1.0 / 19.0).abs() < 0.01);
    }

    #[test]
    fn construction_rejects_empty_removed_set() {
        let partial = PartialSolution { sequence: vec![0, 1, 2], removed: vec![] };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(construct(&small(), &partial, ConstructionStrategy::Best, &mut rng).is_err());
    }

    #[test]
    fn every_strategy_yields_a_full_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let rows = (0..4).map(|_| (0..12).map(|_| rng.gen_range(1..60)).collect()).collect();
        let inst = Instance::from_rows(rows).unwrap();
        let seq: Vec<Job> = (0..12).collect();
        for strategy in ConstructionStrategy::standard_set(0.5, 2.0) {
            for _ in 0..50 {
                let partial = destruct(&seq, 5, &mut rng).unwrap();
                let sol = construct(&inst, &partial, strategy, &mut rng).unwrap();
                let mut sorted = sol.sequence.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, seq);
                assert_eq!(sol.makespan, compute_makespan(&inst, &sol.sequence).unwrap());
            }
        }
    }

    #[test]
    fn catalog_cross_product() {
        let cat = OperatorCatalog::build([2, 4], &[ConstructionStrategy::Best]).unwrap();
        assert_eq!(cat.len(), 2);
        assert_eq!(cat[0].destruction, 2);
        assert_eq!(cat[1].id, 1);

        let full =
            OperatorCatalog::build(2..=8, &ConstructionStrategy::standard_set(0.5, 2.0)).unwrap();
        assert_eq!(full.len(), 28);
        assert!(full.operators().iter().enumerate().all(|(i, op)| op.id == i));
        assert_eq!(full[5].destruction, 3);
        assert_eq!(full[5].construction, ConstructionStrategy::Random);

        let dup = OperatorCatalog::build([3, 3, 2], &[ConstructionStrategy::Best]).unwrap();
        assert_eq!(dup.destruction_sizes(), &[2, 3]);
    }

    #[test]
    fn catalog_rejects_empty_inputs() {
        assert!(OperatorCatalog::build([], &[ConstructionStrategy::Best]).is_err());
        assert!(OperatorCatalog::build([2], &[]).is_err());
        assert!(OperatorCatalog::build(
            [2],
            &[ConstructionStrategy::SemiRandom { fraction: 1.5 }]
        )
        .is_err());
    }

    #[test]
    fn catalog_restriction_filters_large_sizes() {
        let full =
            OperatorCatalog::build(2..=8, &ConstructionStrategy::standard_set(0.5, 2.0)).unwrap();
        let five = full.for_jobs(5).unwrap();
        assert_eq!(five.destruction_sizes(), &[2, 3, 4]);
        assert_eq!(five.len(), 12);
        let two = full.for_jobs(2).unwrap();
        assert_eq!(two.destruction_sizes(), &[1]);
        assert!(full.for_jobs(1).is_err());
        assert_eq!(full.for_jobs(100).unwrap(), full);
    }
}
