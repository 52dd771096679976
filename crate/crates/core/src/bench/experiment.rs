use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{arpd, normalize, rpd, time_budget};
use super::registry::BestKnownRegistry;
use super::wilcoxon::{wilcoxon_signed_rank, WilcoxonOutcome};
use crate::engine::{run, EngineConfig, Termination};
use crate::error::{Error, Result};
use crate::pfsp::{Instance, Time};

#[derive(Debug, Clone)]
pub struct PlanInstance {
    /// Set the instance is reported under, e.g. `20x5`.
    pub dataset: String,
    pub name: String,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    /// Column label in the report.
    pub label: String,
    /// Engine settings; seed and termination are set per run.
    pub config: EngineConfig,
}

impl VariantSpec {
    pub fn new(config: EngineConfig) -> Self {
        Self { label: config.variant.name().to_string(), config }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// `n * m / 2 * t` milliseconds of wall clock per run.
    Time,
    /// Fixed iteration count per run, for reproducible reports.
    Iterations(u64),
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub instances: Vec<PlanInstance>,
    pub variants: Vec<VariantSpec>,
    pub replications: usize,
    pub scales: Vec<u64>,
    pub base_seed: u64,
    pub budget: BudgetMode,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(instances: Vec<PlanInstance>, variants: Vec<VariantSpec>) -> Self {
        Self {
            instances,
            variants,
            replications: 30,
            scales: vec![60],
            base_seed: 0,
            budget: BudgetMode::Time,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.scales.is_empty() || self.scales.contains(&0) {
            return Err(Error::Config("time scales must be positive".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("no variants in the plan".into()));
        }
        if self.budget == BudgetMode::Iterations(0) {
            return Err(Error::Config("iteration budget must be positive".into()));
        }
        let mut labels = BTreeSet::new();
        for v in &self.variants {
            if !labels.insert(v.label.as_str()) {
                return Err(Error::Config(format!("variant label '{}' used twice", v.label)));
            }
            v.config.validate()?;
        }
        let mut names = BTreeSet::new();
        for inst in &self.instances {
            if !names.insert(inst.name.as_str()) {
                return Err(Error::Config(format!("instance '{}' listed twice", inst.name)));
            }
        }
        Ok(())
    }

    pub fn echo(&self) -> PlanEcho {
        PlanEcho {
            instances: self.instances.iter().map(|i| i.name.clone()).collect(),
            variants: self.variants.clone(),
            replications: self.replications,
            scales: self.scales.clone(),
            base_seed: self.base_seed,
            budget: self.budget,
        }
    }
}

/// Plan as recorded in the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanEcho {
    pub instances: Vec<String>,
    pub variants: Vec<VariantSpec>,
    pub replications: usize,
    pub scales: Vec<u64>,
    pub base_seed: u64,
    pub budget: BudgetMode,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, stable across platforms and releases.
fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed of one run. Keyed by names rather than plan positions so that any
/// sub-plan reproduces the runs of the full plan; keyed by the engine variant
/// rather than the report label so a variant listed twice gets the same runs.
pub fn run_seed(base: u64, instance: &str, config: &EngineConfig, t: u64, rep: usize) -> u64 {
    [stable_hash(instance), stable_hash(config.variant.name()), t, rep as u64]
        .into_iter()
        .fold(splitmix64(base), |acc, part| splitmix64(acc ^ part))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub dataset: String,
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub variant: String,
    pub t: u64,
    pub rep: usize,
    pub seed: u64,
    pub makespan: Time,
    pub rpd: f64,
    /// Left empty in iteration-budget mode so reports are reproducible.
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub dataset: String,
    pub variant: String,
    pub t: u64,
    /// Mean RPD over every run.
    pub average_arpd: f64,
    /// Mean over instances of the best RPD among the replications.
    pub best_arpd: f64,
    /// Mean min-max normalized makespan; each instance is scaled over all
    /// runs of all variants.
    pub mean_normalized: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseTest {
    pub dataset: String,
    pub t: u64,
    pub a: String,
    pub b: String,
    /// Paired on (instance, replication) RPDs; positive `z` favors `b`.
    pub outcome: WilcoxonOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub instance: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub plan: PlanEcho,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
    pub sets: Vec<SetSummary>,
    pub wilcoxon: Vec<PairwiseTest>,
    pub skipped: Vec<Skipped>,
}

pub const CSV_HEADER: [&str; 11] =
    ["dataset", "instance", "n", "m", "variant", "t", "rep", "seed", "makespan", "rpd", "elapsed_ms"];

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.dataset.clone(),
                r.instance.clone(),
                r.n.to_string(),
                r.m.to_string(),
                r.variant.clone(),
                r.t.to_string(),
                r.rep.to_string(),
                r.seed.to_string(),
                r.makespan.to_string(),
                format!("{:.3}", r.rpd),
                r.elapsed_ms.map(|e| e.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self, dataset: &str, variant: &str, t: u64) -> Option<&SetSummary> {
        self.sets.iter().find(|s| s.dataset == dataset && s.variant == variant && s.t == t)
    }
}

struct Job<'a> {
    inst: &'a PlanInstance,
    c_star: Time,
    variant: &'a VariantSpec,
    t: u64,
    rep: usize,
}

/// Runs every (instance, variant, scale, replication) combination and
/// summarizes the results. Instances without a best-known value, or whose
/// runs fail, are skipped with a warning.
pub fn run_experiment(plan: &ExperimentPlan, registry: &BestKnownRegistry) -> Result<ExperimentReport> {
    plan.validate()?;
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for inst in &plan.instances {
        let Some(c_star) = registry.get(&inst.name) else {
            warn!("no best-known value for {}, skipping", inst.name);
            skipped.push(Skipped { instance: inst.name.clone(), reason: "no best-known value".into() });
            continue;
        };
        for t in &plan.scales {
            for variant in &plan.variants {
                for rep in 0..plan.replications {
                    jobs.push(Job { inst, c_star, variant, t: *t, rep });
                }
            }
        }
    }

    let execute = || -> Vec<Result<RunRecord>> { jobs.par_iter().map(|j| execute(plan, j)).collect() };
    let outcomes = match plan.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(execute),
        None => execute(),
    };

    let mut failed = BTreeMap::new();
    for (job, outcome) in jobs.iter().zip(&outcomes) {
        if let Err(e) = outcome {
            failed.entry(job.inst.name.clone()).or_insert_with(|| e.to_string());
        }
    }
    for (name, reason) in &failed {
        warn!("runs on {name} failed, skipping: {reason}");
        skipped.push(Skipped { instance: name.clone(), reason: reason.clone() });
    }
    let records: Vec<RunRecord> = outcomes
        .into_iter()
        .filter_map(|o| o.ok())
        .filter(|r| !failed.contains_key(&r.instance))
        .collect();

    let (sets, wilcoxon) = summarize(plan, &records)?;
    Ok(ExperimentReport { plan: plan.echo(), records, sets, wilcoxon, skipped })
}

fn execute(plan: &ExperimentPlan, job: &Job<'_>) -> Result<RunRecord> {
    let inst = &job.inst.instance;
    let seed = run_seed(plan.base_seed, &job.inst.name, &job.variant.config, job.t, job.rep);
    let termination = match plan.budget {
        BudgetMode::Time => Termination::Millis(time_budget(inst.jobs(), inst.machines(), job.t)),
        BudgetMode::Iterations(k) => Termination::Iterations(k),
    };
    let config = EngineConfig { seed, termination, ..job.variant.config.clone() };
    let result = run(inst, &config)?;
    Ok(RunRecord {
        dataset: job.inst.dataset.clone(),
        instance: job.inst.name.clone(),
        n: inst.jobs(),
        m: inst.machines(),
        variant: job.variant.label.clone(),
        t: job.t,
        rep: job.rep,
        seed,
        makespan: result.best_makespan,
        rpd: rpd(result.best_makespan, job.c_star)?,
        elapsed_ms: matches!(plan.budget, BudgetMode::Time).then_some(result.elapsed_ms),
    })
}

type Key<'a> = (&'a str, u64);

fn summarize(plan: &ExperimentPlan, records: &[RunRecord]) -> Result<(Vec<SetSummary>, Vec<PairwiseTest>)> {
    // normalized makespan per record, scaled within (instance, t)
    let mut groups: BTreeMap<(&str, u64), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry((&r.instance, r.t)).or_default().push(i);
    }
    let mut normalized = vec![0.0; records.len()];
    for idx in groups.values() {
        let values: Vec<f64> = idx.iter().map(|&i| records[i].makespan as f64).collect();
        for (&i, v) in idx.iter().zip(normalize(&values)) {
            normalized[i] = v;
        }
    }

    let mut datasets: Vec<&str> = Vec::new();
    for r in records {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }

    let mut sets = Vec::new();
    let mut tests = Vec::new();
    for dataset in &datasets {
        for &t in &plan.scales {
            // (instance, rep) -> rpd, per variant
            let mut paired: Vec<BTreeMap<Key<'_>, f64>> = Vec::new();
            for variant in &plan.variants {
                let rows: Vec<usize> = (0..records.len())
                    .filter(|&i| {
                        let r = &records[i];
                        r.dataset == *dataset && r.t == t && r.variant == variant.label
                    })
                    .collect();
                if rows.is_empty() {
                    paired.push(BTreeMap::new());
                    continue;
                }
                let rpds: Vec<f64> = rows.iter().map(|&i| records[i].rpd).collect();
                let mut best: BTreeMap<&str, f64> = BTreeMap::new();
                for &i in &rows {
                    let e = best.entry(&records[i].instance).or_insert(f64::INFINITY);
                    *e = e.min(records[i].rpd);
                }
                let bests: Vec<f64> = best.into_values().collect();
                sets.push(SetSummary {
                    dataset: dataset.to_string(),
                    variant: variant.label.clone(),
                    t,
                    average_arpd: arpd(&rpds)?,
                    best_arpd: arpd(&bests)?,
                    mean_normalized: rows.iter().map(|&i| normalized[i]).sum::<f64>() / rows.len() as f64,
                    runs: rows.len(),
                });
                paired.push(
                    rows.iter().map(|&i| ((records[i].instance.as_str(), records[i].rep as u64), records[i].rpd)).collect(),
                );
            }
            for a in 0..plan.variants.len() {
                for b in a + 1..plan.variants.len() {
                    let keys: Vec<&Key<'_>> = paired[a].keys().filter(|k| paired[b].contains_key(*k)).collect();
                    let x: Vec<f64> = keys.iter().map(|k| paired[a][*k]).collect();
                    let y: Vec<f64> = keys.iter().map(|k| paired[b][*k]).collect();
                    tests.push(PairwiseTest {
                        dataset: dataset.to_string(),
                        t,
                        a: plan.variants[a].label.clone(),
                        b: plan.variants[b].label.clone(),
                        outcome: wilcoxon_signed_rank(&x, &y)?,
                    });
                }
            }
        }
    }
    Ok((sets, tests))
}
