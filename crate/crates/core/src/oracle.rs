//! Self-contained correctness checks shared by the test suites and the
//! `oracle-check` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bench::{wilcoxon_signed_rank, BestKnownRegistry};
use crate::engine::{run, EngineConfig, Termination, Variant};
use crate::error::{Error, Result};
use crate::pfsp::{compute_makespan, evaluate_all_insertions, lower_bound, Instance, Job, Time};

/// Tolerance on Wilcoxon statistics and p-values.
pub const WILCOXON_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Passing cases needed for the suite to pass.
    pub required: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self { name, passed: 0, failed: 0, required: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.failures.push(what());
        }
    }

    fn strict(mut self) -> Self {
        self.required = self.passed + self.failed;
        self
    }

    pub fn ok(&self) -> bool {
        self.passed >= self.required
    }
}

/// Processing times uniform in `1..=99`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, jobs: usize, machines: usize) -> Instance {
    let times = (0..jobs * machines).map(|_| rng.gen_range(1..=99)).collect();
    Instance::from_flat(jobs, machines, times).expect("positive dimensions")
}

/// Exact optimum by depth-first enumeration with a last-machine load bound.
/// Ties keep the lexicographically first sequence.
pub fn brute_force(instance: &Instance) -> (Vec<Job>, Time) {
    let (n, m) = (instance.jobs(), instance.machines());
    let mut fronts = vec![vec![0; m]; n + 1];
    let mut used = vec![false; n];
    let mut seq = Vec::with_capacity(n);
    let mut best = (Vec::new(), Time::MAX);
    let mut rest: Time = instance.machine_row(m - 1).iter().sum();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        inst: &Instance,
        depth: usize,
        fronts: &mut [Vec<Time>],
        used: &mut [bool],
        seq: &mut Vec<Job>,
        rest: &mut Time,
        best: &mut (Vec<Job>, Time),
    ) {
        let (n, m) = (inst.jobs(), inst.machines());
        if depth == n {
            let c = fronts[n][m - 1];
            if c < best.1 {
                *best = (seq.clone(), c);
            }
            return;
        }
        if fronts[depth][m - 1] + *rest >= best.1 {
            return;
        }
        for j in 0..n {
            if used[j] {
                continue;
            }
            let (done, next) = fronts.split_at_mut(depth + 1);
            let (prev, cur) = (&done[depth], &mut next[0]);
            let p = inst.job_times(j);
            let mut t = 0;
            for i in 0..m {
                t = t.max(prev[i]) + p[i];
                cur[i] = t;
            }
            used[j] = true;
            seq.push(j);
            *rest -= p[m - 1];
            dfs(inst, depth + 1, fronts, used, seq, rest, best);
            *rest += p[m - 1];
            seq.pop();
            used[j] = false;
        }
    }

    dfs(instance, 0, &mut fronts, &mut used, &mut seq, &mut rest, &mut best);
    best
}

/// Accelerated insertion makespans against full recomputation, every
/// position, on random instances of up to `max_jobs` x `max_machines`.
pub fn acceleration_suite(count: usize, max_jobs: usize, max_machines: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("acceleration");
    for case in 0..count {
        let n = rng.gen_range(1..=max_jobs);
        let m = rng.gen_range(1..=max_machines);
        let inst = random_instance(&mut rng, n, m);
        let mut jobs: Vec<Job> = (0..n).collect();
        jobs.shuffle(&mut rng);
        let job = jobs.pop().expect("n >= 1");
        jobs.truncate(rng.gen_range(0..=jobs.len()));
        let fast = evaluate_all_insertions(&inst, &jobs, job).expect("job not in partial");
        let mismatch = fast.iter().find(|&&(pos, c)| {
            let mut full = jobs.clone();
            full.insert(pos, job);
            compute_makespan(&inst, &full).expect("valid sequence") != c
        });
        report.check(mismatch.is_none(), || {
            format!("case {case} ({n}x{m}): position {} disagrees", mismatch.map_or(0, |m| m.0))
        });
    }
    report.strict()
}

/// Runs the given variant for `iterations` iterations on random instances
/// with at most 8 jobs and 4 machines. A case passes when the run reaches
/// the enumerated optimum; a run below the optimum is recorded as a failure
/// and makes the suite fail outright.
pub fn brute_force_suite(count: usize, iterations: u64, required: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("brute-force");
    let mut impossible = false;
    for case in 0..count {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(1..=4);
        let inst = random_instance(&mut rng, n, m);
        let (_, opt) = brute_force(&inst);
        let config = EngineConfig {
            variant: Variant::Dqig,
            seed: rng.gen(),
            termination: Termination::Iterations(iterations),
            ..Default::default()
        };
        let found = run(&inst, &config).map(|r| r.best_makespan);
        impossible |= matches!(found, Ok(c) if c < opt);
        report.check(found == Ok(opt), || format!("case {case} ({n}x{m}): optimum {opt}, found {found:?}"));
    }
    report.required = if impossible { count + 1 } else { required };
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCase {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
}

/// Stored two-sided signed-rank results from an independent implementation.
pub fn wilcoxon_reference() -> Vec<ReferenceCase> {
    serde_json::from_str(include_str!("../data/wilcoxon_reference.json")).expect("bundled reference parses")
}

pub fn wilcoxon_suite() -> SuiteReport {
    let mut report = SuiteReport::new("wilcoxon");
    for case in wilcoxon_reference() {
        let got = wilcoxon_signed_rank(&case.x, &case.y);
        let ok = matches!(&got, Ok(out) if out.result().is_some_and(|r| {
            (r.statistic - case.statistic).abs() <= WILCOXON_TOLERANCE
                && (r.p_value - case.p_value).abs() <= WILCOXON_TOLERANCE
        }));
        report.check(ok, || {
            format!("{}: expected W={} p={}, got {got:?}", case.name, case.statistic, case.p_value)
        });
    }
    report.strict()
}

/// The registry parses, and every instance it covers has a best-known value
/// no smaller than the instance's lower bound.
pub fn registry_suite(registry_text: &str, instances: &[(String, Instance)]) -> SuiteReport {
    let mut report = SuiteReport::new("registry");
    let registry = match BestKnownRegistry::parse(registry_text) {
        Ok(r) => r,
        Err(e) => {
            report.check(false, || e.to_string());
            return report.strict();
        }
    };
    report.check(!registry.is_empty(), || "registry has no entries".into());
    for (name, inst) in instances {
        if let Some(c_star) = registry.get(name) {
            let lb = lower_bound(inst);
            report.check(c_star >= lb, || format!("{name}: best-known {c_star} below lower bound {lb}"));
        }
    }
    report.strict()
}

/// Names of the suites `run_suites` knows.
pub const SUITES: [&str; 4] = ["acceleration", "brute-force", "wilcoxon", "registry"];

/// Default sizes of the built-in suites.
pub fn default_suites(filter: Option<&str>, registry: Option<(&str, &[(String, Instance)])>) -> Result<Vec<SuiteReport>> {
    if let Some(f) = filter {
        if !SUITES.contains(&f) {
            return Err(Error::InvalidArgument(format!("unknown suite '{f}', expected one of {SUITES:?}")));
        }
    }
    let wanted = |name: &str| filter.is_none_or(|f| f == name);
    let mut out = Vec::new();
    if wanted("acceleration") {
        out.push(acceleration_suite(1000, 50, 20, 1));
    }
    if wanted("brute-force") {
        out.push(brute_force_suite(50, 500, 48, 2));
    }
    if wanted("wilcoxon") {
        out.push(wilcoxon_suite());
    }
    if wanted("registry") {
        if let Some((text, instances)) = registry {
            out.push(registry_suite(text, instances));
        } else if filter.is_some() {
            return Err(Error::InvalidArgument("the registry suite needs a registry file".into()));
        }
    }
    Ok(out)
}
