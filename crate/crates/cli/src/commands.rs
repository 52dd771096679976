use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use opmgr_core::bench::{
    rpd, run_experiment, time_budget, BudgetMode, ExperimentPlan, PlanInstance, VariantSpec,
};
use opmgr_core::engine::{run, EngineConfig, Termination};
use opmgr_core::oracle::default_suites;
use opmgr_core::pfsp::{lower_bound, Instance};

use crate::files::{dataset_files, instance_name, load_instance, load_registry, write_atomic};
use crate::settings::{Budget, Settings};

pub fn solve(s: &Settings) -> Result<()> {
    let [path] = s.instances.as_slice() else {
        bail!("solve takes exactly one --instance, got {}", s.instances.len());
    };
    let [variant] = s.variants.as_slice() else { bail!("solve takes exactly one --variant") };
    let [t] = s.scales.as_slice() else { bail!("solve takes exactly one --t") };
    let name = instance_name(path);
    let inst = load_instance(path, s.format)?;
    let registry = s.registry.as_deref().map(load_registry).transpose()?;

    let termination = match s.budget {
        Budget::Time => Termination::Millis(time_budget(inst.jobs(), inst.machines(), *t)),
        Budget::Iterations(k) => Termination::Iterations(k),
    };
    let config = EngineConfig { variant: *variant, seed: s.seed, termination, ..s.engine.clone() };
    let r = run(&inst, &config)?;

    let mut out = String::new();
    writeln!(out, "instance {name} ({}x{})", inst.jobs(), inst.machines())?;
    writeln!(out, "variant {variant}")?;
    match termination {
        Termination::Millis(ms) => writeln!(out, "budget {ms} ms, used {} ms", r.elapsed_ms)?,
        Termination::Iterations(k) => writeln!(out, "budget {k} iterations")?,
    }
    writeln!(out, "iterations {} episodes {}", r.iterations, r.episodes)?;
    writeln!(out, "best makespan {}", r.best_makespan)?;
    let seq: Vec<String> = r.best_sequence.iter().map(|j| (j + 1).to_string()).collect();
    writeln!(out, "sequence {}", seq.join(" "))?;
    if let Some(reg) = &registry {
        match reg.get(&name) {
            Some(c_star) => writeln!(out, "rpd {:.3}", rpd(r.best_makespan, c_star)?)?,
            None => warn!("no best-known value for {name}"),
        }
    }
    print!("{out}");

    if let Some(q) = &r.q_table {
        info!("final Q table\n{q}");
    }
    if let Some(trace) = &s.trace {
        write_atomic(trace, &r.trace_jsonl())?;
    }
    if let Some(dest) = &s.out {
        write_atomic(dest, &out)?;
    }
    Ok(())
}

/// Instance files named on the command line followed by every file of each
/// dataset directory.
fn instance_paths(s: &Settings) -> Result<Vec<PathBuf>> {
    let mut paths = s.instances.clone();
    for dir in &s.datasets {
        paths.extend(dataset_files(dir)?);
    }
    Ok(paths)
}

fn load_plan_instances(s: &Settings) -> Result<(Vec<PlanInstance>, usize)> {
    let paths = instance_paths(s)?;
    if paths.is_empty() {
        bail!("no instances given; use --instance or --dataset");
    }
    let mut loaded = Vec::new();
    for path in &paths {
        match load_instance(path, s.format) {
            Ok(instance) => loaded.push(PlanInstance {
                dataset: format!("{}x{}", instance.jobs(), instance.machines()),
                name: instance_name(path),
                instance,
            }),
            Err(e) => warn!("skipping {}: {e:#}", path.display()),
        }
    }
    Ok((loaded, paths.len()))
}

pub fn experiment(s: &Settings) -> Result<()> {
    let registry_path = s.registry.as_deref().ok_or_else(|| anyhow!("experiment needs --registry"))?;
    let registry = load_registry(registry_path)?;
    let (instances, given) = load_plan_instances(s)?;
    if instances.is_empty() {
        bail!("none of the {given} instances could be read");
    }
    let variants = s
        .variants
        .iter()
        .map(|&variant| VariantSpec::new(EngineConfig { variant, ..s.engine.clone() }))
        .collect();
    let plan = ExperimentPlan {
        replications: s.reps,
        scales: s.scales.clone(),
        base_seed: s.seed,
        budget: match s.budget {
            Budget::Time => BudgetMode::Time,
            Budget::Iterations(k) => BudgetMode::Iterations(k),
        },
        threads: s.threads,
        ..ExperimentPlan::new(instances, variants)
    };
    let report = run_experiment(&plan, &registry)?;
    if report.records.is_empty() {
        bail!("every instance failed or was skipped");
    }

    let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    write_atomic(&dir.join("results.csv"), &report.to_csv())?;
    write_atomic(&dir.join("summary.json"), &report.to_json())?;

    println!("{:<10} {:<8} {:>5} {:>9} {:>9}", "set", "variant", "t", "avg ARPD", "best ARPD");
    for set in &report.sets {
        println!(
            "{:<10} {:<8} {:>5} {:>9.3} {:>9.3}",
            set.dataset, set.variant, set.t, set.average_arpd, set.best_arpd
        );
    }
    for skip in &report.skipped {
        println!("skipped {}: {}", skip.instance, skip.reason);
    }
    println!("wrote {} runs to {}", report.records.len(), dir.display());
    Ok(())
}

pub fn validate(s: &Settings) -> Result<()> {
    for &variant in &s.variants {
        EngineConfig { variant, ..s.engine.clone() }.validate()?;
    }
    let registry = s.registry.as_deref().map(load_registry).transpose()?;
    let mut bad = 0;
    let paths = instance_paths(s)?;
    for path in &paths {
        let name = instance_name(path);
        match load_instance(path, s.format) {
            Ok(inst) => {
                let lb = lower_bound(&inst);
                let best = registry.as_ref().and_then(|r| r.get(&name));
                let note = match best {
                    Some(c) if c < lb => {
                        bad += 1;
                        format!("best-known {c} BELOW lower bound")
                    }
                    Some(c) => format!("best-known {c}"),
                    None => "no best-known value".into(),
                };
                println!("ok   {name}: {}x{}, lower bound {lb}, {note}", inst.jobs(), inst.machines());
            }
            Err(e) => {
                bad += 1;
                println!("FAIL {name}: {e:#}");
            }
        }
    }
    if let Some(r) = &registry {
        println!("registry: {} entries, version {}", r.len(), r.version().unwrap_or("unset"));
    }
    if bad > 0 {
        bail!("{bad} of {} instances failed validation", paths.len());
    }
    Ok(())
}

pub fn oracle_check(s: &Settings, filter: Option<&str>) -> Result<()> {
    let registry_text = s
        .registry
        .as_deref()
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .transpose()?;
    let mut named: Vec<(String, Instance)> = Vec::new();
    for path in instance_paths(s)? {
        named.push((instance_name(&path), load_instance(&path, s.format)?));
    }
    let registry = registry_text.as_deref().map(|t| (t, named.as_slice()));
    let reports = default_suites(filter, registry)?;
    let mut failed = Vec::new();
    for r in &reports {
        let verdict = if r.ok() { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {} passed, {} failed, {} required", r.name, r.passed, r.failed, r.required);
        for f in r.failures.iter().take(5) {
            println!("     {f}");
        }
        if !r.ok() {
            failed.push(r.name);
        }
    }
    if !failed.is_empty() {
        bail!("oracle suites failed: {}", failed.join(", "));
    }
    Ok(())
}

/// Paths named in the settings that must exist before anything runs.
pub fn missing_path(s: &Settings) -> Option<&Path> {
    s.instances.iter().chain(&s.datasets).chain(&s.registry).map(PathBuf::as_path).find(|p| !p.exists())
}
