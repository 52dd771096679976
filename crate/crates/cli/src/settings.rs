//! Flat `key = value` settings with `engine.`, `aos.` and `plan.` prefixes.
//!
//! The config file is read into a map, command-line flags are written over it
//! under their `plan.*` keys, and only then is anything parsed, so a flag and
//! its file equivalent go through the same checks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use opmgr_core::bench::Format;
use opmgr_core::engine::{EngineConfig, Variant};
use opmgr_core::operators::ConstructionStrategy;

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "engine.episode_length",
    "engine.tau",
    "engine.destruction_sizes",
    "engine.semi_random_fraction",
    "engine.greediness",
    "engine.strategies",
    "engine.tenure",
    "engine.partial_local_search",
    "engine.neh_local_search",
    "engine.baseline_destruction",
    "aos.epsilon",
    "aos.beta",
    "aos.alpha",
    "aos.gamma",
    "aos.eta",
    "aos.score_segment",
    "aos.score_reaction",
    "aos.score_values",
    "plan.instance",
    "plan.dataset",
    "plan.format",
    "plan.variant",
    "plan.t",
    "plan.reps",
    "plan.seed",
    "plan.budget_mode",
    "plan.iterations",
    "plan.out",
    "plan.registry",
    "plan.trace",
    "plan.threads",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawSettings {
    values: BTreeMap<String, String>,
}

impl RawSettings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", no + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                bail!("line {}: unknown key '{key}'", no + 1);
            }
            if raw.values.insert(key.to_string(), value.trim().to_string()).is_some() {
                bail!("line {}: '{key}' set twice", no + 1);
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Flag values win over the file.
    pub fn set(&mut self, key: &str, value: Option<String>) {
        debug_assert!(KEYS.contains(&key));
        if let Some(v) = value {
            self.values.insert(key.to_string(), v);
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{key} = '{v}': {e}")))
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.values.get(key) else { return Ok(None) };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| anyhow!("{key}: '{s}': {e}")))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn paths(&self, key: &str) -> Vec<PathBuf> {
        self.values
            .get(key)
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(PathBuf::from).collect())
            .unwrap_or_default()
    }

    pub fn resolve(&self) -> Result<Settings> {
        let mut engine = EngineConfig::default();
        if let Some(v) = self.get("engine.episode_length")? {
            engine.episode_length = v;
        }
        if let Some(v) = self.get("engine.tau")? {
            engine.tau = v;
        }
        if let Some(v) = self.list("engine.destruction_sizes")? {
            engine.destruction_sizes = v;
        }
        if let Some(v) = self.get("engine.semi_random_fraction")? {
            engine.semi_random_fraction = v;
        }
        if let Some(v) = self.get("engine.greediness")? {
            engine.greediness = v;
        }
        engine.strategies = self.list::<ConstructionStrategy>("engine.strategies")?;
        if let Some(v) = self.get("engine.tenure")? {
            engine.tenure = v;
        }
        engine.partial_local_search = self.get("engine.partial_local_search")?;
        if let Some(v) = self.get("engine.neh_local_search")? {
            engine.neh_local_search = v;
        }
        if let Some(v) = self.get("engine.baseline_destruction")? {
            engine.baseline_destruction = v;
        }
        let aos = &mut engine.aos;
        for (key, field) in [
            ("aos.epsilon", &mut aos.epsilon),
            ("aos.beta", &mut aos.beta),
            ("aos.alpha", &mut aos.alpha),
            ("aos.gamma", &mut aos.gamma),
            ("aos.eta", &mut aos.eta),
        ] {
            if let Some(v) = self.get(key)? {
                *field = v;
            }
        }
        if let Some(v) = self.get("aos.score_segment")? {
            engine.score.segment_length = v;
        }
        if let Some(v) = self.get("aos.score_reaction")? {
            engine.score.reaction = v;
        }
        if let Some(v) = self.list::<f64>("aos.score_values")? {
            engine.score.scores =
                v.try_into().map_err(|_| anyhow!("aos.score_values needs exactly three numbers"))?;
        }

        let budget = match self.values.get("plan.budget_mode").map(String::as_str) {
            None | Some("time") => Budget::Time,
            Some("iters") => Budget::Iterations(self.get("plan.iterations")?.unwrap_or(1000)),
            Some(other) => bail!("plan.budget_mode = '{other}': expected time or iters"),
        };
        let settings = Settings {
            engine,
            instances: self.paths("plan.instance"),
            datasets: self.paths("plan.dataset"),
            format: self.get::<Format>("plan.format")?.unwrap_or(Format::Taillard),
            variants: self.list::<Variant>("plan.variant")?.unwrap_or_else(|| vec![Variant::Dqig]),
            scales: self.list::<u64>("plan.t")?.unwrap_or_else(|| vec![60]),
            reps: self.get("plan.reps")?.unwrap_or(30),
            seed: self.get("plan.seed")?.unwrap_or(0),
            budget,
            out: self.get("plan.out")?,
            registry: self.get("plan.registry")?,
            trace: self.get("plan.trace")?,
            threads: self.get("plan.threads")?,
        };
        if settings.variants.is_empty() {
            bail!("plan.variant is empty");
        }
        if settings.scales.is_empty() || settings.scales.contains(&0) {
            bail!("plan.t values must be positive");
        }
        if settings.budget == Budget::Iterations(0) {
            bail!("plan.iterations must be positive");
        }
        Ok(settings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Time,
    Iterations(u64),
}

/// Settings after merging and type checking. Variant, seed and termination
/// of `engine` are filled in per run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub engine: EngineConfig,
    pub instances: Vec<PathBuf>,
    pub datasets: Vec<PathBuf>,
    pub format: Format,
    pub variants: Vec<Variant>,
    pub scales: Vec<u64>,
    pub reps: usize,
    pub seed: u64,
    pub budget: Budget,
    pub out: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_reach_the_engine() {
        let raw = RawSettings::parse(
            "# tuned\nengine.tau = 0.5\nengine.strategies = best, semi_random:0.3\naos.alpha=0.2\n\
             aos.score_values = 3, 2, 1\nplan.variant = rig,scig\nplan.t = 60, 120\n",
        )
        .unwrap();
        let s = raw.resolve().unwrap();
        assert_eq!(s.engine.tau, 0.5);
        assert_eq!(
            s.engine.strategies,
            Some(vec![ConstructionStrategy::Best, ConstructionStrategy::SemiRandom { fraction: 0.3 }])
        );
        assert_eq!(s.engine.aos.alpha, 0.2);
        assert_eq!(s.engine.score.scores, [3.0, 2.0, 1.0]);
        assert_eq!(s.variants, vec![Variant::Rig, Variant::Scig]);
        assert_eq!(s.scales, vec![60, 120]);
        assert_eq!(s.budget, Budget::Time);
    }

    #[test]
    fn flags_override_the_file() {
        let mut raw = RawSettings::parse("plan.seed = 3\nplan.reps = 5\n").unwrap();
        raw.set("plan.seed", Some("9".into()));
        raw.set("plan.reps", None);
        let s = raw.resolve().unwrap();
        assert_eq!((s.seed, s.reps), (9, 5));
    }

    #[test]
    fn bad_entries_are_rejected() {
        assert!(RawSettings::parse("engine.nope = 1").is_err());
        assert!(RawSettings::parse("engine.tau").is_err());
        assert!(RawSettings::parse("engine.tau = 1\nengine.tau = 2").is_err());
        for text in ["engine.tau = fast", "plan.budget_mode = forever", "aos.score_values = 1,2", "plan.t = 0"] {
            assert!(RawSettings::parse(text).unwrap().resolve().is_err(), "{text}");
        }
    }

    #[test]
    fn iteration_budget_defaults_to_a_thousand() {
        let s = RawSettings::parse("plan.budget_mode = iters").unwrap().resolve().unwrap();
        assert_eq!(s.budget, Budget::Iterations(1000));
    }
}
