use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aos::{AosParams, ScoreParams};
use crate::error::{Error, Result};
use crate::operators::{ConstructionStrategy, OperatorCatalog};

/// Solver variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Tabu portfolio + Q-learning selection.
    Dqig,
    /// Q-learning selection over the static full catalog.
    Sqig,
    /// Tabu portfolio + uniform random selection.
    Rig,
    /// Score-based roulette selection over the static full catalog.
    Scig,
    /// Single operator (best insertion, fixed destruction size).
    Igrs,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Self::Dqig, Self::Sqig, Self::Rig, Self::Scig, Self::Igrs];

    pub fn name(self) -> &'static str {
        match self {
            Self::Dqig => "dqig",
            Self::Sqig => "sqig",
            Self::Rig => "rig",
            Self::Scig => "scig",
            Self::Igrs => "igrs",
        }
    }

    /// Whether local search runs on the partial sequence after destruction
    /// unless configured otherwise.
    pub fn default_partial_local_search(self) -> bool {
        !matches!(self, Self::Igrs)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-'))
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Self::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown variant '{s}'")))
    }
}

/// When a run stops. Checked before every iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Wall-clock budget in milliseconds, including the initial solution.
    Millis(u64),
    /// Fixed number of destruction/construction iterations.
    Iterations(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub variant: Variant,
    /// Iterations per episode.
    pub episode_length: usize,
    /// Temperature scale.
    pub tau: f64,
    pub destruction_sizes: Vec<usize>,
    pub semi_random_fraction: f64,
    pub greediness: f64,
    /// Explicit strategy list; `None` uses all four with the parameters above.
    pub strategies: Option<Vec<ConstructionStrategy>>,
    pub aos: AosParams,
    /// Episodes an unsuccessful operator stays tabu.
    pub tenure: u32,
    pub score: ScoreParams,
    /// Local search on the partial sequence after destruction; `None` uses the
    /// variant's default.
    pub partial_local_search: Option<bool>,
    /// Local search on the growing sequence inside NEH.
    pub neh_local_search: bool,
    /// Destruction size of the single-operator baseline.
    pub baseline_destruction: usize,
    pub seed: u64,
    pub termination: Termination,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Dqig,
            episode_length: 6,
            tau: 0.4,
            destruction_sizes: (2..=8).collect(),
            semi_random_fraction: 0.5,
            greediness: 2.0,
            strategies: None,
            aos: AosParams::default(),
            tenure: 4,
            score: ScoreParams::default(),
            partial_local_search: None,
            neh_local_search: false,
            baseline_destruction: 4,
            seed: 0,
            termination: Termination::Iterations(1000),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episode_length == 0 {
            return Err(Error::Config("episode length must be at least 1".into()));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau = {} must be non-negative", self.tau)));
        }
        if self.tenure == 0 {
            return Err(Error::Config("tabu tenure must be at least 1".into()));
        }
        if self.baseline_destruction == 0 {
            return Err(Error::Config("baseline destruction size must be positive".into()));
        }
        match self.termination {
            Termination::Millis(0) => return Err(Error::Config("time budget must be positive".into())),
            Termination::Iterations(0) => {
                return Err(Error::Config("iteration budget must be positive".into()))
            }
            _ => {}
        }
        self.aos.validate()?;
        self.catalog().map(|_| ())
    }

    pub fn partial_local_search(&self) -> bool {
        self.partial_local_search
            .unwrap_or_else(|| self.variant.default_partial_local_search())
    }

    /// The configured operator catalog, before restriction to an instance.
    pub fn catalog(&self) -> Result<OperatorCatalog> {
        if self.variant == Variant::Igrs {
            return OperatorCatalog::build([self.baseline_destruction], &[ConstructionStrategy::Best])
                .map_err(|e| Error::Config(e.to_string()));
        }
        let standard;
        let strategies = match &self.strategies {
            Some(list) => list.as_slice(),
            None => {
                standard = ConstructionStrategy::standard_set(self.semi_random_fraction, self.greediness);
                standard.as_slice()
            }
        };
        OperatorCatalog::build(self.destruction_sizes.iter().copied(), strategies)
        .map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = EngineConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.catalog().unwrap().len(), 28);
        assert!(cfg.partial_local_search());
        let base = EngineConfig { variant: Variant::Igrs, ..cfg };
        assert!(!base.partial_local_search());
        assert_eq!(base.catalog().unwrap().len(), 1);
    }

    #[test]
    fn parses_variant_names() {
        assert_eq!("dqig".parse::<Variant>().unwrap(), Variant::Dqig);
        assert_eq!("IG_RS".parse::<Variant>().unwrap(), Variant::Igrs);
        assert_eq!("ScIG".parse::<Variant>().unwrap(), Variant::Scig);
        assert!("foo".parse::<Variant>().is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |f: fn(&mut EngineConfig)| {
            let mut c = EngineConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.episode_length = 0));
        assert!(bad(|c| c.tau = -1.0));
        assert!(bad(|c| c.termination = Termination::Millis(0)));
        assert!(bad(|c| c.aos.alpha = 0.0));
        assert!(bad(|c| c.destruction_sizes.clear()));
        assert!(bad(|c| c.semi_random_fraction = 2.0));
    }
}
