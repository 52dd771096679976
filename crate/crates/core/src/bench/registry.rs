use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pfsp::Time;

/// Best-known makespans by instance name.
///
/// Text form: `name value` per line, `#` comments, and an optional
/// `version <tag>` line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BestKnownRegistry {
    version: Option<String>,
    values: BTreeMap<String, Time>,
}

impl BestKnownRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reg = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::InvalidArgument(format!("registry line {}: {msg}", i + 1));
            match fields.as_slice() {
                ["version", tag] => {
                    if reg.version.replace(tag.to_string()).is_some() {
                        return Err(bad("second version line"));
                    }
                }
                [name, value] => {
                    let value: Time = value.parse().map_err(|_| bad("value is not an integer"))?;
                    reg.insert(name, value).map_err(|e| bad(&e.to_string()))?;
                }
                _ => return Err(bad("expected 'name value'")),
            }
        }
        Ok(reg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, name: &str, value: Time) -> Result<()> {
        if value == 0 {
            return Err(Error::InvalidArgument(format!("best-known value for {name} must be positive")));
        }
        if self.values.insert(name.to_string(), value).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate entry {name}")));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Time> {
        self.values.get(name).copied()
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Time)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}
