//! Dynamic operator portfolio.
//!
//! An operator whose episode earns zero reward is moved to a FIFO tabu list for
//! `tenure` episode-ends and then returned to the active set. The last active
//! operator is never removed.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TabuEntry {
    pub operator: usize,
    pub remaining: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portfolio {
    active: Vec<usize>,
    tabu: VecDeque<TabuEntry>,
    tenure: u32,
    size: usize,
}

impl Portfolio {
    /// All `size` operators active, empty tabu list.
    pub fn new(size: usize, tenure: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("portfolio needs at least one operator".into()));
        }
        if tenure == 0 {
            return Err(Error::InvalidArgument("tabu tenure must be positive".into()));
        }
        Ok(Self { active: (0..size).collect(), tabu: VecDeque::new(), tenure, size })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn tabu(&self) -> impl ExactSizeIterator<Item = &TabuEntry> {
        self.tabu.iter()
    }

    pub fn tenure(&self) -> u32 {
        self.tenure
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_active(&self, id: usize) -> Result<bool> {
        if id >= self.size {
            return Err(Error::InvalidArgument(format!(
                "operator {id} is outside the catalog 0..{}",
                self.size
            )));
        }
        Ok(self.active.contains(&id))
    }

    /// End-of-episode update after `last` earned `reward`.
    ///
    /// A zero reward sends `last` to the back of the tabu list with the full
    /// tenure (unless it is the only active operator). Entries that were
    /// already tabu before this call then count down by one, and those reaching
    /// zero rejoin the active set in FIFO order.
    pub fn update(&mut self, last: usize, reward: f64) -> Result<()> {
        let at = self.active.iter().position(|&a| a == last).ok_or_else(|| {
            Error::StateCorruption(format!("operator {last} is not in the active portfolio"))
        })?;
        if reward.is_nan() || reward < 0.0 {
            return Err(Error::InvalidArgument(format!("reward {reward} must be non-negative")));
        }
        let already_tabu = self.tabu.len();
        if reward == 0.0 && self.active.len() > 1 {
            self.active.remove(at);
            self.tabu.push_back(TabuEntry { operator: last, remaining: self.tenure });
        }
        for entry in self.tabu.iter_mut().take(already_tabu) {
            entry.remaining -= 1;
        }
        while self.tabu.front().is_some_and(|e| e.remaining == 0) {
            let entry = self.tabu.pop_front().unwrap();
            self.active.push(entry.operator);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tabu_of(p: &Portfolio) -> Vec<(usize, u32)> {
        p.tabu().map(|e| (e.operator, e.remaining)).collect()
    }

    #[test]
    fn zero_reward_deactivates() {
        let mut p = Portfolio::new(2, 4).unwrap();
        p.update(0, 0.0).unwrap();
        assert_eq!(p.active(), &[1]);
        assert_eq!(tabu_of(&p), vec![(0, 4)]);
        assert!(!p.is_active(0).unwrap());
    }

    #[test]
    fn positive_reward_keeps_state() {
        let mut p = Portfolio::new(2, 4).unwrap();
        p.update(0, 0.3).unwrap();
        assert_eq!(p, Portfolio::new(2, 4).unwrap());
    }

    #[test]
    fn last_tenure_unit_revives() {
        let mut p = Portfolio::new(3, 1).unwrap();
        p.update(2, 0.0).unwrap();
        assert_eq!(tabu_of(&p), vec![(2, 1)]);
        p.update(0, 0.5).unwrap();
        assert!(tabu_of(&p).is_empty());
        assert_eq!(p.active(), &[0, 1, 2]);
    }

    #[test]
    fn revives_after_full_tenure() {
        let mut p = Portfolio::new(3, 4).unwrap();
        p.update(1, 0.0).unwrap();
        for _ in 0..3 {
            p.update(0, 0.1).unwrap();
            assert!(!p.is_active(1).unwrap());
        }
        p.update(0, 0.1).unwrap();
        assert!(p.is_active(1).unwrap());
    }

    #[test]
    fn sole_operator_is_never_removed() {
        let mut p = Portfolio::new(1, 4).unwrap();
        p.update(0, 0.0).unwrap();
        assert_eq!(p.active(), &[0]);
        let mut p = Portfolio::new(2, 4).unwrap();
        p.update(0, 0.0).unwrap();
        p.update(1, 0.0).unwrap();
        assert_eq!(p.active(), &[1]);
        assert_eq!(tabu_of(&p), vec![(0, 3)]);
    }

    #[test]
    fn errors() {
        let mut p = Portfolio::new(2, 4).unwrap();
        p.update(0, 0.0).unwrap();
        assert!(matches!(p.update(0, 0.1), Err(Error::StateCorruption(_))));
        assert!(p.update(1, -0.1).is_err());
        assert!(p.is_active(2).is_err());
        assert!(Portfolio::new(0, 4).is_err());
        assert!(Portfolio::new(2, 0).is_err());
    }
}
