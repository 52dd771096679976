use serde::Serialize;

use crate::error::{Error, Result};
use crate::pfsp::Time;

/// Makespans recorded around one episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpisodeSnapshot {
    /// Current solution's makespan when the episode started.
    pub local_before: Time,
    /// Best-found makespan when the episode started.
    pub best_before: Time,
    /// Lowest current-solution makespan seen during the episode.
    pub local: Time,
    /// Best-found makespan at the end of the episode.
    pub best: Time,
}

impl EpisodeSnapshot {
    pub fn start(current: Time, best: Time) -> Self {
        Self { local_before: current, best_before: best, local: current, best }
    }

    /// Records the state after one iteration.
    pub fn observe(&mut self, current: Time, best: Time) {
        self.local = self.local.min(current);
        self.best = best;
    }

    pub fn improved_best(&self) -> bool {
        self.best < self.best_before
    }

    pub fn improved_local(&self) -> bool {
        self.local < self.local_before
    }
}

/// Weighted sum of the relative local and global improvements of an episode.
///
/// `r = eta * max(C_before - C, 0) / C_before + (1 - eta) * max(C*_before - C*, 0) / C*_before`
pub fn calculate_reward(snap: &EpisodeSnapshot, eta: f64) -> Result<f64> {
    if snap.local_before == 0 || snap.best_before == 0 || snap.local == 0 || snap.best == 0 {
        return Err(Error::InvalidArgument(format!(
            "reward needs positive makespans, got {snap:?}"
        )));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta {eta} outside [0, 1]")));
    }
    let local = snap.local_before.saturating_sub(snap.local) as f64 / snap.local_before as f64;
    let global = snap.best_before.saturating_sub(snap.best) as f64 / snap.best_before as f64;
    Ok(eta * local + (1.0 - eta) * global)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(local_before: Time, local: Time, best_before: Time, best: Time) -> EpisodeSnapshot {
        EpisodeSnapshot { local_before, best_before, local, best }
    }

    #[test]
    fn no_improvement_is_zero() {
        for eta in [0.0, 0.3, 1.0] {
            assert_eq!(calculate_reward(&snap(100, 100, 100, 100), eta).unwrap(), 0.0);
        }
    }

    #[test]
    fn equal_local_and_global_improvement() {
        let r = calculate_reward(&snap(100, 90, 100, 90), 0.3).unwrap();
        assert!((r - 0.1).abs() < 1e-12);
    }

    #[test]
    fn local_only_improvement() {
        let r = calculate_reward(&snap(200, 190, 180, 180), 0.3).unwrap();
        assert!((r - 0.015).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_makespans() {
        assert!(calculate_reward(&snap(0, 0, 10, 10), 0.3).is_err());
    }

    #[test]
    fn observe_tracks_running_minimum() {
        let mut s = EpisodeSnapshot::start(100, 95);
        s.observe(98, 95);
        s.observe(103, 94);
        assert_eq!(s.local, 98);
        assert_eq!(s.best, 94);
        assert!(s.improved_best() && s.improved_local());
    }
}
