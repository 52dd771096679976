use crate::error::{Error, Result};
use crate::pfsp::Time;

/// Relative percentage deviation from the best-known makespan. Negative when
/// the best-known value was improved.
pub fn rpd(c: Time, c_star: Time) -> Result<f64> {
    if c_star == 0 {
        return Err(Error::InvalidArgument("best-known makespan must be positive".into()));
    }
    Ok(100.0 * (c as f64 - c_star as f64) / c_star as f64)
}

pub fn arpd(rpds: &[f64]) -> Result<f64> {
    if rpds.is_empty() {
        return Err(Error::InvalidArgument("ARPD of an empty set".into()));
    }
    Ok(rpds.iter().sum::<f64>() / rpds.len() as f64)
}

/// Time limit `n * m / 2 * t` milliseconds.
pub fn time_budget(jobs: usize, machines: usize, t: u64) -> u64 {
    (jobs * machines) as u64 * t / 2
}

/// Min-max scaling to [0, 1]; a constant input maps to all zeros.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    values
        .iter()
        .map(|v| if range > 0.0 { (v - min) / range } else { 0.0 })
        .collect()
}
