use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Fewest non-zero differences the normal approximation is run on.
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// Non-zero differences that were ranked.
    pub n: usize,
    /// Rank sum of positive `x - y`.
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`.
    pub statistic: f64,
    /// Signed: positive when `x` tends to exceed `y`.
    pub z: f64,
    /// Two-sided.
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WilcoxonOutcome {
    Tested(WilcoxonResult),
    NotApplicable { nonzero: usize },
}

impl WilcoxonOutcome {
    pub fn result(&self) -> Option<&WilcoxonResult> {
        match self {
            Self::Tested(r) => Some(r),
            Self::NotApplicable { .. } => None,
        }
    }
}

/// Two-sided signed-rank test on paired samples at the 5% level. Zero
/// differences are dropped, tied magnitudes get average ranks, and the
/// p-value uses the tie-corrected normal approximation without continuity
/// correction.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonOutcome> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let mut d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|v| *v != 0.0).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite difference".into()));
    }
    let n = d.len();
    if n < MIN_PAIRS {
        return Ok(WilcoxonOutcome::NotApplicable { nonzero: n });
    }
    d.sort_by(|a, b| a.abs().total_cmp(&b.abs()));

    let (mut w_plus, mut w_minus, mut ties) = (0.0, 0.0, 0.0);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && d[j].abs() == d[i].abs() {
            j += 1;
        }
        let t = (j - i) as f64;
        let rank = (i + j + 1) as f64 / 2.0;
        for v in &d[i..j] {
            if *v > 0.0 {
                w_plus += rank;
            } else {
                w_minus += rank;
            }
        }
        ties += t * t * t - t;
        i = j;
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    let z = (w_plus - mean) / var.sqrt();
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0);
    Ok(WilcoxonOutcome::Tested(WilcoxonResult {
        n,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        z,
        p_value,
        significant: p_value < 0.05,
    }))
}
