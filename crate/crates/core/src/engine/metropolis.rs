use rand::Rng;

use crate::pfsp::{Instance, Solution, Time};

/// Constant temperature `tau * sum(p) / (n * m * 10)`.
pub fn compute_temperature(instance: &Instance, tau: f64) -> f64 {
    let cells = (instance.jobs() * instance.machines()) as f64;
    tau * instance.total_time() as f64 / (cells * 10.0)
}

/// Metropolis test: a candidate no worse than the current solution is always
/// accepted, a worse one with probability `exp((current - candidate) / t_p)`.
/// At `t_p = 0` worse candidates are rejected without drawing.
pub fn accepts<R: Rng + ?Sized>(current: Time, candidate: Time, t_p: f64, rng: &mut R) -> bool {
    if candidate <= current {
        return true;
    }
    if t_p <= 0.0 {
        return false;
    }
    let delta = (candidate - current) as f64;
    rng.gen::<f64>() < (-delta / t_p).exp()
}

/// Returns whichever of `current` and `candidate` survives the Metropolis test.
pub fn accept_solution<R: Rng + ?Sized>(
    current: &Solution,
    candidate: &Solution,
    t_p: f64,
    rng: &mut R,
) -> Solution {
    if accepts(current.makespan, candidate.makespan, t_p, rng) {
        candidate.clone()
    } else {
        current.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::mock::StepRng;

    fn sol(makespan: Time) -> Solution {
        Solution::new(vec![0], makespan)
    }

    /// A mock source whose next `f64` draw equals `u` (to 2^-53).
    fn draw(u: f64) -> StepRng {
        StepRng::new(((u * (1u64 << 53) as f64) as u64) << 11, 0)
    }

    #[test]
    fn temperature_formula() {
        let inst = Instance::from_rows(vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert!((compute_temperature(&inst, 0.4) - 0.1).abs() < 1e-12);
        assert_eq!(compute_temperature(&inst, 0.0), 0.0);
        let uniform = Instance::from_rows(vec![vec![7; 5]; 3]).unwrap();
        assert!((compute_temperature(&uniform, 0.5) - 0.35).abs() < 1e-12);
    }

    #[test]
    fn improving_and_equal_candidates_are_accepted() {
        let mut rng = draw(0.999);
        assert_eq!(accept_solution(&sol(10), &sol(9), 1.0, &mut rng).makespan, 9);
        assert_eq!(accept_solution(&sol(10), &sol(10), 0.0, &mut rng).makespan, 10);
    }

    #[test]
    fn worse_candidate_threshold() {
        // delta = 1, t_p = 2 -> acceptance probability exp(-0.5) ~ 0.6065
        let threshold = (-0.5f64).exp();
        assert_eq!(accept_solution(&sol(10), &sol(11), 2.0, &mut draw(threshold - 1e-6)).makespan, 11);
        assert_eq!(accept_solution(&sol(10), &sol(11), 2.0, &mut draw(threshold + 1e-6)).makespan, 10);
    }

    #[test]
    fn zero_temperature_rejects_worse() {
        assert_eq!(accept_solution(&sol(10), &sol(11), 0.0, &mut draw(0.0)).makespan, 10);
    }
}
