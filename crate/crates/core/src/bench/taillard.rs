use crate::pfsp::{Instance, Time};

const A: i64 = 16807;
const B: i64 = 127_773;
const C: i64 = 2836;
const M: i64 = 2_147_483_647;

/// Taillard's portable Lehmer generator.
#[derive(Debug, Clone)]
pub struct TaillardRng {
    seed: i64,
}

impl TaillardRng {
    pub fn new(seed: u32) -> Self {
        Self { seed: i64::from(seed) }
    }

    /// Uniform integer in `[low, high]`.
    pub fn unif(&mut self, low: i64, high: i64) -> i64 {
        let k = self.seed / B;
        self.seed = A * (self.seed % B) - k * C;
        if self.seed < 0 {
            self.seed += M;
        }
        let v = self.seed as f64 / M as f64;
        low + (v * (high - low + 1) as f64) as i64
    }
}

/// Regenerates a Taillard instance from its seed; times are drawn machine by
/// machine from U[1, 99].
pub fn generate(jobs: usize, machines: usize, seed: u32) -> Instance {
    let mut rng = TaillardRng::new(seed);
    let times = (0..jobs * machines).map(|_| rng.unif(1, 99) as Time).collect();
    Instance::from_flat(jobs, machines, times).expect("positive dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_of_ta001() {
        let inst = generate(20, 5, 873_654_221);
        assert_eq!(&inst.machine_row(0)[..6], &[54, 83, 15, 71, 77, 36]);
        assert_eq!(&inst.machine_row(4)[17..], &[18, 68, 28]);
    }
}
