use rand::seq::SliceRandom;
use rand::Rng;

use super::makespan::validate_sequence;
use super::{Instance, InsertionEvaluator, Job, Time};
use crate::error::Result;

/// Insertion-neighbourhood local search.
///
/// Each pass visits the jobs in a freshly shuffled order, pulls each one out and
/// puts it back at its best position (idle-time tie-breaking on). The search
/// stops after the first pass that does not lower the makespan. If that pass
/// still moved jobs sideways, one more sweep applies strictly improving moves
/// only and the search resumes if it finds one, so the returned sequence
/// admits no improving re-insertion.
#[derive(Debug, Default, Clone)]
pub struct LocalSearch {
    eval: InsertionEvaluator,
    order: Vec<Job>,
}

impl LocalSearch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Improves `sequence` in place and returns its new makespan. `makespan`
    /// must be the current makespan of `sequence`.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        sequence: &mut Vec<Job>,
        makespan: Time,
        rng: &mut R,
    ) -> Time {
        if sequence.len() < 2 {
            return makespan;
        }
        let mut best = makespan;
        loop {
            let pass_start = best;
            let mut moved = false;
            self.order.clear();
            self.order.extend_from_slice(sequence);
            self.order.shuffle(rng);
            for &job in &self.order {
                let at = sequence.iter().position(|&j| j == job).expect("job in sequence");
                sequence.remove(at);
                let (pos, c) = self.eval.best_position(instance, sequence, job, true);
                sequence.insert(pos, job);
                moved |= pos != at;
                // the old slot is always a candidate, so c never exceeds best
                best = best.min(c);
            }
            if best < pass_start {
                continue;
            }
            if !moved || !self.strict_sweep(instance, sequence, &mut best) {
                return best;
            }
        }
    }

    /// Applies the first strictly improving re-insertion found, if any.
    fn strict_sweep(&mut self, instance: &Instance, sequence: &mut Vec<Job>, best: &mut Time) -> bool {
        for at in 0..sequence.len() {
            let job = sequence.remove(at);
            // only the makespan matters here
            let (pos, c) = self.eval.best_position(instance, sequence, job, false);
            if c < *best {
                sequence.insert(pos, job);
                *best = c;
                return true;
            }
            sequence.insert(at, job);
        }
        false
    }
}

/// Runs the insertion local search on a complete or partial sequence and
/// returns the improved sequence with its makespan.
pub fn insertion_local_search<R: Rng + ?Sized>(
    instance: &Instance,
    sequence: &[Job],
    rng: &mut R,
) -> Result<(Vec<Job>, Time)> {
    validate_sequence(instance, sequence)?;
    let mut seq = sequence.to_vec();
    let start = super::compute_makespan(instance, &seq)?;
    let c = LocalSearch::new().run(instance, &mut seq, start, rng);
    Ok((seq, c))
}
