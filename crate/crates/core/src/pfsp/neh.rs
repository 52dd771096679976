use rand::RngCore;

use super::local_search::LocalSearch;
use super::{Instance, InsertionEvaluator, Job, Solution};

/// Jobs in descending order of total processing time; equal totals keep the
/// lower job index first.
pub fn neh_order(instance: &Instance) -> Vec<Job> {
    let mut order: Vec<Job> = (0..instance.jobs()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(instance.job_total(j)));
    order
}

/// NEH construction with tie-breaking on idle time.
pub fn neh_construct(instance: &Instance) -> Solution {
    build(instance, None)
}

/// NEH with an insertion local search applied to the growing partial sequence
/// after every insertion.
pub fn neh_construct_with_local_search<R: RngCore>(instance: &Instance, rng: &mut R) -> Solution {
    build(instance, Some(rng))
}

fn build(instance: &Instance, mut rng: Option<&mut dyn RngCore>) -> Solution {
    let order = neh_order(instance);
    let mut eval = InsertionEvaluator::new();
    let mut ls = LocalSearch::new();
    let mut sequence = Vec::with_capacity(order.len());
    let mut makespan = 0;
    for job in order {
        let (pos, c) = eval.best_position(instance, &sequence, job, true);
        sequence.insert(pos, job);
        makespan = c;
        if let Some(rng) = rng.as_deref_mut() {
            makespan = ls.run(instance, &mut sequence, makespan, rng);
        }
    }
    Solution::new(sequence, makespan)
}
