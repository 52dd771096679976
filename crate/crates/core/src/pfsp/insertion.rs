//! Insertion-neighbourhood evaluation with Taillard's acceleration.
//!
//! For a partial sequence of length `L`, the heads `e` (earliest completion of
//! the first `k` jobs) and tails `q` (shortest time from the start of job `k`
//! to the end of the schedule) are built once in `O(L·m)`. The makespan of the
//! sequence with the new job inserted at position `k` is then
//! `max_i (f[i][k] + q[i][k])`, where `f` is the inserted job's completion on
//! machine `i`. All `L + 1` candidates cost `O(L·m)` together.

use super::makespan::validate_sequence;
use super::{Instance, Job, Time};
use crate::error::{Error, Result};

/// Reusable buffers for evaluating every insertion position of one job.
#[derive(Debug, Default, Clone)]
pub struct InsertionEvaluator {
    heads: Vec<Time>,
    tails: Vec<Time>,
    makespans: Vec<Time>,
    front: Vec<Time>,
}

impl InsertionEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makespan of `partial` with `job` inserted before position `k`, for every
    /// `k` in `0..=partial.len()`. Inputs are not validated.
    pub fn evaluate(&mut self, instance: &Instance, partial: &[Job], job: Job) -> &[Time] {
        let m = instance.machines();
        let len = partial.len();

        // heads: row k holds completions of the first k jobs; row 0 is zero.
        self.heads.clear();
        self.heads.resize((len + 1) * m, 0);
        for (k, &j) in partial.iter().enumerate() {
            let (done, rest) = self.heads.split_at_mut((k + 1) * m);
            let above = &done[k * m..];
            let row = &mut rest[..m];
            let mut prev = 0;
            for ((c, &up), &p) in row.iter_mut().zip(above).zip(instance.job_times(j)) {
                prev = up.max(prev) + p;
                *c = prev;
            }
        }

        // tails: row k (0-based job index k) for k in 0..len, row len is zero.
        self.tails.clear();
        self.tails.resize((len + 1) * m, 0);
        for k in (0..len).rev() {
            let (row_part, below_part) = self.tails.split_at_mut((k + 1) * m);
            let row = &mut row_part[k * m..];
            let below = &below_part[..m];
            let times = instance.job_times(partial[k]);
            let mut next = 0;
            for i in (0..m).rev() {
                next = below[i].max(next) + times[i];
                row[i] = next;
            }
        }

        self.makespans.clear();
        let times = instance.job_times(job);
        for k in 0..=len {
            let head = &self.heads[k * m..(k + 1) * m];
            let tail = &self.tails[k * m..(k + 1) * m];
            let mut f = 0;
            let mut best = 0;
            for i in 0..m {
                f = f.max(head[i]) + times[i];
                best = best.max(f + tail[i]);
            }
            self.makespans.push(best);
        }
        &self.makespans
    }

    /// Position minimising the makespan, and that makespan.
    ///
    /// With `tie_break`, ties on makespan go to the position whose schedule has
    /// the least idle time between consecutive operations; remaining ties (and
    /// all ties when `tie_break` is off) go to the lowest position.
    pub fn best_position(
        &mut self,
        instance: &Instance,
        partial: &[Job],
        job: Job,
        tie_break: bool,
    ) -> (usize, Time) {
        self.evaluate(instance, partial, job);
        let best = *self.makespans.iter().min().expect("at least one position");
        let first = self.makespans.iter().position(|&c| c == best).unwrap();
        if !tie_break {
            return (first, best);
        }
        let tied: Vec<usize> = (first..self.makespans.len())
            .filter(|&k| self.makespans[k] == best)
            .collect();
        if tied.len() == 1 {
            return (first, best);
        }
        let mut choice = (first, Time::MAX);
        for k in tied {
            let idle = self.idle_with(instance, partial, job, k);
            if idle < choice.1 {
                choice = (k, idle);
            }
        }
        (choice.0, best)
    }

    /// Idle time between consecutive operations of `partial` with `job`
    /// inserted at `k`, plus the total processing time (the same for every
    /// `k`), from the heads of the last `evaluate` call.
    ///
    /// On machine `i` the internal idle is `C_i(last) - C_{i-1}(first) - load_i`,
    /// so only the last job's completions are needed. They are propagated
    /// forward from the insertion point. Completions are max-plus linear in
    /// the previous row, so once the new row is the old head row shifted by
    /// the same amount on every machine, every later row is too and the scan
    /// stops.
    fn idle_with(&mut self, instance: &Instance, partial: &[Job], job: Job, k: usize) -> Time {
        let m = instance.machines();
        let len = partial.len();
        self.front.clear();
        self.front.extend_from_slice(&self.heads[k * m..(k + 1) * m]);
        let mut prev = 0;
        for (c, &p) in self.front.iter_mut().zip(instance.job_times(job)) {
            prev = prev.max(*c) + p;
            *c = prev;
        }
        let mut shift = None;
        for (pos, &j) in partial.iter().enumerate().skip(k) {
            let mut prev = 0;
            for (c, &p) in self.front.iter_mut().zip(instance.job_times(j)) {
                prev = prev.max(*c) + p;
                *c = prev;
            }
            let old = &self.heads[(pos + 1) * m..(pos + 2) * m];
            let d = self.front[0] - old[0];
            if self.front.iter().zip(old).all(|(c, o)| c - o == d) {
                shift = Some(d);
                break;
            }
        }
        let finish: Time = match shift {
            Some(d) => self.heads[len * m..(len + 1) * m].iter().sum::<Time>() + d * m as Time,
            None => self.front.iter().sum(),
        };

        let first = instance.job_times(if k == 0 { job } else { partial[0] });
        let mut start = 0;
        let mut lead = 0;
        for &p in &first[..m - 1] {
            start += p;
            lead += start;
        }
        finish - lead
    }
}

fn check_insertion(instance: &Instance, partial: &[Job], job: Job) -> Result<()> {
    validate_sequence(instance, partial)?;
    if job >= instance.jobs() {
        return Err(Error::InvalidArgument(format!(
            "job {job} is out of range 0..{}",
            instance.jobs()
        )));
    }
    if partial.contains(&job) {
        return Err(Error::InvalidArgument(format!(
            "job {job} is already in the partial sequence"
        )));
    }
    Ok(())
}

/// `(position, makespan)` for every insertion position of `job` into `partial`.
pub fn evaluate_all_insertions(
    instance: &Instance,
    partial: &[Job],
    job: Job,
) -> Result<Vec<(usize, Time)>> {
    check_insertion(instance, partial, job)?;
    let mut eval = InsertionEvaluator::new();
    Ok(eval
        .evaluate(instance, partial, job)
        .iter()
        .copied()
        .enumerate()
        .collect())
}

/// Best insertion position of `job` into `partial`; see
/// [`InsertionEvaluator::best_position`] for the tie rules.
pub fn best_insertion_position(
    instance: &Instance,
    partial: &[Job],
    job: Job,
    tie_break: bool,
) -> Result<usize> {
    check_insertion(instance, partial, job)?;
    Ok(InsertionEvaluator::new()
        .best_position(instance, partial, job, tie_break)
        .0)
}
