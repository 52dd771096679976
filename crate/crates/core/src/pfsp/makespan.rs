use super::{Instance, Job, Time};
use crate::error::{Error, Result};

/// Checks that `sequence` holds distinct, in-range job indices.
pub fn validate_sequence(instance: &Instance, sequence: &[Job]) -> Result<()> {
    let mut seen = vec![false; instance.jobs()];
    for (pos, &job) in sequence.iter().enumerate() {
        if job >= instance.jobs() {
            return Err(Error::InvalidSequence(format!(
                "job {job} at position {pos} is out of range 0..{}",
                instance.jobs()
            )));
        }
        if std::mem::replace(&mut seen[job], true) {
            return Err(Error::InvalidSequence(format!(
                "job {job} appears more than once (position {pos})"
            )));
        }
    }
    Ok(())
}

/// Makespan of a (possibly partial) sequence. The empty sequence has makespan 0.
pub fn compute_makespan(instance: &Instance, sequence: &[Job]) -> Result<Time> {
    validate_sequence(instance, sequence)?;
    let mut front = vec![0; instance.machines()];
    Ok(makespan_with(instance, sequence, &mut front))
}

/// Completion-time recursion over a single row buffer of length `m`.
/// The sequence is not validated.
pub(crate) fn makespan_with(instance: &Instance, sequence: &[Job], front: &mut [Time]) -> Time {
    front.fill(0);
    for &job in sequence {
        let mut prev = 0;
        for (c, &p) in front.iter_mut().zip(instance.job_times(job)) {
            prev = (*c).max(prev) + p;
            *c = prev;
        }
    }
    front.last().copied().unwrap_or(0)
}

/// Total idle time between consecutive operations on every machine.
///
/// Idle time before a machine's first operation and after its last one is not
/// counted; for schedules of equal makespan that part is determined by the
/// processing-time totals alone.
pub fn idle_time(instance: &Instance, sequence: &[Job]) -> Time {
    let mut front = vec![0; instance.machines()];
    sequence_idle(instance, sequence.iter().copied(), &mut front)
}

pub(crate) fn sequence_idle(
    instance: &Instance,
    sequence: impl IntoIterator<Item = Job>,
    front: &mut [Time],
) -> Time {
    front.fill(0);
    let mut idle = 0;
    for (k, job) in sequence.into_iter().enumerate() {
        let mut prev = 0;
        for (c, &p) in front.iter_mut().zip(instance.job_times(job)) {
            let start = (*c).max(prev);
            if k > 0 {
                idle += start - *c;
            }
            prev = start + p;
            *c = prev;
        }
    }
    idle
}

/// Machine-based makespan lower bound: the larger of the longest job and, for
/// each machine, its total load plus the smallest head before and tail after it.
pub fn lower_bound(instance: &Instance) -> Time {
    let (n, m) = (instance.jobs(), instance.machines());
    let mut best = (0..n).map(|j| instance.job_total(j)).max().unwrap_or(0);
    for i in 0..m {
        let head = (0..n).map(|j| instance.job_times(j)[..i].iter().sum::<Time>()).min().unwrap_or(0);
        let tail = (0..n).map(|j| instance.job_times(j)[i + 1..].iter().sum::<Time>()).min().unwrap_or(0);
        let load: Time = instance.machine_row(i).iter().sum();
        best = best.max(head + load + tail);
    }
    best
}
