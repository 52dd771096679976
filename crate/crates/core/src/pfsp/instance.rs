use crate::error::{Error, Result};

/// Index of a job, `0..n`.
pub type Job = usize;
/// Processing and completion times are exact integers.
pub type Time = u64;

/// A permutation flowshop instance: `n` jobs visiting `m` machines in the same order.
///
/// Processing times are stored machine-major, so the row for machine `i` is the
/// contiguous slice `times[i * n..(i + 1) * n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    jobs: usize,
    machines: usize,
    times: Vec<Time>,
    // job-major copy for the inner loops of the insertion evaluator
    by_job: Vec<Time>,
}

impl Instance {
    /// Builds an instance from one row of processing times per machine.
    pub fn from_rows(rows: Vec<Vec<Time>>) -> Result<Self> {
        let machines = rows.len();
        if machines == 0 {
            return Err(Error::InvalidInstance("at least one machine is required".into()));
        }
        let jobs = rows[0].len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != jobs) {
            return Err(Error::InvalidInstance(format!(
                "machine {i} has {} processing times, expected {jobs}",
                row.len()
            )));
        }
        Self::from_flat(jobs, machines, rows.into_iter().flatten().collect())
    }

    /// Builds an instance from a machine-major buffer of `machines * jobs` times.
    pub fn from_flat(jobs: usize, machines: usize, times: Vec<Time>) -> Result<Self> {
        if jobs == 0 {
            return Err(Error::InvalidInstance("at least one job is required".into()));
        }
        if machines == 0 {
            return Err(Error::InvalidInstance("at least one machine is required".into()));
        }
        if times.len() != jobs * machines {
            return Err(Error::InvalidInstance(format!(
                "expected {} processing times for {jobs} jobs x {machines} machines, got {}",
                jobs * machines,
                times.len()
            )));
        }
        let mut by_job = vec![0; times.len()];
        for i in 0..machines {
            for j in 0..jobs {
                by_job[j * machines + i] = times[i * jobs + j];
            }
        }
        Ok(Self { jobs, machines, times, by_job })
    }

    #[inline]
    pub fn jobs(&self) -> usize {
        self.jobs
    }

    #[inline]
    pub fn machines(&self) -> usize {
        self.machines
    }

    /// Processing time of `job` on `machine`.
    #[inline]
    pub fn time(&self, machine: usize, job: Job) -> Time {
        self.times[machine * self.jobs + job]
    }

    /// Processing times of every job on `machine`.
    #[inline]
    pub fn machine_row(&self, machine: usize) -> &[Time] {
        &self.times[machine * self.jobs..(machine + 1) * self.jobs]
    }

    /// Processing times of `job` on machines `0..m`, in route order.
    #[inline]
    pub fn job_times(&self, job: Job) -> &[Time] {
        &self.by_job[job * self.machines..(job + 1) * self.machines]
    }

    /// Sum of the job's processing times over all machines.
    pub fn job_total(&self, job: Job) -> Time {
        self.job_times(job).iter().sum()
    }

    /// Sum of every processing time in the instance.
    pub fn total_time(&self) -> Time {
        self.times.iter().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Time]> {
        self.times.chunks(self.jobs)
    }
}

/// A complete permutation together with its makespan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub sequence: Vec<Job>,
    pub makespan: Time,
}

impl Solution {
    pub fn new(sequence: Vec<Job>, makespan: Time) -> Self {
        Self { sequence, makespan }
    }

    /// Evaluates `sequence` and wraps it.
    pub fn evaluate(instance: &Instance, sequence: Vec<Job>) -> Result<Self> {
        let makespan = super::compute_makespan(instance, &sequence)?;
        Ok(Self { sequence, makespan })
    }
}

/// The jobs left in place after a destruction step, plus the extracted jobs in
/// the order they were removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSolution {
    pub sequence: Vec<Job>,
    pub removed: Vec<Job>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_rows() {
        let err = Instance::from_rows(vec![vec![1, 2], vec![3]]).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }

    #[test]
    fn rejects_empty_dimensions() {
        assert!(Instance::from_rows(vec![]).is_err());
        assert!(Instance::from_rows(vec![vec![]]).is_err());
        assert!(Instance::from_flat(2, 2, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn accessors_follow_machine_major_layout() {
        let inst = Instance::from_rows(vec![vec![2, 1, 3], vec![3, 2, 1]]).unwrap();
        assert_eq!(inst.jobs(), 3);
        assert_eq!(inst.machines(), 2);
        assert_eq!(inst.time(1, 0), 3);
        assert_eq!(inst.machine_row(0), &[2, 1, 3]);
        assert_eq!(inst.job_times(2), &[3, 1]);
        assert_eq!(inst.job_total(0), 5);
        assert_eq!(inst.total_time(), 12);
    }
}
