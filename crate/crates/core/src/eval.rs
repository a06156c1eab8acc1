//! Completion times, makespan and regret of a fixed schedule.
//!
//! Jobs run back to back from time zero, so a machine finishes at the sum of
//! its setups and processing times.

use serde::Serialize;

use crate::model::{Instance, Scenario, Schedule, Time};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MachineLoad {
    pub machine: usize,
    pub total_setup: Time,
    pub total_processing: Time,
    pub completion: Time,
    /// `(job, completion time)` along the sequence.
    pub job_completions: Vec<(usize, Time)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompletionInterval {
    pub machine: usize,
    pub lo: Time,
    pub hi: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Makespan {
    pub value: Time,
    /// Every machine attaining `value`, ascending.
    pub critical: Vec<usize>,
}

/// Total setup along `seq` on `machine`, starting from the dummy job.
#[inline]
pub fn sequence_setup(inst: &Instance, machine: usize, seq: &[usize]) -> Time {
    let mut prev = 0;
    let mut total = 0;
    for &j in seq {
        total += inst.setup(machine, prev, j);
        prev = j;
    }
    total
}

/// Completion time of `seq` on `machine` with processing times from `p`.
#[inline]
pub fn sequence_completion(
    inst: &Instance,
    machine: usize,
    seq: &[usize],
    p: impl Fn(usize, usize) -> Time,
) -> Time {
    sequence_setup(inst, machine, seq) + seq.iter().map(|&j| p(machine, j)).sum::<Time>()
}

pub fn machine_completion(
    inst: &Instance,
    sched: &Schedule,
    scen: &Scenario,
    machine: usize,
) -> MachineLoad {
    let mut prev = 0;
    let (mut setup, mut proc, mut clock) = (0, 0, 0);
    let mut job_completions = Vec::with_capacity(sched.sequence(machine).len());
    for &j in sched.sequence(machine) {
        let s = inst.setup(machine, prev, j);
        let p = scen.p(machine, j);
        setup += s;
        proc += p;
        clock += s + p;
        job_completions.push((j, clock));
        prev = j;
    }
    MachineLoad {
        machine,
        total_setup: setup,
        total_processing: proc,
        completion: clock,
        job_completions,
    }
}

/// Makespan value plus every critical machine (ties kept).
pub fn makespan(inst: &Instance, sched: &Schedule, scen: &Scenario) -> Makespan {
    let loads: Vec<Time> = (0..inst.num_machines())
        .map(|i| sequence_completion(inst, i, sched.sequence(i), |a, b| scen.p(a, b)))
        .collect();
    let value = loads.iter().copied().max().unwrap_or(0);
    let critical = (0..loads.len()).filter(|&i| loads[i] == value).collect();
    Makespan { value, critical }
}

/// Makespan value only.
#[inline]
pub fn makespan_value(inst: &Instance, sched: &Schedule, scen: &Scenario) -> Time {
    (0..inst.num_machines())
        .map(|i| sequence_completion(inst, i, sched.sequence(i), |a, b| scen.p(a, b)))
        .max()
        .unwrap_or(0)
}

pub fn completion_interval(inst: &Instance, sched: &Schedule, machine: usize) -> CompletionInterval {
    let seq = sched.sequence(machine);
    let setup = sequence_setup(inst, machine, seq);
    CompletionInterval {
        machine,
        lo: setup + seq.iter().map(|&j| inst.p_lo(machine, j)).sum::<Time>(),
        hi: setup + seq.iter().map(|&j| inst.p_hi(machine, j)).sum::<Time>(),
    }
}

/// `F(sched, scen) - f_star`.
///
/// With `exact` set, `f_star` is the true optimum and a negative result means
/// the optimum was wrong.
pub fn regret(
    inst: &Instance,
    sched: &Schedule,
    scen: &Scenario,
    f_star: Time,
    exact: bool,
) -> Result<Time> {
    let r = makespan_value(inst, sched, scen) - f_star;
    if exact && r < 0 {
        return Err(Error::NegativeRegret { regret: r });
    }
    Ok(r)
}
