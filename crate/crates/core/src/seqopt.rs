//! Minimum-setup sequencing of a fixed job assignment.
//!
//! Setup times do not depend on the scenario, so for a fixed assignment the
//! sequence minimising each machine's total setup minimises every machine's
//! completion time under every scenario at once. Such a schedule has the
//! smallest maximum regret among all schedules sharing its assignment.
//!
//! Each machine is an open path from the dummy job through its jobs (returning
//! to the dummy is free). Up to [`EXACT_THRESHOLD`] jobs the path is found by
//! Held-Karp dynamic programming over subsets; above that a greedy path
//! improved by or-opt and 2-opt moves is returned and flagged uncertified.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::eval::sequence_setup;
use crate::model::{mask_jobs, Instance, Schedule, Time};

/// Largest job set sequenced exactly.
pub const EXACT_THRESHOLD: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSequence {
    pub jobs: Vec<usize>,
    pub total_setup: Time,
    /// `true` when the sequence is proven setup-optimal.
    pub certified: bool,
}

/// Unordered job sets per machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssignmentView {
    sets: Vec<Vec<usize>>,
}

impl AssignmentView {
    /// Sorts each set; callers guarantee the sets partition the jobs.
    pub fn new(mut sets: Vec<Vec<usize>>) -> Self {
        for s in &mut sets {
            s.sort_unstable();
        }
        AssignmentView { sets }
    }

    pub fn of(sched: &Schedule) -> Self {
        AssignmentView::new(sched.sequences().to_vec())
    }

    pub fn from_masks(masks: &[u64]) -> Self {
        AssignmentView {
            sets: masks.iter().map(|&m| mask_jobs(m).collect()).collect(),
        }
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn masks(&self) -> Vec<u64> {
        self.sets
            .iter()
            .map(|s| s.iter().fold(0u64, |acc, &j| acc | 1 << j))
            .collect()
    }
}

/// Setup-optimal open path over `jobs` on `machine`; ties go to the
/// lexicographically smallest sequence in exact mode.
pub fn optimal_machine_sequence(inst: &Instance, machine: usize, jobs: &[usize]) -> MachineSequence {
    let mut sorted = jobs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() <= EXACT_THRESHOLD {
        held_karp(inst, machine, &sorted)
    } else {
        local_search_path(inst, machine, &sorted)
    }
}

/// Applies [`optimal_machine_sequence`] to every machine.
pub fn resequence(inst: &Instance, assignment: &AssignmentView) -> Schedule {
    let seqs = assignment
        .sets()
        .iter()
        .enumerate()
        .map(|(i, set)| optimal_machine_sequence(inst, i, set).jobs)
        .collect();
    Schedule::from_sequences_unchecked(seqs)
}

fn held_karp(inst: &Instance, machine: usize, jobs: &[usize]) -> MachineSequence {
    let k = jobs.len();
    if k == 0 {
        return MachineSequence { jobs: Vec::new(), total_setup: 0, certified: true };
    }
    let full = (1usize << k) - 1;
    // node k is the dummy; cost[a][b] = setup from node a to job node b
    let node_job = |a: usize| if a == k { 0 } else { jobs[a] };
    let cost: Vec<Time> = (0..=k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .map(|(a, b)| inst.setup(machine, node_job(a), jobs[b]))
        .collect();
    let c = |a: usize, b: usize| cost[a * k + b];

    // rest[mask * k + cur]: cheapest way to visit every job in `mask` starting
    // right after job `cur` (cur not in mask)
    let mut rest = vec![Time::MAX; (full + 1) * k];
    for cur in 0..k {
        rest[cur] = 0;
    }
    for mask in 1..full {
        for cur in 0..k {
            if mask >> cur & 1 == 1 {
                continue;
            }
            let mut best = Time::MAX;
            let mut bits = mask;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let v = c(cur, t) + rest[(mask ^ (1 << t)) * k + t];
                best = best.min(v);
            }
            rest[mask * k + cur] = best;
        }
    }
    let from = |mask: usize, cur: usize| -> Time {
        if mask == 0 {
            0
        } else if cur == k {
            let mut best = Time::MAX;
            for t in 0..k {
                if mask >> t & 1 == 1 {
                    best = best.min(c(k, t) + rest[(mask ^ (1 << t)) * k + t]);
                }
            }
            best
        } else {
            rest[mask * k + cur]
        }
    };

    let total = from(full, k);
    let mut seq = Vec::with_capacity(k);
    let (mut mask, mut cur) = (full, k);
    while mask != 0 {
        let target = from(mask, cur);
        // jobs are sorted, so the first match is the lexicographic choice
        let t = (0..k)
            .find(|&t| mask >> t & 1 == 1 && c(cur, t) + from(mask ^ (1 << t), t) == target)
            .expect("a DP witness exists");
        seq.push(jobs[t]);
        mask ^= 1 << t;
        cur = t;
    }
    MachineSequence { jobs: seq, total_setup: total, certified: true }
}

fn local_search_path(inst: &Instance, machine: usize, jobs: &[usize]) -> MachineSequence {
    let cost = |seq: &[usize]| sequence_setup(inst, machine, seq);

    // nearest successor, lowest index on ties
    let mut left: Vec<usize> = jobs.to_vec();
    let mut seq = Vec::with_capacity(jobs.len());
    let mut prev = 0;
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by_key(|&(_, &j)| (inst.setup(machine, prev, j), j))
            .unwrap();
        prev = left.remove(pos);
        seq.push(prev);
    }

    let mut best = cost(&seq);
    let len = seq.len();
    'improve: loop {
        // or-opt: move a segment of 1..=3 jobs elsewhere
        for seg in 1..=3.min(len - 1) {
            for start in 0..=len - seg {
                for to in 0..=len - seg {
                    if to == start {
                        continue;
                    }
                    let mut cand = seq.clone();
                    let piece: Vec<usize> = cand.drain(start..start + seg).collect();
                    cand.splice(to..to, piece);
                    let v = cost(&cand);
                    if v < best {
                        best = v;
                        seq = cand;
                        continue 'improve;
                    }
                }
            }
        }
        // 2-opt: reverse a segment
        for a in 0..len {
            for b in a + 1..len {
                let mut cand = seq.clone();
                cand[a..=b].reverse();
                let v = cost(&cand);
                if v < best {
                    best = v;
                    seq = cand;
                    continue 'improve;
                }
            }
        }
        break;
    }
    MachineSequence { jobs: seq, total_setup: best, certified: false }
}

/// Memoised sequencing for one instance, keyed by `(machine, job mask)`.
///
/// Not `Sync`; give each worker thread its own.
pub struct Sequencer<'a> {
    inst: &'a Instance,
    cache: RefCell<HashMap<(usize, u64), Rc<MachineSequence>>>,
}

impl<'a> Sequencer<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Sequencer { inst, cache: RefCell::new(HashMap::new()) }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn sequence(&self, machine: usize, mask: u64) -> Rc<MachineSequence> {
        if let Some(s) = self.cache.borrow().get(&(machine, mask)) {
            return Rc::clone(s);
        }
        let jobs: Vec<usize> = mask_jobs(mask).collect();
        let seq = Rc::new(optimal_machine_sequence(self.inst, machine, &jobs));
        self.cache.borrow_mut().insert((machine, mask), Rc::clone(&seq));
        seq
    }

    #[inline]
    pub fn setup_cost(&self, machine: usize, mask: u64) -> Time {
        self.sequence(machine, mask).total_setup
    }

    /// Schedule with setup-optimal sequences for the given machine masks.
    pub fn schedule_from_masks(&self, masks: &[u64]) -> Schedule {
        let seqs = masks
            .iter()
            .enumerate()
            .map(|(i, &mask)| self.sequence(i, mask).jobs.clone())
            .collect();
        Schedule::from_sequences_unchecked(seqs)
    }

    pub fn resequence(&self, sched: &Schedule) -> Schedule {
        self.schedule_from_masks(&sched.masks())
    }

    /// `true` if every machine sequence of the masks is certified optimal.
    pub fn certified(&self, masks: &[u64]) -> bool {
        masks.iter().enumerate().all(|(i, &m)| self.sequence(i, m).certified)
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.borrow().len()
    }
}
