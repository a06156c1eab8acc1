//! Depth-first branch-and-bound over job-to-machine assignments.
//!
//! Leaves are sequenced setup-optimally through the shared [`Sequencer`], so
//! the search only enumerates assignments.

use crate::clock::Deadline;
use crate::model::{Instance, Scenario, Schedule, Time};
use crate::seqopt::Sequencer;

use super::masks_makespan;

/// Incoming-setup tables for partial-assignment bounds.
///
/// For job `k` on machine `i`, its final predecessor is the dummy or another
/// job that may still end up on `i`. The cheapest such setup only grows as
/// jobs get fixed elsewhere, which makes the node bounds monotone.
pub(crate) struct EntryBound {
    n: usize,
    m: usize,
    // [machine * (n+1) + job] -> (setup, pred) ascending, self excluded
    preds: Vec<Vec<(Time, usize)>>,
}

impl EntryBound {
    pub(crate) fn new(inst: &Instance) -> Self {
        let (n, m) = (inst.num_jobs(), inst.num_machines());
        let mut preds = Vec::with_capacity(m * (n + 1));
        for i in 0..m {
            for k in 0..=n {
                let mut list: Vec<(Time, usize)> =
                    (0..=n).filter(|&j| j != k).map(|j| (inst.setup(i, j, k), j)).collect();
                list.sort_unstable();
                preds.push(list);
            }
        }
        EntryBound { n, m, preds }
    }

    /// Smallest setup into `k` on `i` from the dummy or a job in `allowed`.
    #[inline]
    pub(crate) fn min_setup(&self, i: usize, k: usize, allowed: u64) -> Time {
        self.preds[i * (self.n + 1) + k]
            .iter()
            .find(|&&(_, j)| j == 0 || allowed >> j & 1 == 1)
            .map_or(0, |&(s, _)| s)
    }

    /// Lower bound on the makespan of any completion of the partial
    /// assignment `masks` with the jobs in `unassigned` still free. Per-machine
    /// committed-load bounds are written to `loads`.
    pub(crate) fn bound(
        &self,
        scen: &Scenario,
        masks: &[u64],
        unassigned: u64,
        loads: &mut [Time],
    ) -> Time {
        let mut worst = 0;
        let mut total = 0;
        for i in 0..self.m {
            let allowed = masks[i] | unassigned;
            let mut load = 0;
            let mut bits = masks[i];
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                load += scen.p(i, k) + self.min_setup(i, k, allowed);
            }
            loads[i] = load;
            worst = worst.max(load);
            total += load;
        }
        let mut bits = unassigned;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let best = (0..self.m)
                .map(|i| scen.p(i, k) + self.min_setup(i, k, masks[i] | unassigned))
                .min()
                .unwrap_or(0);
            worst = worst.max(best);
            total += best;
        }
        let m = self.m as Time;
        worst.max((total + m - 1) / m)
    }
}

/// Committed-load bounds reused by the robust master problem.
pub(crate) struct PartialBound;

impl PartialBound {
    /// Jobs sorted hardest first: decreasing smallest processing time, then
    /// index.
    pub(crate) fn job_order(inst: &Instance, p: impl Fn(usize, usize) -> Time) -> Vec<usize> {
        let mut order: Vec<usize> = inst.jobs().collect();
        order.sort_by_key(|&k| {
            let easiest = (0..inst.num_machines()).map(|i| p(i, k)).min().unwrap_or(0);
            (std::cmp::Reverse(easiest), k)
        });
        order
    }
}

pub(crate) struct BnbOutcome {
    pub makespan: Time,
    pub masks: Vec<u64>,
    pub nodes: u64,
    /// Search finished, so `makespan` is optimal.
    pub complete: bool,
}

struct Dfs<'s, 'a> {
    seq: &'s Sequencer<'a>,
    scen: &'s Scenario,
    eb: EntryBound,
    order: Vec<usize>,
    masks: Vec<u64>,
    best: Time,
    best_masks: Vec<u64>,
    root_lb: Time,
    nodes: u64,
    deadline: Deadline,
    aborted: bool,
}

impl Dfs<'_, '_> {
    fn go(&mut self, depth: usize) {
        if self.aborted || self.best <= self.root_lb {
            return;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 1 && self.deadline.expired() {
            self.aborted = true;
            return;
        }
        let m = self.masks.len();
        if depth == self.order.len() {
            let value = masks_makespan(self.seq, self.scen, &self.masks);
            if value < self.best {
                self.best = value;
                self.best_masks.clone_from(&self.masks);
            }
            return;
        }
        let unassigned = self.order[depth..].iter().fold(0u64, |acc, &k| acc | 1 << k);
        let mut loads = vec![0; m];
        if self.eb.bound(self.scen, &self.masks, unassigned, &mut loads) >= self.best {
            return;
        }
        let k = self.order[depth];
        let mut machines: Vec<usize> = (0..m).collect();
        machines.sort_by_key(|&i| (loads[i], i));
        for i in machines {
            self.masks[i] |= 1 << k;
            self.go(depth + 1);
            self.masks[i] &= !(1 << k);
            if self.aborted {
                return;
            }
        }
    }
}

/// Greedy list schedule: jobs in `order`, each appended to the machine whose
/// completion after the append is smallest.
pub(crate) fn greedy_masks(inst: &Instance, scen: &Scenario, order: &[usize]) -> Vec<u64> {
    let m = inst.num_machines();
    let mut masks = vec![0u64; m];
    let mut load = vec![0 as Time; m];
    let mut last = vec![0usize; m];
    for &k in order {
        let i = (0..m)
            .min_by_key(|&i| (load[i] + inst.setup(i, last[i], k) + scen.p(i, k), i))
            .unwrap();
        load[i] += inst.setup(i, last[i], k) + scen.p(i, k);
        last[i] = k;
        masks[i] |= 1 << k;
    }
    masks
}

pub(crate) fn branch_and_bound(
    seq: &Sequencer<'_>,
    scen: &Scenario,
    root_lb: Time,
    warm: &[&Schedule],
    deadline: Deadline,
) -> BnbOutcome {
    let inst = seq.instance();
    let order = PartialBound::job_order(inst, |i, k| scen.p(i, k));

    let mut best_masks = greedy_masks(inst, scen, &order);
    let mut best = masks_makespan(seq, scen, &best_masks);
    for w in warm {
        let masks = w.masks();
        let v = masks_makespan(seq, scen, &masks);
        if v < best {
            best = v;
            best_masks = masks;
        }
    }

    let mut dfs = Dfs {
        seq,
        scen,
        eb: EntryBound::new(inst),
        order,
        masks: vec![0; inst.num_machines()],
        best,
        best_masks,
        root_lb,
        nodes: 0,
        deadline,
        aborted: false,
    };
    dfs.go(0);
    BnbOutcome {
        makespan: dfs.best,
        masks: dfs.best_masks,
        nodes: dfs.nodes,
        complete: !dfs.aborted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, GeneratorConfig};
    use crate::scenario::random_scenario;

    #[test]
    fn min_setup_respects_allowed_set() {
        let inst = Instance::from_fn(3, 1, |_, j, k| (10 * j + k) as Time + 1, |_, _| (1, 1));
        let eb = EntryBound::new(&inst);
        // into job 3: dummy costs 4, job 1 costs 14, job 2 costs 24
        assert_eq!(eb.min_setup(0, 3, 0), 4);
        let inst = Instance::from_fn(3, 1, |_, j, _| if j == 0 { 50 } else { j as Time }, |_, _| (1, 1));
        let eb = EntryBound::new(&inst);
        assert_eq!(eb.min_setup(0, 3, 0), 50);
        assert_eq!(eb.min_setup(0, 3, 1 << 2), 2);
        assert_eq!(eb.min_setup(0, 3, (1 << 1) | (1 << 2)), 1);
        assert_eq!(eb.min_setup(0, 1, 1 << 1), 50);
    }

    #[test]
    fn timeout_returns_incumbent_uncertified() {
        let inst = generate_instance(&GeneratorConfig::new(1, 14, 4));
        let scen = random_scenario(&inst, 0);
        let seq = Sequencer::new(&inst);
        let expired = Deadline::after(Some(std::time::Duration::ZERO));
        let out = branch_and_bound(&seq, &scen, 0, &[], expired);
        // the deadline is probed at the root and every 4096 nodes after
        assert!(!out.complete);
        assert_eq!(out.makespan, masks_makespan(&seq, &scen, &out.masks));
    }
}
