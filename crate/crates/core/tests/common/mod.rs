//! Brute-force oracles. Nothing here calls the library's solvers; only the
//! data types and the instance generator are shared.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rupm::model::{generate_instance, GeneratorConfig};
use rupm::{Instance, Scenario, ScenarioLabel, Schedule, Time};

pub fn instance(seed: u64, n: usize, m: usize) -> Instance {
    generate_instance(&GeneratorConfig::new(seed, n, m))
}

/// Every permutation of `items`, in lexicographic order of positions.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

pub fn path_setup(inst: &Instance, i: usize, seq: &[usize]) -> Time {
    let mut prev = 0;
    let mut total = 0;
    for &j in seq {
        total += inst.setup(i, prev, j);
        prev = j;
    }
    total
}

pub fn brute_min_setup(inst: &Instance, i: usize, jobs: &[usize]) -> Time {
    permutations(jobs).iter().map(|p| path_setup(inst, i, p)).min().unwrap()
}

pub fn completion(inst: &Instance, scen: &Scenario, i: usize, seq: &[usize]) -> Time {
    path_setup(inst, i, seq) + seq.iter().map(|&j| scen.p(i, j)).sum::<Time>()
}

pub fn makespan(inst: &Instance, scen: &Scenario, seqs: &[Vec<usize>]) -> Time {
    seqs.iter().enumerate().map(|(i, s)| completion(inst, scen, i, s)).max().unwrap()
}

fn jobs_of(mask: u64, n: usize) -> Vec<usize> {
    (1..=n).filter(|&j| mask >> j & 1 == 1).collect()
}

/// All job-to-machine assignments, as per-machine sorted job lists.
pub fn assignments(n: usize, m: usize) -> Vec<Vec<Vec<usize>>> {
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut sets = vec![Vec::new(); m];
            for j in 1..=n {
                sets[code % m].push(j);
                code /= m;
            }
            sets
        })
        .collect()
}

/// Every schedule: all assignments times all per-machine orders.
pub fn all_schedules(n: usize, m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for sets in assignments(n, m) {
        let per: Vec<Vec<Vec<usize>>> = sets.iter().map(|s| permutations(s)).collect();
        let mut idx = vec![0usize; m];
        loop {
            out.push((0..m).map(|i| per[i][idx[i]].clone()).collect());
            let mut i = 0;
            while i < m {
                idx[i] += 1;
                if idx[i] < per[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
        }
    }
    out
}

/// Row-restricted extreme scenario, built from the definition.
pub fn extreme(inst: &Instance, seqs: &[Vec<usize>], f: usize) -> Scenario {
    let n = inst.num_jobs();
    let mut p = Vec::with_capacity(inst.num_machines() * (n + 1));
    for i in 0..inst.num_machines() {
        p.push(0);
        for j in 1..=n {
            p.push(if i == f && seqs[f].contains(&j) { inst.p_hi(i, j) } else { inst.p_lo(i, j) });
        }
    }
    Scenario::new(inst, p, ScenarioLabel::Custom).unwrap()
}

pub fn random_interior(inst: &Instance, rng: &mut ChaCha8Rng) -> Scenario {
    let n = inst.num_jobs();
    let mut p = Vec::new();
    for i in 0..inst.num_machines() {
        p.push(0);
        for j in 1..=n {
            p.push(rng.gen_range(inst.p_lo(i, j)..=inst.p_hi(i, j)));
        }
    }
    Scenario::new(inst, p, ScenarioLabel::Custom).unwrap()
}

/// Exhaustive scenario optima and maximum regrets for one instance.
pub struct Oracle<'a> {
    pub inst: &'a Instance,
    // [machine][mask] -> minimum setup over all orders
    min_setup: Vec<Vec<Time>>,
    fstar: HashMap<Vec<Time>, Time>,
}

impl<'a> Oracle<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let n = inst.num_jobs();
        let min_setup = (0..inst.num_machines())
            .map(|i| (0..1u64 << (n + 1)).map(|mask| if mask & 1 == 1 { 0 } else { brute_min_setup(inst, i, &jobs_of(mask, n)) }).collect())
            .collect();
        Oracle { inst, min_setup, fstar: HashMap::new() }
    }

    /// Optimal makespan: minimum over assignments of the maximum per-machine
    /// completion with each machine's best order.
    pub fn f_star(&mut self, scen: &Scenario) -> Time {
        if let Some(&v) = self.fstar.get(scen.matrix()) {
            return v;
        }
        let (n, m) = (self.inst.num_jobs(), self.inst.num_machines());
        let mut best = Time::MAX;
        for code in 0..m.pow(n as u32) {
            let mut c = code;
            let mut masks = vec![0u64; m];
            let mut proc = vec![0 as Time; m];
            for j in 1..=n {
                masks[c % m] |= 1 << j;
                proc[c % m] += scen.p(c % m, j);
                c /= m;
            }
            let v = (0..m).map(|i| self.min_setup[i][masks[i] as usize] + proc[i]).max().unwrap();
            best = best.min(v);
        }
        self.fstar.insert(scen.matrix().to_vec(), best);
        best
    }

    pub fn regret(&mut self, seqs: &[Vec<usize>], scen: &Scenario) -> Time {
        makespan(self.inst, scen, seqs) - self.f_star(scen)
    }

    /// `max_f [F(pi, s^f) - F*(s^f)]`.
    pub fn r_max(&mut self, seqs: &[Vec<usize>]) -> Time {
        (0..self.inst.num_machines())
            .map(|f| {
                let s = extreme(self.inst, seqs, f);
                self.regret(seqs, &s)
            })
            .max()
            .unwrap()
    }

    /// Robust optimum over every schedule.
    pub fn robust_optimum(&mut self) -> Time {
        all_schedules(self.inst.num_jobs(), self.inst.num_machines())
            .iter()
            .map(|s| self.r_max(s))
            .min()
            .unwrap()
    }

    /// Minimum over schedules of the maximum regret over `cuts`.
    pub fn master_optimum(&mut self, cuts: &[(Scenario, Time)]) -> Time {
        all_schedules(self.inst.num_jobs(), self.inst.num_machines())
            .iter()
            .map(|s| cuts.iter().map(|(sc, fs)| makespan(self.inst, sc, s) - fs).max().unwrap_or(0))
            .min()
            .unwrap()
    }
}

pub fn seqs_of(s: &Schedule) -> Vec<Vec<usize>> {
    s.sequences().to_vec()
}

pub fn schedule(n: usize, seqs: Vec<Vec<usize>>) -> Schedule {
    Schedule::new(n, seqs).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
