//! Bee-colony metaheuristic for the deterministic problem.
//!
//! Food sources are job assignments; every candidate is sequenced
//! setup-optimally, so the neighbourhood only moves jobs between machines.
//! Employed bees try one random shift or interchange per source, onlookers
//! revisit sources in proportion to `1 / (1 + makespan)`, and scouts replace
//! sources that have not improved for `limit` trials with a randomised greedy
//! construction. Each new global best is polished by a first-improvement
//! shift/interchange descent.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock::Deadline;
use crate::model::{Scenario, Schedule, Time};
use crate::seqopt::Sequencer;

use super::exact::{greedy_masks, PartialBound};
use super::masks_makespan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbcParams {
    pub population: usize,
    pub limit: usize,
    pub iterations: usize,
}

impl Default for AbcParams {
    fn default() -> Self {
        AbcParams { population: 20, limit: 50, iterations: 2000 }
    }
}

pub(crate) struct AbcOutcome {
    pub makespan: Time,
    pub masks: Vec<u64>,
    pub iterations: u64,
}

#[derive(Clone)]
struct Source {
    masks: Vec<u64>,
    cost: Time,
    trials: usize,
}

struct Colony<'s, 'a> {
    seq: &'s Sequencer<'a>,
    scen: &'s Scenario,
    n: usize,
    rng: ChaCha8Rng,
}

impl Colony<'_, '_> {
    fn cost(&self, masks: &[u64]) -> Time {
        masks_makespan(self.seq, self.scen, masks)
    }

    fn machine_of(masks: &[u64], j: usize) -> usize {
        masks.iter().position(|&mk| mk >> j & 1 == 1).expect("job assigned")
    }

    /// One random shift or interchange; `None` when no move exists.
    fn perturb(&mut self, masks: &[u64]) -> Option<Vec<u64>> {
        let m = masks.len();
        if m < 2 {
            return None;
        }
        let mut out = masks.to_vec();
        let occupied = masks.iter().filter(|&&mk| mk != 0).count();
        if self.n >= 2 && occupied >= 2 && self.rng.gen_bool(0.5) {
            loop {
                let a = self.rng.gen_range(1..=self.n);
                let b = self.rng.gen_range(1..=self.n);
                let (ia, ib) = (Self::machine_of(masks, a), Self::machine_of(masks, b));
                if ia != ib {
                    out[ia] ^= (1 << a) | (1 << b);
                    out[ib] ^= (1 << a) | (1 << b);
                    return Some(out);
                }
            }
        }
        let j = self.rng.gen_range(1..=self.n);
        let from = Self::machine_of(masks, j);
        let mut to = self.rng.gen_range(0..m - 1);
        if to >= from {
            to += 1;
        }
        out[from] &= !(1 << j);
        out[to] |= 1 << j;
        Some(out)
    }

    fn random_greedy(&mut self) -> Vec<u64> {
        let mut order: Vec<usize> = (1..=self.n).collect();
        order.shuffle(&mut self.rng);
        greedy_masks(self.seq.instance(), self.scen, &order)
    }

    /// First-improvement shift then interchange descent.
    fn descend(&self, mut masks: Vec<u64>, mut cost: Time, deadline: &Deadline) -> (Vec<u64>, Time) {
        let m = masks.len();
        'restart: loop {
            if deadline.expired() {
                break;
            }
            for j in 1..=self.n {
                let from = Self::machine_of(&masks, j);
                for to in (0..m).filter(|&t| t != from) {
                    let mut cand = masks.clone();
                    cand[from] &= !(1 << j);
                    cand[to] |= 1 << j;
                    let c = self.cost(&cand);
                    if c < cost {
                        masks = cand;
                        cost = c;
                        continue 'restart;
                    }
                }
            }
            for a in 1..=self.n {
                for b in a + 1..=self.n {
                    let (ia, ib) = (Self::machine_of(&masks, a), Self::machine_of(&masks, b));
                    if ia == ib {
                        continue;
                    }
                    let mut cand = masks.clone();
                    cand[ia] ^= (1 << a) | (1 << b);
                    cand[ib] ^= (1 << a) | (1 << b);
                    let c = self.cost(&cand);
                    if c < cost {
                        masks = cand;
                        cost = c;
                        continue 'restart;
                    }
                }
            }
            break;
        }
        (masks, cost)
    }
}

pub(crate) fn bee_colony(
    seq: &Sequencer<'_>,
    scen: &Scenario,
    params: &AbcParams,
    seed: u64,
    lower_bound: Time,
    warm: &[&Schedule],
    deadline: Deadline,
) -> AbcOutcome {
    let inst = seq.instance();
    let mut colony = Colony {
        seq,
        scen,
        n: inst.num_jobs(),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let pop = params.population.max(1);

    let mut sources: Vec<Source> = Vec::with_capacity(pop);
    let push = |masks: Vec<u64>, colony: &Colony<'_, '_>, sources: &mut Vec<Source>| {
        let cost = colony.cost(&masks);
        sources.push(Source { masks, cost, trials: 0 });
    };
    for w in warm.iter().take(pop) {
        push(w.masks(), &colony, &mut sources);
    }
    if sources.len() < pop {
        let order = PartialBound::job_order(inst, |i, k| scen.p(i, k));
        push(greedy_masks(inst, scen, &order), &colony, &mut sources);
    }
    while sources.len() < pop {
        let masks = colony.random_greedy();
        push(masks, &colony, &mut sources);
    }

    let first = sources.iter().min_by_key(|s| s.cost).expect("non-empty population");
    let (mut best_masks, mut best) = colony.descend(first.masks.clone(), first.cost, &deadline);

    let mut iterations = 0u64;
    while (iterations as usize) < params.iterations && best > lower_bound && !deadline.expired() {
        iterations += 1;

        // employed
        for idx in 0..sources.len() {
            try_neighbour(&mut colony, &mut sources[idx]);
        }
        // onlookers
        let weights: Vec<f64> = sources.iter().map(|s| 1.0 / (1.0 + s.cost as f64)).collect();
        let total: f64 = weights.iter().sum();
        for _ in 0..sources.len() {
            let mut pick = colony.rng.gen::<f64>() * total;
            let mut idx = sources.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    idx = i;
                    break;
                }
                pick -= w;
            }
            try_neighbour(&mut colony, &mut sources[idx]);
        }

        if let Some(s) = sources.iter().min_by_key(|s| s.cost) {
            if s.cost < best {
                let (masks, cost) = colony.descend(s.masks.clone(), s.cost, &deadline);
                best = cost;
                best_masks = masks;
            }
        }

        // scouts
        for idx in 0..sources.len() {
            if sources[idx].trials > params.limit {
                let masks = colony.random_greedy();
                let cost = colony.cost(&masks);
                sources[idx] = Source { masks, cost, trials: 0 };
            }
        }
    }

    AbcOutcome { makespan: best, masks: best_masks, iterations }
}

fn try_neighbour(colony: &mut Colony<'_, '_>, src: &mut Source) {
    match colony.perturb(&src.masks) {
        Some(cand) => {
            let cost = colony.cost(&cand);
            if cost < src.cost {
                *src = Source { masks: cand, cost, trials: 0 };
            } else {
                if cost == src.cost {
                    src.masks = cand;
                }
                src.trials += 1;
            }
        }
        None => src.trials += 1,
    }
}
