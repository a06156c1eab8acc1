//! The deterministic problem: minimise the makespan under one fixed scenario.
//!
//! Provides the combinatorial lower bounds LB1/LB2, an optional LP bound
//! (LB3), an exact branch-and-bound and a bee-colony metaheuristic.

mod abc;
mod exact;
mod lp;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::clock::Deadline;
use crate::model::{Instance, Scenario, Schedule, Time};
use crate::seqopt::Sequencer;

pub use abc::AbcParams;
pub(crate) use exact::{EntryBound, PartialBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetSolverConfig {
    pub mode: DetMode,
    /// Wall-clock budget per solve.
    pub time_limit: Duration,
    pub seed: u64,
    /// Compute the LP relaxation bound (LB3).
    pub use_lp_bound: bool,
    pub abc: AbcParams,
}

impl Default for DetSolverConfig {
    fn default() -> Self {
        DetSolverConfig {
            mode: DetMode::Exact,
            time_limit: Duration::from_secs(60),
            seed: 0,
            use_lp_bound: false,
            abc: AbcParams::default(),
        }
    }
}

impl DetSolverConfig {
    pub fn exact() -> Self {
        DetSolverConfig::default()
    }

    pub fn heuristic(seed: u64) -> Self {
        DetSolverConfig { mode: DetMode::Heuristic, seed, ..DetSolverConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LowerBounds {
    pub lb1: Time,
    pub lb2: Time,
    pub lb3: Option<Time>,
    /// Maximum of the available bounds.
    pub lb: Time,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetSolveResult {
    pub makespan: Time,
    pub schedule: Schedule,
    pub certified_optimal: bool,
    pub bounds: LowerBounds,
    pub nodes_explored: u64,
    pub iterations: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Cheapest way to start job `k` on machine `i`: `p[i][k]` plus its smallest
/// incoming setup from any other job or the dummy.
pub(crate) fn entry_cost(inst: &Instance, scen: &Scenario, i: usize, k: usize) -> Time {
    let min_setup = (0..=inst.num_jobs())
        .filter(|&j| j != k)
        .map(|j| inst.setup(i, j, k))
        .min()
        .unwrap_or(0);
    scen.p(i, k) + min_setup
}

fn div_ceil(a: Time, b: Time) -> Time {
    (a + b - 1) / b
}

/// `ceil( sum_k min_i entry_cost(i,k) / m )`.
pub fn lb1(inst: &Instance, scen: &Scenario) -> Time {
    let total: Time = inst
        .jobs()
        .map(|k| (0..inst.num_machines()).map(|i| entry_cost(inst, scen, i, k)).min().unwrap())
        .sum();
    div_ceil(total, inst.num_machines() as Time)
}

/// `max_k min_i entry_cost(i,k)`.
pub fn lb2(inst: &Instance, scen: &Scenario) -> Time {
    inst.jobs()
        .map(|k| (0..inst.num_machines()).map(|i| entry_cost(inst, scen, i, k)).min().unwrap())
        .max()
        .unwrap_or(0)
}

/// Optimum of the assignment LP relaxation, rounded up.
pub fn lb3(inst: &Instance, scen: &Scenario) -> Time {
    lp::assignment_relaxation(inst, scen)
}

pub fn lower_bounds(inst: &Instance, scen: &Scenario, use_lp_bound: bool) -> LowerBounds {
    let lb1 = lb1(inst, scen);
    let lb2 = lb2(inst, scen);
    let lb3 = use_lp_bound.then(|| lb3(inst, scen));
    LowerBounds { lb1, lb2, lb3, lb: lb1.max(lb2).max(lb3.unwrap_or(0)) }
}

/// Exact branch-and-bound. On timeout the best incumbent is returned
/// uncertified.
pub fn solve_exact(inst: &Instance, scen: &Scenario, cfg: &DetSolverConfig) -> DetSolveResult {
    let seq = Sequencer::new(inst);
    solve_exact_with(&seq, scen, cfg, &[], Deadline::none())
}

/// Bee-colony heuristic; never certified.
pub fn solve_heuristic(inst: &Instance, scen: &Scenario, cfg: &DetSolverConfig) -> DetSolveResult {
    let seq = Sequencer::new(inst);
    solve_heuristic_with(&seq, scen, cfg, &[], Deadline::none())
}

/// Dispatches on `cfg.mode`.
pub fn solve(inst: &Instance, scen: &Scenario, cfg: &DetSolverConfig) -> DetSolveResult {
    let seq = Sequencer::new(inst);
    solve_with(&seq, scen, cfg, &[], Deadline::none())
}

/// Solve sharing a sequencing cache, with warm-start schedules and an outer
/// deadline.
pub(crate) fn solve_with(
    seq: &Sequencer<'_>,
    scen: &Scenario,
    cfg: &DetSolverConfig,
    warm: &[&Schedule],
    outer: Deadline,
) -> DetSolveResult {
    match cfg.mode {
        DetMode::Exact => solve_exact_with(seq, scen, cfg, warm, outer),
        DetMode::Heuristic => solve_heuristic_with(seq, scen, cfg, warm, outer),
    }
}

pub(crate) fn solve_exact_with(
    seq: &Sequencer<'_>,
    scen: &Scenario,
    cfg: &DetSolverConfig,
    warm: &[&Schedule],
    outer: Deadline,
) -> DetSolveResult {
    let start = Instant::now();
    let bounds = lower_bounds(seq.instance(), scen, cfg.use_lp_bound);
    let deadline = outer.min_with(Some(cfg.time_limit));
    let out = exact::branch_and_bound(seq, scen, bounds.lb, warm, deadline);
    DetSolveResult {
        makespan: out.makespan,
        schedule: seq.schedule_from_masks(&out.masks),
        certified_optimal: out.complete && seq.certified(&out.masks),
        bounds,
        nodes_explored: out.nodes,
        iterations: 0,
        elapsed: start.elapsed(),
    }
}

pub(crate) fn solve_heuristic_with(
    seq: &Sequencer<'_>,
    scen: &Scenario,
    cfg: &DetSolverConfig,
    warm: &[&Schedule],
    outer: Deadline,
) -> DetSolveResult {
    let start = Instant::now();
    let bounds = lower_bounds(seq.instance(), scen, cfg.use_lp_bound);
    let deadline = outer.min_with(Some(cfg.time_limit));
    let out = abc::bee_colony(seq, scen, &cfg.abc, cfg.seed, bounds.lb, warm, deadline);
    DetSolveResult {
        makespan: out.makespan,
        schedule: seq.schedule_from_masks(&out.masks),
        certified_optimal: false,
        bounds,
        nodes_explored: 0,
        iterations: out.iterations,
        elapsed: start.elapsed(),
    }
}

/// Greedy list schedule, hardest jobs first.
pub(crate) fn greedy_for(inst: &Instance, scen: &Scenario) -> Vec<u64> {
    let order = PartialBound::job_order(inst, |i, k| scen.p(i, k));
    exact::greedy_masks(inst, scen, &order)
}

/// Makespan of machine masks with setup-optimal sequences.
pub(crate) fn masks_makespan(seq: &Sequencer<'_>, scen: &Scenario, masks: &[u64]) -> Time {
    masks
        .iter()
        .enumerate()
        .map(|(i, &mask)| machine_cost(seq, scen, i, mask))
        .max()
        .unwrap_or(0)
}

#[inline]
pub(crate) fn machine_cost(seq: &Sequencer<'_>, scen: &Scenario, i: usize, mask: u64) -> Time {
    seq.setup_cost(i, mask) + crate::model::mask_jobs(mask).map(|j| scen.p(i, j)).sum::<Time>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::makespan_value;
    use crate::model::{generate_instance, GeneratorConfig};
    use crate::scenario::{lower_scenario, mid_scenario, random_scenario};
    use proptest::prelude::*;

    #[test]
    fn single_term_bounds() {
        let inst = Instance::from_fn(1, 1, |_, _, _| 3, |_, _| (4, 9));
        let lo = lower_scenario(&inst);
        assert_eq!(lb1(&inst, &lo), 7);
        assert_eq!(lb2(&inst, &lo), 7);
    }

    #[test]
    fn symmetric_bounds() {
        // n=5 jobs, m=2, p=c=4, setups=d=3: ceil(5*7/2) = 18
        let inst = Instance::from_fn(5, 2, |_, _, _| 3, |_, _| (4, 4));
        let lo = lower_scenario(&inst);
        assert_eq!(lb1(&inst, &lo), 18);
        assert_eq!(lb2(&inst, &lo), 7);
        assert_eq!(lower_bounds(&inst, &lo, false).lb, 18);
    }

    #[test]
    fn single_job_goes_to_cheapest_machine() {
        let inst = generate_instance(&GeneratorConfig::new(12, 1, 4));
        let scen = mid_scenario(&inst);
        let best = (0..4).map(|i| inst.setup(i, 0, 1) + scen.p(i, 1)).min().unwrap();
        let exact = solve_exact(&inst, &scen, &DetSolverConfig::exact());
        assert_eq!(exact.makespan, best);
        assert!(exact.certified_optimal);
        let heur = solve_heuristic(&inst, &scen, &DetSolverConfig::heuristic(1));
        assert_eq!(heur.makespan, best);
        assert!(!heur.certified_optimal);
    }

    #[test]
    fn disabled_lp_bound_is_absent() {
        let inst = generate_instance(&GeneratorConfig::new(2, 5, 2));
        let scen = mid_scenario(&inst);
        let b = lower_bounds(&inst, &scen, false);
        assert_eq!(b.lb3, None);
        assert_eq!(b.lb, b.lb1.max(b.lb2));
        let b = lower_bounds(&inst, &scen, true);
        assert!(b.lb3.is_some());
    }

    #[test]
    fn lp_bound_on_one_job_one_machine() {
        let inst = Instance::from_fn(1, 1, |_, _, _| 2, |_, _| (5, 5));
        let scen = lower_scenario(&inst);
        let exact = solve_exact(&inst, &scen, &DetSolverConfig::exact());
        assert!(lb3(&inst, &scen) <= exact.makespan);
        assert_eq!(lb3(&inst, &scen), 7);
    }

    #[test]
    fn heuristic_is_deterministic() {
        let inst = generate_instance(&GeneratorConfig::new(5, 8, 3));
        let scen = random_scenario(&inst, 3);
        let cfg = DetSolverConfig::heuristic(42);
        let a = solve_heuristic(&inst, &scen, &cfg);
        let b = solve_heuristic(&inst, &scen, &cfg);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn exact_result_is_consistent() {
        let inst = generate_instance(&GeneratorConfig::new(9, 7, 2));
        let scen = random_scenario(&inst, 1);
        let r = solve_exact(&inst, &scen, &DetSolverConfig::exact());
        assert_eq!(makespan_value(&inst, &r.schedule, &scen), r.makespan);
        assert!(r.bounds.lb <= r.makespan);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bounds_below_exact_optimum(seed in 0u64..10_000, n in 1usize..8, m in 1usize..4, s in 0u64..100) {
            let inst = generate_instance(&GeneratorConfig::new(seed, n, m));
            let scen = random_scenario(&inst, s);
            let r = solve_exact(&inst, &scen, &DetSolverConfig::exact());
            prop_assert!(r.certified_optimal);
            let b = lower_bounds(&inst, &scen, true);
            prop_assert!(b.lb1 <= r.makespan);
            prop_assert!(b.lb2 <= r.makespan);
            prop_assert!(b.lb3.unwrap() <= r.makespan);
            let h = solve_heuristic(&inst, &scen, &DetSolverConfig { abc: AbcParams { iterations: 200, ..AbcParams::default() }, ..DetSolverConfig::heuristic(s) });
            prop_assert!(h.makespan >= r.makespan);
        }
    }
}
