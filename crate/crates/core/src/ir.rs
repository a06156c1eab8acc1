//! Iterative relaxation: exact min-max regret by scenario generation.
//!
//! The master problem minimises the maximum regret over a growing set of
//! extreme scenarios, each with its optimum solved once. Its value is a lower
//! bound on the robust optimum; the true maximum regret of its solution is an
//! upper bound. The worst extreme scenario of each master solution joins the
//! set until the bounds meet.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::clock::Deadline;
use crate::detsolve::{masks_makespan, EntryBound, PartialBound};
use crate::ere::{EreConfig, EreMode, EreStats, RegretEvaluator, RegretReport};
use crate::mdh::mid_start;
use crate::model::{Instance, Scenario, Schedule, Time};
use crate::scenario::extreme_scenario;
use crate::seqopt::Sequencer;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrConfig {
    pub time_limit: Option<Duration>,
    /// Regret evaluation of master solutions; certification needs the exact
    /// inner solver.
    pub ere: EreConfig,
}

impl Default for IrConfig {
    fn default() -> Self {
        IrConfig { time_limit: None, ere: EreConfig::from_mode(EreMode::M23) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrIteration {
    pub h: usize,
    pub lower: Time,
    pub upper: Time,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioCut {
    pub machine: usize,
    /// Jobs raised to their upper bound on `machine`.
    pub jobs: Vec<usize>,
    #[serde(skip)]
    pub scenario: Scenario,
    pub f_star: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrState {
    pub scenario_set: Vec<ScenarioCut>,
    pub h: usize,
    pub lower: Time,
    pub upper: Time,
    pub converged: bool,
    pub history: Vec<IrIteration>,
}

impl IrState {
    pub fn gap(&self) -> Time {
        self.upper - self.lower
    }

    /// History as CSV with a header row.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("h,lower,upper,elapsed\n");
        for it in &self.history {
            out.push_str(&format!("{},{},{},{:.6}\n", it.h, it.lower, it.upper, it.elapsed.as_secs_f64()));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IrOutcome {
    pub schedule: Schedule,
    pub report: RegretReport,
    pub state: IrState,
    /// Converged with every scenario optimum and master solve proven.
    pub certified: bool,
    pub truncated: bool,
    pub stats: EreStats,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterSolution {
    pub schedule: Schedule,
    /// `max_s [F(schedule, s) - f_star(s)]`, 0 for an empty set.
    pub value: Time,
    pub complete: bool,
    pub nodes: u64,
}

struct Master<'s, 'a> {
    seq: &'s Sequencer<'a>,
    cuts: &'s [(Scenario, Time)],
    eb: EntryBound,
    order: Vec<usize>,
    masks: Vec<u64>,
    best: Time,
    best_masks: Vec<u64>,
    nodes: u64,
    deadline: Deadline,
    aborted: bool,
}

impl Master<'_, '_> {
    fn value(&self, masks: &[u64]) -> Time {
        self.cuts
            .iter()
            .map(|(s, fs)| masks_makespan(self.seq, s, masks) - fs)
            .max()
            .unwrap_or(0)
    }

    fn go(&mut self, depth: usize) {
        // regret is never negative against exact optima
        if self.aborted || self.best <= 0 {
            return;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 1 && self.deadline.expired() {
            self.aborted = true;
            return;
        }
        if depth == self.order.len() {
            let v = self.value(&self.masks);
            if v < self.best {
                self.best = v;
                self.best_masks.clone_from(&self.masks);
            }
            return;
        }
        let m = self.masks.len();
        let unassigned = self.order[depth..].iter().fold(0u64, |acc, &k| acc | 1 << k);
        let mut loads = vec![0; m];
        let mut first_loads = vec![0; m];
        let mut bound = Time::MIN;
        for (c, (s, fs)) in self.cuts.iter().enumerate() {
            let b = self.eb.bound(s, &self.masks, unassigned, &mut loads) - fs;
            if c == 0 {
                first_loads.copy_from_slice(&loads);
            }
            bound = bound.max(b);
            if bound >= self.best {
                return;
            }
        }
        let k = self.order[depth];
        let mut machines: Vec<usize> = (0..m).collect();
        machines.sort_by_key(|&i| (first_loads[i], i));
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

/// Minimises the maximum regret over `cuts` (scenario, optimum) pairs.
pub fn solve_master(inst: &Instance, cuts: &[(Scenario, Time)], time_limit: Option<Duration>) -> MasterSolution {
    let seq = Sequencer::new(inst);
    master_with(&seq, cuts, &[], Deadline::after(time_limit))
}

pub(crate) fn master_with(
    seq: &Sequencer<'_>,
    cuts: &[(Scenario, Time)],
    warm: &[&Schedule],
    deadline: Deadline,
) -> MasterSolution {
    let inst = seq.instance();
    let m = inst.num_machines();
    if cuts.is_empty() {
        let all = inst.jobs().fold(0u64, |acc, k| acc | 1 << k);
        let mut masks = vec![0; m];
        masks[0] = all;
        return MasterSolution { schedule: seq.schedule_from_masks(&masks), value: 0, complete: true, nodes: 0 };
    }
    let first = &cuts[0].0;
    let order = PartialBound::job_order(inst, |i, k| first.p(i, k));
    let mut dfs = Master {
        seq,
        cuts,
        eb: EntryBound::new(inst),
        order,
        masks: vec![0; m],
        best: Time::MAX,
        best_masks: Vec::new(),
        nodes: 0,
        deadline,
        aborted: false,
    };
    let greedy = crate::detsolve::greedy_for(inst, first);
    let mut starts: Vec<Vec<u64>> = warm.iter().map(|w| w.masks()).collect();
    starts.push(greedy);
    for masks in starts {
        let v = dfs.value(&masks);
        if v < dfs.best {
            dfs.best = v;
            dfs.best_masks = masks;
        }
    }
    dfs.go(0);
    MasterSolution {
        schedule: seq.schedule_from_masks(&dfs.best_masks),
        value: dfs.best,
        complete: !dfs.aborted,
        nodes: dfs.nodes,
    }
}

pub fn ir_solve(inst: &Instance, cfg: &IrConfig) -> Result<IrOutcome> {
    inst.check()?;
    let clock = Instant::now();
    let deadline = Deadline::after(cfg.time_limit);
    let mut ev = RegretEvaluator::new(inst, cfg.ere.clone()).with_deadline(deadline);

    let (mut pi, _, mut proven) = mid_start(ev.sequencer(), &cfg.ere.inner, deadline);
    let mut state = IrState {
        scenario_set: Vec::new(),
        h: 0,
        lower: 0,
        upper: Time::MAX,
        converged: false,
        history: Vec::new(),
    };
    let mut cuts: Vec<(Scenario, Time)> = Vec::new();
    let mut best: Option<(Schedule, RegretReport)> = None;
    let mut truncated = false;

    loop {
        let rep = ev.evaluate(&pi, None);
        proven &= rep.certified;
        if rep.r_max < state.upper {
            state.upper = rep.r_max;
            best = Some((pi.clone(), rep.clone()));
        }
        state.history.push(IrIteration {
            h: state.h,
            lower: state.lower,
            upper: state.upper,
            elapsed: clock.elapsed(),
        });
        if state.upper == state.lower {
            state.converged = true;
            break;
        }
        if deadline.expired() {
            truncated = true;
            break;
        }
        let f = rep.worst_scenario.expect("evaluated report has a worst scenario");
        let scen = extreme_scenario(inst, &pi, f);
        let f_star = rep.per_scenario[f].f_star_or_bound.expect("worst scenario was solved");
        if cuts.iter().any(|(s, _)| s.matrix() == scen.matrix()) {
            // only possible with inexact scenario optima
            debug_assert!(!rep.certified, "repeated scenario before convergence");
            break;
        }
        cuts.push((scen.clone(), f_star));
        state.scenario_set.push(ScenarioCut { machine: f, jobs: pi.sequence(f).to_vec(), scenario: scen, f_star });

        let warm: Vec<&Schedule> = std::iter::once(&pi).chain(best.as_ref().map(|b| &b.0)).collect();
        let master = master_with(ev.sequencer(), &cuts, &warm, deadline);
        state.h += 1;
        if !master.complete {
            truncated = true;
            state.history.push(IrIteration {
                h: state.h,
                lower: state.lower,
                upper: state.upper,
                elapsed: clock.elapsed(),
            });
            break;
        }
        state.lower = state.lower.max(master.value);
        pi = master.schedule;
    }

    let (schedule, report) = best.expect("at least one evaluation");
    let certified = state.converged && proven && !truncated;
    Ok(IrOutcome {
        schedule,
        report,
        state,
        certified,
        truncated,
        stats: ev.stats(),
        elapsed: clock.elapsed(),
    })
}
