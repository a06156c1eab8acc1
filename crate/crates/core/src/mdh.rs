//! Multi-start decomposition heuristic.
//!
//! Each start solves a deterministic problem under one scenario, then runs a
//! shift descent followed by an interchange descent over job assignments.
//! Sequences are always setup-optimal for their assignment, and only moves
//! that touch the critical machine of the worst-case scenario are tried.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};

use crate::clock::Deadline;
use crate::detsolve::{self, DetSolverConfig};
use crate::ere::{EreConfig, EreStats, RegretEvaluator, RegretReport};
use crate::model::{Instance, Scenario, Schedule, Time};
use crate::scenario::{doubled_midpoint, lower_scenario, random_scenario, upper_scenario};
use crate::seqopt::Sequencer;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScenario {
    /// Exact interval midpoints.
    Mid,
    Upper,
    Lower,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdhConfig {
    /// Number of initial solutions (`Init`).
    pub init_count: usize,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    pub ere: EreConfig,
    /// Explicit start scenarios; empty means mid, upper, lower, then
    /// `Random(seed + 1)`, `Random(seed + 2)`, ...
    pub init_scenarios: Vec<InitScenario>,
}

impl Default for MdhConfig {
    fn default() -> Self {
        MdhConfig {
            init_count: 5,
            time_limit: None,
            seed: 0,
            ere: EreConfig::default(),
            init_scenarios: Vec::new(),
        }
    }
}

impl MdhConfig {
    pub fn starts(&self) -> Vec<InitScenario> {
        if !self.init_scenarios.is_empty() {
            return self.init_scenarios.iter().copied().take(self.init_count).collect();
        }
        let fixed = [InitScenario::Mid, InitScenario::Upper, InitScenario::Lower];
        (0..self.init_count)
            .map(|r| match fixed.get(r) {
                Some(&s) => s,
                None => InitScenario::Random(self.seed.wrapping_add((r - 2) as u64)),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.init_count == 0 {
            return Err(Error::Config("init_count must be at least 1".into()));
        }
        if let Some(first) = self.init_scenarios.first() {
            if *first != InitScenario::Mid {
                return Err(Error::Config("the first start scenario must be mid".into()));
            }
        }
        Ok(())
    }
}

fn ratio_str<S: Serializer>(r: &Ratio<Time>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// Regret bound of the mid-scenario optimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "ratio_str")]
    pub alpha: Ratio<Time>,
    #[serde(serialize_with = "ratio_str")]
    pub f_star_mid: Ratio<Time>,
    #[serde(serialize_with = "ratio_str")]
    pub bound: Ratio<Time>,
}

/// `alpha = max (p_hi - p_lo) / p_lo`; entries with `p_lo = p_hi = 0` are
/// ignored.
pub fn alpha(inst: &Instance) -> Result<Ratio<Time>> {
    let mut best = Ratio::from_integer(0);
    for i in 0..inst.num_machines() {
        for j in inst.jobs() {
            let (lo, hi) = (inst.p_lo(i, j), inst.p_hi(i, j));
            if lo == 0 {
                if hi > 0 {
                    return Err(Error::ZeroLowerBound { machine: i, job: j });
                }
                continue;
            }
            best = best.max(Ratio::new(hi - lo, lo));
        }
    }
    Ok(best)
}

/// `2 alpha / (2 + alpha) * f_star_mid`, exactly.
pub fn midpoint_upper_bound(inst: &Instance, f_star_mid: Ratio<Time>) -> Result<BoundReport> {
    let alpha = alpha(inst)?;
    let two = Ratio::from_integer(2);
    let bound = two * alpha / (two + alpha) * f_star_mid;
    Ok(BoundReport { alpha, f_star_mid, bound })
}

/// Deterministic optimum under the exact midpoint scenario, solved on the
/// doubled integer instance. Returns the schedule, twice the optimal
/// makespan, and whether it is certified.
pub fn solve_mid(inst: &Instance, inner: &DetSolverConfig) -> (Schedule, Time, bool) {
    let seq = Sequencer::new(inst);
    mid_start(&seq, inner, Deadline::none())
}

pub(crate) fn mid_start(seq: &Sequencer<'_>, inner: &DetSolverConfig, deadline: Deadline) -> (Schedule, Time, bool) {
    let (doubled, scen) = doubled_midpoint(seq.instance());
    let dseq = Sequencer::new(&doubled);
    let res = detsolve::solve_with(&dseq, &scen, inner, &[], deadline);
    let sched = seq.schedule_from_masks(&res.schedule.masks());
    (sched, res.makespan, res.certified_optimal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Initial,
    Shift,
    Interchange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveOutcome {
    Improved,
    Rejected,
    NeighborPruned,
    Duplicate,
}

/// One evaluated schedule during the search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub start: usize,
    pub phase: Phase,
    /// Moved jobs: one for a shift, two for an interchange.
    pub jobs: Vec<usize>,
    /// Machines the moved jobs came from.
    pub from: Vec<usize>,
    /// Critical machine of the schedule the move was applied to.
    pub critical: Option<usize>,
    /// Maximum regret, or the neighbour bound when pruned.
    pub r_max: Time,
    pub outcome: MoveOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StartSummary {
    pub index: usize,
    pub scenario: InitScenario,
    pub duplicate: bool,
    pub initial_r_max: Option<Time>,
    pub after_shift: Option<Time>,
    pub final_r_max: Option<Time>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MdhOutcome {
    pub schedule: Schedule,
    pub report: RegretReport,
    /// Maximum regret of the mid-scenario initial solution.
    pub mid_initial_r_max: Option<Time>,
    pub mid_bound: Option<BoundReport>,
    pub starts: Vec<StartSummary>,
    pub truncated: bool,
    pub stats: EreStats,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct Search<'e, 'a> {
    ev: &'e mut RegretEvaluator<'a>,
    trace: &'e mut Vec<TraceRecord>,
    start: usize,
    deadline: Deadline,
    truncated: bool,
}

impl Search<'_, '_> {
    fn expired(&mut self) -> bool {
        if self.deadline.expired() {
            self.truncated = true;
        }
        self.truncated
    }

    /// Evaluates `masks` against the current solution; returns the new
    /// solution if it is strictly better.
    fn try_move(
        &mut self,
        masks: &[u64],
        phase: Phase,
        jobs: Vec<usize>,
        from: Vec<usize>,
        cur: &(Schedule, RegretReport),
    ) -> Option<(Schedule, RegretReport)> {
        let cand = self.ev.sequencer().schedule_from_masks(masks);
        let rep = self.ev.evaluate(&cand, Some((&cur.0, cur.1.r_max)));
        let improved = !rep.aborted_by_neighbor_lb && rep.r_max < cur.1.r_max;
        self.trace.push(TraceRecord {
            start: self.start,
            phase,
            jobs,
            from,
            critical: cur.1.worst_machine,
            r_max: rep.r_max,
            outcome: if rep.aborted_by_neighbor_lb {
                MoveOutcome::NeighborPruned
            } else if improved {
                MoveOutcome::Improved
            } else {
                MoveOutcome::Rejected
            },
        });
        improved.then_some((cand, rep))
    }

    fn shift(&mut self, mut cur: (Schedule, RegretReport)) -> (Schedule, RegretReport) {
        let m = self.ev.instance().num_machines();
        'restart: loop {
            let Some(ic) = cur.1.worst_machine else { break };
            if cur.1.r_max <= 0 {
                break;
            }
            let masks = cur.0.masks();
            for &j in cur.0.sequence(ic).to_vec().iter() {
                for i in (0..m).filter(|&i| i != ic) {
                    if self.expired() {
                        break 'restart;
                    }
                    let mut cand = masks.clone();
                    cand[ic] &= !(1 << j);
                    cand[i] |= 1 << j;
                    if let Some(next) = self.try_move(&cand, Phase::Shift, vec![j], vec![ic], &cur) {
                        cur = next;
                        continue 'restart;
                    }
                }
            }
            break;
        }
        cur
    }

    fn interchange(&mut self, mut cur: (Schedule, RegretReport)) -> (Schedule, RegretReport) {
        let n = self.ev.instance().num_jobs();
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|k| (k + 1..=n).map(move |j| (k, j))).collect();
        let total = pairs.len();
        let mut idx = 0;
        let mut l = 0;
        while l < total {
            let (k, j) = pairs[idx];
            idx = (idx + 1) % total;
            l += 1;
            let Some(ic) = cur.1.worst_machine else { break };
            if cur.1.r_max <= 0 {
                break;
            }
            let mk = cur.0.machine_of(k).expect("assigned");
            let mj = cur.0.machine_of(j).expect("assigned");
            if mk == mj || (mk != ic && mj != ic) {
                continue;
            }
            if self.expired() {
                break;
            }
            let mut cand = cur.0.masks();
            cand[mk] ^= (1 << k) | (1 << j);
            cand[mj] ^= (1 << k) | (1 << j);
            if let Some(next) = self.try_move(&cand, Phase::Interchange, vec![k, j], vec![mk, mj], &cur) {
                cur = next;
                l = 0;
            }
        }
        cur
    }
}

/// First-improvement shift descent from `start`.
pub fn shift_search(
    ev: &mut RegretEvaluator<'_>,
    start: Schedule,
    start_report: RegretReport,
    trace: &mut Vec<TraceRecord>,
) -> (Schedule, RegretReport) {
    let mut s = Search { ev, trace, start: 0, deadline: Deadline::none(), truncated: false };
    s.shift((start, start_report))
}

/// Pairwise interchange descent from `start`.
pub fn interchange_search(
    ev: &mut RegretEvaluator<'_>,
    start: Schedule,
    start_report: RegretReport,
    trace: &mut Vec<TraceRecord>,
) -> (Schedule, RegretReport) {
    let mut s = Search { ev, trace, start: 0, deadline: Deadline::none(), truncated: false };
    s.interchange((start, start_report))
}

fn start_solution(
    seq: &Sequencer<'_>,
    which: InitScenario,
    inner: &DetSolverConfig,
    deadline: Deadline,
) -> (Schedule, Option<Time>) {
    let inst = seq.instance();
    let scen: Scenario = match which {
        InitScenario::Mid => {
            let (s, doubled, cert) = mid_start(seq, inner, deadline);
            return (s, cert.then_some(doubled));
        }
        InitScenario::Upper => upper_scenario(inst),
        InitScenario::Lower => lower_scenario(inst),
        InitScenario::Random(seed) => random_scenario(inst, seed),
    };
    let res = detsolve::solve_with(seq, &scen, inner, &[], deadline);
    (res.schedule, None)
}

pub fn mdh_solve(inst: &Instance, cfg: &MdhConfig) -> Result<MdhOutcome> {
    inst.check()?;
    cfg.validate()?;
    let clock = Instant::now();
    let deadline = Deadline::after(cfg.time_limit);
    let mut ev = RegretEvaluator::new(inst, cfg.ere.clone()).with_deadline(deadline);
    let mut trace = Vec::new();
    let mut starts = Vec::new();
    let mut seen: Vec<Vec<u64>> = Vec::new();
    let mut best: Option<(Schedule, RegretReport)> = None;
    let mut mid_initial_r_max = None;
    let mut mid_bound = None;
    let mut truncated = false;

    for (index, which) in cfg.starts().into_iter().enumerate() {
        if deadline.expired() {
            truncated = true;
            break;
        }
        let (sched, doubled_mid) = start_solution(ev.sequencer(), which, &cfg.ere.inner, deadline);
        let mut summary = StartSummary {
            index,
            scenario: which,
            duplicate: false,
            initial_r_max: None,
            after_shift: None,
            final_r_max: None,
        };
        let masks = sched.masks();
        if seen.contains(&masks) {
            summary.duplicate = true;
            trace.push(TraceRecord {
                start: index,
                phase: Phase::Initial,
                jobs: Vec::new(),
                from: Vec::new(),
                critical: None,
                r_max: 0,
                outcome: MoveOutcome::Duplicate,
            });
            starts.push(summary);
            continue;
        }
        seen.push(masks);

        let report = ev.evaluate(&sched, None);
        summary.initial_r_max = Some(report.r_max);
        trace.push(TraceRecord {
            start: index,
            phase: Phase::Initial,
            jobs: Vec::new(),
            from: Vec::new(),
            critical: None,
            r_max: report.r_max,
            outcome: MoveOutcome::Improved,
        });
        if which == InitScenario::Mid {
            mid_initial_r_max = Some(report.r_max);
            if let Some(d) = doubled_mid {
                mid_bound = midpoint_upper_bound(inst, Ratio::new(d, 2)).ok();
            }
        }

        let mut search = Search { ev: &mut ev, trace: &mut trace, start: index, deadline, truncated: false };
        let after_shift = search.shift((sched, report));
        summary.after_shift = Some(after_shift.1.r_max);
        let done = search.interchange(after_shift);
        truncated |= search.truncated;
        summary.final_r_max = Some(done.1.r_max);
        starts.push(summary);

        // ties keep the earlier start
        if best.as_ref().is_none_or(|b| done.1.r_max < b.1.r_max) {
            best = Some(done);
        }
        if truncated {
            break;
        }
    }

    let (schedule, report) = match best {
        Some(b) => b,
        None => {
            // out of time before the first start finished: evaluate the mid start
            let (s, _) = start_solution(ev.sequencer(), InitScenario::Mid, &cfg.ere.inner, Deadline::none());
            let r = ev.evaluate(&s, None);
            (s, r)
        }
    };
    Ok(MdhOutcome {
        schedule,
        report,
        mid_initial_r_max,
        mid_bound,
        starts,
        truncated,
        stats: ev.stats(),
        trace,
        elapsed: clock.elapsed(),
    })
}

/// Trace as JSON lines.
pub fn trace_jsonl(trace: &[TraceRecord]) -> String {
    trace
        .iter()
        .map(|r| serde_json::to_string(r).expect("trace serializes") + "\n")
        .collect()
}
