//! Maximum-regret evaluation over the extreme scenarios of a schedule.
//!
//! The full traversal solves one deterministic problem per machine. Three
//! optional filters cut that down: a neighbour lower bound that abandons a
//! candidate against an incumbent, interval dominance between machines, and
//! skipping scenarios whose regret upper bound `F - LB` cannot beat the
//! running maximum. The inner solver is exact or the bee-colony heuristic.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::clock::Deadline;
use crate::detsolve::{self, DetMode, DetSolverConfig};
use crate::eval::{completion_interval, makespan, makespan_value};
use crate::model::{Instance, Scenario, Schedule, Time};
use crate::scenario::extreme_scenario;
use crate::seqopt::Sequencer;
use crate::{Error, Result};

/// Named flag sets used in the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EreMode {
    /// Plain traversal, exact inner solver.
    Orig,
    /// Scenario lower-bound skipping.
    M3,
    /// Dominance and scenario lower bounds.
    M23,
    /// Neighbour bound, dominance and scenario lower bounds.
    M123,
    /// As `M123` with the heuristic inner solver.
    M1234,
}

impl EreMode {
    pub const ALL: [EreMode; 5] = [EreMode::Orig, EreMode::M3, EreMode::M23, EreMode::M123, EreMode::M1234];
}

impl fmt::Display for EreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EreMode::Orig => "ORIG",
            EreMode::M3 => "M3",
            EreMode::M23 => "M23",
            EreMode::M123 => "M123",
            EreMode::M1234 => "M1234",
        })
    }
}

impl FromStr for EreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EreMode::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown evaluation mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EreConfig {
    pub enable_neighbor_lb: bool,
    pub enable_dominance: bool,
    pub enable_scenario_lb: bool,
    /// Inner deterministic solver; its `mode` is the exact/heuristic switch
    /// and `use_lp_bound` adds LB3 to the scenario bound.
    pub inner: DetSolverConfig,
    /// Reuse scenario optima within one evaluator.
    pub enable_cache: bool,
    /// Solve all surviving scenarios concurrently, without lower-bound
    /// skipping.
    pub parallel: bool,
}

impl Default for EreConfig {
    fn default() -> Self {
        EreConfig::from_mode(EreMode::M123)
    }
}

impl EreConfig {
    pub fn from_mode(mode: EreMode) -> Self {
        let (nlb, dom, slb) = match mode {
            EreMode::Orig => (false, false, false),
            EreMode::M3 => (false, false, true),
            EreMode::M23 => (false, true, true),
            EreMode::M123 | EreMode::M1234 => (true, true, true),
        };
        let inner = if mode == EreMode::M1234 {
            DetSolverConfig::heuristic(0)
        } else {
            DetSolverConfig::exact()
        };
        EreConfig {
            enable_neighbor_lb: nlb,
            enable_dominance: dom,
            enable_scenario_lb: slb,
            inner,
            enable_cache: true,
            parallel: false,
        }
    }

    pub fn orig() -> Self {
        EreConfig::from_mode(EreMode::Orig)
    }

    pub fn with_inner_mode(mut self, mode: DetMode) -> Self {
        self.inner.mode = mode;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.inner.time_limit = limit;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScenarioStatus {
    Evaluated,
    /// Interval of this machine lies strictly below that of `by`.
    Dominated { by: usize },
    /// `F - bound` did not exceed the running maximum.
    LbPruned { bound: Time },
    /// Not looked at because the candidate was abandoned.
    Unreached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub machine: usize,
    /// `F(sched, s^f)`.
    pub makespan: Time,
    /// Scenario optimum when evaluated, the lower bound when pruned.
    pub f_star_or_bound: Option<Time>,
    /// Regret when evaluated, its upper bound when pruned.
    pub regret_or_bound: Option<Time>,
    pub status: ScenarioStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegretReport {
    /// Maximum regret. When the candidate was abandoned this is the
    /// neighbour lower bound instead.
    pub r_max: Time,
    /// Machine `f` of the maximising extreme scenario.
    pub worst_scenario: Option<usize>,
    /// Critical machine of the schedule under that scenario (lowest index on
    /// ties).
    pub worst_machine: Option<usize>,
    pub per_scenario: Vec<ScenarioEntry>,
    pub aborted_by_neighbor_lb: bool,
    pub neighbor_lb: Option<Time>,
    pub inner_solver_mode: DetMode,
    /// Every regret came from a proven scenario optimum.
    pub certified: bool,
    /// Deterministic problems solved for this report (cache hits excluded).
    pub solves: u64,
}

impl RegretReport {
    pub fn count(&self, pred: impl Fn(&ScenarioStatus) -> bool) -> usize {
        self.per_scenario.iter().filter(|e| pred(&e.status)).count()
    }
}

/// Counters accumulated over all evaluations of one evaluator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EreStats {
    pub evaluations: u64,
    pub solves: u64,
    pub cache_hits: u64,
    pub dominated: u64,
    pub lb_pruned: u64,
    pub neighbor_aborts: u64,
}

/// `max_f [F(candidate, s^f) - F(incumbent, s^f)]` over the candidate's
/// extreme scenarios; a lower bound on the candidate's maximum regret.
pub fn neighbor_lb(inst: &Instance, candidate: &Schedule, incumbent: &Schedule) -> Time {
    (0..inst.num_machines())
        .map(|f| {
            let s = extreme_scenario(inst, candidate, f);
            makespan_value(inst, candidate, &s) - makespan_value(inst, incumbent, &s)
        })
        .max()
        .unwrap_or(0)
}

/// For every machine, a machine whose completion interval lies strictly
/// above its own, if any (the one with the largest lower end, lowest index
/// on ties).
pub fn dominance_witnesses(inst: &Instance, sched: &Schedule) -> Vec<Option<usize>> {
    let m = inst.num_machines();
    let iv: Vec<_> = (0..m).map(|i| completion_interval(inst, sched, i)).collect();
    let top = (0..m).max_by_key(|&i| (iv[i].lo, std::cmp::Reverse(i)));
    (0..m)
        .map(|i| top.filter(|&t| t != i && iv[i].hi < iv[t].lo))
        .collect()
}

/// Machines whose extreme scenario cannot be the worst case.
pub fn dominated_machines(inst: &Instance, sched: &Schedule) -> Vec<usize> {
    dominance_witnesses(inst, sched)
        .into_iter()
        .enumerate()
        .filter_map(|(i, w)| w.map(|_| i))
        .collect()
}

/// One-shot evaluation with a fresh cache.
pub fn evaluate_regret(
    inst: &Instance,
    sched: &Schedule,
    incumbent: Option<(&Schedule, Time)>,
    cfg: &EreConfig,
) -> Result<RegretReport> {
    sched.check(inst)?;
    if let Some((inc, _)) = incumbent {
        inc.check(inst)?;
    }
    Ok(RegretEvaluator::new(inst, cfg.clone()).evaluate(sched, incumbent))
}

/// Evaluator holding the sequencing memo and scenario-optimum cache for one
/// solver run.
pub struct RegretEvaluator<'a> {
    inst: &'a Instance,
    cfg: EreConfig,
    seq: Sequencer<'a>,
    cache: HashMap<Vec<Time>, (Time, bool)>,
    stats: EreStats,
    deadline: Deadline,
}

impl<'a> RegretEvaluator<'a> {
    pub fn new(inst: &'a Instance, cfg: EreConfig) -> Self {
        RegretEvaluator {
            inst,
            cfg,
            seq: Sequencer::new(inst),
            cache: HashMap::new(),
            stats: EreStats::default(),
            deadline: Deadline::none(),
        }
    }

    pub(crate) fn with_deadline(mut self, deadline: Deadline) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn config(&self) -> &EreConfig {
        &self.cfg
    }

    pub fn sequencer(&self) -> &Sequencer<'a> {
        &self.seq
    }

    pub fn stats(&self) -> EreStats {
        self.stats
    }

    /// Scenario optimum, `(value, certified)`, through the cache. `hint` is
    /// a schedule whose value caps the result.
    pub(crate) fn scenario_optimum(&mut self, scen: &Scenario, hint: Option<&Schedule>) -> (Time, bool) {
        let cap = hint.map(|h| makespan_value(self.inst, h, scen));
        let cached = if self.cfg.enable_cache { self.cache.get(scen.matrix()).copied() } else { None };
        let (value, certified) = match cached {
            Some(hit) => {
                self.stats.cache_hits += 1;
                hit
            }
            None => {
                let warm: Vec<&Schedule> = hint.into_iter().collect();
                let res = detsolve::solve_with(&self.seq, scen, &self.cfg.inner, &warm, self.deadline);
                self.stats.solves += 1;
                let hit = (res.makespan, res.certified_optimal);
                if self.cfg.enable_cache {
                    self.cache.insert(scen.matrix().to_vec(), hit);
                }
                hit
            }
        };
        // the schedule itself is feasible, so a heuristic value above it is
        // never the best known
        match cap {
            Some(c) if c < value => (c, false),
            _ => (value, certified),
        }
    }

    pub fn evaluate(&mut self, sched: &Schedule, incumbent: Option<(&Schedule, Time)>) -> RegretReport {
        let inst = self.inst;
        let m = inst.num_machines();
        self.stats.evaluations += 1;
        let solves_before = self.stats.solves;

        let scens: Vec<Scenario> = (0..m).map(|f| extreme_scenario(inst, sched, f)).collect();
        let values: Vec<Time> = scens.iter().map(|s| makespan_value(inst, sched, s)).collect();
        let mut entries: Vec<ScenarioEntry> = (0..m)
            .map(|f| ScenarioEntry {
                machine: f,
                makespan: values[f],
                f_star_or_bound: None,
                regret_or_bound: None,
                status: ScenarioStatus::Unreached,
            })
            .collect();
        let mut report = RegretReport {
            r_max: 0,
            worst_scenario: None,
            worst_machine: None,
            per_scenario: Vec::new(),
            aborted_by_neighbor_lb: false,
            neighbor_lb: None,
            inner_solver_mode: self.cfg.inner.mode,
            certified: true,
            solves: 0,
        };

        // Step 2
        if let (true, Some((inc, inc_r))) = (self.cfg.enable_neighbor_lb, incumbent) {
            let lb = (0..m).map(|f| values[f] - makespan_value(inst, inc, &scens[f])).max().unwrap_or(0);
            report.neighbor_lb = Some(lb);
            if lb > inc_r {
                self.stats.neighbor_aborts += 1;
                report.aborted_by_neighbor_lb = true;
                report.r_max = lb;
                report.certified = false;
                report.per_scenario = entries;
                return report;
            }
        }

        // Step 3
        let mut survivors = Vec::with_capacity(m);
        let witnesses = if self.cfg.enable_dominance {
            dominance_witnesses(inst, sched)
        } else {
            vec![None; m]
        };
        for f in 0..m {
            match witnesses[f] {
                Some(by) => {
                    entries[f].status = ScenarioStatus::Dominated { by };
                    self.stats.dominated += 1;
                }
                None => survivors.push(f),
            }
        }

        // Step 4
        let mut best: Option<(Time, usize)> = None;
        if self.cfg.parallel {
            let solved = self.solve_parallel(&scens, &survivors, sched);
            for (f, (fs, cert)) in survivors.iter().copied().zip(solved) {
                record(&mut entries[f], fs, &mut best, &mut report.certified, cert);
            }
        } else {
            for (pos, &f) in survivors.iter().enumerate() {
                if pos > 0 && self.cfg.enable_scenario_lb {
                    let lb = detsolve::lower_bounds(inst, &scens[f], self.cfg.inner.use_lp_bound).lb;
                    let running = best.map_or(0, |b| b.0);
                    if values[f] - lb <= running {
                        entries[f].f_star_or_bound = Some(lb);
                        entries[f].regret_or_bound = Some(values[f] - lb);
                        entries[f].status = ScenarioStatus::LbPruned { bound: lb };
                        self.stats.lb_pruned += 1;
                        continue;
                    }
                }
                let (fs, cert) = self.scenario_optimum(&scens[f], Some(sched));
                record(&mut entries[f], fs, &mut best, &mut report.certified, cert);
            }
        }

        // Step 5
        if let Some((r, f)) = best {
            report.r_max = r;
            report.worst_scenario = Some(f);
            report.worst_machine = makespan(inst, sched, &scens[f]).critical.first().copied();
        }
        report.per_scenario = entries;
        report.solves = self.stats.solves - solves_before;
        report
    }

    fn solve_parallel(&mut self, scens: &[Scenario], which: &[usize], sched: &Schedule) -> Vec<(Time, bool)> {
        let mut out: Vec<Option<(Time, bool)>> = vec![None; which.len()];
        let mut todo = Vec::new();
        for (slot, &f) in which.iter().enumerate() {
            match self.cfg.enable_cache.then(|| self.cache.get(scens[f].matrix()).copied()).flatten() {
                Some(hit) => {
                    self.stats.cache_hits += 1;
                    out[slot] = Some(hit);
                }
                None => todo.push(slot),
            }
        }
        let inst = self.inst;
        let inner = &self.cfg.inner;
        let deadline = self.deadline;
        let solved: Vec<(Time, bool)> = std::thread::scope(|scope| {
            let handles: Vec<_> = todo
                .iter()
                .map(|&slot| {
                    let scen = &scens[which[slot]];
                    scope.spawn(move || {
                        let seq = Sequencer::new(inst);
                        let r = detsolve::solve_with(&seq, scen, inner, &[sched], deadline);
                        (r.makespan, r.certified_optimal)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("inner solve panicked")).collect()
        });
        for (&slot, hit) in todo.iter().zip(solved) {
            self.stats.solves += 1;
            if self.cfg.enable_cache {
                self.cache.insert(scens[which[slot]].matrix().to_vec(), hit);
            }
            out[slot] = Some(hit);
        }
        which
            .iter()
            .zip(out)
            .map(|(&f, hit)| {
                let (v, c) = hit.expect("solved");
                let cap = makespan_value(inst, sched, &scens[f]);
                if cap < v { (cap, false) } else { (v, c) }
            })
            .collect()
    }
}

fn record(
    entry: &mut ScenarioEntry,
    f_star: Time,
    best: &mut Option<(Time, usize)>,
    certified: &mut bool,
    cert: bool,
) {
    let regret = entry.makespan - f_star;
    entry.f_star_or_bound = Some(f_star);
    entry.regret_or_bound = Some(regret);
    entry.status = ScenarioStatus::Evaluated;
    *certified &= cert;
    if best.is_none_or(|(r, _)| regret > r) {
        *best = Some((regret, entry.machine));
    }
}
