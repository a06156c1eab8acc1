//! One solver run on one instance, shared by `solve` and `bench`.

use std::time::{Duration, Instant};

use anyhow::Result;
use clap::ValueEnum;
use rupm::ere::{evaluate_regret, EreConfig, EreStats, RegretReport, ScenarioStatus};
use rupm::ir::{ir_solve, IrConfig};
use rupm::mdh::{mdh_solve, solve_mid, trace_jsonl, MdhConfig};
use rupm::sa::{sa_solve, SaConfig};
use rupm::{Instance, Schedule};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    /// Optimum of the mid scenario, no search.
    Mid,
    Mdh,
    Ir,
    Sa,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Mid => "mid",
            Algo::Mdh => "mdh",
            Algo::Ir => "ir",
            Algo::Sa => "sa",
        }
    }

    fn default_ere(self) -> EreConfig {
        match self {
            Algo::Ir => IrConfig::default().ere,
            _ => EreConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunSettings {
    pub seed: u64,
    pub time_limit: Option<Duration>,
    /// `None` picks the algorithm's default evaluator.
    pub ere: Option<EreConfig>,
    pub init_count: Option<usize>,
}

pub struct RunOutput {
    pub schedule: Schedule,
    pub report: RegretReport,
    /// Robust optimality is proven. Only the exact method can set it.
    pub optimal: bool,
    pub truncated: bool,
    pub stats: EreStats,
    pub elapsed: Duration,
    pub config: Value,
    /// Algorithm-specific outcome fields.
    pub details: Value,
    pub trace: Option<String>,
    pub history: Option<String>,
}

fn details<T: Serialize>(outcome: &T) -> Value {
    let mut v = serde_json::to_value(outcome).expect("outcome serializes");
    if let Value::Object(map) = &mut v {
        map.remove("schedule");
        map.remove("report");
        map.remove("stats");
    }
    v
}

pub fn run(inst: &Instance, algo: Algo, s: &RunSettings) -> Result<RunOutput> {
    let mut ere = s.ere.clone().unwrap_or_else(|| algo.default_ere());
    ere.inner.seed = s.seed;
    let out = match algo {
        Algo::Mid => {
            inst.check()?;
            let clock = Instant::now();
            let (schedule, doubled, proven) = solve_mid(inst, &ere.inner);
            let report = evaluate_regret(inst, &schedule, None, &ere)?;
            let stats = EreStats {
                evaluations: 1,
                solves: report.solves,
                dominated: report.count(|st| matches!(st, ScenarioStatus::Dominated { .. })) as u64,
                lb_pruned: report.count(|st| matches!(st, ScenarioStatus::LbPruned { .. })) as u64,
                ..EreStats::default()
            };
            let details = serde_json::json!({ "mid_makespan_doubled": doubled, "mid_certified": proven });
            RunOutput {
                schedule,
                report,
                optimal: false,
                truncated: false,
                stats,
                elapsed: clock.elapsed(),
                config: serde_json::to_value(&ere)?,
                details,
                trace: None,
                history: None,
            }
        }
        Algo::Mdh => {
            let cfg = MdhConfig {
                init_count: s.init_count.unwrap_or(5),
                time_limit: s.time_limit,
                seed: s.seed,
                ere,
                ..MdhConfig::default()
            };
            let o = mdh_solve(inst, &cfg)?;
            RunOutput {
                details: details(&o),
                trace: Some(trace_jsonl(&o.trace)),
                schedule: o.schedule,
                report: o.report,
                optimal: false,
                truncated: o.truncated,
                stats: o.stats,
                elapsed: o.elapsed,
                config: serde_json::to_value(&cfg)?,
                history: None,
            }
        }
        Algo::Ir => {
            let cfg = IrConfig { time_limit: s.time_limit, ere };
            let o = ir_solve(inst, &cfg)?;
            RunOutput {
                details: details(&o),
                history: Some(o.state.history_csv()),
                schedule: o.schedule,
                report: o.report,
                optimal: o.certified,
                truncated: o.truncated,
                stats: o.stats,
                elapsed: o.elapsed,
                config: serde_json::to_value(&cfg)?,
                trace: None,
            }
        }
        Algo::Sa => {
            let cfg = SaConfig { seed: s.seed, time_limit: s.time_limit, ere, ..SaConfig::default() };
            let o = sa_solve(inst, &cfg)?;
            RunOutput {
                details: details(&o),
                schedule: o.schedule,
                report: o.report,
                optimal: false,
                truncated: o.truncated,
                stats: o.stats,
                elapsed: o.elapsed,
                config: serde_json::to_value(&cfg)?,
                trace: None,
                history: None,
            }
        }
    };
    Ok(out)
}
