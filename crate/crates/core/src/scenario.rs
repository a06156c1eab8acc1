//! Distinguished scenarios.
//!
//! The worst-case regret of a schedule is always attained on one of its `m`
//! extreme scenarios: for machine `f`, the jobs that `f` processes take their
//! upper processing time on `f` and everything else sits at its lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, Scenario, ScenarioLabel, Schedule, Time};

/// Recipe for a scenario. `Extreme` needs a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Extreme(usize),
    Mid,
    Lower,
    Upper,
    Random(u64),
}

impl ScenarioKind {
    /// Builds the scenario; `None` for `Extreme` without a schedule.
    pub fn build(self, inst: &Instance, sched: Option<&Schedule>) -> Option<Scenario> {
        Some(match self {
            ScenarioKind::Extreme(f) => extreme_scenario(inst, sched?, f),
            ScenarioKind::Mid => mid_scenario(inst),
            ScenarioKind::Lower => lower_scenario(inst),
            ScenarioKind::Upper => upper_scenario(inst),
            ScenarioKind::Random(seed) => random_scenario(inst, seed),
        })
    }
}

/// Extreme scenario of `sched` for machine `f`: `p_hi` at `(f, j)` for every
/// job `j` on `f`, `p_lo` everywhere else.
pub fn extreme_scenario(inst: &Instance, sched: &Schedule, f: usize) -> Scenario {
    extreme_from_mask(inst, f, sched.masks()[f])
}

/// Extreme scenario for machine `f` holding the jobs in `mask`.
pub fn extreme_from_mask(inst: &Instance, f: usize, mask: u64) -> Scenario {
    Scenario::from_fn(inst, ScenarioLabel::Extreme(f), |i, j| {
        if i == f && mask >> j & 1 == 1 {
            inst.p_hi(i, j)
        } else {
            inst.p_lo(i, j)
        }
    })
}

/// Variant that raises the jobs of `f` to `p_hi` on every machine row.
///
/// This is not a worst-case witness in general: the extra upper bounds on
/// rows other than `f` can only increase the scenario optimum, so its regret
/// never exceeds that of [`extreme_scenario`] and may be strictly smaller.
pub fn extreme_scenario_all_rows(inst: &Instance, sched: &Schedule, f: usize) -> Scenario {
    let mask = sched.masks()[f];
    Scenario::from_fn(inst, ScenarioLabel::Extreme(f), |i, j| {
        if mask >> j & 1 == 1 {
            inst.p_hi(i, j)
        } else {
            inst.p_lo(i, j)
        }
    })
}

/// Interval midpoints, rounding half up.
pub fn mid_scenario(inst: &Instance) -> Scenario {
    Scenario::from_fn(inst, ScenarioLabel::Mid, |i, j| {
        (inst.p_lo(i, j) + inst.p_hi(i, j) + 1) / 2
    })
}

pub fn lower_scenario(inst: &Instance) -> Scenario {
    Scenario::from_fn(inst, ScenarioLabel::Lower, |i, j| inst.p_lo(i, j))
}

pub fn upper_scenario(inst: &Instance) -> Scenario {
    Scenario::from_fn(inst, ScenarioLabel::Upper, |i, j| inst.p_hi(i, j))
}

/// Every entry uniform on its integer interval; deterministic in `seed`.
pub fn random_scenario(inst: &Instance, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Scenario::from_fn(inst, ScenarioLabel::Random(seed), |i, j| {
        rng.gen_range(inst.p_lo(i, j)..=inst.p_hi(i, j))
    })
}

/// The exact rational midpoint scenario as an integer problem: the instance
/// scaled by two with `p = p_lo + p_hi`.
///
/// Makespans on the returned pair are exactly twice the makespans under the
/// rational midpoints, so both have the same optimal schedules.
pub fn doubled_midpoint(inst: &Instance) -> (Instance, Scenario) {
    let doubled = inst.scaled(2);
    let scen = Scenario::from_fn(&doubled, ScenarioLabel::Mid, |i, j| {
        inst.p_lo(i, j) + inst.p_hi(i, j)
    });
    (doubled, scen)
}

/// Sum of `p_lo + p_hi` over a machine's jobs: twice its rational midpoint
/// processing load.
pub fn doubled_mid_load(inst: &Instance, machine: usize, seq: &[usize]) -> Time {
    seq.iter().map(|&j| inst.p_lo(machine, j) + inst.p_hi(machine, j)).sum()
}
