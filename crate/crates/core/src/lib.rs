//! Robust makespan scheduling on unrelated parallel machines.
//!
//! Jobs with sequence-dependent setup times are assigned to and sequenced on
//! unrelated machines. Processing times are only known to lie in integer
//! intervals `[p_lo, p_hi]`, and a schedule is judged by its *maximum regret*:
//! the largest gap, over all realisations of the processing times, between its
//! makespan and the makespan of the best schedule for that realisation.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: instances, scenarios, schedules, the random instance generator
//!   and the JSON file formats.
//! * [`eval`]: machine completion times, makespan and single-scenario regret.
//! * [`scenario`]: extreme, mid, lower, upper and random scenarios.
//! * [`seqopt`]: minimum-setup sequencing of a fixed job assignment.
//! * [`detsolve`]: the deterministic problem under one scenario (lower bounds,
//!   exact branch-and-bound, bee-colony heuristic).
//! * [`ere`]: maximum-regret evaluation over extreme scenarios with pruning.
//! * [`mdh`]: the multi-start shift/interchange heuristic.
//! * [`ir`]: the exact iterative relaxation method.
//! * [`sa`]: a simulated annealing baseline.
//!
//! All times are non-negative integers ([`Time`]); regret comparisons are exact.

pub mod detsolve;
pub mod ere;
pub mod error;
pub mod eval;
pub mod ir;
pub mod mdh;
pub mod model;
pub mod sa;
pub mod scenario;
pub mod seqopt;

mod clock;

pub use error::{Error, Result};
pub use model::{GeneratorConfig, Instance, Scenario, ScenarioLabel, Schedule, Time};

/// Largest supported job count. Job sets are tracked as `u64` bitmasks.
pub const MAX_JOBS: usize = 63;
