//! Simulated-annealing baseline over job assignments.
//!
//! Starts from the mid-scenario optimum; a move is a random shift or
//! interchange followed by setup-optimal resequencing. Worse moves pass with
//! probability `exp(-delta / T)` under geometric cooling.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clock::Deadline;
use crate::ere::{neighbor_lb, EreConfig, EreStats, RegretEvaluator, RegretReport};
use crate::mdh::mid_start;
use crate::model::{Instance, Schedule, Time};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub seed: u64,
    /// Defaults to the maximum regret of the start.
    pub initial_temperature: Option<f64>,
    pub cooling_rate: f64,
    /// Defaults to `30 n`.
    pub moves_per_temperature: Option<usize>,
    /// Stop once the temperature drops below this fraction of the initial one.
    pub min_temperature_ratio: f64,
    pub time_limit: Option<Duration>,
    pub ere: EreConfig,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            seed: 0,
            initial_temperature: None,
            cooling_rate: 0.95,
            moves_per_temperature: None,
            min_temperature_ratio: 0.01,
            time_limit: None,
            ere: EreConfig::default(),
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::Config(format!("cooling rate {} is not in (0, 1)", self.cooling_rate)));
        }
        if !(self.min_temperature_ratio > 0.0 && self.min_temperature_ratio < 1.0) {
            return Err(Error::Config("min temperature ratio must be in (0, 1)".into()));
        }
        if self.initial_temperature.is_some_and(|t| !t.is_finite() || t <= 0.0) {
            return Err(Error::Config("initial temperature must be positive".into()));
        }
        if self.moves_per_temperature == Some(0) {
            return Err(Error::Config("moves per temperature must be positive".into()));
        }
        Ok(())
    }
}

/// Summary of one temperature level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaLevel {
    pub level: usize,
    pub temperature: f64,
    pub current: Time,
    pub best: Time,
    pub accepted: usize,
    pub evaluated: usize,
    /// Moves rejected on the neighbour bound alone.
    pub bound_rejected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaOutcome {
    pub schedule: Schedule,
    pub report: RegretReport,
    pub initial_r_max: Time,
    pub truncated: bool,
    pub stats: EreStats,
    pub trace: Vec<SaLevel>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn random_move(rng: &mut ChaCha8Rng, masks: &[u64], n: usize) -> Option<Vec<u64>> {
    let m = masks.len();
    if m < 2 || n == 0 {
        return None;
    }
    let machine_of = |j: usize| masks.iter().position(|&mk| mk >> j & 1 == 1).expect("assigned");
    let mut out = masks.to_vec();
    let occupied = masks.iter().filter(|&&mk| mk != 0).count();
    if rng.gen_bool(0.5) && occupied >= 2 {
        loop {
            let a = rng.gen_range(1..=n);
            let b = rng.gen_range(1..=n);
            let (ia, ib) = (machine_of(a), machine_of(b));
            if ia != ib {
                out[ia] ^= (1 << a) | (1 << b);
                out[ib] ^= (1 << a) | (1 << b);
                return Some(out);
            }
        }
    }
    let j = rng.gen_range(1..=n);
    let from = machine_of(j);
    let mut to = rng.gen_range(0..m - 1);
    if to >= from {
        to += 1;
    }
    out[from] &= !(1 << j);
    out[to] |= 1 << j;
    Some(out)
}

pub fn sa_solve(inst: &Instance, cfg: &SaConfig) -> Result<SaOutcome> {
    inst.check()?;
    cfg.validate()?;
    let clock = Instant::now();
    let deadline = Deadline::after(cfg.time_limit);
    let mut ev = RegretEvaluator::new(inst, cfg.ere.clone()).with_deadline(deadline);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = inst.num_jobs();

    let (start, _, _) = mid_start(ev.sequencer(), &cfg.ere.inner, deadline);
    let start_rep = ev.evaluate(&start, None);
    let initial_r_max = start_rep.r_max;
    let mut cur = (start.clone(), start_rep.clone());
    let mut best = (start, start_rep);
    let mut trace = Vec::new();
    let mut truncated = false;

    let t0 = cfg.initial_temperature.unwrap_or(initial_r_max as f64);
    let per_level = cfg.moves_per_temperature.unwrap_or(30 * n).max(1);
    let mut temp = t0;
    let mut level = 0;
    'outer: while t0 > 0.0 && temp >= cfg.min_temperature_ratio * t0 && best.1.r_max > 0 {
        let mut stats = SaLevel {
            level,
            temperature: temp,
            current: cur.1.r_max,
            best: best.1.r_max,
            accepted: 0,
            evaluated: 0,
            bound_rejected: 0,
        };
        for _ in 0..per_level {
            if deadline.expired() {
                truncated = true;
                trace.push(stats);
                break 'outer;
            }
            let Some(masks) = random_move(&mut rng, &cur.0.masks(), n) else { break 'outer };
            let u: f64 = rng.gen();
            let cand = ev.sequencer().schedule_from_masks(&masks);
            if cfg.ere.enable_neighbor_lb {
                let lb = neighbor_lb(inst, &cand, &cur.0);
                // the true delta is at least lb - r, so this draw rejects anyway
                let gap = (lb - cur.1.r_max) as f64;
                if gap > 0.0 && u >= (-gap / temp).exp() {
                    stats.bound_rejected += 1;
                    continue;
                }
            }
            let rep = ev.evaluate(&cand, None);
            stats.evaluated += 1;
            let delta = (rep.r_max - cur.1.r_max) as f64;
            if delta <= 0.0 || u < (-delta / temp).exp() {
                stats.accepted += 1;
                if rep.r_max < best.1.r_max {
                    best = (cand.clone(), rep.clone());
                }
                cur = (cand, rep);
            }
        }
        stats.current = cur.1.r_max;
        stats.best = best.1.r_max;
        trace.push(stats);
        temp *= cfg.cooling_rate;
        level += 1;
    }

    Ok(SaOutcome {
        schedule: best.0,
        report: best.1,
        initial_r_max,
        truncated,
        stats: ev.stats(),
        trace,
        elapsed: clock.elapsed(),
    })
}
