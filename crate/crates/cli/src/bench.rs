//! Instance × algorithm matrix, run concurrently, written as CSV.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use rupm::{Instance, Time};
use serde::{Deserialize, Serialize};

use crate::run::{run, Algo, RunSettings};

/// Environment variable overriding the default number of concurrent cells.
pub const PARALLELISM_ENV: &str = "RUPM_PARALLELISM";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub algo: Algo,
    pub seed: u64,
    pub r_max: Time,
    /// For `ir`: the robust optimum is proven. Otherwise: `r_max` was
    /// evaluated with exact scenario optima.
    pub certified: bool,
    pub truncated: bool,
    pub elapsed: f64,
    pub solves: u64,
    pub dominated: u64,
    pub lb_pruned: u64,
    pub neighbor_aborts: u64,
    /// Percent gap to the `mid` row of the same instance.
    pub mid_gap: Option<f64>,
    /// Percent gap to the `ir` row of the same instance.
    pub ir_gap: Option<f64>,
}

pub struct Cell<'a> {
    pub id: &'a str,
    pub inst: &'a Instance,
    pub algo: Algo,
}

/// `(value - reference) / reference` in percent. A zero reference only
/// yields a gap when the value is zero too.
pub fn gap(value: Time, reference: Time) -> Option<f64> {
    if reference == 0 {
        return (value == 0).then_some(0.0);
    }
    Some((value - reference) as f64 / reference as f64 * 100.0)
}

pub fn default_parallelism() -> usize {
    std::env::var(PARALLELISM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&p: &usize| p > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

/// Runs every cell and returns rows sorted by instance then algorithm.
pub fn run_matrix(cells: &[Cell<'_>], settings: &RunSettings, threads: usize) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    let mut rows = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                let out = run(c.inst, c.algo, settings).with_context(|| format!("{} on {}", c.algo.name(), c.id))?;
                Ok(BenchRow {
                    instance: c.id.to_string(),
                    n: c.inst.num_jobs(),
                    m: c.inst.num_machines(),
                    algo: c.algo,
                    seed: settings.seed,
                    r_max: out.report.r_max,
                    certified: if c.algo == Algo::Ir { out.optimal } else { out.report.certified },
                    truncated: out.truncated,
                    elapsed: out.elapsed.as_secs_f64(),
                    solves: out.stats.solves,
                    dominated: out.stats.dominated,
                    lb_pruned: out.stats.lb_pruned,
                    neighbor_aborts: out.stats.neighbor_aborts,
                    mid_gap: None,
                    ir_gap: None,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| (&a.instance, a.algo).cmp(&(&b.instance, b.algo)));
    let warnings = fill_gaps(&mut rows);
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(rows)
}

/// Fills `mid_gap` and `ir_gap` from the reference rows; returns one warning
/// per gap that had to stay empty.
pub fn fill_gaps(rows: &mut [BenchRow]) -> Vec<String> {
    let mut mid = HashMap::new();
    let mut ir = HashMap::new();
    for r in rows.iter() {
        match r.algo {
            Algo::Mid => mid.insert(r.instance.clone(), r.r_max),
            Algo::Ir => ir.insert(r.instance.clone(), r.r_max),
            _ => None,
        };
    }
    let mut warnings = Vec::new();
    for r in rows.iter_mut() {
        for (name, refs, slot) in [("mid", &mid, &mut r.mid_gap), ("ir", &ir, &mut r.ir_gap)] {
            *slot = None;
            match refs.get(&r.instance) {
                None => warnings.push(format!("{}: no {name} run, {name}_gap left empty for {}", r.instance, r.algo.name())),
                Some(&reference) => {
                    *slot = gap(r.r_max, reference);
                    if slot.is_none() {
                        warnings.push(format!(
                            "{}: {name} reference is 0, {name}_gap of {} (r_max {}) left empty",
                            r.instance,
                            r.algo.name(),
                            r.r_max
                        ));
                    }
                }
            }
        }
    }
    warnings
}

pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<BenchRow>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}
