//! Dense two-phase simplex and the assignment relaxation used for LB3.
//!
//! The relaxation lets every job be split across machines:
//!
//! ```text
//! min C  s.t.  sum_i y[i][k] = 1                     for every job k
//!              sum_k e[i][k] * y[i][k] - C <= 0      for every machine i
//!              y >= 0
//! ```
//!
//! where `e[i][k]` is the processing time plus the cheapest incoming setup of
//! job `k` on machine `i`. Any schedule is feasible with `C` equal to its
//! makespan, so the optimum is a valid lower bound.

use crate::model::{Instance, Scenario, Time};

use super::entry_cost;

const EPS: f64 = 1e-9;

pub(crate) fn assignment_relaxation(inst: &Instance, scen: &Scenario) -> Time {
    let (n, m) = (inst.num_jobs(), inst.num_machines());
    // columns: y[i][k] at i*n + (k-1), then C, then one slack per machine
    let ny = m * n;
    let cols = ny + 1 + m;
    let mut a = Vec::with_capacity(n + m);
    let mut b = Vec::with_capacity(n + m);
    for k in 1..=n {
        let mut row = vec![0.0; cols];
        for i in 0..m {
            row[i * n + k - 1] = 1.0;
        }
        a.push(row);
        b.push(1.0);
    }
    for i in 0..m {
        let mut row = vec![0.0; cols];
        for k in 1..=n {
            row[i * n + k - 1] = entry_cost(inst, scen, i, k) as f64;
        }
        row[ny] = -1.0;
        row[ny + 1 + i] = 1.0;
        a.push(row);
        b.push(0.0);
    }
    let mut c = vec![0.0; cols];
    c[ny] = 1.0;
    let value = simplex_min(a, b, &c).expect("relaxation is feasible and bounded");
    // integer data: round up, tolerating float noise just above an integer
    (value - 1e-6).ceil().max(0.0) as Time
}

/// Minimises `c.x` subject to `A x = b`, `x >= 0`, with `b >= 0`.
/// Returns `None` when infeasible or unbounded.
pub(crate) fn simplex_min(a: Vec<Vec<f64>>, b: Vec<f64>, c: &[f64]) -> Option<f64> {
    let rows = a.len();
    let nvar = c.len();
    let width = nvar + rows + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<f64>> = a
        .into_iter()
        .zip(&b)
        .enumerate()
        .map(|(r, (mut row, &bi))| {
            debug_assert!(bi >= 0.0);
            row.resize(width, 0.0);
            row[nvar + r] = 1.0;
            row[rhs] = bi;
            row
        })
        .collect();
    let mut basis: Vec<usize> = (nvar..nvar + rows).collect();

    let mut phase1 = vec![0.0; nvar + rows];
    phase1[nvar..].iter_mut().for_each(|x| *x = 1.0);
    let infeas = run(&mut t, &mut basis, &phase1, nvar + rows)?;
    if infeas > 1e-7 {
        return None;
    }
    // pivot remaining artificials out where possible
    for r in 0..rows {
        if basis[r] >= nvar {
            if let Some(col) = (0..nvar).find(|&j| t[r][j].abs() > EPS) {
                pivot(&mut t, &mut basis, r, col);
            }
        }
    }
    let mut phase2 = c.to_vec();
    phase2.resize(nvar + rows, 0.0);
    run(&mut t, &mut basis, &phase2, nvar)
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, col: usize) {
    let p = t[r][col];
    t[r].iter_mut().for_each(|x| *x /= p);
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            let f = row[col];
            if f.abs() > 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
    basis[r] = col;
}

/// Bland's-rule simplex on a canonical tableau; only columns `< allowed` may
/// enter. Returns the objective value.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], obj: &[f64], allowed: usize) -> Option<f64> {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced = obj[j] - t.iter().zip(basis.iter()).map(|(row, &bv)| obj[bv] * row[j]).sum::<f64>();
            reduced < -EPS
        });
        let Some(col) = entering else {
            return Some(t.iter().zip(basis.iter()).map(|(row, &bv)| obj[bv] * row[rhs]).sum());
        };
        let leaving = (0..t.len())
            .filter(|&r| t[r][col] > EPS)
            .min_by(|&x, &y| {
                let rx = t[x][rhs] / t[x][col];
                let ry = t[y][rhs] / t[y][col];
                rx.partial_cmp(&ry).unwrap().then(basis[x].cmp(&basis[y]))
            })?;
        pivot(t, basis, leaving, col);
    }
}
