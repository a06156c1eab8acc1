//! Aggregates bench rows and draws pairwise log-scale scatter plots.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rupm::Time;
use serde::Serialize;

use crate::bench::BenchRow;
use crate::run::Algo;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub algo: Algo,
    pub runs: usize,
    pub mean_mid_gap: Option<f64>,
    pub mean_ir_gap: Option<f64>,
    /// Runs matching a proven robust optimum.
    pub opt: usize,
    /// Runs whose instance has a proven robust optimum.
    pub opt_refs: usize,
    pub mean_elapsed: f64,
    pub mean_solves: f64,
    pub truncated: usize,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, k) = xs.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| sum / k as f64)
}

/// Certified robust optima by instance, taken from `ir` rows only.
pub fn certified_optima(rows: &[BenchRow]) -> HashMap<&str, Time> {
    rows.iter()
        .filter(|r| r.algo == Algo::Ir && r.certified)
        .map(|r| (r.instance.as_str(), r.r_max))
        .collect()
}

pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let optima = certified_optima(rows);
    let mut groups: BTreeMap<(usize, usize, Algo), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.n, r.m, r.algo)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n, m, algo), g)| {
            let with_ref: Vec<_> = g.iter().filter_map(|r| optima.get(r.instance.as_str()).map(|&o| (r, o))).collect();
            SummaryRow {
                n,
                m,
                algo,
                runs: g.len(),
                mean_mid_gap: mean(g.iter().filter_map(|r| r.mid_gap)),
                mean_ir_gap: mean(g.iter().filter_map(|r| r.ir_gap)),
                opt: with_ref.iter().filter(|(r, o)| r.r_max == *o).count(),
                opt_refs: with_ref.len(),
                mean_elapsed: mean(g.iter().map(|r| r.elapsed)).unwrap_or(0.0),
                mean_solves: mean(g.iter().map(|r| r.solves as f64)).unwrap_or(0.0),
                truncated: g.iter().filter(|r| r.truncated).count(),
            }
        })
        .collect()
}

fn opt_f(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

pub fn summary_table(summary: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:>4} {:>4} {:<5} {:>5} {:>10} {:>10} {:>7} {:>10} {:>10} {:>5}\n",
        "n", "m", "algo", "runs", "mid-gap%", "ir-gap%", "#opt", "time(s)", "solves", "trunc"
    );
    for s in summary {
        let _ = writeln!(
            out,
            "{:>4} {:>4} {:<5} {:>5} {:>10} {:>10} {:>7} {:>10.3} {:>10.1} {:>5}",
            s.n,
            s.m,
            s.algo.name(),
            s.runs,
            opt_f(s.mean_mid_gap),
            opt_f(s.mean_ir_gap),
            format!("{}/{}", s.opt, s.opt_refs),
            s.mean_elapsed,
            s.mean_solves,
            s.truncated
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Time,
    Regret,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Time => "time",
            Metric::Regret => "regret",
        }
    }

    fn of(self, r: &BenchRow) -> f64 {
        match self {
            Metric::Time => r.elapsed,
            Metric::Regret => r.r_max as f64,
        }
    }
}

/// One scatter plot per algorithm pair and metric, as `(file name, svg)`.
pub fn scatter_plots(rows: &[BenchRow]) -> Vec<(String, String)> {
    let algos: BTreeSet<Algo> = rows.iter().map(|r| r.algo).collect();
    let algos: Vec<Algo> = algos.into_iter().collect();
    let mut by_cell = HashMap::new();
    for r in rows {
        by_cell.insert((r.instance.as_str(), r.algo), r);
    }
    let mut out = Vec::new();
    for (i, &a) in algos.iter().enumerate() {
        for &b in &algos[i + 1..] {
            for metric in [Metric::Time, Metric::Regret] {
                let points: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| r.algo == a)
                    .filter_map(|r| by_cell.get(&(r.instance.as_str(), b)).map(|o| (metric.of(r), metric.of(o))))
                    .collect();
                let name = format!("{}_{}_vs_{}.svg", metric.name(), a.name(), b.name());
                out.push((name, scatter_svg(&points, a.name(), b.name(), metric.name())));
            }
        }
    }
    out
}

const SIZE: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Log-log scatter with the diagonal; values at or below zero sit on the
/// lowest decade.
pub fn scatter_svg(points: &[(f64, f64)], x_label: &str, y_label: &str, metric: &str) -> String {
    let positive = points.iter().flat_map(|&(x, y)| [x, y]).filter(|&v| v > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (d_lo, mut d_hi) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil()) } else { (0.0, 1.0) };
    if d_hi <= d_lo {
        d_hi = d_lo + 1.0;
    }
    let scale = |v: f64| {
        let l = if v > 0.0 { v.log10().max(d_lo) } else { d_lo };
        (l - d_lo) / (d_hi - d_lo) * SIZE
    };
    let total = SIZE + 2.0 * MARGIN;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total}\" height=\"{total}\" viewBox=\"0 0 {total} {total}\">\n"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{metric}: {x_label} vs {y_label} (log scale)</text>",
        total / 2.0
    );
    let (x0, y0) = (MARGIN, MARGIN + SIZE);
    let _ = writeln!(s, "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"none\" stroke=\"black\"/>");
    let _ = writeln!(s, "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{MARGIN}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>", x0 + SIZE);
    let mut d = d_lo;
    while d <= d_hi {
        let t = (d - d_lo) / (d_hi - d_lo) * SIZE;
        let label = format!("1e{d}");
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{label}</text>", x0 + t, y0 + 15.0);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"10\">{label}</text>", x0 - 5.0, y0 - t + 3.0);
        d += 1.0;
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>", total / 2.0, total - 10.0);
    let _ = writeln!(
        s,
        "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 {})\">{y_label}</text>",
        total / 2.0,
        total / 2.0
    );
    for &(x, y) in points {
        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>", x0 + scale(x), y0 - scale(y));
    }
    s.push_str("</svg>\n");
    s
}
