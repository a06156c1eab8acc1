//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rupm::detsolve::{solve_exact, solve_heuristic, DetSolverConfig};
use rupm::ere::{evaluate_regret, EreConfig, EreMode, RegretEvaluator, RegretReport};
use rupm::ir::{ir_solve, IrConfig};
use rupm::mdh::{interchange_search, mdh_solve, midpoint_upper_bound, shift_search, solve_mid, MdhConfig};
use rupm::sa::{sa_solve, SaConfig};
use rupm::scenario::{mid_scenario, random_scenario};
use rupm::seqopt::{optimal_machine_sequence, resequence, AssignmentView};
use rupm::{Instance, Schedule, Time};

use common::{instance, Oracle};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn exact_r_max(inst: &Instance, sched: &Schedule) -> Time {
    evaluate_regret(inst, sched, None, &EreConfig::orig()).unwrap().r_max
}

/// 50 instances, n in 3..=5, m = 2.
fn small_set() -> Vec<Instance> {
    (0..50).map(|s| instance(1000 + s, 3 + s as usize % 3, 2)).collect()
}

fn criterion_1(set: &[Instance], optima: &[Time]) -> Outcome {
    for (k, inst) in set.iter().enumerate() {
        let out = ir_solve(inst, &IrConfig::default()).unwrap();
        ensure(out.certified, || format!("instance {k}: IR not certified"))?;
        ensure(out.report.r_max == optima[k], || {
            format!("instance {k}: IR {} vs exhaustive {}", out.report.r_max, optima[k])
        })?;
    }
    Ok(format!("{} instances, IR equals the exhaustive robust optimum", set.len()))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for k in 0..50u64 {
        let n = 3 + k as usize % 3;
        let m = 2 + k as usize % 2;
        let inst = instance(2000 + k, n, m);
        let mut rng = common::rng(k);
        let sets = &common::assignments(n, m);
        let sets = sets[rand::Rng::gen_range(&mut rng, 0..sets.len())].clone();
        let sched = resequence(&inst, &AssignmentView::new(sets));
        let seqs = common::seqs_of(&sched);
        let r_max = exact_r_max(&inst, &sched);
        let mut oracle = Oracle::new(&inst);
        ensure(oracle.r_max(&seqs) == r_max, || format!("pair {k}: evaluator disagrees with oracle"))?;
        for _ in 0..200 {
            let s = common::random_interior(&inst, &mut rng);
            let r = oracle.regret(&seqs, &s);
            ensure(r <= r_max, || format!("pair {k}: interior regret {r} exceeds R_max {r_max}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} interior scenarios over 50 pairs, no violation"))
}

fn criterion_3() -> Outcome {
    let (mut orig_solves, mut m23_solves, mut m123_solves, mut aborted) = (0, 0, 0, 0);
    for k in 0..100u64 {
        let n = 3 + k as usize % 4;
        let m = 2 + k as usize % 2;
        let inst = instance(3000 + k, n, m);
        let mut rng = common::rng(k + 77);
        let sets = &common::assignments(n, m);
        let sets = sets[rand::Rng::gen_range(&mut rng, 0..sets.len())].clone();
        let sched = resequence(&inst, &AssignmentView::new(sets));
        let (inc, _, _) = solve_mid(&inst, &DetSolverConfig::exact());
        let inc_r = exact_r_max(&inst, &inc);

        let eval = |mode, inc: Option<(&Schedule, Time)>| {
            evaluate_regret(&inst, &sched, inc, &EreConfig::from_mode(mode)).unwrap()
        };
        let orig = eval(EreMode::Orig, None);
        let m23 = eval(EreMode::M23, None);
        let m123 = eval(EreMode::M123, None);
        for (name, r) in [("M23", &m23), ("M123", &m123)] {
            ensure(r.r_max == orig.r_max, || format!("eval {k}: {name} {} vs ORIG {}", r.r_max, orig.r_max))?;
        }
        ensure(m123.solves <= m23.solves && m23.solves <= orig.solves, || {
            format!("eval {k}: solve counts {} / {} / {}", m123.solves, m23.solves, orig.solves)
        })?;
        // with the mid-start schedule as incumbent
        let guarded = eval(EreMode::M123, Some((&inc, inc_r)));
        if guarded.aborted_by_neighbor_lb {
            aborted += 1;
            ensure(orig.r_max >= guarded.r_max && guarded.r_max > inc_r, || format!("eval {k}: unsound abort"))?;
        } else {
            ensure(guarded.r_max == orig.r_max, || format!("eval {k}: guarded M123 {}", guarded.r_max))?;
        }
        ensure(guarded.solves <= m123.solves, || format!("eval {k}: incumbent increased solves"))?;
        orig_solves += orig.solves;
        m23_solves += m23.solves;
        m123_solves += m123.solves;
    }
    Ok(format!(
        "100 evaluations, equal r_max, inner solves ORIG {orig_solves} >= M23 {m23_solves} >= M123 {m123_solves}; with the mid incumbent {aborted} sound neighbour aborts"
    ))
}

fn criterion_4() -> Outcome {
    let mut compared = 0;
    for k in 0..30u64 {
        let n = 3 + k as usize % 3;
        let inst = instance(4000 + k, n, 2);
        let mut oracle = Oracle::new(&inst);
        for sets in common::assignments(n, 2) {
            let best = resequence(&inst, &AssignmentView::new(sets.clone()));
            let r_best = exact_r_max(&inst, &best);
            let p0 = common::permutations(&sets[0]);
            let p1 = common::permutations(&sets[1]);
            for a in &p0 {
                for b in &p1 {
                    let r = oracle.r_max(&[a.clone(), b.clone()]);
                    ensure(r_best <= r, || format!("instance {k}: {sets:?} resequenced {r_best} > {r}"))?;
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} schedules over 30 instances, none beats its resequenced assignment"))
}

fn criterion_5() -> Outcome {
    let mut worst_ratio = 0.0f64;
    for k in 0..50u64 {
        let n = 3 + k as usize % 4;
        let m = 2 + k as usize % 2;
        let inst = instance(5000 + k, n, m);
        let (sched, doubled, certified) = solve_mid(&inst, &DetSolverConfig::exact());
        ensure(certified, || format!("instance {k}: mid solve not certified"))?;
        let b = midpoint_upper_bound(&inst, Ratio::new(doubled, 2)).unwrap();
        let r = exact_r_max(&inst, &sched);
        ensure(Ratio::from_integer(r) <= b.bound, || format!("instance {k}: R_max {r} > bound {}", b.bound))?;
        ensure(b.bound <= Ratio::new(2, 3) * b.f_star_mid, || format!("instance {k}: bound above 2/3 F*mid"))?;

        let rounded = solve_exact(&inst, &mid_scenario(&inst), &DetSolverConfig::exact());
        let rr = exact_r_max(&inst, &rounded.schedule);
        let slack = Ratio::new(n as Time, 2);
        ensure(Ratio::from_integer(rr) <= b.bound + slack, || {
            format!("instance {k}: rounded-mid R_max {rr} > bound {} + n/2", b.bound)
        })?;
        if b.bound > Ratio::from_integer(0) {
            let ratio = r as f64 / (*b.bound.numer() as f64 / *b.bound.denom() as f64);
            worst_ratio = worst_ratio.max(ratio);
        }
    }
    Ok(format!("50 instances within 2a/(2+a) F*mid (tightest at {:.0}% of the bound)", worst_ratio * 100.0))
}

/// Alternates the two descents until neither improves.
fn local_optimum(ev: &mut RegretEvaluator<'_>, start: Schedule) -> (Schedule, RegretReport) {
    let rep = ev.evaluate(&start, None);
    let mut cur = (start, rep);
    loop {
        let mut trace = Vec::new();
        let before = cur.1.r_max;
        let s = shift_search(ev, cur.0, cur.1, &mut trace);
        cur = interchange_search(ev, s.0, s.1, &mut trace);
        if cur.1.r_max == before {
            return cur;
        }
    }
}

fn neighbours(sched: &Schedule, m: usize) -> Vec<(Vec<u64>, Vec<usize>)> {
    let masks = sched.masks();
    let n = sched.num_jobs();
    let mut out = Vec::new();
    for j in 1..=n {
        let from = sched.machine_of(j).unwrap();
        for to in (0..m).filter(|&t| t != from) {
            let mut c = masks.clone();
            c[from] &= !(1 << j);
            c[to] |= 1 << j;
            out.push((c, vec![from, to]));
        }
    }
    for a in 1..=n {
        for b in a + 1..=n {
            let (ia, ib) = (sched.machine_of(a).unwrap(), sched.machine_of(b).unwrap());
            if ia != ib {
                let mut c = masks.clone();
                c[ia] ^= (1 << a) | (1 << b);
                c[ib] ^= (1 << a) | (1 << b);
                out.push((c, vec![ia, ib]));
            }
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let (mut off_critical, mut on_critical) = (0, 0);
    for k in 0..30u64 {
        let n = 4 + k as usize % 2;
        let m = 3;
        let inst = instance(6000 + k, n, m);
        let mut ev = RegretEvaluator::new(&inst, EreConfig::orig());
        let (start, _, _) = solve_mid(&inst, &DetSolverConfig::exact());
        let (sched, rep) = local_optimum(&mut ev, start);
        let critical = rep.worst_machine.unwrap();
        let mut oracle = Oracle::new(&inst);
        for (masks, touched) in neighbours(&sched, m) {
            let cand = resequence(&inst, &AssignmentView::from_masks(&masks));
            let r = oracle.r_max(&common::seqs_of(&cand));
            if touched.contains(&critical) {
                on_critical += 1;
                ensure(r >= rep.r_max, || format!("schedule {k}: not locally optimal"))?;
            } else {
                off_critical += 1;
                ensure(r >= rep.r_max, || format!("schedule {k}: improving move avoids critical machine"))?;
            }
        }
    }
    Ok(format!(
        "30 local optima, {off_critical} moves away from the critical machine and {on_critical} through it, none improving"
    ))
}

fn criterion_7(set: &[Instance], optima: &[Time]) -> Outcome {
    for (k, inst) in set.iter().enumerate() {
        let cfg = MdhConfig { seed: k as u64, ere: EreConfig::from_mode(EreMode::M123), ..MdhConfig::default() };
        let out = mdh_solve(inst, &cfg).unwrap();
        let bound = out.mid_bound.as_ref().unwrap().bound;
        let r = out.report.r_max;
        ensure(optima[k] <= r, || format!("instance {k}: MDH {r} below optimum {}", optima[k]))?;
        ensure(Ratio::from_integer(r) <= bound, || format!("instance {k}: MDH {r} above bound {bound}"))?;
        ensure(r <= out.mid_initial_r_max.unwrap(), || format!("instance {k}: positive mid gap"))?;
    }
    Ok(format!("{} instances: optimum <= MDH <= mid bound, mid_gap <= 0", set.len()))
}

fn criterion_8(set: &[Instance]) -> Outcome {
    let mut iterations = 0;
    for (k, inst) in set.iter().enumerate() {
        let out = ir_solve(inst, &IrConfig::default()).unwrap();
        let h = &out.state.history;
        iterations += h.len();
        for w in h.windows(2) {
            ensure(w[0].lower <= w[1].lower, || format!("instance {k}: lower bound fell"))?;
            ensure(w[0].upper >= w[1].upper, || format!("instance {k}: upper bound rose"))?;
        }
        ensure(out.certified && out.state.gap() == 0, || format!("instance {k}: gap {}", out.state.gap()))?;
        let last = h.last().unwrap();
        ensure(last.lower == last.upper, || format!("instance {k}: final history row has a gap"))?;
    }
    Ok(format!("{} runs, {iterations} iterations, monotone bounds, zero final gap", set.len()))
}

fn criterion_9() -> Outcome {
    let mut runs = 0;
    for k in 0..3u64 {
        let inst = instance(9000 + k, 6 + k as usize, 2 + k as usize % 2);
        let scen = random_scenario(&inst, k);
        let seed = 40 + k;
        let reports: Vec<Box<dyn Fn() -> String>> = vec![
            Box::new(|| json(&mdh_solve(&inst, &MdhConfig { seed, ..MdhConfig::default() }).unwrap())),
            Box::new(|| {
                let mut cfg = MdhConfig { seed, ..MdhConfig::default() };
                cfg.ere = EreConfig::from_mode(EreMode::M1234);
                json(&mdh_solve(&inst, &cfg).unwrap())
            }),
            Box::new(|| json(&ir_solve(&inst, &IrConfig::default()).unwrap())),
            Box::new(|| json(&sa_solve(&inst, &SaConfig { seed, ..SaConfig::default() }).unwrap())),
            Box::new(|| json(&solve_exact(&inst, &scen, &DetSolverConfig::exact()))),
            Box::new(|| json(&solve_heuristic(&inst, &scen, &DetSolverConfig::heuristic(seed)))),
        ];
        for (idx, run) in reports.iter().enumerate() {
            let first = run();
            for _ in 0..2 {
                ensure(run() == first, || format!("instance {k}: solver {idx} output changed between runs"))?;
            }
            runs += 3;
        }
    }
    Ok(format!("{runs} runs of mdh, ir, sa and both detsolve modes, byte-identical per configuration"))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap()
}

fn criterion_10() -> Outcome {
    let mut subsets = 0;
    for k in 0..100u64 {
        let inst = instance(10_000 + k, 8, 1);
        let mut rng = common::rng(k);
        for size in 0..=8usize {
            let mut jobs: Vec<usize> = (1..=8).collect();
            rand::seq::SliceRandom::shuffle(&mut jobs[..], &mut rng);
            jobs.truncate(size);
            let hk = optimal_machine_sequence(&inst, 0, &jobs);
            let brute = if jobs.is_empty() { 0 } else { common::brute_min_setup(&inst, 0, &jobs) };
            ensure(hk.total_setup == brute, || format!("matrix {k}, {jobs:?}: {} vs {brute}", hk.total_setup))?;
            ensure(common::path_setup(&inst, 0, &hk.jobs) == brute, || format!("matrix {k}: sequence cost mismatch"))?;
            subsets += 1;
        }
    }
    Ok(format!("{subsets} job sets of size 0..=8 over 100 setup matrices match the permutation minimum"))
}

fn main() -> ExitCode {
    let set = small_set();
    let t = Instant::now();
    let optima: Vec<Time> = set.iter().map(|inst| Oracle::new(inst).robust_optimum()).collect();
    println!("exhaustive robust optima for the small set computed in {:.1}s", t.elapsed().as_secs_f64());

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("robust-oracle equivalence", Box::new(|| criterion_1(&set, &optima))),
        ("extreme-scenario sufficiency", Box::new(criterion_2)),
        ("evaluation pruning soundness", Box::new(criterion_3)),
        ("setup-optimal sequencing dominance", Box::new(criterion_4)),
        ("mid-scenario regret bound", Box::new(criterion_5)),
        ("critical-machine local-search filter", Box::new(criterion_6)),
        ("MDH sandwich", Box::new(|| criterion_7(&set, &optima))),
        ("IR bound monotonicity", Box::new(|| criterion_8(&set))),
        ("determinism", Box::new(criterion_9)),
        ("sequencing oracle", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
