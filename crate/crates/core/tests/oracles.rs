mod common;

use num_rational::Ratio;
use rupm::detsolve::{lower_bounds, solve_exact, solve_heuristic, DetSolverConfig};
use rupm::ere::{dominated_machines, evaluate_regret, EreConfig, EreMode, ScenarioStatus};
use rupm::ir::solve_master;
use rupm::mdh::{mdh_solve, MdhConfig};
use rupm::sa::{sa_solve, SaConfig};
use rupm::scenario::{extreme_scenario, lower_scenario, random_scenario};
use rupm::seqopt::{resequence, AssignmentView};
use rupm::{Instance, Schedule};

use common::{instance, Oracle};

#[test]
fn exact_solver_matches_enumeration() {
    for k in 0..40u64 {
        let n = 1 + k as usize % 5;
        let m = 1 + k as usize % 3;
        let inst = instance(100 + k, n, m);
        let scen = random_scenario(&inst, k);
        let res = solve_exact(&inst, &scen, &DetSolverConfig { use_lp_bound: true, ..DetSolverConfig::exact() });
        let mut oracle = Oracle::new(&inst);
        assert_eq!(res.makespan, oracle.f_star(&scen), "instance {k}");
        assert!(res.certified_optimal);
        assert!(res.bounds.lb <= res.makespan);
        assert!(res.bounds.lb3.unwrap() <= res.makespan);
        assert_eq!(common::makespan(&inst, &scen, res.schedule.sequences()), res.makespan);
    }
}

#[test]
fn single_job_goes_to_cheapest_machine() {
    for k in 0..10 {
        let inst = instance(k, 1, 3);
        let scen = lower_scenario(&inst);
        let best = (0..3).map(|i| inst.setup(i, 0, 1) + inst.p_lo(i, 1)).min().unwrap();
        assert_eq!(solve_exact(&inst, &scen, &DetSolverConfig::exact()).makespan, best);
        assert_eq!(solve_heuristic(&inst, &scen, &DetSolverConfig::heuristic(k)).makespan, best);
    }
}

#[test]
fn heuristic_is_near_optimal_on_small_instances() {
    let mut close = 0;
    for k in 0..100u64 {
        let n = 4 + k as usize % 5;
        let m = 2 + k as usize % 2;
        let inst = instance(200 + k, n, m);
        let scen = random_scenario(&inst, k);
        let exact = solve_exact(&inst, &scen, &DetSolverConfig::exact()).makespan;
        let heur = solve_heuristic(&inst, &scen, &DetSolverConfig::heuristic(k)).makespan;
        assert!(heur >= exact);
        if (heur - exact) * 50 <= exact {
            close += 1;
        }
    }
    assert!(close >= 95, "only {close} of 100 within 2%");
}

#[test]
fn lower_bounds_never_exceed_optimum() {
    for k in 0..60u64 {
        let inst = instance(300 + k, 2 + k as usize % 6, 1 + k as usize % 3);
        let scen = random_scenario(&inst, k);
        let lb = lower_bounds(&inst, &scen, true);
        let opt = solve_exact(&inst, &scen, &DetSolverConfig::exact()).makespan;
        assert!(lb.lb1 <= opt && lb.lb2 <= opt && lb.lb3.unwrap() <= opt, "instance {k}: {lb:?} vs {opt}");
        assert_eq!(lb.lb, lb.lb1.max(lb.lb2).max(lb.lb3.unwrap()));
    }
}

#[test]
fn resequencing_minimises_total_setup() {
    for k in 0..20u64 {
        let n = 3 + k as usize % 3;
        let inst = instance(400 + k, n, 2);
        for sets in common::assignments(n, 2) {
            let best = resequence(&inst, &AssignmentView::new(sets.clone()));
            for (i, s) in sets.iter().enumerate() {
                let mut held: Vec<usize> = best.sequence(i).to_vec();
                held.sort_unstable();
                assert_eq!(&held, s, "resequence moved jobs");
                let got = common::path_setup(&inst, i, best.sequence(i));
                assert_eq!(got, common::brute_min_setup(&inst, i, s));
            }
        }
    }
}

#[test]
fn dominated_machines_never_attain_the_maximum() {
    let mut seen = 0;
    for k in 0..60u64 {
        let n = 3 + k as usize % 4;
        let inst = instance(500 + k, n, 3);
        let mut rng = common::rng(k);
        let all = common::assignments(n, 3);
        let sets = all[rand::Rng::gen_range(&mut rng, 0..all.len())].clone();
        let sched = resequence(&inst, &AssignmentView::new(sets));
        let full = evaluate_regret(&inst, &sched, None, &EreConfig::orig()).unwrap();
        for f in dominated_machines(&inst, &sched) {
            seen += 1;
            let e = &full.per_scenario[f];
            assert_eq!(e.status, ScenarioStatus::Evaluated);
            assert!(full.per_scenario.iter().any(|o| o.machine != f && o.regret_or_bound >= e.regret_or_bound));
        }
    }
    assert!(seen > 0, "no dominated machine in the sample");
}

#[test]
fn master_matches_enumeration() {
    for k in 0..15u64 {
        let n = 3 + k as usize % 3;
        let inst = instance(600 + k, n, 2);
        let mut oracle = Oracle::new(&inst);
        let mut rng = common::rng(k);
        let scheds = common::all_schedules(n, 2);
        let mut cuts = Vec::new();
        for _ in 0..3 {
            let s = &scheds[rand::Rng::gen_range(&mut rng, 0..scheds.len())];
            let f = rand::Rng::gen_range(&mut rng, 0..2);
            let sc = common::extreme(&inst, s, f);
            let fs = oracle.f_star(&sc);
            cuts.push((sc, fs));
            let got = solve_master(&inst, &cuts, None);
            assert!(got.complete);
            assert_eq!(got.value, oracle.master_optimum(&cuts), "instance {k}, {} cuts", cuts.len());
        }
    }
}

#[test]
fn extreme_scenarios_match_definition() {
    for k in 0..20u64 {
        let inst = instance(700 + k, 5, 3);
        let all = common::all_schedules(5, 3);
        let seqs = &all[(k as usize * 97) % all.len()];
        let sched = Schedule::new(5, seqs.clone()).unwrap();
        for f in 0..3 {
            assert_eq!(extreme_scenario(&inst, &sched, f).matrix(), common::extreme(&inst, seqs, f).matrix());
        }
    }
}

fn six_job_instances() -> Vec<Instance> {
    (0..6).map(|k| instance(800 + k, 6, 2)).collect()
}

#[test]
fn mdh_is_sandwiched_on_six_jobs() {
    for (k, inst) in six_job_instances().iter().enumerate() {
        let opt = Oracle::new(inst).robust_optimum();
        let out = mdh_solve(inst, &MdhConfig { seed: k as u64, ..MdhConfig::default() }).unwrap();
        assert!(opt <= out.report.r_max);
        assert!(Ratio::from_integer(out.report.r_max) <= out.mid_bound.unwrap().bound);
        let m1234 = MdhConfig { seed: k as u64, ere: EreConfig::from_mode(EreMode::M1234), ..MdhConfig::default() };
        let h = mdh_solve(inst, &m1234).unwrap();
        let true_r = evaluate_regret(inst, &h.schedule, None, &EreConfig::orig()).unwrap().r_max;
        assert!(opt <= true_r);
    }
}

#[test]
fn sa_never_beats_the_optimum() {
    for (k, inst) in six_job_instances().iter().enumerate() {
        let opt = Oracle::new(inst).robust_optimum();
        let out = sa_solve(inst, &SaConfig { seed: k as u64, ..SaConfig::default() }).unwrap();
        assert!(opt <= out.report.r_max);
        assert!(out.report.r_max <= out.initial_r_max);
    }
}
