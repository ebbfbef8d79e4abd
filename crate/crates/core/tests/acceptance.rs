//! Acceptance criteria for the whole pipeline, one test per criterion.
//! Each test enforces both the stated tolerance and a wall-clock budget.

use mwmtp::cyclepack::{max_weight_cycle_packing, split_to_short, ShortCycleParams};
use mwmtp::instance::gen_euclidean;
use mwmtp::pack3::{build_t3, build_triplet_graph, max_matching_h};
use mwmtp::pipeline::solve;
use mwmtp::tradeoff::{build_lp, solve_lp};
use mwmtp::verify::{
    run_suite, verify_cyclepack, verify_derandom, verify_matching, verify_pack1, verify_xprob,
    verify_zprob,
};
use std::time::{Duration, Instant};

fn within(budget: Duration, start: Instant, what: &str) {
    let took = start.elapsed();
    assert!(
        took <= budget,
        "{what} took {took:.1?}, budget {budget:.1?}"
    );
}

#[test]
fn criterion_01_lp_certificate_value() {
    let start = Instant::now();
    let sol = solve_lp(&build_lp(0.25).unwrap()).unwrap();
    assert!(
        (0.668357..=0.6684).contains(&sol.value),
        "lp value {} outside [0.668357, 0.6684]",
        sol.value
    );
    within(Duration::from_secs(1), start, "lp certificate");
}

#[test]
fn criterion_02_matching_oracle() {
    let start = Instant::now();
    let r = verify_matching(200).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
    within(Duration::from_secs(10), start, "matching suite");
}

#[test]
fn criterion_03_cycle_packing_oracle() {
    let start = Instant::now();
    let r = verify_cyclepack(50).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
    within(Duration::from_secs(30), start, "cyclepack suite");
}

#[test]
fn criterion_04_partial_packing_oracle() {
    let start = Instant::now();
    let r = verify_pack1(100).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
    within(Duration::from_secs(30), start, "pack1 suite");
}

#[test]
fn criterion_05_z_process_probabilities() {
    let start = Instant::now();
    let r = verify_zprob(100_000).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
    within(Duration::from_secs(120), start, "zprob suite");
}

#[test]
fn criterion_06_x_process_probabilities() {
    let start = Instant::now();
    let r = verify_xprob(100_000).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
    within(Duration::from_secs(120), start, "xprob suite");
}

#[test]
fn criterion_07_derandomization() {
    let start = Instant::now();
    let r = verify_derandom(100_000).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
    within(Duration::from_secs(300), start, "derandom suite");
}

#[test]
fn criterion_08_t3_certificate() {
    // w(T3) >= (tau/18) w~(Y*) + (2/3) w(C) on every test instance.
    let start = Instant::now();
    let tau = 0.25;
    for (i, n) in [9, 12, 15, 18, 21, 24, 27, 30].into_iter().enumerate() {
        let inst = gen_euclidean(n, 9_000 + i as u64);
        let cstar = max_weight_cycle_packing(&inst).unwrap();
        let c = split_to_short(&inst, &cstar, ShortCycleParams::new(0.2).unwrap()).unwrap();
        let h = build_triplet_graph(&inst, &c, tau).unwrap();
        let ystar = max_matching_h(&h);
        let t3 = build_t3(&inst, &c, tau).unwrap();
        let bound = tau / 18.0 * ystar.wtilde() + 2.0 / 3.0 * c.weight(&inst);
        assert!(
            t3.t3.weight(&inst) >= bound - 1e-9,
            "n {n}: w(T3) = {} < {bound}",
            t3.t3.weight(&inst)
        );
    }
    within(Duration::from_secs(60), start, "t3 certificate");
}

#[test]
fn criterion_09_instance_ledger() {
    let r = run_suite("ledger", None).unwrap();
    assert!(r.passed(), "\n{}", r.to_text());
}

#[test]
fn criterion_10_determinism() {
    let inst = gen_euclidean(15, 9_100);
    let (_, a) = solve(&inst, 0.2, 0.25, 42, true).unwrap();
    let (_, b) = solve(&inst, 0.2, 0.25, 42, true).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.to_json(), b.to_json());
    let ra = verify_matching(30).unwrap();
    let rb = verify_matching(30).unwrap();
    assert_eq!(ra.to_text(), rb.to_text());
}
