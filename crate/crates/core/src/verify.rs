//! Verification suites shared by the command line tool and the
//! acceptance tests: each suite exercises one component against an
//! independent oracle or a Monte Carlo estimate and returns a
//! structured pass/fail report.

use crate::classify::{classify, type_split, Class};
use crate::cyclepack::{max_weight_cycle_packing, split_to_short, ShortCycleParams};
use crate::exact::{
    exact_cycle_packing, exact_matching, exact_partial_packing, exact_triangle_packing,
};
use crate::instance::{gen_euclidean, gen_graph_metric, uniform_instance, MetricInstance};
use crate::matching::{max_weight_matching, max_weight_matching_of_size, WeightedGraph};
use crate::pack1::best_partial_packing_with_budget;
use crate::pack2::{sample_z, z_case_fixture};
use crate::pack3::{
    build_triplet_graph, conditional_expectation_f, derandomize_x, exhaustive_expected_f, f_value,
    max_matching_h, realize_x, sample_x, x_quota, XState,
};
use crate::packing::OrientedCyclePacking;
use crate::tradeoff::instance_ledger;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.into(),
            checks: vec![],
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{} {}/{}: {}\n",
                tag, self.suite, c.name, c.detail
            ));
        }
        out
    }
}

fn cycle_split(n: usize, lens: &[usize]) -> OrientedCyclePacking {
    let mut cycles = vec![];
    let mut v = 0;
    for &l in lens {
        cycles.push((v..v + l).collect());
        v += l;
    }
    assert_eq!(v, n);
    OrientedCyclePacking::new(cycles, n).expect("layout is a valid cycle packing")
}

fn short_cycles(inst: &MetricInstance, eps: f64) -> Result<OrientedCyclePacking> {
    let cstar = max_weight_cycle_packing(inst)?;
    split_to_short(inst, &cstar, ShortCycleParams::new(eps)?)
}

/// Blossom matching against exhaustive search: optimal weight on random
/// graphs, plus exact-cardinality agreement including infeasible cases.
pub fn verify_matching(graphs: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("matching");
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    let mut worst = 0.0f64;
    let mut sized = 0usize;
    let mut sized_worst = 0.0f64;
    let mut ok = true;
    let mut sized_ok = true;
    for _ in 0..graphs {
        let n = rng.gen_range(4..=10usize);
        let density = rng.gen_range(0.3..0.9);
        let mut edges = vec![];
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    edges.push((i, j, rng.gen_range(0.1..10.0)));
                }
            }
        }
        let g = WeightedGraph::from_edges(n, edges.iter().copied());
        let lookup = |u: usize, v: usize| {
            edges
                .iter()
                .find(|&&(a, b, _)| (a, b) == (u.min(v), u.max(v)))
                .map(|&(_, _, w)| w)
                .unwrap_or(0.0)
        };
        let got = max_weight_matching(&g).weight_by(lookup);
        let (_, want) = exact_matching(n, &edges, None)?;
        worst = worst.max((got - want).abs());
        if (got - want).abs() > 1e-12 {
            ok = false;
        }
        let k = rng.gen_range(0..=n / 2);
        match (
            max_weight_matching_of_size(&g, k),
            exact_matching(n, &edges, Some(k)),
        ) {
            (Ok(m), Ok((_, want))) => {
                sized += 1;
                let got = m.weight_by(lookup);
                sized_worst = sized_worst.max((got - want).abs());
                if (got - want).abs() > 1e-12 {
                    sized_ok = false;
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => {
                sized_ok = false;
                let _ = (a, b);
            }
        }
    }
    report.push(
        "optimal_weight",
        ok,
        format!("{graphs} graphs on <= 10 vertices, max deviation {worst:.2e}"),
    );
    report.push(
        "exact_cardinality",
        sized_ok,
        format!("{sized} feasible sized matchings, max deviation {sized_worst:.2e}"),
    );
    Ok(report)
}

/// Maximum weight 2-factor against brute force, and its dominance over
/// the optimum triangle packing.
pub fn verify_cyclepack(instances: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("cyclepack");
    let mut rng = ChaCha8Rng::seed_from_u64(0x2f);
    let mut worst = 0.0f64;
    let mut ok = true;
    for t in 0..instances {
        let n = rng.gen_range(4..=8usize);
        let inst = if t % 2 == 0 {
            gen_euclidean(n, 7_000 + t as u64)
        } else {
            gen_graph_metric(n, 0.5, 7_000 + t as u64)
        };
        let got = max_weight_cycle_packing(&inst)?.weight(&inst);
        let (_, want) = exact_cycle_packing(&inst)?;
        worst = worst.max((got - want).abs());
        if (got - want).abs() > inst.tol() {
            ok = false;
        }
    }
    report.push(
        "optimal_weight",
        ok,
        format!("{instances} instances on 4..=8 vertices, max deviation {worst:.2e}"),
    );
    let mut dom_ok = true;
    let mut margin = f64::INFINITY;
    for seed in 0..10u64 {
        let inst = gen_euclidean(6, 7_500 + seed);
        let wc = max_weight_cycle_packing(&inst)?.weight(&inst);
        let (_, wb) = exact_triangle_packing(&inst)?;
        margin = margin.min(wc - wb);
        if wc < wb - inst.tol() {
            dom_ok = false;
        }
    }
    report.push(
        "dominates_optimum_packing",
        dom_ok,
        format!("10 instances, min w(C*) - w(B*) = {margin:.3e}"),
    );
    Ok(report)
}

/// Cycle-local partial packing dynamic program against exhaustive search,
/// for every component budget.
pub fn verify_pack1(weightings: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("pack1");
    let layouts: [&[usize]; 4] = [&[5, 7], &[3, 4, 5], &[6, 6], &[4, 4, 4]];
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut cases = 0usize;
    for seed in 0..weightings as u64 {
        let inst = gen_euclidean(12, 8_000 + seed);
        let lens = layouts[(seed % 4) as usize];
        let c = cycle_split(12, lens);
        let cycle_of = c.vertex_map(12);
        let allowed = |u: usize, v: usize| cycle_of[u] == cycle_of[v];
        for budget in 0..=4 {
            let (_, got) = best_partial_packing_with_budget(&inst, &c, budget)?;
            let want = exact_partial_packing(&inst, &allowed, budget)?;
            worst = worst.max((got - want).abs());
            if (got - want).abs() > 1e-9 {
                ok = false;
            }
            cases += 1;
        }
    }
    report.push(
        "dp_matches_exhaustive",
        ok,
        format!("{cases} weighting/budget cases, max deviation {worst:.2e}"),
    );
    Ok(report)
}

/// The randomized edge process behind the second packing: the six
/// hand-built conditional-probability cases, then the unconditional
/// survival floor 97/1215 on instances with a known optimum packing.
pub fn verify_zprob(trials: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("zprob");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a);
    let mut fixtures_ok = true;
    let mut worst_sigmas = 0.0f64;
    for case_no in 1..=6 {
        let case = z_case_fixture(case_no)?;
        let cls = classify(&case.b, &case.c, case.inst.n())?;
        let classes = type_split(&case.inst, &case.b, &cls, 0.25)?;
        let (mut in_y, mut in_z) = (0u64, 0u64);
        for _ in 0..trials {
            let s = sample_z(&case.b, &case.c, &cls, &classes, &mut rng)?;
            if s.y_contains(case.focal) {
                in_y += 1;
                if s.z_contains(case.focal) {
                    in_z += 1;
                }
            }
        }
        let p = case.expected;
        let p_hat = in_z as f64 / in_y.max(1) as f64;
        let sigma = (p * (1.0 - p) / in_y.max(1) as f64).sqrt().max(1e-15);
        let sigmas = (p_hat - p).abs() / sigma;
        worst_sigmas = worst_sigmas.max(sigmas);
        if in_y == 0 || sigmas > 3.0 {
            fixtures_ok = false;
        }
    }
    report.push(
        "fixture_conditionals",
        fixtures_ok,
        format!("6 cases at {trials} trials, worst deviation {worst_sigmas:.2} sigma"),
    );
    let p0 = 97.0 / 1215.0;
    let sigma = (p0 * (1.0 - p0) / trials as f64).sqrt();
    let mut floor_ok = true;
    let mut checked = 0usize;
    let mut min_p = f64::INFINITY;
    let specs: [(usize, bool, u64); 5] = [
        (9, true, 8_100),
        (12, true, 8_101),
        (9, false, 8_102),
        (12, false, 8_103),
        (15, true, 8_104),
    ];
    for (n, euclid, seed) in specs {
        let inst = if euclid {
            gen_euclidean(n, seed)
        } else {
            gen_graph_metric(n, 0.5, seed)
        };
        let (b, _) = exact_triangle_packing(&inst)?;
        let c = short_cycles(&inst, 0.2)?;
        let cls = classify(&b, &c, n)?;
        let classes = type_split(&inst, &b, &cls, 0.25)?;
        let focals: Vec<(usize, usize)> = cls
            .triangles
            .iter()
            .zip(&classes)
            .filter(|(_, &cl)| cl == Class::B2 || cl == Class::B4)
            .flat_map(|(info, _)| info.out_edges.iter().copied())
            .collect();
        if focals.is_empty() {
            continue;
        }
        let mut hits = vec![0u64; focals.len()];
        for _ in 0..trials {
            let s = sample_z(&b, &c, &cls, &classes, &mut rng)?;
            for (i, &e) in focals.iter().enumerate() {
                if s.z_contains(e) {
                    hits[i] += 1;
                }
            }
        }
        for &h in &hits {
            let p_hat = h as f64 / trials as f64;
            min_p = min_p.min(p_hat);
            checked += 1;
            if p_hat < p0 - 3.0 * sigma {
                floor_ok = false;
            }
        }
    }
    if checked == 0 {
        floor_ok = false;
    }
    report.push(
        "survival_floor",
        floor_ok,
        format!(
            "{checked} out-edges of heavy-out triangles across 5 instances, \
             min P[e in Z] = {min_p:.4} vs floor {p0:.4}"
        ),
    );
    Ok(report)
}

/// The randomized cycle-edge selection behind the third packing: each
/// cycle edge lands in X with probability 1/3, and a good-triplet pair
/// survives (edge in, apex out) with probability at least 1/9.
pub fn verify_xprob(trials: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("xprob");
    let mut rng = ChaCha8Rng::seed_from_u64(0x58);
    let layouts: [(usize, &[usize]); 5] = [
        (9, &[4, 5]),
        (12, &[3, 4, 5]),
        (12, &[12]),
        (15, &[6, 9]),
        (18, &[18]),
    ];
    let mut edge_ok = true;
    let mut worst_sigmas = 0.0f64;
    let mut pair_ok = true;
    let mut pairs = 0usize;
    let mut min_pair = f64::INFINITY;
    for (n, lens) in layouts {
        let inst = uniform_instance(n, 1.0);
        let c = cycle_split(n, lens);
        let (l_total, _) = x_quota(&c);
        if l_total % 3 != 0 {
            return Err(Error::InvalidParam(format!(
                "layout {lens:?} has |L| = {l_total}, not divisible by 3"
            )));
        }
        let h = build_triplet_graph(&inst, &c, 0.25)?;
        let ystar = max_matching_h(&h);
        let cycle_edges: Vec<(usize, usize)> = c.directed_edges().collect();
        let mut edge_hits = vec![0u64; cycle_edges.len()];
        let mut pair_hits = vec![0u64; ystar.edges.len()];
        for _ in 0..trials {
            let draw = sample_x(&c, &mut rng);
            let x = realize_x(&c, &draw, n)?;
            for (i, &e) in cycle_edges.iter().enumerate() {
                if x.contains(e) {
                    edge_hits[i] += 1;
                }
            }
            for (i, e) in ystar.edges.iter().enumerate() {
                if x.contains(e.cycle_edge()) && !x.covered[e.z] {
                    pair_hits[i] += 1;
                }
            }
        }
        let sigma_e = (2.0 / 9.0 / trials as f64).sqrt();
        for &h in &edge_hits {
            let p_hat = h as f64 / trials as f64;
            let sigmas = (p_hat - 1.0 / 3.0).abs() / sigma_e;
            worst_sigmas = worst_sigmas.max(sigmas);
            if sigmas > 3.0 {
                edge_ok = false;
            }
        }
        let p0 = 1.0 / 9.0;
        let sigma_p = (p0 * (1.0 - p0) / trials as f64).sqrt();
        for &h in &pair_hits {
            let p_hat = h as f64 / trials as f64;
            min_pair = min_pair.min(p_hat);
            pairs += 1;
            if p_hat < p0 - 3.0 * sigma_p {
                pair_ok = false;
            }
        }
    }
    if pairs == 0 {
        pair_ok = false;
    }
    report.push(
        "edge_membership_third",
        edge_ok,
        format!("5 layouts at {trials} trials, worst deviation {worst_sigmas:.2} sigma"),
    );
    report.push(
        "pair_survival_ninth",
        pair_ok,
        format!("{pairs} matched triplet pairs, min probability {min_pair:.4} vs floor 0.1111"),
    );
    Ok(report)
}

/// Conditional-expectation derandomization: the deterministic draw beats
/// the Monte Carlo mean, and the root expectation matches exhaustive
/// enumeration on small layouts.
pub fn verify_derandom(trials: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("derandom");
    let mut rng = ChaCha8Rng::seed_from_u64(0xde);
    let tau = 0.25;
    let mut dom_ok = true;
    let mut min_margin = f64::INFINITY;
    for (i, n) in [12, 15, 18, 21, 24, 27, 30, 12, 18, 24]
        .into_iter()
        .enumerate()
    {
        let inst = gen_euclidean(n, 8_700 + i as u64);
        let c = short_cycles(&inst, 0.2)?;
        let h = build_triplet_graph(&inst, &c, tau)?;
        let ystar = max_matching_h(&h);
        let draw = derandomize_x(&inst, &c, &ystar, tau)?;
        let f_det = f_value(&inst, &c, &ystar, tau, &draw)?;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let d = sample_x(&c, &mut rng);
            let f = f_value(&inst, &c, &ystar, tau, &d)?;
            sum += f;
            sum_sq += f * f;
        }
        let mean = sum / trials as f64;
        let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
        let sigma_mean = (var / trials as f64).sqrt();
        min_margin = min_margin.min(f_det - mean);
        if f_det < mean - 3.0 * sigma_mean {
            dom_ok = false;
        }
    }
    report.push(
        "dominates_monte_carlo_mean",
        dom_ok,
        format!("10 instances at {trials} samples, min f_det - mean = {min_margin:.3e}"),
    );
    let mut exact_ok = true;
    let mut worst = 0.0f64;
    let layouts: [(usize, &[usize]); 3] = [(9, &[4, 5]), (12, &[5, 7]), (12, &[3, 4, 5])];
    for (i, (n, lens)) in layouts.into_iter().enumerate() {
        let inst = gen_euclidean(n, 8_800 + i as u64);
        let c = cycle_split(n, lens);
        let h = build_triplet_graph(&inst, &c, tau)?;
        let ystar = max_matching_h(&h);
        let root = conditional_expectation_f(&inst, &c, &ystar, tau, &XState::default())?;
        let want = exhaustive_expected_f(&inst, &c, &ystar, tau)?;
        worst = worst.max((root - want).abs());
        if (root - want).abs() > 1e-9 {
            exact_ok = false;
        }
        let draw = derandomize_x(&inst, &c, &ystar, tau)?;
        let f_det = f_value(&inst, &c, &ystar, tau, &draw)?;
        if f_det < want - 1e-9 {
            exact_ok = false;
        }
    }
    report.push(
        "root_matches_exhaustive",
        exact_ok,
        format!("3 small layouts, max deviation {worst:.2e}, f_det >= E[f] on each"),
    );
    Ok(report)
}

/// The four per-instance ratio bounds on instances with a known optimum.
pub fn verify_ledger() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("ledger");
    let mut all_ok = true;
    let mut min_margin = f64::INFINITY;
    let mut count = 0usize;
    for (i, n) in [9, 12, 15, 9, 12, 15, 9, 12, 15, 12]
        .into_iter()
        .enumerate()
    {
        let inst = if i % 2 == 0 {
            gen_euclidean(n, 8_900 + i as u64)
        } else {
            gen_graph_metric(n, 0.5, 8_900 + i as u64)
        };
        let (b, _) = exact_triangle_packing(&inst)?;
        let c = short_cycles(&inst, 0.2)?;
        let (t1, _) = crate::pack1::build_t1(&inst, &c)?;
        let (t2, _) = crate::pack2::build_t2(&inst)?;
        let t3 = crate::pack3::build_t3(&inst, &c, 0.25)?;
        let ledger = instance_ledger(
            &inst,
            &b,
            &c,
            0.25,
            t1.weight(&inst),
            t2.weight(&inst),
            t3.t3.weight(&inst),
        )?;
        for e in &ledger.entries {
            min_margin = min_margin.min(e.lhs - e.rhs);
            count += 1;
        }
        if !ledger.all_ok() {
            all_ok = false;
        }
    }
    report.push(
        "instance_bounds",
        all_ok,
        format!("{count} bound checks over 10 instances, min lhs - rhs = {min_margin:.3e}"),
    );
    Ok(report)
}

pub const SUITE_NAMES: [&str; 7] = [
    "matching",
    "cyclepack",
    "pack1",
    "zprob",
    "xprob",
    "derandom",
    "ledger",
];

/// Runs one suite by name. `trials` overrides the Monte Carlo sample
/// count where one applies; the deterministic suites ignore it.
pub fn run_suite(name: &str, trials: Option<usize>) -> Result<SuiteReport> {
    match name {
        "matching" => verify_matching(200),
        "cyclepack" => verify_cyclepack(50),
        "pack1" => verify_pack1(100),
        "zprob" => verify_zprob(trials.unwrap_or(100_000)),
        "xprob" => verify_xprob(trials.unwrap_or(100_000)),
        "derandom" => verify_derandom(trials.unwrap_or(100_000)),
        "ledger" => verify_ledger(),
        _ => Err(Error::InvalidParam(format!(
            "unknown suite {name}; expected one of {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}
