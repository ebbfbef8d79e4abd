//! Second candidate packing: a maximum weight matching of n/3 edges
//! completed into triangles, plus the randomized edge-selection process
//! used to analyze it against an optimum packing.

use crate::classify::{Class, Classification};
use crate::instance::MetricInstance;
use crate::matching::{max_weight_matching_of_size, WeightedGraph};
use crate::pack1::{complete_partial, PartialPacking};
use crate::packing::{OrientedCyclePacking, Triangle, TrianglePacking};
use crate::{Error, Result};
use rand::Rng;

/// Second candidate packing with its certified lower bound 2 w(M*),
/// where M* is a maximum weight matching of exactly n/3 edges.
pub fn build_t2(inst: &MetricInstance) -> Result<(TrianglePacking, f64)> {
    inst.require_divisible()?;
    let g = WeightedGraph::complete(inst);
    let m = max_weight_matching_of_size(&g, inst.n() / 3)?;
    let w_m = m.weight(inst);
    let p = PartialPacking {
        triangles: vec![],
        edge_components: m.edges().to_vec(),
    };
    let t2 = complete_partial(inst, &p)?;
    if t2.weight(inst) < 2.0 * w_m - inst.tol() {
        return Err(Error::Structural(format!(
            "matching completion lost weight: {} < {}",
            t2.weight(inst),
            2.0 * w_m
        )));
    }
    Ok((t2, w_m))
}

/// One draw of the randomized edge set Z used in the analysis of T2.
#[derive(Debug, Clone)]
pub struct ZSample {
    /// Chosen triangle edge e_t per triangle, as sorted pairs.
    pub chosen: Vec<(usize, usize)>,
    /// Out-edges surviving step 2, directed along their cycles.
    pub y: Vec<(usize, usize)>,
    /// The final n/3 edges, as sorted pairs.
    pub z: Vec<(usize, usize)>,
}

impl ZSample {
    pub fn y_contains(&self, e: (usize, usize)) -> bool {
        self.y.contains(&e) || self.y.contains(&(e.1, e.0))
    }

    pub fn z_contains(&self, e: (usize, usize)) -> bool {
        let e = (e.0.min(e.1), e.0.max(e.1));
        self.z.contains(&e)
    }
}

/// Draws one Z: a uniform edge per triangle of `b`, then the out-edges of
/// type-1 triangles disjoint from those, thinned per component (single
/// edges kept; paths and even cycles keep one of their two alternating
/// matchings; odd cycles lose a uniform edge first), and finally e_t for
/// every triangle whose out-edge did not survive.
pub fn sample_z(
    b: &TrianglePacking,
    c: &OrientedCyclePacking,
    cls: &Classification,
    classes: &[Class],
    rng: &mut impl Rng,
) -> Result<ZSample> {
    let n = b.triangles().len() * 3;
    let mut in_x = vec![false; n];
    let mut chosen = vec![];
    for t in b.triangles() {
        let es = t.edges();
        let e = es[rng.gen_range(0..3)];
        in_x[e.0] = true;
        in_x[e.1] = true;
        chosen.push(e);
    }
    // Step 2: surviving out-edges, at most one per triangle.
    let mut y = vec![];
    let mut y_triangle = vec![usize::MAX; n];
    for (ti, (info, &class)) in cls.triangles.iter().zip(classes).enumerate() {
        if class != Class::B2 && class != Class::B4 {
            continue;
        }
        let mut count = 0;
        for &(x, xs) in &info.out_edges {
            if !in_x[x] && !in_x[xs] {
                y.push((x, xs));
                y_triangle[x] = ti;
                count += 1;
            }
        }
        if count > 1 {
            return Err(Error::Structural(format!(
                "triangle {ti} placed {count} out-edges in Y"
            )));
        }
    }
    // Step 3: thin Y per component of the cycle edges it occupies.
    let y_set: std::collections::HashSet<(usize, usize)> = y.iter().copied().collect();
    let mut z: Vec<(usize, usize)> = vec![];
    let mut covered = vec![false; b.triangles().len()];
    for cyc in c.cycles() {
        let m = cyc.len();
        let in_y: Vec<bool> = (0..m)
            .map(|i| y_set.contains(&(cyc[i], cyc[(i + 1) % m])))
            .collect();
        let count = in_y.iter().filter(|&&x| x).count();
        if count == 0 {
            continue;
        }
        let keep = if count == m {
            // Whole cycle in Y.
            if m % 2 == 0 {
                let offset = rng.gen_range(0..2usize);
                (0..m).filter(|p| p % 2 == offset).collect::<Vec<_>>()
            } else {
                let del = rng.gen_range(0..m);
                let path: Vec<usize> = (1..m).map(|i| (del + i) % m).collect();
                alternating(&path, rng)
            }
        } else {
            // Maximal runs of consecutive Y positions, wrapping.
            let mut keep = vec![];
            let mut start = 0;
            while in_y[(start + m - 1) % m] {
                start += 1;
            }
            let mut i = 0;
            while i < m {
                let p = (start + i) % m;
                if !in_y[p] {
                    i += 1;
                    continue;
                }
                let mut run = vec![];
                while i < m && in_y[(start + i) % m] {
                    run.push((start + i) % m);
                    i += 1;
                }
                if run.len() == 1 {
                    keep.push(run[0]);
                } else {
                    keep.extend(alternating(&run, rng));
                }
            }
            keep
        };
        for p in keep {
            // The tail of a kept out-edge identifies its triangle.
            let (tail, head) = (cyc[p], cyc[(p + 1) % m]);
            debug_assert!(y_triangle[tail] != usize::MAX);
            covered[y_triangle[tail]] = true;
            z.push((tail.min(head), tail.max(head)));
        }
    }
    // Step 4: triangles without a surviving out-edge contribute e_t.
    for (ti, e) in chosen.iter().enumerate() {
        if !covered[ti] {
            z.push((e.0.min(e.1), e.0.max(e.1)));
        }
    }
    if z.len() != b.triangles().len() {
        return Err(Error::Structural(format!(
            "Z has {} edges, expected {}",
            z.len(),
            b.triangles().len()
        )));
    }
    z.sort_unstable();
    let chosen: Vec<(usize, usize)> = chosen
        .into_iter()
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect();
    Ok(ZSample { chosen, y, z })
}

// One of the two alternating matchings of a path, given its edge
// positions in path order.
fn alternating(run: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let offset = rng.gen_range(0..2usize);
    run.iter()
        .enumerate()
        .filter(|&(i, _)| i % 2 == offset)
        .map(|(_, &p)| p)
        .collect()
}

/// A hand-built configuration exercising one conditional-probability case
/// of the Z analysis: a cluster metric (0.01 inside each packing triple,
/// 1 across), consecutive-triple optimum packing, a prescribed cycle
/// packing, and the focal out-edge to track.
pub struct ZCase {
    pub inst: MetricInstance,
    pub b: TrianglePacking,
    pub c: OrientedCyclePacking,
    pub focal: (usize, usize),
    pub expected: f64,
}

/// The six cases, numbered 1..=6, with conditional probabilities
/// P[e in Z | e in Y] of 1, 5/6, 7/9, 13/18, 13/18 and 97/135.
pub fn z_case_fixture(case: usize) -> Result<ZCase> {
    let (n, cycles, expected): (usize, Vec<Vec<usize>>, f64) = match case {
        1 => (9, vec![vec![0, 3, 6, 1, 7], vec![2, 4, 5, 8]], 1.0),
        2 => (9, vec![vec![0, 3, 6, 7], vec![1, 2, 4, 5, 8]], 5.0 / 6.0),
        3 => (9, vec![vec![0, 3, 6], vec![1, 2, 4, 5, 7, 8]], 7.0 / 9.0),
        4 => (
            12,
            vec![vec![0, 3, 6, 9], vec![1, 2, 4, 5, 7, 8, 10, 11]],
            13.0 / 18.0,
        ),
        5 => (
            15,
            vec![vec![0, 3, 6, 9, 10], vec![1, 2, 4, 5, 7, 8, 11, 12, 13, 14]],
            13.0 / 18.0,
        ),
        6 => (
            15,
            vec![vec![0, 3, 6, 9, 12], vec![1, 2, 4, 5, 7, 8, 10, 11, 13, 14]],
            97.0 / 135.0,
        ),
        _ => {
            return Err(Error::InvalidParam(format!(
                "case must be 1..=6, got {case}"
            )))
        }
    };
    let inst = MetricInstance::from_fn(n, |i, j| if i / 3 == j / 3 { 0.01 } else { 1.0 });
    let b = TrianglePacking::new(
        (0..n / 3)
            .map(|t| Triangle::new(3 * t, 3 * t + 1, 3 * t + 2))
            .collect(),
        n,
    )?;
    let c = OrientedCyclePacking::new(cycles, n)?;
    Ok(ZCase {
        inst,
        b,
        c,
        focal: (3, 6),
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, type_split};
    use crate::instance::gen_euclidean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn t2_bound_and_heaviest_edge_domination() {
        for seed in 0..5 {
            let inst = gen_euclidean(9, 500 + seed);
            let (t2, w_m) = build_t2(&inst).unwrap();
            assert!(t2.weight(&inst) >= 2.0 * w_m - 1e-9);
            // The heaviest edges of an optimum packing form an n/3
            // matching, so M* dominates their total.
            let (b, _) = crate::exact::exact_triangle_packing(&inst).unwrap();
            let heavy: f64 = b
                .triangles()
                .iter()
                .map(|t| {
                    let r = t.edge_roles(&inst);
                    inst.weight(r[2].0, r[2].1)
                })
                .sum();
            assert!(w_m >= heavy - 1e-9, "seed {seed}: {w_m} < {heavy}");
        }
    }

    #[test]
    fn z_always_has_a_third_of_n_edges() {
        let case = z_case_fixture(6).unwrap();
        let cls = classify(&case.b, &case.c, case.inst.n()).unwrap();
        let classes = type_split(&case.inst, &case.b, &cls, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let s = sample_z(&case.b, &case.c, &cls, &classes, &mut rng).unwrap();
            assert_eq!(s.z.len(), case.inst.n() / 3);
        }
    }

    #[test]
    fn fixture_conditionals_match_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for case_no in 1..=6 {
            let case = z_case_fixture(case_no).unwrap();
            let n = case.inst.n();
            let cls = classify(&case.b, &case.c, n).unwrap();
            let classes = type_split(&case.inst, &case.b, &cls, 0.25).unwrap();
            let trials = 40_000;
            let (mut in_y, mut in_z) = (0u64, 0u64);
            for _ in 0..trials {
                let s = sample_z(&case.b, &case.c, &cls, &classes, &mut rng).unwrap();
                if s.y_contains(case.focal) {
                    in_y += 1;
                    if s.z_contains(case.focal) {
                        in_z += 1;
                    }
                }
            }
            assert!(in_y > 0, "case {case_no}: focal edge never entered Y");
            let p_hat = in_z as f64 / in_y as f64;
            let p = case.expected;
            let sigma = (p * (1.0 - p) / in_y as f64).sqrt();
            assert!(
                (p_hat - p).abs() <= 4.0 * sigma + 1e-12,
                "case {case_no}: got {p_hat}, expected {p} (sigma {sigma})"
            );
            // The focal edge enters Y with probability 1/9.
            let q_hat = in_y as f64 / trials as f64;
            let qs = (1.0 / 9.0 * 8.0 / 9.0 / trials as f64).sqrt();
            assert!(
                (q_hat - 1.0 / 9.0).abs() <= 4.0 * qs,
                "case {case_no}: P[e in Y] estimate {q_hat}"
            );
        }
    }
}
