//! First candidate packing: an optimum partial packing of cycle-internal
//! triangles and doubled edges, completed greedily into a full triangle
//! packing.

use crate::instance::MetricInstance;
use crate::packing::{OrientedCyclePacking, Triangle, TrianglePacking};
use crate::{Error, Result};

/// Vertex-disjoint triangle and edge components, every edge joining two
/// vertices of the same cycle (chords allowed). The augmented weight
/// counts triangle edges once and edge components twice.
#[derive(Debug, Clone, Default)]
pub struct PartialPacking {
    pub triangles: Vec<Triangle>,
    pub edge_components: Vec<(usize, usize)>,
}

impl PartialPacking {
    pub fn augmented_weight(&self, inst: &MetricInstance) -> f64 {
        let t: f64 = self.triangles.iter().map(|t| t.weight(inst)).sum();
        let e: f64 = self
            .edge_components
            .iter()
            .map(|&(u, v)| 2.0 * inst.weight(u, v))
            .sum();
        t + e
    }

    pub fn component_count(&self) -> usize {
        self.triangles.len() + self.edge_components.len()
    }
}

// Per-cycle profile: for each component count, the best augmented weight
// achievable inside the cycle and a reconstruction of the components.
struct CycleProfile {
    best: Vec<Option<(f64, Vec<Comp>)>>,
}

#[derive(Debug, Clone, Copy)]
enum Comp {
    Skip,
    Edge(usize, usize),
    Tri(usize, usize, usize),
}

fn cycle_profile(inst: &MetricInstance, verts: &[usize]) -> CycleProfile {
    let m = verts.len();
    assert!(m <= 16, "cycle too long for the subset DP");
    let full = (1usize << m) - 1;
    let kmax = m / 2;
    // dp[mask][k]: best weight with the vertices in mask decided.
    let mut dp = vec![vec![f64::NEG_INFINITY; kmax + 1]; full + 1];
    let mut act: Vec<Vec<Option<(usize, usize, Comp)>>> = vec![vec![None; kmax + 1]; full + 1];
    dp[0][0] = 0.0;
    for mask in 0..=full {
        let i = match (0..m).find(|&b| mask >> b & 1 == 0) {
            Some(b) => b,
            None => continue,
        };
        for k in 0..=kmax {
            let cur = dp[mask][k];
            if cur.is_infinite() {
                continue;
            }
            let skip = mask | 1 << i;
            if cur > dp[skip][k] {
                dp[skip][k] = cur;
                act[skip][k] = Some((mask, k, Comp::Skip));
            }
            for j in i + 1..m {
                if mask >> j & 1 == 1 {
                    continue;
                }
                if k < kmax {
                    let nm = mask | 1 << i | 1 << j;
                    let w = cur + 2.0 * inst.weight(verts[i], verts[j]);
                    if w > dp[nm][k + 1] {
                        dp[nm][k + 1] = w;
                        act[nm][k + 1] = Some((mask, k, Comp::Edge(i, j)));
                    }
                    for l in j + 1..m {
                        if mask >> l & 1 == 1 {
                            continue;
                        }
                        let nm = nm | 1 << l;
                        let w = cur + inst.triangle_weight(verts[i], verts[j], verts[l]);
                        if w > dp[nm][k + 1] {
                            dp[nm][k + 1] = w;
                            act[nm][k + 1] = Some((mask, k, Comp::Tri(i, j, l)));
                        }
                    }
                }
            }
        }
    }
    let mut best = vec![None; kmax + 1];
    for k in 0..=kmax {
        if dp[full][k].is_finite() {
            let mut comps = vec![];
            let (mut mask, mut kk) = (full, k);
            while mask != 0 {
                let (pm, pk, comp) = act[mask][kk].expect("dp path must be recorded");
                match comp {
                    Comp::Skip => {}
                    Comp::Edge(a, b) => comps.push(Comp::Edge(verts[a], verts[b])),
                    Comp::Tri(a, b, c) => comps.push(Comp::Tri(verts[a], verts[b], verts[c])),
                }
                mask = pm;
                kk = pk;
            }
            best[k] = Some((dp[full][k], comps));
        }
    }
    CycleProfile { best }
}

/// Optimum augmented-weight partial packing with at most `budget`
/// components. Per-cycle subset dynamic programs are combined with a
/// knapsack over the component budget.
pub fn best_partial_packing_with_budget(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
    budget: usize,
) -> Result<(PartialPacking, f64)> {
    let profiles: Vec<CycleProfile> = c
        .cycles()
        .iter()
        .map(|verts| cycle_profile(inst, verts))
        .collect();
    let nc = profiles.len();
    let mut dp = vec![vec![f64::NEG_INFINITY; budget + 1]; nc + 1];
    let mut pick = vec![vec![usize::MAX; budget + 1]; nc + 1];
    dp[0][0] = 0.0;
    for (ci, prof) in profiles.iter().enumerate() {
        for used in 0..=budget {
            if dp[ci][used].is_infinite() {
                continue;
            }
            for (k, entry) in prof.best.iter().enumerate() {
                let Some((w, _)) = entry else { continue };
                if used + k > budget {
                    break;
                }
                if dp[ci][used] + w > dp[ci + 1][used + k] {
                    dp[ci + 1][used + k] = dp[ci][used] + w;
                    pick[ci + 1][used + k] = k;
                }
            }
        }
    }
    let (mut used, mut bestw) = (0, f64::NEG_INFINITY);
    for (k, &w) in dp[nc].iter().enumerate() {
        if w > bestw {
            bestw = w;
            used = k;
        }
    }
    if bestw.is_infinite() {
        return Err(Error::Structural(
            "partial packing dp found no state".into(),
        ));
    }
    let mut packing = PartialPacking::default();
    for ci in (0..nc).rev() {
        let k = pick[ci + 1][used];
        let (_, comps) = profiles[ci].best[k].as_ref().unwrap();
        for comp in comps {
            match *comp {
                Comp::Skip => {}
                Comp::Edge(u, v) => packing.edge_components.push((u.min(v), u.max(v))),
                Comp::Tri(a, b, c) => packing.triangles.push(Triangle::new(a, b, c)),
            }
        }
        used -= k;
    }
    packing.triangles.sort();
    packing.edge_components.sort_unstable();
    debug_assert!((packing.augmented_weight(inst) - bestw).abs() <= inst.tol());
    Ok((packing, bestw))
}

/// Optimum partial packing with the pipeline budget of n/3 components.
pub fn best_partial_packing(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
) -> Result<(PartialPacking, f64)> {
    best_partial_packing_with_budget(inst, c, inst.n() / 3)
}

/// Completes a partial packing into a perfect triangle packing: each edge
/// component absorbs the unused vertex adding the most weight (components
/// in lexicographic order), then leftover vertices are grouped into
/// triangles greedily. The result never weighs less than the augmented
/// weight of the input.
pub fn complete_partial(inst: &MetricInstance, p: &PartialPacking) -> Result<TrianglePacking> {
    let n = inst.n();
    inst.require_divisible()?;
    let mut used = vec![false; n];
    for t in &p.triangles {
        for v in t.vertices() {
            used[v] = true;
        }
    }
    for &(u, v) in &p.edge_components {
        used[u] = true;
        used[v] = true;
    }
    let mut triangles = p.triangles.clone();
    let mut edges = p.edge_components.clone();
    edges.sort_unstable();
    for (u, v) in edges {
        let z = (0..n)
            .filter(|&z| !used[z])
            .max_by(|&a, &b| {
                let wa = inst.weight(u, a) + inst.weight(v, a);
                let wb = inst.weight(u, b) + inst.weight(v, b);
                wa.partial_cmp(&wb).unwrap().then(b.cmp(&a))
            })
            .ok_or_else(|| Error::Structural("no free vertex to complete an edge".into()))?;
        used[z] = true;
        triangles.push(Triangle::new(u, v, z));
    }
    while let Some(a) = (0..n).find(|&v| !used[v]) {
        used[a] = true;
        let free: Vec<usize> = (0..n).filter(|&v| !used[v]).collect();
        if free.len() < 2 {
            return Err(Error::Structural(
                "leftover vertex count not a multiple of 3".into(),
            ));
        }
        let mut best = (free[0], free[1], f64::NEG_INFINITY);
        for (i, &b) in free.iter().enumerate() {
            for &c in &free[i + 1..] {
                let w = inst.triangle_weight(a, b, c);
                if w > best.2 {
                    best = (b, c, w);
                }
            }
        }
        used[best.0] = true;
        used[best.1] = true;
        triangles.push(Triangle::new(a, best.0, best.1));
    }
    TrianglePacking::new(triangles, n)
}

/// First candidate packing with its certified lower bound, the augmented
/// weight of the optimum partial packing.
pub fn build_t1(inst: &MetricInstance, c: &OrientedCyclePacking) -> Result<(TrianglePacking, f64)> {
    let (p, wtilde) = best_partial_packing(inst, c)?;
    let t1 = complete_partial(inst, &p)?;
    if t1.weight(inst) < wtilde - inst.tol() {
        return Err(Error::Structural(format!(
            "completion lost weight: {} < {}",
            t1.weight(inst),
            wtilde
        )));
    }
    Ok((t1, wtilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_partial_packing;
    use crate::instance::{gen_euclidean, gen_graph_metric};
    use crate::packing::OrientedCyclePacking;

    fn cycle_split(n: usize, lens: &[usize]) -> OrientedCyclePacking {
        let mut cycles = vec![];
        let mut v = 0;
        for &l in lens {
            cycles.push((v..v + l).collect());
            v += l;
        }
        assert_eq!(v, n);
        OrientedCyclePacking::new(cycles, n).unwrap()
    }

    #[test]
    fn dp_matches_exhaustive_partial_packing() {
        for seed in 0..12 {
            let inst = gen_euclidean(12, 200 + seed);
            for lens in [[5usize, 7].as_slice(), &[3, 4, 5], &[6, 6], &[3, 9]] {
                let c = cycle_split(12, lens);
                let cycle_of = c.vertex_map(12);
                let allowed = |u: usize, v: usize| cycle_of[u] == cycle_of[v];
                for budget in 0..=4 {
                    let (_, got) = best_partial_packing_with_budget(&inst, &c, budget).unwrap();
                    let want = exact_partial_packing(&inst, &allowed, budget).unwrap();
                    assert!(
                        (got - want).abs() < 1e-9,
                        "seed {seed} lens {lens:?} budget {budget}: dp {got}, oracle {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn completion_never_loses_augmented_weight() {
        for seed in 0..10 {
            let inst = gen_graph_metric(12, 0.4, 300 + seed);
            let c = cycle_split(12, &[5, 7]);
            let (p, wtilde) = best_partial_packing(&inst, &c).unwrap();
            let t1 = complete_partial(&inst, &p).unwrap();
            assert!(
                t1.weight(&inst) >= wtilde - 1e-9,
                "seed {seed}: {} < {wtilde}",
                t1.weight(&inst)
            );
        }
    }

    #[test]
    fn class_bound_holds_against_exact_optimum() {
        // w(T1) >= w(B1) + sum over partial-external classes of
        // 2 u / (u + v + 1) * w(B_i), the certified share of the optimum
        // recoverable from internal edges alone.
        for seed in 0..6 {
            let inst = gen_euclidean(9, 400 + seed);
            let copt = crate::cyclepack::max_weight_cycle_packing(&inst).unwrap();
            let params = crate::cyclepack::ShortCycleParams::new(0.2).unwrap();
            let c = crate::cyclepack::split_to_short(&inst, &copt, params).unwrap();
            let (b, _) = crate::exact::exact_triangle_packing(&inst).unwrap();
            let cls = crate::classify::classify(&b, &c, 9).unwrap();
            let split = crate::classify::type_split(&inst, &b, &cls, 0.25).unwrap();
            let p = crate::classify::parameters(&inst, &b, &split).unwrap();
            let (_, wtilde) = best_partial_packing(&inst, &c).unwrap();
            let mut bound = p.alpha[0] * p.w_b;
            for i in [1, 2] {
                bound += 2.0 * p.u[i] / (p.u[i] + p.v[i] + 1.0) * p.alpha[i] * p.w_b;
            }
            assert!(
                wtilde >= bound - 1e-9,
                "seed {seed}: wtilde {wtilde} < bound {bound}"
            );
        }
    }

    #[test]
    fn budget_zero_gives_empty_packing() {
        let inst = gen_euclidean(6, 7);
        let c = cycle_split(6, &[6]);
        let (p, w) = best_partial_packing_with_budget(&inst, &c, 0).unwrap();
        assert_eq!(p.component_count(), 0);
        assert_eq!(w, 0.0);
    }
}
