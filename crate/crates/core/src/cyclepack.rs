//! Cycle packing stage: a maximum weight 2-factor via a matching gadget,
//! followed by a splitting pass that bounds every cycle length.

use crate::instance::MetricInstance;
use crate::matching::{max_weight_perfect_matching, WeightedGraph};
use crate::packing::OrientedCyclePacking;
use crate::{Error, Result};

/// Splitting parameters: cycle lengths after the split lie in
/// `[3, l_max]` with `l_max = floor(2 / eps)`.
#[derive(Debug, Clone, Copy)]
pub struct ShortCycleParams {
    pub eps: f64,
    pub l_max: usize,
}

impl ShortCycleParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.4) {
            return Err(Error::InvalidParam(format!(
                "eps must lie in (0, 2/5], got {eps}"
            )));
        }
        let l_max = (2.0 / eps).floor() as usize;
        debug_assert!(l_max >= 5);
        Ok(ShortCycleParams { eps, l_max })
    }
}

/// Maximum weight cycle packing (2-factor, all cycles of length >= 3)
/// of the complete graph, by vertex splitting: each vertex becomes two
/// copies, each edge becomes a weight-0 pair of gadget nodes with
/// weight-w links to the copies of its endpoints, and a maximum weight
/// perfect matching selects the 2-factor. The matching weighs exactly
/// twice the 2-factor.
pub fn max_weight_cycle_packing(inst: &MetricInstance) -> Result<OrientedCyclePacking> {
    let n = inst.n();
    if n < 3 {
        return Err(Error::Infeasible("2-factor needs >= 3 vertices".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let nnodes = 2 * n + 2 * pairs.len();
    let mut g = WeightedGraph::new(nnodes);
    for (k, &(u, v)) in pairs.iter().enumerate() {
        let (eu, ev) = (2 * n + 2 * k, 2 * n + 2 * k + 1);
        let w = inst.weight(u, v);
        g.add_edge(eu, ev, 0.0);
        g.add_edge(2 * u, eu, w);
        g.add_edge(2 * u + 1, eu, w);
        g.add_edge(2 * v, ev, w);
        g.add_edge(2 * v + 1, ev, w);
    }
    let m = max_weight_perfect_matching(&g)?;
    let mut mate = vec![usize::MAX; nnodes];
    for &(a, b) in m.edges() {
        mate[a] = b;
        mate[b] = a;
    }
    let mut adj: Vec<Vec<usize>> = vec![vec![]; n];
    let mut decoded = 0.0;
    for (k, &(u, v)) in pairs.iter().enumerate() {
        let (eu, ev) = (2 * n + 2 * k, 2 * n + 2 * k + 1);
        if mate[eu] != ev {
            adj[u].push(v);
            adj[v].push(u);
            decoded += inst.weight(u, v);
        }
    }
    let mw = m.weight_by(|a, b| {
        g.edges()
            .iter()
            .find(|e| (e.0, e.1) == (a.min(b), a.max(b)))
            .map(|e| e.2)
            .unwrap()
    });
    if (mw - 2.0 * decoded).abs() > inst.tol() {
        return Err(Error::Structural(format!(
            "gadget decode mismatch: matching {mw}, 2-factor doubled {}",
            2.0 * decoded
        )));
    }
    if adj.iter().any(|a| a.len() != 2) {
        return Err(Error::Structural(
            "decoded edge set is not a 2-factor".into(),
        ));
    }
    let mut seen = vec![false; n];
    let mut cycles = vec![];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut prev = start;
        let mut cur = adj[start][0];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            let next = if adj[cur][0] == prev {
                adj[cur][1]
            } else {
                adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        cycles.push(cycle);
    }
    orient(cycles, n)
}

/// Canonical orientation: each cycle starts at its smallest vertex and
/// runs toward the smaller of that vertex's two neighbours. Idempotent.
pub fn orient(cycles: Vec<Vec<usize>>, n: usize) -> Result<OrientedCyclePacking> {
    let mut out = vec![];
    for c in cycles {
        let m = c.len();
        if m < 3 {
            return Err(Error::Structural(format!("cycle of length {m} < 3")));
        }
        let pos = (0..m).min_by_key(|&i| c[i]).unwrap();
        let succ = c[(pos + 1) % m];
        let pred = c[(pos + m - 1) % m];
        let mut cycle = Vec::with_capacity(m);
        if succ <= pred {
            for i in 0..m {
                cycle.push(c[(pos + i) % m]);
            }
        } else {
            for i in 0..m {
                cycle.push(c[(pos + m - i) % m]);
            }
        }
        out.push(cycle);
    }
    out.sort_by_key(|c| c[0]);
    OrientedCyclePacking::new(out, n)
}

/// Splits every cycle longer than `l_max` into cycles of length 3..l_max.
/// Per long cycle, a dynamic program picks the cheapest set of cycle
/// edges to delete such that the leftover arcs have valid lengths; each
/// arc is then closed with the edge joining its endpoints. The result is
/// asserted to keep at least a (1 - eps) fraction of the input weight.
pub fn split_to_short(
    inst: &MetricInstance,
    packing: &OrientedCyclePacking,
    params: ShortCycleParams,
) -> Result<OrientedCyclePacking> {
    let n = inst.n();
    let mut out = vec![];
    let mut kept = 0.0;
    let mut original = 0.0;
    for c in packing.cycles() {
        let m = c.len();
        let cw: f64 = (0..m).map(|i| inst.weight(c[i], c[(i + 1) % m])).sum();
        original += cw;
        if m <= params.l_max {
            out.push(c.clone());
            kept += cw;
            continue;
        }
        let cuts = min_weight_cut(inst, c, params.l_max)
            .ok_or_else(|| Error::Structural(format!("cycle of length {m} cannot be split")))?;
        let segments = cut_segments(c, &cuts);
        for seg in segments {
            let k = seg.len();
            kept += (0..k)
                .map(|i| inst.weight(seg[i], seg[(i + 1) % k]))
                .sum::<f64>();
            out.push(seg);
        }
    }
    if kept < (1.0 - params.eps) * original - inst.tol() {
        return Err(Error::Structural(format!(
            "short-cycle split kept {kept} of {original}, below the (1-eps) floor"
        )));
    }
    orient(out, n)
}

/// Positions `p` such that the directed edge `(c[p], c[p+1 mod m])` is
/// deleted, minimizing total deleted weight subject to every leftover arc
/// having between 3 and `l_max` vertices. Returns None when no valid cut
/// set exists (m in {4, 5} with l_max = 3 would be an example; callers
/// use l_max >= 5 so every m > l_max is splittable).
pub fn min_weight_cut(inst: &MetricInstance, c: &[usize], l_max: usize) -> Option<Vec<usize>> {
    let m = c.len();
    let edge = |p: usize| inst.weight(c[p % m], c[(p + 1) % m]);
    let mut best: Option<(f64, Vec<usize>)> = None;
    // Some deleted edge ends within the first l_max positions, so trying
    // each of those as the "anchor" cut covers every rotation.
    for p in 0..m.min(l_max) {
        // Anchor cut: edge entering c[p], i.e. position (p + m - 1) mod m.
        // Segment the positions p, p+1, ..., p+m-1 into arcs of 3..l_max.
        let mut dp = vec![f64::INFINITY; m + 1];
        let mut from = vec![usize::MAX; m + 1];
        dp[0] = 0.0;
        for i in 0..m {
            if dp[i].is_infinite() {
                continue;
            }
            for len in 3..=l_max.min(m - i) {
                let boundary = if i + len == m {
                    0.0
                } else {
                    edge(p + i + len - 1)
                };
                if dp[i] + boundary < dp[i + len] {
                    dp[i + len] = dp[i] + boundary;
                    from[i + len] = i;
                }
            }
        }
        if dp[m].is_infinite() {
            continue;
        }
        let anchor = (p + m - 1) % m;
        let total = dp[m] + edge(anchor);
        if best.as_ref().is_none_or(|b| total < b.0 - 1e-15) {
            let mut cuts = vec![anchor];
            let mut i = m;
            while i > 0 {
                let j = from[i];
                if i < m {
                    cuts.push((p + i - 1) % m);
                }
                i = j;
            }
            cuts.sort_unstable();
            best = Some((total, cuts));
        }
    }
    best.map(|b| b.1)
}

// Arcs remaining after deleting the cut edges, each listed in cycle order.
fn cut_segments(c: &[usize], cuts: &[usize]) -> Vec<Vec<usize>> {
    let m = c.len();
    let mut segments = vec![];
    for (idx, &p) in cuts.iter().enumerate() {
        let next = cuts[(idx + 1) % cuts.len()];
        let start = (p + 1) % m;
        let len = (next + m - p) % m;
        let seg: Vec<usize> = (0..len).map(|i| c[(start + i) % m]).collect();
        segments.push(seg);
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::instance::{gen_euclidean, gen_graph_metric};

    // Reference cut search: every subset of cycle edge positions.
    fn brute_cut(inst: &MetricInstance, c: &[usize], l_max: usize) -> Option<f64> {
        let m = c.len();
        let mut best: Option<f64> = None;
        for mask in 1u32..(1 << m) {
            let cuts: Vec<usize> = (0..m).filter(|&p| mask >> p & 1 == 1).collect();
            let ok = cuts.iter().enumerate().all(|(i, &p)| {
                let next = cuts[(i + 1) % cuts.len()];
                let len = (next + m - p) % m;
                let len = if len == 0 { m } else { len };
                (3..=l_max).contains(&len)
            });
            if !ok {
                continue;
            }
            let w: f64 = cuts
                .iter()
                .map(|&p| inst.weight(c[p], c[(p + 1) % m]))
                .sum();
            if best.is_none_or(|b| w < b) {
                best = Some(w);
            }
        }
        best
    }

    #[test]
    fn cut_dp_matches_subset_enumeration() {
        for seed in 0..8 {
            let inst = gen_euclidean(12, seed);
            let c: Vec<usize> = (0..12).collect();
            for l_max in 3..=6 {
                let got = min_weight_cut(&inst, &c, l_max).map(|cuts| {
                    cuts.iter()
                        .map(|&p| inst.weight(c[p], c[(p + 1) % 12]))
                        .sum::<f64>()
                });
                let want = brute_cut(&inst, &c, l_max);
                match (got, want) {
                    (Some(a), Some(b)) => {
                        assert!(
                            (a - b).abs() < 1e-9,
                            "seed {seed} l_max {l_max}: {a} vs {b}"
                        )
                    }
                    (None, None) => {}
                    other => panic!("seed {seed} l_max {l_max}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn gadget_matches_exact_cycle_packing() {
        for seed in 0..10 {
            let n = 4 + (seed as usize) % 5;
            let inst = gen_graph_metric(n, 0.5, seed);
            let got = max_weight_cycle_packing(&inst).unwrap().weight(&inst);
            let (_, want) = exact::exact_cycle_packing(&inst).unwrap();
            assert!(
                (got - want).abs() < 1e-6,
                "seed {seed} n {n}: gadget {got}, exact {want}"
            );
        }
    }

    #[test]
    fn cycle_packing_dominates_triangle_packing() {
        for seed in 0..5 {
            let inst = gen_euclidean(6, 40 + seed);
            let wc = max_weight_cycle_packing(&inst).unwrap().weight(&inst);
            let (_, wb) = exact::exact_triangle_packing(&inst).unwrap();
            assert!(wc >= wb - 1e-6, "seed {seed}: {wc} < {wb}");
        }
    }

    #[test]
    fn split_respects_length_bounds_and_weight_floor() {
        for seed in 0..6 {
            let inst = gen_euclidean(18, 100 + seed);
            let packing = max_weight_cycle_packing(&inst).unwrap();
            let params = ShortCycleParams::new(0.25).unwrap();
            let short = split_to_short(&inst, &packing, params).unwrap();
            for c in short.cycles() {
                assert!((3..=params.l_max).contains(&c.len()));
            }
            assert!(short.weight(&inst) >= (1.0 - params.eps) * packing.weight(&inst) - 1e-9);
        }
    }

    #[test]
    fn orient_is_canonical_and_idempotent() {
        let once = orient(vec![vec![4, 2, 7, 0, 5], vec![3, 1, 6]], 8).unwrap();
        assert_eq!(once.cycles()[0][0], 0);
        assert_eq!(once.cycles()[1][0], 1);
        let twice = orient(once.cycles().to_vec(), 8).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn eps_bounds_enforced() {
        assert!(ShortCycleParams::new(0.0).is_err());
        assert!(ShortCycleParams::new(0.41).is_err());
        assert_eq!(ShortCycleParams::new(0.4).unwrap().l_max, 5);
        assert_eq!(ShortCycleParams::new(0.2).unwrap().l_max, 10);
    }
}
