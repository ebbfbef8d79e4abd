//! Brute-force oracles. Each is exponential and size-capped; they exist
//! to certify the polynomial-time code paths on small instances.

use crate::instance::MetricInstance;
use crate::packing::{Matching, Triangle, TrianglePacking};
use crate::{Error, Result};

/// Optimum triangle packing by exhaustive recursion on the lowest
/// uncovered vertex. Capped at n = 15 (2.8M packings).
pub fn exact_triangle_packing(inst: &MetricInstance) -> Result<(TrianglePacking, f64)> {
    let n = inst.n();
    if n > 15 {
        return Err(Error::SizeLimit(format!(
            "exact triangle packing capped at 15 vertices, got {n}"
        )));
    }
    inst.require_divisible()?;
    let mut used = vec![false; n];
    let mut cur = Vec::with_capacity(n / 3);
    let mut best: Option<(Vec<Triangle>, f64)> = None;
    recurse_triangles(inst, &mut used, &mut cur, 0.0, &mut best, &mut 0);
    let (tris, w) = best.ok_or_else(|| Error::Infeasible("no packing found".into()))?;
    Ok((TrianglePacking::new(tris, n)?, w))
}

/// Number of perfect triangle packings visited by the same recursion,
/// used as a self-check of the enumeration ((n-1)(n-2)/2 * ... product).
pub fn count_triangle_packings(n: usize) -> Result<u64> {
    if n > 15 || !n.is_multiple_of(3) {
        return Err(Error::SizeLimit(format!(
            "count capped at 15, n mult of 3, got {n}"
        )));
    }
    let inst = crate::instance::uniform_instance(n, 1.0);
    let mut used = vec![false; n];
    let mut cur = vec![];
    let mut best = None;
    let mut count = 0u64;
    recurse_triangles(&inst, &mut used, &mut cur, 0.0, &mut best, &mut count);
    Ok(count)
}

fn recurse_triangles(
    inst: &MetricInstance,
    used: &mut [bool],
    cur: &mut Vec<Triangle>,
    acc: f64,
    best: &mut Option<(Vec<Triangle>, f64)>,
    count: &mut u64,
) {
    let n = used.len();
    let first = match used.iter().position(|&u| !u) {
        Some(v) => v,
        None => {
            *count += 1;
            if best.as_ref().is_none_or(|b| acc > b.1) {
                *best = Some((cur.clone(), acc));
            }
            return;
        }
    };
    used[first] = true;
    for b in first + 1..n {
        if used[b] {
            continue;
        }
        used[b] = true;
        for c in b + 1..n {
            if used[c] {
                continue;
            }
            used[c] = true;
            cur.push(Triangle::new(first, b, c));
            let w = inst.triangle_weight(first, b, c);
            recurse_triangles(inst, used, cur, acc + w, best, count);
            cur.pop();
            used[c] = false;
        }
        used[b] = false;
    }
    used[first] = false;
}

/// Optimum matching by exhaustive recursion. With `size = Some(k)` the
/// matching must have exactly k edges (Err if impossible); with `None`
/// any cardinality is allowed. Capped at 10 vertices.
pub fn exact_matching(
    n: usize,
    edges: &[(usize, usize, f64)],
    size: Option<usize>,
) -> Result<(Matching, f64)> {
    if n > 12 {
        return Err(Error::SizeLimit(format!(
            "exact matching capped at 12 vertices, got {n}"
        )));
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![vec![]; n];
    for &(u, v, w) in edges {
        adj[u.min(v)].push((u.max(v), w));
    }
    let mut best: Option<(Vec<(usize, usize)>, f64)> = None;
    let mut cur = vec![];
    recurse_matching(&adj, 0, &mut vec![false; n], &mut cur, 0.0, size, &mut best);
    match best {
        Some((es, w)) => Ok((Matching::new(es)?, w)),
        None => Err(Error::Infeasible(format!(
            "no matching of size {size:?} exists"
        ))),
    }
}

// Recursion on the lowest undecided vertex: leave it uncovered or match
// it along one of its edges. Visits every matching of the graph once.
fn recurse_matching(
    adj: &[Vec<(usize, f64)>],
    v: usize,
    used: &mut Vec<bool>,
    cur: &mut Vec<(usize, usize)>,
    acc: f64,
    size: Option<usize>,
    best: &mut Option<(Vec<(usize, usize)>, f64)>,
) {
    if v == adj.len() {
        if size.is_none_or(|k| cur.len() == k) && best.as_ref().is_none_or(|b| acc > b.1) {
            *best = Some((cur.clone(), acc));
        }
        return;
    }
    recurse_matching(adj, v + 1, used, cur, acc, size, best);
    if used[v] || (size == Some(cur.len())) {
        return;
    }
    used[v] = true;
    for &(u, w) in &adj[v] {
        if used[u] {
            continue;
        }
        used[u] = true;
        cur.push((v, u));
        recurse_matching(adj, v + 1, used, cur, acc + w, size, best);
        cur.pop();
        used[u] = false;
    }
    used[v] = false;
}

/// Optimum cycle packing (2-factor with all cycle lengths >= 3) by
/// enumerating vertex partitions and cyclic orders. Capped at 9 vertices.
pub fn exact_cycle_packing(inst: &MetricInstance) -> Result<(Vec<Vec<usize>>, f64)> {
    let n = inst.n();
    if n > 9 {
        return Err(Error::SizeLimit(format!(
            "exact cycle packing capped at 9 vertices, got {n}"
        )));
    }
    if n < 3 {
        return Err(Error::Infeasible(
            "cycle packing needs >= 3 vertices".into(),
        ));
    }
    let verts: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<Vec<usize>>, f64)> = None;
    partition_cycles(inst, &verts, &mut vec![], 0.0, &mut best);
    best.ok_or_else(|| Error::Infeasible("no cycle packing found".into()))
}

fn partition_cycles(
    inst: &MetricInstance,
    remaining: &[usize],
    cur: &mut Vec<Vec<usize>>,
    acc: f64,
    best: &mut Option<(Vec<Vec<usize>>, f64)>,
) {
    if remaining.is_empty() {
        if best.as_ref().is_none_or(|b| acc > b.1) {
            *best = Some((cur.clone(), acc));
        }
        return;
    }
    let anchor = remaining[0];
    let rest = &remaining[1..];
    // Choose the rest of the anchor's cycle as a subset, then every
    // cyclic order with the anchor first (reversal symmetry included;
    // harmless for the maximum).
    for mask in 0u32..(1 << rest.len()) {
        if (mask.count_ones() as usize) < 2 {
            continue;
        }
        let members: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let left: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 0)
            .map(|(_, &v)| v)
            .collect();
        if left.len() == 1 || left.len() == 2 {
            continue;
        }
        let mut perm = members.clone();
        permute_orders(inst, anchor, &mut perm, 0, &left, cur, acc, best);
    }
}

#[allow(clippy::too_many_arguments)]
fn permute_orders(
    inst: &MetricInstance,
    anchor: usize,
    perm: &mut Vec<usize>,
    k: usize,
    left: &[usize],
    cur: &mut Vec<Vec<usize>>,
    acc: f64,
    best: &mut Option<(Vec<Vec<usize>>, f64)>,
) {
    if k == perm.len() {
        let mut cycle = vec![anchor];
        cycle.extend(perm.iter().copied());
        let m = cycle.len();
        let w: f64 = (0..m)
            .map(|i| inst.weight(cycle[i], cycle[(i + 1) % m]))
            .sum();
        cur.push(cycle);
        partition_cycles(inst, left, cur, acc + w, best);
        cur.pop();
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute_orders(inst, anchor, perm, k + 1, left, cur, acc, best);
        perm.swap(k, i);
    }
}

/// Optimum augmented-weight partial packing: at most `budget` components,
/// each a triangle or a single edge drawn from `allowed` edges, vertex
/// disjoint; augmented weight counts triangles once and edges twice.
/// Capped at 12 vertices.
pub fn exact_partial_packing(
    inst: &MetricInstance,
    allowed: &dyn Fn(usize, usize) -> bool,
    budget: usize,
) -> Result<f64> {
    let n = inst.n();
    if n > 12 {
        return Err(Error::SizeLimit(format!(
            "exact partial packing capped at 12 vertices, got {n}"
        )));
    }
    let mut best = 0.0f64;
    recurse_partial(
        inst,
        allowed,
        &mut vec![false; n],
        0,
        budget,
        0.0,
        &mut best,
    );
    Ok(best)
}

fn recurse_partial(
    inst: &MetricInstance,
    allowed: &dyn Fn(usize, usize) -> bool,
    used: &mut Vec<bool>,
    from: usize,
    budget: usize,
    acc: f64,
    best: &mut f64,
) {
    if acc > *best {
        *best = acc;
    }
    if budget == 0 {
        return;
    }
    let n = used.len();
    let first = match (from..n).find(|&v| !used[v]) {
        Some(v) => v,
        None => return,
    };
    // The lowest free vertex is either skipped for good or becomes part
    // of a new component.
    recurse_partial(inst, allowed, used, first + 1, budget, acc, best);
    used[first] = true;
    for b in first + 1..n {
        if used[b] || !allowed(first, b) {
            continue;
        }
        used[b] = true;
        recurse_partial(
            inst,
            allowed,
            used,
            first + 1,
            budget - 1,
            acc + 2.0 * inst.weight(first, b),
            best,
        );
        for c in b + 1..n {
            if used[c] || !allowed(first, c) || !allowed(b, c) {
                continue;
            }
            used[c] = true;
            recurse_partial(
                inst,
                allowed,
                used,
                first + 1,
                budget - 1,
                acc + inst.triangle_weight(first, b, c),
                best,
            );
            used[c] = false;
        }
        used[b] = false;
    }
    used[first] = false;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_euclidean, uniform_instance};

    #[test]
    fn packing_count_self_check() {
        // (n-1)(n-2)/2 choices for the first triangle, recursively:
        // n=6 -> 10, n=9 -> 280, n=12 -> 15400.
        assert_eq!(count_triangle_packings(6).unwrap(), 10);
        assert_eq!(count_triangle_packings(9).unwrap(), 280);
        assert_eq!(count_triangle_packings(12).unwrap(), 15400);
    }

    #[test]
    fn triangle_packing_on_uniform_metric() {
        let inst = uniform_instance(9, 2.0);
        let (_, w) = exact_triangle_packing(&inst).unwrap();
        assert!((w - 18.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_packing_beats_triangle_packing() {
        // A 2-factor can always copy the optimum triangle packing, so
        // its optimum weight dominates.
        for seed in 0..5 {
            let inst = gen_euclidean(6, seed);
            let (_, wc) = exact_cycle_packing(&inst).unwrap();
            let (_, wb) = exact_triangle_packing(&inst).unwrap();
            assert!(wc >= wb - 1e-9, "seed {seed}: {wc} < {wb}");
        }
    }

    #[test]
    fn cycle_packing_alternates_between_far_clusters() {
        // Two tight clusters far apart: the best 2-factor is a single
        // hexagon using only cross-cluster edges.
        let inst =
            crate::MetricInstance::from_fn(6, |i, j| if i / 3 == j / 3 { 1.0 } else { 10.0 });
        let (cycles, w) = exact_cycle_packing(&inst).unwrap();
        assert_eq!(cycles.len(), 1);
        assert!((w - 60.0).abs() < 1e-12);
    }

    #[test]
    fn matching_exact_size_infeasible() {
        assert!(exact_matching(4, &[(0, 1, 1.0)], Some(2)).is_err());
        let (m, w) = exact_matching(4, &[(0, 1, 1.0)], Some(1)).unwrap();
        assert_eq!(m.edges(), &[(0, 1)]);
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unconstrained_matching_can_leave_vertices_out() {
        // Negative edges are never picked without a size constraint.
        let (m, w) = exact_matching(4, &[(0, 1, -1.0), (2, 3, 2.0)], None).unwrap();
        assert_eq!(m.edges(), &[(2, 3)]);
        assert!((w - 2.0).abs() < 1e-12);
    }

    #[test]
    fn partial_packing_prefers_doubled_edges_when_heavy() {
        // One very heavy edge counted twice beats any triangle.
        let inst = crate::MetricInstance::from_fn(6, |i, j| {
            if (i, j) == (0, 1) || (j, i) == (0, 1) {
                5.0
            } else {
                1.0
            }
        });
        let w = exact_partial_packing(&inst, &|_, _| true, 1).unwrap();
        assert!((w - 10.0).abs() < 1e-12);
        let w2 = exact_partial_packing(&inst, &|_, _| true, 2).unwrap();
        assert!((w2 - 13.0).abs() < 1e-12);
    }
}
