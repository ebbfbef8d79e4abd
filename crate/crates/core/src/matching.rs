//! Matching engine front-end: weighted graphs plus the three matching
//! operations the pipeline needs (unconstrained, perfect, fixed size).

use crate::blossom::{self, UNMATCHED};
use crate::packing::Matching;
use crate::{Error, Result};

/// An undirected weighted graph without self-loops. Parallel edges are
/// collapsed on insertion, keeping the heaviest weight.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, edges: vec![] }
    }

    /// Builds a graph from an edge list in one pass.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut g = WeightedGraph::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    /// Complete graph on the instance's vertices.
    pub fn complete(inst: &crate::MetricInstance) -> Self {
        let n = inst.n();
        WeightedGraph::from_edges(
            n,
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j, 0.0)))
                .map(|(i, j, _)| (i, j, inst.weight(i, j))),
        )
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u},{v})");
        let (u, v) = (u.min(v), u.max(v));
        if let Some(e) = self.edges.iter_mut().find(|e| e.0 == u && e.1 == v) {
            if w > e.2 {
                e.2 = w;
            }
        } else {
            self.edges.push((u, v, w));
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    fn sorted_edges(&self) -> Vec<(usize, usize, f64)> {
        let mut es = self.edges.clone();
        es.sort_by_key(|a| (a.0, a.1));
        es
    }
}

fn mate_to_matching(mate: &[usize]) -> Matching {
    let edges: Vec<(usize, usize)> = mate
        .iter()
        .enumerate()
        .filter(|&(v, &m)| m != UNMATCHED && v < m)
        .map(|(v, &m)| (v, m))
        .collect();
    Matching::new(edges).expect("blossom output is a matching")
}

/// Maximum weight matching (no cardinality constraint).
pub fn max_weight_matching(g: &WeightedGraph) -> Matching {
    let mate = blossom::max_weight_matching(g.n(), &g.sorted_edges(), false);
    mate_to_matching(&mate)
}

/// Maximum weight perfect matching. Errors if none exists.
pub fn max_weight_perfect_matching(g: &WeightedGraph) -> Result<Matching> {
    if !g.n().is_multiple_of(2) {
        return Err(Error::Infeasible(format!(
            "no perfect matching on {} vertices",
            g.n()
        )));
    }
    let mate = blossom::max_weight_matching(g.n(), &g.sorted_edges(), true);
    if mate.contains(&UNMATCHED) {
        return Err(Error::Infeasible("graph has no perfect matching".into()));
    }
    Ok(mate_to_matching(&mate))
}

/// Maximum weight matching of exactly `k` edges, via reduction: add
/// n - 2k dummy vertices joined to every real vertex with weight 0 and
/// solve the perfect matching problem on the extended graph.
pub fn max_weight_matching_of_size(g: &WeightedGraph, k: usize) -> Result<Matching> {
    let n = g.n();
    if 2 * k > n {
        return Err(Error::Infeasible(format!(
            "matching of size {k} needs {} vertices, have {n}",
            2 * k
        )));
    }
    let ndummy = n - 2 * k;
    let mut edges = g.sorted_edges();
    for d in 0..ndummy {
        for v in 0..n {
            edges.push((v, n + d, 0.0));
        }
    }
    let mate = blossom::max_weight_matching(n + ndummy, &edges, true);
    if mate.contains(&UNMATCHED) {
        return Err(Error::Infeasible(format!("no matching of size {k} exists")));
    }
    let real: Vec<(usize, usize)> = mate
        .iter()
        .enumerate()
        .filter(|&(v, &m)| v < m && m < n)
        .map(|(v, &m)| (v, m))
        .collect();
    if real.len() != k {
        return Err(Error::Infeasible(format!(
            "graph admits only {} of the requested {k} edges",
            real.len()
        )));
    }
    Matching::new(real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::instance::gen_euclidean;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> WeightedGraph {
        let mut g = WeightedGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.6) {
                    g.add_edge(i, j, rng.gen_range(0.0..10.0));
                }
            }
        }
        g
    }

    #[test]
    fn parallel_edges_keep_heaviest() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 0, 3.0);
        g.add_edge(0, 1, 2.0);
        assert_eq!(g.edges(), &[(0, 1, 3.0)]);
    }

    #[test]
    fn matches_exact_oracle_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..60 {
            let n = 2 + round % 9;
            let g = random_graph(n, &mut rng);
            let got = max_weight_matching(&g).weight_by(|u, v| {
                g.edges()
                    .iter()
                    .find(|e| (e.0, e.1) == (u, v))
                    .map(|e| e.2)
                    .unwrap()
            });
            let want = exact::exact_matching(n, g.edges(), None).unwrap().1;
            assert!(
                (got - want).abs() < 1e-9,
                "n={n} round={round}: got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn perfect_matching_on_complete_instance() {
        let inst = gen_euclidean(8, 5);
        let g = WeightedGraph::complete(&inst);
        let m = max_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.len(), 4);
        let want = exact::exact_matching(8, g.edges(), Some(4)).unwrap().1;
        assert!((m.weight(&inst) - want).abs() < 1e-9);
    }

    #[test]
    fn perfect_matching_infeasible_without_edges() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.0)]);
        assert!(max_weight_perfect_matching(&g).is_err());
    }

    #[test]
    fn fixed_size_matching_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..40 {
            let n = 4 + round % 6;
            let g = random_graph(n, &mut rng);
            for k in 0..=n / 2 {
                let got = max_weight_matching_of_size(&g, k);
                let want = exact::exact_matching(n, g.edges(), Some(k));
                match (got, want) {
                    (Ok(m), Ok((_, wexact))) => {
                        assert_eq!(m.len(), k);
                        let w = m.weight_by(|u, v| {
                            g.edges()
                                .iter()
                                .find(|e| (e.0, e.1) == (u, v))
                                .map(|e| e.2)
                                .unwrap()
                        });
                        assert!(
                            (w - wexact).abs() < 1e-9,
                            "n={n} k={k}: got {w}, oracle {wexact}"
                        );
                    }
                    (Err(_), Err(_)) => {}
                    (g, w) => panic!("n={n} k={k}: solver {g:?} oracle {w:?}"),
                }
            }
        }
    }
}
