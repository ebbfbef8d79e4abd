//! Shared combinatorial objects: triangles, packings, matchings, cycle packings.

use crate::instance::MetricInstance;
use crate::{Error, Result};

/// An unordered triple of distinct vertices, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    vertices: [usize; 3],
}

impl Triangle {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        assert!(
            a != b && b != c && a != c,
            "triangle needs distinct vertices"
        );
        let mut vertices = [a, b, c];
        vertices.sort_unstable();
        Triangle { vertices }
    }

    pub fn vertices(&self) -> [usize; 3] {
        self.vertices
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.vertices;
        [(a, b), (a, c), (b, c)]
    }

    pub fn weight(&self, inst: &MetricInstance) -> f64 {
        let [a, b, c] = self.vertices;
        inst.triangle_weight(a, b, c)
    }

    /// The three edges ordered by nondecreasing weight, ties broken
    /// lexicographically on the sorted endpoint pair. Index 0 is the
    /// lightest edge, index 2 the heaviest.
    pub fn edge_roles(&self, inst: &MetricInstance) -> [(usize, usize); 3] {
        let mut es = self.edges();
        es.sort_by(|&x, &y| {
            inst.weight(x.0, x.1)
                .partial_cmp(&inst.weight(y.0, y.1))
                .unwrap()
                .then(x.cmp(&y))
        });
        es
    }
}

/// A perfect triangle packing: n/3 vertex-disjoint triangles covering V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrianglePacking {
    triangles: Vec<Triangle>,
}

impl TrianglePacking {
    /// Builds a packing and checks disjointness + coverage against `n`.
    pub fn new(mut triangles: Vec<Triangle>, n: usize) -> Result<Self> {
        triangles.sort();
        let mut seen = vec![false; n];
        for t in &triangles {
            for v in t.vertices() {
                if v >= n || seen[v] {
                    return Err(Error::Structural(format!(
                        "triangle packing reuses or exceeds vertex {v}"
                    )));
                }
                seen[v] = true;
            }
        }
        if triangles.len() * 3 != n {
            return Err(Error::Structural(format!(
                "triangle packing covers {} of {} vertices",
                triangles.len() * 3,
                n
            )));
        }
        Ok(TrianglePacking { triangles })
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn weight(&self, inst: &MetricInstance) -> f64 {
        self.triangles.iter().map(|t| t.weight(inst)).sum()
    }

    /// Triangle index covering each vertex.
    pub fn vertex_map(&self, n: usize) -> Vec<usize> {
        let mut map = vec![usize::MAX; n];
        for (idx, t) in self.triangles.iter().enumerate() {
            for v in t.vertices() {
                map[v] = idx;
            }
        }
        map
    }
}

/// A set of vertex-disjoint edges, stored as sorted (u < v) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u == v || !seen.insert(u) || !seen.insert(v) {
                return Err(Error::Structural(format!(
                    "edge set is not a matching at ({u},{v})"
                )));
            }
        }
        Ok(Matching { edges })
    }

    pub fn empty() -> Self {
        Matching { edges: vec![] }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| a == v || b == v)
    }

    pub fn weight(&self, inst: &MetricInstance) -> f64 {
        self.edges.iter().map(|&(u, v)| inst.weight(u, v)).sum()
    }

    pub fn weight_by(&self, w: impl Fn(usize, usize) -> f64) -> f64 {
        self.edges.iter().map(|&(u, v)| w(u, v)).sum()
    }
}

/// Vertex-disjoint directed simple cycles (length >= 3) covering all vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedCyclePacking {
    cycles: Vec<Vec<usize>>,
}

impl OrientedCyclePacking {
    pub fn new(cycles: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for c in &cycles {
            if c.len() < 3 {
                return Err(Error::Structural(format!(
                    "cycle of length {} < 3",
                    c.len()
                )));
            }
            for &v in c {
                if v >= n || seen[v] {
                    return Err(Error::Structural(format!(
                        "cycle packing reuses or exceeds vertex {v}"
                    )));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Structural("cycle packing does not cover V".into()));
        }
        Ok(OrientedCyclePacking { cycles })
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Directed edges of every cycle, in cycle order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cycles
            .iter()
            .flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()])))
    }

    /// Cycle index containing each vertex.
    pub fn vertex_map(&self, n: usize) -> Vec<usize> {
        let mut map = vec![usize::MAX; n];
        for (idx, c) in self.cycles.iter().enumerate() {
            for &v in c {
                map[v] = idx;
            }
        }
        map
    }

    /// Successor of `v` on its (oriented) cycle.
    pub fn successor(&self, v: usize) -> Option<usize> {
        for c in &self.cycles {
            if let Some(pos) = c.iter().position(|&x| x == v) {
                return Some(c[(pos + 1) % c.len()]);
            }
        }
        None
    }

    pub fn weight(&self, inst: &MetricInstance) -> f64 {
        self.directed_edges().map(|(u, v)| inst.weight(u, v)).sum()
    }

    pub fn n_vertices(&self) -> usize {
        self.cycles.iter().map(|c| c.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::uniform_instance;

    #[test]
    fn packing_weight_on_uniform_metric() {
        let inst = uniform_instance(6, 1.0);
        let p =
            TrianglePacking::new(vec![Triangle::new(0, 1, 2), Triangle::new(3, 4, 5)], 6).unwrap();
        assert_eq!(p.weight(&inst), 6.0);
        assert_eq!(Matching::empty().weight(&inst), 0.0);
    }

    #[test]
    fn matching_rejects_shared_vertex() {
        assert!(Matching::new(vec![(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn edge_roles_order_by_weight_then_lex() {
        let inst = MetricInstance::from_fn(3, |i, j| if (i, j) == (0, 1) { 2.0 } else { 1.5 });
        let t = Triangle::new(0, 1, 2);
        let roles = t.edge_roles(&inst);
        assert_eq!(roles, [(0, 2), (1, 2), (0, 1)]);
    }

    #[test]
    fn packing_weight_additive_over_disjoint_unions() {
        let inst = crate::instance::gen_euclidean(9, 2);
        let t1 = Triangle::new(0, 1, 2);
        let t2 = Triangle::new(3, 4, 5);
        let t3 = Triangle::new(6, 7, 8);
        let p = TrianglePacking::new(vec![t1, t2, t3], 9).unwrap();
        let sum: f64 = [t1, t2, t3].iter().map(|t| t.weight(&inst)).sum();
        assert!((p.weight(&inst) - sum).abs() < 1e-12);
    }
}
