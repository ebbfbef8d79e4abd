//! Classification of an optimum triangle packing's triangles relative to
//! a short cycle packing, and the derived normalized parameters used by
//! the ratio analysis.

use crate::instance::MetricInstance;
use crate::packing::{OrientedCyclePacking, TrianglePacking};
use crate::{Error, Result};

/// Coarse category of a triangle: how many of its edges connect vertices
/// of the same cycle (internal edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// All three edges internal.
    Internal,
    /// Exactly one internal edge; the opposite vertex is external.
    PartialExternal,
    /// No internal edge; all three vertices external.
    External,
}

/// Per-triangle structure relative to the cycle packing.
#[derive(Debug, Clone)]
pub struct TriangleInfo {
    pub category: Category,
    /// Vertices of the triangle incident to two of its external edges.
    pub external_vertices: Vec<usize>,
    /// Directed cycle edges leaving the external vertices.
    pub out_edges: Vec<(usize, usize)>,
}

/// Full classification of the packing's triangles.
#[derive(Debug, Clone)]
pub struct Classification {
    pub triangles: Vec<TriangleInfo>,
}

/// One of the five analysis classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    /// Internal triangles.
    B1,
    /// Type-1 partial-external triangles.
    B2,
    /// Type-2 partial-external triangles.
    B3,
    /// Type-1 external triangles.
    B4,
    /// Type-2 external triangles.
    B5,
}

impl Class {
    pub fn index(self) -> usize {
        match self {
            Class::B1 => 0,
            Class::B2 => 1,
            Class::B3 => 2,
            Class::B4 => 3,
            Class::B5 => 4,
        }
    }
}

/// Classifies every triangle of `b` against the cycles of `c`. An edge is
/// internal when both endpoints lie on the same cycle; a triangle with
/// exactly two internal edges is impossible (two shared cycles force the
/// third edge internal as well) and reported as a structural error.
pub fn classify(b: &TrianglePacking, c: &OrientedCyclePacking, n: usize) -> Result<Classification> {
    let cycle_of = c.vertex_map(n);
    let mut triangles = vec![];
    for t in b.triangles() {
        let internal: Vec<bool> = t
            .edges()
            .iter()
            .map(|&(u, v)| cycle_of[u] == cycle_of[v])
            .collect();
        let count = internal.iter().filter(|&&x| x).count();
        let category = match count {
            3 => Category::Internal,
            1 => Category::PartialExternal,
            0 => Category::External,
            _ => {
                return Err(Error::Structural(format!(
                    "triangle {:?} has exactly two internal edges",
                    t.vertices()
                )))
            }
        };
        let edges = t.edges();
        let mut external_vertices: Vec<usize> = t
            .vertices()
            .iter()
            .copied()
            .filter(|&v| {
                edges
                    .iter()
                    .zip(&internal)
                    .filter(|&(&(a, b2), &int)| !int && (a == v || b2 == v))
                    .count()
                    == 2
            })
            .collect();
        external_vertices.sort_unstable();
        let out_edges: Vec<(usize, usize)> = external_vertices
            .iter()
            .map(|&x| {
                let succ = c
                    .successor(x)
                    .ok_or_else(|| Error::Structural(format!("vertex {x} not on any cycle")))?;
                Ok((x, succ))
            })
            .collect::<Result<_>>()?;
        match category {
            Category::Internal => debug_assert!(out_edges.is_empty()),
            Category::PartialExternal => debug_assert_eq!(out_edges.len(), 1),
            Category::External => debug_assert_eq!(out_edges.len(), 3),
        }
        triangles.push(TriangleInfo {
            category,
            external_vertices,
            out_edges,
        });
    }
    Ok(Classification { triangles })
}

/// Refines a classification into the five classes. A partial-external or
/// external triangle is type-1 when every one of its out-edges is
/// strictly heavier than (1 - tau)/2 times the triangle weight; edges on
/// the boundary make it type-2.
pub fn type_split(
    inst: &MetricInstance,
    b: &TrianglePacking,
    cls: &Classification,
    tau: f64,
) -> Result<Vec<Class>> {
    check_tau(tau)?;
    let mut out = vec![];
    for (t, info) in b.triangles().iter().zip(&cls.triangles) {
        let wt = t.weight(inst);
        let type1 = !info.out_edges.is_empty()
            && info
                .out_edges
                .iter()
                .all(|&(x, y)| inst.weight(x, y) > 0.5 * (1.0 - tau) * wt);
        out.push(match (info.category, type1) {
            (Category::Internal, _) => Class::B1,
            (Category::PartialExternal, true) => Class::B2,
            (Category::PartialExternal, false) => Class::B3,
            (Category::External, true) => Class::B4,
            (Category::External, false) => Class::B5,
        });
    }
    Ok(out)
}

pub fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0 / 3.0).contains(&tau) {
        return Err(Error::InvalidParam(format!(
            "tau must lie in [0, 1/3], got {tau}"
        )));
    }
    Ok(())
}

/// Normalized per-class parameters of a classified packing. For class i,
/// `u` and `v` are the class sums of the lightest and the middle triangle
/// edge weight divided by the class sum of the heaviest; `alpha` is the
/// class weight share of w(B); `rho`, `sigma`, `theta` are the three edge
/// sums divided by w(B). Empty or zero-weight classes take the degenerate
/// values u = v = 1, rho = sigma = theta = alpha / 3.
#[derive(Debug, Clone)]
pub struct ClassParameters {
    pub u: [f64; 5],
    pub v: [f64; 5],
    pub alpha: [f64; 5],
    pub rho: [f64; 5],
    pub sigma: [f64; 5],
    pub theta: [f64; 5],
    pub w_b: f64,
}

pub fn parameters(
    inst: &MetricInstance,
    b: &TrianglePacking,
    classes: &[Class],
) -> Result<ClassParameters> {
    let w_b = b.weight(inst);
    if w_b <= 0.0 {
        return Err(Error::Infeasible("packing has nonpositive weight".into()));
    }
    let mut sum_a = [0.0; 5];
    let mut sum_b = [0.0; 5];
    let mut sum_c = [0.0; 5];
    for (t, &cls) in b.triangles().iter().zip(classes) {
        let roles = t.edge_roles(inst);
        let i = cls.index();
        sum_a[i] += inst.weight(roles[0].0, roles[0].1);
        sum_b[i] += inst.weight(roles[1].0, roles[1].1);
        sum_c[i] += inst.weight(roles[2].0, roles[2].1);
    }
    let mut p = ClassParameters {
        u: [1.0; 5],
        v: [1.0; 5],
        alpha: [0.0; 5],
        rho: [0.0; 5],
        sigma: [0.0; 5],
        theta: [0.0; 5],
        w_b,
    };
    for i in 0..5 {
        let wi = sum_a[i] + sum_b[i] + sum_c[i];
        p.alpha[i] = wi / w_b;
        if sum_c[i] > 0.0 {
            p.u[i] = sum_a[i] / sum_c[i];
            p.v[i] = sum_b[i] / sum_c[i];
            p.rho[i] = sum_a[i] / w_b;
            p.sigma[i] = sum_b[i] / w_b;
            p.theta[i] = sum_c[i] / w_b;
        } else {
            p.rho[i] = p.alpha[i] / 3.0;
            p.sigma[i] = p.alpha[i] / 3.0;
            p.theta[i] = p.alpha[i] / 3.0;
        }
    }
    Ok(p)
}
