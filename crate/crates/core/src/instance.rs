//! Metric instances: storage, validation, file I/O, and random generators.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// A complete graph on `n` vertices with a symmetric, nonnegative,
/// (approximately) metric weight function. Vertices are dense 0-based ids.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    n: usize,
    w: Vec<f64>,
}

/// Outcome of a metric check. `worst` holds the triple with the largest
/// triangle-inequality violation, if any.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub ok: bool,
    /// (i, j, k): w(i,j) > w(i,k) + w(k,j) by `excess`.
    pub worst: Option<(usize, usize, usize)>,
    pub excess: f64,
}

impl MetricInstance {
    /// Builds an instance from a symmetric weight closure `get(i, j)`.
    /// Symmetry and a zero diagonal are enforced by construction; the
    /// metric property is not checked here (see [`MetricInstance::check_metric`]).
    pub fn from_fn(n: usize, get: impl Fn(usize, usize) -> f64) -> Self {
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = get(i, j);
                w[i * n + j] = v;
                w[j * n + i] = v;
            }
        }
        MetricInstance { n, w }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn max_weight(&self) -> f64 {
        self.w.iter().cloned().fold(0.0, f64::max)
    }

    /// Default comparison tolerance: 1e-9 scaled by the largest weight.
    pub fn tol(&self) -> f64 {
        1e-9 * self.max_weight()
    }

    /// Sum of weights of the three edges of triangle {x, y, z}.
    pub fn triangle_weight(&self, x: usize, y: usize, z: usize) -> f64 {
        self.weight(x, y) + self.weight(x, z) + self.weight(y, z)
    }

    /// Checks symmetry (structural), nonnegativity, and the triangle
    /// inequality within `tol`. Returns the worst offending triple.
    pub fn check_metric(&self, tol: f64) -> MetricReport {
        let mut worst = None;
        let mut excess = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                if self.weight(i, j) < 0.0 {
                    return MetricReport {
                        ok: false,
                        worst: Some((i, j, j)),
                        excess: -self.weight(i, j),
                    };
                }
                for k in 0..self.n {
                    if k == i || k == j {
                        continue;
                    }
                    let e = self.weight(i, j) - self.weight(i, k) - self.weight(k, j);
                    if e > excess {
                        excess = e;
                        worst = Some((i, j, k));
                    }
                }
            }
        }
        MetricReport {
            ok: excess <= tol,
            worst,
            excess,
        }
    }

    /// Validates the metric property, returning the worst violation as an error.
    pub fn validate(&self) -> Result<()> {
        let tol = self.tol();
        let report = self.check_metric(tol);
        if report.ok {
            return Ok(());
        }
        let (i, j, k) = report.worst.expect("violating triple");
        Err(Error::MetricViolation {
            i,
            j,
            k,
            wij: self.weight(i, j),
            detour: self.weight(i, k) + self.weight(k, j),
            tol,
        })
    }

    /// Serializes to the text instance format:
    /// `n <count>` followed by one `i j w` line per pair i < j.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n {}", self.n).unwrap();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                writeln!(s, "{} {} {:.17e}", i, j, self.weight(i, j)).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty instance file".into()))?;
        let mut parts = header.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some("n"), Some(count)) => {
                let n: usize = count
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad vertex count {count:?}")))?;
                let mut w = vec![0.0; n * n];
                let mut seen = 0usize;
                for line in lines {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != 3 {
                        return Err(Error::Parse(format!("bad edge line {line:?}")));
                    }
                    let i: usize = fields[0]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad vertex id {:?}", fields[0])))?;
                    let j: usize = fields[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad vertex id {:?}", fields[1])))?;
                    let wt: f64 = fields[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad weight {:?}", fields[2])))?;
                    if i >= n || j >= n || i == j {
                        return Err(Error::Parse(format!(
                            "edge ({i},{j}) out of range for n={n}"
                        )));
                    }
                    if wt < 0.0 {
                        return Err(Error::Parse(format!("negative weight on edge ({i},{j})")));
                    }
                    w[i * n + j] = wt;
                    w[j * n + i] = wt;
                    seen += 1;
                }
                let expected = n * (n - 1) / 2;
                if seen != expected {
                    return Err(Error::Parse(format!(
                        "expected {expected} edge lines for n={n}, found {seen}"
                    )));
                }
                Ok(MetricInstance { n, w })
            }
            _ => Err(Error::Parse(format!("bad header line {header:?}"))),
        }
    }

    /// Loads and validates an instance file. A non-metric file is an error;
    /// `n mod 3 != 0` is allowed here (oracle use) and rejected by the
    /// pipeline entry points instead.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let inst = Self::from_text(&text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Checks the pipeline entry precondition n >= 3, n divisible by 3.
    pub fn require_divisible(&self) -> Result<()> {
        if self.n < 3 || !self.n.is_multiple_of(3) {
            return Err(Error::InvalidParam(format!(
                "pipeline requires n >= 3 and n mod 3 = 0, got n = {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// `n` points uniform in the unit square, Euclidean distances.
pub fn gen_euclidean(n: usize, seed: u64) -> MetricInstance {
    assert!(n >= 3, "need n >= 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    MetricInstance::from_fn(n, |i, j| {
        let dx = points[i].0 - points[j].0;
        let dy = points[i].1 - points[j].1;
        (dx * dx + dy * dy).sqrt()
    })
}

/// Random connected weighted graph (a spanning tree plus random extra edges,
/// weights uniform in [0,1]) closed under all-pairs shortest paths.
pub fn gen_graph_metric(n: usize, density: f64, seed: u64) -> MetricInstance {
    assert!(n >= 3, "need n >= 3");
    assert!(density > 0.0 && density <= 1.0, "density must be in (0,1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inf = f64::INFINITY;
    let mut d = vec![inf; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    let add_edge = |d: &mut Vec<f64>, i: usize, j: usize, w: f64| {
        if w < d[i * n + j] {
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    };
    // Random spanning tree keeps the graph connected.
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    for idx in 1..n {
        let parent = perm[rng.gen_range(0..idx)];
        let w = rng.gen::<f64>();
        add_edge(&mut d, perm[idx], parent, w);
    }
    let target = ((density * (n * (n - 1)) as f64 / 2.0).ceil()) as usize;
    let mut have = n - 1;
    while have < target {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        if d[i * n + j].is_finite() {
            continue;
        }
        let w = rng.gen::<f64>();
        add_edge(&mut d, i, j, w);
        have += 1;
    }
    // Floyd-Warshall closure.
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    MetricInstance::from_fn(n, |i, j| d[i * n + j])
}

/// Uniform metric with every edge weight `c`.
pub fn uniform_instance(n: usize, c: f64) -> MetricInstance {
    MetricInstance::from_fn(n, |_, _| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_metric() {
        let inst = uniform_instance(6, 1.0);
        assert!(inst.check_metric(inst.tol()).ok);
        assert_eq!(inst.weight(1, 4), 1.0);
    }

    #[test]
    fn metric_violation_names_triple() {
        let inst = MetricInstance::from_fn(3, |i, j| if (i, j) == (0, 1) { 10.0 } else { 1.0 });
        let report = inst.check_metric(inst.tol());
        assert!(!report.ok);
        let (i, j, k) = report.worst.unwrap();
        assert_eq!((i.min(j), i.max(j)), (0, 1));
        assert_eq!(k, 2);
        assert!(inst.validate().is_err());
    }

    #[test]
    fn text_round_trip_is_identity() {
        let inst = gen_euclidean(12, 7);
        let back = MetricInstance::from_text(&inst.to_text()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn euclidean_deterministic_and_metric() {
        let a = gen_euclidean(9, 3);
        let b = gen_euclidean(9, 3);
        assert_eq!(a, b);
        assert!(a.check_metric(a.tol()).ok);
    }

    #[test]
    fn graph_metric_closure_is_metric() {
        for seed in 0..5 {
            let inst = gen_graph_metric(9, 0.5, seed);
            assert!(inst.check_metric(inst.tol()).ok, "seed {seed}");
        }
        // Full density: closure can only shrink weights below two-hop paths.
        let inst = gen_graph_metric(8, 1.0, 11);
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    assert!(inst.weight(i, j) <= inst.weight(i, k) + inst.weight(k, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn perturbed_tight_triple_fails_check() {
        let inst = gen_euclidean(9, 5);
        let tol = inst.tol();
        // Find a tight triple and push it just past the tolerance.
        let mut tight = None;
        let mut best_gap = f64::INFINITY;
        for i in 0..9 {
            for j in 0..9 {
                for k in 0..9 {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let gap = inst.weight(i, k) + inst.weight(k, j) - inst.weight(i, j);
                    if gap < best_gap {
                        best_gap = gap;
                        tight = Some((i, j));
                    }
                }
            }
        }
        let (i, j) = tight.unwrap();
        let bumped = MetricInstance::from_fn(9, |a, b| {
            let base = inst.weight(a, b);
            if (a, b) == (i.min(j), i.max(j)) {
                base + best_gap + 10.0 * tol * inst.max_weight().max(1.0)
            } else {
                base
            }
        });
        assert!(!bumped.check_metric(tol).ok);
    }
}
