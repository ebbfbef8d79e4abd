//! Third candidate packing: good triplets collected into a labeled
//! multigraph, a maximum augmented-weight matching Y*, a randomized cycle
//! matching X, conflict resolution, completion, and the two-phase
//! derandomization of X by conditional expectations.

use crate::classify::check_tau;
use crate::instance::MetricInstance;
use crate::pack1::{complete_partial, PartialPacking};
use crate::packing::{OrientedCyclePacking, Triangle, TrianglePacking};
use crate::{Error, Result};
use rand::Rng;
use std::collections::HashMap;

/// A labeled edge of the triplet multigraph H. The underlying good
/// triplet (x,y;z) has cycle edge xy and off-cycle vertex z; this edge
/// connects `z` to the attachment endpoint `attach` (x or y), with
/// `partner` the other endpoint of the cycle edge. The augmented weight
/// is w(xz) + w(yz).
#[derive(Debug, Clone, Copy)]
pub struct HEdge {
    pub attach: usize,
    pub partner: usize,
    pub z: usize,
    pub wtilde: f64,
}

impl HEdge {
    pub fn cycle_edge(&self) -> (usize, usize) {
        let (a, b) = (self.attach, self.partner);
        (a.min(b), a.max(b))
    }

    fn key(&self) -> (usize, usize) {
        let (a, b) = (self.attach, self.z);
        (a.min(b), a.max(b))
    }
}

/// The reduced triplet multigraph: parallel edges collapsed keeping the
/// largest augmented weight (ties broken by lexicographically smallest
/// (attach, partner, z)).
#[derive(Debug, Clone)]
pub struct TripletGraph {
    pub n: usize,
    pub edges: Vec<HEdge>,
}

/// Collects every good triplet (x,y;z): xy a cycle edge, z a vertex of a
/// different cycle, w(xy) <= (1 - tau) (w(xz) + w(yz)). Each good triplet
/// contributes the two labeled edges xz and yz.
pub fn build_triplet_graph(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
    tau: f64,
) -> Result<TripletGraph> {
    check_tau(tau)?;
    let n = inst.n();
    let cycle_of = c.vertex_map(n);
    let mut reduced: HashMap<(usize, usize), HEdge> = HashMap::new();
    let mut insert = |e: HEdge| {
        reduced
            .entry(e.key())
            .and_modify(|old| {
                let newer = (e.wtilde, old.attach, old.partner, old.z)
                    .partial_cmp(&(old.wtilde, e.attach, e.partner, e.z))
                    .unwrap()
                    .is_gt();
                if newer {
                    *old = e;
                }
            })
            .or_insert(e);
    };
    for (x, y) in c.directed_edges() {
        let wxy = inst.weight(x, y);
        for z in 0..n {
            if cycle_of[z] == cycle_of[x] {
                continue;
            }
            let wtilde = inst.weight(x, z) + inst.weight(y, z);
            if wxy <= (1.0 - tau) * wtilde {
                insert(HEdge {
                    attach: x,
                    partner: y,
                    z,
                    wtilde,
                });
                insert(HEdge {
                    attach: y,
                    partner: x,
                    z,
                    wtilde,
                });
            }
        }
    }
    let mut edges: Vec<HEdge> = reduced.into_values().collect();
    edges.sort_by_key(|e| e.key());
    Ok(TripletGraph { n, edges })
}

/// A matching in H, with labels retained.
#[derive(Debug, Clone)]
pub struct HMatching {
    pub edges: Vec<HEdge>,
}

impl HMatching {
    pub fn wtilde(&self) -> f64 {
        self.edges.iter().map(|e| e.wtilde).sum()
    }
}

/// Maximum augmented-weight matching Y* of the triplet graph, any size.
pub fn max_matching_h(g: &TripletGraph) -> HMatching {
    let raw: Vec<(usize, usize, f64)> = g
        .edges
        .iter()
        .map(|e| (e.key().0, e.key().1, e.wtilde))
        .collect();
    let mate = crate::blossom::max_weight_matching(g.n, &raw, false);
    let mut edges = vec![];
    for e in &g.edges {
        let (u, v) = e.key();
        if mate[u] == v {
            edges.push(*e);
        }
    }
    HMatching { edges }
}

/// Outcome of the phase-1 randomness for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleOutcome {
    /// Even cycle: the alternating matching at positions congruent to
    /// `offset` mod 2 goes to L.
    Even { offset: usize },
    /// Odd cycle: the edge at position `del` is deleted, position `r`
    /// (which determines the path matching containing it) goes to R and
    /// the rest of that matching to L.
    Odd { del: usize, r: usize },
}

/// A partially fixed draw: a prefix of phase-1 cycle outcomes, then
/// (once phase 1 is complete) a prefix of per-edge membership bits over
/// the canonical order of L.
#[derive(Debug, Clone, Default)]
pub struct XState {
    pub outcomes: Vec<CycleOutcome>,
    pub bits: Vec<bool>,
}

/// A fully drawn X: all cycle outcomes plus the chosen subset of L.
#[derive(Debug, Clone)]
pub struct XDraw {
    pub outcomes: Vec<CycleOutcome>,
    pub chosen: Vec<bool>,
}

/// Deterministic size of L and the selection quota floor(2|L|/3).
pub fn x_quota(c: &OrientedCyclePacking) -> (usize, usize) {
    let l_total: usize = c
        .cycles()
        .iter()
        .map(|cyc| {
            let k = cyc.len();
            if k % 2 == 0 {
                k / 2
            } else {
                (k - 3) / 2
            }
        })
        .sum();
    (l_total, 2 * l_total / 3)
}

// L and R positions of one cycle under a fixed outcome.
fn cycle_lr(k: usize, outcome: CycleOutcome) -> (Vec<usize>, Vec<usize>) {
    match outcome {
        CycleOutcome::Even { offset } => {
            debug_assert!(k.is_multiple_of(2) && offset < 2);
            ((0..k).filter(|p| p % 2 == offset).collect(), vec![])
        }
        CycleOutcome::Odd { del, r } => {
            debug_assert!(k % 2 == 1 && del < k && r != del);
            let path: Vec<usize> = (1..k).map(|i| (del + i) % k).collect();
            let ri = path
                .iter()
                .position(|&p| p == r)
                .expect("r must lie on the path");
            let matching: Vec<usize> = path
                .iter()
                .enumerate()
                .filter(|&(i, _)| i % 2 == ri % 2)
                .map(|(_, &p)| p)
                .collect();
            let mut l: Vec<usize> = matching.into_iter().filter(|&p| p != r).collect();
            l.sort_unstable();
            (l, vec![r])
        }
    }
}

/// All outcomes of one cycle with their probabilities.
pub fn cycle_outcomes(k: usize) -> Vec<(CycleOutcome, f64)> {
    if k.is_multiple_of(2) {
        vec![
            (CycleOutcome::Even { offset: 0 }, 0.5),
            (CycleOutcome::Even { offset: 1 }, 0.5),
        ]
    } else {
        let p = 1.0 / (k * (k - 1)) as f64;
        let mut out = vec![];
        for del in 0..k {
            for i in 1..k {
                out.push((
                    CycleOutcome::Odd {
                        del,
                        r: (del + i) % k,
                    },
                    p,
                ));
            }
        }
        out
    }
}

/// Samples the phase-1 outcomes and a uniform quota subset of L.
pub fn sample_x(c: &OrientedCyclePacking, rng: &mut impl Rng) -> XDraw {
    let outcomes: Vec<CycleOutcome> = c
        .cycles()
        .iter()
        .map(|cyc| {
            let k = cyc.len();
            if k % 2 == 0 {
                CycleOutcome::Even {
                    offset: rng.gen_range(0..2),
                }
            } else {
                let del = rng.gen_range(0..k);
                let path: Vec<usize> = (1..k).map(|i| (del + i) % k).collect();
                let parity = rng.gen_range(0..2usize);
                let matching: Vec<usize> = path
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i % 2 == parity)
                    .map(|(_, &p)| p)
                    .collect();
                let r = matching[rng.gen_range(0..matching.len())];
                CycleOutcome::Odd { del, r }
            }
        })
        .collect();
    let (l_total, q) = x_quota(c);
    let mut chosen = vec![false; l_total];
    if q > 0 {
        for i in rand::seq::index::sample(rng, l_total, q) {
            chosen[i] = true;
        }
    }
    XDraw { outcomes, chosen }
}

/// The realized X: its edges (chosen L plus all R), vertex coverage, and
/// bookkeeping sizes.
#[derive(Debug, Clone)]
pub struct XReal {
    pub edges: Vec<(usize, usize)>,
    pub covered: Vec<bool>,
    pub l_total: usize,
    pub quota: usize,
}

impl XReal {
    pub fn weight(&self, inst: &MetricInstance) -> f64 {
        self.edges.iter().map(|&(u, v)| inst.weight(u, v)).sum()
    }

    pub fn contains(&self, e: (usize, usize)) -> bool {
        let e = (e.0.min(e.1), e.0.max(e.1));
        self.edges.binary_search(&e).is_ok()
    }
}

/// Instantiates a full draw into the edge set X.
pub fn realize_x(c: &OrientedCyclePacking, draw: &XDraw, n: usize) -> Result<XReal> {
    if draw.outcomes.len() != c.cycles().len() {
        return Err(Error::InvalidParam("draw must fix every cycle".into()));
    }
    let (l_total, quota) = x_quota(c);
    if draw.chosen.len() != l_total || draw.chosen.iter().filter(|&&b| b).count() != quota {
        return Err(Error::InvalidParam(format!(
            "chosen subset must pick {quota} of {l_total} edges"
        )));
    }
    let mut edges = vec![];
    let mut li = 0;
    for (cyc, &outcome) in c.cycles().iter().zip(&draw.outcomes) {
        let k = cyc.len();
        let (l, r) = cycle_lr(k, outcome);
        for p in l {
            if draw.chosen[li] {
                let (u, v) = (cyc[p], cyc[(p + 1) % k]);
                edges.push((u.min(v), u.max(v)));
            }
            li += 1;
        }
        for p in r {
            let (u, v) = (cyc[p], cyc[(p + 1) % k]);
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    let mut covered = vec![false; n];
    for &(u, v) in &edges {
        if covered[u] || covered[v] {
            return Err(Error::Structural("realized X is not a matching".into()));
        }
        covered[u] = true;
        covered[v] = true;
    }
    Ok(XReal {
        edges,
        covered,
        l_total,
        quota,
    })
}

/// Y*_X: the Y* edges whose cycle edge lies in X and whose z is uncovered.
pub fn restrict_ystar(ystar: &HMatching, x: &XReal) -> Vec<HEdge> {
    ystar
        .edges
        .iter()
        .filter(|e| x.contains(e.cycle_edge()) && !x.covered[e.z])
        .copied()
        .collect()
}

/// Resolves conflicts in Y*_X. The only possible conflict is two edges
/// attached to the two endpoints of one X edge; the larger augmented
/// weight wins (lexicographic label tie-break). Anything else sharing a
/// vertex is a structural error.
pub fn resolve_conflicts(ystar_x: &[HEdge]) -> Result<Vec<HEdge>> {
    let mut by_cycle_edge: HashMap<(usize, usize), Vec<HEdge>> = HashMap::new();
    for e in ystar_x {
        by_cycle_edge.entry(e.cycle_edge()).or_default().push(*e);
    }
    let mut y = vec![];
    for (ce, mut group) in by_cycle_edge {
        match group.len() {
            1 => y.push(group[0]),
            2 => {
                group.sort_by(|a, b| {
                    b.wtilde
                        .partial_cmp(&a.wtilde)
                        .unwrap()
                        .then((a.attach, a.partner, a.z).cmp(&(b.attach, b.partner, b.z)))
                });
                y.push(group[0]);
            }
            k => {
                return Err(Error::Structural(format!(
                    "{k} restricted edges attach to cycle edge {ce:?}"
                )))
            }
        }
    }
    y.sort_by_key(|e| e.key());
    let mut seen = std::collections::HashSet::new();
    for e in &y {
        for v in [e.attach, e.partner, e.z] {
            if !seen.insert(v) {
                return Err(Error::Structural(format!(
                    "resolved triplets still share vertex {v}"
                )));
            }
        }
    }
    Ok(y)
}

/// The derandomization objective: f(X) = (tau/2) w~(Y*_X) + 2 w(X).
pub fn f_value(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
    ystar: &HMatching,
    tau: f64,
    draw: &XDraw,
) -> Result<f64> {
    let x = realize_x(c, draw, inst.n())?;
    let restricted = restrict_ystar(ystar, &x);
    let wt: f64 = restricted.iter().map(|e| e.wtilde).sum();
    Ok(tau / 2.0 * wt + 2.0 * x.weight(inst))
}

// Per-position status probabilities of one cycle in phase 1.
struct CycleProbs {
    // (p_l, p_r) per edge position.
    edges: Vec<(f64, f64)>,
    // (p_l, p_r, p_neither) per vertex position.
    verts: Vec<(f64, f64, f64)>,
}

fn cycle_probs(k: usize, outcome: Option<CycleOutcome>) -> CycleProbs {
    match outcome {
        Some(o) => {
            let (l, r) = cycle_lr(k, o);
            let mut edges = vec![(0.0, 0.0); k];
            for &p in &l {
                edges[p].0 = 1.0;
            }
            for &p in &r {
                edges[p].1 = 1.0;
            }
            let verts = (0..k)
                .map(|j| {
                    let (e1, e2) = (edges[(j + k - 1) % k], edges[j]);
                    let pl = e1.0 + e2.0;
                    let pr = e1.1 + e2.1;
                    (pl, pr, 1.0 - pl - pr)
                })
                .collect();
            CycleProbs { edges, verts }
        }
        None => {
            let (el, er, vl, vr) = if k.is_multiple_of(2) {
                (0.5, 0.0, 1.0, 0.0)
            } else {
                let kf = k as f64;
                ((kf - 3.0) / (2.0 * kf), 1.0 / kf, (kf - 3.0) / kf, 2.0 / kf)
            };
            CycleProbs {
                edges: vec![(el, er); k],
                verts: vec![(vl, vr, 1.0 - vl - vr); k],
            }
        }
    }
}

// Canonical layout of L and R once phase 1 is fully decided.
struct Layout {
    // Per cycle edge position: L index, R marker, or neither.
    edge_status: Vec<Vec<EStatus>>,
    // Per vertex: status of its covering edge, if any.
    vert_status: Vec<EStatus>,
    l_total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EStatus {
    L(usize),
    R,
    None,
}

fn layout(c: &OrientedCyclePacking, outcomes: &[CycleOutcome], n: usize) -> Layout {
    let mut edge_status = vec![];
    let mut vert_status = vec![EStatus::None; n];
    let mut li = 0;
    for (cyc, &o) in c.cycles().iter().zip(outcomes) {
        let k = cyc.len();
        let (l, r) = cycle_lr(k, o);
        let mut st = vec![EStatus::None; k];
        for p in l {
            st[p] = EStatus::L(li);
            li += 1;
        }
        for p in r {
            st[p] = EStatus::R;
        }
        for (p, &s) in st.iter().enumerate() {
            if s != EStatus::None {
                vert_status[cyc[p]] = s;
                vert_status[cyc[(p + 1) % k]] = s;
            }
        }
        edge_status.push(st);
    }
    Layout {
        edge_status,
        vert_status,
        l_total: li,
    }
}

/// Exact conditional expectation of f(X) given a partial state: a prefix
/// of phase-1 outcomes, or all of phase 1 plus a prefix of phase-2 bits.
pub fn conditional_expectation_f(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
    ystar: &HMatching,
    tau: f64,
    state: &XState,
) -> Result<f64> {
    check_tau(tau)?;
    let n = inst.n();
    let ncyc = c.cycles().len();
    let (l_total, q) = x_quota(c);
    let cycle_of = c.vertex_map(n);
    // Map each undirected cycle edge to (cycle, position).
    let mut pos_of: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (ci, cyc) in c.cycles().iter().enumerate() {
        let k = cyc.len();
        for p in 0..k {
            let (u, v) = (cyc[p], cyc[(p + 1) % k]);
            pos_of.insert((u.min(v), u.max(v)), (ci, p));
        }
    }
    if state.outcomes.len() < ncyc {
        if !state.bits.is_empty() {
            return Err(Error::InvalidParam(
                "phase-2 bits before phase 1 is complete".into(),
            ));
        }
        let probs: Vec<CycleProbs> = c
            .cycles()
            .iter()
            .enumerate()
            .map(|(ci, cyc)| cycle_probs(cyc.len(), state.outcomes.get(ci).copied()))
            .collect();
        let lf = l_total as f64;
        let qf = q as f64;
        let r_frac = if l_total > 0 { qf / lf } else { 0.0 };
        let pick_other = if l_total >= 2 {
            qf * (lf - qf) / (lf * (lf - 1.0))
        } else {
            0.0
        };
        let skip_other = if l_total > 0 { (lf - qf) / lf } else { 0.0 };
        let mut ex = 0.0;
        for (ci, cyc) in c.cycles().iter().enumerate() {
            let k = cyc.len();
            for p in 0..k {
                let (pl, pr) = probs[ci].edges[p];
                ex += 2.0 * inst.weight(cyc[p], cyc[(p + 1) % k]) * (pl * r_frac + pr);
            }
        }
        let mut ey = 0.0;
        for e in &ystar.edges {
            let (ci, p) = pos_of[&e.cycle_edge()];
            let (pl, pr) = probs[ci].edges[p];
            let zc = cycle_of[e.z];
            let zp = c.cycles()[zc].iter().position(|&v| v == e.z).unwrap();
            let (zl, _zr, zn) = probs[zc].verts[zp];
            ey += e.wtilde * (pl * (zl * pick_other + zn * r_frac) + pr * (zl * skip_other + zn));
        }
        return Ok(tau / 2.0 * ey + ex);
    }
    // Phase 2: everything about L and R is fixed; a prefix of membership
    // bits over the canonical L order is decided.
    let lay = layout(c, &state.outcomes, n);
    debug_assert_eq!(lay.l_total, l_total);
    let s = state.bits.len();
    if s > l_total {
        return Err(Error::InvalidParam("more bits than L edges".into()));
    }
    let ones = state.bits.iter().filter(|&&b| b).count();
    if ones > q || q - ones > l_total - s {
        return Err(Error::InvalidParam(
            "bit prefix cannot reach the quota".into(),
        ));
    }
    let m = (l_total - s) as f64;
    let qp = (q - ones) as f64;
    let edge_p = |st: EStatus| -> f64 {
        match st {
            EStatus::L(i) if i < s => {
                if state.bits[i] {
                    1.0
                } else {
                    0.0
                }
            }
            EStatus::L(_) => qp / m,
            EStatus::R => 1.0,
            EStatus::None => 0.0,
        }
    };
    let mut ex = 0.0;
    for (ci, cyc) in c.cycles().iter().enumerate() {
        let k = cyc.len();
        for p in 0..k {
            ex += 2.0 * inst.weight(cyc[p], cyc[(p + 1) % k]) * edge_p(lay.edge_status[ci][p]);
        }
    }
    let mut ey = 0.0;
    for e in &ystar.edges {
        let (ci, p) = pos_of[&e.cycle_edge()];
        let xs = lay.edge_status[ci][p];
        let zs = lay.vert_status[e.z];
        let prob = match (xs, zs) {
            (EStatus::None, _) | (_, EStatus::R) => 0.0,
            (EStatus::R, EStatus::None) => 1.0,
            (EStatus::R, EStatus::L(j)) => {
                if j < s {
                    if state.bits[j] {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    (m - qp) / m
                }
            }
            (EStatus::L(i), EStatus::None) => {
                if i < s {
                    if state.bits[i] {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    qp / m
                }
            }
            (EStatus::L(i), EStatus::L(j)) => match (i < s, j < s) {
                (true, true) => {
                    if state.bits[i] && !state.bits[j] {
                        1.0
                    } else {
                        0.0
                    }
                }
                (true, false) => {
                    if state.bits[i] {
                        (m - qp) / m
                    } else {
                        0.0
                    }
                }
                (false, true) => {
                    if state.bits[j] {
                        0.0
                    } else {
                        qp / m
                    }
                }
                (false, false) => qp * (m - qp) / (m * (m - 1.0)),
            },
        };
        ey += e.wtilde * prob;
    }
    Ok(tau / 2.0 * ey + ex)
}

/// Two-phase derandomization: fixes each cycle outcome, then each L bit,
/// to the choice maximizing the exact conditional expectation. The
/// resulting f(X) dominates E[f(X)] over the original distribution.
pub fn derandomize_x(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
    ystar: &HMatching,
    tau: f64,
) -> Result<XDraw> {
    let mut state = XState::default();
    for cyc in c.cycles() {
        let mut best: Option<(CycleOutcome, f64)> = None;
        for (o, _) in cycle_outcomes(cyc.len()) {
            state.outcomes.push(o);
            let val = conditional_expectation_f(inst, c, ystar, tau, &state)?;
            state.outcomes.pop();
            if best.as_ref().is_none_or(|b| val > b.1) {
                best = Some((o, val));
            }
        }
        state.outcomes.push(best.unwrap().0);
    }
    let (l_total, q) = x_quota(c);
    for _ in 0..l_total {
        let s = state.bits.len();
        let ones = state.bits.iter().filter(|&&b| b).count();
        let remaining = l_total - s;
        let need = q - ones;
        let bit = if need == 0 {
            false
        } else if need == remaining {
            true
        } else {
            state.bits.push(true);
            let v1 = conditional_expectation_f(inst, c, ystar, tau, &state)?;
            state.bits.pop();
            state.bits.push(false);
            let v0 = conditional_expectation_f(inst, c, ystar, tau, &state)?;
            state.bits.pop();
            v1 > v0
        };
        state.bits.push(bit);
    }
    Ok(XDraw {
        outcomes: state.outcomes,
        chosen: state.bits,
    })
}

/// Exhaustive expectation of f over every phase-1 outcome combination
/// and every quota subset of L. Exponential; guarded for desk-scale use.
pub fn exhaustive_expected_f(
    inst: &MetricInstance,
    c: &OrientedCyclePacking,
    ystar: &HMatching,
    tau: f64,
) -> Result<f64> {
    let (l_total, q) = x_quota(c);
    let combos: f64 = c
        .cycles()
        .iter()
        .map(|cyc| cycle_outcomes(cyc.len()).len() as f64)
        .product();
    if l_total > 16 || combos > 1e6 {
        return Err(Error::SizeLimit(format!(
            "exhaustive enumeration over {combos} outcomes and |L| = {l_total}"
        )));
    }
    let per_cycle: Vec<Vec<(CycleOutcome, f64)>> = c
        .cycles()
        .iter()
        .map(|cyc| cycle_outcomes(cyc.len()))
        .collect();
    let subsets: Vec<Vec<bool>> = (0..1u32 << l_total)
        .filter(|m| m.count_ones() as usize == q)
        .map(|m| (0..l_total).map(|i| m >> i & 1 == 1).collect())
        .collect();
    let mut total = 0.0;
    let mut stack: Vec<(Vec<CycleOutcome>, f64)> = vec![(vec![], 1.0)];
    while let Some((prefix, prob)) = stack.pop() {
        if prefix.len() == per_cycle.len() {
            for chosen in &subsets {
                let draw = XDraw {
                    outcomes: prefix.clone(),
                    chosen: chosen.clone(),
                };
                total += prob / subsets.len() as f64 * f_value(inst, c, ystar, tau, &draw)?;
            }
            continue;
        }
        for &(o, p) in &per_cycle[prefix.len()] {
            let mut next = prefix.clone();
            next.push(o);
            stack.push((next, prob * p));
        }
    }
    Ok(total)
}

/// Result of the third packing construction.
#[derive(Debug, Clone)]
pub struct T3Build {
    pub t3: TrianglePacking,
    /// Augmented weight of the unrestricted matching Y*.
    pub wtilde_ystar: f64,
    /// f(X) of the derandomized draw, a certified lower bound on w(T3).
    pub f_det: f64,
}

/// Builds T3: triplet graph, Y*, derandomized X, restriction and conflict
/// resolution, then completion of the triplets, the bare X edges and the
/// leftover vertices into a perfect packing.
pub fn build_t3(inst: &MetricInstance, c: &OrientedCyclePacking, tau: f64) -> Result<T3Build> {
    inst.require_divisible()?;
    let h = build_triplet_graph(inst, c, tau)?;
    let ystar = max_matching_h(&h);
    let draw = derandomize_x(inst, c, &ystar, tau)?;
    let x = realize_x(c, &draw, inst.n())?;
    let restricted = restrict_ystar(&ystar, &x);
    let w_restricted: f64 = restricted.iter().map(|e| e.wtilde).sum();
    let y = resolve_conflicts(&restricted)?;
    let w_y: f64 = y.iter().map(|e| e.wtilde).sum();
    if w_y < 0.5 * w_restricted - inst.tol() {
        return Err(Error::Structural(format!(
            "conflict resolution kept {w_y} of {w_restricted}"
        )));
    }
    let f_det = tau / 2.0 * w_restricted + 2.0 * x.weight(inst);
    let mut triangles = vec![];
    let mut used_cycle_edges: std::collections::HashSet<(usize, usize)> =
        std::collections::HashSet::new();
    for e in &y {
        triangles.push(Triangle::new(e.attach, e.partner, e.z));
        used_cycle_edges.insert(e.cycle_edge());
    }
    let bare: Vec<(usize, usize)> = x
        .edges
        .iter()
        .filter(|e| !used_cycle_edges.contains(e))
        .copied()
        .collect();
    let p = PartialPacking {
        triangles,
        edge_components: bare,
    };
    let t3 = complete_partial(inst, &p)?;
    if t3.weight(inst) < f_det - inst.tol() {
        return Err(Error::Structural(format!(
            "T3 weighs {} below its certificate {f_det}",
            t3.weight(inst)
        )));
    }
    Ok(T3Build {
        t3,
        wtilde_ystar: ystar.wtilde(),
        f_det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_euclidean, uniform_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture(n: usize, lens: &[usize], seed: u64) -> (MetricInstance, OrientedCyclePacking) {
        let inst = gen_euclidean(n, seed);
        let mut cycles = vec![];
        let mut v = 0;
        for &l in lens {
            cycles.push((v..v + l).collect());
            v += l;
        }
        assert_eq!(v, n);
        (inst, OrientedCyclePacking::new(cycles, n).unwrap())
    }

    #[test]
    fn uniform_metric_makes_every_triplet_good() {
        let inst = uniform_instance(9, 1.0);
        let c = OrientedCyclePacking::new(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7, 8]], 9).unwrap();
        let h = build_triplet_graph(&inst, &c, 0.25).unwrap();
        // Every (cycle-edge endpoint, off-cycle z) pair appears: 4 edges
        // with 5 off-cycle vertices each plus 5 edges with 4, both
        // endpoints each, reduced over parallel labels.
        let mut expected = std::collections::HashSet::new();
        let cycle_of = c.vertex_map(9);
        for (x, y) in c.directed_edges() {
            for z in 0..9 {
                if cycle_of[z] != cycle_of[x] {
                    expected.insert((x.min(z), x.max(z)));
                    expected.insert((y.min(z), y.max(z)));
                }
            }
        }
        assert_eq!(h.edges.len(), expected.len());
        assert!(h.edges.iter().all(|e| (e.wtilde - 2.0).abs() < 1e-12));
    }

    #[test]
    fn quota_and_sample_sizes() {
        let (_, c) = fixture(12, &[3, 4, 5], 800);
        let (l, q) = x_quota(&c);
        assert_eq!(l, 3);
        assert_eq!(q, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let draw = sample_x(&c, &mut rng);
            let x = realize_x(&c, &draw, 12).unwrap();
            // Two odd cycles contribute an R edge each.
            assert_eq!(x.edges.len(), q + 2);
        }
    }

    #[test]
    fn conditional_expectation_obeys_total_expectation() {
        let (inst, c) = fixture(12, &[3, 4, 5], 801);
        let h = build_triplet_graph(&inst, &c, 0.25).unwrap();
        let ystar = max_matching_h(&h);
        let tau = 0.25;
        let root = conditional_expectation_f(&inst, &c, &ystar, tau, &XState::default()).unwrap();
        // Phase-1 first decision.
        let mut acc = 0.0;
        for (o, p) in cycle_outcomes(3) {
            let state = XState {
                outcomes: vec![o],
                bits: vec![],
            };
            acc += p * conditional_expectation_f(&inst, &c, &ystar, tau, &state).unwrap();
        }
        assert!((acc - root).abs() < 1e-9, "{acc} vs {root}");
        // Phase-2 first bit under some complete phase 1.
        let outcomes: Vec<CycleOutcome> = c
            .cycles()
            .iter()
            .map(|cyc| cycle_outcomes(cyc.len())[0].0)
            .collect();
        let base = XState {
            outcomes: outcomes.clone(),
            bits: vec![],
        };
        let e0 = conditional_expectation_f(&inst, &c, &ystar, tau, &base).unwrap();
        let (l, q) = x_quota(&c);
        let mut acc = 0.0;
        for b in [true, false] {
            let p = if b {
                q as f64 / l as f64
            } else {
                1.0 - q as f64 / l as f64
            };
            let state = XState {
                outcomes: outcomes.clone(),
                bits: vec![b],
            };
            acc += p * conditional_expectation_f(&inst, &c, &ystar, tau, &state).unwrap();
        }
        assert!((acc - e0).abs() < 1e-9, "{acc} vs {e0}");
    }

    #[test]
    fn root_expectation_matches_exhaustive_enumeration() {
        for (n, lens, seed) in [(9usize, [4usize, 5].as_slice(), 810), (12, &[3, 4, 5], 811)] {
            let (inst, c) = fixture(n, lens, seed);
            let h = build_triplet_graph(&inst, &c, 0.25).unwrap();
            let ystar = max_matching_h(&h);
            let want = exhaustive_expected_f(&inst, &c, &ystar, 0.25).unwrap();
            let got =
                conditional_expectation_f(&inst, &c, &ystar, 0.25, &XState::default()).unwrap();
            assert!((got - want).abs() < 1e-9, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn derandomized_draw_dominates_expectation() {
        for (n, lens, seed) in [(9usize, [4usize, 5].as_slice(), 820), (12, &[5, 7], 821)] {
            let (inst, c) = fixture(n, lens, seed);
            let h = build_triplet_graph(&inst, &c, 0.25).unwrap();
            let ystar = max_matching_h(&h);
            let draw = derandomize_x(&inst, &c, &ystar, 0.25).unwrap();
            let f_det = f_value(&inst, &c, &ystar, 0.25, &draw).unwrap();
            let e_f =
                conditional_expectation_f(&inst, &c, &ystar, 0.25, &XState::default()).unwrap();
            assert!(f_det >= e_f - 1e-9, "n={n}: {f_det} < {e_f}");
            // The fully decided state evaluates to f itself.
            let full = XState {
                outcomes: draw.outcomes.clone(),
                bits: draw.chosen.clone(),
            };
            let cond = conditional_expectation_f(&inst, &c, &ystar, 0.25, &full).unwrap();
            assert!((cond - f_det).abs() < 1e-9);
        }
    }

    #[test]
    fn t3_meets_its_certificates() {
        for seed in 0..5 {
            let inst = gen_euclidean(12, 830 + seed);
            let copt = crate::cyclepack::max_weight_cycle_packing(&inst).unwrap();
            let params = crate::cyclepack::ShortCycleParams::new(0.2).unwrap();
            let c = crate::cyclepack::split_to_short(&inst, &copt, params).unwrap();
            let tau = 0.25;
            let b = build_t3(&inst, &c, tau).unwrap();
            assert!(b.t3.weight(&inst) >= b.f_det - 1e-9);
            assert!(
                b.f_det >= tau / 18.0 * b.wtilde_ystar + 2.0 / 3.0 * c.weight(&inst) - 1e-9,
                "seed {seed}: f_det {} vs paper bound",
                b.f_det
            );
        }
    }
}
