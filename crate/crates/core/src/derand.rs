//! Deterministic cut engines.
//!
//! * [`erdos_selfridge_2cut`]: conditional expectations with undetermined
//!   vertices, guaranteeing excess `|W| / 2^k`.
//! * [`greedy_order_cut`]: the vertex-by-vertex greedy cut of a weighted graph.
//! * [`combine_partial_cuts`]: glues partial cuts on disjoint vertex sets,
//!   choosing each part's orientation by exact conditional expectation.
//! * [`flip_local_search`] and [`local_search`]: single-vertex improvement.
//!
//! Every engine checks its own promise before returning and reports a
//! [`Error::GuaranteeViolation`] if the arithmetic ever disagrees with itself.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cutspace::{expected_size_2, multicolour_probability_2, partial_average_excess_2, Cut, PartialCut};
use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::hypergraph::Hypergraph;
use crate::reduce::WeightedGraph;

/// Record of a [`greedy_order_cut`] run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyLedger {
    pub order: Vec<usize>,
    /// `d_<(v)`: weight from `v` to earlier vertices, indexed like `order`.
    pub back_degrees: Vec<Dyadic>,
    /// `|e_A(v) - e_B(v)| / 2`, indexed like `order`.
    pub gains: Vec<Dyadic>,
    /// Cut weight minus half the total weight; equals the sum of gains.
    pub realized_excess: Dyadic,
}

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(Error::InvalidVertex { vertex: v, n });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidParams(format!("vertex {v} repeated in order")));
        }
    }
    Ok(())
}

/// Greedy 2-cut: each vertex, in order, joins the side with less weight to
/// the vertices already placed. Part 0 plays `A`, part 1 plays `B`; when
/// `e_A(v) >= e_B(v)` the vertex goes to `B`.
///
/// `order` must list distinct vertices and include every vertex with
/// positive incident weight; unlisted (isolated) vertices stay in part 0.
pub fn greedy_order_cut(g: &WeightedGraph, order: &[usize]) -> Result<(Cut, GreedyLedger)> {
    let n = g.n();
    check_order(n, order)?;
    let mut placed: Vec<Option<usize>> = vec![None; n];
    let mut back_degrees = Vec::with_capacity(order.len());
    let mut gains = Vec::with_capacity(order.len());
    for &v in order {
        let (mut ea, mut eb) = (Dyadic::zero(), Dyadic::zero());
        for (u, w) in g.neighbors(v) {
            match placed[u] {
                Some(0) => ea += w,
                Some(_) => eb += w,
                None => {}
            }
        }
        let side = if ea >= eb { 1 } else { 0 };
        placed[v] = Some(side);
        gains.push((&ea - &eb).abs().half());
        back_degrees.push(ea + eb);
    }
    for v in 0..n {
        if placed[v].is_none() && g.neighbors(v).next().is_some() {
            return Err(Error::InvalidParams(format!("order omits non-isolated vertex {v}")));
        }
    }
    let cut = Cut::new(2, placed.into_iter().map(|p| p.unwrap_or(0)).collect())?;
    let realized_excess: Dyadic = gains.iter().sum();
    let measured = g.cut_excess(cut.parts());
    if measured != realized_excess {
        return Err(Error::GuaranteeViolation(format!(
            "greedy cut excess {measured} differs from summed gains {realized_excess}"
        )));
    }
    Ok((cut, GreedyLedger { order: order.to_vec(), back_degrees, gains, realized_excess }))
}

/// Flips single vertices of a 2-cut while a flip strictly increases the cut
/// weight. On return every vertex has at least half its incident weight
/// crossing.
pub fn flip_local_search(g: &WeightedGraph, start: &Cut) -> Cut {
    assert_eq!(start.r(), 2, "flip_local_search works on 2-cuts");
    let mut cut = start.clone();
    loop {
        let mut improved = false;
        for v in 0..g.n() {
            let (mut same, mut cross) = (Dyadic::zero(), Dyadic::zero());
            for (u, w) in g.neighbors(v) {
                if cut.part(u) == cut.part(v) {
                    same += w;
                } else {
                    cross += w;
                }
            }
            if same > cross {
                cut.set(v, 1 - cut.part(v));
                improved = true;
            }
        }
        if !improved {
            return cut;
        }
    }
}

/// Moves single vertices between any parts of an `r`-cut while a move
/// strictly increases the number of multicoloured edges.
pub fn local_search(h: &Hypergraph, start: &Cut) -> Cut {
    let r = start.r();
    let inc = h.incidence();
    let mut cut = start.clone();
    let mut counts: Vec<Vec<u32>> = h
        .edges()
        .iter()
        .map(|e| {
            let mut c = vec![0u32; r];
            for &v in e {
                c[cut.part(v)] += 1;
            }
            c
        })
        .collect();
    loop {
        let mut improved = false;
        for v in 0..h.n() {
            let from = cut.part(v);
            let mut best = (0i64, from);
            for to in (0..r).filter(|&p| p != from) {
                let mut gain = 0i64;
                for &e in &inc[v] {
                    let c = &counts[e];
                    let before = c.iter().all(|&x| x > 0);
                    let after = c.iter().enumerate().all(|(p, &x)| {
                        let x = x as i64 - i64::from(p == from) + i64::from(p == to);
                        x > 0
                    });
                    gain += i64::from(after) - i64::from(before);
                }
                if gain > best.0 {
                    best = (gain, to);
                }
            }
            if best.0 > 0 {
                let to = best.1;
                for &e in &inc[v] {
                    counts[e][from] -= 1;
                    counts[e][to] += 1;
                }
                cut.set(v, to);
                improved = true;
            }
        }
        if !improved {
            return cut;
        }
    }
}

/// `W`: vertices among the first two, in `order`, of some edge of size >= 3.
pub fn w_set(h: &Hypergraph, order: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; h.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut member = vec![false; h.n()];
    for e in h.edges().iter().filter(|e| e.len() >= 3) {
        let mut by_pos: Vec<usize> = e.clone();
        by_pos.sort_by_key(|&v| pos[v]);
        member[by_pos[0]] = true;
        member[by_pos[1]] = true;
    }
    (0..h.n()).filter(|&v| member[v]).collect()
}

/// One step of [`erdos_selfridge_2cut`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsStep {
    pub vertex: usize,
    /// `E Z_v`: expected size before the step.
    pub expectation: Dyadic,
    /// Maximum conditional expectation over assignments of `U ∪ {v}`.
    pub best: Dyadic,
    /// `U`: undetermined vertices before the step.
    pub pending: Vec<usize>,
    /// `U_v`: undetermined vertices sharing an uncertain edge with `v`.
    pub deferred: Vec<usize>,
    /// Parts fixed at this step (empty when `v` became undetermined).
    pub fixed: Vec<(usize, usize)>,
}

impl EsStep {
    pub fn undetermined(&self) -> bool {
        self.fixed.is_empty()
    }
}

/// Record of an [`erdos_selfridge_2cut`] run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsLedger {
    pub order: Vec<usize>,
    /// `D`: vertices determined at their own step.
    pub determined: Vec<usize>,
    /// `|U_v|` per step.
    pub deferred_counts: Vec<usize>,
    pub w_set: Vec<usize>,
    /// The `k` in `2^k`: largest edge size (at least 2).
    pub k: usize,
    /// `(|D| + Σ|U_v|) / 2^k`.
    pub guaranteed_excess: Dyadic,
    pub initial_expectation: Dyadic,
    pub final_expectation: Dyadic,
    pub realized_excess: Dyadic,
    /// Undetermined vertices left at the end, placed in part 0.
    pub leftover: Vec<usize>,
    pub steps: Vec<EsStep>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Unseen,
    Undetermined,
    Fixed(usize),
}

struct EdgeCounts {
    size: usize,
    hit: [usize; 2],
}

impl EdgeCounts {
    fn prob(&self) -> Dyadic {
        self.prob_with(&[])
    }

    /// Probability with some extra free vertices assigned.
    fn prob_with(&self, extra: &[usize]) -> Dyadic {
        let mut hit = self.hit;
        for &p in extra {
            hit[p] += 1;
        }
        let free = self.size - hit[0] - hit[1];
        multicolour_probability_2(hit[0] > 0, hit[1] > 0, free)
    }

    fn uncertain(&self) -> bool {
        let p = self.prob();
        !p.is_zero() && p != Dyadic::one()
    }
}

fn violation(msg: String) -> Error {
    Error::GuaranteeViolation(msg)
}

/// Conditional expectations with undetermined vertices.
///
/// Walks `order`; at each vertex `v` it maximizes the conditional expected
/// cut size over assignments of `U ∪ {v}` using the factorization that no
/// uncertain edge holds two undetermined vertices: `v`'s two choices are
/// tried, and for each, every `u ∈ U_v` picks its best part independently.
/// Vertices of `U \ U_v` do not affect the value. Ties go to the smallest
/// part for `v`, then for each `u`. Leftover undetermined vertices go to
/// part 0.
pub fn erdos_selfridge_2cut(h: &Hypergraph, order: &[usize]) -> Result<(Cut, EsLedger)> {
    let n = h.n();
    check_order(n, order)?;
    if order.len() != n {
        return Err(Error::InvalidParams(format!("order has {} vertices, expected {n}", order.len())));
    }
    let inc = h.incidence();
    let mut edges: Vec<EdgeCounts> = h.edges().iter().map(|e| EdgeCounts { size: e.len(), hit: [0, 0] }).collect();
    let mut state = vec![State::Unseen; n];
    let mut pending: BTreeSet<usize> = BTreeSet::new();
    let k = h.max_edge_size().max(2);
    let unit = (k - 1) as u32;

    let initial_expectation = expected_size_2(h);
    let mut expectation = initial_expectation.clone();
    let mut steps = Vec::with_capacity(n);
    let mut determined = Vec::new();
    let mut deferred_counts = Vec::with_capacity(n);

    for &v in order {
        // Uncertain edges through v, split by the undetermined vertex they hold.
        let mut own: Vec<usize> = Vec::new();
        let mut shared: Vec<(usize, usize)> = Vec::new();
        for &e in &inc[v] {
            if !edges[e].uncertain() {
                continue;
            }
            let mut und = h.edge(e).iter().copied().filter(|&u| state[u] == State::Undetermined);
            match (und.next(), und.next()) {
                (None, _) => own.push(e),
                (Some(u), None) => shared.push((u, e)),
                (Some(_), Some(_)) => {
                    return Err(violation(format!("uncertain edge {e} holds two undetermined vertices")))
                }
            }
        }
        let deferred: Vec<usize> = shared.iter().map(|&(u, _)| u).collect::<BTreeSet<_>>().into_iter().collect();

        let mut value = [Dyadic::zero(), Dyadic::zero()];
        for &e in &own {
            let base = edges[e].prob();
            for a in 0..2 {
                value[a] += edges[e].prob_with(&[a]) - &base;
            }
        }
        // choice[a][j]: best part of deferred[j] when v takes part a.
        let mut choice = [vec![0usize; deferred.len()], vec![0usize; deferred.len()]];
        for (j, &u) in deferred.iter().enumerate() {
            let mut bucket = [Dyadic::zero(), Dyadic::zero()];
            for &e in &inc[u] {
                if h.edge(e).binary_search(&v).is_ok() || !edges[e].uncertain() {
                    continue;
                }
                if h.edge(e).iter().any(|&w| w != u && state[w] == State::Undetermined) {
                    return Err(violation(format!("uncertain edge {e} holds two undetermined vertices")));
                }
                let base = edges[e].prob();
                for b in 0..2 {
                    bucket[b] += edges[e].prob_with(&[b]) - &base;
                }
            }
            for a in 0..2 {
                let mut opt = [bucket[0].clone(), bucket[1].clone()];
                for &(w, e) in shared.iter().filter(|&&(w, _)| w == u) {
                    debug_assert_eq!(w, u);
                    let base = edges[e].prob();
                    for b in 0..2 {
                        opt[b] += edges[e].prob_with(&[a, b]) - &base;
                    }
                }
                let b = if opt[0] >= opt[1] { 0 } else { 1 };
                choice[a][j] = b;
                value[a] += &opt[b];
            }
        }
        let a = if value[0] >= value[1] { 0 } else { 1 };
        let gain = value[a].clone();
        if gain.is_negative() {
            return Err(violation(format!("step {v}: best assignment {gain} below the average")));
        }
        let lower = Dyadic::from_int(deferred.len() as i64) * Dyadic::pow2(-(unit as i32));
        if gain < lower {
            return Err(violation(format!("step {v}: gain {gain} below |U_v|/2^(k-1) = {lower}")));
        }

        let step_pending: Vec<usize> = pending.iter().copied().collect();
        let mut fixed = Vec::new();
        if gain.is_zero() {
            state[v] = State::Undetermined;
            pending.insert(v);
        } else {
            fixed.push((v, a));
            for (j, &u) in deferred.iter().enumerate() {
                fixed.push((u, choice[a][j]));
            }
            for &(x, p) in &fixed {
                state[x] = State::Fixed(p);
                pending.remove(&x);
                for &e in &inc[x] {
                    edges[e].hit[p] += 1;
                }
            }
            determined.push(v);
        }
        let before = expectation.clone();
        expectation += &gain;
        if !expectation.is_multiple_of_pow2_inv(unit) {
            return Err(violation(format!("expectation {expectation} is not a multiple of 1/2^{unit}")));
        }
        deferred_counts.push(deferred.len());
        steps.push(EsStep { vertex: v, expectation: before, best: expectation.clone(), pending: step_pending, deferred, fixed });
    }

    let leftover: Vec<usize> = pending.into_iter().collect();
    let parts = state.iter().map(|s| if let State::Fixed(p) = s { *p } else { 0 }).collect();
    let cut = Cut::new(2, parts)?;
    let size = Dyadic::from_int(cut.size(h) as i64);
    if size != expectation {
        return Err(violation(format!("final cut size {size} differs from the final expectation {expectation}")));
    }
    let w = w_set(h, order);
    let credit = determined.len() + deferred_counts.iter().sum::<usize>();
    if credit < w.len() {
        return Err(violation(format!("|D| + Σ|U_v| = {credit} is below |W| = {}", w.len())));
    }
    let guaranteed_excess = Dyadic::from_int(credit as i64) * Dyadic::pow2(-(k as i32));
    let realized_excess = &size - &initial_expectation;
    if realized_excess < guaranteed_excess {
        return Err(violation(format!("excess {realized_excess} is below the guarantee {guaranteed_excess}")));
    }
    let ledger = EsLedger {
        order: order.to_vec(),
        determined,
        deferred_counts,
        w_set: w,
        k,
        guaranteed_excess,
        initial_expectation,
        final_expectation: expectation,
        realized_excess,
        leftover,
        steps,
    };
    Ok((cut, ledger))
}

/// A vertex order whose `W` set is large.
///
/// Samples random orders, keeping the best, until `|W| >= 2n'/k` where `n'`
/// counts vertices in edges of size >= 3 and `k` is the largest edge size.
/// At least `trials` orders are drawn; sampling stops early only once the
/// target is met, and gives up after a fixed cap.
pub fn order_for_w(h: &Hypergraph, trials: usize, seed: u64) -> Vec<usize> {
    const CAP: usize = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_prime = h.covered_vertices(3).len();
    let k = h.max_edge_size().max(1);
    let meets = |w: usize| w * k >= 2 * n_prime;
    let mut order: Vec<usize> = (0..h.n()).collect();
    let mut best = (w_set(h, &order).len(), order.clone());
    let mut drawn = 0;
    while drawn < CAP && (drawn < trials || !meets(best.0)) {
        order.shuffle(&mut rng);
        let w = w_set(h, &order).len();
        if w > best.0 {
            best = (w, order.clone());
        }
        drawn += 1;
    }
    best.1
}

/// Record of a [`combine_partial_cuts`] run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinePlan {
    pub parts: Vec<Vec<usize>>,
    /// Average excess of each part's partial cut.
    pub x: Vec<Dyadic>,
    /// Whether each part's partial cut was flipped.
    pub swaps: Vec<bool>,
    /// `Σ x_i`, the exact expected excess before any orientation is fixed.
    pub expected_excess: Dyadic,
    pub realized_excess: Dyadic,
}

/// Edge skeleton for orientation choices: per touched group, the base
/// colours of the edge's vertices in it.
struct GroupedEdge {
    groups: Vec<(usize, Vec<usize>)>,
}

impl GroupedEdge {
    /// Probability of being 2-coloured when groups in `flip` are oriented
    /// as given and the rest uniformly.
    fn prob(&self, flip: &[Option<bool>]) -> Dyadic {
        let free: Vec<usize> =
            (0..self.groups.len()).filter(|&j| flip[self.groups[j].0].is_none()).collect();
        let mut good = 0i64;
        for mask in 0u32..(1 << free.len()) {
            let mut seen = [false, false];
            for (j, (g, colours)) in self.groups.iter().enumerate() {
                let f = match flip[*g] {
                    Some(f) => f,
                    None => mask >> free.iter().position(|&x| x == j).unwrap() & 1 == 1,
                };
                for &c in colours {
                    seen[c ^ usize::from(f)] = true;
                }
            }
            good += i64::from(seen[0] && seen[1]);
        }
        Dyadic::new(good, free.len() as u32)
    }
}

/// Combines partial 2-cuts on disjoint vertex sets into one 2-cut of `h`.
///
/// `partials[i][j]` is the part (0 or 1) of `parts[i][j]`. Vertices in no
/// part behave as singleton parts. Orientations are chosen one part at a
/// time to maximize the exact conditional expected size, remaining parts
/// uniform; ties keep the orientation. Requires every edge to meet at least
/// `|e ∩ ∪parts| - 1` distinct parts.
pub fn combine_partial_cuts(h: &Hypergraph, parts: &[Vec<usize>], partials: &[Vec<usize>]) -> Result<(Cut, CombinePlan)> {
    let n = h.n();
    if parts.len() != partials.len() {
        return Err(Error::InvalidParams("one partial cut is needed per part".into()));
    }
    let mut group = vec![usize::MAX; n];
    let mut colour = vec![0usize; n];
    for (i, (vs, ps)) in parts.iter().zip(partials).enumerate() {
        if vs.len() != ps.len() {
            return Err(Error::InvalidParams(format!("part {i} and its partial cut differ in length")));
        }
        for (&v, &p) in vs.iter().zip(ps) {
            if v >= n {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            if group[v] != usize::MAX {
                return Err(Error::InvalidParams(format!("vertex {v} lies in two parts")));
            }
            if p > 1 {
                return Err(Error::InvalidCut(format!("part {p} out of range for a 2-cut")));
            }
            group[v] = i;
            colour[v] = p;
        }
    }
    let offending: Vec<usize> = h
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let inside: Vec<usize> = e.iter().map(|&v| group[v]).filter(|&g| g != usize::MAX).collect();
            let distinct: BTreeSet<usize> = inside.iter().copied().collect();
            distinct.len() + 1 < inside.len()
        })
        .map(|(i, _)| i)
        .collect();
    if !offending.is_empty() {
        return Err(Error::PlanInvalid { offending });
    }
    let mut groups = parts.len();
    for g in group.iter_mut().filter(|g| **g == usize::MAX) {
        *g = groups;
        groups += 1;
    }

    let grouped: Vec<GroupedEdge> = h
        .edges()
        .iter()
        .map(|e| {
            let mut gs: Vec<(usize, Vec<usize>)> = Vec::new();
            for &v in e {
                match gs.iter_mut().find(|(g, _)| *g == group[v]) {
                    Some((_, cs)) => cs.push(colour[v]),
                    None => gs.push((group[v], vec![colour[v]])),
                }
            }
            GroupedEdge { groups: gs }
        })
        .collect();
    let mut touching = vec![Vec::new(); groups];
    for (i, ge) in grouped.iter().enumerate() {
        for (g, _) in &ge.groups {
            touching[*g].push(i);
        }
    }

    let x: Vec<Dyadic> = parts
        .iter()
        .zip(partials)
        .map(|(vs, ps)| {
            let pairs: Vec<(usize, usize)> = vs.iter().copied().zip(ps.iter().copied()).collect();
            PartialCut::from_pairs(2, n, &pairs).map(|pc| partial_average_excess_2(h, &pc))
        })
        .collect::<Result<_>>()?;
    let expected_excess: Dyadic = x.iter().sum();

    let mut flip: Vec<Option<bool>> = vec![None; groups];
    let base = expected_size_2(h);
    let mut expectation: Dyadic = grouped.iter().map(|ge| ge.prob(&flip)).sum();
    if &expectation - &base != expected_excess {
        return Err(violation(format!(
            "combined expectation exceeds the baseline by {}, not Σ x_i = {expected_excess}",
            &expectation - &base
        )));
    }
    for g in 0..groups {
        let (mut keep, mut swap, mut now) = (Dyadic::zero(), Dyadic::zero(), Dyadic::zero());
        for &e in &touching[g] {
            now += grouped[e].prob(&flip);
            flip[g] = Some(false);
            keep += grouped[e].prob(&flip);
            flip[g] = Some(true);
            swap += grouped[e].prob(&flip);
            flip[g] = None;
        }
        let choose_swap = swap > keep;
        flip[g] = Some(choose_swap);
        expectation += if choose_swap { swap } else { keep } - now;
    }

    let cut = Cut::new(2, (0..n).map(|v| colour[v] ^ usize::from(flip[group[v]] == Some(true))).collect())?;
    let size = Dyadic::from_int(cut.size(h) as i64);
    if size != expectation {
        return Err(violation(format!("combined cut size {size} differs from its expectation {expectation}")));
    }
    let realized_excess = size - base;
    if realized_excess < expected_excess {
        return Err(violation(format!("combined excess {realized_excess} is below Σ x_i = {expected_excess}")));
    }
    let swaps = flip[..parts.len()].iter().map(|f| *f == Some(true)).collect();
    Ok((cut, CombinePlan { parts: parts.to_vec(), x, swaps, expected_excess, realized_excess }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutspace::{cut_metrics, excess};
    use crate::exact::ratio;
    use crate::hypergraph::fixtures::{fano, matching};
    use crate::hypergraph::{clique_expand, Multigraph};

    fn graph(n: usize, pairs: &[(usize, usize)]) -> WeightedGraph {
        let mut g = Multigraph::new(n);
        for &(u, v) in pairs {
            g.add_edge(u, v, 1).unwrap();
        }
        WeightedGraph::from(&g)
    }

    #[test]
    fn greedy_triangle() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let (cut, ledger) = greedy_order_cut(&g, &[0, 1, 2]).unwrap();
        assert_eq!(g.cut_weight(cut.parts()), Dyadic::from_int(2));
        assert_eq!(ledger.gains, vec![Dyadic::zero(), Dyadic::new(1, 1), Dyadic::zero()]);
        assert_eq!(ledger.back_degrees[2], Dyadic::from_int(2));
    }

    #[test]
    fn greedy_star_centre_last() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let (cut, ledger) = greedy_order_cut(&g, &[1, 2, 3, 0]).unwrap();
        assert_eq!(g.cut_weight(cut.parts()), Dyadic::from_int(3));
        assert_eq!(cut.parts(), &[0, 1, 1, 1]);
        assert_eq!(ledger.realized_excess, Dyadic::new(3, 1));
    }

    #[test]
    fn greedy_empty_and_bad_orders() {
        let g = graph(3, &[]);
        let (_, ledger) = greedy_order_cut(&g, &[2, 0, 1]).unwrap();
        assert!(ledger.realized_excess.is_zero());
        let g = graph(3, &[(0, 1)]);
        assert!(greedy_order_cut(&g, &[0]).is_err());
        assert!(greedy_order_cut(&g, &[0, 0, 1]).is_err());
    }

    #[test]
    fn flip_examples() {
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let out = flip_local_search(&c5, &Cut::monochromatic(2, 5));
        assert!(c5.cut_weight(out.parts()) >= Dyadic::from_int(3));

        let k33: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        let g = graph(6, &k33);
        let start = Cut::new(2, vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(flip_local_search(&g, &start), start);

        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let out = flip_local_search(&k4, &Cut::monochromatic(2, 4));
        assert_eq!(k4.cut_weight(out.parts()), Dyadic::from_int(4));
    }

    #[test]
    fn es_two_edges() {
        let h = Hypergraph::build(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let (cut, ledger) = erdos_selfridge_2cut(&h, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(ledger.w_set, vec![0, 1, 2, 3]);
        assert!(ledger.guaranteed_excess >= Dyadic::new(1, 1));
        assert_eq!(cut.size(&h), 2);
        assert_eq!(excess(&h, &cut).unwrap(), ratio(1, 2));
    }

    #[test]
    fn es_single_pair_and_fano() {
        let h = Hypergraph::build(2, vec![vec![0, 1]]).unwrap();
        let (cut, ledger) = erdos_selfridge_2cut(&h, &[0, 1]).unwrap();
        assert!(ledger.w_set.is_empty());
        assert_eq!(cut.size(&h), 1);

        let f = fano();
        for order in [vec![0, 1, 2, 3, 4, 5, 6], vec![6, 5, 4, 3, 2, 1, 0], vec![3, 0, 6, 1, 5, 2, 4]] {
            let (cut, ledger) = erdos_selfridge_2cut(&f, &order).unwrap();
            let x = excess(&f, &cut).unwrap();
            assert!(x >= Dyadic::new(ledger.w_set.len() as i64, 3).to_rational());
        }
    }

    #[test]
    fn order_for_w_examples() {
        let m = matching(12, 3);
        assert_eq!(w_set(&m, &order_for_w(&m, 4, 1)).len(), 8);
        let g = Hypergraph::build(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(w_set(&g, &order_for_w(&g, 4, 1)).is_empty());
        let one = Hypergraph::build(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(w_set(&one, &order_for_w(&one, 4, 1)).len(), 2);
    }

    #[test]
    fn combine_two_triangles() {
        let h = Hypergraph::build(6, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4], vec![4, 5], vec![3, 5], vec![2, 3]])
            .unwrap();
        let parts = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let partials = vec![vec![0, 1, 1], vec![1, 0, 0]];
        let (cut, plan) = combine_partial_cuts(&h, &parts, &partials).unwrap();
        assert_eq!(plan.x, vec![Dyadic::new(1, 1), Dyadic::new(1, 1)]);
        assert!(plan.realized_excess >= Dyadic::from_int(1));
        assert!(cut.size(&h) >= 4);
    }

    #[test]
    fn combine_single_part_and_zero() {
        let f = fano();
        let (cut, plan) = combine_partial_cuts(&f, &[vec![0, 3]], &[vec![0, 1]]).unwrap();
        assert!(plan.realized_excess >= plan.x[0]);
        assert!(cut_metrics(&f, &cut).unwrap().excess >= plan.x[0].to_rational());
        let (_, plan) = combine_partial_cuts(&f, &[], &[]).unwrap();
        assert!(!plan.realized_excess.is_negative());
    }

    #[test]
    fn combine_rejects_crowded_edges() {
        let f = fano();
        let err = combine_partial_cuts(&f, &[vec![0, 1, 2]], &[vec![0, 1, 0]]).unwrap_err();
        assert_eq!(err, Error::PlanInvalid { offending: vec![0] });
    }

    #[test]
    fn local_search_never_decreases() {
        let f = fano();
        let start = Cut::new(3, vec![0, 0, 0, 1, 1, 2, 2]).unwrap();
        let out = local_search(&f, &start);
        assert!(out.size(&f) >= start.size(&f));
        let g = clique_expand(&f);
        let wg = WeightedGraph::from(&g);
        let out = flip_local_search(&wg, &Cut::monochromatic(2, 7));
        for v in 0..7 {
            let (mut same, mut cross) = (Dyadic::zero(), Dyadic::zero());
            for (u, w) in wg.neighbors(v) {
                if out.part(u) == out.part(v) { same += w } else { cross += w }
            }
            assert!(cross >= same);
        }
    }
}
