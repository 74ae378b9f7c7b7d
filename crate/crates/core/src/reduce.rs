//! Transformations between cut problems.
//!
//! Each reduction keeps enough of its source to map a cut of the forward
//! instance back, and every back-map re-measures both sides and checks the
//! exact size relation. A failed check is a [`Error::CertificateViolation`].

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutspace::{
    cut_metrics, edge_fraction, edge_fraction_2, expected_size, expected_size_2, partial_average_excess_2, Cut,
    PartialCut,
};
use crate::error::{Error, Result};
use crate::exact::{int, ratio, Dyadic, Rational};
use crate::hypergraph::{clique_expand, Hypergraph, Multigraph};

fn certificate(msg: String) -> Error {
    Error::CertificateViolation(msg)
}

/// A graph with non-negative dyadic edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    adj: Vec<BTreeMap<usize, Dyadic>>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { adj: vec![BTreeMap::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Adds `w` to the weight of `{u, v}`.
    pub fn add_weight(&mut self, u: usize, v: usize, w: &Dyadic) -> Result<()> {
        let n = self.n();
        if u == v {
            return Err(Error::InvalidEdge { edge: vec![u, v], reason: "self-loop" });
        }
        if let Some(&x) = [u, v].iter().find(|&&x| x >= n) {
            return Err(Error::InvalidVertex { vertex: x, n });
        }
        if w.is_negative() {
            return Err(Error::InvalidParams(format!("negative weight {w}")));
        }
        if w.is_zero() {
            return Ok(());
        }
        *self.adj[u].entry(v).or_default() += w;
        *self.adj[v].entry(u).or_default() += w;
        Ok(())
    }

    pub fn weight(&self, u: usize, v: usize) -> Dyadic {
        self.adj[u].get(&v).cloned().unwrap_or_default()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, &Dyadic)> + '_ {
        self.adj[v].iter().map(|(&u, w)| (u, w))
    }

    /// Weighted pairs with `u < v`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &Dyadic)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |(&v, w)| (u, v, w)))
    }

    pub fn total_weight(&self) -> Dyadic {
        self.pairs().map(|(_, _, w)| w).sum()
    }

    pub fn cut_weight(&self, parts: &[usize]) -> Dyadic {
        self.pairs().filter(|&(u, v, _)| parts[u] != parts[v]).map(|(_, _, w)| w).sum()
    }

    /// Cut weight minus half the total weight.
    pub fn cut_excess(&self, parts: &[usize]) -> Dyadic {
        self.cut_weight(parts) - self.total_weight().half()
    }
}

impl From<&Multigraph> for WeightedGraph {
    fn from(g: &Multigraph) -> Self {
        let mut wg = WeightedGraph::new(g.n());
        for (u, v, c) in g.pairs() {
            wg.add_weight(u, v, &Dyadic::from_int(c as i64)).expect("multigraph pairs are valid");
        }
        wg
    }
}

/// A 3-graph seen as its clique-expanded multigraph.
#[derive(Clone, Debug)]
pub struct Expanded3Graph {
    pub source: Hypergraph,
    pub forward: Multigraph,
}

/// A 3-edge is 2-coloured exactly when two of its three pairs are cut, so a
/// 2-cut of size `z` is a multigraph cut of size `2z`.
pub fn expand_3graph(h: &Hypergraph) -> Result<Expanded3Graph> {
    if let Some(e) = h.edges().iter().find(|e| e.len() != 3) {
        return Err(Error::InvalidArity { expected: 3, found: e.len() });
    }
    Ok(Expanded3Graph { source: h.clone(), forward: clique_expand(h) })
}

impl Expanded3Graph {
    pub fn back_map(&self, cut: &Cut) -> Result<Cut> {
        check_cut(cut, 2, self.source.n())?;
        let z = cut.size(&self.source) as u64;
        let graph_cut = self.forward.cut_size(cut.parts());
        if graph_cut != 2 * z {
            return Err(certificate(format!("multigraph cut {graph_cut} is not twice the hypergraph cut {z}")));
        }
        Ok(cut.clone())
    }
}

fn check_cut(cut: &Cut, r: usize, n: usize) -> Result<()> {
    if cut.r() != r {
        return Err(Error::InvalidCut(format!("expected a {r}-cut, got {} parts", cut.r())));
    }
    if cut.n() != n {
        return Err(Error::InvalidCut(format!("cut covers {} vertices, expected {n}", cut.n())));
    }
    Ok(())
}

/// Rainbow probability of a 3-edge when each vertex whose coin is `None`
/// moves to part 2 with probability 1/3.
fn lift_probability(e: &[usize], base: &[usize], moved: &[Option<bool>]) -> Rational {
    let open: Vec<usize> = e.iter().copied().filter(|&v| moved[v].is_none()).collect();
    let mut total = Rational::zero();
    for mask in 0u32..(1 << open.len()) {
        let mut weight = int(1);
        let mut seen = [false; 3];
        for &v in e {
            let m = match moved[v] {
                Some(m) => m,
                None => {
                    let bit = mask >> open.iter().position(|&x| x == v).unwrap() & 1 == 1;
                    weight *= if bit { ratio(1, 3) } else { ratio(2, 3) };
                    bit
                }
            };
            seen[if m { 2 } else { base[v] }] = true;
        }
        if seen.iter().all(|&s| s) {
            total += weight;
        }
    }
    total
}

/// Turns a 2-cut of a 3-graph into a 3-cut by moving some vertices to part
/// 2. Each move is decided by exact conditional expectation against the
/// coin that moves a vertex with probability 1/3; ties keep the vertex.
/// The result has size at least `8/27` of the 2-cut size.
pub fn lift_2cut_to_3cut(h: &Hypergraph, c2: &Cut) -> Result<Cut> {
    check_lift(h, c2)?;
    let inc = h.incidence();
    let mut moved: Vec<Option<bool>> = vec![None; h.n()];
    let mut expectation: Rational = h.edges().iter().map(|e| lift_probability(e, c2.parts(), &moved)).sum();
    let start = expectation.clone();
    for v in 0..h.n() {
        let (mut stay, mut go, mut now) = (Rational::zero(), Rational::zero(), Rational::zero());
        for &e in &inc[v] {
            now += lift_probability(h.edge(e), c2.parts(), &moved);
            moved[v] = Some(false);
            stay += lift_probability(h.edge(e), c2.parts(), &moved);
            moved[v] = Some(true);
            go += lift_probability(h.edge(e), c2.parts(), &moved);
            moved[v] = None;
        }
        let choice = go > stay;
        moved[v] = Some(choice);
        expectation += if choice { go } else { stay } - now;
    }
    let parts = (0..h.n()).map(|v| if moved[v] == Some(true) { 2 } else { c2.part(v) }).collect();
    let c3 = Cut::new(3, parts)?;
    let size3 = c3.size(h);
    if int(size3 as i64) != expectation {
        return Err(Error::GuaranteeViolation(format!("lifted size {size3} differs from its expectation {expectation}")));
    }
    let floor = ratio(8, 27) * int(c2.size(h) as i64);
    if start < floor || int(size3 as i64) < floor {
        return Err(Error::GuaranteeViolation(format!("lifted size {size3} is below 8/27 of the 2-cut")));
    }
    Ok(c3)
}

/// Sampled variant of [`lift_2cut_to_3cut`], for cross-validation.
pub fn lift_2cut_to_3cut_sampled(h: &Hypergraph, c2: &Cut, seed: u64) -> Result<Cut> {
    check_lift(h, c2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = (0..h.n()).map(|v| if rng.gen_range(0..3) == 0 { 2 } else { c2.part(v) }).collect();
    Cut::new(3, parts)
}

fn check_lift(h: &Hypergraph, c2: &Cut) -> Result<()> {
    if let Some(e) = h.edges().iter().find(|e| e.len() != 3) {
        return Err(Error::InvalidArity { expected: 3, found: e.len() });
    }
    check_cut(c2, 2, h.n())
}

/// Partial exposure of a random `r`-cut: vertices revealed in parts
/// `free..r` are fixed by `rho`, and the rest (the starred vertices) form a
/// `free`-cut problem on the edges that can still become multicoloured.
#[derive(Clone, Debug)]
pub struct Exposure {
    pub source: Hypergraph,
    pub r: usize,
    pub free: usize,
    pub rho: PartialCut,
    /// `e ∩ ρ^{-1}(*)` for each contributing edge, on the same vertex ids.
    pub forward: Hypergraph,
    /// Source edge index of each forward edge.
    pub origin: Vec<usize>,
}

/// Samples the exposure of a uniform `r`-cut: each vertex lands in each part
/// with probability `1/r`; parts `0..free` stay hidden.
pub fn sample_exposure(n: usize, r: usize, free: usize, rng: &mut impl Rng) -> PartialCut {
    let assigned = (0..n)
        .map(|_| {
            let p = rng.gen_range(0..r);
            (p >= free).then_some(p)
        })
        .collect();
    PartialCut::new(r, assigned).expect("sampled parts are in range")
}

/// Builds the starred instance for `rho`.
///
/// An edge contributes `e ∩ ρ^{-1}(*)` when `ρ(e)` already covers the
/// exposed parts and at least `free` of its vertices are starred. A
/// `free`-cut of the forward instance merged with `rho` then has exactly the
/// forward instance's size on `h`.
pub fn hpart_expose(h: &Hypergraph, r: usize, rho: &PartialCut, free: usize) -> Result<Exposure> {
    if !(2..=3).contains(&free) || r <= free {
        return Err(Error::InvalidParams(format!("exposure needs free in {{2, 3}} and r > free, got r = {r}, free = {free}")));
    }
    if rho.r() != r || rho.n() != h.n() {
        return Err(Error::InvalidExposure(format!("exposure must be an {r}-part assignment of {} vertices", h.n())));
    }
    if let Some(p) = rho.assignments().iter().flatten().find(|&&p| p < free) {
        return Err(Error::InvalidExposure(format!("part {p} is hidden and cannot be exposed")));
    }
    let exposed = r - free;
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    for (i, e) in h.edges().iter().enumerate() {
        let mut seen = 0u64;
        let mut starred = Vec::new();
        for &v in e {
            match rho.get(v) {
                Some(p) => seen |= 1 << (p - free),
                None => starred.push(v),
            }
        }
        if seen.count_ones() as usize == exposed && starred.len() >= free {
            edges.push(starred);
            origin.push(i);
        }
    }
    let k = edges.iter().map(Vec::len).max().unwrap_or(0);
    let forward = Hypergraph::from_canonical(h.n(), k, edges);
    Ok(Exposure { source: h.clone(), r, free, rho: rho.clone(), forward, origin })
}

impl Exposure {
    /// Starred vertices, ascending.
    pub fn starred(&self) -> Vec<usize> {
        (0..self.source.n()).filter(|&v| self.rho.get(v).is_none()).collect()
    }

    /// `E[Z | ρ]`: expected size of the merged cut when the starred
    /// vertices are uniform over the hidden parts.
    pub fn conditional_expectation(&self) -> Rational {
        self.forward.edges().iter().map(|e| edge_fraction(e.len(), self.free)).sum()
    }

    /// `E[Z | ρ] - E Z`.
    pub fn shift(&self) -> Rational {
        self.conditional_expectation() - expected_size(&self.source, self.r)
    }

    /// Merges a `free`-cut of the forward instance with `rho`.
    pub fn back_map(&self, phi: &Cut) -> Result<Cut> {
        check_cut(phi, self.free, self.source.n())?;
        let parts = (0..self.source.n()).map(|v| self.rho.get(v).unwrap_or_else(|| phi.part(v))).collect();
        let cut = Cut::new(self.r, parts)?;
        let (back, fwd) = (cut.size(&self.source), phi.size(&self.forward));
        if back != fwd {
            return Err(certificate(format!("merged cut has size {back}, forward cut {fwd}")));
        }
        Ok(cut)
    }
}

/// The averaging reduction for 2-cuts: vertices outside `W` are fixed by
/// `rho`, and a 2-cut `φ` of `W` is completed both as is and flipped.
#[derive(Clone, Debug)]
pub struct DoubledExposure {
    pub source: Hypergraph,
    pub w_set: Vec<usize>,
    pub rho: PartialCut,
    /// Two copies of every edge inside `W`, and `e ∩ W` (when it has at
    /// least two vertices) for every edge of `H'`.
    pub forward: Hypergraph,
    pub origin: Vec<usize>,
    /// `e(H')`: edges leaving `W` whose outside part is monochromatic under
    /// `rho` and that meet `W`.
    pub h_prime: usize,
    /// `N^multi`: edges already 2-coloured by `rho`.
    pub n_multi: usize,
    conditional: Dyadic,
}

/// Draws the complement of `W` uniformly into two parts.
pub fn sample_outside(n: usize, w_set: &[usize], rng: &mut impl Rng) -> PartialCut {
    let mut assigned: Vec<Option<usize>> = (0..n).map(|_| Some(rng.gen_range(0..2))).collect();
    for &w in w_set {
        assigned[w] = None;
    }
    PartialCut::new(2, assigned).expect("sampled parts are in range")
}

pub fn hpart_double(h: &Hypergraph, w_set: &[usize], rho: &PartialCut) -> Result<DoubledExposure> {
    let n = h.n();
    if rho.r() != 2 || rho.n() != n {
        return Err(Error::InvalidExposure(format!("exposure must be a 2-part assignment of {n} vertices")));
    }
    let mut in_w = vec![false; n];
    for &w in w_set {
        if w >= n {
            return Err(Error::InvalidVertex { vertex: w, n });
        }
        in_w[w] = true;
    }
    if let Some(v) = (0..n).find(|&v| in_w[v] == rho.get(v).is_some()) {
        return Err(Error::InvalidExposure(format!("vertex {v}: exposure must cover exactly the complement of W")));
    }
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    let (mut h_prime, mut n_multi) = (0, 0);
    let mut conditional = Dyadic::zero();
    for (i, e) in h.edges().iter().enumerate() {
        let inside: Vec<usize> = e.iter().copied().filter(|&v| in_w[v]).collect();
        if inside.len() == e.len() {
            conditional += edge_fraction_2(e.len());
            edges.push(inside.clone());
            edges.push(inside);
            origin.extend([i, i]);
            continue;
        }
        let mut seen = [false; 2];
        for &v in e.iter().filter(|&&v| !in_w[v]) {
            seen[rho.get(v).unwrap()] = true;
        }
        if seen[0] && seen[1] {
            n_multi += 1;
            conditional += Dyadic::one();
        } else if !inside.is_empty() {
            h_prime += 1;
            conditional += Dyadic::one() - Dyadic::pow2(-(inside.len() as i32));
            if inside.len() >= 2 {
                edges.push(inside);
                origin.push(i);
            }
        }
    }
    let k = edges.iter().map(Vec::len).max().unwrap_or(0);
    let forward = Hypergraph::from_canonical(n, k, edges);
    let reduction = DoubledExposure {
        source: h.clone(),
        w_set: w_set.to_vec(),
        rho: rho.clone(),
        forward,
        origin,
        h_prime,
        n_multi,
        conditional,
    };
    let identity =
        expected_size_2(&reduction.forward).half() + Dyadic::new(h_prime as i64, 1) + Dyadic::from_int(n_multi as i64);
    if identity != reduction.conditional {
        return Err(certificate(format!(
            "E[Z|rho] = {} but E Z^part/2 + e(H')/2 + N^multi = {identity}",
            reduction.conditional
        )));
    }
    Ok(reduction)
}

impl DoubledExposure {
    /// `E[Z | ρ]`.
    pub fn conditional_expectation(&self) -> Dyadic {
        self.conditional.clone()
    }

    /// `E[Z | ρ] - E Z`.
    pub fn shift(&self) -> Dyadic {
        &self.conditional - &expected_size_2(&self.source)
    }

    /// Completes `φ` (a 2-cut whose values on `W` matter) with `rho` and with
    /// `rho` flipped on `W`, returning the larger; ties keep `φ`.
    pub fn back_map(&self, phi: &Cut) -> Result<Cut> {
        check_cut(phi, 2, self.source.n())?;
        let parts: Vec<usize> = (0..self.source.n()).map(|v| self.rho.get(v).unwrap_or_else(|| phi.part(v))).collect();
        let omega = Cut::new(2, parts)?;
        let omega_bar = omega.flipped_on(&self.w_set);
        let (a, b) = (omega.size(&self.source), omega_bar.size(&self.source));
        let z_part = phi.size(&self.forward);
        if a + b != z_part + self.h_prime + 2 * self.n_multi {
            return Err(certificate(format!(
                "completions sum to {}, expected z_part + e(H') + 2 N^multi = {}",
                a + b,
                z_part + self.h_prime + 2 * self.n_multi
            )));
        }
        let best = if b > a { omega_bar } else { omega };
        let x_forward = Dyadic::from_int(z_part as i64) - expected_size_2(&self.forward);
        let promised = x_forward.half() + self.shift();
        let realized = Dyadic::from_int(best.size(&self.source) as i64) - expected_size_2(&self.source);
        if realized < promised {
            return Err(certificate(format!("back-mapped excess {realized} is below x'/2 + shift = {promised}")));
        }
        Ok(best)
    }
}

/// `η_{u,v} = Σ 2^{2-|e|}` over edges meeting `v_prime` in exactly `{u, v}`.
///
/// For every 2-cut `ω` of `v_prime`, the weighted excess of `ω` equals the
/// average excess of `h` over completions of `ω`.
pub fn weighted_reduce(h: &Hypergraph, v_prime: &[usize]) -> Result<WeightedGraph> {
    let mut member = vec![false; h.n()];
    for &v in v_prime {
        if v >= h.n() {
            return Err(Error::InvalidVertex { vertex: v, n: h.n() });
        }
        member[v] = true;
    }
    let mut g = WeightedGraph::new(h.n());
    for e in h.edges() {
        let inside: Vec<usize> = e.iter().copied().filter(|&v| member[v]).collect();
        match inside.len() {
            0 | 1 => {}
            2 => g.add_weight(inside[0], inside[1], &Dyadic::pow2(2 - e.len() as i32))?,
            s => {
                return Err(Error::InvalidReduction(format!("edge {e:?} meets the vertex set in {s} vertices")));
            }
        }
    }
    Ok(g)
}

/// Checks the weighted-reduction identity for one assignment of `v_prime`.
pub fn check_weighted_identity(h: &Hypergraph, g: &WeightedGraph, v_prime: &[usize], cut: &Cut) -> Result<Dyadic> {
    let pairs: Vec<(usize, usize)> = v_prime.iter().map(|&v| (v, cut.part(v))).collect();
    let pc = PartialCut::from_pairs(2, h.n(), &pairs)?;
    let average = partial_average_excess_2(h, &pc);
    let mut parts = vec![0; h.n()];
    for &(v, p) in &pairs {
        parts[v] = p;
    }
    let weighted = g.cut_excess(&parts);
    if weighted != average {
        return Err(certificate(format!("weighted excess {weighted} differs from the average excess {average}")));
    }
    Ok(weighted)
}

/// Each `k`-edge replaced by its `k` subsets of size `k - 1`.
#[derive(Clone, Debug)]
pub struct RgraphExpansion {
    pub source: Hypergraph,
    pub r: usize,
    pub forward: Hypergraph,
}

/// An `r`-cut multicolours a `(r+1)`-edge exactly when it multicolours two
/// of its `r`-subsets, so forward sizes are twice the source sizes.
pub fn rgraph_expand(h: &Hypergraph, r: usize) -> Result<RgraphExpansion> {
    let k = h.max_edge_size();
    if r < 3 || r + 1 != k {
        return Err(Error::InvalidParams(format!("r-graph expansion needs r = k - 1 >= 3, got k = {k}, r = {r}")));
    }
    if let Some(e) = h.edges().iter().find(|e| e.len() != k) {
        return Err(Error::InvalidArity { expected: k, found: e.len() });
    }
    let edges = h
        .edges()
        .iter()
        .flat_map(|e| (0..k).map(move |skip| e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()))
        .collect();
    let forward = Hypergraph::from_canonical(h.n(), r, edges);
    Ok(RgraphExpansion { source: h.clone(), r, forward })
}

impl RgraphExpansion {
    pub fn back_map(&self, cut: &Cut) -> Result<Cut> {
        check_cut(cut, self.r, self.source.n())?;
        let (z, fwd) = (cut.size(&self.source), cut.size(&self.forward));
        if fwd != 2 * z {
            return Err(certificate(format!("forward size {fwd} is not twice the source size {z}")));
        }
        let (xf, xs) = (cut_metrics(&self.forward, cut)?.excess, cut_metrics(&self.source, cut)?.excess);
        if xf != xs.clone() * int(2) {
            return Err(certificate(format!("forward excess {xf} is not twice the source excess {xs}")));
        }
        Ok(cut.clone())
    }
}

/// Best of `trials` random cuts that split `w_set` equitably into `r` parts
/// and place every other vertex uniformly. Returns the cut and its excess.
pub fn dense_subset_cut(h: &Hypergraph, w_set: &[usize], r: usize, trials: usize, seed: u64) -> Result<(Cut, Rational)> {
    if trials == 0 {
        return Err(Error::InvalidParams("dense_subset_cut needs at least one trial".into()));
    }
    if r < 2 || w_set.len() < r {
        return Err(Error::InvalidParams(format!("need 2 <= r <= |W|, got r = {r}, |W| = {}", w_set.len())));
    }
    if let Some(&w) = w_set.iter().find(|&&w| w >= h.n()) {
        return Err(Error::InvalidVertex { vertex: w, n: h.n() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<usize> = w_set.to_vec();
    let mut best: Option<(usize, Cut)> = None;
    for _ in 0..trials {
        let mut cut = Cut::uniform(r, h.n(), &mut rng);
        w.shuffle(&mut rng);
        for (i, &v) in w.iter().enumerate() {
            cut.set(v, i % r);
        }
        let size = cut.size(h);
        if best.as_ref().is_none_or(|(s, _)| size > *s) {
            best = Some((size, cut));
        }
    }
    let (_, cut) = best.expect("at least one trial");
    let x = cut_metrics(h, &cut)?.excess;
    Ok((cut, x))
}
