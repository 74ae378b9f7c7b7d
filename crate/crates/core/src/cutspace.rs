//! Exact cut arithmetic: sizes, random-cut expectations, excesses and the
//! closed-form bounds the rest of the crate is measured against.
//!
//! Parts are 0-based internally (`0..r`). Reports that follow the usual
//! `1..r` convention add one at the boundary.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{binomial, exact_sqrt, int, pow_ratio, ratio, to_f64, Dyadic, Rational};
use crate::hypergraph::Hypergraph;

/// A full assignment of vertices to parts `0..r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    r: usize,
    parts: Vec<usize>,
}

impl Cut {
    pub fn new(r: usize, parts: Vec<usize>) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidCut(format!("need at least 2 parts, got {r}")));
        }
        if let Some(&p) = parts.iter().find(|&&p| p >= r) {
            return Err(Error::InvalidCut(format!("part {p} out of range for r = {r}")));
        }
        Ok(Cut { r, parts })
    }

    /// Every vertex in part 0.
    pub fn monochromatic(r: usize, n: usize) -> Self {
        Cut { r, parts: vec![0; n] }
    }

    pub fn uniform(r: usize, n: usize, rng: &mut impl Rng) -> Self {
        Cut { r, parts: (0..n).map(|_| rng.gen_range(0..r)).collect() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn part(&self, v: usize) -> usize {
        self.parts[v]
    }

    pub fn set(&mut self, v: usize, part: usize) {
        assert!(part < self.r, "part {part} out of range");
        self.parts[v] = part;
    }

    /// Swaps parts 0 and 1 on the listed vertices (the "opposite" 2-cut there).
    pub fn flipped_on(&self, vertices: &[usize]) -> Cut {
        let mut c = self.clone();
        for &v in vertices {
            c.parts[v] = 1 - c.parts[v].min(1);
        }
        c
    }

    pub fn to_partial(&self) -> PartialCut {
        PartialCut { r: self.r, assigned: self.parts.iter().map(|&p| Some(p)).collect() }
    }

    /// Whether `edge` meets every part.
    pub fn multicolours(&self, edge: &[usize]) -> bool {
        if edge.len() < self.r {
            return false;
        }
        if self.r == 2 {
            let first = self.parts[edge[0]];
            return edge[1..].iter().any(|&v| self.parts[v] != first);
        }
        let mut seen = 0u64;
        let mut count = 0;
        for &v in edge {
            let bit = 1u64 << self.parts[v].min(63);
            if seen & bit == 0 {
                seen |= bit;
                count += 1;
            }
        }
        count == self.r
    }

    /// Number of multicoloured edges of `h`.
    pub fn size(&self, h: &Hypergraph) -> usize {
        h.edges().iter().filter(|e| self.multicolours(e)).count()
    }
}

/// An assignment of a vertex subset to parts `0..r`; `None` means unassigned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialCut {
    r: usize,
    assigned: Vec<Option<usize>>,
}

impl PartialCut {
    pub fn empty(r: usize, n: usize) -> Self {
        PartialCut { r, assigned: vec![None; n] }
    }

    pub fn new(r: usize, assigned: Vec<Option<usize>>) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidCut(format!("need at least 2 parts, got {r}")));
        }
        if let Some(p) = assigned.iter().flatten().find(|&&p| p >= r) {
            return Err(Error::InvalidCut(format!("part {p} out of range for r = {r}")));
        }
        Ok(PartialCut { r, assigned })
    }

    /// Assigns the listed `(vertex, part)` pairs on `n` vertices.
    pub fn from_pairs(r: usize, n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut pc = PartialCut::empty(r, n);
        for &(v, p) in pairs {
            if v >= n {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            if p >= r {
                return Err(Error::InvalidCut(format!("part {p} out of range for r = {r}")));
            }
            pc.assigned[v] = Some(p);
        }
        Ok(pc)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.assigned.len()
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.assigned[v]
    }

    pub fn assign(&mut self, v: usize, part: usize) {
        assert!(part < self.r, "part {part} out of range");
        self.assigned[v] = Some(part);
    }

    pub fn unassign(&mut self, v: usize) {
        self.assigned[v] = None;
    }

    pub fn assignments(&self) -> &[Option<usize>] {
        &self.assigned
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.assigned[v].is_some()).collect()
    }

    /// Fills unassigned vertices from `fill`, which must have the same `r`.
    pub fn complete_with(&self, fill: &Cut) -> Cut {
        let parts = self.assigned.iter().zip(fill.parts()).map(|(a, &f)| a.unwrap_or(f)).collect();
        Cut { r: self.r, parts }
    }
}

/// Size, expected size and excess of a cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutMetrics {
    pub size: u64,
    pub expected: Rational,
    pub excess: Rational,
}

impl fmt::Display for CutMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size {} expected {} excess {}", self.size, self.expected, self.excess)
    }
}

/// Stirling numbers of the second kind `S(k, j)` for `j = 0..=k`.
fn stirling_row(k: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 1..=k {
        let mut next = vec![BigInt::zero(); i + 1];
        for j in 1..=i {
            let stay = if j < i { &row[j] * BigInt::from(j) } else { BigInt::zero() };
            next[j] = stay + &row[j - 1];
        }
        row = next;
    }
    row
}

/// `S(k, r) r! / r^k`, the chance a uniformly random `r`-cut multicolours a
/// `k`-edge.
pub fn expected_fraction(k: usize, r: usize) -> Result<Rational> {
    if r < 2 || r > k {
        return Err(Error::InvalidParams(format!("expected_fraction needs 2 <= r <= k, got k = {k}, r = {r}")));
    }
    Ok(edge_fraction(k, r))
}

/// [`expected_fraction`] extended by zero to edges smaller than `r`.
pub fn edge_fraction(size: usize, r: usize) -> Rational {
    if size < r || r == 0 {
        return Rational::zero();
    }
    let s = &stirling_row(size)[r];
    let fact: BigInt = (1..=r).map(BigInt::from).product();
    Rational::new(s * fact, num_traits::pow(BigInt::from(r), size))
}

/// 2-cut edge fraction `1 - 2^{1-s}` as a dyadic.
pub fn edge_fraction_2(size: usize) -> Dyadic {
    if size < 2 {
        Dyadic::zero()
    } else {
        Dyadic::one() - Dyadic::pow2(1 - size as i32)
    }
}

/// Probability that an edge is multicoloured once `free_count` of its
/// vertices are placed uniformly at random, given the parts already hit.
///
/// Inclusion–exclusion over the parts still missing. `edge_size` is only a
/// consistency check: at most `edge_size - free_count` parts can be hit.
pub fn multicolour_probability(edge_size: usize, hit_parts: &[usize], free_count: usize, r: usize) -> Rational {
    let mut hit: Vec<usize> = hit_parts.to_vec();
    hit.sort_unstable();
    hit.dedup();
    debug_assert!(hit.len() + free_count <= edge_size.max(hit.len() + free_count));
    debug_assert!(hit.iter().all(|&p| p < r));
    missing_parts_probability(r - hit.len(), free_count, r)
}

/// Probability that `free` uniform vertices cover `missing` given parts out of `r`.
pub(crate) fn missing_parts_probability(missing: usize, free: usize, r: usize) -> Rational {
    if missing == 0 {
        return Rational::one();
    }
    if missing > free {
        return Rational::zero();
    }
    let mut total = Rational::zero();
    for j in 0..=missing {
        let term = Rational::from_integer(binomial(missing as u64, j as u64))
            * pow_ratio((r - j) as u64, r as u64, free as u32);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// 2-cut specialisation of [`multicolour_probability`], in dyadics.
pub fn multicolour_probability_2(hit0: bool, hit1: bool, free: usize) -> Dyadic {
    match (hit0, hit1) {
        (true, true) => Dyadic::one(),
        (true, false) | (false, true) => Dyadic::one() - Dyadic::pow2(-(free as i32)),
        (false, false) if free >= 2 => Dyadic::one() - Dyadic::pow2(1 - free as i32),
        (false, false) => Dyadic::zero(),
    }
}

/// Expected size of a uniformly random `r`-cut.
pub fn expected_size(h: &Hypergraph, r: usize) -> Rational {
    let mut counts = vec![0u64; h.max_edge_size() + 1];
    for e in h.edges() {
        counts[e.len()] += 1;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(s, &c)| c > 0 && *s >= r)
        .map(|(s, &c)| edge_fraction(s, r) * int(c as i64))
        .sum()
}

/// Dyadic expected size of a uniformly random 2-cut.
pub fn expected_size_2(h: &Hypergraph) -> Dyadic {
    h.edges().iter().map(|e| edge_fraction_2(e.len())).sum()
}

pub fn cut_metrics(h: &Hypergraph, c: &Cut) -> Result<CutMetrics> {
    if c.n() != h.n() {
        return Err(Error::InvalidCut(format!("cut covers {} vertices, hypergraph has {}", c.n(), h.n())));
    }
    let size = c.size(h) as u64;
    let expected = expected_size(h, c.r());
    let excess = int(size as i64) - &expected;
    Ok(CutMetrics { size, expected, excess })
}

/// Excess of a full cut, as a rational.
pub fn excess(h: &Hypergraph, c: &Cut) -> Result<Rational> {
    Ok(cut_metrics(h, c)?.excess)
}

fn edge_probability(e: &[usize], pc: &PartialCut) -> Rational {
    let r = pc.r();
    let mut hit = 0u64;
    let mut free = 0;
    for &v in e {
        match pc.get(v) {
            Some(p) => hit |= 1 << p.min(63),
            None => free += 1,
        }
    }
    missing_parts_probability(r - hit.count_ones() as usize, free, r)
}

/// Expected size of the random cut that agrees with `pc` and is uniform elsewhere.
pub fn average_size(h: &Hypergraph, pc: &PartialCut) -> Rational {
    h.edges().iter().map(|e| edge_probability(e, pc)).sum()
}

/// [`average_size`] minus the unconditional expectation.
pub fn partial_average_excess(h: &Hypergraph, pc: &PartialCut) -> Rational {
    average_size(h, pc) - expected_size(h, pc.r())
}

/// Dyadic [`average_size`] for 2-cuts.
pub fn average_size_2(h: &Hypergraph, pc: &PartialCut) -> Dyadic {
    debug_assert_eq!(pc.r(), 2);
    h.edges()
        .iter()
        .map(|e| {
            let (mut h0, mut h1, mut free) = (false, false, 0);
            for &v in e {
                match pc.get(v) {
                    Some(0) => h0 = true,
                    Some(_) => h1 = true,
                    None => free += 1,
                }
            }
            multicolour_probability_2(h0, h1, free)
        })
        .sum()
}

/// Dyadic [`partial_average_excess`] for 2-cuts.
pub fn partial_average_excess_2(h: &Hypergraph, pc: &PartialCut) -> Dyadic {
    average_size_2(h, pc) - expected_size_2(h)
}

/// The closed-form excess guarantees the crate can report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundId {
    /// Every m-edge 3-graph has a 2-cut with excess `(sqrt(24m+1)-1)/16`.
    Sts2Cut,
    /// Every connected n-vertex 3-graph: `(n-1)/8`.
    Connected3Graph,
    /// Every 3-graph without isolated vertices: `n/12`.
    Matching,
    /// k-graph without isolated vertices, 2-cuts: `n/(k 2^{k-1})`.
    Mixed2CutN,
    /// Mixed k-graph with n vertices in k-edges: `n/(k 2^k)`.
    MixedKEdges,
    /// Every m-edge multigraph: `(sqrt(8m+1)-1)/8`.
    EdwardsM,
    /// Every connected n-vertex graph: `(n-1)/4`.
    EdwardsConnected,
    /// Every multigraph without isolated vertices: `n/6`.
    EdwardsN,
}

impl BoundId {
    pub const ALL: [BoundId; 8] = [
        BoundId::Sts2Cut,
        BoundId::Connected3Graph,
        BoundId::Matching,
        BoundId::Mixed2CutN,
        BoundId::MixedKEdges,
        BoundId::EdwardsM,
        BoundId::EdwardsConnected,
        BoundId::EdwardsN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::Sts2Cut => "sts-2cut",
            BoundId::Connected3Graph => "connected-3graph",
            BoundId::Matching => "matching",
            BoundId::Mixed2CutN => "mixed-2cut-n",
            BoundId::MixedKEdges => "mixed-k-edges",
            BoundId::EdwardsM => "edwards-m",
            BoundId::EdwardsConnected => "edwards-connected",
            BoundId::EdwardsN => "edwards-n",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            BoundId::Sts2Cut => "every m-edge 3-graph has a 2-cut of excess >= (sqrt(24m+1)-1)/16; tight for Steiner triple systems",
            BoundId::Connected3Graph => "every connected n-vertex 3-graph has a 2-cut of excess >= (n-1)/8; tight for Steiner triple systems",
            BoundId::Matching => "every 3-graph without isolated vertices has a 2-cut of excess >= n/12; tight for perfect matchings",
            BoundId::Mixed2CutN => "every k-graph (k > 2) without isolated vertices has a 2-cut of excess >= n/(k 2^(k-1)); tight for perfect matchings",
            BoundId::MixedKEdges => "a mixed k-graph with n vertices in edges of size k has a 2-cut of excess >= n/(k 2^k)",
            BoundId::EdwardsM => "every m-edge multigraph has a cut of excess >= (sqrt(8m+1)-1)/8 (Edwards)",
            BoundId::EdwardsConnected => "every connected n-vertex graph has a cut of excess >= (n-1)/4 (Edwards)",
            BoundId::EdwardsN => "every multigraph with n non-isolated vertices has a cut of excess >= n/6",
        }
    }

    /// Parameters the formula reads.
    pub fn needs(self) -> &'static [&'static str] {
        match self {
            BoundId::Sts2Cut | BoundId::EdwardsM => &["m"],
            BoundId::Connected3Graph | BoundId::Matching | BoundId::EdwardsConnected | BoundId::EdwardsN => &["n"],
            BoundId::Mixed2CutN | BoundId::MixedKEdges => &["n", "k"],
        }
    }
}

impl std::str::FromStr for BoundId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown bound '{s}'")))
    }
}

/// Named integer parameters for [`theorem_bound`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundParams {
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub k: Option<u64>,
}

/// A bound value: exact when the formula is rational at these parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Exact(Rational),
    Approx(f64),
}

impl BoundValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            BoundValue::Exact(r) => to_f64(r),
            BoundValue::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            BoundValue::Exact(r) => Some(r),
            BoundValue::Approx(_) => None,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(r) => write!(f, "{r}"),
            BoundValue::Approx(x) => write!(f, "{x:.6}"),
        }
    }
}

/// `(sqrt(a*m + 1) - 1) / d`, exact when `a*m + 1` is a square.
fn sqrt_bound(a: u64, m: u64, d: i64) -> BoundValue {
    let radicand = BigInt::from(a) * BigInt::from(m) + 1;
    match exact_sqrt(&radicand) {
        Some(root) => BoundValue::Exact(Rational::new(root - 1, BigInt::from(d))),
        None => BoundValue::Approx(((a as f64 * m as f64 + 1.0).sqrt() - 1.0) / d as f64),
    }
}

/// Evaluates a named closed-form excess bound.
pub fn theorem_bound(id: BoundId, params: BoundParams) -> Result<BoundValue> {
    let need = |name: &str, v: Option<u64>| {
        v.ok_or_else(|| Error::InvalidParams(format!("bound '{}' needs parameter {name}", id.name())))
    };
    Ok(match id {
        BoundId::Sts2Cut => sqrt_bound(24, need("m", params.m)?, 16),
        BoundId::EdwardsM => sqrt_bound(8, need("m", params.m)?, 8),
        BoundId::Connected3Graph => BoundValue::Exact(ratio(need("n", params.n)?.saturating_sub(1) as i64, 8)),
        BoundId::EdwardsConnected => BoundValue::Exact(ratio(need("n", params.n)?.saturating_sub(1) as i64, 4)),
        BoundId::Matching => BoundValue::Exact(ratio(need("n", params.n)? as i64, 12)),
        BoundId::EdwardsN => BoundValue::Exact(ratio(need("n", params.n)? as i64, 6)),
        BoundId::Mixed2CutN | BoundId::MixedKEdges => {
            let n = need("n", params.n)?;
            let k = need("k", params.k)?;
            if k < 2 {
                return Err(Error::InvalidParams(format!("bound '{}' needs k >= 2", id.name())));
            }
            let shift = if id == BoundId::Mixed2CutN { k - 1 } else { k };
            let den = BigInt::from(k) * (BigInt::one() << shift as usize);
            BoundValue::Exact(Rational::new(BigInt::from(n), den))
        }
    })
}

/// Parses `name` and evaluates it; see [`theorem_bound`].
pub fn theorem_bound_named(name: &str, params: BoundParams) -> Result<BoundValue> {
    theorem_bound(name.parse()?, params)
}

/// Multicoloured-edge count of the equitable `r`-cut of the complete
/// `k`-graph on `n` vertices: `Σ Π C(n_i, s_i)` over compositions of `k`.
pub fn equitable_complete_value(n: usize, k: usize, r: usize) -> Result<BigInt> {
    if !(2 <= r && r <= k && k <= n) {
        return Err(Error::InvalidParams(format!("need 2 <= r <= k <= n, got n = {n}, k = {k}, r = {r}")));
    }
    // Polynomial product over parts of Σ_{s>=1} C(n_i, s) x^s, truncated at x^k.
    let mut poly = vec![BigInt::zero(); k + 1];
    poly[0] = BigInt::one();
    for i in 0..r {
        let size = n / r + usize::from(i < n % r);
        let mut next = vec![BigInt::zero(); k + 1];
        for (d, coeff) in poly.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for s in 1..=(k - d).min(size) {
                next[d + s] += coeff * binomial(size as u64, s as u64);
            }
        }
        poly = next;
    }
    Ok(poly.swap_remove(k))
}
