//! The instance model: mixed multihypergraphs and their clique expansions.
//!
//! Vertex ids are dense `0..n`. Restrictions ([`induce`]) keep the original
//! id space, so a vertex means the same thing before and after a reduction;
//! vertices outside the restricted set simply become isolated.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// An immutable mixed multihypergraph: every edge is a sorted set of
/// distinct vertices, and coincident edges are kept as separate copies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates and canonicalizes `raw_edges`. The arity `k` is the largest
    /// edge size.
    pub fn build(n: usize, raw_edges: Vec<Vec<usize>>) -> Result<Self> {
        let edges = canonical_edges(n, raw_edges)?;
        let k = edges.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Hypergraph { n, k, edges })
    }

    /// Like [`Hypergraph::build`] but with a declared arity, which must bound
    /// every edge size. Used by the file format, whose header carries `k`.
    pub fn build_with_arity(n: usize, k: usize, raw_edges: Vec<Vec<usize>>) -> Result<Self> {
        let edges = canonical_edges(n, raw_edges)?;
        if let Some(e) = edges.iter().find(|e| e.len() > k) {
            return Err(Error::InvalidArity { expected: k, found: e.len() });
        }
        Ok(Hypergraph { n, k, edges })
    }

    pub fn empty(n: usize) -> Self {
        Hypergraph { n, k: 0, edges: Vec::new() }
    }

    /// Internal constructor for edges already known to be canonical.
    pub(crate) fn from_canonical(n: usize, k: usize, edges: Vec<Vec<usize>>) -> Self {
        debug_assert!(edges.iter().all(|e| e.windows(2).all(|w| w[0] < w[1])));
        debug_assert!(edges.iter().all(|e| !e.is_empty() && e.len() <= k.max(1)));
        Hypergraph { n, k, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// The arity bound `k`: no edge is larger.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    /// Largest actual edge size (at most `k`).
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    /// For each vertex, the indices of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    /// Vertices lying in at least one edge of size `>= min_size`.
    pub fn covered_vertices(&self, min_size: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for e in self.edges.iter().filter(|e| e.len() >= min_size) {
            for &v in e {
                seen[v] = true;
            }
        }
        (0..self.n).filter(|&v| seen[v]).collect()
    }

    /// The same vertex set with only the edges selected by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &[usize]) -> bool) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| keep(*i, e))
            .map(|(_, e)| e.clone())
            .collect();
        Hypergraph { n: self.n, k: self.k, edges }
    }

    /// `H[U]`: edges entirely inside `u_set`.
    pub fn induced(&self, u_set: &[usize]) -> Hypergraph {
        induce(self, u_set, Inside::Whole, InduceMode::Keep)
    }
}

fn canonical_edges(n: usize, raw_edges: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    raw_edges
        .into_iter()
        .map(|mut e| {
            if e.is_empty() {
                return Err(Error::InvalidEdge { edge: e, reason: "empty edge" });
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidEdge { edge: e, reason: "repeated vertex" });
            }
            Ok(e)
        })
        .collect()
}

/// Per-vertex degrees and per-pair codegrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degree: Vec<usize>,
    /// Keyed by `(u, v)` with `u < v`; absent pairs have codegree zero.
    pub codegree: HashMap<(usize, usize), usize>,
    pub max_degree: usize,
}

impl DegreeProfile {
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        if u == v {
            return 0;
        }
        let key = (u.min(v), u.max(v));
        self.codegree.get(&key).copied().unwrap_or(0)
    }

    pub fn max_codegree(&self) -> usize {
        self.codegree.values().copied().max().unwrap_or(0)
    }
}

pub fn degree_profile(h: &Hypergraph) -> DegreeProfile {
    let mut degree = vec![0; h.n()];
    let mut codegree = HashMap::new();
    for e in h.edges() {
        for (i, &u) in e.iter().enumerate() {
            degree[u] += 1;
            for &v in &e[i + 1..] {
                *codegree.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    DegreeProfile { degree, codegree, max_degree }
}

/// Which edges survive a restriction to `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inside {
    /// `e ⊆ U`.
    Whole,
    /// `|e ∩ U| >= c`.
    AtLeast(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InduceMode {
    /// Surviving edges become `e ∩ U`.
    Restrict,
    /// Surviving edges are kept whole.
    Keep,
}

/// Sub-multihypergraph of the edges meeting `u_set` enough, per `inside`.
///
/// Under [`InduceMode::Restrict`] an edge whose intersection with `U` is
/// empty is dropped, since empty edges are not allowed.
pub fn induce(h: &Hypergraph, u_set: &[usize], inside: Inside, mode: InduceMode) -> Hypergraph {
    let mut member = vec![false; h.n()];
    for &u in u_set {
        member[u] = true;
    }
    let mut edges = Vec::new();
    for e in h.edges() {
        let hit = e.iter().filter(|&&v| member[v]).count();
        let keep = match inside {
            Inside::Whole => hit == e.len(),
            Inside::AtLeast(c) => hit >= c,
        };
        if !keep {
            continue;
        }
        match mode {
            InduceMode::Keep => edges.push(e.clone()),
            InduceMode::Restrict if hit > 0 => {
                edges.push(e.iter().copied().filter(|&v| member[v]).collect())
            }
            InduceMode::Restrict => {}
        }
    }
    Hypergraph { n: h.n(), k: h.k(), edges }
}

/// A loopless multigraph, stored as pair multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Multigraph {
    n: usize,
    edges: BTreeMap<(usize, usize), u64>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, edges: BTreeMap::new() }
    }

    /// Adds `mult` parallel copies of `{u, v}`.
    pub fn add_edge(&mut self, u: usize, v: usize, mult: u64) -> Result<()> {
        if u == v {
            return Err(Error::InvalidEdge { edge: vec![u, v], reason: "self-loop" });
        }
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::InvalidVertex { vertex: x, n: self.n });
            }
        }
        if mult > 0 {
            *self.edges.entry((u.min(v), u.max(v))).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges counted with multiplicity.
    pub fn m(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Distinct pairs with their multiplicities, `u < v`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &c)| (u, v, c))
    }

    /// Edges (with multiplicity) whose endpoints get different parts.
    pub fn cut_size(&self, parts: &[usize]) -> u64 {
        self.pairs().filter(|&(u, v, _)| parts[u] != parts[v]).map(|(_, _, c)| c).sum()
    }
}

/// `G(H)`: every edge of size `s` becomes a clique `K_s`.
pub fn clique_expand(h: &Hypergraph) -> Multigraph {
    let mut g = Multigraph::new(h.n());
    for e in h.edges() {
        for (i, &u) in e.iter().enumerate() {
            for &v in &e[i + 1..] {
                *g.edges.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    g
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        let h = Hypergraph::build(5, vec![vec![1, 2, 3], vec![3, 4, 5 - 1]]);
        assert!(matches!(h, Err(Error::InvalidEdge { .. })));
        let h = Hypergraph::build(5, vec![vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        assert_eq!((h.n(), h.m(), h.k()), (5, 2, 3));

        let h = Hypergraph::build(3, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.m(), 2);
        assert_eq!(h.edge(1), &[0, 1]);

        assert!(matches!(
            Hypergraph::build(3, vec![vec![0, 0, 1]]),
            Err(Error::InvalidEdge { reason: "repeated vertex", .. })
        ));
        assert!(matches!(Hypergraph::build(3, vec![vec![]]), Err(Error::InvalidEdge { .. })));
        assert_eq!(
            Hypergraph::build(3, vec![vec![0, 3]]),
            Err(Error::InvalidVertex { vertex: 3, n: 3 })
        );
        assert!(matches!(
            Hypergraph::build_with_arity(4, 2, vec![vec![0, 1, 2]]),
            Err(Error::InvalidArity { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn fano_profile() {
        let p = degree_profile(&fano());
        assert!(p.degree.iter().all(|&d| d == 3));
        for u in 0..7 {
            for v in 0..7 {
                if u != v {
                    assert_eq!(p.codegree(u, v), 1);
                }
            }
        }
        assert_eq!(p.max_degree, 3);
    }

    #[test]
    fn matching_and_doubled_profiles() {
        let p = degree_profile(&matching(12, 3));
        assert!(p.degree.iter().all(|&d| d == 1));
        assert!(p.codegree.values().all(|&c| c <= 1));

        let h = Hypergraph::build(3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert_eq!(degree_profile(&h).codegree(0, 1), 2);
    }

    #[test]
    fn induce_examples() {
        let f = fano();
        assert_eq!(f.induced(&[0, 1, 2]).m(), 1);

        let h = Hypergraph::build(4, vec![vec![1, 2, 3]]).unwrap();
        let r = induce(&h, &[1, 2], Inside::AtLeast(2), InduceMode::Restrict);
        assert_eq!(r.edges(), &[vec![1, 2]]);

        assert_eq!(f.induced(&[]).m(), 0);
        assert_eq!(induce(&f, &(0..7).collect::<Vec<_>>(), Inside::AtLeast(0), InduceMode::Keep), f);
    }

    #[test]
    fn clique_expansion_examples() {
        let tri = clique_expand(&Hypergraph::build(3, vec![vec![0, 1, 2]]).unwrap());
        assert_eq!(tri.m(), 3);

        let k7 = clique_expand(&fano());
        assert_eq!(k7.m(), 21);
        assert!(k7.pairs().all(|(_, _, c)| c == 1));

        let k4 = clique_expand(&Hypergraph::build(4, vec![vec![0, 1, 2, 3]]).unwrap());
        assert_eq!(k4.m(), 6);
    }

    fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
        (2usize..10).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::btree_set(0..n, 1..=n.min(5)), 0..12).prop_map(
                move |edges| {
                    Hypergraph::build(n, edges.into_iter().map(|e| e.into_iter().collect()).collect())
                        .unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn expansion_and_degree_totals(h in arb_hypergraph()) {
            let g = clique_expand(&h);
            let pairs: u64 = h.edges().iter().map(|e| (e.len() * (e.len() - 1) / 2) as u64).sum();
            prop_assert_eq!(g.m(), pairs);
            let p = degree_profile(&h);
            prop_assert_eq!(p.degree.iter().sum::<usize>(), h.edges().iter().map(Vec::len).sum::<usize>());
            let all: Vec<usize> = (0..h.n()).collect();
            prop_assert_eq!(induce(&h, &all, Inside::AtLeast(0), InduceMode::Keep), h);
        }
    }
}
