//! The large-excess solver: structure analysis, good partitions, the two
//! almost-linear drivers, the chromatic baseline and the top-level
//! [`solve`] with its [`GuaranteeLedger`].
//!
//! Sampled stages only ever produce advisory promises. Every deterministic
//! promise is conditional on the samples actually drawn and is re-checked
//! against the realized cut before anything is returned.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutspace::{cut_metrics, edge_fraction_2, expected_size, Cut, CutMetrics};
use crate::derand::{
    combine_partial_cuts, erdos_selfridge_2cut, flip_local_search, greedy_order_cut, local_search, order_for_w,
};
use crate::error::{Error, Result};
use crate::exact::{ratio, to_f64, Dyadic, Rational};
use crate::hypergraph::{degree_profile, induce, Hypergraph, InduceMode, Inside};
use crate::reduce::{
    check_weighted_identity, dense_subset_cut, expand_3graph, hpart_double, hpart_expose, lift_2cut_to_3cut,
    rgraph_expand, sample_exposure, sample_outside, weighted_reduce, WeightedGraph,
};

/// Tunable constants of the solver.
///
/// `delta`, `g`, `q` and `p` scale with the edge count as `m^{5/9}`,
/// `m^{7/45}`, `m^{19/45}` and `min(Δ^{-3/5}, g^{-2/3} Δ^{-1/3})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    pub delta: f64,
    pub g: f64,
    pub q: f64,
    pub p: f64,
    pub c: f64,
    pub c_prime: f64,
    pub retry_budget: usize,
    pub trials: usize,
    pub seed: u64,
}

impl PipelineParams {
    pub fn for_edges(m: usize) -> Self {
        let mf = m.max(1) as f64;
        let delta = mf.powf(5.0 / 9.0);
        let g = mf.powf(7.0 / 45.0);
        let q = mf.powf(19.0 / 45.0);
        let p = delta.powf(-0.6).min(g.powf(-2.0 / 3.0) * delta.powf(-1.0 / 3.0));
        PipelineParams { delta, g, q, p, c: 0.25, c_prime: 0.125, retry_budget: 50, trials: 32, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    /// Number of parts in a good partition, `ceil(1/(c' p))`.
    pub fn t(&self) -> usize {
        (1.0 / (self.c_prime * self.p)).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.delta, self.g, self.q, self.p, self.c, self.c_prime];
        if positive.iter().any(|x| !x.is_finite() || *x <= 0.0) || self.p > 1.0 {
            return Err(Error::InvalidParams(format!("pipeline parameters must be positive with p <= 1: {self:?}")));
        }
        if self.retry_budget == 0 || self.trials == 0 {
            return Err(Error::InvalidParams("retry budget and trials must be positive".into()));
        }
        Ok(())
    }
}

/// Per-stage seed derived from a master seed.
pub(crate) fn sub_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PromiseKind {
    /// Proved for the samples actually drawn; a shortfall is a bug.
    Deterministic,
    /// Holds in expectation or by sampling only.
    Advisory,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub claim: String,
    pub promised: Rational,
    pub realized: Rational,
    pub kind: PromiseKind,
}

impl LedgerEntry {
    pub fn holds(&self) -> bool {
        self.realized >= self.promised
    }
}

/// Every promise made during a run next to what the run delivered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GuaranteeLedger {
    pub entries: Vec<LedgerEntry>,
}

impl GuaranteeLedger {
    pub fn deterministic(&mut self, claim: impl Into<String>, promised: Rational, realized: Rational) {
        self.entries.push(LedgerEntry { claim: claim.into(), promised, realized, kind: PromiseKind::Deterministic });
    }

    pub fn advisory(&mut self, claim: impl Into<String>, promised: Rational, realized: Rational) {
        self.entries.push(LedgerEntry { claim: claim.into(), promised, realized, kind: PromiseKind::Advisory });
    }

    /// Appends another ledger's entries, prefixing their claims.
    pub fn absorb(&mut self, prefix: &str, other: GuaranteeLedger) {
        for mut e in other.entries {
            e.claim = format!("{prefix}: {}", e.claim);
            self.entries.push(e);
        }
    }

    /// Fails on the first deterministic entry with realized < promised.
    pub fn verify(&self) -> Result<()> {
        match self.entries.iter().find(|e| e.kind == PromiseKind::Deterministic && !e.holds()) {
            Some(e) => Err(Error::GuaranteeViolation(format!(
                "{}: promised {}, realized {}",
                e.claim, e.promised, e.realized
            ))),
            None => Ok(()),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.verify().is_ok()
    }
}

impl fmt::Display for GuaranteeLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let kind = match e.kind {
                PromiseKind::Deterministic => "deterministic",
                PromiseKind::Advisory => "advisory",
            };
            let status = if e.holds() { "ok" } else if e.kind == PromiseKind::Advisory { "missed" } else { "VIOLATED" };
            writeln!(
                f,
                "[{kind}] {}: promised {:.4}, realized {:.4} ({status})",
                e.claim,
                to_f64(&e.promised),
                to_f64(&e.realized)
            )?;
        }
        Ok(())
    }
}

/// Which structural case an instance falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// At least `q` disjoint pairs of high codegree.
    MatchingCut,
    /// `H[U]` holds at least `m/(4k)` edges.
    DenseInduced,
    /// At least `m/(4k)` edges have `k - 1` vertices in `U`.
    HighUIncidence,
    /// Neither: most edges meet the small set `V \ U` in two or more vertices.
    OutsideDense,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::MatchingCut => "matching-cut",
            Branch::DenseInduced => "dense-induced",
            Branch::HighUIncidence => "high-u-incidence",
            Branch::OutsideDense => "outside-dense",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    /// Unmatched vertices of degree at most `Δ`.
    pub u: Vec<usize>,
    /// Greedy maximal matching among pairs of codegree above `g`.
    pub matching: Vec<(usize, usize)>,
    pub branch: Branch,
    /// `e(H[U])`.
    pub induced_edges: usize,
    /// Edges with at least `k - 1` vertices in `U`.
    pub incident_edges: usize,
    /// `n - 2q - km/Δ`.
    pub u_lower_bound: f64,
}

/// Splits an instance into the structural cases of the solver.
pub fn codegree_structure(h: &Hypergraph, params: &PipelineParams) -> Result<StructureReport> {
    let profile = degree_profile(h);
    let mut heavy: Vec<(usize, usize)> =
        profile.codegree.iter().filter(|(_, &c)| c as f64 > params.g).map(|(&pair, _)| pair).collect();
    heavy.sort_unstable();
    let mut matched = vec![false; h.n()];
    let mut matching = Vec::new();
    for (u, v) in heavy {
        if !matched[u] && !matched[v] {
            matched[u] = true;
            matched[v] = true;
            matching.push((u, v));
        }
    }
    let k = h.max_edge_size();
    let m = h.m();
    let u: Vec<usize> = (0..h.n()).filter(|&v| !matched[v] && profile.degree[v] as f64 <= params.delta).collect();
    let u_lower_bound = h.n() as f64 - 2.0 * params.q - (k * m) as f64 / params.delta;
    let induced_edges = induce(h, &u, Inside::Whole, InduceMode::Keep).m();
    let incident_edges = induce(h, &u, Inside::AtLeast(k.saturating_sub(1).max(1)), InduceMode::Keep).m();
    let branch = if matching.len() as f64 >= params.q {
        Branch::MatchingCut
    } else {
        if (u.len() as f64) < u_lower_bound - 1e-9 {
            return Err(Error::GuaranteeViolation(format!(
                "|U| = {} is below n - 2q - km/Δ = {u_lower_bound:.3}",
                u.len()
            )));
        }
        let threshold = m as f64 / (4.0 * k.max(1) as f64);
        if m > 0 && induced_edges as f64 >= threshold {
            Branch::DenseInduced
        } else if m > 0 && incident_edges as f64 >= threshold {
            Branch::HighUIncidence
        } else {
            Branch::OutsideDense
        }
    };
    Ok(StructureReport { u, matching, branch, induced_edges, incident_edges, u_lower_bound })
}

/// Best of `trials` uniform `r`-cuts conditioned on every matched pair
/// getting two different parts. Returns the cut and its excess.
pub fn conditioned_matching_cut(
    h: &Hypergraph,
    matching: &[(usize, usize)],
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<(Cut, Rational)> {
    if trials == 0 || r < 2 {
        return Err(Error::InvalidParams(format!("need trials > 0 and r >= 2, got {trials} and {r}")));
    }
    let mut used = vec![false; h.n()];
    for &(u, v) in matching {
        for x in [u, v] {
            if x >= h.n() {
                return Err(Error::InvalidVertex { vertex: x, n: h.n() });
            }
            if std::mem::replace(&mut used[x], true) {
                return Err(Error::InvalidParams(format!("vertex {x} appears twice in the matching")));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Cut)> = None;
    for _ in 0..trials {
        let mut cut = Cut::uniform(r, h.n(), &mut rng);
        for &(u, v) in matching {
            let a = rng.gen_range(0..r);
            let mut b = rng.gen_range(0..r - 1);
            if b >= a {
                b += 1;
            }
            cut.set(u, a);
            cut.set(v, b);
        }
        let size = cut.size(h);
        if best.as_ref().is_none_or(|(s, _)| size > *s) {
            best = Some((size, cut));
        }
    }
    let cut = best.expect("trials > 0").1;
    let x = cut_metrics(h, &cut)?.excess;
    Ok((cut, x))
}

/// Exact counts for the four goodness properties of a partition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoodnessAudit {
    /// (i) edges of `∪ G(H')[V_i]`.
    pub within_edges: u64,
    /// (ii) maximum degree of `∪ G(H)[V_i]`.
    pub max_within_degree: u64,
    /// (iii) edges meeting fewer than `|e ∩ T| - 1` parts.
    pub violations_iii: Vec<usize>,
    /// (iv) edge pairs that both have two (different) vertices in one part
    /// and meet outside it within `T`.
    pub violations_iv: Vec<(usize, usize)>,
}

impl GoodnessAudit {
    pub fn violations(&self) -> usize {
        self.violations_iii.len() + self.violations_iv.len()
    }
}

fn part_index(n: usize, parts: &[Vec<usize>]) -> Result<Vec<Option<usize>>> {
    let mut part = vec![None; n];
    for (i, vs) in parts.iter().enumerate() {
        for &v in vs {
            if v >= n {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            if part[v].replace(i).is_some() {
                return Err(Error::InvalidParams(format!("vertex {v} lies in two parts")));
            }
        }
    }
    Ok(part)
}

/// Audits `parts` (a partition of the target set `T`) against `h` and the
/// sub-multigraph given by the edge indices `sub`.
pub fn goodness_audit(h: &Hypergraph, sub: &[usize], parts: &[Vec<usize>]) -> Result<GoodnessAudit> {
    let part = part_index(h.n(), parts)?;
    if let Some(&e) = sub.iter().find(|&&e| e >= h.m()) {
        return Err(Error::InvalidParams(format!("edge index {e} out of range")));
    }
    for &e in sub {
        if let Some(&v) = h.edge(e).iter().find(|&&v| part[v].is_none()) {
            return Err(Error::InvalidParams(format!("vertex {v} of a sub-edge is outside the partition")));
        }
    }
    let mut audit = GoodnessAudit::default();
    let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let per_edge = |e: &[usize], counts: &mut BTreeMap<usize, Vec<usize>>| {
        counts.clear();
        for &v in e {
            if let Some(i) = part[v] {
                counts.entry(i).or_default().push(v);
            }
        }
    };
    for &e in sub {
        per_edge(h.edge(e), &mut counts);
        audit.within_edges += counts.values().map(|vs| (vs.len() * (vs.len() - 1) / 2) as u64).sum::<u64>();
    }
    let mut degree = vec![0u64; h.n()];
    // Keyed by w: (part, pair, edge) for each edge with exactly two vertices in a part.
    type PairHit = (usize, (usize, usize), usize);
    let mut by_outside: HashMap<usize, Vec<PairHit>> = HashMap::new();
    for (ei, e) in h.edges().iter().enumerate() {
        per_edge(e, &mut counts);
        let inside: usize = counts.values().map(Vec::len).sum();
        if counts.len() + 1 < inside {
            audit.violations_iii.push(ei);
        }
        for (&i, vs) in &counts {
            for &v in vs {
                degree[v] += vs.len() as u64 - 1;
            }
            if vs.len() == 2 {
                for &w in e.iter().filter(|&&w| part[w].is_some_and(|j| j != i)) {
                    by_outside.entry(w).or_default().push((i, (vs[0], vs[1]), ei));
                }
            }
        }
    }
    audit.max_within_degree = degree.into_iter().max().unwrap_or(0);
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for list in by_outside.values() {
        for (a, x) in list.iter().enumerate() {
            for y in &list[a + 1..] {
                if x.0 == y.0 && x.1 != y.1 && x.2 != y.2 {
                    pairs.insert((x.2.min(y.2), x.2.max(y.2)));
                }
            }
        }
    }
    audit.violations_iv = pairs.into_iter().collect();
    audit.violations_iv.sort_unstable();
    Ok(audit)
}

/// An accepted partition with the edges deleted to make it good.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodPartition {
    pub parts: Vec<Vec<usize>>,
    pub m_prime: f64,
    pub delta_prime: f64,
    /// Allowed violations: `y = c m' / sqrt(Δ')`, split evenly between (iii) and (iv).
    pub y: f64,
    pub violations_iii: Vec<usize>,
    pub violations_iv: Vec<(usize, usize)>,
    /// Edge indices of `h` to delete: each (iii) violator and the later
    /// edge of each (iv) pair.
    pub deleted_edges: Vec<usize>,
    /// Audit of `h` with `deleted_edges` removed: no violations remain.
    pub audit: GoodnessAudit,
    pub attempts: usize,
}

/// Samples uniform `t`-part partitions of `target` until one is almost
/// good, then deletes the violating edges and re-audits.
///
/// With `p' = c' p`: `m' = p' e(G(H'))/2`, `Δ' = 2 p' k Δ`, and a sample is
/// accepted when (ii) holds, at most `y/2` edges violate (iii), at most
/// `y/2` pairs violate (iv), and (i) still reaches `m'` after deletion.
pub fn good_partition_search(
    h: &Hypergraph,
    sub: &[usize],
    target: &[usize],
    params: &PipelineParams,
) -> Result<GoodPartition> {
    params.validate()?;
    let p_prime = params.c_prime * params.p;
    let k = h.max_edge_size().max(2) as f64;
    let clique_edges: usize = sub.iter().map(|&e| h.edge(e).len() * (h.edge(e).len() - 1) / 2).sum();
    let m_prime = p_prime * clique_edges as f64 / 2.0;
    let delta_prime = 2.0 * p_prime * k * params.delta;
    let y = params.c * m_prime / delta_prime.sqrt();
    let t = if target.len() <= 1 { 1 } else { params.t() };
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, 0x600d));
    let mut best: Option<GoodnessAudit> = None;
    for attempt in 1..=params.retry_budget {
        let mut parts = vec![Vec::new(); t];
        for &v in target {
            parts[rng.gen_range(0..t)].push(v);
        }
        parts.retain(|p| !p.is_empty());
        let audit = goodness_audit(h, sub, &parts)?;
        let almost = audit.max_within_degree as f64 <= delta_prime
            && audit.violations_iii.len() as f64 <= y / 2.0
            && audit.violations_iv.len() as f64 <= y / 2.0;
        if almost {
            let mut deleted: Vec<usize> = audit.violations_iii.clone();
            deleted.extend(audit.violations_iv.iter().map(|&(_, later)| later));
            deleted.sort_unstable();
            deleted.dedup();
            let keep: Vec<bool> = (0..h.m()).map(|e| deleted.binary_search(&e).is_err()).collect();
            let (pruned, remap) = prune(h, &keep);
            let pruned_sub: Vec<usize> = sub.iter().filter_map(|&e| remap[e]).collect();
            let after = goodness_audit(&pruned, &pruned_sub, &parts)?;
            if after.violations() != 0 {
                return Err(Error::GuaranteeViolation("deleting the violators left violations behind".into()));
            }
            if after.within_edges as f64 >= m_prime {
                return Ok(GoodPartition {
                    parts,
                    m_prime,
                    delta_prime,
                    y,
                    violations_iii: audit.violations_iii,
                    violations_iv: audit.violations_iv,
                    deleted_edges: deleted,
                    audit: after,
                    attempts: attempt,
                });
            }
        }
        if best.as_ref().is_none_or(|b| audit.violations() < b.violations()) {
            best = Some(audit);
        }
    }
    let b = best.unwrap_or_default();
    Err(Error::SearchFailed(format!(
        "no good partition in {} attempts (m' = {m_prime:.3}, Δ' = {delta_prime:.3}, y/2 = {:.3}); best audit: \
         (i) {}, (ii) {}, {} (iii) and {} (iv) violations",
        params.retry_budget,
        y / 2.0,
        b.within_edges,
        b.max_within_degree,
        b.violations_iii.len(),
        b.violations_iv.len()
    )))
}

/// `h` without the edges where `keep` is false, and the old-to-new index map.
fn prune(h: &Hypergraph, keep: &[bool]) -> (Hypergraph, Vec<Option<usize>>) {
    let mut remap = vec![None; h.m()];
    let mut next = 0;
    for (e, slot) in remap.iter_mut().enumerate() {
        if keep[e] {
            *slot = Some(next);
            next += 1;
        }
    }
    (h.filter_edges(|e, _| keep[e]), remap)
}

fn shuffled(vs: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let mut v = vs.to_vec();
    v.shuffle(rng);
    v
}

/// Greedy cuts of the weighted graphs of each part, on one instance.
/// Returns each part's partial cut and its exact average excess.
fn greedy_parts(fwd: &Hypergraph, parts: &[Vec<usize>], rng: &mut impl Rng) -> Result<(Vec<Vec<usize>>, Dyadic)> {
    let mut partials = Vec::with_capacity(parts.len());
    let mut sum = Dyadic::zero();
    for vs in parts {
        let r_i = weighted_reduce(fwd, vs)?;
        let (cut, ledger) = greedy_order_cut(&r_i, &shuffled(vs, rng))?;
        let x = check_weighted_identity(fwd, &r_i, vs, &cut)?;
        if x != ledger.realized_excess {
            return Err(Error::GuaranteeViolation(format!(
                "greedy gains {} differ from the part's average excess {x}",
                ledger.realized_excess
            )));
        }
        sum += x;
        partials.push(vs.iter().map(|&v| cut.part(v)).collect());
    }
    Ok((partials, sum))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Driver3Report {
    pub partition: GoodPartition,
    /// Forward pair edges whose exposed vertex lies in `U` (independent
    /// randomness) and outside it, for the chosen exposure.
    pub good_edges: usize,
    pub bad_edges: usize,
    /// `Σ x_i` for the chosen exposure.
    pub sum_x: Rational,
    /// `E[Z | ρ] - E Z` for the chosen exposure.
    pub shift: Rational,
}

/// 3-cuts of 3-graphs with bounded degrees and codegrees on `U`.
///
/// For each trial: expose which vertices land in part 2 of a uniform 3-cut,
/// reduce to the pair multigraph of the rest, greedily cut each part of a
/// good partition of `U`, combine, and merge back. Keeps the best trial.
pub fn driver_3cut(
    h: &Hypergraph,
    u: &[usize],
    params: &PipelineParams,
) -> Result<(Cut, GuaranteeLedger, Option<Driver3Report>)> {
    if let Some(e) = h.edges().iter().find(|e| e.len() != 3) {
        return Err(Error::InvalidArity { expected: 3, found: e.len() });
    }
    params.validate()?;
    if h.m() == 0 {
        return Ok((Cut::monochromatic(3, h.n()), GuaranteeLedger::default(), None));
    }
    let mut in_u = vec![false; h.n()];
    for &v in u {
        in_u[v] = true;
    }
    let sub: Vec<usize> = (0..h.m()).filter(|&e| h.edge(e).iter().all(|&v| in_u[v])).collect();
    let partition = good_partition_search(h, &sub, u, params)?;
    let expected = expected_size(h, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, 0x3c));
    let mut best: Option<(usize, Cut, GuaranteeLedger, Driver3Report)> = None;
    for _ in 0..params.trials {
        let rho = sample_exposure(h.n(), 3, 2, &mut rng);
        let ex = hpart_expose(h, 3, &rho, 2)?;
        let parts: Vec<Vec<usize>> = partition
            .parts
            .iter()
            .map(|vs| vs.iter().copied().filter(|&v| rho.get(v).is_none()).collect())
            .collect();
        let (partials, sum_x) = greedy_parts(&ex.forward, &parts, &mut rng)?;
        let (phi, plan) = combine_partial_cuts(&ex.forward, &parts, &partials)?;
        let cut = ex.back_map(&phi)?;
        let metrics = cut_metrics(h, &cut)?;
        let shift = ex.shift();
        let mut ledger = GuaranteeLedger::default();
        ledger.deterministic(
            "3-cut driver: exposed pair graph excess >= sum of part excesses",
            sum_x.to_rational(),
            plan.realized_excess.to_rational(),
        );
        ledger.deterministic(
            "3-cut driver: excess >= sum of part excesses + E[Z|rho] - E Z",
            sum_x.to_rational() + &shift,
            metrics.excess.clone(),
        );
        debug_assert_eq!(metrics.expected, expected);
        let (mut good_edges, mut bad_edges) = (0, 0);
        let part_of = part_index(h.n(), &parts)?;
        for (fe, e) in ex.forward.edges().iter().enumerate() {
            if part_of[e[0]].is_some() && part_of[e[0]] == part_of[e[1]] {
                let exposed = h.edge(ex.origin[fe]).iter().copied().find(|v| !e.contains(v)).unwrap();
                if in_u[exposed] {
                    good_edges += 1;
                } else {
                    bad_edges += 1;
                }
            }
        }
        let report =
            Driver3Report { partition: partition.clone(), good_edges, bad_edges, sum_x: sum_x.to_rational(), shift };
        if best.as_ref().is_none_or(|(s, ..)| metrics.size as usize > *s) {
            best = Some((metrics.size as usize, cut, ledger, report));
        }
    }
    let (_, cut, ledger, report) = best.expect("trials > 0");
    ledger.verify()?;
    Ok((cut, ledger, Some(report)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Driver2Report {
    pub partition: GoodPartition,
    pub w_size: usize,
    /// `Σ e(G_i)` for the chosen `W` and its expectation over random `W`.
    pub g_edges: usize,
    pub g_expected: f64,
    pub sum_x: Rational,
    pub shift: Rational,
    /// Expected size of the edges deleted to make the partition good.
    pub deleted_weight: Rational,
    /// Set when `U ≠ V` and the outside of `U` was exposed first.
    pub outer_shift: Option<Rational>,
}

/// 2-cuts of mixed hypergraphs with many edges of size at least four and
/// bounded degrees and codegrees on `active`.
///
/// When `active` misses vertices of some edge, their parts are exposed
/// first (resampled until the conditional expectation is at least the
/// plain one) and the driver runs on the averaged instance.
pub fn driver_2cut(
    h: &Hypergraph,
    active: &[usize],
    params: &PipelineParams,
) -> Result<(Cut, GuaranteeLedger, Driver2Report)> {
    params.validate()?;
    let mut in_a = vec![false; h.n()];
    for &v in active {
        in_a[v] = true;
    }
    if h.edges().iter().all(|e| e.iter().all(|&v| in_a[v])) {
        return driver_2cut_inner(h, params);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, 0x0b));
    let mut found = None;
    for _ in 0..params.retry_budget {
        let rho = sample_outside(h.n(), active, &mut rng);
        let d = hpart_double(h, active, &rho)?;
        if !d.shift().is_negative() {
            found = Some(d);
            break;
        }
    }
    let d = found.ok_or_else(|| Error::SearchFailed("no exposure of the outside with E[Z|rho] >= E Z".into()))?;
    let (phi, inner, mut report) = driver_2cut_inner(&d.forward, params)?;
    let cut = d.back_map(&phi)?;
    let fwd_excess = cut_metrics(&d.forward, &phi)?.excess;
    let excess = cut_metrics(h, &cut)?.excess;
    let shift = d.shift().to_rational();
    let mut ledger = GuaranteeLedger::default();
    ledger.absorb("averaged instance", inner);
    ledger.deterministic("averaging: excess >= x'/2 + E[Z|rho] - E Z", fwd_excess * ratio(1, 2) + &shift, excess);
    report.outer_shift = Some(shift);
    ledger.verify()?;
    Ok((cut, ledger, report))
}

fn driver_2cut_inner(h: &Hypergraph, params: &PipelineParams) -> Result<(Cut, GuaranteeLedger, Driver2Report)> {
    let k = h.max_edge_size().max(1);
    let big: Vec<usize> = (0..h.m()).filter(|&e| h.edge(e).len() >= 4).collect();
    if big.is_empty() || (big.len() as f64) < h.m() as f64 / (4.0 * k as f64) {
        return Err(Error::DriverInapplicable(format!(
            "{} of {} edges have size >= 4, fewer than m/(4k)",
            big.len(),
            h.m()
        )));
    }
    let target = induce(h, &h.covered_vertices(4), Inside::AtLeast(4), InduceMode::Keep).covered_vertices(4);
    let partition = good_partition_search(h, &big, &target, params)?;
    let keep: Vec<bool> = (0..h.m()).map(|e| partition.deleted_edges.binary_search(&e).is_err()).collect();
    let (pruned, _) = prune(h, &keep);
    let deleted_weight: Rational =
        partition.deleted_edges.iter().map(|&e| edge_fraction_2(h.edge(e).len()).to_rational()).sum();

    // H_i: edges of size >= 4 meeting V_i in exactly two vertices.
    let part_of = part_index(h.n(), &partition.parts)?;
    let mut h_i: Vec<(usize, usize, &[usize])> = Vec::new();
    let mut g_expected = 0.0;
    for e in pruned.edges().iter().filter(|e| e.len() >= 4) {
        let mut by_part: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in e {
            if let Some(i) = part_of[v] {
                by_part.entry(i).or_default().push(v);
            }
        }
        for vs in by_part.values().filter(|vs| vs.len() == 2) {
            h_i.push((vs[0], vs[1], e));
            let s = e.len() as i32 - 2;
            g_expected += 0.25 * (1.0 - 2f64.powi(-s) - s as f64 * 2f64.powi(-s));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, 0x2c));
    let mut best_w: Option<(usize, Vec<bool>)> = None;
    for _ in 0..params.retry_budget {
        let in_w: Vec<bool> = (0..h.n()).map(|_| rng.gen_bool(0.5)).collect();
        let g = h_i
            .iter()
            .filter(|(u, v, e)| in_w[*u] && in_w[*v] && e.iter().filter(|&&x| !in_w[x]).count() >= 2)
            .count();
        if best_w.as_ref().is_none_or(|(b, _)| g > *b) {
            best_w = Some((g, in_w));
        }
        if g as f64 >= g_expected / 2.0 {
            break;
        }
    }
    let (g_edges, in_w) = best_w.expect("retry budget > 0");
    let w: Vec<usize> = (0..h.n()).filter(|&v| in_w[v]).collect();
    let parts: Vec<Vec<usize>> =
        partition.parts.iter().map(|vs| vs.iter().copied().filter(|&v| in_w[v]).collect()).collect();

    let expected = expected_size(&pruned, 2);
    let mut best: Option<(usize, Cut, GuaranteeLedger, Rational, Rational)> = None;
    for _ in 0..params.trials {
        let mut double = None;
        for _ in 0..params.retry_budget {
            let rho = sample_outside(h.n(), &w, &mut rng);
            let d = hpart_double(&pruned, &w, &rho)?;
            if !d.shift().is_negative() {
                double = Some(d);
                break;
            }
        }
        let d = double.ok_or_else(|| Error::SearchFailed("no exposure with E[Z|rho] >= E Z".into()))?;
        let (partials, sum_x) = greedy_parts(&d.forward, &parts, &mut rng)?;
        let (phi, plan) = combine_partial_cuts(&d.forward, &parts, &partials)?;
        let cut = d.back_map(&phi)?;
        let shift = d.shift().to_rational();
        let on_pruned = cut_metrics(&pruned, &cut)?;
        debug_assert_eq!(on_pruned.expected, expected);
        let on_h = cut_metrics(h, &cut)?;
        let promise = sum_x.to_rational() * ratio(1, 2) + &shift;
        let mut ledger = GuaranteeLedger::default();
        ledger.deterministic(
            "2-cut driver: averaged instance excess >= sum of part excesses",
            sum_x.to_rational(),
            plan.realized_excess.to_rational(),
        );
        ledger.deterministic(
            "2-cut driver: pruned excess >= sum/2 + E[Z|rho] - E Z",
            promise.clone(),
            on_pruned.excess.clone(),
        );
        ledger.deterministic(
            "2-cut driver: excess >= pruned promise - deleted edges' expectation",
            promise - &deleted_weight,
            on_h.excess.clone(),
        );
        if best.as_ref().is_none_or(|(s, ..)| on_h.size as usize > *s) {
            best = Some((on_h.size as usize, cut, ledger, sum_x.to_rational(), shift));
        }
    }
    let (_, cut, ledger, sum_x, shift) = best.expect("trials > 0");
    ledger.verify()?;
    let report = Driver2Report {
        partition,
        w_size: w.len(),
        g_edges,
        g_expected,
        sum_x,
        shift,
        deleted_weight,
        outer_shift: None,
    };
    Ok((cut, ledger, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChromaticCut {
    pub cut: Cut,
    /// Number of colour classes of the greedy strong colouring.
    pub chi: usize,
    pub excess: Rational,
}

/// Greedy strong colouring: no two vertices sharing an edge get the same
/// colour. Vertices are coloured by decreasing degree.
pub fn strong_colouring(h: &Hypergraph) -> Vec<usize> {
    let inc = h.incidence();
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(inc[v].len()), v));
    let mut colour = vec![usize::MAX; h.n()];
    let mut blocked: Vec<usize> = Vec::new();
    for v in order {
        blocked.clear();
        for &e in &inc[v] {
            blocked.extend(h.edge(e).iter().map(|&u| colour[u]).filter(|&c| c != usize::MAX));
        }
        blocked.sort_unstable();
        blocked.dedup();
        colour[v] = (0..).find(|c| blocked.binary_search(c).is_err()).unwrap();
    }
    colour
}

/// Best of `trials` random splits of the strong colour classes (padded to a
/// multiple of `r`) into `r` equal groups.
pub fn chromatic_cut(h: &Hypergraph, r: usize, trials: usize, seed: u64) -> Result<ChromaticCut> {
    if trials == 0 || r < 2 {
        return Err(Error::InvalidParams(format!("need trials > 0 and r >= 2, got {trials} and {r}")));
    }
    let colour = strong_colouring(h);
    let chi = colour.iter().map(|&c| c + 1).max().unwrap_or(0);
    let padded = chi.div_ceil(r).max(1) * r;
    let per_group = padded / r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<usize> = (0..padded).collect();
    let mut best: Option<(usize, Cut)> = None;
    for _ in 0..trials {
        classes.shuffle(&mut rng);
        let mut group = vec![0; padded];
        for (pos, &c) in classes.iter().enumerate() {
            group[c] = pos / per_group;
        }
        let cut = Cut::new(r, colour.iter().map(|&c| group[c]).collect())?;
        let size = cut.size(h);
        if best.as_ref().is_none_or(|(s, _)| size > *s) {
            best = Some((size, cut));
        }
    }
    let cut = best.expect("trials > 0").1;
    let excess = cut_metrics(h, &cut)?.excess;
    Ok(ChromaticCut { cut, chi, excess })
}

/// Which construction produced the structural candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Trivial,
    MatchingCut,
    DenseSubset,
    Driver3,
    Expand3Graph,
    GraphGreedy,
    Driver2,
    ExposeThenDriver2,
    RgraphExpand,
    ExposeThenDriver3,
    /// The structural route did not apply; only baselines ran.
    BaselinesOnly,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Trivial => "trivial",
            Route::MatchingCut => "matching-cut",
            Route::DenseSubset => "dense-subset",
            Route::Driver3 => "driver-3cut",
            Route::Expand3Graph => "expand-3graph",
            Route::GraphGreedy => "graph-greedy",
            Route::Driver2 => "driver-2cut",
            Route::ExposeThenDriver2 => "expose+driver-2cut",
            Route::RgraphExpand => "rgraph-expand",
            Route::ExposeThenDriver3 => "expose+driver-3cut",
            Route::BaselinesOnly => "baselines-only",
        }
    }
}

/// Outcome of [`solve`].
#[derive(Clone, Debug)]
pub struct Solution {
    pub cut: Cut,
    pub metrics: CutMetrics,
    pub ledger: GuaranteeLedger,
    pub route: Route,
    pub structure: Option<StructureReport>,
    /// Each candidate's name and excess before the final local search.
    pub candidates: Vec<(String, Rational)>,
    /// Why the structural route was skipped, if it was.
    pub skipped: Option<String>,
    /// Largest deterministic lower bound certified for a candidate; the
    /// final excess is at least this.
    pub guarantee: Option<Rational>,
}

struct Candidates {
    h: Hypergraph,
    list: Vec<(String, Cut, Rational)>,
    guarantee: Option<Rational>,
}

impl Candidates {
    fn add(&mut self, name: &str, cut: Cut) -> Result<Rational> {
        let x = cut_metrics(&self.h, &cut)?.excess;
        self.list.push((name.to_string(), cut, x.clone()));
        Ok(x)
    }

    /// Adds a candidate with a deterministic promise, recorded in `ledger`.
    fn certify(&mut self, ledger: &mut GuaranteeLedger, claim: &str, name: &str, cut: Cut, promised: Rational) -> Result<()> {
        let x = self.add(name, cut)?;
        if self.guarantee.as_ref().is_none_or(|g| promised > *g) {
            self.guarantee = Some(promised.clone());
        }
        ledger.deterministic(claim, promised, x);
        Ok(())
    }
}

/// Samples exposures until the conditional expectation reaches the plain
/// one.
fn expose_nonnegative(
    h: &Hypergraph,
    r: usize,
    free: usize,
    params: &PipelineParams,
    tag: u64,
) -> Result<crate::reduce::Exposure> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, tag));
    for _ in 0..params.retry_budget {
        let rho = sample_exposure(h.n(), r, free, &mut rng);
        let ex = hpart_expose(h, r, &rho, free)?;
        if !ex.shift().is_negative() {
            return Ok(ex);
        }
    }
    Err(Error::SearchFailed(format!("no {r}-part exposure with E[Z|rho] >= E Z")))
}

/// Guarantee-checked large-excess `r`-cut.
///
/// Runs the chromatic and conditional-expectation baselines, the structural
/// route for the instance's case, polishes the best candidate with local
/// search, and verifies every deterministic ledger entry.
pub fn solve(h: &Hypergraph, r: usize, params: &PipelineParams) -> Result<Solution> {
    params.validate()?;
    if r < 2 {
        return Err(Error::InvalidParams(format!("need r >= 2, got {r}")));
    }
    if h.m() == 0 {
        let cut = Cut::monochromatic(r, h.n());
        let metrics = cut_metrics(h, &cut)?;
        return Ok(Solution {
            cut,
            metrics,
            ledger: GuaranteeLedger::default(),
            route: Route::Trivial,
            structure: None,
            candidates: Vec::new(),
            skipped: None,
            guarantee: Some(Rational::zero()),
        });
    }
    let k = h.max_edge_size();
    if r > k {
        return Err(Error::InvalidParams(format!("need r <= k, got r = {r}, k = {k}")));
    }
    let mut ledger = GuaranteeLedger::default();
    let mut cands = Candidates { h: h.clone(), list: Vec::new(), guarantee: None };

    let chrom = chromatic_cut(h, r, params.trials, sub_seed(params.seed, 1))?;
    let x = cands.add("chromatic", chrom.cut)?;
    ledger.advisory(format!("chromatic split of {} colour classes: excess >= 0", chrom.chi), Rational::zero(), x);

    let es = es_baseline(h, r, params, &mut ledger);
    let best_2cut = match es {
        Ok((cut, promised)) => {
            let claim = if r == 2 {
                "conditional expectations: excess >= guarantee"
            } else {
                "exposure: excess >= forward guarantee + E[Z|rho] - E Z"
            };
            cands.certify(&mut ledger, claim, "conditional-expectation", cut.clone(), promised)?;
            (r == 2).then_some(cut)
        }
        Err(e) if e.is_internal_violation() => return Err(e),
        Err(_) => None,
    };

    let structure = codegree_structure(h, params)?;
    let (route, skipped) = match structural_route(h, r, params, &structure, best_2cut, &mut cands, &mut ledger) {
        Ok(route) => (route, None),
        Err(e) if e.is_internal_violation() => return Err(e),
        Err(e) => (Route::BaselinesOnly, Some(e.to_string())),
    };

    let best = cands
        .list
        .iter()
        .max_by(|a, b| a.2.cmp(&b.2))
        .expect("the chromatic baseline always yields a candidate");
    let best_excess = best.2.clone();
    let cut = local_search(h, &best.1);
    let metrics = cut_metrics(h, &cut)?;
    ledger.deterministic("local search: excess >= best candidate", best_excess, metrics.excess.clone());
    ledger.verify()?;
    Ok(Solution {
        cut,
        metrics,
        ledger,
        route,
        structure: Some(structure),
        candidates: cands.list.into_iter().map(|(n, _, x)| (n, x)).collect(),
        skipped,
        guarantee: cands.guarantee,
    })
}

/// The conditional-expectation baseline: directly for `r = 2`, after
/// exposing parts `2..r` otherwise. Returns the cut and its guarantee.
fn es_baseline(h: &Hypergraph, r: usize, params: &PipelineParams, ledger: &mut GuaranteeLedger) -> Result<(Cut, Rational)> {
    if r == 2 {
        let (cut, _, promised) = es_with_order(h, params, ledger, "")?;
        return Ok((cut, promised));
    }
    let ex = expose_nonnegative(h, r, 2, params, 2)?;
    let (phi, x_fwd, promised) = es_with_order(&ex.forward, params, ledger, "exposed instance: ")?;
    let cut = ex.back_map(&phi)?;
    let x = cut_metrics(h, &cut)?.excess;
    ledger.deterministic("exposure: excess = forward excess + E[Z|rho] - E Z", x_fwd + ex.shift(), x);
    Ok((cut, promised + ex.shift()))
}

/// Conditional expectations on a well-spread order. Returns the cut, its
/// excess, and the best deterministic guarantee.
fn es_with_order(
    h: &Hypergraph,
    params: &PipelineParams,
    ledger: &mut GuaranteeLedger,
    prefix: &str,
) -> Result<(Cut, Rational, Rational)> {
    let order = order_for_w(h, params.trials, sub_seed(params.seed, 3));
    let (cut, es) = erdos_selfridge_2cut(h, &order)?;
    let x = es.realized_excess.to_rational();
    let mut promised = es.guaranteed_excess.to_rational();
    ledger.deterministic(
        format!("{prefix}conditional expectations: excess >= (|D| + sum |U_v|)/2^k"),
        promised.clone(),
        x.clone(),
    );
    let n_prime = h.covered_vertices(3).len();
    if n_prime > 0 {
        let bound = ratio(n_prime as i64, (es.k as i64) << (es.k - 1));
        let claim = format!("{prefix}conditional expectations: excess >= n'/(k 2^(k-1))");
        if es.w_set.len() * es.k >= 2 * n_prime {
            promised = promised.max(bound.clone());
            ledger.deterministic(claim, bound, x.clone());
        } else {
            ledger.advisory(claim, bound, x.clone());
        }
    }
    Ok((cut, x, promised))
}

#[allow(clippy::too_many_arguments)]
fn structural_route(
    h: &Hypergraph,
    r: usize,
    params: &PipelineParams,
    st: &StructureReport,
    best_2cut: Option<Cut>,
    cands: &mut Candidates,
    ledger: &mut GuaranteeLedger,
) -> Result<Route> {
    let k = h.max_edge_size();
    match st.branch {
        Branch::MatchingCut => {
            let (cut, x) = conditioned_matching_cut(h, &st.matching, r, params.trials, sub_seed(params.seed, 4))?;
            ledger.advisory("matching-conditioned cut: excess >= 0", Rational::zero(), x);
            cands.add("matching-cut", cut)?;
            return Ok(Route::MatchingCut);
        }
        Branch::OutsideDense => {
            let outside: Vec<usize> = {
                let mut in_u = vec![false; h.n()];
                st.u.iter().for_each(|&v| in_u[v] = true);
                (0..h.n()).filter(|&v| !in_u[v]).collect()
            };
            let (cut, x) = dense_subset_cut(h, &outside, r, params.trials, sub_seed(params.seed, 5))?;
            ledger.advisory("dense-subset cut: excess >= 0", Rational::zero(), x);
            cands.add("dense-subset", cut)?;
            return Ok(Route::DenseSubset);
        }
        Branch::DenseInduced | Branch::HighUIncidence => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(params.seed, 6));
    match (r, k) {
        (3, 3) => {
            let (cut, inner, _) = driver_3cut(h, &st.u, params)?;
            ledger.absorb("driver", inner);
            cands.add("driver-3cut", cut)?;
            let two = match best_2cut {
                Some(c) => c,
                None => {
                    let mut scratch = GuaranteeLedger::default();
                    let (c, _, _) = es_with_order(h, params, &mut scratch, "")?;
                    ledger.absorb("2-cut for lifting", scratch);
                    c
                }
            };
            let x2 = cut_metrics(h, &two)?.excess;
            let lifted = lift_2cut_to_3cut(h, &two)?;
            cands.certify(ledger, "lift: 3-cut excess >= 8/27 of the 2-cut excess", "lifted-2cut", lifted, x2 * ratio(8, 27))?;
            Ok(Route::Driver3)
        }
        (2, 3) => {
            let ex = expand_3graph(h)?;
            let g = WeightedGraph::from(&ex.forward);
            let order = shuffled(&(0..h.n()).collect::<Vec<_>>(), &mut rng);
            let (cut, gl) = greedy_order_cut(&g, &order)?;
            let cut = ex.back_map(&flip_local_search(&g, &cut))?;
            let promised = gl.realized_excess.half().to_rational();
            cands.certify(ledger, "3-graph expansion: excess >= greedy gains / 2", "expand-3graph", cut, promised)?;
            Ok(Route::Expand3Graph)
        }
        (2, 2) => {
            let g = WeightedGraph::from(&crate::hypergraph::clique_expand(h));
            let order = shuffled(&(0..h.n()).collect::<Vec<_>>(), &mut rng);
            let (cut, gl) = greedy_order_cut(&g, &order)?;
            let cut = flip_local_search(&g, &cut);
            cands.certify(ledger, "graph greedy: excess >= greedy gains", "graph-greedy", cut, gl.realized_excess.to_rational())?;
            Ok(Route::GraphGreedy)
        }
        (2, _) => {
            let (cut, inner, _) = driver_2cut(h, &st.u, params)?;
            ledger.absorb("driver", inner);
            cands.add("driver-2cut", cut)?;
            Ok(Route::Driver2)
        }
        (r, k) if r + 2 <= k => {
            let ex = expose_nonnegative(h, r, 2, params, 7)?;
            let active: Vec<usize> = st.u.iter().copied().filter(|&v| ex.rho.get(v).is_none()).collect();
            let (phi, inner, _) = driver_2cut(&ex.forward, &active, params)?;
            let x_fwd = cut_metrics(&ex.forward, &phi)?.excess;
            let cut = ex.back_map(&phi)?;
            ledger.absorb("exposed instance", inner);
            let claim = "exposure: excess = forward excess + E[Z|rho] - E Z";
            cands.certify(ledger, claim, "expose+driver-2cut", cut, x_fwd + ex.shift())?;
            Ok(Route::ExposeThenDriver2)
        }
        (r, k) if r + 1 == k => {
            let ex = rgraph_expand(h, r)?;
            let fwd_params = PipelineParams { seed: sub_seed(params.seed, 8), ..PipelineParams::for_edges(ex.forward.m()) }
                .with_trials(params.trials);
            let inner = solve(&ex.forward, r, &fwd_params)?;
            let cut = ex.back_map(&inner.cut)?;
            ledger.absorb("expanded instance", inner.ledger);
            let claim = "r-graph expansion: excess = forward excess / 2";
            cands.certify(ledger, claim, "rgraph-expand", cut, inner.metrics.excess * ratio(1, 2))?;
            Ok(Route::RgraphExpand)
        }
        (r, _) => {
            let ex = expose_nonnegative(h, r, 3, params, 9)?;
            let active: Vec<usize> = st.u.iter().copied().filter(|&v| ex.rho.get(v).is_none()).collect();
            let (phi, inner, _) = driver_3cut(&ex.forward, &active, params)?;
            let x_fwd = cut_metrics(&ex.forward, &phi)?.excess;
            let cut = ex.back_map(&phi)?;
            ledger.absorb("exposed instance", inner);
            let claim = "exposure: excess = forward excess + E[Z|rho] - E Z";
            cands.certify(ledger, claim, "expose+driver-3cut", cut, x_fwd + ex.shift())?;
            Ok(Route::ExposeThenDriver3)
        }
    }
}

/// Expected cut size as a float, for reports.
pub fn expected_size_f64(h: &Hypergraph, r: usize) -> f64 {
    expected_size(h, r).to_f64().unwrap_or(f64::NAN)
}
