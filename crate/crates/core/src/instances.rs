//! Instance generators and exact oracles.
//!
//! Generators are deterministic given their seed. The oracles enumerate:
//! [`exact_maxcut`] for optimal cuts of small instances,
//! [`monotonicity_check`] for conditional multicolouring probabilities, and
//! [`moment_audit`] samples the fluctuations of the weighted-reduction
//! weights.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cutspace::Cut;
use crate::error::{Error, Result};
use crate::exact::{binomial, Rational};
use crate::hypergraph::Hypergraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Sts,
    Random,
    Matching,
    Complete,
    LinearRandom,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Sts, Family::Random, Family::Matching, Family::Complete, Family::LinearRandom];

    pub fn name(self) -> &'static str {
        match self {
            Family::Sts => "sts",
            Family::Random => "random",
            Family::Matching => "matching",
            Family::Complete => "complete",
            Family::LinearRandom => "linear-random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown family {s:?}")))
    }
}

/// What to generate. `k` is ignored for `sts`; `p` is read by `random`,
/// `m_target` by `linear-random`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub p: Option<f64>,
    pub m_target: Option<usize>,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, k: usize) -> Self {
        GenSpec { family, n, k, p: None, m_target: None, seed: 0 }
    }
}

pub fn generate(spec: &GenSpec) -> Result<Hypergraph> {
    match spec.family {
        Family::Sts => steiner_triple_system(spec.n),
        Family::Matching => perfect_matching(spec.n, spec.k),
        Family::Complete => complete(spec.n, spec.k),
        Family::Random => {
            let p = spec.p.ok_or_else(|| Error::InvalidParams("random family needs p".into()))?;
            binomial_random(spec.n, spec.k, p, spec.seed)
        }
        Family::LinearRandom => {
            let m = spec.m_target.ok_or_else(|| Error::InvalidParams("linear-random family needs m_target".into()))?;
            linear_random(spec.n, spec.k, m, spec.seed)
        }
    }
}

/// A Steiner triple system on `n ≡ 1, 3 (mod 6)` points: Bose's
/// construction for `n = 6t + 3`, Skolem's for `n = 6t + 1`.
pub fn steiner_triple_system(n: usize) -> Result<Hypergraph> {
    let triples = match n % 6 {
        3 => bose((n - 3) / 6),
        1 => skolem((n - 1) / 6),
        _ => return Err(Error::InvalidParams(format!("no Steiner triple system on {n} points; need n = 1 or 3 mod 6"))),
    };
    let h = Hypergraph::build(n, triples)?;
    validate_sts(&h)?;
    Ok(h)
}

fn bose(t: usize) -> Vec<Vec<usize>> {
    let v = 2 * t + 1;
    let id = |x: usize, i: usize| x + v * (i % 3);
    let op = |x: usize, y: usize| ((t + 1) * (x + y)) % v;
    let mut out: Vec<Vec<usize>> = (0..v).map(|x| vec![id(x, 0), id(x, 1), id(x, 2)]).collect();
    for x in 0..v {
        for y in x + 1..v {
            for i in 0..3 {
                out.push(vec![id(x, i), id(y, i), id(op(x, y), i + 1)]);
            }
        }
    }
    out
}

fn skolem(t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return Vec::new();
    }
    let v = 2 * t;
    let inf = 3 * v;
    let id = |x: usize, i: usize| x + v * (i % 3);
    let sigma = |z: usize| if z.is_multiple_of(2) { z / 2 } else { (z - 1) / 2 + t };
    let op = |x: usize, y: usize| sigma((x + y) % v);
    let mut out = Vec::new();
    for x in 0..t {
        out.push(vec![id(x, 0), id(x, 1), id(x, 2)]);
        for i in 0..3 {
            out.push(vec![inf, id(x + t, i), id(x, i + 1)]);
        }
    }
    for x in 0..v {
        for y in x + 1..v {
            for i in 0..3 {
                out.push(vec![id(x, i), id(y, i), id(op(x, y), i + 1)]);
            }
        }
    }
    out
}

/// Checks that `h` is 3-uniform and covers every pair exactly once.
pub fn validate_sts(h: &Hypergraph) -> Result<()> {
    let n = h.n();
    if !h.is_uniform(3) {
        return Err(Error::InvalidParams("a Steiner triple system is 3-uniform".into()));
    }
    let mut seen = vec![0u8; n * n];
    for e in h.edges() {
        for (i, &a) in e.iter().enumerate() {
            for &b in &e[i + 1..] {
                seen[a * n + b] += 1;
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if seen[a * n + b] != 1 {
                return Err(Error::InvalidParams(format!("pair {{{a}, {b}}} is covered {} times", seen[a * n + b])));
            }
        }
    }
    Ok(())
}

pub fn perfect_matching(n: usize, k: usize) -> Result<Hypergraph> {
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidParams(format!("a perfect {k}-matching needs k | n, got n = {n}")));
    }
    Hypergraph::build(n, (0..n / k).map(|i| (i * k..(i + 1) * k).collect()).collect())
}

/// Calls `visit` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

const SUBSET_LIMIT: u64 = 20_000_000;

fn check_subset_count(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParams("edge size must be positive".into()));
    }
    if binomial(n as u64, k as u64) > SUBSET_LIMIT.into() {
        return Err(Error::InvalidParams(format!("C({n}, {k}) subsets is too many to enumerate")));
    }
    Ok(())
}

/// `K_n^{(k)}`.
pub fn complete(n: usize, k: usize) -> Result<Hypergraph> {
    check_subset_count(n, k)?;
    let mut edges = Vec::new();
    for_each_subset(n, k, |s| edges.push(s.to_vec()));
    Hypergraph::build(n, edges)
}

/// Binomial random `k`-graph: each `k`-subset independently with probability `p`.
pub fn binomial_random(n: usize, k: usize, p: f64, seed: u64) -> Result<Hypergraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("edge probability {p} outside [0, 1]")));
    }
    check_subset_count(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for_each_subset(n, k, |s| {
        if rng.gen_bool(p) {
            edges.push(s.to_vec());
        }
    });
    Hypergraph::build(n, edges)
}

/// Random greedy linear `k`-graph: random `k`-sets are added while they
/// share at most one vertex with every earlier edge, until `m_target`
/// edges or a long run of rejections.
pub fn linear_random(n: usize, k: usize, m_target: usize, seed: u64) -> Result<Hypergraph> {
    const STALL: usize = 20_000;
    if k < 2 || k > n {
        return Err(Error::InvalidParams(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = vec![false; n * n];
    let mut edges = Vec::new();
    let mut misses = 0;
    while edges.len() < m_target && misses < STALL {
        let mut e = sample(&mut rng, n, k).into_vec();
        e.sort_unstable();
        let free = e.iter().enumerate().all(|(i, &a)| e[i + 1..].iter().all(|&b| !used[a * n + b]));
        if !free {
            misses += 1;
            continue;
        }
        misses = 0;
        for (i, &a) in e.iter().enumerate() {
            for &b in &e[i + 1..] {
                used[a * n + b] = true;
            }
        }
        edges.push(e);
    }
    Hypergraph::build(n, edges)
}

const MAX_N_2: usize = 16;
const MAX_ASSIGNMENTS: u64 = 531_441; // 3^12

/// Maximum `r`-cut by exhaustive search, with a witness.
///
/// 2-cuts enumerate bitmasks with vertex 0 pinned, sharded across threads;
/// larger `r` enumerates restricted-growth strings so each partition is seen
/// once. Feasible for `n <= 16` when `r = 2` and `r^n <= 3^12` otherwise.
pub fn exact_maxcut(h: &Hypergraph, r: usize) -> Result<(usize, Cut)> {
    let n = h.n();
    if r < 2 {
        return Err(Error::InvalidParams(format!("need r >= 2, got {r}")));
    }
    if n == 0 {
        return Ok((0, Cut::monochromatic(r, 0)));
    }
    if r == 2 {
        if n > MAX_N_2 {
            return Err(Error::OracleInfeasible(format!("2-cut enumeration needs n <= {MAX_N_2}, got {n}")));
        }
        let masks: Vec<u32> = h.edges().iter().map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v)).collect();
        let half = 1u32 << (n - 1);
        let (size, mask) = (0..half)
            .into_par_iter()
            .map(|m| {
                let m = m << 1;
                let size = masks.iter().filter(|&&e| m & e != 0 && m & e != e).count();
                (size, std::cmp::Reverse(m))
            })
            .max()
            .map(|(s, std::cmp::Reverse(m))| (s, m))
            .unwrap();
        let cut = Cut::new(2, (0..n).map(|v| (mask >> v & 1) as usize).collect())?;
        return Ok((size, cut));
    }
    let feasible = (r as u64).checked_pow(n as u32).is_some_and(|x| x <= MAX_ASSIGNMENTS);
    if !feasible {
        return Err(Error::OracleInfeasible(format!("{r}-cut enumeration over {n} vertices is too large")));
    }
    let mut best = (0usize, vec![0usize; n]);
    let mut rgs = vec![0usize; n];
    rgs_search(h, r, &mut rgs, 1, 1, &mut best);
    Ok((best.0, Cut::new(r, best.1)?))
}

fn rgs_search(h: &Hypergraph, r: usize, rgs: &mut Vec<usize>, pos: usize, used: usize, best: &mut (usize, Vec<usize>)) {
    if pos == rgs.len() {
        let cut = Cut::new(r, rgs.clone()).expect("labels below r");
        let size = cut.size(h);
        if size > best.0 {
            *best = (size, rgs.clone());
        }
        return;
    }
    for label in 0..(used + 1).min(r) {
        rgs[pos] = label;
        rgs_search(h, r, rgs, pos + 1, used.max(label + 1), best);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Conditional probability strictly above the base.
    Strict,
    /// Equal to the base.
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monotonicity {
    pub conditional: Rational,
    pub base: Rational,
    pub verdict: Verdict,
}

/// `Pr(e multicoloured | each f_i meets at least ℓ_i parts)` for a uniform
/// `r`-cut, by enumerating all `r^{|e|}` assignments of `e`.
pub fn monotonicity_check(h: &Hypergraph, r: usize, e: usize, constraints: &[(Vec<usize>, usize)]) -> Result<Monotonicity> {
    if e >= h.m() {
        return Err(Error::InvalidParams(format!("edge index {e} out of range")));
    }
    if r < 2 {
        return Err(Error::InvalidParams(format!("need r >= 2, got {r}")));
    }
    let edge = h.edge(e);
    let mut used = vec![false; edge.len()];
    let mut local: Vec<(Vec<usize>, usize)> = Vec::new();
    for (f, l) in constraints {
        if f.len() < 2 || *l < 2 {
            return Err(Error::InvalidParams("constraints need |f| >= 2 and l >= 2".into()));
        }
        let mut idx = Vec::new();
        for v in f {
            let i = edge
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::InvalidParams(format!("vertex {v} is not in the edge")))?;
            if std::mem::replace(&mut used[i], true) {
                return Err(Error::InvalidParams("constraint sets must be disjoint".into()));
            }
            idx.push(i);
        }
        local.push((idx, *l));
    }
    let total = (r as u64).checked_pow(edge.len() as u32).filter(|&x| x <= MAX_ASSIGNMENTS);
    let Some(total) = total else {
        return Err(Error::OracleInfeasible(format!("{r}^{} assignments is too many", edge.len())));
    };
    let distinct = |parts: &[usize], idx: &[usize]| {
        let mut seen = 0u64;
        for &i in idx {
            seen |= 1 << parts[i];
        }
        seen.count_ones() as usize
    };
    let (mut all_mc, mut cond, mut cond_mc) = (0i64, 0i64, 0i64);
    let mut parts = vec![0usize; edge.len()];
    for code in 0..total {
        let mut c = code;
        for p in parts.iter_mut() {
            *p = (c % r as u64) as usize;
            c /= r as u64;
        }
        let all: Vec<usize> = (0..edge.len()).collect();
        let mc = distinct(&parts, &all) == r;
        all_mc += i64::from(mc);
        if local.iter().all(|(idx, l)| distinct(&parts, idx) >= *l) {
            cond += 1;
            cond_mc += i64::from(mc);
        }
    }
    if cond == 0 {
        return Err(Error::InvalidParams("the constraints cannot all hold".into()));
    }
    let base = Rational::new(all_mc.into(), (total as i64).into());
    let conditional = Rational::new(cond_mc.into(), cond.into());
    let verdict = match conditional.cmp(&base) {
        std::cmp::Ordering::Greater => Verdict::Strict,
        std::cmp::Ordering::Equal => Verdict::Pass,
        std::cmp::Ordering::Less => Verdict::Fail,
    };
    Ok(Monotonicity { conditional, base, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditVerdict {
    Pass,
    Fail,
    /// No random edge through the pair, or no variance: nothing to test.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentAudit {
    /// `g_{u,v}`: edges through `u, v` with at least two vertices outside `W`.
    pub g: usize,
    pub mean: f64,
    pub variance: f64,
    pub kurtosis: f64,
    /// `9^{k-2} · 1.1`.
    pub kurtosis_bound: f64,
    /// `g / 16`.
    pub variance_bound: f64,
    pub verdict: AuditVerdict,
}

pub const MIN_AUDIT_SAMPLES: usize = 10_000;

/// Samples `η = Σ_e 2^{2-|e∩W|} 1[e \ W is monochromatic]` over uniform
/// 2-colourings of the complement of `W`, summing over the edges through
/// `u` and `v` with at least two vertices outside `W`.
pub fn moment_audit(
    h: &Hypergraph,
    w_set: &[usize],
    pair: (usize, usize),
    samples: usize,
    seed: u64,
) -> Result<MomentAudit> {
    if samples < MIN_AUDIT_SAMPLES {
        return Err(Error::InvalidParams(format!("moment audits need at least {MIN_AUDIT_SAMPLES} samples")));
    }
    let n = h.n();
    let mut in_w = vec![false; n];
    for &w in w_set {
        if w >= n {
            return Err(Error::InvalidVertex { vertex: w, n });
        }
        in_w[w] = true;
    }
    let (u, v) = pair;
    if u == v || u >= n || v >= n || !in_w[u] || !in_w[v] {
        return Err(Error::InvalidParams(format!("pair ({u}, {v}) must be two distinct vertices of W")));
    }
    let terms: Vec<(f64, Vec<usize>)> = h
        .edges()
        .iter()
        .filter(|e| e.contains(&u) && e.contains(&v))
        .filter_map(|e| {
            let outside: Vec<usize> = e.iter().copied().filter(|&x| !in_w[x]).collect();
            let inside = e.len() - outside.len();
            (outside.len() >= 2).then(|| (2f64.powi(2 - inside as i32), outside))
        })
        .collect();
    let g = terms.len();
    let k = h.max_edge_size().max(2);
    let kurtosis_bound = 9f64.powi(k as i32 - 2) * 1.1;
    let variance_bound = g as f64 / 16.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colour = vec![false; n];
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        for t in &terms {
            for &x in &t.1 {
                colour[x] = rng.gen();
            }
        }
        let eta: f64 = terms
            .iter()
            .filter(|(_, out)| out.iter().all(|&x| colour[x] == colour[out[0]]))
            .map(|(c, _)| c)
            .sum();
        values.push(eta);
    }
    let mean = values.iter().sum::<f64>() / samples as f64;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / samples as f64;
    let m4 = values.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / samples as f64;
    let variance = m2;
    let kurtosis = if m2 > 0.0 { m4 / (m2 * m2) } else { f64::NAN };
    let verdict = if g == 0 || m2 == 0.0 {
        AuditVerdict::Vacuous
    } else if kurtosis <= kurtosis_bound && variance >= variance_bound {
        AuditVerdict::Pass
    } else {
        AuditVerdict::Fail
    };
    Ok(MomentAudit { g, mean, variance, kurtosis, kurtosis_bound, variance_bound, verdict })
}
