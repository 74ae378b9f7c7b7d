//! The algorithms behind `cut` and `sweep`, with a uniform report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use hypercut::cutspace::cut_metrics;
use hypercut::derand::{erdos_selfridge_2cut, local_search, order_for_w};
use hypercut::exact::ratio;
use hypercut::instances::exact_maxcut;
use hypercut::pipeline::{chromatic_cut, solve, GuaranteeLedger, PipelineParams, PromiseKind};
use hypercut::{expected_size, Cut, Error, Hypergraph, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    /// The exact oracle when it is feasible, the pipeline otherwise.
    Auto,
    Es,
    Greedy,
    Chromatic,
    Pipeline,
    Exact,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Auto => "auto",
            Algo::Es => "es",
            Algo::Greedy => "greedy",
            Algo::Chromatic => "chromatic",
            Algo::Pipeline => "pipeline",
            Algo::Exact => "exact",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Algo::Auto, Algo::Es, Algo::Greedy, Algo::Chromatic, Algo::Pipeline, Algo::Exact]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// What an algorithm produced, before reporting.
pub struct Outcome {
    pub label: String,
    pub cut: Cut,
    pub ledger: GuaranteeLedger,
    pub guarantee: Option<Rational>,
}

pub fn run_algo(h: &Hypergraph, algo: Algo, r: usize, seed: u64, trials: usize) -> Result<Outcome, Error> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    let mut ledger = GuaranteeLedger::default();
    match algo {
        Algo::Auto => match exact_maxcut(h, r) {
            Ok(_) => {
                let mut out = run_algo(h, Algo::Exact, r, seed, trials)?;
                out.label = "auto:exact".into();
                Ok(out)
            }
            Err(Error::OracleInfeasible(_)) => {
                let mut out = run_algo(h, Algo::Pipeline, r, seed, trials)?;
                out.label = "auto:pipeline".into();
                Ok(out)
            }
            Err(e) => Err(e),
        },
        Algo::Exact => {
            let (_, cut) = exact_maxcut(h, r)?;
            Ok(Outcome { label: "exact".into(), cut, ledger, guarantee: None })
        }
        Algo::Es => {
            if r != 2 {
                return Err(Error::InvalidParams(format!("the es engine builds 2-cuts; got r = {r}")));
            }
            let order = order_for_w(h, trials, seed);
            let (cut, es) = erdos_selfridge_2cut(h, &order)?;
            let x = es.realized_excess.to_rational();
            let guarantee = es.guaranteed_excess.to_rational();
            ledger.deterministic("excess >= (|D| + sum |U_v|)/2^k", guarantee.clone(), x.clone());
            ledger.deterministic(
                format!("excess >= |W|/2^k with |W| = {}, k = {}", es.w_set.len(), es.k),
                ratio(es.w_set.len() as i64, 1 << es.k),
                x,
            );
            Ok(Outcome { label: "es".into(), cut, ledger, guarantee: Some(guarantee) })
        }
        Algo::Greedy => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(usize, Cut)> = None;
            for _ in 0..trials {
                let start = Cut::uniform(r, h.n(), &mut rng);
                let cut = local_search(h, &start);
                let size = cut.size(h);
                if best.as_ref().is_none_or(|(s, _)| size > *s) {
                    best = Some((size, cut));
                }
            }
            let cut = best.expect("trials > 0").1;
            Ok(Outcome { label: "greedy".into(), cut, ledger, guarantee: None })
        }
        Algo::Chromatic => {
            let c = chromatic_cut(h, r, trials, seed)?;
            ledger.advisory(format!("split of {} strong colour classes: excess >= 0", c.chi), Rational::from_integer(0.into()), c.excess);
            Ok(Outcome { label: "chromatic".into(), cut: c.cut, ledger, guarantee: None })
        }
        Algo::Pipeline => {
            let params = PipelineParams::for_edges(h.m()).with_seed(seed).with_trials(trials);
            let sol = solve(h, r, &params)?;
            Ok(Outcome { label: format!("pipeline:{}", sol.route.name()), cut: sol.cut, ledger: sol.ledger, guarantee: sol.guarantee })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerLine {
    pub claim: String,
    pub kind: &'static str,
    pub promised: String,
    pub realized: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub r: usize,
    pub algorithm: String,
    pub seed: u64,
    pub size: u64,
    pub expected: String,
    pub excess: String,
    pub guarantee: Option<String>,
    pub ledger: Vec<LedgerLine>,
    pub runtime_ms: u128,
    #[serde(skip)]
    pub excess_value: Rational,
    #[serde(skip)]
    pub guarantee_value: Option<Rational>,
}

/// Runs `algo` and checks its promises: the excess is recomputed from the
/// cut, and any failed deterministic ledger entry is a violation.
pub fn run_report(h: &Hypergraph, algo: Algo, r: usize, seed: u64, trials: usize) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let out = run_algo(h, algo, r, seed, trials)?;
    let runtime_ms = start.elapsed().as_millis();
    let size = out.cut.size(h) as u64;
    let expected = expected_size(h, r);
    let excess = Rational::from_integer((size as i64).into()) - &expected;
    if cut_metrics(h, &out.cut)?.excess != excess {
        return Err(CliError::Violation("reported excess differs from size - expected".into()));
    }
    if let Some(g) = &out.guarantee {
        if excess < *g {
            return Err(CliError::Violation(format!("excess {excess} is below the guarantee {g}")));
        }
    }
    out.ledger.verify()?;
    let ledger = out
        .ledger
        .entries
        .iter()
        .map(|e| LedgerLine {
            claim: e.claim.clone(),
            kind: match e.kind {
                PromiseKind::Deterministic => "deterministic",
                PromiseKind::Advisory => "advisory",
            },
            promised: e.promised.to_string(),
            realized: e.realized.to_string(),
            holds: e.holds(),
        })
        .collect();
    Ok(RunReport {
        n: h.n(),
        m: h.m(),
        k: h.max_edge_size(),
        r,
        algorithm: out.label,
        seed,
        size,
        expected: expected.to_string(),
        excess: excess.to_string(),
        guarantee: out.guarantee.as_ref().map(Rational::to_string),
        ledger,
        runtime_ms,
        excess_value: excess,
        guarantee_value: out.guarantee,
    })
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance n={} m={} k={}", self.n, self.m, self.k)?;
        writeln!(f, "algorithm {} r={} seed={}", self.algorithm, self.r, self.seed)?;
        writeln!(f, "size {}", self.size)?;
        writeln!(f, "expected {}", self.expected)?;
        writeln!(f, "excess {}", self.excess)?;
        writeln!(f, "guarantee {}", self.guarantee.as_deref().unwrap_or("none"))?;
        for l in &self.ledger {
            let status = if l.holds { "ok" } else { "missed" };
            writeln!(f, "ledger [{}] {}: promised {}, realized {} ({status})", l.kind, l.claim, l.promised, l.realized)?;
        }
        writeln!(f, "runtime_ms {}", self.runtime_ms)
    }
}
