//! The CSV experiment harness.
//!
//! Rows run concurrently, each with its own seed, and are written in grid
//! order: size, then seed, then algorithm. Apart from `runtime_ms` the
//! output depends only on the configuration.

use std::io::Write;

use hypercut::instances::{generate, Family, GenSpec};
use hypercut::Rational;
use rayon::prelude::*;
use serde::Deserialize;

use crate::algo::{run_report, Algo, RunReport};
use crate::CliError;

pub const HEADER: [&str; 12] =
    ["family", "n", "m", "k", "r", "seed", "algo", "size", "expected", "excess", "guarantee", "runtime_ms"];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: String,
    /// Vertex counts, in output order.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    pub r: usize,
    pub algos: Vec<String>,
    /// Seeds per size: `seed, seed + 1, ...`.
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Fixed edge probability for the random family.
    pub p: Option<f64>,
    /// Edge probability `n^p_exponent` for the random family.
    pub p_exponent: Option<f64>,
    pub m_target: Option<usize>,
}

fn default_k() -> usize {
    3
}

fn default_seeds() -> u64 {
    1
}

fn default_trials() -> usize {
    32
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad sweep config: {e}")))
    }

    fn spec(&self, family: Family, n: usize, seed: u64) -> GenSpec {
        let p = self.p.or_else(|| self.p_exponent.map(|e| (n as f64).powf(e)));
        GenSpec { family, n, k: self.k, p, m_target: self.m_target, seed }
    }
}

pub struct Row {
    pub family: Family,
    pub report: RunReport,
}

/// Runs every cell of the grid and returns the rows in grid order.
pub fn run_grid(cfg: &SweepConfig) -> Result<Vec<Row>, CliError> {
    let family: Family = cfg.family.parse()?;
    let algos: Vec<Algo> = cfg.algos.iter().map(|a| a.parse().map_err(CliError::Usage)).collect::<Result<_, _>>()?;
    let mut cells = Vec::new();
    for &n in &cfg.n {
        for s in 0..cfg.seeds {
            for &algo in &algos {
                cells.push((n, cfg.seed + s, algo));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(n, seed, algo)| {
            let h = generate(&cfg.spec(family, n, seed))?;
            let report = run_report(&h, algo, cfg.r, seed, cfg.trials)?;
            Ok(Row { family, report })
        })
        .collect()
}

/// Least-squares slope of `ln excess` against `ln m` over rows with positive
/// excess; `None` without two distinct edge counts.
pub fn loglog_slope(rows: &[&Row]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.report.excess_value > Rational::from_integer(0.into()) && r.report.m > 0)
        .map(|r| ((r.report.m as f64).ln(), num_traits::ToPrimitive::to_f64(&r.report.excess_value).unwrap().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx <= 1e-12 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Writes the header, one row per cell, and one `slope` row per algorithm.
pub fn write_csv(cfg: &SweepConfig, rows: &[Row], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.family.name().to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.r.to_string(),
            r.seed.to_string(),
            r.algorithm.clone(),
            r.size.to_string(),
            r.expected.clone(),
            r.excess.clone(),
            r.guarantee.clone().unwrap_or_default(),
            r.runtime_ms.to_string(),
        ])?;
    }
    if !rows.is_empty() {
        for algo in &cfg.algos {
            let mine: Vec<&Row> = rows.iter().filter(|r| algo_of(&r.report.algorithm) == algo).collect();
            let slope = loglog_slope(&mine).map(|s| format!("{s:.6}")).unwrap_or_default();
            w.write_record([
                cfg.family.as_str(),
                "",
                "",
                &cfg.k.to_string(),
                &cfg.r.to_string(),
                "slope",
                algo,
                "",
                "",
                &slope,
                "",
                "",
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// The configured algorithm name behind a report label such as `pipeline:driver-3cut`.
fn algo_of(label: &str) -> &str {
    label.split(':').next().unwrap_or(label)
}
