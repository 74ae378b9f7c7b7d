//! Command-line front end for `hypercut`: instance files, cut reports,
//! oracle checks and the CSV sweep harness.

pub mod algo;
pub mod format;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hypercut::cutspace::{theorem_bound, BoundId, BoundParams};
use hypercut::instances::{generate, moment_audit, monotonicity_check, AuditVerdict, Family, GenSpec, Verdict};
use hypercut::pipeline::goodness_audit;
use hypercut::Hypergraph;
use serde_json::json;

use crate::algo::{run_report, Algo};
use crate::sweep::{run_grid, write_csv, SweepConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed instance file: {0}")]
    Format(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lib(#[from] hypercut::Error),
    #[error("guarantee violated: {0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 2,
            CliError::Lib(e) if e.is_internal_violation() => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Format(_) => "format",
            CliError::Io(_) => "io",
            CliError::Lib(e) if e.is_internal_violation() => "guarantee-violation",
            CliError::Lib(_) => "invalid-input",
            CliError::Violation(_) => "guarantee-violation",
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "hypercut", version, about = "Hypergraph r-cuts above the random-cut average")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Find a large cut and report it with its guarantee ledger.
    Cut(CutArgs),
    /// Exact maximum cut by enumeration.
    Exact {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Print the closed-form excess bounds that apply to an instance.
    Bounds {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Run an oracle check.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Run a CSV sweep described by a TOML config.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m_target: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CutArgs {
    file: PathBuf,
    #[arg(long, default_value = "auto")]
    algo: Algo,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    trials: usize,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Conditional multicolouring probability of one edge.
    Monotonicity {
        file: PathBuf,
        #[arg(long)]
        r: usize,
        /// Edge index.
        #[arg(long)]
        edge: usize,
        /// `v1,v2,...:l`: the listed vertices meet at least `l` parts.
        #[arg(long = "constraint")]
        constraints: Vec<String>,
    },
    /// Moments of the pair weight over random exposures outside `W`.
    Moment {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        w: Vec<usize>,
        #[arg(long, value_delimiter = ',', num_args = 2)]
        pair: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Goodness counts of a vertex partition.
    Goodness {
        file: PathBuf,
        /// Parts separated by `|`, vertices by `,` or spaces.
        #[arg(long)]
        parts: String,
        /// Edge indices of the sub-multigraph; defaults to every edge inside the parts.
        #[arg(long, value_delimiter = ',')]
        sub: Option<Vec<usize>>,
    },
}

fn read_instance(path: &PathBuf) -> Result<Hypergraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    format::parse(&text)
}

fn write_output(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Errors go to `err` as one JSON line.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let line = json!({ "error": e.kind(), "exit_code": e.exit_code(), "message": e.to_string() });
            let _ = writeln!(err, "{line}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Gen(a) => {
            let family: Family = a.family.parse()?;
            let spec = GenSpec { family, n: a.n, k: a.k, p: a.p, m_target: a.m_target, seed: a.seed };
            let h = generate(&spec)?;
            write_output(a.output.as_ref(), &format::serialize(&h), out)
        }
        Command::Cut(a) => {
            let h = read_instance(&a.file)?;
            let report = run_report(&h, a.algo, a.r, a.seed, a.trials)?;
            if a.json {
                writeln!(out, "{}", serde_json::to_string(&report).expect("reports serialize"))?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(())
        }
        Command::Exact { file, r } => {
            let h = read_instance(&file)?;
            let (value, cut) = hypercut::instances::exact_maxcut(&h, r)?;
            writeln!(out, "{value}")?;
            let parts: Vec<String> = cut.parts().iter().map(usize::to_string).collect();
            writeln!(out, "witness {}", parts.join(" "))?;
            Ok(())
        }
        Command::Bounds { file, r } => {
            let h = read_instance(&file)?;
            bounds(&h, r, out)
        }
        Command::Check(c) => check(c, out),
        Command::Sweep { config, output } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
            let cfg = SweepConfig::parse(&text)?;
            let rows = match std::env::var("HYPERCUT_THREADS") {
                Ok(t) => {
                    let threads: usize = t
                        .parse()
                        .ok()
                        .filter(|&t| t > 0)
                        .ok_or_else(|| CliError::Usage(format!("HYPERCUT_THREADS must be a positive integer, got {t:?}")))?;
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    pool.install(|| run_grid(&cfg))?
                }
                Err(_) => run_grid(&cfg)?,
            };
            match output {
                Some(p) => {
                    let file = fs::File::create(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                    write_csv(&cfg, &rows, file)
                }
                None => write_csv(&cfg, &rows, out),
            }
        }
    }
}

fn is_connected(h: &Hypergraph) -> bool {
    if h.n() == 0 {
        return true;
    }
    let mut parent: Vec<usize> = (0..h.n()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in h.edges() {
        for w in e.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (0..h.n()).all(|v| find(&mut parent, v) == root)
}

/// Bounds whose hypotheses `h` satisfies, with their parameters.
fn applicable_bounds(h: &Hypergraph) -> Vec<(BoundId, BoundParams)> {
    let (n, m, k) = (h.n() as u64, h.m() as u64, h.max_edge_size() as u64);
    let no_isolated = h.covered_vertices(1).len() == h.n();
    let mut out = Vec::new();
    if h.m() == 0 {
        return out;
    }
    let p = |n: Option<u64>, m: Option<u64>, k: Option<u64>| BoundParams { n, m, k };
    if k == 3 && h.is_uniform(3) {
        out.push((BoundId::Sts2Cut, p(None, Some(m), None)));
        if is_connected(h) {
            out.push((BoundId::Connected3Graph, p(Some(n), None, None)));
        }
        if no_isolated {
            out.push((BoundId::Matching, p(Some(n), None, None)));
        }
    }
    if k > 2 {
        if h.is_uniform(k as usize) && no_isolated {
            out.push((BoundId::Mixed2CutN, p(Some(n), None, Some(k))));
        }
        let in_k_edges = (0..h.n()).filter(|v| h.edges().iter().any(|e| e.len() == k as usize && e.contains(v))).count();
        out.push((BoundId::MixedKEdges, p(Some(in_k_edges as u64), None, Some(k))));
    }
    if k == 2 && h.is_uniform(2) {
        out.push((BoundId::EdwardsM, p(None, Some(m), None)));
        if is_connected(h) {
            out.push((BoundId::EdwardsConnected, p(Some(n), None, None)));
        }
        out.push((BoundId::EdwardsN, p(Some(h.covered_vertices(1).len() as u64), None, None)));
    }
    out
}

fn bounds(h: &Hypergraph, r: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if r != 2 {
        writeln!(out, "# no closed-form bounds for r = {r}")?;
        return Ok(());
    }
    for (id, params) in applicable_bounds(h) {
        let value = theorem_bound(id, params)?;
        writeln!(out, "{} {} {}", id.name(), value, id.citation())?;
    }
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("bad vertex id {t:?}"))))
        .collect()
}

fn check(c: CheckCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match c {
        CheckCommand::Monotonicity { file, r, edge, constraints } => {
            let h = read_instance(&file)?;
            let parsed = constraints
                .iter()
                .map(|c| {
                    let (vs, l) = c
                        .split_once(':')
                        .ok_or_else(|| CliError::Usage(format!("constraint {c:?} is not 'v1,v2,...:l'")))?;
                    let l = l.trim().parse().map_err(|_| CliError::Usage(format!("bad part count in {c:?}")))?;
                    Ok((parse_list(vs)?, l))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let m = monotonicity_check(&h, r, edge, &parsed)?;
            let verdict = match m.verdict {
                Verdict::Strict => "STRICT",
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            writeln!(out, "conditional {}\nbase {}\nverdict {verdict}", m.conditional, m.base)?;
        }
        CheckCommand::Moment { file, w, pair, samples, seed } => {
            let h = read_instance(&file)?;
            let a = moment_audit(&h, &w, (pair[0], pair[1]), samples, seed)?;
            let verdict = match a.verdict {
                AuditVerdict::Pass => "PASS",
                AuditVerdict::Fail => "FAIL",
                AuditVerdict::Vacuous => "VACUOUS",
            };
            writeln!(out, "g {}", a.g)?;
            writeln!(out, "mean {:.6}", a.mean)?;
            writeln!(out, "variance {:.6} (bound {:.6})", a.variance, a.variance_bound)?;
            writeln!(out, "kurtosis {:.6} (bound {:.6})", a.kurtosis, a.kurtosis_bound)?;
            writeln!(out, "verdict {verdict}")?;
        }
        CheckCommand::Goodness { file, parts, sub } => {
            let h = read_instance(&file)?;
            let parts: Vec<Vec<usize>> = parts.split('|').map(parse_list).collect::<Result<_, _>>()?;
            let sub = sub.unwrap_or_else(|| {
                let mut inside = vec![false; h.n()];
                parts.iter().flatten().filter(|&&v| v < h.n()).for_each(|&v| inside[v] = true);
                (0..h.m()).filter(|&e| h.edge(e).iter().all(|&v| inside[v])).collect()
            });
            let a = goodness_audit(&h, &sub, &parts)?;
            writeln!(out, "within_edges {}", a.within_edges)?;
            writeln!(out, "max_within_degree {}", a.max_within_degree)?;
            writeln!(out, "violations_iii {}", a.violations_iii.len())?;
            writeln!(out, "violations_iv {}", a.violations_iv.len())?;
        }
    }
    Ok(())
}
