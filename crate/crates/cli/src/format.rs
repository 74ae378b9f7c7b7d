//! The `hg 1` text format: a header `hg 1 <k> <n> <m>`, then one edge per
//! line as space-separated 0-based vertex ids. Lines starting with `#` are
//! comments.

use std::fmt::Write as _;

use hypercut::Hypergraph;

use crate::CliError;

pub fn parse(text: &str) -> Result<Hypergraph, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or_else(|| CliError::Format("missing header line".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "hg" || fields[1] != "1" {
        return Err(CliError::Format(format!("line {line}: expected header 'hg 1 <k> <n> <m>'")));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>().map_err(|_| CliError::Format(format!("line {line}: {what} is not a count: {s:?}")))
    };
    let (k, n, m) = (num(fields[2], "k")?, num(fields[3], "n")?, num(fields[4], "m")?);
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let edge = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| CliError::Format(format!("line {line}: bad vertex id {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        edges.push(edge);
    }
    if edges.len() != m {
        return Err(CliError::Format(format!("header declares {m} edges, found {}", edges.len())));
    }
    Ok(Hypergraph::build_with_arity(n, k, edges)?)
}

pub fn serialize(h: &Hypergraph) -> String {
    let mut out = format!("hg 1 {} {} {}\n", h.k(), h.n(), h.m());
    for e in h.edges() {
        let line: Vec<String> = e.iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}
