//! Shared corpus and brute-force oracles for the integration tests.
//!
//! The oracles recount everything from edge lists and plain enumeration so
//! they share no code paths with the library beyond `Hypergraph` itself.
#![allow(dead_code)]

use hypercut::instances::{binomial_random, complete, linear_random, perfect_matching, steiner_triple_system};
use hypercut::{Hypergraph, Rational};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Random mixed hypergraph with edge sizes in `2..=k` and at least one
/// `k`-edge.
pub fn random_mixed(n: usize, m: usize, k: usize, seed: u64) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let size = if i == 0 { k } else { rng.gen_range(2..=k) };
        edges.push(rand::seq::index::sample(&mut rng, n, size).into_vec());
    }
    Hypergraph::build(n, edges).unwrap()
}

/// Named desk-scale instances used across the integration tests.
pub fn corpus() -> Vec<(String, Hypergraph)> {
    let mut out: Vec<(String, Hypergraph)> = Vec::new();
    for n in [7, 9, 13, 15] {
        out.push((format!("sts-{n}"), steiner_triple_system(n).unwrap()));
    }
    out.push(("matching-12-3".into(), perfect_matching(12, 3).unwrap()));
    out.push(("matching-12-4".into(), perfect_matching(12, 4).unwrap()));
    out.push(("complete-7-3".into(), complete(7, 3).unwrap()));
    out.push(("complete-8-4".into(), complete(8, 4).unwrap()));
    out.push(("complete-6-2".into(), complete(6, 2).unwrap()));
    out.push(("random-12-4".into(), binomial_random(12, 4, 1.0 / 12.0, 5).unwrap()));
    out.push(("linear-14-3".into(), linear_random(14, 3, 20, 2).unwrap()));
    for (i, k) in [3usize, 4, 5].into_iter().enumerate() {
        out.push((format!("mixed-11-{k}"), random_mixed(11, 16, k, 100 + i as u64)));
    }
    out
}

pub fn distinct_parts(parts: &[usize], e: &[usize]) -> usize {
    let mut seen: Vec<usize> = e.iter().map(|&v| parts[v]).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Number of edges meeting all `r` parts.
pub fn literal_size(h: &Hypergraph, parts: &[usize], r: usize) -> usize {
    h.edges().iter().filter(|e| distinct_parts(parts, e) == r).count()
}

/// Calls `visit` with every completion of `fixed` (`None` = free) into `r` parts.
pub fn for_each_completion(fixed: &[Option<usize>], r: usize, mut visit: impl FnMut(&[usize])) {
    let free: Vec<usize> = (0..fixed.len()).filter(|&v| fixed[v].is_none()).collect();
    let mut parts: Vec<usize> = fixed.iter().map(|p| p.unwrap_or(0)).collect();
    let total = (r as u64).pow(free.len() as u32);
    for code in 0..total {
        let mut c = code;
        for &v in &free {
            parts[v] = (c % r as u64) as usize;
            c /= r as u64;
        }
        visit(&parts);
    }
}

/// Average size over all completions of `fixed`.
pub fn brute_average(h: &Hypergraph, fixed: &[Option<usize>], r: usize) -> Rational {
    let (mut sum, mut count) = (0i64, 0i64);
    for_each_completion(fixed, r, |parts| {
        sum += literal_size(h, parts, r) as i64;
        count += 1;
    });
    q(sum, count)
}

/// `E Z` for a uniform `r`-cut, by enumeration.
pub fn brute_expected(h: &Hypergraph, r: usize) -> Rational {
    brute_average(h, &vec![None; h.n()], r)
}

/// Ordinary least squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Replays a conditional-expectations run against enumeration: before each
/// step, `E Z_v` must equal the average over all completions of the parts
/// fixed so far, and the step's best value must equal the best average over
/// assignments of the pending vertices and `v`.
pub fn replay_es(h: &Hypergraph, ledger: &hypercut::derand::EsLedger) -> Result<usize, String> {
    let n = h.n();
    let mut fixed: Vec<Option<usize>> = vec![None; n];
    let mut checked = 0;
    for step in &ledger.steps {
        let free: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
        let mut chosen: Vec<usize> = step.pending.clone();
        chosen.push(step.vertex);
        let pos: Vec<usize> = chosen.iter().map(|v| free.iter().position(|f| f == v).unwrap()).collect();
        let mut bucket = vec![0i64; 1 << chosen.len()];
        let mut total = 0i64;
        let mut parts: Vec<usize> = fixed.iter().map(|p| p.unwrap_or(0)).collect();
        for mask in 0u64..(1 << free.len()) {
            for (i, &v) in free.iter().enumerate() {
                parts[v] = (mask >> i & 1) as usize;
            }
            let size = literal_size(h, &parts, 2) as i64;
            total += size;
            let key = pos.iter().enumerate().fold(0usize, |k, (j, &p)| k | ((mask >> p & 1) as usize) << j);
            bucket[key] += size;
        }
        let expectation = q(total, 1 << free.len());
        if expectation != step.expectation.to_rational() {
            return Err(format!("vertex {}: E Z_v {} but enumeration gives {expectation}", step.vertex, step.expectation));
        }
        let best = bucket.iter().max().copied().unwrap();
        let best = q(best, 1 << (free.len() - chosen.len()));
        if best != step.best.to_rational() {
            return Err(format!("vertex {}: best {} but enumeration gives {best}", step.vertex, step.best));
        }
        for &(v, p) in &step.fixed {
            fixed[v] = Some(p);
        }
        checked += 1;
    }
    Ok(checked)
}

/// Exercises every reduction on `h` with random inputs and checks each
/// back-map relation against literal recounts. Returns the number of
/// certificates checked.
pub fn reduction_certificates(h: &Hypergraph, seed: u64) -> Result<usize, String> {
    use hypercut::reduce::*;
    use hypercut::Cut;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = h.n();
    let k = h.max_edge_size();
    let mut checked = 0;
    let ez2 = brute_expected(h, 2);

    if h.is_uniform(3) {
        let ex = expand_3graph(h).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let cut = Cut::uniform(2, n, &mut rng);
            ex.back_map(&cut).map_err(|e| e.to_string())?;
            let mut pairs = 0;
            for e in h.edges() {
                for (i, &u) in e.iter().enumerate() {
                    pairs += e[i + 1..].iter().filter(|&&v| cut.part(u) != cut.part(v)).count();
                }
            }
            if pairs != 2 * literal_size(h, cut.parts(), 2) {
                return Err(format!("expanded cut {pairs} is not twice the 3-graph cut"));
            }
            checked += 1;
        }
    }

    for r in 3..=k.min(4) {
        for free in [2, 3].into_iter().filter(|&f| f < r) {
            let rho = sample_exposure(n, r, free, &mut rng);
            let ex = hpart_expose(h, r, &rho, free).map_err(|e| e.to_string())?;
            let starred = ex.starred().len();
            if (free as f64).powi(starred as i32) <= 2e5 {
                let fixed: Vec<Option<usize>> = rho.assignments().to_vec();
                let (mut sum, mut count) = (0i64, 0i64);
                let free_vs: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
                let mut parts: Vec<usize> = fixed.iter().map(|p| p.unwrap_or(0)).collect();
                for code in 0..(free as u64).pow(starred as u32) {
                    let mut c = code;
                    for &v in &free_vs {
                        parts[v] = (c % free as u64) as usize;
                        c /= free as u64;
                    }
                    sum += literal_size(h, &parts, r) as i64;
                    count += 1;
                }
                if q(sum, count) != ex.conditional_expectation() {
                    return Err(format!("E[Z|rho] {} differs from enumeration {}", ex.conditional_expectation(), q(sum, count)));
                }
            }
            for _ in 0..3 {
                let phi = Cut::uniform(free, n, &mut rng);
                let back = ex.back_map(&phi).map_err(|e| e.to_string())?;
                let fwd = literal_size(&ex.forward, phi.parts(), free);
                if literal_size(h, back.parts(), r) != fwd {
                    return Err(format!("exposure back-map changed the size (r={r}, free={free})"));
                }
                checked += 1;
            }
        }
    }

    if (3..=6).contains(&k) {
        let r = k - 1;
        if r >= 3 && h.is_uniform(k) {
            let ex = rgraph_expand(h, r).map_err(|e| e.to_string())?;
            for _ in 0..3 {
                let cut = Cut::uniform(r, n, &mut rng);
                ex.back_map(&cut).map_err(|e| e.to_string())?;
                if literal_size(&ex.forward, cut.parts(), r) != 2 * literal_size(h, cut.parts(), r) {
                    return Err("r-graph expansion is not exactly doubled".into());
                }
                checked += 1;
            }
        }
    }

    if n <= 14 {
        let w: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        let mut in_w = vec![false; n];
        w.iter().for_each(|&v| in_w[v] = true);
        let rho = sample_outside(n, &w, &mut rng);
        let red = hpart_double(h, &w, &rho).map_err(|e| e.to_string())?;
        let fixed = rho.assignments().to_vec();
        let conditional = brute_average(h, &fixed, 2);
        let (mut h_prime, mut n_multi) = (0, 0);
        for e in h.edges() {
            let outside: Vec<usize> = e.iter().filter(|&&v| !in_w[v]).map(|&v| rho.get(v).unwrap()).collect();
            if outside.len() == e.len() || outside.is_empty() {
                n_multi += usize::from(outside.contains(&0) && outside.contains(&1));
                continue;
            }
            if outside.contains(&0) && outside.contains(&1) {
                n_multi += 1;
            } else {
                h_prime += 1;
            }
        }
        if (red.h_prime, red.n_multi) != (h_prime, n_multi) {
            return Err(format!("e(H') and N^multi are ({}, {}), recount gives ({h_prime}, {n_multi})", red.h_prime, red.n_multi));
        }
        if red.conditional_expectation().to_rational() != conditional {
            return Err("doubled exposure: E[Z|rho] differs from enumeration".into());
        }
        for _ in 0..4 {
            let phi = Cut::uniform(2, n, &mut rng);
            let back = red.back_map(&phi).map_err(|e| e.to_string())?;
            let mut omega = phi.parts().to_vec();
            for (v, slot) in omega.iter_mut().enumerate() {
                if let Some(p) = rho.get(v) {
                    *slot = p;
                }
            }
            let mut bar = omega.clone();
            w.iter().for_each(|&v| bar[v] ^= 1);
            let (a, b) = (literal_size(h, &omega, 2), literal_size(h, &bar, 2));
            let z_part = literal_size(&red.forward, phi.parts(), 2);
            if a + b != z_part + h_prime + 2 * n_multi {
                return Err("doubled exposure: completion sum identity fails".into());
            }
            let x_fwd = q(z_part as i64, 1) - brute_expected(&red.forward, 2);
            let promised = x_fwd / q(2, 1) + (&conditional - &ez2);
            let realized = q(literal_size(h, back.parts(), 2) as i64, 1) - &ez2;
            if realized < promised || literal_size(h, back.parts(), 2) != a.max(b) {
                return Err("doubled exposure: excess transfer fails".into());
            }
            checked += 1;
        }

        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let mut v_prime: Vec<usize> = Vec::new();
        for v in order {
            v_prime.push(v);
            if h.edges().iter().any(|e| e.iter().filter(|x| v_prime.contains(x)).count() > 2) {
                v_prime.pop();
            }
        }
        let g = weighted_reduce(h, &v_prime).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let cut = Cut::uniform(2, n, &mut rng);
            let lib = check_weighted_identity(h, &g, &v_prime, &cut).map_err(|e| e.to_string())?;
            let mut fixed = vec![None; n];
            v_prime.iter().for_each(|&v| fixed[v] = Some(cut.part(v)));
            let average = brute_average(h, &fixed, 2) - &ez2;
            let mut weighted = q(0, 1);
            for e in h.edges() {
                let inside: Vec<usize> = e.iter().copied().filter(|v| v_prime.contains(v)).collect();
                if inside.len() == 2 {
                    let w = q(1, 1 << e.len()) * q(4, 1);
                    let sign = if cut.part(inside[0]) != cut.part(inside[1]) { 1 } else { -1 };
                    weighted += w * q(sign, 2);
                }
            }
            if lib.to_rational() != average || weighted != average {
                return Err(format!("weighted identity: library {lib}, recount {weighted}, average {average}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
