use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{bfs_unchecked, Graph, NONE};
use crate::testkit::oracles::{oracle_limit, AllPairsOracle};
use crate::theta::ThetaPartition;

/// Graphs up to this size get the full convexity and triple checks.
pub const FULL_CHECK_LIMIT: usize = 256;

const SAMPLED_TRIPLES: usize = 100_000;

/// Findings of [`verify_structure`].
#[derive(Debug, Clone, Default)]
pub struct StructureReport {
    pub violations: Vec<String>,
    pub classes_checked: usize,
    pub convexity_checked: bool,
    pub triples_checked: usize,
}

impl StructureReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every class of `t` for the matching property, the two-halfspace
/// split, boundary isomorphism and (for small graphs) convexity of both
/// halfspaces and both boundaries, then checks the median property on
/// vertex triples.
pub fn verify_structure(g: &Graph, t: &ThetaPartition) -> StructureReport {
    let n = g.n();
    let mut report = StructureReport::default();
    let apd = if n <= FULL_CHECK_LIMIT {
        AllPairsOracle::new(g).ok()
    } else {
        None
    };
    report.convexity_checked = apd.is_some();
    let mut partner = vec![NONE; n];
    for i in 0..t.q() {
        report.classes_checked += 1;
        let edges = t.class_edges(i);
        let mut matched = true;
        for &e in edges {
            let (a, b) = g.edge(e as usize);
            for x in [a, b] {
                if partner[x] != NONE {
                    report
                        .violations
                        .push(format!("class {i}: two class edges at vertex {x}"));
                    matched = false;
                }
            }
            partner[a] = b as u32;
            partner[b] = a as u32;
        }

        let side = t.side_indicator(g, i);
        let far: Vec<usize> = (0..n).filter(|&v| side[v]).collect();
        if far.is_empty() {
            report.violations.push(format!("class {i}: removal leaves one component"));
        } else {
            let reach = bfs_avoiding(g, t, i, far[0]);
            if far.iter().any(|&v| !reach[v]) {
                report.violations.push(format!("class {i}: removal leaves more than two components"));
            }
        }
        for &e in edges {
            let (a, b) = g.edge(e as usize);
            if side[a] == side[b] {
                report
                    .violations
                    .push(format!("class {i}: edge {a}-{b} does not cross the cut"));
            }
        }

        if matched {
            for &e in edges {
                let (a, b) = g.edge(e as usize);
                for &a2 in g.neighbor_ids(a) {
                    let b2 = partner[a2 as usize];
                    if b2 != NONE && b2 as usize != a && a2 as usize != b && !g.has_edge(b, b2 as usize) {
                        report.violations.push(format!(
                            "class {i}: boundary edge {a}-{a2} has no image between {b} and {b2}"
                        ));
                    }
                }
            }
        }

        if let Some(apd) = &apd {
            let h0: Vec<bool> = side.iter().map(|&s| !s).collect();
            let b0: Vec<bool> = (0..n).map(|v| !side[v] && partner[v] != NONE).collect();
            let b1: Vec<bool> = (0..n).map(|v| side[v] && partner[v] != NONE).collect();
            for (name, set) in [("H0", &h0), ("H1", &side), ("boundary of H0", &b0), ("boundary of H1", &b1)] {
                if let Some((u, v, w)) = convexity_witness(g, apd, set) {
                    report.violations.push(format!(
                        "class {i}: {name} not convex, {w} lies between {u} and {v}"
                    ));
                }
            }
        }

        for &e in edges {
            let (a, b) = g.edge(e as usize);
            partner[a] = NONE;
            partner[b] = NONE;
        }
    }

    match median_violation(g) {
        Ok((checked, None)) => report.triples_checked = checked,
        Ok((checked, Some(msg))) => {
            report.triples_checked = checked;
            report.violations.push(msg);
        }
        Err(_) => {}
    }
    report
}

fn bfs_avoiding(g: &Graph, t: &ThetaPartition, class: usize, source: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(v) = stack.pop() {
        for (w, e) in g.neighbors(v) {
            if !seen[w] && t.class_of(e) != class {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Some `(u, v, w)` with `u, v` in the set and `w` on a shortest `u-v`
/// path outside it, if the set is not convex.
fn convexity_witness(g: &Graph, apd: &AllPairsOracle, set: &[bool]) -> Option<(usize, usize, usize)> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut hit = vec![NONE; n];
    for u in (0..n).filter(|&u| set[u]) {
        let row = apd.row(u);
        order.sort_by_key(|&x| std::cmp::Reverse(row[x]));
        for x in 0..n {
            hit[x] = if set[x] { x as u32 } else { NONE };
        }
        // hit[x] = some set vertex v with x on a shortest u-v path
        for &x in &order {
            if hit[x] == NONE {
                continue;
            }
            for &p in g.neighbor_ids(x) {
                let p = p as usize;
                if row[p] + 1 == row[x] {
                    if !set[p] {
                        return Some((u, hit[x] as usize, p));
                    }
                    if hit[p] == NONE {
                        hit[p] = hit[x];
                    }
                }
            }
        }
    }
    None
}

/// Whether every vertex triple has exactly one median. Exhaustive up to
/// [`FULL_CHECK_LIMIT`] vertices, sampled above.
pub fn is_median_graph(g: &Graph) -> Result<bool> {
    Ok(median_violation(g)?.1.is_none())
}

fn median_violation(g: &Graph) -> Result<(usize, Option<String>)> {
    let n = g.n();
    let root = bfs_unchecked(g, 0);
    if root.contains(&NONE) {
        return Ok((0, Some("graph is disconnected".into())));
    }
    if n <= FULL_CHECK_LIMIT {
        Ok(full_triples(g))
    } else if n <= oracle_limit() {
        Ok(sampled_triples(g, &AllPairsOracle::new(g)?))
    } else {
        Err(crate::Error::Guard(format!("median triple check on {n} vertices")))
    }
}

fn describe(x: usize, y: usize, z: usize, count: u32) -> String {
    if count == 0 {
        format!("triple ({x}, {y}, {z}) has no median")
    } else {
        format!("triple ({x}, {y}, {z}) has {count} medians")
    }
}

fn full_triples(g: &Graph) -> (usize, Option<String>) {
    let n = g.n();
    let words = n.div_ceil(64);
    // interval[(u * n + v) * words ..] is the bitset I(u, v)
    let mut interval = vec![0u64; n * n * words];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for u in 0..n {
        let dist = bfs_unchecked(g, u);
        order.clear();
        order.extend(0..n);
        order.sort_by_key(|&v| dist[v]);
        for &v in &order {
            let base = (u * n + v) * words;
            interval[base + v / 64] |= 1 << (v % 64);
            for &p in g.neighbor_ids(v) {
                let p = p as usize;
                if dist[p] + 1 == dist[v] {
                    let pbase = (u * n + p) * words;
                    for k in 0..words {
                        interval[base + k] |= interval[pbase + k];
                    }
                }
            }
        }
    }
    let bits = |u: usize, v: usize| &interval[(u * n + v) * words..(u * n + v + 1) * words];
    let mut checked = 0;
    for x in 0..n {
        for y in x + 1..n {
            let ixy = bits(x, y);
            for z in y + 1..n {
                checked += 1;
                let (iyz, ixz) = (bits(y, z), bits(x, z));
                let count: u32 = (0..words).map(|k| (ixy[k] & iyz[k] & ixz[k]).count_ones()).sum();
                if count != 1 {
                    return (checked, Some(describe(x, y, z, count)));
                }
            }
        }
    }
    (checked, None)
}

fn sampled_triples(g: &Graph, apd: &AllPairsOracle) -> (usize, Option<String>) {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    for checked in 1..=SAMPLED_TRIPLES {
        let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let (rx, ry, rz) = (apd.row(x), apd.row(y), apd.row(z));
        let (dxy, dyz, dxz) = (rx[y], ry[z], rx[z]);
        let count = (0..n)
            .filter(|&w| rx[w] + ry[w] == dxy && ry[w] + rz[w] == dyz && rx[w] + rz[w] == dxz)
            .count() as u32;
        if count != 1 {
            return (checked, Some(describe(x, y, z, count)));
        }
    }
    (SAMPLED_TRIPLES, None)
}
