//! Acceptance gate. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

#![allow(clippy::needless_range_loop)]

use std::time::Instant;

use median_core::oracle::{query_traced, HopOrder};
use median_core::testkit::{
    bouquet, brute_ecc_with_limit, brute_median_set, cartesian_product, djokovic_partition, grid, hypercube,
    median_closure, path, random_tree, verify_structure, FULL_CHECK_LIMIT,
};
use median_core::{
    bfs_distances, build_oracle, compute_theta_classes, halfspace_sizes_all, label_size_bits, median_set,
    morse_with_stats, Graph, VertexWeights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_WEIGHT: u64 = 1_000_000;
const CLOSURE_GRAPHS: usize = 500;
const CLOSURE_MAX_N: usize = 1024;
const SAMPLED_PAIRS: usize = 100_000;
const LABEL_BITS_FACTOR: f64 = 64.0;
const LOOKUP_FACTOR: f64 = 4.0;
const SCALING_RATIO: f64 = 6.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

fn named(name: &str, g: Graph) -> (String, Graph) {
    (name.to_string(), g)
}

fn closure_corpus() -> Vec<(String, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < CLOSURE_GRAPHS {
        let k = rng.gen_range(4..=12);
        let p = rng.gen_range(2..=48);
        seed += 1;
        let g = median_closure(k, p, seed).unwrap();
        if g.n() <= CLOSURE_MAX_N {
            out.push((format!("closure:k={k},p={p},seed={seed}"), g));
        }
    }
    out
}

fn family_corpus() -> Vec<(String, Graph)> {
    let mut out = vec![
        named("path:1", path(1).unwrap()),
        named("path:2", path(2).unwrap()),
        named("path:300", path(300).unwrap()),
    ];
    for (n, seed) in [(10, 1), (100, 2), (1000, 3), (2500, 4), (5000, 5)] {
        out.push(named(&format!("tree:n={n},seed={seed}"), random_tree(n, seed).unwrap()));
    }
    for dims in [vec![2, 2], vec![3, 7], vec![16, 16], vec![32, 32], vec![64, 64], vec![5, 5, 5]] {
        let name = format!("grid:{}", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x"));
        out.push(named(&name, grid(&dims).unwrap()));
    }
    for k in 1..=12 {
        out.push(named(&format!("hypercube:{k}"), hypercube(k).unwrap()));
    }
    let t1 = random_tree(30, 7).unwrap();
    let t2 = random_tree(20, 8).unwrap();
    out.push(named("product:tree*path", cartesian_product(&t1, &path(12).unwrap()).unwrap()));
    out.push(named("product:tree*tree", cartesian_product(&t1, &t2).unwrap()));
    out.push(named("product:grid*cube", cartesian_product(&grid(&[6, 7]).unwrap(), &hypercube(3).unwrap()).unwrap()));
    out.push(named(
        "product:closure*path",
        cartesian_product(&median_closure(7, 9, 3).unwrap(), &path(6).unwrap()).unwrap(),
    ));
    for s in 0..6u64 {
        let parts: Vec<Graph> = (0..(3 + s as usize)).map(|j| median_closure(6, 7, 100 * s + j as u64).unwrap()).collect();
        out.push(named(&format!("bouquet:{s}"), bouquet(&parts).unwrap()));
    }
    out
}

fn weights(n: usize, seed: u64) -> VertexWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    VertexWeights::new((0..n).map(|_| rng.gen_range(0..=MAX_WEIGHT)).collect()).unwrap()
}

/// Criteria 1 and 5.
fn eccentricities(corpus: &[(String, Graph)]) -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut depth_violations = Vec::new();
    let mut worst_depth = (0.0f64, String::new());
    let mut slice_calls = 0;
    for (idx, (name, g)) in corpus.iter().enumerate() {
        for (wname, w) in [("zero", VertexWeights::zeros(g.n())), ("random", weights(g.n(), idx as u64))] {
            let (ecc, stats) = match morse_with_stats(g, &w) {
                Ok(x) => x,
                Err(e) => {
                    mismatches.push(format!("{name}/{wname}: {e}"));
                    continue;
                }
            };
            slice_calls += stats.slice_calls;
            let ratio = stats.max_depth as f64 / stats.depth_bound;
            if ratio > worst_depth.0 {
                worst_depth = (ratio, format!("{name} depth {} of {:.1}", stats.max_depth, stats.depth_bound));
            }
            if stats.max_depth as f64 > stats.depth_bound {
                depth_violations.push(name.clone());
            }
            if ecc != brute_ecc_with_limit(g, &w, 8192).unwrap() {
                mismatches.push(format!("{name}/{wname}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ecc = Outcome {
        pass: mismatches.is_empty() && secs < 300.0,
        detail: format!(
            "{} graphs x 2 weightings, {} mismatches {:?}, {} slice decompositions, {:.1}s",
            corpus.len(),
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>(),
            slice_calls,
            secs
        ),
    };
    let depth = Outcome {
        pass: depth_violations.is_empty(),
        detail: format!(
            "{} violations; tightest: {} ({:.2} of bound)",
            depth_violations.len(),
            worst_depth.1,
            worst_depth.0
        ),
    };
    (ecc, depth)
}

/// Criteria 2 and 4.
fn oracle(corpus: &[(String, Graph)]) -> (Outcome, Outcome) {
    let mut large = vec![
        named("grid:90x90", grid(&[90, 90]).unwrap()),
        named("hypercube:13", hypercube(13).unwrap()),
        named("tree:n=8192,seed=9", random_tree(8192, 9).unwrap()),
        named("grid:20x20x20", grid(&[20, 20, 20]).unwrap()),
        named("closure:k=14,p=70,seed=5", median_closure(14, 70, 5).unwrap()),
    ];
    let parts: Vec<Graph> = (0..40).map(|j| median_closure(8, 10, 500 + j).unwrap()).collect();
    large.push(named("bouquet:40", bouquet(&parts).unwrap()));

    let mut mismatches = Vec::new();
    let mut lookup_violations = Vec::new();
    let mut exhaustive = 0usize;
    let mut pairs = 0usize;
    let mut worst = (0.0f64, String::new());
    let mut check = |name: &str, g: &Graph, u: usize, v: usize, d: u32, table: &median_core::LabelTable| {
        let bound = (LOOKUP_FACTOR * log2(g.n()).powi(2)).max(LOOKUP_FACTOR);
        for order in [HopOrder::Descending, HopOrder::Ascending] {
            match query_traced(table, u, v, order) {
                Ok(tr) => {
                    if tr.dist != d as u64 {
                        mismatches.push(format!("{name} d({u},{v})"));
                    }
                    if order == HopOrder::Descending {
                        let r = tr.lookups as f64 / bound;
                        if r > worst.0 {
                            worst = (r, format!("{name}: {} lookups, bound {bound:.0}", tr.lookups));
                        }
                        if tr.lookups as f64 > bound {
                            lookup_violations.push(format!("{name} ({u},{v})"));
                        }
                    }
                }
                Err(e) => mismatches.push(format!("{name} ({u},{v}): {e}")),
            }
        }
    };

    for (name, g) in corpus.iter().filter(|(_, g)| g.n() <= 512) {
        let table = build_oracle(g).unwrap();
        exhaustive += 1;
        for u in 0..g.n() {
            let d = bfs_distances(g, u).unwrap();
            for v in 0..g.n() {
                check(name, g, u, v, d[v], &table);
                pairs += 1;
            }
        }
    }
    let sampled: Vec<&(String, Graph)> = corpus.iter().filter(|(_, g)| g.n() > 512).chain(large.iter()).collect();
    for (name, g) in &sampled {
        let table = build_oracle(g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(g.n() as u64);
        let sources = 100;
        for _ in 0..sources {
            let u = rng.gen_range(0..g.n());
            let d = bfs_distances(g, u).unwrap();
            for _ in 0..SAMPLED_PAIRS / sources {
                let v = rng.gen_range(0..g.n());
                check(name, g, u, v, d[v], &table);
                pairs += 1;
            }
        }
    }
    let exact = Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{exhaustive} graphs all pairs, {} graphs (up to n={}) with {SAMPLED_PAIRS} sampled pairs, {pairs} pairs, {} mismatches {:?}",
            sampled.len(),
            sampled.iter().map(|(_, g)| g.n()).max().unwrap_or(0),
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>()
        ),
    };
    let lookups = Outcome {
        pass: lookup_violations.is_empty(),
        detail: format!("{} violations; tightest: {} ({:.2} of bound)", lookup_violations.len(), worst.1, worst.0),
    };
    (exact, lookups)
}

/// Criterion 3.
fn label_sizes() -> Outcome {
    let families: Vec<(&str, Vec<Graph>)> = vec![
        ("hypercube", (3..=13).map(|k| hypercube(k).unwrap()).collect()),
        ("grid", (2..=6).map(|e| grid(&[1 << e, 1 << e]).unwrap()).chain([grid(&[90, 90]).unwrap()]).collect()),
        ("tree", (3..=13).map(|e| random_tree(1 << e, e as u64).unwrap()).collect()),
        ("grid3", [2usize, 4, 8, 16, 20].iter().map(|&s| grid(&[s, s, s]).unwrap()).collect()),
        (
            "bouquet",
            [1usize, 2, 4, 8, 16, 32, 64]
                .iter()
                .map(|&c| bouquet(&(0..c as u64).map(|j| median_closure(8, 10, 900 + j).unwrap()).collect::<Vec<_>>()).unwrap())
                .collect(),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, graphs) in families {
        let mut ratios = Vec::new();
        for g in graphs.iter().filter(|g| g.n() >= 8) {
            let (max_bits, _) = label_size_bits(&build_oracle(g).unwrap());
            let cube = log2(g.n()).powi(3);
            if max_bits as f64 > LABEL_BITS_FACTOR * cube {
                pass = false;
            }
            ratios.push((g.n(), max_bits as f64 / cube));
        }
        let half = ratios.len() / 2;
        let lower = ratios[..half.max(1)].iter().map(|r| r.1).fold(0.0, f64::max);
        let upper = ratios[half..].iter().map(|r| r.1).fold(0.0, f64::max);
        let trending = upper > lower * 1.05;
        if trending {
            pass = false;
        }
        parts.push(format!(
            "{name}: bits/log^3 {} ({})",
            ratios.iter().map(|(n, r)| format!("{n}:{r:.2}")).collect::<Vec<_>>().join(" "),
            if trending { "rising" } else { "flat or falling" }
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

/// Criteria 6 and 7.
fn structure(corpus: &[(String, Graph)]) -> (Outcome, Outcome) {
    let mut djokovic = 0;
    let mut convexity = 0;
    let mut structural = 0;
    let mut theta_failures = Vec::new();
    let mut median_checked = 0;
    let mut median_failures = Vec::new();
    for (name, g) in corpus {
        let t = compute_theta_classes(g).unwrap();
        if g.n() <= 1024 {
            djokovic += 1;
            if t.class_of_edges() != djokovic_partition(g).unwrap().as_slice() {
                theta_failures.push(format!("{name}: partition differs"));
            }
        }
        if g.n() <= 4096 {
            structural += 1;
            let report = verify_structure(g, &t);
            if report.convexity_checked {
                convexity += 1;
            }
            if !report.is_clean() {
                theta_failures.push(format!("{name}: {}", report.violations[0]));
            }
            median_checked += 1;
            let sizes = halfspace_sizes_all(g, &t).unwrap();
            if median_set(g, &t, &sizes) != brute_median_set(g).unwrap() {
                median_failures.push(name.clone());
            }
        }
    }
    (
        Outcome {
            pass: theta_failures.is_empty(),
            detail: format!(
                "Djokovic equality on {djokovic} graphs, structural checks on {structural} (convexity on {convexity} with n <= {FULL_CHECK_LIMIT}), {} failures {:?}",
                theta_failures.len(),
                theta_failures.iter().take(3).collect::<Vec<_>>()
            ),
        },
        Outcome {
            pass: median_failures.is_empty(),
            detail: format!(
                "{median_checked} graphs, {} failures {:?}",
                median_failures.len(),
                median_failures.iter().take(3).collect::<Vec<_>>()
            ),
        },
    )
}

/// Criterion 8.
fn scaling() -> Outcome {
    let mut times = Vec::new();
    for side in [64usize, 128, 256] {
        let g = grid(&[side, side]).unwrap();
        let w = VertexWeights::zeros(g.n());
        let best = (0..3)
            .map(|_| {
                let start = Instant::now();
                morse_with_stats(&g, &w).unwrap();
                start.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min);
        times.push((g.n(), best));
    }
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1].1 / w[0].1).collect();
    Outcome {
        pass: ratios.iter().all(|&r| r <= SCALING_RATIO),
        detail: format!(
            "{} ; ratios {}",
            times.iter().map(|(n, t)| format!("n={n}: {:.1}ms", t * 1e3)).collect::<Vec<_>>().join(", "),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn main() {
    let mut corpus = family_corpus();
    corpus.extend(closure_corpus());

    let (c1, c5) = eccentricities(&corpus);
    let (c2, c4) = oracle(&corpus);
    let c3 = label_sizes();
    let (c6, c7) = structure(&corpus);
    let c8 = scaling();

    let results = [
        ("1 eccentricity exactness", c1),
        ("2 oracle exactness", c2),
        ("3 label size bound", c3),
        ("4 query lookup bound", c4),
        ("5 recursion depth bound", c5),
        ("6 theta structure", c6),
        ("7 median set equality", c7),
        ("8 grid scaling trend", c8),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("acceptance {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria passed", results.len());
}
