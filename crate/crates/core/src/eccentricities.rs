//! All weighted eccentricities of a median graph by recursive separation
//! along Θ-classes.
//!
//! A call on `n >= 3` vertices either splits along a class whose smaller
//! halfspace has at least `n / (2 ln n)` vertices and merges the two
//! recursive answers through gates, or, when no such class exists, peels
//! the graph into small gated slices along the ladder from the unique
//! median toward a farthest vertex.

use crate::error::{Error, Result};
use crate::graph::{bfs_unchecked, gated_bfs_within, induced_unchecked, GateAssignment, Graph, VertexWeights, NONE};
use crate::theta::{compute_theta_classes, halfspace_sizes_all, ladder_table, median_set, HalfspaceSizes, ThetaPartition};

/// Weighted eccentricity per vertex.
pub type EccVector = Vec<i64>;

/// Outcome of the balance test with `f(n) = 2 ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceVerdict {
    BalancedClass(usize),
    AllUnbalanced,
}

/// `min_side >= n / (2 ln n)`, evaluated as `min_side * 2 ln n >= n`.
pub fn is_two_log_balanced(min_side: usize, n: usize) -> bool {
    min_side as f64 * 2.0 * (n as f64).ln() >= n as f64
}

/// The balanced class with the largest smaller side (smallest id on ties).
pub fn find_balanced_class(g: &Graph, t: &ThetaPartition, sizes: &HalfspaceSizes) -> BalanceVerdict {
    let n = g.n();
    let mut best: Option<(usize, usize)> = None;
    for i in 0..t.q() {
        let s = sizes.min_side(i);
        if is_two_log_balanced(s, n) && best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    match best {
        Some((i, _)) => BalanceVerdict::BalancedClass(i),
        None => BalanceVerdict::AllUnbalanced,
    }
}

fn side_lists(side: &[bool]) -> (Vec<u32>, Vec<u32>) {
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();
    for (v, &s) in side.iter().enumerate() {
        if s {
            h1.push(v as u32);
        } else {
            h0.push(v as u32);
        }
    }
    (h0, h1)
}

/// Combines eccentricities of the two halfspaces of class `i`. `ecc_h0` and
/// `ecc_h1` are indexed by the ascending vertex order of side 0 and side 1.
pub fn merge_balanced(g: &Graph, t: &ThetaPartition, i: usize, ecc_h0: &[i64], ecc_h1: &[i64]) -> Result<EccVector> {
    t.check_class(i)?;
    let side = t.side_indicator(g, i);
    let (h0, h1) = side_lists(&side);
    if h0.len() != ecc_h0.len() || h1.len() != ecc_h1.len() {
        return Err(Error::WeightLength {
            got: ecc_h0.len() + ecc_h1.len(),
            expected: g.n(),
        });
    }
    Ok(merge_sides(g, &side, &h0, &h1, ecc_h0, ecc_h1))
}

fn merge_sides(g: &Graph, side: &[bool], h0: &[u32], h1: &[u32], ecc_h0: &[i64], ecc_h1: &[i64]) -> EccVector {
    let n = g.n();
    let mut own = vec![0i64; n];
    for (k, &v) in h0.iter().enumerate() {
        own[v as usize] = ecc_h0[k];
    }
    for (k, &v) in h1.iter().enumerate() {
        own[v as usize] = ecc_h1[k];
    }
    let to1 = gated_bfs_within(g, h1.iter().map(|&v| v as usize), |_| true);
    let to0 = gated_bfs_within(g, h0.iter().map(|&v| v as usize), |_| true);
    (0..n)
        .map(|u| {
            let other = if side[u] { &to0 } else { &to1 };
            let gate = other.gate_of(u);
            own[u].max(other.dist_of(u) as i64 + own[gate])
        })
        .collect()
}

/// Eccentricities when `v0` is its own farthest weighted vertex.
pub fn ecc_from_center(g: &Graph, w: &VertexWeights, v0: usize) -> Result<EccVector> {
    if v0 >= g.n() {
        return Err(Error::InvalidVertex { id: v0, n: g.n() });
    }
    let dist = bfs_unchecked(g, v0);
    Ok(center_eccentricities(&dist, w.as_slice(), v0))
}

fn center_eccentricities(dist: &[u32], w: &[i64], v0: usize) -> EccVector {
    let w0 = w[v0];
    assert!(
        dist.iter().zip(w).all(|(&d, &wv)| d as i64 + wv <= w0),
        "vertex {v0} is not its own farthest weighted vertex"
    );
    dist.iter()
        .enumerate()
        .map(|(u, &d)| if u == v0 { w0 } else { d as i64 + w0 })
        .collect()
}

/// Slices along the wide ladder of an all-unbalanced graph.
#[derive(Debug, Clone)]
pub struct SliceDecomposition {
    /// The unique median.
    pub v0: usize,
    /// Farthest vertex from `v0` for `d + ω`.
    pub u_max: usize,
    /// `d(v0, u_max) + ω(u_max)`.
    pub reach: i64,
    /// Wide ladder classes, ascending.
    pub ladder: Vec<usize>,
    /// Slice index per vertex, `NONE` for the final large set.
    pub slice_of: Vec<u32>,
    /// Vertices of each slice, ascending.
    pub slices: Vec<Vec<u32>>,
    pub large: Vec<u32>,
    pub dist_v0: Vec<u32>,
    /// Gates of slice `i` inside the large set `G_i`.
    pub gates: Vec<GateAssignment>,
}

impl SliceDecomposition {
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum UnbalancedPlan {
    CenterShortcut { v0: usize },
    Slices(SliceDecomposition),
}

/// Median, farthest vertex and slices of an all-unbalanced graph.
pub fn unbalanced_setup(g: &Graph, t: &ThetaPartition, sizes: &HalfspaceSizes, w: &VertexWeights) -> Result<UnbalancedPlan> {
    if w.len() != g.n() {
        return Err(Error::WeightLength { got: w.len(), expected: g.n() });
    }
    setup(g, t, sizes, w.as_slice())
}

fn setup(g: &Graph, t: &ThetaPartition, sizes: &HalfspaceSizes, w: &[i64]) -> Result<UnbalancedPlan> {
    let n = g.n();
    let med = median_set(g, t, sizes);
    let &[v0] = med.as_slice() else {
        return Err(Error::NotMedian(format!(
            "all classes unbalanced but the median set has {} vertices",
            med.len()
        )));
    };
    let lt = ladder_table(g, t, v0)?;
    let score = |v: usize| lt.dist[v] as i64 + w[v];
    let mut u_max = v0;
    for v in 0..n {
        if score(v) > score(u_max) {
            u_max = v;
        }
    }
    if u_max == v0 {
        return Ok(UnbalancedPlan::CenterShortcut { v0 });
    }
    let reach = score(u_max);
    let ladder: Vec<usize> = lt.ladder(u_max).iter().collect();
    let mut slice_of = vec![NONE; n];
    let mut slices = vec![Vec::new(); ladder.len()];
    let mut large = Vec::new();
    for v in 0..n {
        let lad = lt.ladder(v);
        match ladder.iter().position(|&c| lad.contains(c)) {
            Some(j) => {
                slice_of[v] = j as u32;
                slices[j].push(v as u32);
            }
            None => large.push(v as u32),
        }
    }
    for (j, s) in slices.iter().enumerate() {
        assert!(
            !s.is_empty() && !is_two_log_balanced(s.len(), n),
            "slice {j} has {} of {n} vertices",
            s.len()
        );
    }
    let gates = (0..slices.len())
        .map(|j| {
            gated_bfs_within(g, slices[j].iter().map(|&v| v as usize), |v| {
                slice_of[v] == NONE || slice_of[v] as usize >= j
            })
        })
        .collect();
    Ok(UnbalancedPlan::Slices(SliceDecomposition {
        v0,
        u_max,
        reach,
        ladder,
        slice_of,
        slices,
        large,
        dist_v0: lt.dist,
        gates,
    }))
}

/// Lifted weights on slice `i`, indexed like `dec.slices[i]`: a vertex with
/// a nonempty open fiber in `G_i` gets the largest `d + ω` over that fiber,
/// every other vertex keeps its weight.
pub fn star_weights(g: &Graph, dec: &SliceDecomposition, i: usize, w: &VertexWeights) -> VertexWeights {
    VertexWeights::from_raw(lift(g, dec, i, w.as_slice()))
}

fn lift(g: &Graph, dec: &SliceDecomposition, i: usize, w: &[i64]) -> Vec<i64> {
    let ga = &dec.gates[i];
    let mut best = vec![i64::MIN; g.n()];
    for z in 0..g.n() {
        let x = ga.gate[z];
        if x != NONE && x as usize != z {
            let x = x as usize;
            best[x] = best[x].max(ga.dist[z] as i64 + w[z]);
        }
    }
    dec.slices[i]
        .iter()
        .map(|&x| {
            let x = x as usize;
            let outward = g.neighbor_ids(x).iter().any(|&y| {
                let s = dec.slice_of[y as usize];
                s == NONE || s as usize > i
            });
            assert_eq!(outward, best[x] != i64::MIN, "open fiber of {x} disagrees with the boundary");
            if outward {
                best[x]
            } else {
                w[x]
            }
        })
        .collect()
}

/// Assembles eccentricities from the two recursive answers on every slice.
/// `ecc_slices[i] = (ε on (S_i, ω), ε on (S_i, ω*_i))`, indexed like
/// `dec.slices[i]`.
pub fn peel_slices(dec: &SliceDecomposition, ecc_slices: &[(EccVector, EccVector)]) -> EccVector {
    let n = dec.slice_of.len();
    let mut pos = vec![0u32; n];
    for s in &dec.slices {
        for (k, &v) in s.iter().enumerate() {
            pos[v as usize] = k as u32;
        }
    }
    let mut b = vec![i64::MIN; n];
    for i in (0..dec.len()).rev() {
        let (plain, lifted) = &ecc_slices[i];
        let ga = &dec.gates[i];
        for x in 0..n {
            let s = dec.slice_of[x];
            if s == NONE || (s as usize) < i {
                continue;
            }
            if s as usize == i {
                let k = pos[x] as usize;
                b[x] = plain[k].max(lifted[k]);
            } else {
                let gate = ga.gate_of(x);
                b[x] = b[x].max(ga.dist_of(x) as i64 + plain[pos[gate] as usize]);
            }
        }
    }
    for &z in &dec.large {
        b[z as usize] = dec.dist_v0[z as usize] as i64 + dec.reach;
    }
    b
}

/// Shape of one run's recursion tree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MorseStats {
    pub calls: usize,
    pub max_depth: usize,
    /// `2 (ln n)^2 + 2` for the top-level `n`.
    pub depth_bound: f64,
    pub base_calls: usize,
    pub balanced_calls: usize,
    pub center_shortcuts: usize,
    pub slice_calls: usize,
    /// Largest `|child| / (n' (1 - 1/(2 ln n')))` over all calls.
    pub max_child_ratio: f64,
    /// Largest `Σ |children| / n'` over all calls.
    pub max_total_ratio: f64,
    /// Smallest `|large set| / n'` over slice calls.
    pub min_large_fraction: f64,
}

/// All weighted eccentricities `ε(u) = max_v d(u,v) + ω(v)`.
pub fn morse(g: &Graph, w: &VertexWeights) -> Result<EccVector> {
    morse_with_stats(g, w).map(|(e, _)| e)
}

/// [`morse`] together with recursion statistics.
pub fn morse_with_stats(g: &Graph, w: &VertexWeights) -> Result<(EccVector, MorseStats)> {
    if w.len() != g.n() {
        return Err(Error::WeightLength { got: w.len(), expected: g.n() });
    }
    let ln = (g.n() as f64).ln();
    let mut stats = MorseStats {
        depth_bound: 2.0 * ln * ln + 2.0,
        min_large_fraction: 1.0,
        ..MorseStats::default()
    };
    let ecc = recurse(g, w.as_slice(), 0, &mut stats)?;
    Ok((ecc, stats))
}

fn child_weights(w: &[i64], vertices: &[u32]) -> Vec<i64> {
    vertices.iter().map(|&v| w[v as usize]).collect()
}

fn record_children(stats: &mut MorseStats, n: usize, children: &[usize]) {
    let cap = n as f64 * (1.0 - 1.0 / (2.0 * (n as f64).ln()));
    for &c in children {
        let ratio = c as f64 / cap;
        assert!(ratio <= 1.0, "recursive call on {c} of {n} vertices");
        stats.max_child_ratio = stats.max_child_ratio.max(ratio);
    }
    let total: usize = children.iter().sum();
    stats.max_total_ratio = stats.max_total_ratio.max(total as f64 / n as f64);
}

fn recurse(g: &Graph, w: &[i64], depth: usize, stats: &mut MorseStats) -> Result<EccVector> {
    stats.calls += 1;
    stats.max_depth = stats.max_depth.max(depth);
    assert!(
        depth as f64 <= stats.depth_bound,
        "recursion depth {depth} exceeds {}",
        stats.depth_bound
    );
    debug_assert!(w.iter().all(|&x| x < i64::MAX / 4));
    let n = g.n();
    match n {
        1 => {
            stats.base_calls += 1;
            return Ok(vec![w[0]]);
        }
        2 => {
            stats.base_calls += 1;
            return Ok(vec![w[0].max(1 + w[1]), w[1].max(1 + w[0])]);
        }
        _ => {}
    }
    let t = compute_theta_classes(g)?;
    let sizes = halfspace_sizes_all(g, &t)?;
    match find_balanced_class(g, &t, &sizes) {
        BalanceVerdict::BalancedClass(i) => {
            stats.balanced_calls += 1;
            let side = t.side_indicator(g, i);
            let (h0, h1) = side_lists(&side);
            record_children(stats, n, &[h0.len(), h1.len()]);
            let e0 = recurse(&induced_unchecked(g, h0.clone()).graph, &child_weights(w, &h0), depth + 1, stats)?;
            let e1 = recurse(&induced_unchecked(g, h1.clone()).graph, &child_weights(w, &h1), depth + 1, stats)?;
            Ok(merge_sides(g, &side, &h0, &h1, &e0, &e1))
        }
        BalanceVerdict::AllUnbalanced => match setup(g, &t, &sizes, w)? {
            UnbalancedPlan::CenterShortcut { v0 } => {
                stats.center_shortcuts += 1;
                Ok(center_eccentricities(&bfs_unchecked(g, v0), w, v0))
            }
            UnbalancedPlan::Slices(dec) => {
                stats.slice_calls += 1;
                let sizes: Vec<usize> = dec.slices.iter().flat_map(|s| [s.len(), s.len()]).collect();
                record_children(stats, n, &sizes);
                stats.min_large_fraction = stats.min_large_fraction.min(dec.large.len() as f64 / n as f64);
                let mut answers = Vec::with_capacity(dec.len());
                for i in 0..dec.len() {
                    let sub = induced_unchecked(g, dec.slices[i].clone());
                    let plain = recurse(&sub.graph, &child_weights(w, &dec.slices[i]), depth + 1, stats)?;
                    let lifted = recurse(&sub.graph, &lift(g, &dec, i, w), depth + 1, stats)?;
                    answers.push((plain, lifted));
                }
                Ok(peel_slices(&dec, &answers))
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Validation;
    use crate::testkit::{brute_ecc, grid, hypercube, path};

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l)), Validation::Check).unwrap()
    }

    fn weights(v: &[u64]) -> VertexWeights {
        VertexWeights::new(v.to_vec()).unwrap()
    }

    #[test]
    fn base_cases() {
        let g = path(2).unwrap();
        assert_eq!(morse(&g, &weights(&[5, 0])).unwrap(), vec![5, 6]);
        let g = path(1).unwrap();
        assert_eq!(morse(&g, &weights(&[7])).unwrap(), vec![7]);
    }

    #[test]
    fn hypercube_unweighted() {
        let g = hypercube(3).unwrap();
        assert_eq!(morse(&g, &VertexWeights::zeros(8)).unwrap(), vec![3; 8]);
    }

    #[test]
    fn balance_threshold() {
        let g = hypercube(3).unwrap();
        let t = compute_theta_classes(&g).unwrap();
        let s = halfspace_sizes_all(&g, &t).unwrap();
        assert_eq!(find_balanced_class(&g, &t, &s), BalanceVerdict::BalancedClass(0));
        let g = star(3);
        let t = compute_theta_classes(&g).unwrap();
        let s = halfspace_sizes_all(&g, &t).unwrap();
        assert_eq!(find_balanced_class(&g, &t, &s), BalanceVerdict::AllUnbalanced);
        for n in [3usize, 4, 10, 100, 1000, 4096, 65536, 1 << 20, 1 << 30] {
            let edge = n as f64 / (2.0 * (n as f64).ln());
            let c = edge.ceil() as usize;
            assert!(is_two_log_balanced(c, n), "n={n}");
            assert!(is_two_log_balanced(c + 1, n));
            assert!(!is_two_log_balanced(c - 1, n), "n={n}");
        }
    }

    #[test]
    fn merge_square_and_path() {
        let g = path(2).unwrap();
        let t = compute_theta_classes(&g).unwrap();
        assert_eq!(merge_balanced(&g, &t, 0, &[4], &[1]).unwrap(), vec![4, 5]);
        let g = hypercube(2).unwrap();
        let t = compute_theta_classes(&g).unwrap();
        assert_eq!(merge_balanced(&g, &t, 0, &[1, 1], &[1, 1]).unwrap(), vec![2; 4]);
        let g = grid(&[4, 4]).unwrap();
        let t = compute_theta_classes(&g).unwrap();
        let s = halfspace_sizes_all(&g, &t).unwrap();
        let BalanceVerdict::BalancedClass(i) = find_balanced_class(&g, &t, &s) else {
            panic!("grid must be balanced")
        };
        assert_eq!(s.min_side(i), 8);
        let side = t.side_indicator(&g, i);
        let (h0, h1) = side_lists(&side);
        let e0 = brute_ecc(&induced_unchecked(&g, h0).graph, &VertexWeights::zeros(8)).unwrap();
        let e1 = brute_ecc(&induced_unchecked(&g, h1).graph, &VertexWeights::zeros(8)).unwrap();
        let merged = merge_balanced(&g, &t, i, &e0, &e1).unwrap();
        assert_eq!(merged, brute_ecc(&g, &VertexWeights::zeros(16)).unwrap());
    }

    #[test]
    fn star_setup_and_peeling() {
        let g = star(3);
        let t = compute_theta_classes(&g).unwrap();
        let s = halfspace_sizes_all(&g, &t).unwrap();
        let w = VertexWeights::zeros(4);
        let UnbalancedPlan::Slices(dec) = unbalanced_setup(&g, &t, &s, &w).unwrap() else {
            panic!("expected slices")
        };
        assert_eq!((dec.v0, dec.u_max, dec.reach), (0, 1, 1));
        assert_eq!(dec.ladder, vec![t.class_of(g.edge_between(0, 1).unwrap())]);
        assert_eq!(dec.slices, vec![vec![1]]);
        assert_eq!(dec.large, vec![0, 2, 3]);
        assert_eq!(star_weights(&g, &dec, 0, &w).as_slice(), &[2]);
        let ecc = peel_slices(&dec, &[(vec![0], vec![2])]);
        assert_eq!(ecc, vec![1, 2, 2, 2]);

        let heavy = weights(&[5, 0, 0, 0]);
        assert!(matches!(
            unbalanced_setup(&g, &t, &s, &heavy).unwrap(),
            UnbalancedPlan::CenterShortcut { v0: 0 }
        ));
    }

    #[test]
    fn center_formula() {
        let g = path(3).unwrap();
        assert_eq!(ecc_from_center(&g, &weights(&[0, 9, 0]), 1).unwrap(), vec![10, 9, 10]);
        let g = path(1).unwrap();
        assert_eq!(ecc_from_center(&g, &weights(&[4]), 0).unwrap(), vec![4]);
        let g = star(5);
        let w = weights(&[3, 1, 0, 2, 0, 1]);
        assert_eq!(ecc_from_center(&g, &w, 0).unwrap(), brute_ecc(&g, &w).unwrap());
    }

    #[test]
    #[should_panic(expected = "not its own farthest")]
    fn center_formula_rejects_light_center() {
        let g = path(3).unwrap();
        let _ = ecc_from_center(&g, &VertexWeights::zeros(3), 1);
    }

    #[test]
    fn stats_are_recorded() {
        let g = grid(&[8, 8]).unwrap();
        let (ecc, stats) = morse_with_stats(&g, &VertexWeights::zeros(64)).unwrap();
        assert_eq!(ecc, brute_ecc(&g, &VertexWeights::zeros(64)).unwrap());
        assert!(stats.balanced_calls > 0);
        assert!(stats.max_depth as f64 <= stats.depth_bound);
        assert!(stats.max_child_ratio <= 1.0);
    }
}
