//! Θ-classes of median graphs and the structure derived from them:
//! halfspaces, boundaries, halfspace sizes, the median set and ladder sets.
//!
//! Side convention: for every class, side 0 is the halfspace containing
//! vertex 0 and side 1 the other one. An edge's endpoint closer to vertex 0
//! lies on side 0.

use std::collections::VecDeque;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{bfs_unchecked, Graph, NONE};
use crate::unionfind::UnionFind;

/// Sorted set of class ids. Ladder sets and POFs never exceed `log2 n`
/// elements, so the inline capacity covers graphs up to 2^8 vertices
/// without allocation.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassSet(SmallVec<[u32; 8]>);

impl ClassSet {
    pub fn new() -> Self {
        ClassSet(SmallVec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.binary_search(&(c as u32)).is_ok()
    }

    /// Returns `false` when `c` was already present.
    pub fn insert(&mut self, c: usize) -> bool {
        match self.0.binary_search(&(c as u32)) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, c as u32);
                true
            }
        }
    }

    pub fn remove(&mut self, c: usize) -> bool {
        match self.0.binary_search(&(c as u32)) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn without(&self, c: usize) -> ClassSet {
        let mut out = self.clone();
        out.remove(c);
        out
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.0.iter().map(|&c| c as usize)
    }

    pub fn intersection(&self, other: &ClassSet) -> ClassSet {
        self.iter().filter(|&c| other.contains(c)).collect()
    }

    pub fn difference(&self, other: &ClassSet) -> ClassSet {
        self.iter().filter(|&c| !other.contains(c)).collect()
    }

    pub fn is_disjoint(&self, other: &ClassSet) -> bool {
        self.iter().all(|c| !other.contains(c))
    }

    pub fn is_subset(&self, other: &ClassSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl FromIterator<usize> for ClassSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: SmallVec<[u32; 8]> = iter.into_iter().map(|c| c as u32).collect();
        v.sort_unstable();
        v.dedup();
        ClassSet(v)
    }
}

impl fmt::Debug for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// The Θ-class partition of a median graph's edges.
#[derive(Debug, Clone)]
pub struct ThetaPartition {
    class_of_edge: Vec<u32>,
    class_offsets: Vec<u32>,
    class_members: Vec<u32>,
    /// BFS distances from vertex 0; orient every edge.
    root_dist: Vec<u32>,
    /// Sorted pairs `(i, j)`, `i < j`, of orthogonal classes.
    orthogonal: Vec<(u32, u32)>,
    /// Distance from vertex 0 to the side-1 halfspace of each class.
    far_depth: Vec<u32>,
}

impl ThetaPartition {
    /// Number of classes.
    pub fn q(&self) -> usize {
        self.class_offsets.len() - 1
    }

    #[inline]
    pub fn class_of(&self, e: usize) -> usize {
        self.class_of_edge[e] as usize
    }

    pub fn class_of_edges(&self) -> &[u32] {
        &self.class_of_edge
    }

    /// Edge ids of class `i`, increasing.
    #[inline]
    pub fn class_edges(&self, i: usize) -> &[u32] {
        &self.class_members[self.class_offsets[i] as usize..self.class_offsets[i + 1] as usize]
    }

    pub fn class_size(&self, i: usize) -> usize {
        (self.class_offsets[i + 1] - self.class_offsets[i]) as usize
    }

    /// Endpoints of edge `e` as `(side-0 endpoint, side-1 endpoint)`.
    #[inline]
    pub fn oriented(&self, g: &Graph, e: usize) -> (usize, usize) {
        let (a, b) = g.edge(e);
        if self.root_dist[a] < self.root_dist[b] {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn check_class(&self, i: usize) -> Result<()> {
        if i >= self.q() {
            Err(Error::InvalidClass { id: i, q: self.q() })
        } else {
            Ok(())
        }
    }

    pub fn are_orthogonal(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j) as u32, i.max(j) as u32);
        self.orthogonal.binary_search(&key).is_ok()
    }

    pub fn orthogonal_pairs(&self) -> &[(u32, u32)] {
        &self.orthogonal
    }

    /// Side indicator of class `i`: `true` for vertices on side 1. One
    /// traversal of the graph minus the class edges.
    pub fn side_indicator(&self, g: &Graph, i: usize) -> Vec<bool> {
        let n = g.n();
        let mut side0 = vec![false; n];
        let mut queue = VecDeque::new();
        side0[0] = true;
        queue.push_back(0usize);
        while let Some(v) = queue.pop_front() {
            for (w, e) in g.neighbors(v) {
                if !side0[w] && self.class_of_edge[e] as usize != i {
                    side0[w] = true;
                    queue.push_back(w);
                }
            }
        }
        side0.into_iter().map(|s| !s).collect()
    }
}

/// Computes the Θ-classes by closing the "opposite in a square" relation
/// with a union-find.
///
/// Squares are enumerated from their bottom vertex in the orientation from
/// vertex 0: in a median graph every square `x a b y` has
/// `d(x) + 2 = d(a) + 1 = d(b) + 1 = d(y)`, and `a`, `b` have exactly one
/// common predecessor `x`. Vertices have at most `log2 n` predecessors.
pub fn compute_theta_classes(g: &Graph) -> Result<ThetaPartition> {
    let n = g.n();
    let m = g.m();
    let root_dist = bfs_unchecked(g, 0);
    if root_dist.contains(&NONE) {
        return Err(Error::Disconnected);
    }
    for (u, v) in g.edges() {
        if root_dist[u] == root_dist[v] {
            return Err(Error::NotBipartite(u, v));
        }
    }

    // predecessor lists (CSR), sorted by vertex id
    let mut pred_off = vec![0u32; n + 1];
    let mut preds: Vec<(u32, u32)> = Vec::with_capacity(m);
    for y in 0..n {
        for (x, e) in g.neighbors(y) {
            if root_dist[x] + 1 == root_dist[y] {
                preds.push((x as u32, e as u32));
            }
        }
        pred_off[y + 1] = preds.len() as u32;
    }
    let preds_of = |v: usize| &preds[pred_off[v] as usize..pred_off[v + 1] as usize];

    let mut uf = UnionFind::new(m);
    let mut square_pairs: Vec<(u32, u32)> = Vec::new();
    for y in 0..n {
        let py = preds_of(y);
        for (k, &(a, ea)) in py.iter().enumerate() {
            for &(b, eb) in &py[k + 1..] {
                let (pa, pb) = (preds_of(a as usize), preds_of(b as usize));
                let mut common = None;
                let (mut i, mut j) = (0, 0);
                while i < pa.len() && j < pb.len() {
                    match pa[i].0.cmp(&pb[j].0) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            if common.is_some() {
                                return Err(Error::NotMedian(format!(
                                    "vertices {a} and {b} have two common neighbors below {y} (induced K_2,3)"
                                )));
                            }
                            common = Some((pa[i].1, pb[j].1));
                            i += 1;
                            j += 1;
                        }
                    }
                }
                let Some((xa, xb)) = common else {
                    return Err(Error::NotMedian(format!(
                        "quadrangle condition fails: {a} and {b} share neighbor {y} but no common neighbor closer to vertex 0"
                    )));
                };
                // square x-a-y-b: a-y is opposite x-b, b-y is opposite x-a
                uf.union(ea as usize, xb as usize);
                uf.union(eb as usize, xa as usize);
                square_pairs.push((ea, eb));
            }
        }
    }

    let (class_of_edge, q) = uf.canonical_labels();

    // Each class must be a matching.
    let mut seen = vec![NONE; q];
    for v in 0..n {
        for &e in g.incident_edges(v) {
            let c = class_of_edge[e as usize] as usize;
            if seen[c] == v as u32 {
                return Err(Error::NotMedian(format!(
                    "class {c} is not a matching at vertex {v}"
                )));
            }
            seen[c] = v as u32;
        }
    }

    let orthogonal = square_pairs
        .into_iter()
        .map(|(ea, eb)| (class_of_edge[ea as usize], class_of_edge[eb as usize]))
        .collect();
    Ok(assemble(g, root_dist, class_of_edge, q, orthogonal))
}

fn assemble(
    g: &Graph,
    root_dist: Vec<u32>,
    class_of_edge: Vec<u32>,
    q: usize,
    pairs: Vec<(u32, u32)>,
) -> ThetaPartition {
    let m = g.m();
    let mut class_offsets = vec![0u32; q + 1];
    for &c in &class_of_edge {
        class_offsets[c as usize + 1] += 1;
    }
    for i in 0..q {
        class_offsets[i + 1] += class_offsets[i];
    }
    let mut fill = class_offsets[..q].to_vec();
    let mut class_members = vec![0u32; m];
    for (e, &c) in class_of_edge.iter().enumerate() {
        class_members[fill[c as usize] as usize] = e as u32;
        fill[c as usize] += 1;
    }

    let mut orthogonal: Vec<(u32, u32)> = pairs
        .into_iter()
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| (i.min(j), i.max(j)))
        .collect();
    orthogonal.sort_unstable();
    orthogonal.dedup();

    let mut far_depth = vec![NONE; q];
    for (e, (u, v)) in g.edges().enumerate() {
        let c = class_of_edge[e] as usize;
        let far = root_dist[u].max(root_dist[v]);
        far_depth[c] = far_depth[c].min(far);
    }

    ThetaPartition {
        class_of_edge,
        class_offsets,
        class_members,
        root_dist,
        orthogonal,
        far_depth,
    }
}

impl ThetaPartition {
    /// Wraps an arbitrary edge labelling (ids `0..q`, all used) without any
    /// median-graph checks, so that verifiers can inspect partitions of
    /// graphs that are not median. Orthogonality is read off all squares.
    pub fn from_edge_labels(g: &Graph, labels: Vec<u32>) -> Result<ThetaPartition> {
        if labels.len() != g.m() {
            return Err(Error::NotMedian(format!(
                "{} labels for {} edges",
                labels.len(),
                g.m()
            )));
        }
        let q = labels.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut used = vec![false; q];
        for &c in &labels {
            used[c as usize] = true;
        }
        if let Some(c) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidClass { id: c, q });
        }
        let root_dist = bfs_unchecked(g, 0);
        if root_dist.contains(&NONE) {
            return Err(Error::Disconnected);
        }
        let mut pairs = Vec::new();
        for x in 0..g.n() {
            let nb: Vec<(usize, usize)> = g.neighbors(x).collect();
            for (k, &(a, ea)) in nb.iter().enumerate() {
                for &(b, eb) in &nb[k + 1..] {
                    let closes = g.neighbor_ids(a).iter().any(|&y| y as usize != x && g.has_edge(y as usize, b));
                    if closes {
                        pairs.push((labels[ea], labels[eb]));
                    }
                }
            }
        }
        Ok(assemble(g, root_dist, labels, q, pairs))
    }
}

/// Halfspace cardinalities per class, indexed by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfspaceSizes {
    pub side0: Vec<u32>,
    pub side1: Vec<u32>,
}

impl HalfspaceSizes {
    pub fn get(&self, i: usize) -> (usize, usize) {
        (self.side0[i] as usize, self.side1[i] as usize)
    }

    pub fn min_side(&self, i: usize) -> usize {
        self.side0[i].min(self.side1[i]) as usize
    }

    /// The strict minority side of class `i`, `None` when egalitarian.
    pub fn minority(&self, i: usize) -> Option<u8> {
        use std::cmp::Ordering::*;
        match self.side0[i].cmp(&self.side1[i]) {
            Less => Some(0),
            Greater => Some(1),
            Equal => None,
        }
    }
}

/// All halfspace sizes by peripheral peeling.
///
/// Classes are peeled by decreasing distance from vertex 0 to their side-1
/// halfspace; in a median graph the class currently farthest is always
/// peripheral in the residual graph. Every vertex starts with weight 1 and
/// hands its weight to its matched neighbor when peeled, so the weight
/// collected on a peripheral side equals the size of the original halfspace.
pub fn halfspace_sizes_all(g: &Graph, t: &ThetaPartition) -> Result<HalfspaceSizes> {
    let n = g.n();
    let q = t.q();
    let mut order: Vec<u32> = (0..q as u32).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(t.far_depth[c as usize]), c));

    let mut alive = vec![true; n];
    let mut weight = vec![1u32; n];
    let mut stamp = vec![NONE; n];
    let mut side0 = vec![0u32; q];
    let mut side1 = vec![0u32; q];
    let mut boundary: Vec<(u32, u32)> = Vec::new();

    for &c in &order {
        let c = c as usize;
        boundary.clear();
        for &e in t.class_edges(c) {
            let (near, far) = t.oriented(g, e as usize);
            match (alive[near], alive[far]) {
                (true, true) => {
                    stamp[far] = c as u32;
                    boundary.push((near as u32, far as u32));
                }
                (false, false) => {}
                _ => {
                    return Err(Error::NotMedian(format!(
                        "class {c} edge {near}-{far} straddles a peeled halfspace"
                    )))
                }
            }
        }
        if boundary.is_empty() {
            return Err(Error::NotMedian(format!("class {c} vanished during peeling")));
        }
        for &(_, far) in &boundary {
            for &w in g.neighbor_ids(far as usize) {
                let w = w as usize;
                if alive[w] && stamp[w] != c as u32 && t.root_dist[w] != NONE {
                    // Only the matched partner may leave the boundary.
                    let e = g.edge_between(far as usize, w).expect("adjacent");
                    if t.class_of(e) != c {
                        return Err(Error::NotMedian(format!(
                            "no peripheral class: side 1 of class {c} is larger than its boundary"
                        )));
                    }
                }
            }
        }
        let mut far_size = 0u32;
        for &(near, far) in &boundary {
            far_size += weight[far as usize];
            weight[near as usize] += weight[far as usize];
            alive[far as usize] = false;
        }
        side1[c] = far_size;
        side0[c] = n as u32 - far_size;
    }
    Ok(HalfspaceSizes { side0, side1 })
}

/// The two boundaries of class `i`, position-aligned: the k-th class edge
/// joins `side0[k]` and `side1[k]`.
pub fn boundaries(g: &Graph, t: &ThetaPartition, i: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    t.check_class(i)?;
    Ok(t.class_edges(i)
        .iter()
        .map(|&e| t.oriented(g, e as usize))
        .unzip())
}

/// Median set by the majority rule: orient every edge toward the strict
/// majority halfspace of its class and return the sinks, ascending.
pub fn median_set(g: &Graph, t: &ThetaPartition, sizes: &HalfspaceSizes) -> Vec<usize> {
    let mut has_out = vec![false; g.n()];
    for e in 0..g.m() {
        let c = t.class_of(e);
        let (near, far) = t.oriented(g, e);
        match sizes.minority(c) {
            Some(0) => has_out[near] = true,
            Some(_) => has_out[far] = true,
            None => {}
        }
    }
    (0..g.n()).filter(|&v| !has_out[v]).collect()
}

/// Ladder sets `L(v0, v)` and distances `d(v0, v)` for every vertex.
#[derive(Debug, Clone)]
pub struct LadderTable {
    pub v0: usize,
    pub sets: Vec<ClassSet>,
    pub dist: Vec<u32>,
}

impl LadderTable {
    pub fn ladder(&self, v: usize) -> &ClassSet {
        &self.sets[v]
    }
}

/// BFS from `v0` propagating ladder labels: crossing an edge of a class
/// adjacent to `v0` adds that class.
pub fn ladder_table(g: &Graph, t: &ThetaPartition, v0: usize) -> Result<LadderTable> {
    if v0 >= g.n() {
        return Err(Error::InvalidVertex { id: v0, n: g.n() });
    }
    let mut adjacent = vec![false; t.q()];
    for &e in g.incident_edges(v0) {
        adjacent[t.class_of(e as usize)] = true;
    }
    let n = g.n();
    let mut sets = vec![ClassSet::new(); n];
    let mut dist = vec![NONE; n];
    let mut queue = VecDeque::with_capacity(n);
    dist[v0] = 0;
    queue.push_back(v0);
    while let Some(v) = queue.pop_front() {
        for (w, e) in g.neighbors(v) {
            if dist[w] == NONE {
                dist[w] = dist[v] + 1;
                let mut set = sets[v].clone();
                let c = t.class_of(e);
                if adjacent[c] {
                    let fresh = set.insert(c);
                    debug_assert!(fresh, "class crossed twice on a geodesic");
                }
                sets[w] = set;
                queue.push_back(w);
            }
        }
    }
    Ok(LadderTable { v0, sets, dist })
}

/// Whether the classes of `x` are pairwise orthogonal.
pub fn is_pof(t: &ThetaPartition, x: &ClassSet) -> bool {
    let ids = x.as_slice();
    ids.iter().enumerate().all(|(k, &i)| {
        ids[k + 1..]
            .iter()
            .all(|&j| t.are_orthogonal(i as usize, j as usize))
    })
}
