//! Immutable undirected graphs, BFS primitives and induced subgraphs.
//!
//! Vertices and edges carry dense 0-based ids. Edges are stored once as
//! `(u, v)` with `u < v`, sorted lexicographically; the edge id is the
//! position in that list. Adjacency lists are sorted by neighbor id so
//! every traversal in this crate is deterministic.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Sentinel for "no vertex" in `u32` id arrays.
pub const NONE: u32 = u32::MAX;

/// Largest accepted vertex weight. Keeps every weighted distance far from
/// `i64` overflow even after repeated weight lifting.
pub const MAX_WEIGHT: u64 = 1 << 40;

/// Whether [`Graph::from_edges`] checks connectivity and bipartiteness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Check,
    Trusted,
}

/// Undirected simple graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    edge_ids: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Edge endpoints may come in any order;
    /// loops and parallel edges are rejected.
    pub fn from_edges<I>(n: usize, edges: I, validation: Validation) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        assert!(n < u32::MAX as usize, "vertex count exceeds u32 range");
        let mut list = Vec::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::InvalidVertex { id: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push((u as u32, v as u32));
        }
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0 as usize, w[0].1 as usize));
            }
        }
        let g = Graph::from_sorted_edges(n, list);
        if validation == Validation::Check {
            g.check_connected_bipartite()?;
        }
        Ok(g)
    }

    /// `edges` must be sorted, deduplicated and satisfy `u < v < n`.
    pub(crate) fn from_sorted_edges(n: usize, edges: Vec<(u32, u32)>) -> Graph {
        let mut degree = vec![0u32; n + 1];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let total = offsets[n] as usize;
        let mut targets = vec![0u32; total];
        let mut edge_ids = vec![0u32; total];
        let mut fill: Vec<u32> = offsets[..n].to_vec();
        // Two passes keep every list sorted: lower neighbors first, then
        // higher ones, each in increasing order because edges are sorted.
        for (e, &(u, v)) in edges.iter().enumerate() {
            let slot = fill[v as usize] as usize;
            targets[slot] = u;
            edge_ids[slot] = e as u32;
            fill[v as usize] += 1;
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            let slot = fill[u as usize] as usize;
            targets[slot] = v;
            edge_ids[slot] = e as u32;
            fill[u as usize] += 1;
        }
        Graph {
            offsets,
            targets,
            edge_ids,
            edges,
        }
    }

    fn check_connected_bipartite(&self) -> Result<()> {
        let dist = bfs_unchecked(self, 0);
        if dist.contains(&NONE) {
            return Err(Error::Disconnected);
        }
        for &(u, v) in &self.edges {
            if dist[u as usize] == dist[v as usize] {
                return Err(Error::NotBipartite(u as usize, v as usize));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` as `(neighbor, edge id)`, sorted by neighbor id.
    #[inline]
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (a, b) = (self.offsets[v] as usize, self.offsets[v + 1] as usize);
        self.targets[a..b]
            .iter()
            .zip(&self.edge_ids[a..b])
            .map(|(&t, &e)| (t as usize, e as usize))
    }

    #[inline]
    pub(crate) fn neighbor_ids(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    #[inline]
    pub(crate) fn incident_edges(&self, v: usize) -> &[u32] {
        &self.edge_ids[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.edges[e];
        (u as usize, v as usize)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    /// Edge id of `u`–`v`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (self.offsets[u] as usize, self.offsets[u + 1] as usize);
        self.targets[a..b]
            .binary_search(&(v as u32))
            .ok()
            .map(|i| self.edge_ids[a + i] as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_between(u, v).is_some()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::InvalidVertex { id: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Median graphs satisfy `m <= n log2 n`. Returns a message when the
    /// bound is violated; this is advisory only.
    pub fn sparsity_warning(&self) -> Option<String> {
        let n = self.n() as f64;
        let bound = if self.n() <= 1 { 0.0 } else { n * n.log2() };
        if self.m() as f64 > bound {
            Some(format!(
                "edge count {} exceeds n*log2(n) = {:.1}; input is unlikely to be a median graph",
                self.m(),
                bound
            ))
        } else {
            None
        }
    }

    /// Parses the edge-list text format: `n m` header, then `m` lines `u v`.
    pub fn parse(text: &str, validation: Validation) -> Result<Graph> {
        let mut lines = text.lines().enumerate();
        let (n, m) = loop {
            match lines.next() {
                None => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: "missing header".into(),
                    })
                }
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((i, l)) => {
                    let nums = parse_numbers(l, i + 1)?;
                    if nums.len() != 2 {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: "header must be `n m`".into(),
                        });
                    }
                    break (nums[0] as usize, nums[1] as usize);
                }
            }
        };
        let mut edges = Vec::with_capacity(m);
        for (i, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(l, i + 1)?;
            if nums.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "edge line must be `u v`".into(),
                });
            }
            edges.push((nums[0] as usize, nums[1] as usize));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges, validation)
    }

    /// Serializes to the canonical edge-list text (sorted edges, LF endings).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(12 * (self.m() + 1));
        let _ = writeln!(out, "{} {}", self.n(), self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<u64>> {
    line.split_ascii_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("not a nonnegative integer: {tok:?}"),
            })
        })
        .collect()
}

/// Nonnegative integer weight per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexWeights(Vec<i64>);

impl VertexWeights {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        let mut out = Vec::with_capacity(values.len());
        for (v, &w) in values.iter().enumerate() {
            if w > MAX_WEIGHT {
                return Err(Error::WeightTooLarge {
                    vertex: v,
                    weight: w,
                });
            }
            out.push(w as i64);
        }
        Ok(VertexWeights(out))
    }

    pub fn zeros(n: usize) -> Self {
        VertexWeights(vec![0; n])
    }

    pub fn for_graph(self, g: &Graph) -> Result<Self> {
        if self.0.len() != g.n() {
            return Err(Error::WeightLength {
                got: self.0.len(),
                expected: g.n(),
            });
        }
        Ok(self)
    }

    /// Internal constructor for derived weights (restrictions, lifted weights).
    pub(crate) fn from_raw(values: Vec<i64>) -> Self {
        debug_assert!(values.iter().all(|&w| w >= 0));
        VertexWeights(values)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One nonnegative decimal per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (i, l) in text.lines().enumerate() {
            let l = l.trim();
            if l.is_empty() {
                continue;
            }
            let w = l.parse::<u64>().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("not a nonnegative integer: {l:?}"),
            })?;
            values.push(w);
        }
        VertexWeights::new(values)
    }
}

/// Unweighted distances from a fixed source.
pub type DistanceVector = Vec<u32>;

/// Exact BFS distances from `source`.
pub fn bfs_distances(g: &Graph, source: usize) -> Result<DistanceVector> {
    g.check_vertex(source)?;
    Ok(bfs_unchecked(g, source))
}

pub(crate) fn bfs_unchecked(g: &Graph, source: usize) -> DistanceVector {
    let mut dist = vec![NONE; g.n()];
    let mut queue = VecDeque::with_capacity(g.n());
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize];
        for &w in g.neighbor_ids(v as usize) {
            if dist[w as usize] == NONE {
                dist[w as usize] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Gate and distance-to-gate of every vertex with respect to a gated set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateAssignment {
    /// `gate[v]` is the nearest seed vertex; `NONE` for vertices outside the
    /// traversed region.
    pub gate: Vec<u32>,
    pub dist: Vec<u32>,
}

impl GateAssignment {
    #[inline]
    pub fn gate_of(&self, v: usize) -> usize {
        self.gate[v] as usize
    }

    #[inline]
    pub fn dist_of(&self, v: usize) -> u32 {
        self.dist[v]
    }

    /// Vertices of the fiber of `x` (including `x` itself).
    pub fn fiber(&self, x: usize) -> Vec<usize> {
        (0..self.gate.len())
            .filter(|&v| self.gate[v] as usize == x)
            .collect()
    }
}

/// Multi-source BFS seeded with every vertex of `h`. For a gated set `h`
/// each vertex receives its gate and its distance to `h`.
pub fn gated_bfs(g: &Graph, h: &[usize]) -> Result<GateAssignment> {
    if h.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    for &x in h {
        g.check_vertex(x)?;
    }
    Ok(gated_bfs_within(g, h.iter().copied(), |_| true))
}

/// Gated BFS restricted to vertices accepted by `allowed` (seeds are always
/// accepted). Unreached vertices keep gate `NONE`.
pub(crate) fn gated_bfs_within<S, F>(g: &Graph, seeds: S, allowed: F) -> GateAssignment
where
    S: IntoIterator<Item = usize>,
    F: Fn(usize) -> bool,
{
    let n = g.n();
    let mut gate = vec![NONE; n];
    let mut dist = vec![NONE; n];
    let mut queue = VecDeque::new();
    for x in seeds {
        if gate[x] == NONE {
            gate[x] = x as u32;
            dist[x] = 0;
            queue.push_back(x as u32);
        }
    }
    while let Some(v) = queue.pop_front() {
        let v = v as usize;
        for &w in g.neighbor_ids(v) {
            let w = w as usize;
            if gate[w] == NONE && allowed(w) {
                gate[w] = gate[v];
                dist[w] = dist[v] + 1;
                queue.push_back(w as u32);
            }
        }
    }
    GateAssignment { gate, dist }
}

/// An induced subgraph with id maps to and from its parent.
#[derive(Debug, Clone)]
pub struct SubgraphMap {
    pub graph: Graph,
    /// Child vertex id → parent vertex id, strictly increasing.
    pub to_parent: Vec<u32>,
    /// Child edge id → parent edge id.
    pub edge_to_parent: Vec<u32>,
}

impl SubgraphMap {
    /// Parent vertex id → child vertex id, if the vertex is in the subset.
    pub fn to_child(&self, parent: usize) -> Option<usize> {
        self.to_parent.binary_search(&(parent as u32)).ok()
    }

    #[inline]
    pub fn parent_of(&self, child: usize) -> usize {
        self.to_parent[child] as usize
    }
}

/// Subgraph induced by `subset`, with contiguous child ids that preserve
/// the parent order. The subset must be nonempty and connected.
pub fn induced_subgraph(g: &Graph, subset: &[usize]) -> Result<SubgraphMap> {
    if subset.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    for &v in subset {
        g.check_vertex(v)?;
    }
    let map = induced_unchecked(g, subset.iter().map(|&v| v as u32).collect());
    if bfs_unchecked(&map.graph, 0).contains(&NONE) {
        return Err(Error::Disconnected);
    }
    Ok(map)
}

/// `subset` need not be sorted; duplicates are removed.
pub(crate) fn induced_unchecked(g: &Graph, mut subset: Vec<u32>) -> SubgraphMap {
    subset.sort_unstable();
    subset.dedup();
    let mut child = vec![NONE; g.n()];
    for (i, &v) in subset.iter().enumerate() {
        child[v as usize] = i as u32;
    }
    let mut edges = Vec::new();
    let mut edge_to_parent = Vec::new();
    for (cu, &u) in subset.iter().enumerate() {
        let u = u as usize;
        for (w, e) in g.neighbors(u) {
            if w > u && child[w] != NONE {
                edges.push((cu as u32, child[w]));
                edge_to_parent.push(e as u32);
            }
        }
    }
    SubgraphMap {
        graph: Graph::from_sorted_edges(subset.len(), edges),
        to_parent: subset,
        edge_to_parent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i)), Validation::Check).unwrap()
    }

    fn grid(r: usize, c: usize) -> Graph {
        let id = |i: usize, j: usize| i * c + j;
        let mut e = Vec::new();
        for i in 0..r {
            for j in 0..c {
                if i + 1 < r {
                    e.push((id(i, j), id(i + 1, j)));
                }
                if j + 1 < c {
                    e.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        Graph::from_edges(r * c, e, Validation::Check).unwrap()
    }

    fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
        let n = g.n();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn path_distances() {
        assert_eq!(bfs_distances(&path(3), 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn grid_bfs_matches_floyd_warshall() {
        let g = grid(2, 3);
        let fw = floyd_warshall(&g);
        for s in 0..g.n() {
            assert_eq!(bfs_distances(&g, s).unwrap(), fw[s]);
        }
    }

    #[test]
    fn bfs_rejects_bad_source() {
        assert!(matches!(
            bfs_distances(&path(3), 3),
            Err(Error::InvalidVertex { id: 3, n: 3 })
        ));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Graph::from_edges(2, [(0, 0)], Validation::Trusted),
            Err(Error::SelfLoop(0))
        );
        assert_eq!(
            Graph::from_edges(2, [(0, 1), (1, 0)], Validation::Trusted),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::from_edges(3, [(0, 1)], Validation::Check),
            Err(Error::Disconnected)
        );
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)], Validation::Check),
            Err(Error::NotBipartite(..))
        ));
        assert_eq!(
            Graph::from_edges(0, [], Validation::Check),
            Err(Error::EmptyGraph)
        );
    }

    #[test]
    fn adjacency_sorted_and_edges_lexicographic() {
        let g = Graph::from_edges(4, [(3, 0), (2, 1), (1, 0), (3, 2)], Validation::Check).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        for v in 0..4 {
            let nb: Vec<_> = g.neighbors(v).map(|(w, _)| w).collect();
            let mut sorted = nb.clone();
            sorted.sort();
            assert_eq!(nb, sorted);
            for (w, e) in g.neighbors(v) {
                let (a, b) = g.edge(e);
                assert!((a, b) == (v.min(w), v.max(w)));
            }
        }
        assert_eq!(g.edge_between(3, 0), Some(1));
        assert_eq!(g.edge_between(0, 2), None);
    }

    #[test]
    fn gated_bfs_whole_vertex_set() {
        let g = grid(3, 3);
        let all: Vec<_> = (0..g.n()).collect();
        let ga = gated_bfs(&g, &all).unwrap();
        for v in 0..g.n() {
            assert_eq!(ga.gate_of(v), v);
            assert_eq!(ga.dist_of(v), 0);
        }
    }

    #[test]
    fn gated_bfs_square() {
        // u=0, v=1, y=2, x=3 on the square u-v-y-x
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], Validation::Check).unwrap();
        let ga = gated_bfs(&g, &[0, 1]).unwrap();
        assert_eq!((ga.gate_of(3), ga.dist_of(3)), (0, 1));
        assert_eq!((ga.gate_of(2), ga.dist_of(2)), (1, 1));
        assert_eq!(gated_bfs(&g, &[]), Err(Error::EmptySeedSet));
    }

    #[test]
    fn gated_bfs_halfspace_of_grid() {
        // 2x4 grid, gated set = columns 0..2 (a halfspace). Gates are the
        // nearest boundary vertex and distances satisfy the gate identity.
        let g = grid(2, 4);
        let fw = floyd_warshall(&g);
        let h: Vec<usize> = (0..g.n()).filter(|v| v % 4 < 2).collect();
        let ga = gated_bfs(&g, &h).unwrap();
        for v in 0..g.n() {
            let best = h.iter().map(|&x| fw[v][x]).min().unwrap();
            assert_eq!(ga.dist_of(v), best);
            let gv = ga.gate_of(v);
            for &x in &h {
                assert_eq!(fw[v][gv] + fw[gv][x], fw[v][x]);
            }
        }
        // fibers partition V
        let mut count = 0;
        for &x in &h {
            count += ga.fiber(x).len();
        }
        assert_eq!(count, g.n());
    }

    #[test]
    fn induced_identity_and_facet() {
        let g = grid(2, 3);
        let all: Vec<_> = (0..g.n()).collect();
        let s = induced_subgraph(&g, &all).unwrap();
        assert_eq!(s.graph, g);
        assert_eq!(s.to_parent, (0..g.n() as u32).collect::<Vec<_>>());
        // Q3 facet → Q2
        let q3 = Graph::from_edges(
            8,
            (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|&(a, b)| a < b),
            Validation::Check,
        )
        .unwrap();
        let facet: Vec<usize> = (0..8).filter(|v| v & 1 == 0).collect();
        let s = induced_subgraph(&q3, &facet).unwrap();
        assert_eq!((s.graph.n(), s.graph.m()), (4, 4));
        for ce in 0..s.graph.m() {
            let (a, b) = s.graph.edge(ce);
            let pe = s.edge_to_parent[ce] as usize;
            assert_eq!(q3.edge(pe), (s.parent_of(a), s.parent_of(b)));
        }
        for (c, &p) in s.to_parent.iter().enumerate() {
            assert_eq!(s.to_child(p as usize), Some(c));
        }
        assert_eq!(s.to_child(1), None);
        assert_eq!(induced_subgraph(&q3, &[0, 3]).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn text_round_trip_is_canonical() {
        let g = grid(2, 3);
        let text = g.to_text();
        assert!(text.starts_with("6 7\n0 1\n0 3\n"));
        let back = Graph::parse(&text, Validation::Check).unwrap();
        assert_eq!(back, g);
        assert!(Graph::parse("3 2\n0 1\n", Validation::Check).is_err());
        assert!(Graph::parse("3 1\n0 x\n", Validation::Check).is_err());
    }

    #[test]
    fn weights_parse_and_cap() {
        let w = VertexWeights::parse("1\n0\n7\n").unwrap();
        assert_eq!(w.as_slice(), &[1, 0, 7]);
        assert!(VertexWeights::new(vec![MAX_WEIGHT + 1]).is_err());
        assert!(VertexWeights::parse("-1\n").is_err());
        assert!(w.for_graph(&path(2)).is_err());
    }

    #[test]
    fn sparsity_warning_on_dense_input() {
        assert!(grid(4, 4).sparsity_warning().is_none());
        // K_{10,10}: 100 edges > 20 * log2(20)
        let k: Vec<_> = (0..10).flat_map(|a| (10..20).map(move |b| (a, b))).collect();
        let g = Graph::from_edges(20, k, Validation::Check).unwrap();
        assert!(g.sparsity_warning().is_some());
    }
}
