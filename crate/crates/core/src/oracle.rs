//! Exact distance labels for median graphs.
//!
//! Every vertex stores one record per level of a recursive decomposition.
//! A level either splits along a class whose smaller halfspace holds at
//! least a third of the vertices, or, when no such class exists, splits the
//! graph minus its median `v0` into gated fibers `V_L`, one per ladder set
//! `L`. Queries walk the two record lists and hop through gates.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{gated_bfs_within, induced_unchecked, Graph, NONE};
use crate::theta::{compute_theta_classes, halfspace_sizes_all, ladder_table, median_set, ClassSet};

/// Gate of a vertex in the fiber one class smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    /// The removed class.
    pub class: u32,
    pub gate: u32,
    pub dist: u32,
}

/// One level of a vertex label. Vertex ids are global; class ids are local
/// to the subproblem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelRecord {
    Balanced {
        sub: u32,
        class: u32,
        side: u8,
        gate: u32,
        dist: u32,
    },
    Unbalanced {
        sub: u32,
        center: u32,
        dist: u32,
        ladder: ClassSet,
        /// Sorted by class.
        triplets: Vec<Triplet>,
    },
    Center {
        sub: u32,
    },
    Leaf {
        sub: u32,
        partner: Option<u32>,
    },
}

impl LevelRecord {
    pub fn sub(&self) -> u32 {
        match *self {
            LevelRecord::Balanced { sub, .. }
            | LevelRecord::Unbalanced { sub, .. }
            | LevelRecord::Center { sub }
            | LevelRecord::Leaf { sub, .. } => sub,
        }
    }

    fn is_terminal(&self) -> bool {
        matches!(self, LevelRecord::Center { .. } | LevelRecord::Leaf { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubKind {
    Leaf,
    Balanced,
    Unbalanced,
}

/// Registry entry for one recursive call of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subproblem {
    pub parent: Option<u32>,
    pub kind: SubKind,
    pub size: u32,
    pub depth: u32,
}

/// Labels of all vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    n: usize,
    labels: Vec<Vec<LevelRecord>>,
    subproblems: Vec<Subproblem>,
}

impl LabelTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, v: usize) -> &[LevelRecord] {
        &self.labels[v]
    }

    pub fn subproblems(&self) -> &[Subproblem] {
        &self.subproblems
    }

    /// Largest number of records in one label.
    pub fn depth(&self) -> usize {
        self.labels.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn record(&self, v: usize, level: usize) -> Result<&LevelRecord> {
        self.labels
            .get(v)
            .ok_or(Error::InvalidVertex { id: v, n: self.n })?
            .get(level)
            .ok_or_else(|| Error::CorruptedTable(format!("vertex {v} has no record at level {level}")))
    }
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Builds the labels of a median graph.
pub fn build_oracle(g: &Graph) -> Result<LabelTable> {
    let n = g.n();
    let mut b = Builder {
        labels: vec![Vec::new(); n],
        subproblems: Vec::new(),
    };
    b.build(g, &(0..n as u32).collect::<Vec<_>>(), None, 0)?;
    let table = LabelTable {
        n,
        labels: b.labels,
        subproblems: b.subproblems,
    };
    debug_assert!(table.labels.iter().all(|l| l.last().is_some_and(LevelRecord::is_terminal)));
    Ok(table)
}

struct Builder {
    labels: Vec<Vec<LevelRecord>>,
    subproblems: Vec<Subproblem>,
}

impl Builder {
    fn register(&mut self, parent: Option<u32>, kind: SubKind, size: usize, depth: u32) -> u32 {
        if let Some(p) = parent {
            let psize = self.subproblems[p as usize].size as usize;
            assert!(3 * size <= 2 * psize, "subproblem of {size} under one of {psize}");
        }
        self.subproblems.push(Subproblem {
            parent,
            kind,
            size: size as u32,
            depth,
        });
        (self.subproblems.len() - 1) as u32
    }

    fn build(&mut self, g: &Graph, global: &[u32], parent: Option<u32>, depth: u32) -> Result<()> {
        let n = g.n();
        if n <= 2 {
            let sub = self.register(parent, SubKind::Leaf, n, depth);
            for v in 0..n {
                let partner = (n == 2).then(|| global[1 - v]);
                self.labels[global[v] as usize].push(LevelRecord::Leaf { sub, partner });
            }
            return Ok(());
        }
        let t = compute_theta_classes(g)?;
        let sizes = halfspace_sizes_all(g, &t)?;
        let mut best: Option<(usize, usize)> = None;
        for i in 0..t.q() {
            let s = sizes.min_side(i);
            if 3 * s >= n && best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        if let Some((class, _)) = best {
            let sub = self.register(parent, SubKind::Balanced, n, depth);
            let side = t.side_indicator(g, class);
            let h1: Vec<u32> = (0..n as u32).filter(|&v| side[v as usize]).collect();
            let h0: Vec<u32> = (0..n as u32).filter(|&v| !side[v as usize]).collect();
            let to1 = gated_bfs_within(g, h1.iter().map(|&v| v as usize), |_| true);
            let to0 = gated_bfs_within(g, h0.iter().map(|&v| v as usize), |_| true);
            for v in 0..n {
                let other = if side[v] { &to0 } else { &to1 };
                self.labels[global[v] as usize].push(LevelRecord::Balanced {
                    sub,
                    class: class as u32,
                    side: side[v] as u8,
                    gate: global[other.gate_of(v)],
                    dist: other.dist_of(v),
                });
            }
            for part in [h0, h1] {
                let map = induced_unchecked(g, part);
                let child_global: Vec<u32> = map.to_parent.iter().map(|&v| global[v as usize]).collect();
                self.build(&map.graph, &child_global, Some(sub), depth + 1)?;
            }
            return Ok(());
        }

        let sub = self.register(parent, SubKind::Unbalanced, n, depth);
        let med = median_set(g, &t, &sizes);
        let &[v0] = med.as_slice() else {
            return Err(Error::NotMedian(format!(
                "no class splits off a third but the median set has {} vertices",
                med.len()
            )));
        };
        let lt = ladder_table(g, &t, v0)?;
        let mut fibers: BTreeMap<&ClassSet, Vec<u32>> = BTreeMap::new();
        for v in 0..n {
            if v != v0 {
                fibers.entry(lt.ladder(v)).or_default().push(v as u32);
            }
        }
        let mut fiber_of = vec![NONE; n];
        for (k, members) in fibers.values().enumerate() {
            for &v in members {
                fiber_of[v as usize] = k as u32;
            }
        }
        self.labels[global[v0] as usize].push(LevelRecord::Center { sub });

        for (k, (ladder, members)) in fibers.iter().enumerate() {
            let mut triplets: Vec<Vec<Triplet>> = vec![Vec::new(); members.len()];
            if ladder.len() >= 2 {
                for c in ladder.iter() {
                    let smaller = ladder.without(c);
                    let mut seeds = Vec::new();
                    for &x in members {
                        for (y, e) in g.neighbors(x as usize) {
                            if t.class_of(e) == c && *lt.ladder(y) == smaller {
                                seeds.push(y);
                            }
                        }
                    }
                    if seeds.is_empty() {
                        return Err(Error::NotMedian(format!("fiber {ladder:?} has no neighbor fiber {smaller:?}")));
                    }
                    let ga = gated_bfs_within(g, seeds, |v| fiber_of[v] == k as u32);
                    for (j, &x) in members.iter().enumerate() {
                        let gate = ga.gate[x as usize];
                        assert!(gate != NONE, "fiber {ladder:?} is not connected to {smaller:?}");
                        assert_eq!(*lt.ladder(gate as usize), smaller, "gate hop leaves the ladder chain");
                        triplets[j].push(Triplet {
                            class: c as u32,
                            gate: global[gate as usize],
                            dist: ga.dist[x as usize],
                        });
                    }
                }
            }
            for (j, &x) in members.iter().enumerate() {
                self.labels[global[x as usize] as usize].push(LevelRecord::Unbalanced {
                    sub,
                    center: global[v0],
                    dist: lt.dist[x as usize],
                    ladder: (*ladder).clone(),
                    triplets: std::mem::take(&mut triplets[j]),
                });
            }
        }
        for members in fibers.into_values() {
            let map = induced_unchecked(g, members);
            debug_assert!(!crate::graph::bfs_unchecked(&map.graph, 0).contains(&NONE));
            let child_global: Vec<u32> = map.to_parent.iter().map(|&v| global[v as usize]).collect();
            self.build(&map.graph, &child_global, Some(sub), depth + 1)?;
        }
        Ok(())
    }
}

/// Which class leaves the current ladder first during gate hops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum HopOrder {
    #[default]
    Descending,
    Ascending,
}

/// A query answer with the number of records read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryTrace {
    pub dist: u64,
    pub lookups: usize,
}

/// Exact `d(u, v)` from the labels alone.
pub fn query(table: &LabelTable, u: usize, v: usize) -> Result<u64> {
    Ok(query_traced(table, u, v, HopOrder::Descending)?.dist)
}

/// [`query`] with an explicit hop order and a record-read count.
pub fn query_traced(table: &LabelTable, u: usize, v: usize, order: HopOrder) -> Result<QueryTrace> {
    for x in [u, v] {
        if x >= table.n {
            return Err(Error::InvalidVertex { id: x, n: table.n });
        }
    }
    let (mut u, mut v) = (u, v);
    let mut acc = 0u64;
    let mut lookups = 0usize;
    let mut level = 0usize;
    loop {
        let ru = table.record(u, level)?;
        let rv = table.record(v, level)?;
        lookups += 2;
        if ru.sub() != rv.sub() {
            return Err(Error::ForeignVertex(format!(
                "vertices {u} and {v} fall in subproblems {} and {} at level {level}",
                ru.sub(),
                rv.sub()
            )));
        }
        match (ru, rv) {
            (LevelRecord::Leaf { .. }, LevelRecord::Leaf { .. }) => {
                return Ok(QueryTrace {
                    dist: acc + (u != v) as u64,
                    lookups,
                });
            }
            (
                LevelRecord::Balanced { side: su, gate, dist, .. },
                LevelRecord::Balanced { side: sv, .. },
            ) => {
                if su != sv {
                    acc += *dist as u64;
                    u = *gate as usize;
                }
            }
            (LevelRecord::Center { .. }, LevelRecord::Center { .. }) => {
                return Ok(QueryTrace { dist: acc, lookups });
            }
            (LevelRecord::Center { .. }, LevelRecord::Unbalanced { dist, .. })
            | (LevelRecord::Unbalanced { dist, .. }, LevelRecord::Center { .. }) => {
                return Ok(QueryTrace {
                    dist: acc + *dist as u64,
                    lookups,
                });
            }
            (
                LevelRecord::Unbalanced { ladder: lu, dist: du, .. },
                LevelRecord::Unbalanced { ladder: lv, dist: dv, .. },
            ) => {
                if lu.is_disjoint(lv) {
                    return Ok(QueryTrace {
                        dist: acc + *du as u64 + *dv as u64,
                        lookups,
                    });
                }
                if lu != lv {
                    let common = lu.intersection(lv);
                    let (gu, du) = hop_down(table, u, ru, level, &common, order, &mut lookups)?;
                    let (gv, dv) = hop_down(table, v, rv, level, &common, order, &mut lookups)?;
                    acc += du + dv;
                    u = gu;
                    v = gv;
                }
            }
            _ => {
                return Err(Error::CorruptedTable(format!(
                    "records of {u} and {v} at level {level} have different kinds"
                )))
            }
        }
        level += 1;
    }
}

/// Follows fiber triplets from `x` until its ladder equals `target`.
fn hop_down(
    table: &LabelTable,
    mut x: usize,
    first: &LevelRecord,
    level: usize,
    target: &ClassSet,
    order: HopOrder,
    lookups: &mut usize,
) -> Result<(usize, u64)> {
    let mut rec = first;
    let mut total = 0u64;
    loop {
        let LevelRecord::Unbalanced { ladder, triplets, .. } = rec else {
            return Err(Error::CorruptedTable(format!("gate hop reached a non-fiber record at {x}")));
        };
        let extra = ladder.difference(target);
        let c = match order {
            HopOrder::Descending => extra.iter().next_back(),
            HopOrder::Ascending => extra.iter().next(),
        };
        let Some(c) = c else {
            return Ok((x, total));
        };
        let tri = triplets
            .binary_search_by_key(&(c as u32), |t| t.class)
            .map(|k| triplets[k])
            .map_err(|_| Error::CorruptedTable(format!("vertex {x} lacks the triplet for class {c}")))?;
        total += tri.dist as u64;
        x = tri.gate as usize;
        rec = table.record(x, level)?;
        *lookups += 1;
    }
}

/// Ladder sequence from `lu` to `lv`: classes of `lu` outside the
/// intersection are dropped one at a time, then classes of `lv` are added,
/// both in increasing id order.
pub fn ladder_sequence(lu: &ClassSet, lv: &ClassSet) -> Vec<ClassSet> {
    let mut cur = lu.clone();
    let mut out = vec![cur.clone()];
    for c in lu.difference(lv).iter() {
        cur.remove(c);
        out.push(cur.clone());
    }
    for c in lv.difference(lu).iter() {
        cur.insert(c);
        out.push(cur.clone());
    }
    out
}

/// Size of one record in bits, with `b` bits per id or distance.
pub fn record_bits(rec: &LevelRecord, b: u64) -> u64 {
    match rec {
        LevelRecord::Balanced { .. } => 3 * b + 1,
        LevelRecord::Unbalanced { ladder, triplets, .. } => {
            ladder.len() as u64 * b + b + 3 * b * triplets.len() as u64
        }
        LevelRecord::Center { .. } | LevelRecord::Leaf { .. } => 0,
    }
}

/// `(max, mean)` label size in bits, with `ceil(log2 n)` bits per id.
pub fn label_size_bits(table: &LabelTable) -> (u64, f64) {
    let b = ceil_log2(table.n) as u64;
    let sizes: Vec<u64> = table
        .labels
        .iter()
        .map(|l| l.iter().map(|r| record_bits(r, b)).sum())
        .collect();
    let max = sizes.iter().copied().max().unwrap_or(0);
    let mean = sizes.iter().sum::<u64>() as f64 / sizes.len().max(1) as f64;
    (max, mean)
}

const MAGIC: &str = "MEDDO";
const VERSION: u32 = 1;

impl LabelTable {
    /// Line-oriented text form; see the crate README for the grammar.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC} {VERSION} {}", self.n);
        for (v, label) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "{v} {}", label.len());
            for rec in label {
                match rec {
                    LevelRecord::Balanced { sub, class, side, gate, dist } => {
                        let _ = writeln!(s, "B {sub} {class} {side} {gate} {dist}");
                    }
                    LevelRecord::Unbalanced { sub, center, dist, ladder, triplets } => {
                        let _ = write!(s, "U {sub} {center} {dist} {}", ladder.len());
                        for c in ladder.iter() {
                            let _ = write!(s, " {c}");
                        }
                        let _ = write!(s, " {}", triplets.len());
                        for t in triplets {
                            let _ = write!(s, " {} {} {}", t.class, t.gate, t.dist);
                        }
                        s.push('\n');
                    }
                    LevelRecord::Center { sub } => {
                        let _ = writeln!(s, "C {sub}");
                    }
                    LevelRecord::Leaf { sub, partner } => match partner {
                        Some(p) => {
                            let _ = writeln!(s, "L {sub} {p}");
                        }
                        None => {
                            let _ = writeln!(s, "L {sub} -");
                        }
                    },
                }
            }
        }
        s
    }

    /// Parses [`LabelTable::to_text`] output. The subproblem registry is
    /// rebuilt from the records.
    pub fn parse(text: &str) -> Result<LabelTable> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty label file"))?;
        let h: Vec<&str> = header.split(' ').collect();
        if h.len() != 3 || h[0] != MAGIC {
            return Err(perr(ln, "expected header \"MEDDO 1 n\""));
        }
        if h[1] != VERSION.to_string() {
            return Err(perr(ln, &format!("unsupported version {}", h[1])));
        }
        let n: usize = h[2].parse().map_err(|_| perr(ln, "bad vertex count"))?;
        let mut labels = Vec::with_capacity(n);
        for v in 0..n {
            let (ln, line) = lines.next().ok_or_else(|| perr(ln, "truncated label file"))?;
            let f: Vec<&str> = line.split(' ').collect();
            if f.len() != 2 || f[0].parse::<usize>().ok() != Some(v) {
                return Err(perr(ln, &format!("expected \"{v} k\"")));
            }
            let k: usize = f[1].parse().map_err(|_| perr(ln, "bad record count"))?;
            let mut label = Vec::with_capacity(k);
            for _ in 0..k {
                let (ln, line) = lines.next().ok_or_else(|| perr(ln, "truncated label file"))?;
                label.push(parse_record(line).map_err(|m| perr(ln, &m))?);
            }
            labels.push(label);
        }
        if let Some((ln, _)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(perr(ln, "trailing content"));
        }
        let subproblems = rebuild_registry(&labels)?;
        Ok(LabelTable { n, labels, subproblems })
    }
}

fn parse_record(line: &str) -> std::result::Result<LevelRecord, String> {
    let f: Vec<&str> = line.split(' ').collect();
    let num = |i: usize| -> std::result::Result<u32, String> {
        f.get(i)
            .ok_or_else(|| format!("record too short: {line:?}"))?
            .parse::<u32>()
            .map_err(|_| format!("bad number in {line:?}"))
    };
    let rec = match f[0] {
        "B" if f.len() == 6 => {
            let side = num(3)?;
            if side > 1 {
                return Err(format!("side bit {side}"));
            }
            LevelRecord::Balanced {
                sub: num(1)?,
                class: num(2)?,
                side: side as u8,
                gate: num(4)?,
                dist: num(5)?,
            }
        }
        "U" => {
            let size = num(4)? as usize;
            let ladder: ClassSet = (0..size).map(|i| num(5 + i).map(|c| c as usize)).collect::<std::result::Result<_, _>>()?;
            if ladder.len() != size {
                return Err("repeated ladder class".into());
            }
            let tcount = num(5 + size)? as usize;
            let base = 6 + size;
            if f.len() != base + 3 * tcount {
                return Err(format!("expected {tcount} triplets in {line:?}"));
            }
            let triplets = (0..tcount)
                .map(|j| {
                    Ok(Triplet {
                        class: num(base + 3 * j)?,
                        gate: num(base + 3 * j + 1)?,
                        dist: num(base + 3 * j + 2)?,
                    })
                })
                .collect::<std::result::Result<Vec<_>, String>>()?;
            if triplets.windows(2).any(|w| w[0].class >= w[1].class) {
                return Err("triplets not sorted by class".into());
            }
            LevelRecord::Unbalanced {
                sub: num(1)?,
                center: num(2)?,
                dist: num(3)?,
                ladder,
                triplets,
            }
        }
        "C" if f.len() == 2 => LevelRecord::Center { sub: num(1)? },
        "L" if f.len() == 3 => LevelRecord::Leaf {
            sub: num(1)?,
            partner: if f[2] == "-" { None } else { Some(num(2)?) },
        },
        _ => return Err(format!("unrecognized record {line:?}")),
    };
    Ok(rec)
}

fn rebuild_registry(labels: &[Vec<LevelRecord>]) -> Result<Vec<Subproblem>> {
    let mut info: BTreeMap<u32, (Option<u32>, SubKind, u32, u32)> = BTreeMap::new();
    for (v, label) in labels.iter().enumerate() {
        if !label.last().is_some_and(LevelRecord::is_terminal) {
            return Err(Error::CorruptedTable(format!("label of {v} does not end in a center or leaf")));
        }
        let mut parent = None;
        for (depth, rec) in label.iter().enumerate() {
            let kind = match rec {
                LevelRecord::Balanced { .. } => SubKind::Balanced,
                LevelRecord::Unbalanced { .. } | LevelRecord::Center { .. } => SubKind::Unbalanced,
                LevelRecord::Leaf { .. } => SubKind::Leaf,
            };
            let entry = info.entry(rec.sub()).or_insert((parent, kind, 0, depth as u32));
            if entry.0 != parent || entry.1 != kind || entry.3 != depth as u32 {
                return Err(Error::CorruptedTable(format!("subproblem {} is inconsistent", rec.sub())));
            }
            entry.2 += 1;
            parent = Some(rec.sub());
        }
    }
    let ids: Vec<u32> = info.keys().copied().collect();
    if ids.iter().enumerate().any(|(k, &id)| k as u32 != id) {
        return Err(Error::CorruptedTable("subproblem ids are not contiguous".into()));
    }
    Ok(info
        .into_values()
        .map(|(parent, kind, size, depth)| Subproblem { parent, kind, size, depth })
        .collect())
}
