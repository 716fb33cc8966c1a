use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{bfs_unchecked, Graph, Validation, NONE};

/// Largest vertex count any generator will produce.
pub const MAX_GENERATED: usize = 1 << 24;

/// A median graph family with its parameters.
///
/// Text form: `path:10`, `tree:n=100,seed=3`, `grid:4x6`, `hypercube:5`,
/// `closure:k=10,p=40,seed=7`, `product:A*B` (right-associative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Path(usize),
    Tree { n: usize, seed: u64 },
    Grid(Vec<usize>),
    Hypercube(usize),
    Closure { k: usize, points: usize, seed: u64 },
    Product(Box<GeneratorSpec>, Box<GeneratorSpec>),
}

fn bad(s: &str, why: &str) -> Error {
    Error::BadSpec(format!("{s:?}: {why}"))
}

fn parse_num<T: FromStr>(s: &str, field: &str, whole: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| bad(whole, &format!("cannot parse {field} from {s:?}")))
}

fn parse_keys<'a>(body: &'a str, whole: &str, keys: &[&str]) -> Result<Vec<Option<&'a str>>> {
    let mut out = vec![None; keys.len()];
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(whole, &format!("expected key=value, got {part:?}")))?;
        let slot = keys
            .iter()
            .position(|&k| k == key.trim())
            .ok_or_else(|| bad(whole, &format!("unknown key {key:?}")))?;
        out[slot] = Some(value);
    }
    Ok(out)
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').ok_or_else(|| bad(s, "missing ':'"))?;
        match kind.trim() {
            "path" => Ok(GeneratorSpec::Path(parse_num(body, "length", s)?)),
            "hypercube" => Ok(GeneratorSpec::Hypercube(parse_num(body, "dimension", s)?)),
            "grid" => {
                let dims = body
                    .split('x')
                    .map(|d| parse_num(d, "side", s))
                    .collect::<Result<Vec<usize>>>()?;
                Ok(GeneratorSpec::Grid(dims))
            }
            "tree" => {
                let v = parse_keys(body, s, &["n", "seed"])?;
                Ok(GeneratorSpec::Tree {
                    n: parse_num(v[0].ok_or_else(|| bad(s, "missing n"))?, "n", s)?,
                    seed: v[1].map(|x| parse_num(x, "seed", s)).transpose()?.unwrap_or(0),
                })
            }
            "closure" => {
                let v = parse_keys(body, s, &["k", "p", "seed"])?;
                Ok(GeneratorSpec::Closure {
                    k: parse_num(v[0].ok_or_else(|| bad(s, "missing k"))?, "k", s)?,
                    points: parse_num(v[1].ok_or_else(|| bad(s, "missing p"))?, "p", s)?,
                    seed: v[2].map(|x| parse_num(x, "seed", s)).transpose()?.unwrap_or(0),
                })
            }
            "product" => {
                let (a, b) = body.split_once('*').ok_or_else(|| bad(s, "expected A*B"))?;
                Ok(GeneratorSpec::Product(Box::new(a.parse()?), Box::new(b.parse()?)))
            }
            other => Err(bad(s, &format!("unknown family {other:?}"))),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Path(n) => write!(f, "path:{n}"),
            GeneratorSpec::Tree { n, seed } => write!(f, "tree:n={n},seed={seed}"),
            GeneratorSpec::Grid(dims) => {
                let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                write!(f, "grid:{}", parts.join("x"))
            }
            GeneratorSpec::Hypercube(k) => write!(f, "hypercube:{k}"),
            GeneratorSpec::Closure { k, points, seed } => {
                write!(f, "closure:k={k},p={points},seed={seed}")
            }
            GeneratorSpec::Product(a, b) => write!(f, "product:{a}*{b}"),
        }
    }
}

/// Builds the graph described by `spec`. Deterministic per seed.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    match spec {
        GeneratorSpec::Path(n) => path(*n),
        GeneratorSpec::Tree { n, seed } => random_tree(*n, *seed),
        GeneratorSpec::Grid(dims) => grid(dims),
        GeneratorSpec::Hypercube(k) => hypercube(*k),
        GeneratorSpec::Closure { k, points, seed } => median_closure(*k, *points, *seed),
        GeneratorSpec::Product(a, b) => cartesian_product(&generate(a)?, &generate(b)?),
    }
}

fn guard(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyGraph)
    } else if n > MAX_GENERATED {
        Err(Error::Guard(format!("{what} would have {n} vertices (limit {MAX_GENERATED})")))
    } else {
        Ok(())
    }
}

/// Path on `n` vertices `0 - 1 - ... - n-1`.
pub fn path(n: usize) -> Result<Graph> {
    guard(n, "path")?;
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)), Validation::Trusted)
}

/// Random recursive tree: vertex `i` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    guard(n, "tree")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Graph::from_edges(n, (1..n).map(|i| (rng.gen_range(0..i), i)), Validation::Trusted)
}

/// Grid `P_{d1} x ... x P_{dr}`; the last coordinate varies fastest.
pub fn grid(dims: &[usize]) -> Result<Graph> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::BadSpec(format!("grid dimensions {dims:?}")));
    }
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    guard(n, "grid")?;
    let mut edges = Vec::new();
    let mut stride = 1;
    for &d in dims.iter().rev() {
        for v in 0..n {
            if (v / stride) % d + 1 < d {
                edges.push((v, v + stride));
            }
        }
        stride *= d;
    }
    Graph::from_edges(n, edges, Validation::Trusted)
}

/// Hypercube `Q_k`; vertices are bit strings, edges flip one bit.
pub fn hypercube(k: usize) -> Result<Graph> {
    if k >= 32 {
        return Err(Error::Guard(format!("hypercube dimension {k}")));
    }
    let n = 1usize << k;
    guard(n, "hypercube")?;
    let edges = (0..n).flat_map(|v| (0..k).filter(move |b| v >> b & 1 == 0).map(move |b| (v, v | 1 << b)));
    Graph::from_edges(n, edges, Validation::Trusted)
}

/// Cartesian product; vertex `(x, y)` gets id `x * b.n() + y`.
pub fn cartesian_product(a: &Graph, b: &Graph) -> Result<Graph> {
    let n = a.n().saturating_mul(b.n());
    guard(n, "product")?;
    let nb = b.n();
    let mut edges = Vec::new();
    for (x, x2) in a.edges() {
        for y in 0..nb {
            edges.push((x * nb + y, x2 * nb + y));
        }
    }
    for x in 0..a.n() {
        for (y, y2) in b.edges() {
            edges.push((x * nb + y, x * nb + y2));
        }
    }
    Graph::from_edges(n, edges, Validation::Trusted)
}

/// Glues the graphs at their vertex 0. Part `j` keeps its vertex order
/// after the shared vertex and the vertices of earlier parts.
pub fn bouquet(parts: &[Graph]) -> Result<Graph> {
    if parts.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = 1 + parts.iter().map(|p| p.n() - 1).sum::<usize>();
    guard(n, "bouquet")?;
    let mut edges = Vec::new();
    let mut base = 0;
    for p in parts {
        let id = |v: usize| if v == 0 { 0 } else { base + v };
        edges.extend(p.edges().map(|(u, v)| (id(u), id(v))));
        base += p.n() - 1;
    }
    Graph::from_edges(n, edges, Validation::Trusted)
}

/// Median closure of `points` random vertices of `Q_k`.
///
/// A set of bit strings closed under coordinatewise majority is exactly the
/// solution set of the 2-CNF formed by all pairwise coordinate projections
/// of the seed points, so the closure is enumerated directly from those
/// projections. If the induced subgraph of `Q_k` is disconnected, a
/// monotone path between two components is added and the set is closed
/// again. Vertex ids follow the numeric order of the bit strings.
pub fn median_closure(k: usize, points: usize, seed: u64) -> Result<Graph> {
    if k == 0 || k > 40 {
        return Err(Error::BadSpec(format!("closure dimension k={k} outside 1..=40")));
    }
    if points == 0 {
        return Err(Error::BadSpec("closure needs at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = (1u64 << k) - 1;
    let mut seeds: Vec<u64> = (0..points).map(|_| rng.gen::<u64>() & mask).collect();
    loop {
        let set = two_cnf_hull(k, &seeds)?;
        let g = hypercube_induced(k, &set)?;
        let dist = bfs_unchecked(&g, 0);
        match dist.iter().position(|&d| d == NONE) {
            None => return Ok(g),
            Some(far) => {
                let (mut x, y) = (set[0], set[far]);
                let mut bits: Vec<usize> = (0..k).filter(|b| (x ^ y) >> b & 1 == 1).collect();
                bits.shuffle(&mut rng);
                for b in bits {
                    x ^= 1 << b;
                    seeds.push(x);
                }
            }
        }
    }
}

/// All `x` in `{0,1}^k` whose every coordinate pair occurs in some seed.
fn two_cnf_hull(k: usize, seeds: &[u64]) -> Result<Vec<u64>> {
    // allowed[i * k + j] has bit (2 * x_i + x_j) set when that pair occurs
    let mut allowed = vec![0u8; k * k];
    for &s in seeds {
        for i in 0..k {
            let xi = (s >> i & 1) as usize;
            for j in 0..k {
                let xj = (s >> j & 1) as usize;
                allowed[i * k + j] |= 1 << (2 * xi + xj);
            }
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
    let mut work = 0usize;
    while let Some((j, x)) = stack.pop() {
        work += 1;
        if work > 64 * MAX_GENERATED {
            return Err(Error::Guard("closure enumeration too large".into()));
        }
        if j == k {
            out.push(x);
            if out.len() > MAX_GENERATED {
                return Err(Error::Guard(format!("closure exceeds {MAX_GENERATED} vertices")));
            }
            continue;
        }
        for b in [1u64, 0] {
            let ok = (0..=j).all(|i| {
                let xi = if i == j { b } else { x >> i & 1 };
                allowed[i * k + j] >> (2 * xi + b) & 1 == 1
            });
            if ok {
                stack.push((j + 1, x | b << j));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn hypercube_induced(k: usize, set: &[u64]) -> Result<Graph> {
    let mut edges = Vec::new();
    for (i, &x) in set.iter().enumerate() {
        for b in 0..k {
            let y = x | 1 << b;
            if y != x {
                if let Ok(j) = set.binary_search(&y) {
                    edges.push((i, j));
                }
            }
        }
    }
    Graph::from_edges(set.len(), edges, Validation::Trusted)
}
