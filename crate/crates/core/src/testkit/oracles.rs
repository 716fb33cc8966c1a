use crate::eccentricities::EccVector;
use crate::error::{Error, Result};
use crate::graph::{bfs_unchecked, Graph, VertexWeights, NONE};
use crate::unionfind::UnionFind;

/// Default vertex limit for the quadratic and cubic oracles.
pub const DEFAULT_ORACLE_LIMIT: usize = 4096;

/// Environment variable overriding [`DEFAULT_ORACLE_LIMIT`].
pub const ORACLE_LIMIT_ENV: &str = "MEDIAN_ORACLE_MAX";

/// The active oracle vertex limit.
pub fn oracle_limit() -> usize {
    std::env::var(ORACLE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ORACLE_LIMIT)
}

fn check_limit(n: usize, limit: usize, what: &str) -> Result<()> {
    if n > limit {
        Err(Error::Guard(format!("{what} on {n} vertices exceeds the oracle limit {limit}")))
    } else {
        Ok(())
    }
}

/// Full distance matrix from `n` BFS runs.
#[derive(Debug, Clone)]
pub struct AllPairsOracle {
    n: usize,
    dist: Vec<u32>,
}

impl AllPairsOracle {
    pub fn new(g: &Graph) -> Result<Self> {
        check_limit(g.n(), oracle_limit(), "all-pairs distances")?;
        let n = g.n();
        let mut dist = Vec::with_capacity(n * n);
        for s in 0..n {
            let row = bfs_unchecked(g, s);
            if row.contains(&NONE) {
                return Err(Error::Disconnected);
            }
            dist.extend(row);
        }
        Ok(AllPairsOracle { n, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

/// Weighted eccentricities by one BFS per vertex.
pub fn brute_ecc(g: &Graph, w: &VertexWeights) -> Result<EccVector> {
    brute_ecc_with_limit(g, w, oracle_limit())
}

/// [`brute_ecc`] with an explicit vertex limit.
pub fn brute_ecc_with_limit(g: &Graph, w: &VertexWeights, limit: usize) -> Result<EccVector> {
    check_limit(g.n(), limit, "brute-force eccentricities")?;
    if w.len() != g.n() {
        return Err(Error::WeightLength { got: w.len(), expected: g.n() });
    }
    let w = w.as_slice();
    Ok((0..g.n())
        .map(|u| {
            bfs_unchecked(g, u)
                .iter()
                .zip(w)
                .map(|(&d, &wv)| d as i64 + wv)
                .max()
                .expect("nonempty graph")
        })
        .collect())
}

/// Θ-classes from the classical relation: edges `uv` and `xy` are related
/// iff `d(u,x) + d(v,y) != d(u,y) + d(v,x)`. Labels are canonical (class
/// ids in order of smallest edge id). `O(m^2)` time.
pub fn djokovic_partition(g: &Graph) -> Result<Vec<u32>> {
    check_limit(g.n(), oracle_limit().min(1024), "Djokovic partition")?;
    let apd = AllPairsOracle::new(g)?;
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut uf = UnionFind::new(edges.len());
    for (e, &(u, v)) in edges.iter().enumerate() {
        for (f, &(x, y)) in edges.iter().enumerate().skip(e + 1) {
            let a = apd.d(u, x) + apd.d(v, y);
            let b = apd.d(u, y) + apd.d(v, x);
            if a != b {
                uf.union(e, f);
            }
        }
    }
    Ok(uf.canonical_labels().0)
}

/// Vertices minimizing the total distance to all others, ascending.
pub fn brute_median_set(g: &Graph) -> Result<Vec<usize>> {
    check_limit(g.n(), oracle_limit(), "brute-force median")?;
    let totals: Vec<u64> = (0..g.n())
        .map(|u| bfs_unchecked(g, u).iter().map(|&d| d as u64).sum())
        .collect();
    let best = *totals.iter().min().expect("nonempty graph");
    Ok((0..g.n()).filter(|&u| totals[u] == best).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Validation;
    use crate::testkit::{grid, hypercube, path, random_tree};

    fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
        let n = g.n();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for v in 0..n {
            d[v][v] = 0;
        }
        for (u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        d
    }

    #[test]
    fn all_pairs_matches_floyd_warshall() {
        let g = grid(&[2, 3]).unwrap();
        let apd = AllPairsOracle::new(&g).unwrap();
        let fw = floyd_warshall(&g);
        for u in 0..6 {
            assert_eq!(apd.row(u), &fw[u][..]);
        }
        assert_eq!(apd.diameter(), 3);
    }

    #[test]
    fn brute_ecc_small_cases() {
        let g = path(3).unwrap();
        assert_eq!(brute_ecc(&g, &VertexWeights::zeros(3)).unwrap(), vec![2, 1, 2]);
        let g = path(1).unwrap();
        assert_eq!(brute_ecc(&g, &VertexWeights::new(vec![7]).unwrap()).unwrap(), vec![7]);
        let g = grid(&[2, 3]).unwrap();
        let fw = floyd_warshall(&g);
        let want: Vec<i64> = fw.iter().map(|r| *r.iter().max().unwrap() as i64).collect();
        assert_eq!(brute_ecc(&g, &VertexWeights::zeros(6)).unwrap(), want);
        assert!(matches!(
            brute_ecc_with_limit(&g, &VertexWeights::zeros(6), 5),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn djokovic_counts() {
        let t = random_tree(20, 4).unwrap();
        let labels = djokovic_partition(&t).unwrap();
        assert_eq!(labels, (0..19).collect::<Vec<u32>>());
        for k in 1..=4 {
            let labels = djokovic_partition(&hypercube(k).unwrap()).unwrap();
            assert_eq!(*labels.iter().max().unwrap() as usize + 1, k);
        }
    }

    #[test]
    fn median_sets() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)], Validation::Check).unwrap();
        assert_eq!(brute_median_set(&star).unwrap(), vec![0]);
        assert_eq!(brute_median_set(&path(4).unwrap()).unwrap(), vec![1, 2]);
    }
}
