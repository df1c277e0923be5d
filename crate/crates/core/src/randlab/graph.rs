use rand::Rng;

use crate::error::{Error, Result};

use super::substream;

/// Simple graph with bit-set adjacency rows, optionally with declared parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    parts: Option<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<u64>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<SimpleGraph> {
        let words = n.div_ceil(64);
        let mut adj = vec![vec![0u64; words]; n];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::Domain(format!("invalid edge ({u}, {v}) on {n} vertices")));
            }
            if adj[u][v / 64] >> (v % 64) & 1 == 1 {
                return Err(Error::Domain(format!("duplicate edge ({u}, {v})")));
            }
            adj[u][v / 64] |= 1 << (v % 64);
            adj[v][u / 64] |= 1 << (u % 64);
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        Ok(SimpleGraph {
            n,
            parts: None,
            edges: list,
            adj,
        })
    }

    /// Attaches a part assignment; every edge must join different parts.
    pub fn with_parts(mut self, parts: Vec<usize>) -> Result<SimpleGraph> {
        if parts.len() != self.n {
            return Err(Error::Domain("part assignment must cover every vertex".into()));
        }
        if self.edges.iter().any(|&(u, v)| parts[u] == parts[v]) {
            return Err(Error::Domain("edge inside a declared part".into()));
        }
        self.parts = Some(parts);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn parts(&self) -> Option<&[usize]> {
        self.parts.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v / 64] >> (v % 64) & 1 == 1
    }

    /// Number of triangles: for each edge `uv` (`u < v`), common neighbours `w > v`.
    pub fn triangle_count(&self) -> u64 {
        let mut total = 0u64;
        for &(u, v) in &self.edges {
            let (ru, rv) = (&self.adj[u], &self.adj[v]);
            let first = (v + 1) / 64;
            for wi in first..ru.len() {
                let mut common = ru[wi] & rv[wi];
                if wi == first {
                    let shift = (v + 1) % 64;
                    common &= if shift == 0 {
                        u64::MAX
                    } else {
                        !((1u64 << shift) - 1)
                    };
                }
                total += common.count_ones() as u64;
            }
        }
        total
    }
}

/// Greedy maximal matching over edges in sorted order. A maximal matching
/// with `r` edges covers at most `2rn` edges, so `r >= |E| / (2n)`.
pub fn greedy_matching(g: &SimpleGraph) -> Vec<(usize, usize)> {
    let mut used = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for &(u, v) in g.edges() {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            out.push((u, v));
        }
    }
    out
}

/// A set of disjoint graph edges to which no further edge can be added.
pub fn is_maximal_matching(g: &SimpleGraph, matching: &[(usize, usize)]) -> bool {
    let mut used = vec![false; g.vertex_count()];
    for &(u, v) in matching {
        if !g.has_edge(u, v) || used[u] || used[v] {
            return false;
        }
        used[u] = true;
        used[v] = true;
    }
    g.edges().iter().all(|&(u, v)| used[u] || used[v])
}

/// Erdős–Rényi `G(n, p)`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<SimpleGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = substream(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(n, edges)
}

/// Random 3-partite cylinder: parts `0..m`, `m..2m`, `2m..3m`, each cross pair
/// present independently with probability `1/l`.
pub fn sample_cylinder(l: u64, m: usize, seed: u64) -> Result<SimpleGraph> {
    let mut rng = substream(seed, 0);
    sample_cylinder_with(l, m, &mut rng)
}

pub(crate) fn sample_cylinder_with<R: Rng>(l: u64, m: usize, rng: &mut R) -> Result<SimpleGraph> {
    if l == 0 || m == 0 {
        return Err(Error::Domain(format!(
            "cylinder needs l >= 1 and m >= 1 (got l={l}, m={m})"
        )));
    }
    let p = 1.0 / l as f64;
    let n = 3 * m;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if u / m != v / m && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(n, edges)?.with_parts((0..n).map(|v| v / m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_triangles(g: &SimpleGraph) -> u64 {
        let n = g.vertex_count();
        let mut t = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        t += 1;
                    }
                }
            }
        }
        t
    }

    #[test]
    fn matching_fixtures() {
        let star = SimpleGraph::new(6, (1..6).map(|v| (0, v))).unwrap();
        let m = greedy_matching(&star);
        assert_eq!(m.len(), 1);
        assert!(is_maximal_matching(&star, &m));

        let perfect = SimpleGraph::new(10, (0..5).map(|i| (2 * i, 2 * i + 1))).unwrap();
        assert_eq!(greedy_matching(&perfect).len(), 5);

        let path = SimpleGraph::new(7, (0..6).map(|i| (i, i + 1))).unwrap();
        let m = greedy_matching(&path);
        assert!(is_maximal_matching(&path, &m));
        assert!(2 * m.len() * path.vertex_count() >= path.edge_count());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(SimpleGraph::new(3, [(0, 0)]).is_err());
        assert!(SimpleGraph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(SimpleGraph::new(3, [(0, 3)]).is_err());
        let g = SimpleGraph::new(3, [(0, 1)]).unwrap();
        assert!(g.with_parts(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn triangle_count_matches_brute_force() {
        for seed in 0..20 {
            let g = sample_gnp(70, 0.3, seed).unwrap();
            assert_eq!(g.triangle_count(), brute_triangles(&g));
        }
        let c = sample_cylinder(2, 25, 3).unwrap();
        assert_eq!(c.triangle_count(), brute_triangles(&c));
    }

    #[test]
    fn complete_cylinder_has_m_cubed_triangles() {
        for m in [1, 5, 30] {
            assert_eq!(
                sample_cylinder(1, m, 9).unwrap().triangle_count(),
                (m * m * m) as u64
            );
        }
        assert!(sample_cylinder(0, 5, 1).is_err());
        assert!(sample_cylinder(2, 0, 1).is_err());
    }
}
