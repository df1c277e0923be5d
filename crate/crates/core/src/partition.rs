//! Vertex 3-partitions: crossing classification, exact optimal partitions,
//! tripartiteness, pair links and link profiles, and recovery of the unique
//! 3-partition of a dense tripartite system.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::system::{bits, Triple, TripleSystem};

/// Default size limit for [`optimal_partition`].
pub const DEFAULT_PARTITION_BOUND: usize = 24;

/// Assignment of every vertex to part 0, 1 or 2. Parts may be empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Partition3 {
    labels: Vec<u8>,
}

impl Partition3 {
    pub fn new(labels: Vec<u8>) -> Result<Partition3> {
        if let Some(bad) = labels.iter().find(|&&l| l > 2) {
            return Err(Error::Domain(format!("part label {bad} is not in 0..=2")));
        }
        Ok(Partition3 { labels })
    }

    /// Builds a partition from 1-indexed vertex lists, one per part.
    pub fn from_parts(n: usize, parts: [&[usize]; 3]) -> Result<Partition3> {
        let mut labels = vec![u8::MAX; n];
        for (p, members) in parts.iter().enumerate() {
            for &v in members.iter() {
                if v == 0 || v > n || labels[v - 1] != u8::MAX {
                    return Err(Error::Domain(format!("vertex {v} invalid or listed twice")));
                }
                labels[v - 1] = p as u8;
            }
        }
        if labels.contains(&u8::MAX) {
            return Err(Error::Domain("some vertex is not assigned a part".into()));
        }
        Ok(Partition3 { labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn part(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Vertex mask of each part.
    pub fn masks(&self) -> [u64; 3] {
        let mut m = [0u64; 3];
        for (v, &l) in self.labels.iter().enumerate() {
            m[l as usize] |= 1 << v;
        }
        m
    }

    pub fn part_sizes(&self) -> [usize; 3] {
        let mut s = [0; 3];
        for &l in &self.labels {
            s[l as usize] += 1;
        }
        s
    }

    pub fn is_crossing(&self, t: Triple) -> bool {
        let [a, b, c] = t.vertices();
        let (x, y, z) = (self.labels[a], self.labels[b], self.labels[c]);
        x != y && y != z && x != z
    }

    /// Applies a renaming of the three parts.
    pub fn rename(&self, perm: [u8; 3]) -> Partition3 {
        Partition3 {
            labels: self.labels.iter().map(|&l| perm[l as usize]).collect(),
        }
    }

    /// Relabels parts in order of first appearance (a restricted growth string).
    pub fn normalized(&self) -> Partition3 {
        let mut map = [u8::MAX; 3];
        let mut next = 0u8;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l as usize] == u8::MAX {
                    map[l as usize] = next;
                    next += 1;
                }
                map[l as usize]
            })
            .collect();
        Partition3 { labels }
    }

    /// Equal as unordered partitions.
    pub fn same_up_to_renaming(&self, other: &Partition3) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for Partition3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionResult {
    pub partition: Partition3,
    pub bad_count: usize,
    pub optimal: bool,
}

pub fn non_crossing_count(h: &TripleSystem, p: &Partition3) -> usize {
    assert_eq!(h.n(), p.n(), "partition must cover every vertex");
    h.edges().filter(|&t| !p.is_crossing(t)).count()
}

/// Exact minimum number of non-crossing edges over all 3-partitions, with the
/// lexicographically smallest minimizing label vector.
pub fn optimal_partition(h: &TripleSystem) -> Result<PartitionResult> {
    optimal_partition_bounded(h, DEFAULT_PARTITION_BOUND)
}

pub fn optimal_partition_bounded(h: &TripleSystem, bound: usize) -> Result<PartitionResult> {
    if h.n() > bound {
        return Err(Error::UnsupportedSize {
            what: "optimal partition",
            n: h.n(),
            limit: bound,
        });
    }
    let start = local_search(h);
    let start_bad = non_crossing_count(h, &start);
    let mut search = PartitionSearch::new(h, start_bad, false);
    search.run();
    let labels = search.best.expect("a partition attaining the incumbent exists");
    Ok(PartitionResult {
        partition: Partition3 { labels },
        bad_count: search.best_bad,
        optimal: true,
    })
}

/// A partition under which every edge is crossing, if one exists.
pub fn tripartition(h: &TripleSystem) -> Option<Partition3> {
    let mut search = PartitionSearch::new(h, 0, true);
    search.run();
    search.best.map(|labels| Partition3 { labels })
}

pub fn is_tripartite(h: &TripleSystem) -> bool {
    tripartition(h).is_some()
}

/// Depth-first search over restricted growth label vectors in lexicographic
/// order. An edge is charged as non-crossing as soon as two of its assigned
/// vertices share a part, so the partial charge is a valid lower bound.
struct PartitionSearch {
    n: usize,
    /// For vertex `k`: edges `{a, k, c}` with `a < k < c` (store `a`).
    middle: Vec<Vec<usize>>,
    /// For vertex `k`: edges `{a, b, k}` with `a < b < k`.
    last: Vec<Vec<(usize, usize)>>,
    labels: Vec<u8>,
    best: Option<Vec<u8>>,
    best_bad: usize,
    /// Stop at the first partition whose charge does not exceed `best_bad`.
    first_only: bool,
    done: bool,
}

impl PartitionSearch {
    fn new(h: &TripleSystem, incumbent: usize, first_only: bool) -> Self {
        let n = h.n();
        let mut middle = vec![Vec::new(); n];
        let mut last = vec![Vec::new(); n];
        for t in h.edges() {
            let [a, b, c] = t.vertices();
            middle[b].push(a);
            last[c].push((a, b));
        }
        PartitionSearch {
            n,
            middle,
            last,
            labels: vec![0; n],
            best: None,
            best_bad: incumbent,
            first_only,
            done: false,
        }
    }

    fn run(&mut self) {
        if self.n == 0 {
            self.best = Some(Vec::new());
            return;
        }
        self.descend(0, 0, 0);
    }

    fn charge(&self, k: usize, l: u8) -> usize {
        let same_mid = self.middle[k].iter().filter(|&&a| self.labels[a] == l).count();
        let same_last = self.last[k]
            .iter()
            .filter(|&&(a, b)| {
                let (la, lb) = (self.labels[a], self.labels[b]);
                la != lb && (l == la || l == lb)
            })
            .count();
        same_mid + same_last
    }

    fn descend(&mut self, k: usize, bad: usize, used_labels: u8) {
        if k == self.n {
            if bad < self.best_bad || (bad == self.best_bad && self.best.is_none()) {
                self.best_bad = bad;
                self.best = Some(self.labels.clone());
                if self.first_only {
                    self.done = true;
                }
            }
            return;
        }
        // Restricted growth: vertex k may open at most one new part.
        let max_label = used_labels.min(2);
        for l in 0..=max_label {
            let total = bad + self.charge(k, l);
            if total > self.best_bad || (total == self.best_bad && self.best.is_some()) {
                continue;
            }
            self.labels[k] = l;
            let used = if l == used_labels {
                used_labels + 1
            } else {
                used_labels
            };
            self.descend(k + 1, total, used);
            if self.done {
                return;
            }
        }
    }
}

/// Deterministic single-vertex-move local search used to seed the exact search.
fn local_search(h: &TripleSystem) -> Partition3 {
    let n = h.n();
    let mut labels: Vec<u8> = (0..n).map(|v| (v % 3) as u8).collect();
    let edges: Vec<Triple> = h.edges().collect();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for t in &edges {
        let [a, b, c] = t.vertices();
        incident[a].push((b, c));
        incident[b].push((a, c));
        incident[c].push((a, b));
    }
    let cost = |labels: &[u8], v: usize, l: u8| {
        incident[v]
            .iter()
            .filter(|&&(x, y)| {
                let (lx, ly) = (labels[x], labels[y]);
                lx == ly || lx == l || ly == l
            })
            .count()
    };
    loop {
        let mut improved = false;
        for v in 0..n {
            let current = cost(&labels, v, labels[v]);
            let (best_l, best_c) = (0u8..3)
                .map(|l| (l, cost(&labels, v, l)))
                .min_by_key(|&(_, c)| c)
                .unwrap();
            if best_c < current {
                labels[v] = best_l;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Partition3 { labels }
}

/// `L_C(u, v)`: vertices `w` with `uvw` an edge and `w` in the part containing
/// neither `u` nor `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub vertices: Vec<usize>,
    /// `u` and `v` share a part, so the link is empty by definition.
    pub same_part: bool,
}

pub fn link(h: &TripleSystem, p: &Partition3, u: usize, v: usize) -> Result<Link> {
    if u == v {
        return Err(Error::Precondition("link needs two distinct vertices".into()));
    }
    if p.part(u) == p.part(v) {
        return Ok(Link {
            vertices: Vec::new(),
            same_part: true,
        });
    }
    let third = 3 - p.part(u) - p.part(v);
    let vertices = (0..h.n())
        .filter(|&w| w != u && w != v && p.part(w) == third && h.has_edge(u, v, w))
        .collect();
    Ok(Link {
        vertices,
        same_part: false,
    })
}

/// Unordered pair of part indices `(i, j)` with `i <= j`.
pub type PartPair = (usize, usize);

/// Edges through a vertex, classified by the parts of their other two vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkProfile {
    pub vertex: usize,
    pub counts: BTreeMap<PartPair, usize>,
}

impl LinkProfile {
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.counts.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn link_profile(h: &TripleSystem, p: &Partition3, x: usize) -> LinkProfile {
    let mut counts = BTreeMap::new();
    for i in 0..3 {
        for j in i..3 {
            counts.insert((i, j), 0);
        }
    }
    for t in h.edges() {
        if let Some((a, b)) = t.others(x) {
            let (i, j) = (p.part(a), p.part(b));
            *counts.get_mut(&(i.min(j), i.max(j))).unwrap() += 1;
        }
    }
    LinkProfile { vertex: x, counts }
}

/// Recovers a 3-partition making every edge crossing by propagation.
///
/// Seeds `u, v` from the first edge, puts `L(u, v)` in the third part, then for
/// each `w` in `L(u, v)` sends `L(u, w)` to `v`'s part and `L(v, w)` to `u`'s.
/// Remaining vertices are placed, in rounds, in the part supported by the most
/// edges whose other two vertices are already placed in the two other parts;
/// ties or no support make the procedure give up.
pub fn recover_partition(h: &TripleSystem) -> Option<Partition3> {
    let n = h.n();
    let first = h.edges().next()?;
    let links = h.links();
    let mut part: Vec<Option<u8>> = vec![None; n];
    let [u, v, _] = first.vertices();

    fn place(part: &mut [Option<u8>], w: usize, p: u8) -> bool {
        match part[w] {
            None => {
                part[w] = Some(p);
                true
            }
            Some(q) => q == p,
        }
    }

    part[u] = Some(0);
    part[v] = Some(1);
    let seed_link = links.get(u, v);
    for w in bits(seed_link) {
        if !place(&mut part, w, 2) {
            return None;
        }
    }
    for w in bits(seed_link) {
        for x in bits(links.get(u, w)) {
            if !place(&mut part, x, 1) {
                return None;
            }
        }
        for x in bits(links.get(v, w)) {
            if !place(&mut part, x, 0) {
                return None;
            }
        }
    }

    loop {
        let unplaced: Vec<usize> = (0..n).filter(|&w| part[w].is_none()).collect();
        if unplaced.is_empty() {
            break;
        }
        let mut masks = [0u64; 3];
        for (w, p) in part.iter().enumerate() {
            if let Some(p) = p {
                masks[*p as usize] |= 1 << w;
            }
        }
        let mut decisions = Vec::new();
        for &w in &unplaced {
            let mut evidence = [0usize; 3];
            for (q, ev) in evidence.iter_mut().enumerate() {
                let (r, s) = ((q + 1) % 3, (q + 2) % 3);
                *ev = bits(masks[r])
                    .map(|a| (links.get(w, a) & masks[s]).count_ones() as usize)
                    .sum();
            }
            let max = *evidence.iter().max().unwrap();
            if max > 0 && evidence.iter().filter(|&&e| e == max).count() == 1 {
                let q = evidence.iter().position(|&e| e == max).unwrap();
                decisions.push((w, q as u8));
            }
        }
        if decisions.is_empty() {
            return None;
        }
        for (w, q) in decisions {
            part[w] = Some(q);
        }
    }

    let p = Partition3 {
        labels: part.into_iter().map(|p| p.unwrap()).collect(),
    };
    h.edges().all(|t| p.is_crossing(t)).then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> TripleSystem {
        TripleSystem::from_one_based(5, &[[1, 2, 3], [1, 2, 4], [3, 4, 5]])
    }

    /// Minimum over all 3^n label vectors, test oracle.
    fn brute_min(h: &TripleSystem) -> usize {
        let n = h.n();
        (0..3usize.pow(n as u32))
            .map(|mut code| {
                let labels = (0..n)
                    .map(|_| {
                        let l = (code % 3) as u8;
                        code /= 3;
                        l
                    })
                    .collect();
                non_crossing_count(h, &Partition3::new(labels).unwrap())
            })
            .min()
            .unwrap()
    }

    #[test]
    fn non_crossing_examples() {
        let p = Partition3::from_parts(5, [&[1], &[2], &[3, 4, 5]]).unwrap();
        assert_eq!(non_crossing_count(&f5(), &p), 1);
        let k4 = TripleSystem::complete(4);
        let q = Partition3::from_parts(4, [&[1, 2], &[3], &[4]]).unwrap();
        assert_eq!(non_crossing_count(&k4, &q), 2);
        let one = Partition3::new(vec![0; 5]).unwrap();
        assert_eq!(non_crossing_count(&f5(), &one), 3);
    }

    #[test]
    fn optimal_examples() {
        assert_eq!(brute_min(&f5()), 1);
        assert_eq!(optimal_partition(&f5()).unwrap().bad_count, 1);
        assert_eq!(brute_min(&TripleSystem::complete(4)), 2);
        assert_eq!(
            optimal_partition(&TripleSystem::complete(4)).unwrap().bad_count,
            2
        );
        let single = TripleSystem::from_one_based(3, &[[1, 2, 3]]);
        let r = optimal_partition(&single).unwrap();
        assert_eq!(r.bad_count, 0);
        assert_eq!(r.partition.labels(), &[0, 1, 2]);
    }

    #[test]
    fn tie_break_is_lexicographically_smallest() {
        let h = f5();
        let r = optimal_partition(&h).unwrap();
        let n = h.n();
        let mut smallest = None;
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut labels = vec![0u8; n];
            for slot in labels.iter_mut().rev() {
                *slot = (c % 3) as u8;
                c /= 3;
            }
            let p = Partition3::new(labels).unwrap();
            if non_crossing_count(&h, &p) == 1 {
                smallest = Some(p);
                break;
            }
        }
        assert_eq!(r.partition, smallest.unwrap());
    }

    #[test]
    fn optimal_matches_brute_force_n7() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..60 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let h = TripleSystem::from_mask(7, state >> 29);
            let r = optimal_partition(&h).unwrap();
            assert_eq!(r.bad_count, brute_min(&h), "{h:?}");
            assert_eq!(non_crossing_count(&h, &r.partition), r.bad_count);
            assert_eq!(r.bad_count == 0, is_tripartite(&h));
        }
    }

    #[test]
    fn size_bound_enforced() {
        assert!(matches!(
            optimal_partition(&TripleSystem::empty(25)),
            Err(Error::UnsupportedSize { .. })
        ));
    }

    #[test]
    fn tripartite_examples() {
        assert!(is_tripartite(&TripleSystem::from_one_based(3, &[[1, 2, 3]])));
        assert!(!is_tripartite(&f5()));
        assert!(!is_tripartite(&TripleSystem::from_one_based(
            4,
            &[[1, 2, 3], [1, 2, 4], [2, 3, 4]]
        )));
        assert!(is_tripartite(&TripleSystem::empty(0)));
    }

    #[test]
    fn link_examples() {
        let p = Partition3::from_parts(5, [&[1], &[2], &[3, 4, 5]]).unwrap();
        assert_eq!(
            link(&f5(), &p, 0, 1).unwrap(),
            Link {
                vertices: vec![2, 3],
                same_part: false
            }
        );
        assert_eq!(
            link(&f5(), &p, 2, 3).unwrap(),
            Link {
                vertices: vec![],
                same_part: true
            }
        );
        let single = TripleSystem::from_one_based(3, &[[1, 2, 3]]);
        let q = Partition3::new(vec![0, 1, 2]).unwrap();
        assert_eq!(link(&single, &q, 0, 2).unwrap().vertices, vec![1]);
        assert!(link(&single, &q, 1, 1).is_err());
    }

    #[test]
    fn link_profile_examples() {
        let p = Partition3::from_parts(5, [&[1], &[2], &[3, 4, 5]]).unwrap();
        let prof = link_profile(&f5(), &p, 0);
        assert_eq!(prof.get(1, 2), 2);
        assert_eq!(prof.total(), 2);

        let q = Partition3::from_parts(4, [&[1, 2], &[3], &[4]]).unwrap();
        let prof = link_profile(&TripleSystem::complete(4), &q, 0);
        assert_eq!(prof.get(0, 1), 1);
        assert_eq!(prof.get(0, 2), 1);
        assert_eq!(prof.get(1, 2), 1);
        assert_eq!(prof.total(), 3);

        let iso = link_profile(&TripleSystem::from_one_based(4, &[[1, 2, 3]]), &q, 3);
        assert_eq!(iso.total(), 0);
    }

    #[test]
    fn recovery_examples() {
        assert!(recover_partition(&f5()).is_none());
        let single = TripleSystem::from_one_based(3, &[[1, 2, 3]]);
        assert_eq!(recover_partition(&single).unwrap().labels(), &[0, 1, 2]);
        assert!(recover_partition(&TripleSystem::empty(3)).is_none());
    }

    #[test]
    fn renaming_invariance() {
        let p = Partition3::from_parts(5, [&[1], &[2], &[3, 4, 5]]).unwrap();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let q = p.rename(perm);
            assert_eq!(non_crossing_count(&f5(), &q), 1);
            assert!(q.same_up_to_renaming(&p));
        }
    }
}
