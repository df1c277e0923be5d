//! Triple systems stored as bit sets over the colex-ranked slots of `[n]^(3)`.
//!
//! Vertices are `0..n` internally. The text format (see [`TripleSystem::parse`])
//! numbers them `1..=n`; conversion happens only in the parser and serializer.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, ParseErrorKind, Result};

/// Largest supported vertex count. Vertex sets are packed into a `u64`.
pub const MAX_VERTICES: usize = 64;

pub(crate) const fn choose2(x: usize) -> usize {
    if x < 2 {
        0
    } else {
        x * (x - 1) / 2
    }
}

pub(crate) const fn choose3(x: usize) -> usize {
    if x < 3 {
        0
    } else {
        x * (x - 1) * (x - 2) / 6
    }
}

/// Number of triple slots on `n` vertices, `C(n, 3)`.
pub const fn slot_count(n: usize) -> usize {
    choose3(n)
}

/// A 3-element vertex set, stored sorted and 0-indexed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triple([u8; 3]);

impl Triple {
    /// Builds a triple from three distinct vertices in any order.
    pub fn new(a: usize, b: usize, c: usize) -> Option<Triple> {
        if a == b || b == c || a == c || a.max(b).max(c) >= MAX_VERTICES {
            return None;
        }
        let mut v = [a as u8, b as u8, c as u8];
        v.sort_unstable();
        Some(Triple(v))
    }

    pub fn vertices(self) -> [usize; 3] {
        [self.0[0] as usize, self.0[1] as usize, self.0[2] as usize]
    }

    pub fn mask(self) -> u64 {
        (1u64 << self.0[0]) | (1u64 << self.0[1]) | (1u64 << self.0[2])
    }

    pub fn contains(self, v: usize) -> bool {
        self.0.iter().any(|&x| x as usize == v)
    }

    /// Colex rank: `C(c,3) + C(b,2) + a` for `a < b < c`.
    pub fn rank(self) -> usize {
        let [a, b, c] = self.vertices();
        choose3(c) + choose2(b) + a
    }

    pub fn unrank(rank: usize) -> Triple {
        triple_table()[rank]
    }

    /// The two vertices other than `v`, or `None` if `v` is not in the triple.
    pub fn others(self, v: usize) -> Option<(usize, usize)> {
        let [a, b, c] = self.vertices();
        if v == a {
            Some((b, c))
        } else if v == b {
            Some((a, c))
        } else if v == c {
            Some((a, b))
        } else {
            None
        }
    }

    pub fn relabel(self, perm: &[usize]) -> Triple {
        let [a, b, c] = self.vertices();
        Triple::new(perm[a], perm[b], perm[c]).expect("permutation maps a triple to a triple")
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.vertices();
        write!(f, "{}{}{}", a + 1, b + 1, c + 1)
    }
}

fn triple_table() -> &'static [Triple] {
    static TABLE: OnceLock<Vec<Triple>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(choose3(MAX_VERTICES));
        for c in 2..MAX_VERTICES {
            for b in 1..c {
                for a in 0..b {
                    out.push(Triple([a as u8, b as u8, c as u8]));
                }
            }
        }
        out
    })
}

/// A 3-uniform hypergraph on vertex set `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleSystem {
    n: usize,
    words: Vec<u64>,
}

impl TripleSystem {
    /// The empty system on `n` vertices. Panics if `n > MAX_VERTICES`.
    pub fn empty(n: usize) -> TripleSystem {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices supported");
        TripleSystem {
            n,
            words: vec![0; slot_count(n).div_ceil(64)],
        }
    }

    /// The complete triple system `K_n^(3)`.
    pub fn complete(n: usize) -> TripleSystem {
        let mut h = TripleSystem::empty(n);
        for r in 0..slot_count(n) {
            h.words[r / 64] |= 1 << (r % 64);
        }
        h
    }

    /// Builds a system from 0-indexed vertex triples.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<TripleSystem>
    where
        I: IntoIterator<Item = [usize; 3]>,
    {
        if n > MAX_VERTICES {
            return Err(Error::UnsupportedSize {
                what: "triple system",
                n,
                limit: MAX_VERTICES,
            });
        }
        let mut h = TripleSystem::empty(n);
        for [a, b, c] in edges {
            let t = Triple::new(a, b, c)
                .filter(|t| t.vertices()[2] < n)
                .ok_or_else(|| Error::Domain(format!("invalid triple ({a}, {b}, {c}) for n = {n}")))?;
            h.insert(t);
        }
        Ok(h)
    }

    /// Builds a system from 1-indexed triples such as `[[1,2,3],[1,2,4]]`.
    /// Convenience for fixtures; panics on invalid input.
    pub fn from_one_based(n: usize, edges: &[[usize; 3]]) -> TripleSystem {
        TripleSystem::from_edges(n, edges.iter().map(|&[a, b, c]| [a - 1, b - 1, c - 1]))
            .expect("valid fixture")
    }

    /// Systems with at most 64 slots (`n <= 8`) can be addressed by a single mask.
    pub fn from_mask(n: usize, mask: u64) -> TripleSystem {
        let slots = slot_count(n);
        assert!(slots <= 64, "from_mask needs C(n,3) <= 64");
        let mut h = TripleSystem::empty(n);
        if slots > 0 {
            let keep = if slots == 64 {
                u64::MAX
            } else {
                (1u64 << slots) - 1
            };
            h.words[0] = mask & keep;
        }
        h
    }

    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slot_count(&self) -> usize {
        slot_count(self.n)
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, t: Triple) -> bool {
        let r = t.rank();
        r < self.slot_count() && self.words[r / 64] >> (r % 64) & 1 == 1
    }

    pub fn has_edge(&self, a: usize, b: usize, c: usize) -> bool {
        Triple::new(a, b, c).is_some_and(|t| self.contains(t))
    }

    /// Inserts `t`; returns `false` if it was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        let r = t.rank();
        assert!(r < self.slot_count(), "triple {t} outside vertex range");
        let bit = 1u64 << (r % 64);
        let fresh = self.words[r / 64] & bit == 0;
        self.words[r / 64] |= bit;
        fresh
    }

    pub fn remove(&mut self, t: Triple) -> bool {
        let r = t.rank();
        if r >= self.slot_count() {
            return false;
        }
        let bit = 1u64 << (r % 64);
        let had = self.words[r / 64] & bit != 0;
        self.words[r / 64] &= !bit;
        had
    }

    pub fn with_edge(&self, t: Triple) -> TripleSystem {
        let mut h = self.clone();
        h.insert(t);
        h
    }

    pub fn without_edge(&self, t: Triple) -> TripleSystem {
        let mut h = self.clone();
        h.remove(t);
        h
    }

    /// Edges in colex order.
    pub fn edges(&self) -> impl Iterator<Item = Triple> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(Triple::unrank(wi * 64 + tz))
            })
        })
    }

    /// Triple slots not occupied by an edge, in colex order.
    pub fn non_edges(&self) -> impl Iterator<Item = Triple> + '_ {
        (0..self.slot_count())
            .filter(|&r| self.words[r / 64] >> (r % 64) & 1 == 0)
            .map(Triple::unrank)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges().filter(|t| t.contains(v)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for t in self.edges() {
            for v in t.vertices() {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Every edge of `self` is an edge of `other` (same vertex count).
    pub fn is_subsystem_of(&self, other: &TripleSystem) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Image under the vertex map `perm` (old vertex `v` becomes `perm[v]`).
    pub fn relabel(&self, perm: &[usize]) -> TripleSystem {
        assert_eq!(perm.len(), self.n);
        let mut out = TripleSystem::empty(self.n);
        for t in self.edges() {
            out.insert(t.relabel(perm));
        }
        out
    }

    /// Pair-link table: for each pair `{u, v}`, the mask of all `w` with `uvw` an edge.
    pub fn links(&self) -> LinkTable {
        let n = self.n;
        let mut masks = vec![0u64; n * n];
        for t in self.edges() {
            let [a, b, c] = t.vertices();
            masks[a * n + b] |= 1 << c;
            masks[b * n + a] |= 1 << c;
            masks[a * n + c] |= 1 << b;
            masks[c * n + a] |= 1 << b;
            masks[b * n + c] |= 1 << a;
            masks[c * n + b] |= 1 << a;
        }
        LinkTable { n, masks }
    }

    /// Parses the text format: a header line `n m` followed by `m` lines `a b c`
    /// with 1-indexed vertices.
    pub fn parse(text: &str) -> Result<TripleSystem> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, ParseErrorKind::MalformedHeader("empty input".into())))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let malformed = || Error::parse(hline, ParseErrorKind::MalformedHeader(header.to_string()));
        if fields.len() != 2 {
            return Err(malformed());
        }
        let n: usize = fields[0].parse().map_err(|_| malformed())?;
        let m: usize = fields[1].parse().map_err(|_| malformed())?;
        if n > MAX_VERTICES {
            return Err(Error::parse(hline, ParseErrorKind::TooManyVertices(n)));
        }
        if m > slot_count(n) {
            return Err(malformed());
        }

        let mut h = TripleSystem::empty(n);
        let mut found = 0;
        let mut last_line = hline;
        for (lno, line) in lines {
            last_line = lno;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    lno,
                    ParseErrorKind::NotThreeUniform(line.to_string()),
                ));
            }
            let mut vs = [0usize; 3];
            for (slot, f) in vs.iter_mut().zip(&fields) {
                let v: i64 = f
                    .parse()
                    .map_err(|_| Error::parse(lno, ParseErrorKind::NotThreeUniform(line.to_string())))?;
                if v < 1 || v > n as i64 {
                    return Err(Error::parse(
                        lno,
                        ParseErrorKind::VertexOutOfRange { vertex: v, n },
                    ));
                }
                *slot = (v - 1) as usize;
            }
            let t = Triple::new(vs[0], vs[1], vs[2])
                .ok_or_else(|| Error::parse(lno, ParseErrorKind::NotThreeUniform(line.to_string())))?;
            if !h.insert(t) {
                let [a, b, c] = t.vertices();
                return Err(Error::parse(
                    lno,
                    ParseErrorKind::DuplicateEdge([a + 1, b + 1, c + 1]),
                ));
            }
            found += 1;
        }
        if found != m {
            return Err(Error::parse(
                last_line,
                ParseErrorKind::EdgeCountMismatch { declared: m, found },
            ));
        }
        Ok(h)
    }

    /// Serializes to the text format, edges in colex order, trailing newline.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.edge_count()).unwrap();
        for t in self.edges() {
            let [a, b, c] = t.vertices();
            writeln!(out, "{} {} {}", a + 1, b + 1, c + 1).unwrap();
        }
        out
    }
}

impl FromStr for TripleSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TripleSystem::parse(s)
    }
}

impl fmt::Debug for TripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TripleSystem(n={}, {{", self.n)?;
        for (i, t) in self.edges().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("})")
    }
}

/// Pair links `L(u, v) = { w : uvw in H }` as vertex masks.
#[derive(Clone, Debug)]
pub struct LinkTable {
    n: usize,
    masks: Vec<u64>,
}

impl LinkTable {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.masks[u * self.n + v]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Iterates the set bits of a vertex mask in increasing order.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_rank_round_trips() {
        for r in 0..slot_count(12) {
            assert_eq!(Triple::unrank(r).rank(), r);
        }
        assert_eq!(Triple::new(0, 1, 2).unwrap().rank(), 0);
        assert_eq!(Triple::new(0, 1, 3).unwrap().rank(), 1);
        assert_eq!(Triple::new(1, 2, 3).unwrap().rank(), 3);
    }

    #[test]
    fn parses_f5() {
        let h = TripleSystem::parse("5 3\n1 2 3\n1 2 4\n3 4 5").unwrap();
        assert_eq!(h.n(), 5);
        assert_eq!(h.edge_count(), 3);
        assert!(h.has_edge(0, 1, 2));
        assert!(h.has_edge(0, 1, 3));
        assert!(h.has_edge(2, 3, 4));
        assert_eq!(
            h,
            TripleSystem::from_one_based(5, &[[1, 2, 3], [1, 2, 4], [3, 4, 5]])
        );
    }

    #[test]
    fn parses_empty_system() {
        let h = TripleSystem::parse("4 0").unwrap();
        assert_eq!(h.n(), 4);
        assert!(h.is_empty());
    }

    #[test]
    fn rejects_repeated_vertex() {
        let err = TripleSystem::parse("3 1\n1 2 2").unwrap_err();
        match err {
            Error::Parse {
                line: 2,
                kind: ParseErrorKind::NotThreeUniform(_),
            } => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_line_numbers_for_each_error_kind() {
        let cases: [(&str, usize); 6] = [
            ("five 3\n1 2 3", 1),
            ("4 1\n1 2 5", 2),
            ("4 2\n1 2 3\n3 2 1", 3),
            ("4 2\n1 2 3\n1 2", 3),
            ("4 2\n1 2 3", 2),
            ("4 1\n1 2 3 4", 2),
        ];
        for (text, want) in cases {
            match TripleSystem::parse(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(
            TripleSystem::parse("4 1\n1 2 5"),
            Err(Error::Parse {
                kind: ParseErrorKind::VertexOutOfRange { vertex: 5, n: 4 },
                ..
            })
        ));
        assert!(matches!(
            TripleSystem::parse("4 2\n1 2 3\n3 2 1"),
            Err(Error::Parse {
                kind: ParseErrorKind::DuplicateEdge([1, 2, 3]),
                ..
            })
        ));
    }

    #[test]
    fn serializer_emits_colex_order() {
        let h = TripleSystem::from_one_based(5, &[[3, 4, 5], [1, 2, 4], [1, 2, 3]]);
        assert_eq!(h.serialize(), "5 3\n1 2 3\n1 2 4\n3 4 5\n");
    }

    #[test]
    fn links_and_degrees() {
        let h = TripleSystem::from_one_based(5, &[[1, 2, 3], [1, 2, 4], [3, 4, 5]]);
        let l = h.links();
        assert_eq!(l.get(0, 1), 0b1100);
        assert_eq!(l.get(2, 3), 0b10000);
        assert_eq!(h.degrees(), vec![2, 2, 2, 2, 1]);
    }

    #[test]
    fn mask_round_trip() {
        let h = TripleSystem::complete(4);
        assert_eq!(h.as_mask(), Some(0b1111));
        assert_eq!(TripleSystem::from_mask(4, 0b1111), h);
    }
}
