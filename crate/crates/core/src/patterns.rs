//! Detection of the forbidden configurations `F5 = {123, 124, 345}` and
//! `K4- = {123, 124, 234}`, the definitional cancellativity test, and the
//! forced-pair rule (no `xuv, yuv` in `H` for an edge `xyz`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::system::{bits, Triple, TripleSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PatternKind {
    F5,
    K4Minus,
    CancellationViolation,
    ForcedPair,
}

/// A located copy of a pattern.
///
/// For `F5` and `ForcedPair`, `edges` is `[uvx, uvy, xyz]`, `pair` is `(u, v)`
/// and `apexes` is `(x, y)`. For `CancellationViolation`, `edges` is
/// `[A, B, C]` with `A ∪ B = A ∪ C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternHit {
    pub kind: PatternKind,
    pub edges: Vec<Triple>,
    pub pair: Option<(usize, usize)>,
    pub apexes: Option<(usize, usize)>,
}

impl PatternHit {
    /// Re-checks the witness against the defining shape, independently of
    /// how it was found.
    pub fn validate(&self, h: &TripleSystem) -> bool {
        if !self.edges.iter().all(|&e| h.contains(e)) {
            return false;
        }
        match self.kind {
            PatternKind::F5 | PatternKind::ForcedPair => {
                self.edges.len() == 3 && is_f5_shape(self.edges[0], self.edges[1], self.edges[2])
            }
            PatternKind::K4Minus => {
                self.edges.len() == 3 && {
                    let union = self.edges.iter().fold(0u64, |m, e| m | e.mask());
                    union.count_ones() == 4
                        && self.edges[0] != self.edges[1]
                        && self.edges[1] != self.edges[2]
                        && self.edges[0] != self.edges[2]
                }
            }
            PatternKind::CancellationViolation => {
                let [a, b, c] = [self.edges[0], self.edges[1], self.edges[2]];
                a != b && b != c && a != c && (a.mask() | b.mask()) == (a.mask() | c.mask())
            }
        }
    }

    pub fn describe(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
        format!("{:?}[{}]", self.kind, edges.join(","))
    }
}

/// Whether three edges, in some order, form a copy of F5: two edges meeting in a
/// pair, and a third containing both of their apexes plus a fifth vertex.
pub fn is_f5_shape(a: Triple, b: Triple, c: Triple) -> bool {
    let all = a.mask() | b.mask() | c.mask();
    if all.count_ones() != 5 {
        return false;
    }
    let try_order = |p: Triple, q: Triple, r: Triple| {
        let shared = p.mask() & q.mask();
        let apexes = (p.mask() | q.mask()) & !shared;
        shared.count_ones() == 2
            && apexes.count_ones() == 2
            && r.mask() & apexes == apexes
            && r.mask() & shared == 0
    };
    try_order(a, b, c) || try_order(a, c, b) || try_order(b, c, a)
}

fn f5_hit(u: usize, v: usize, x: usize, y: usize, z: usize, kind: PatternKind) -> PatternHit {
    PatternHit {
        kind,
        edges: vec![
            Triple::new(u, v, x).unwrap(),
            Triple::new(u, v, y).unwrap(),
            Triple::new(x, y, z).unwrap(),
        ],
        pair: Some((u.min(v), u.max(v))),
        apexes: Some((x.min(y), x.max(y))),
    }
}

/// Exhaustive F5 search, one shared pair `(u, v)` at a time.
pub fn contains_f5(h: &TripleSystem) -> Option<PatternHit> {
    let n = h.n();
    if n < 5 {
        return None;
    }
    let links = h.links();
    for u in 0..n {
        for v in u + 1..n {
            let link = links.get(u, v);
            if link.count_ones() < 2 {
                continue;
            }
            let uv = (1u64 << u) | (1u64 << v);
            for x in bits(link) {
                for y in bits(link & !((2u64 << x) - 1)) {
                    let z_mask = links.get(x, y) & !uv;
                    if z_mask != 0 {
                        let z = z_mask.trailing_zeros() as usize;
                        return Some(f5_hit(u, v, x, y, z, PatternKind::F5));
                    }
                }
            }
        }
    }
    None
}

/// Some four vertices carry at least three of their four triples.
pub fn contains_k4minus(h: &TripleSystem) -> Option<PatternHit> {
    let n = h.n();
    if n < 4 {
        return None;
    }
    let links = h.links();
    // Any two triples on four points share a pair, so a K4- contains uvx, uvy and
    // one of uxy, vxy.
    for u in 0..n {
        for v in u + 1..n {
            let link = links.get(u, v);
            if link.count_ones() < 2 {
                continue;
            }
            for x in bits(link) {
                for y in bits(link & !((2u64 << x) - 1)) {
                    let third = links.get(x, y) & ((1u64 << u) | (1u64 << v));
                    if third != 0 {
                        let w = third.trailing_zeros() as usize;
                        return Some(PatternHit {
                            kind: PatternKind::K4Minus,
                            edges: vec![
                                Triple::new(u, v, x).unwrap(),
                                Triple::new(u, v, y).unwrap(),
                                Triple::new(w, x, y).unwrap(),
                            ],
                            pair: None,
                            apexes: None,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Three distinct edges with `A ∪ B = A ∪ C`, found by the direct definition.
pub fn cancellation_violation(h: &TripleSystem) -> Option<PatternHit> {
    let edges: Vec<Triple> = h.edges().collect();
    let mut unions: Vec<(u64, usize)> = Vec::with_capacity(edges.len());
    for (ai, &a) in edges.iter().enumerate() {
        unions.clear();
        unions.extend(
            edges
                .iter()
                .enumerate()
                .filter(|&(bi, _)| bi != ai)
                .map(|(bi, b)| (a.mask() | b.mask(), bi)),
        );
        unions.sort_unstable();
        if let Some(w) = unions.windows(2).find(|w| w[0].0 == w[1].0) {
            return Some(PatternHit {
                kind: PatternKind::CancellationViolation,
                edges: vec![a, edges[w[0].1], edges[w[1].1]],
                pair: None,
                apexes: None,
            });
        }
    }
    None
}

pub fn is_cancellative(h: &TripleSystem) -> bool {
    cancellation_violation(h).is_none()
}

/// For `e = xyz` in `h`, a pair `uv` disjoint from `e` with both `xuv` and `yuv`
/// in `h`, for some choice of two vertices `x, y` of `e`. Equivalently, a copy of
/// F5 in which `e` is the edge through both apexes.
pub fn forced_pair_violation(h: &TripleSystem, e: Triple) -> Result<Option<PatternHit>> {
    if !h.contains(e) {
        return Err(Error::Precondition(format!("edge {e} is not in the system")));
    }
    let links = h.links();
    let [a, b, c] = e.vertices();
    let outside = !e.mask();
    for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
        for u in bits(outside & low_mask(h.n())) {
            let v_mask = links.get(x, u) & links.get(y, u) & outside;
            if v_mask != 0 {
                let v = v_mask.trailing_zeros() as usize;
                return Ok(Some(f5_hit(u, v, x, y, z, PatternKind::ForcedPair)));
            }
        }
    }
    Ok(None)
}

/// A copy of F5 in `h` that uses the edge `e`, in any role.
pub fn f5_through(h: &TripleSystem, e: Triple) -> Option<PatternHit> {
    if let Ok(Some(mut hit)) = forced_pair_violation(h, e) {
        hit.kind = PatternKind::F5;
        return Some(hit);
    }
    let links = h.links();
    let [a, b, c] = e.vertices();
    for (u, v, x) in [(a, b, c), (a, c, b), (b, c, a)] {
        let uv = (1u64 << u) | (1u64 << v);
        for y in bits(links.get(u, v) & !(1u64 << x)) {
            let z_mask = links.get(x, y) & !uv;
            if z_mask != 0 {
                let z = z_mask.trailing_zeros() as usize;
                return Some(f5_hit(u, v, x, y, z, PatternKind::F5));
            }
        }
    }
    None
}

/// A K4- in `h` that uses the edge `e`.
pub fn k4minus_through(h: &TripleSystem, e: Triple) -> Option<PatternHit> {
    let [a, b, c] = e.vertices();
    for w in bits(!e.mask() & low_mask(h.n())) {
        let others: Vec<Triple> = [(a, b), (a, c), (b, c)]
            .into_iter()
            .map(|(p, q)| Triple::new(p, q, w).unwrap())
            .filter(|&t| h.contains(t))
            .take(2)
            .collect();
        if others.len() == 2 {
            return Some(PatternHit {
                kind: PatternKind::K4Minus,
                edges: vec![e, others[0], others[1]],
                pair: None,
                apexes: None,
            });
        }
    }
    None
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
