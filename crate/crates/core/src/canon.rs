//! Canonical forms, automorphism group orders and isomorphism testing for
//! small triple systems.
//!
//! The canonical key is the relabeling whose slot bit string (slot 0 first,
//! in colex order) is lexicographically smallest, where the search only
//! considers relabelings that list vertices by non-increasing degree. Because
//! the first `k` labels determine exactly the slots below `C(k, 3)`, the
//! search can compare one label level at a time and prune on the first
//! larger level.

use crate::error::{Error, Result};
use crate::system::{bits, Triple, TripleSystem};

/// Default upper bound on `n` for canonicalization.
pub const DEFAULT_CANON_BOUND: usize = 10;

/// Level chunks are packed in a `u64`, which caps the bound at `C(11, 2) = 55` bits.
const HARD_CANON_BOUND: usize = 12;

/// Relabeling-invariant key plus the automorphism group order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// The canonical representative; equal keys iff isomorphic systems.
    pub key: TripleSystem,
    pub aut_order: u64,
    /// `labeling[v]` is the canonical label of original vertex `v`.
    pub labeling: Vec<usize>,
}

impl CanonicalForm {
    /// The edge of the original system that maps to the last edge (in colex
    /// order) of the canonical key. `None` for the empty system.
    pub fn deletion_edge(&self) -> Option<Triple> {
        let last = self.key.edges().last()?;
        let mut inverse = vec![0; self.labeling.len()];
        for (v, &l) in self.labeling.iter().enumerate() {
            inverse[l] = v;
        }
        Some(last.relabel(&inverse))
    }
}

pub fn canonical_form(h: &TripleSystem) -> Result<CanonicalForm> {
    canonical_form_bounded(h, DEFAULT_CANON_BOUND)
}

pub fn canonical_form_bounded(h: &TripleSystem, bound: usize) -> Result<CanonicalForm> {
    let limit = bound.min(HARD_CANON_BOUND);
    if h.n() > limit {
        return Err(Error::UnsupportedSize {
            what: "canonical form",
            n: h.n(),
            limit,
        });
    }
    let mut search = CanonSearch::new(h);
    search.run();
    let key = h.relabel(&search.best_labeling);
    Ok(CanonicalForm {
        key,
        aut_order: search.count,
        labeling: search.best_labeling,
    })
}

/// Number of labeled copies of `h` on its vertex set, `n! / |Aut(h)|`.
pub fn labeled_count(h: &TripleSystem) -> Result<u64> {
    let cf = canonical_form(h)?;
    Ok(factorial(h.n()) / cf.aut_order)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

struct CanonSearch {
    n: usize,
    links: crate::system::LinkTable,
    /// Vertices grouped into cells of equal degree, highest degree first.
    cell_of: Vec<usize>,
    cell_sizes: Vec<usize>,
    /// `inv[k]` = original vertex given label `k` on the current path.
    inv: Vec<usize>,
    used: u64,
    best: Vec<u64>,
    valid_depth: usize,
    best_labeling: Vec<usize>,
    count: u64,
    dirty: bool,
}

impl CanonSearch {
    fn new(h: &TripleSystem) -> Self {
        let n = h.n();
        let deg = h.degrees();
        let mut distinct: Vec<usize> = deg.clone();
        distinct.sort_unstable_by(|a, b| b.cmp(a));
        distinct.dedup();
        let cell_of: Vec<usize> = deg
            .iter()
            .map(|d| distinct.iter().position(|x| x == d).unwrap())
            .collect();
        let mut cell_sizes = vec![0; distinct.len()];
        for &c in &cell_of {
            cell_sizes[c] += 1;
        }
        CanonSearch {
            n,
            links: h.links(),
            cell_of,
            cell_sizes,
            inv: Vec::with_capacity(n),
            used: 0,
            best: vec![0; n],
            valid_depth: 0,
            best_labeling: (0..n).collect(),
            count: 0,
            dirty: false,
        }
    }

    fn run(&mut self) {
        if self.n == 0 {
            self.count = 1;
            return;
        }
        self.descend(0);
    }

    /// Cell that label `k` must be drawn from: cells are filled in order.
    fn cell_for_level(&self, k: usize) -> usize {
        let mut filled = 0;
        for (c, &size) in self.cell_sizes.iter().enumerate() {
            filled += size;
            if k < filled {
                return c;
            }
        }
        unreachable!("level beyond vertex count")
    }

    /// Bits of slots `{a, b, k}` for labels `a < b < k`, lowest rank most significant.
    fn level_chunk(&self, v: usize) -> u64 {
        let k = self.inv.len();
        let mut chunk = 0u64;
        for b in 1..k {
            let link_b = self.links.get(self.inv[b], v);
            for a in 0..b {
                chunk = (chunk << 1) | (link_b >> self.inv[a] & 1);
            }
        }
        chunk
    }

    /// `dirty` is set whenever a level chunk improves on the recorded best; the
    /// next leaf then starts a new best labeling.
    fn descend(&mut self, k: usize) {
        if k == self.n {
            if self.dirty {
                self.dirty = false;
                self.count = 1;
                let mut lab = vec![0; self.n];
                for (label, &v) in self.inv.iter().enumerate() {
                    lab[v] = label;
                }
                self.best_labeling = lab;
            } else {
                self.count += 1;
            }
            return;
        }
        let cell = self.cell_for_level(k);
        let mut candidates = !self.used & low_mask(self.n);
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            if self.cell_of[v] != cell {
                continue;
            }
            let chunk = self.level_chunk(v);
            if k >= self.valid_depth || chunk < self.best[k] {
                self.best[k] = chunk;
                self.valid_depth = k + 1;
                self.dirty = true;
            } else if chunk > self.best[k] {
                continue;
            }
            self.inv.push(v);
            self.used |= 1 << v;
            self.descend(k + 1);
            self.inv.pop();
            self.used &= !(1 << v);
        }
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Isomorphism test by direct backtracking over degree-respecting bijections.
/// Independent of [`canonical_form`] and not size-bounded.
pub fn is_isomorphic(a: &TripleSystem, b: &TripleSystem) -> bool {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    let da = a.degrees();
    let db = b.degrees();
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let mut iso = IsoSearch {
        la: a.links(),
        lb: b.links(),
        da,
        db,
        map: Vec::with_capacity(a.n()),
        used: 0,
        n: a.n(),
    };
    iso.extend()
}

struct IsoSearch {
    la: crate::system::LinkTable,
    lb: crate::system::LinkTable,
    da: Vec<usize>,
    db: Vec<usize>,
    map: Vec<usize>,
    used: u64,
    n: usize,
}

impl IsoSearch {
    fn extend(&mut self) -> bool {
        let x = self.map.len();
        if x == self.n {
            return true;
        }
        let free = !self.used & low_mask(self.n);
        for y in bits(free) {
            if self.da[x] != self.db[y] || !self.consistent(x, y) {
                continue;
            }
            self.map.push(y);
            self.used |= 1 << y;
            if self.extend() {
                return true;
            }
            self.map.pop();
            self.used &= !(1 << y);
        }
        false
    }

    /// Mapping `x -> y` preserves every triple whose other two vertices are mapped.
    fn consistent(&self, x: usize, y: usize) -> bool {
        for p in 0..x {
            let a_link = self.la.get(p, x);
            let b_link = self.lb.get(self.map[p], y);
            for q in 0..p {
                if (a_link >> q & 1) != (b_link >> self.map[q] & 1) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> TripleSystem {
        TripleSystem::from_one_based(5, &[[1, 2, 3], [1, 2, 4], [3, 4, 5]])
    }

    /// All permutations of `0..n` (Heap's algorithm), test oracle.
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(a.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, a, out);
                if k.is_multiple_of(2) {
                    a.swap(i, k - 1);
                } else {
                    a.swap(0, k - 1);
                }
            }
        }
        let mut a: Vec<usize> = (0..n).collect();
        let mut out = Vec::new();
        heap(n, &mut a, &mut out);
        out
    }

    fn brute_aut(h: &TripleSystem) -> u64 {
        permutations(h.n()).iter().filter(|p| &h.relabel(p) == h).count() as u64
    }

    #[test]
    fn f5_has_four_automorphisms() {
        assert_eq!(brute_aut(&f5()), 4);
        assert_eq!(canonical_form(&f5()).unwrap().aut_order, 4);
    }

    #[test]
    fn symmetric_systems() {
        assert_eq!(canonical_form(&TripleSystem::complete(4)).unwrap().aut_order, 24);
        assert_eq!(canonical_form(&TripleSystem::empty(4)).unwrap().aut_order, 24);
        assert_eq!(canonical_form(&TripleSystem::empty(0)).unwrap().aut_order, 1);
    }

    #[test]
    fn labeled_counts() {
        use std::collections::HashSet;
        let images: HashSet<TripleSystem> = permutations(5).iter().map(|p| f5().relabel(p)).collect();
        assert_eq!(images.len(), 30);
        assert_eq!(labeled_count(&f5()).unwrap(), 30);
        assert_eq!(labeled_count(&TripleSystem::empty(4)).unwrap(), 1);
        assert_eq!(
            labeled_count(&TripleSystem::from_one_based(3, &[[1, 2, 3]])).unwrap(),
            1
        );
    }

    #[test]
    fn isomorphism_examples() {
        let relabeled = TripleSystem::from_one_based(5, &[[1, 2, 3], [1, 4, 5], [2, 4, 5]]);
        assert!(is_isomorphic(&f5(), &relabeled));
        let k4m = TripleSystem::from_one_based(4, &[[1, 2, 3], [1, 2, 4], [2, 3, 4]]);
        assert!(!is_isomorphic(&f5(), &k4m));
        assert!(is_isomorphic(&TripleSystem::empty(4), &TripleSystem::empty(4)));
    }

    #[test]
    fn canonical_size_bound() {
        assert!(matches!(
            canonical_form(&TripleSystem::empty(11)),
            Err(Error::UnsupportedSize { n: 11, .. })
        ));
        assert!(canonical_form_bounded(&TripleSystem::empty(11), 11).is_ok());
    }

    #[test]
    fn aut_order_matches_brute_force_on_all_systems_n5() {
        for mask in (0u64..1 << 10).step_by(7) {
            let h = TripleSystem::from_mask(5, mask);
            let cf = canonical_form(&h).unwrap();
            assert_eq!(cf.aut_order, brute_aut(&h), "{h:?}");
            assert_eq!(120 % cf.aut_order, 0);
        }
    }

    #[test]
    fn deletion_edge_belongs_to_system() {
        let h = f5();
        let cf = canonical_form(&h).unwrap();
        let d = cf.deletion_edge().unwrap();
        assert!(h.contains(d));
        assert!(canonical_form(&TripleSystem::empty(3))
            .unwrap()
            .deletion_edge()
            .is_none());
    }
}
