//! Exact counting: a brute-force oracle over every edge subset, isomorph-free
//! generation by canonical augmentation, orbit-weighted labeled totals, and
//! extremal numbers by branch and bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::canon::{canonical_form, factorial};
use crate::error::{Error, Result};
use crate::partition::is_tripartite;
use crate::patterns::{contains_f5, contains_k4minus, f5_through, is_cancellative, k4minus_through};
use crate::system::{slot_count, Triple, TripleSystem};

/// Largest `n` for the brute-force oracle (`2^C(6,3) = 2^20` subsets).
pub const BRUTE_FORCE_MAX_N: usize = 6;
/// Largest `n` accepted by [`generate_isofree`].
pub const GENERATE_MAX_N: usize = 8;
/// Largest `n` accepted by [`extremal_number`].
pub const EXTREMAL_MAX_N: usize = 7;
pub const DEFAULT_EXTREMAL_BUDGET: u64 = 2_000_000_000;

/// A property of triple systems that the engines can count.
pub trait SystemPredicate: Sync {
    fn name(&self) -> String;

    /// Closed under deleting edges.
    fn is_hereditary(&self) -> bool;

    fn accepts(&self, h: &TripleSystem) -> bool;

    /// Decides `accepts(h)` given that `h - e` is accepted.
    fn accepts_extension(&self, h: &TripleSystem, _e: Triple) -> bool {
        self.accepts(h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    All,
    F5Free,
    K4MinusFree,
    Cancellative,
    Tripartite,
}

impl Predicate {
    pub const ALL: [Predicate; 5] = [
        Predicate::All,
        Predicate::F5Free,
        Predicate::K4MinusFree,
        Predicate::Cancellative,
        Predicate::Tripartite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::All => "all",
            Predicate::F5Free => "f5free",
            Predicate::K4MinusFree => "k4mfree",
            Predicate::Cancellative => "cancellative",
            Predicate::Tripartite => "tripartite",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Predicate::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown predicate `{s}`")))
    }
}

impl Serialize for Predicate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl SystemPredicate for Predicate {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn is_hereditary(&self) -> bool {
        true
    }

    fn accepts(&self, h: &TripleSystem) -> bool {
        match self {
            Predicate::All => true,
            Predicate::F5Free => contains_f5(h).is_none(),
            Predicate::K4MinusFree => contains_k4minus(h).is_none(),
            Predicate::Cancellative => is_cancellative(h),
            Predicate::Tripartite => is_tripartite(h),
        }
    }

    fn accepts_extension(&self, h: &TripleSystem, e: Triple) -> bool {
        match self {
            Predicate::All => true,
            Predicate::F5Free => f5_through(h, e).is_none(),
            Predicate::K4MinusFree => k4minus_through(h, e).is_none(),
            Predicate::Cancellative => f5_through(h, e).is_none() && k4minus_through(h, e).is_none(),
            Predicate::Tripartite => is_tripartite(h),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub f5free: bool,
    pub k4mfree: bool,
    pub cancellative: bool,
    pub tripartite: bool,
}

impl Flags {
    pub fn of(h: &TripleSystem) -> Flags {
        Flags {
            f5free: contains_f5(h).is_none(),
            k4mfree: contains_k4minus(h).is_none(),
            cancellative: is_cancellative(h),
            tripartite: is_tripartite(h),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.cancellative == (self.f5free && self.k4mfree) && (!self.tripartite || self.cancellative)
    }

    pub fn satisfies(&self, p: Predicate) -> bool {
        match p {
            Predicate::All => true,
            Predicate::F5Free => self.f5free,
            Predicate::K4MinusFree => self.k4mfree,
            Predicate::Cancellative => self.cancellative,
            Predicate::Tripartite => self.tripartite,
        }
    }
}

/// One isomorphism class: its canonical representative and orbit data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumRecord {
    pub key: TripleSystem,
    pub edge_count: usize,
    pub aut_order: u64,
    pub flags: Flags,
}

impl EnumRecord {
    pub fn from_canonical(key: TripleSystem, aut_order: u64) -> EnumRecord {
        EnumRecord {
            edge_count: key.edge_count(),
            flags: Flags::of(&key),
            key,
            aut_order,
        }
    }

    /// Number of labeled systems in this class, `n! / |Aut|`.
    pub fn labeled_weight(&self) -> u64 {
        factorial(self.key.n()) / self.aut_order
    }
}

fn serialize_u128<S: Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_opt_u64<S: Serializer>(v: &Option<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HistogramEntry {
    #[serde(serialize_with = "serialize_u128")]
    pub labeled: u128,
    #[serde(serialize_with = "serialize_opt_u64")]
    pub unlabeled: Option<u64>,
}

/// Exact totals for one `(n, predicate)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub n: usize,
    pub predicate: String,
    #[serde(serialize_with = "serialize_u128")]
    pub labeled_total: u128,
    /// Number of isomorphism classes; unknown for the brute-force oracle.
    #[serde(serialize_with = "serialize_opt_u64")]
    pub unlabeled_total: Option<u64>,
    /// Keyed by edge count.
    pub histogram: BTreeMap<usize, HistogramEntry>,
}

impl CountTable {
    pub fn from_records(n: usize, predicate: &str, records: &[EnumRecord]) -> CountTable {
        let mut histogram: BTreeMap<usize, HistogramEntry> = BTreeMap::new();
        for r in records {
            let entry = histogram.entry(r.edge_count).or_default();
            entry.labeled += r.labeled_weight() as u128;
            *entry.unlabeled.get_or_insert(0) += 1;
        }
        CountTable {
            n,
            predicate: predicate.to_string(),
            labeled_total: labeled_total(records),
            unlabeled_total: Some(records.len() as u64),
            histogram,
        }
    }

    pub fn histogram_total(&self) -> u128 {
        self.histogram.values().map(|e| e.labeled).sum()
    }
}

/// Tests `predicate` on every edge subset of `K_n^(3)` with its full
/// (non-incremental) check.
pub fn brute_force_count(n: usize, predicate: &dyn SystemPredicate) -> Result<CountTable> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::UnsupportedSize {
            what: "brute-force count",
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let slots = slot_count(n);
    let total: u64 = 1 << slots;
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<u128>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u128; slots + 1];
            for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let h = TripleSystem::from_mask(n, mask);
                if predicate.accepts(&h) {
                    hist[mask.count_ones() as usize] += 1;
                }
            }
            hist
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for m in 0..=slots {
        let labeled: u128 = per_chunk.iter().map(|h| h[m]).sum();
        if labeled > 0 {
            histogram.insert(
                m,
                HistogramEntry {
                    labeled,
                    unlabeled: None,
                },
            );
        }
    }
    Ok(CountTable {
        n,
        predicate: predicate.name(),
        labeled_total: histogram.values().map(|e| e.labeled).sum(),
        unlabeled_total: None,
        histogram,
    })
}

/// One representative per isomorphism class of systems on `n` vertices that
/// satisfy a hereditary `predicate`, sorted by `(edge_count, key)`.
///
/// Generation adds one edge at a time starting from the empty system. A child
/// `g = h + e` is kept only if deleting the canonical deletion edge of `g`
/// gives a system isomorphic to `h`; this fixes a unique parent class for
/// every class, and children of one parent are deduplicated by key.
pub fn generate_isofree(n: usize, predicate: &dyn SystemPredicate) -> Result<Vec<EnumRecord>> {
    if !predicate.is_hereditary() {
        return Err(Error::NotHereditary(predicate.name()));
    }
    if n > GENERATE_MAX_N {
        return Err(Error::UnsupportedSize {
            what: "isomorph-free generation",
            n,
            limit: GENERATE_MAX_N,
        });
    }
    let root = TripleSystem::empty(n);
    let cf = canonical_form(&root)?;
    let mut out = expand(cf.key, cf.aut_order, predicate)?;
    out.sort_by(|a, b| (a.edge_count, &a.key).cmp(&(b.edge_count, &b.key)));
    Ok(out)
}

fn expand(parent: TripleSystem, aut_order: u64, predicate: &dyn SystemPredicate) -> Result<Vec<EnumRecord>> {
    let mut verdicts: HashMap<TripleSystem, bool> = HashMap::new();
    let mut children = Vec::new();
    for e in parent.non_edges() {
        let child = parent.with_edge(e);
        if !predicate.accepts_extension(&child, e) {
            continue;
        }
        let cf = canonical_form(&child)?;
        if verdicts.contains_key(&cf.key) {
            continue;
        }
        let del = cf.deletion_edge().expect("child has an edge");
        let accepted = del == e || canonical_form(&child.without_edge(del))?.key == parent;
        if accepted {
            children.push((cf.key.clone(), cf.aut_order));
        }
        verdicts.insert(cf.key, accepted);
    }
    let nested: Vec<Vec<EnumRecord>> = children
        .into_par_iter()
        .map(|(key, aut)| expand(key, aut, predicate))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(1 + nested.iter().map(Vec::len).sum::<usize>());
    out.push(EnumRecord::from_canonical(parent, aut_order));
    out.extend(nested.into_iter().flatten());
    Ok(out)
}

/// `Σ n! / |Aut|` over pairwise non-isomorphic records.
pub fn labeled_total(records: &[EnumRecord]) -> u128 {
    records.iter().map(|r| r.labeled_weight() as u128).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalResult {
    pub n: usize,
    pub predicate: String,
    pub max_edges: usize,
    pub witness: TripleSystem,
    pub nodes: u64,
}

pub fn extremal_number(n: usize, predicate: Predicate) -> Result<ExtremalResult> {
    extremal_number_with_budget(n, predicate, DEFAULT_EXTREMAL_BUDGET)
}

/// Maximum edge count over systems satisfying `predicate`, by branching on
/// triple slots in colex order with incremental pattern checks. The first
/// slot is forced in whenever it can be, since any nonempty system has a
/// relabeling containing `{1, 2, 3}`.
pub fn extremal_number_with_budget(n: usize, predicate: Predicate, budget: u64) -> Result<ExtremalResult> {
    if n > EXTREMAL_MAX_N {
        return Err(Error::UnsupportedSize {
            what: "extremal number",
            n,
            limit: EXTREMAL_MAX_N,
        });
    }
    let mut search = ExtremalSearch {
        slots: slot_count(n),
        predicate,
        current: TripleSystem::empty(n),
        best: TripleSystem::empty(n),
        best_count: 0,
        nodes: 0,
        budget,
        exhausted: false,
    };
    if search.slots > 0 {
        let first = Triple::unrank(0);
        search.current.insert(first);
        search.branch(1, 1);
    }
    if search.exhausted {
        return Err(Error::BudgetExceeded {
            nodes: search.nodes,
            best: search.best_count,
        });
    }
    Ok(ExtremalResult {
        n,
        predicate: predicate.to_string(),
        max_edges: search.best_count,
        witness: search.best,
        nodes: search.nodes,
    })
}

struct ExtremalSearch {
    slots: usize,
    predicate: Predicate,
    current: TripleSystem,
    best: TripleSystem,
    best_count: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl ExtremalSearch {
    fn branch(&mut self, slot: usize, count: usize) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if count > self.best_count {
            self.best_count = count;
            self.best = self.current.clone();
        }
        if slot == self.slots || count + (self.slots - slot) <= self.best_count {
            return;
        }
        let t = Triple::unrank(slot);
        self.current.insert(t);
        if self.predicate.accepts_extension(&self.current, t) {
            self.branch(slot + 1, count + 1);
        }
        self.current.remove(t);
        self.branch(slot + 1, count);
    }
}
