//! Auditing the four lower-density conditions of a 3-partition `U_1, U_2, U_3`
//! and the per-vertex link bounds for bad edges.
//!
//! The conditions quantify over all large subsets, pair sets and matchings,
//! so most verdicts come from refutation search: a `SampledPass` only means
//! no counterexample was drawn.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{link_profile, Partition3};
use crate::system::{bits, LinkTable, TripleSystem};

use super::planted::PlantedSample;
use super::{mask_of, random_subset, substream};

/// Exact mode: no part may exceed this many vertices.
pub const EXACT_PART_LIMIT: usize = 15;
/// Exact mode enumerates all subset pairs of the two smallest parts, so their
/// sizes may sum to at most this.
pub const EXACT_PAIR_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    Exact,
    Sampled,
}

/// Sets that violate one condition. Vertices are 0-indexed; parts are 0..=2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DensityWitness {
    /// Condition (i): `count <= |A_1||A_2||A_3| / 8`.
    Triple { sets: [Vec<usize>; 3], count: usize },
    /// Condition (ii): `count <= |A_i||G| / 8` for `G ⊆ U_j × U_l`.
    PairSet {
        part: usize,
        set: Vec<usize>,
        pairs: Vec<(usize, usize)>,
        count: usize,
    },
    /// Condition (iii): `count < |A_i||A_j||G| / 128` for a matching `G` on `U_l`.
    Matching {
        parts: (usize, usize),
        sets: (Vec<usize>, Vec<usize>),
        matching: Vec<(usize, usize)>,
        count: usize,
    },
    /// Condition (iv): `||U_i| - n/3| >= mu n`.
    PartSize { part: usize, size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ConditionVerdict {
    /// Exhaustively checked (or the quantifier range is empty).
    Verified,
    Refuted(DensityWitness),
    SampledPass {
        trials: usize,
    },
}

impl ConditionVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, ConditionVerdict::Refuted(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityAudit {
    pub mu: f64,
    pub mode: AuditMode,
    pub conditions: [ConditionVerdict; 4],
}

fn min_size(mu: f64, n: usize) -> usize {
    (mu * n as f64).ceil().max(0.0) as usize
}

fn count_triple(links: &LinkTable, sets: &[Vec<usize>; 3]) -> usize {
    let c_mask = mask_of(&sets[2]);
    sets[0]
        .iter()
        .flat_map(|&a| sets[1].iter().map(move |&b| (a, b)))
        .map(|(a, b)| (links.get(a, b) & c_mask).count_ones() as usize)
        .sum()
}

fn count_pairs(links: &LinkTable, set: &[usize], pairs: &[(usize, usize)]) -> usize {
    let m = mask_of(set);
    pairs
        .iter()
        .map(|&(x, y)| (links.get(x, y) & m).count_ones() as usize)
        .sum()
}

fn count_matching(links: &LinkTable, a: &[usize], b: &[usize], matching: &[(usize, usize)]) -> usize {
    let mut count = 0;
    for &x in a {
        for &y in b {
            let l = links.get(x, y);
            count += matching
                .iter()
                .filter(|&&(u, v)| l >> u & 1 == 1 && l >> v & 1 == 1)
                .count();
        }
    }
    count
}

impl DensityWitness {
    /// Recomputes the witness count from `h` and confirms it violates its
    /// condition, including the size requirements on the sets.
    pub fn revalidate(&self, h: &TripleSystem, p: &Partition3, mu: f64) -> bool {
        let n = h.n();
        let k = min_size(mu, n);
        let links = h.links();
        let within = |set: &[usize], part: usize| set.iter().all(|&v| v < n && p.part(v) == part);
        match self {
            DensityWitness::Triple { sets, count } => {
                (0..3).all(|q| within(&sets[q], q) && sets[q].len() >= k)
                    && *count == count_triple(&links, sets)
                    && 8 * count <= sets[0].len() * sets[1].len() * sets[2].len()
            }
            DensityWitness::PairSet {
                part,
                set,
                pairs,
                count,
            } => {
                let (j, l) = ((part + 1) % 3, (part + 2) % 3);
                let g_min = (mu * mu * (n * n) as f64).ceil() as usize;
                let mut sorted = pairs.clone();
                sorted.sort_unstable();
                sorted.dedup();
                within(set, *part)
                    && set.len() >= k
                    && sorted.len() == pairs.len()
                    && pairs.len() >= g_min
                    && pairs.iter().all(|&(x, y)| p.part(x) == j && p.part(y) == l)
                    && *count == count_pairs(&links, set, pairs)
                    && 8 * count <= set.len() * pairs.len()
            }
            DensityWitness::Matching {
                parts: (i, j),
                sets: (a, b),
                matching,
                count,
            } => {
                let l = 3 - i - j;
                let mut seen = 0u64;
                let is_matching = matching.iter().all(|&(u, v)| {
                    let ok = u != v && p.part(u) == l && p.part(v) == l && seen & (1 << u | 1 << v) == 0;
                    seen |= 1 << u | 1 << v;
                    ok
                });
                i != j
                    && within(a, *i)
                    && within(b, *j)
                    && a.len() >= k
                    && b.len() >= k
                    && is_matching
                    && matching.len() >= k
                    && *count == count_matching(&links, a, b, matching)
                    && 128 * count < a.len() * b.len() * matching.len()
            }
            DensityWitness::PartSize { part, size } => {
                *size == p.part_sizes()[*part] && (3.0 * *size as f64 - n as f64).abs() >= 3.0 * mu * n as f64
            }
        }
    }
}

/// Audits the lower-density conditions of `sample.planted` for `sample.system`.
///
/// `trials` is the number of random probes per sampled condition. Condition
/// (iv) is always exact; condition (i) is exact in `Exact` mode; (ii) and (iii)
/// are always sampled. For (iii) probes alternate between matchings of size
/// exactly `⌈mu n⌉` and maximal ones.
pub fn density_audit(
    sample: &PlantedSample,
    mu: f64,
    mode: AuditMode,
    trials: usize,
    seed: u64,
) -> Result<DensityAudit> {
    audit_partition(&sample.system, &sample.planted, mu, mode, trials, seed)
}

pub fn audit_partition(
    h: &TripleSystem,
    p: &Partition3,
    mu: f64,
    mode: AuditMode,
    trials: usize,
    seed: u64,
) -> Result<DensityAudit> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let n = h.n();
    let parts: [Vec<usize>; 3] = std::array::from_fn(|q| (0..n).filter(|&v| p.part(v) == q).collect());
    let links = h.links();
    let k = min_size(mu, n);

    let cond_i = match mode {
        AuditMode::Exact => {
            if parts.iter().any(|q| q.len() > EXACT_PART_LIMIT) {
                return Err(Error::UnsupportedSize {
                    what: "exact density audit (part size)",
                    n: parts.iter().map(Vec::len).max().unwrap(),
                    limit: EXACT_PART_LIMIT,
                });
            }
            exact_condition_i(&links, &parts, k)?
        }
        AuditMode::Sampled => sampled_condition_i(&links, &parts, k, trials, seed),
    };
    let cond_ii = sampled_condition_ii(&links, &parts, mu, n, trials, seed);
    let cond_iii = sampled_condition_iii(&links, &parts, k, trials, seed);
    let sizes = p.part_sizes();
    let cond_iv = match (0..3).find(|&q| (3.0 * sizes[q] as f64 - n as f64).abs() >= 3.0 * mu * n as f64) {
        Some(q) => ConditionVerdict::Refuted(DensityWitness::PartSize {
            part: q,
            size: sizes[q],
        }),
        None => ConditionVerdict::Verified,
    };
    Ok(DensityAudit {
        mu,
        mode,
        conditions: [cond_i, cond_ii, cond_iii, cond_iv],
    })
}

fn all_subsets(pool: &[usize], min: usize) -> Vec<Vec<usize>> {
    (0u64..1 << pool.len())
        .filter(|m| m.count_ones() as usize >= min)
        .map(|m| bits(m).map(|i| pool[i]).collect())
        .collect()
}

/// For fixed `A_x, A_y` the count is additive over `A_z`, so the worst `A_z`
/// of size at least `k` takes the `k` smallest per-vertex slacks plus every
/// further negative one. Subsets of the two smallest parts are enumerated.
fn exact_condition_i(links: &LinkTable, parts: &[Vec<usize>; 3], k: usize) -> Result<ConditionVerdict> {
    if parts.iter().any(|q| q.len() < k) {
        return Ok(ConditionVerdict::Verified);
    }
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&q| (parts[q].len(), q));
    let [x, y, z] = order;
    if parts[x].len() + parts[y].len() > EXACT_PAIR_LIMIT {
        return Err(Error::UnsupportedSize {
            what: "exact density audit (two smallest parts combined)",
            n: parts[x].len() + parts[y].len(),
            limit: EXACT_PAIR_LIMIT,
        });
    }
    let xs = all_subsets(&parts[x], k);
    let ys = all_subsets(&parts[y], k);
    let hit = xs.par_iter().find_map_first(|ax| {
        for ay in &ys {
            let ay_mask = mask_of(ay);
            let product = (ax.len() * ay.len()) as i64;
            let mut slack: Vec<(i64, usize)> = parts[z]
                .iter()
                .map(|&w| {
                    let c: usize = ax
                        .iter()
                        .map(|&a| (links.get(a, w) & ay_mask).count_ones() as usize)
                        .sum();
                    (8 * c as i64 - product, w)
                })
                .collect();
            slack.sort_unstable();
            let mut az: Vec<usize> = Vec::new();
            let mut total = 0i64;
            for (i, &(s, w)) in slack.iter().enumerate() {
                if i < k || s < 0 {
                    az.push(w);
                    total += s;
                }
            }
            if total <= 0 {
                az.sort_unstable();
                let mut sets: [Vec<usize>; 3] = Default::default();
                sets[x] = ax.clone();
                sets[y] = ay.clone();
                sets[z] = az;
                let count = count_triple(links, &sets);
                return Some(DensityWitness::Triple { sets, count });
            }
        }
        None
    });
    Ok(hit.map_or(ConditionVerdict::Verified, ConditionVerdict::Refuted))
}

fn sampled_condition_i(
    links: &LinkTable,
    parts: &[Vec<usize>; 3],
    k: usize,
    trials: usize,
    seed: u64,
) -> ConditionVerdict {
    if parts.iter().any(|q| q.len() < k) {
        return ConditionVerdict::Verified;
    }
    let mut rng = substream(seed, 1);
    for _ in 0..trials {
        let sets: [Vec<usize>; 3] = std::array::from_fn(|q| random_subset(&mut rng, &parts[q], k));
        let count = count_triple(links, &sets);
        if 8 * count <= sets[0].len() * sets[1].len() * sets[2].len() {
            return ConditionVerdict::Refuted(DensityWitness::Triple { sets, count });
        }
    }
    ConditionVerdict::SampledPass { trials }
}

fn sampled_condition_ii(
    links: &LinkTable,
    parts: &[Vec<usize>; 3],
    mu: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> ConditionVerdict {
    let k = min_size(mu, n);
    let g_min = (mu * mu * (n * n) as f64).ceil() as usize;
    let mut rng = substream(seed, 2);
    let mut probes = 0;
    for t in 0..trials {
        let i = t % 3;
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        let cross: Vec<(usize, usize)> = parts[j]
            .iter()
            .flat_map(|&a| parts[l].iter().map(move |&b| (a, b)))
            .collect();
        if parts[i].len() < k || cross.len() < g_min.max(1) {
            continue;
        }
        probes += 1;
        let set = random_subset(&mut rng, &parts[i], k);
        let size = rng.random_range(g_min.max(1)..=cross.len());
        let mut pairs = cross;
        pairs.shuffle(&mut rng);
        pairs.truncate(size);
        pairs.sort_unstable();
        let count = count_pairs(links, &set, &pairs);
        if 8 * count <= set.len() * pairs.len() {
            return ConditionVerdict::Refuted(DensityWitness::PairSet {
                part: i,
                set,
                pairs,
                count,
            });
        }
    }
    if probes == 0 {
        ConditionVerdict::Verified
    } else {
        ConditionVerdict::SampledPass { trials: probes }
    }
}

fn sampled_condition_iii(
    links: &LinkTable,
    parts: &[Vec<usize>; 3],
    k: usize,
    trials: usize,
    seed: u64,
) -> ConditionVerdict {
    let mut rng = substream(seed, 3);
    let mut probes = 0;
    for t in 0..trials {
        let l = t % 3;
        let (i, j) = ((l + 1) % 3, (l + 2) % 3);
        let (i, j) = (i.min(j), i.max(j));
        let max_matching = parts[l].len() / 2;
        if parts[i].len() < k || parts[j].len() < k || max_matching < k.max(1) {
            continue;
        }
        probes += 1;
        let a = random_subset(&mut rng, &parts[i], k);
        let b = random_subset(&mut rng, &parts[j], k);
        let size = if (t / 3) % 2 == 0 { k.max(1) } else { max_matching };
        let mut pool = parts[l].clone();
        pool.shuffle(&mut rng);
        let matching: Vec<(usize, usize)> = pool
            .chunks_exact(2)
            .take(size)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        let count = count_matching(links, &a, &b, &matching);
        if 128 * count < a.len() * b.len() * matching.len() {
            return ConditionVerdict::Refuted(DensityWitness::Matching {
                parts: (i, j),
                sets: (a, b),
                matching,
                count,
            });
        }
    }
    if probes == 0 {
        ConditionVerdict::Verified
    } else {
        ConditionVerdict::SampledPass { trials: probes }
    }
}

/// One link class `L_{i,j}(x)` at or above `2 mu n²`, with parts renamed so
/// that `x ∈ U_1` and the others follow cyclically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BadVertexViolation {
    pub vertex: usize,
    /// Class in renamed, 1-based part indices, e.g. `(1, 1)`.
    pub class: (usize, usize),
    pub count: usize,
    pub threshold: f64,
}

/// Checks `|L_{1,1}|, |L_{1,2}|, |L_{2,2}|, |L_{1,3}|, |L_{3,3}| < 2 mu n²` at
/// every vertex. Intended for optimal partitions; not enforced.
pub fn bad_vertex_audit(h: &TripleSystem, p: &Partition3, mu: f64) -> Vec<BadVertexViolation> {
    let n = h.n();
    let threshold = 2.0 * mu * (n * n) as f64;
    let mut out = Vec::new();
    for x in 0..n {
        let profile = link_profile(h, p, x);
        let u1 = p.part(x);
        let renamed = |r: usize| (u1 + r - 1) % 3;
        for (a, b) in [(1, 1), (1, 2), (2, 2), (1, 3), (3, 3)] {
            let count = profile.get(renamed(a), renamed(b));
            if count as f64 >= threshold {
                out.push(BadVertexViolation {
                    vertex: x,
                    class: (a, b),
                    count,
                    threshold,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::optimal_partition;
    use crate::randlab::sample_planted;

    #[test]
    fn complete_tripartite_passes_condition_i_exactly() {
        let s = sample_planted(12, 1.0, 3).unwrap();
        let audit = density_audit(&s, 1.0 / 6.0, AuditMode::Exact, 200, 1).unwrap();
        assert_eq!(audit.conditions[0], ConditionVerdict::Verified);
        assert!(!audit.conditions.iter().any(ConditionVerdict::is_refuted));
    }

    #[test]
    fn empty_system_refutes_condition_i() {
        let mut s = sample_planted(12, 0.0, 3).unwrap();
        s.system = TripleSystem::empty(12);
        for mode in [AuditMode::Exact, AuditMode::Sampled] {
            let audit = density_audit(&s, 0.1, mode, 50, 1).unwrap();
            match &audit.conditions[0] {
                ConditionVerdict::Refuted(w) => assert!(w.revalidate(&s.system, &s.planted, 0.1)),
                other => panic!("expected refutation, got {other:?}"),
            }
            for c in &audit.conditions[1..3] {
                if let ConditionVerdict::Refuted(w) = c {
                    assert!(w.revalidate(&s.system, &s.planted, 0.1));
                }
            }
        }
    }

    #[test]
    fn part_size_condition() {
        let h = TripleSystem::empty(9);
        let p = Partition3::new(vec![0, 0, 0, 0, 0, 0, 0, 1, 2]).unwrap();
        let audit = audit_partition(&h, &p, 0.1, AuditMode::Sampled, 10, 0).unwrap();
        match &audit.conditions[3] {
            ConditionVerdict::Refuted(w) => assert!(w.revalidate(&h, &p, 0.1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_mode_size_limits() {
        let s = sample_planted(45, 0.5, 0).unwrap();
        assert!(matches!(
            density_audit(&s, 0.1, AuditMode::Exact, 10, 0),
            Err(Error::UnsupportedSize { .. })
        ));
        let s = sample_planted(48, 0.5, 0).unwrap();
        assert!(density_audit(&s, 0.1, AuditMode::Exact, 10, 0).is_err());
    }

    #[test]
    fn exact_condition_i_agrees_with_full_enumeration() {
        // Three parts of sizes 3, 3, 3: compare with a direct loop over all A_3.
        for seed in 0..10 {
            let s = sample_planted(9, 0.35, seed).unwrap();
            let p = &s.planted;
            let links = s.system.links();
            let parts: [Vec<usize>; 3] =
                std::array::from_fn(|q| (0..9).filter(|&v| p.part(v) == q).collect());
            let k = 2;
            let mut refuted = false;
            for a in all_subsets(&parts[0], k) {
                for b in all_subsets(&parts[1], k) {
                    for c in all_subsets(&parts[2], k) {
                        let sets = [a.clone(), b.clone(), c];
                        if 8 * count_triple(&links, &sets) <= sets[0].len() * sets[1].len() * sets[2].len() {
                            refuted = true;
                        }
                    }
                }
            }
            let got = exact_condition_i(&links, &parts, k).unwrap();
            assert_eq!(got.is_refuted(), refuted, "seed {seed}");
            if let ConditionVerdict::Refuted(w) = got {
                assert!(w.revalidate(&s.system, p, 2.0 / 9.0));
            }
        }
    }

    #[test]
    fn bad_vertex_examples() {
        let s = sample_planted(15, 0.5, 2).unwrap();
        assert!(bad_vertex_audit(&s.system, &s.planted, 0.01).is_empty());

        let n = 10;
        let p = Partition3::new(vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2]).unwrap();
        let h = TripleSystem::from_edges(n, [[0, 1, 2], [0, 1, 3], [0, 2, 3]]).unwrap();
        let v = bad_vertex_audit(&h, &p, 0.01);
        assert!(v
            .iter()
            .any(|b| b.vertex == 0 && b.class == (1, 1) && b.count == 3));

        let f5 = TripleSystem::from_one_based(5, &[[1, 2, 3], [1, 2, 4], [3, 4, 5]]);
        let opt = optimal_partition(&f5).unwrap();
        let v = bad_vertex_audit(&f5, &opt.partition, 0.01);
        assert!(!v.is_empty());
        assert!(v.iter().all(|b| b.count >= 1 && b.threshold == 0.5));
    }
}
