use proptest::prelude::*;

use triplesys::canon::{canonical_form, is_isomorphic, labeled_count};
use triplesys::enumerate::{brute_force_count, generate_isofree, labeled_total, Predicate};
use triplesys::partition::{non_crossing_count, optimal_partition, tripartition};
use triplesys::patterns::{contains_f5, contains_k4minus, is_cancellative};
use triplesys::system::{slot_count, TripleSystem};

fn system_on(n: usize) -> impl Strategy<Value = TripleSystem> {
    prop::collection::vec(any::<bool>(), slot_count(n)).prop_map(move |bits| {
        let complete = TripleSystem::complete(n);
        let edges = complete
            .edges()
            .zip(bits)
            .filter(|(_, keep)| *keep)
            .map(|(t, _)| t.vertices());
        TripleSystem::from_edges(n, edges).unwrap()
    })
}

fn system(max_n: usize) -> impl Strategy<Value = TripleSystem> {
    (0..=max_n).prop_flat_map(system_on)
}

fn with_permutation(max_n: usize) -> impl Strategy<Value = (TripleSystem, Vec<usize>)> {
    system(max_n).prop_flat_map(|h| {
        let n = h.n();
        (Just(h), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #[test]
    fn text_format_round_trips(h in system(8)) {
        let text = h.serialize();
        prop_assert_eq!(TripleSystem::parse(&text).unwrap(), h);
    }

    #[test]
    fn canonical_key_ignores_labels((h, perm) in with_permutation(8)) {
        let g = h.relabel(&perm);
        let (a, b) = (canonical_form(&h).unwrap(), canonical_form(&g).unwrap());
        prop_assert_eq!(&a.key, &b.key);
        prop_assert_eq!(a.aut_order, b.aut_order);
        prop_assert_eq!(h.relabel(&a.labeling), a.key);
        prop_assert!(is_isomorphic(&h, &g));
    }

    #[test]
    fn keys_decide_isomorphism((a, b) in (0..=5usize).prop_flat_map(|n| (system_on(n), system_on(n)))) {
        let same_key = canonical_form(&a).unwrap().key == canonical_form(&b).unwrap().key;
        prop_assert_eq!(same_key, is_isomorphic(&a, &b));
    }

    #[test]
    fn predicates_ignore_labels((h, perm) in with_permutation(7)) {
        let g = h.relabel(&perm);
        prop_assert_eq!(contains_f5(&h).is_some(), contains_f5(&g).is_some());
        prop_assert_eq!(contains_k4minus(&h).is_some(), contains_k4minus(&g).is_some());
        prop_assert_eq!(is_cancellative(&h), is_cancellative(&g));
        prop_assert_eq!(is_cancellative(&h), contains_f5(&h).is_none() && contains_k4minus(&h).is_none());
    }

    #[test]
    fn optimal_partition_is_consistent((h, perm) in with_permutation(9)) {
        let best = optimal_partition(&h).unwrap();
        prop_assert_eq!(non_crossing_count(&h, &best.partition), best.bad_count);
        prop_assert_eq!(optimal_partition(&h.relabel(&perm)).unwrap().bad_count, best.bad_count);
        prop_assert_eq!(tripartition(&h).is_some(), best.bad_count == 0);
    }

    #[test]
    fn orbit_size_divides_factorial(h in system(7)) {
        let cf = canonical_form(&h).unwrap();
        let orbit = labeled_count(&h).unwrap();
        prop_assert_eq!(orbit * cf.aut_order, (1..=h.n() as u64).product::<u64>());
    }
}

#[test]
fn keys_decide_isomorphism_exhaustively() {
    for n in 0..=4 {
        let all: Vec<TripleSystem> = (0..1u64 << slot_count(n))
            .map(|m| TripleSystem::from_mask(n, m))
            .collect();
        let keys: Vec<TripleSystem> = all.iter().map(|h| canonical_form(h).unwrap().key).collect();
        for i in 0..all.len() {
            for j in 0..all.len() {
                assert_eq!(
                    keys[i] == keys[j],
                    is_isomorphic(&all[i], &all[j]),
                    "n={n} {i} {j}"
                );
            }
        }
    }
}

#[test]
fn unrestricted_generation_covers_every_subset() {
    for n in 0..=5 {
        let total = labeled_total(&generate_isofree(n, &Predicate::All).unwrap());
        assert_eq!(total, 1u128 << slot_count(n), "n={n}");
    }
}

/// Tripartite systems are exactly the subsets of some partition's crossing
/// set; counts the union of those down-sets directly.
fn subset_closure_count(n: usize) -> u128 {
    let mut crossing = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let labels: Vec<usize> = (0..n).map(|v| code / 3usize.pow(v as u32) % 3).collect();
        let mut mask = 0u64;
        for (i, t) in TripleSystem::complete(n).edges().enumerate() {
            let [a, b, c] = t.vertices();
            if labels[a] != labels[b] && labels[b] != labels[c] && labels[a] != labels[c] {
                mask |= 1 << i;
            }
        }
        crossing.push(mask);
    }
    crossing.sort_unstable();
    crossing.dedup();
    (0..1u64 << slot_count(n))
        .filter(|m| crossing.iter().any(|c| m & !c == 0))
        .count() as u128
}

#[test]
fn tripartite_counts_match_subset_closure() {
    for n in 3..=6 {
        let expected = subset_closure_count(n);
        assert_eq!(
            brute_force_count(n, &Predicate::Tripartite)
                .unwrap()
                .labeled_total,
            expected,
            "n={n}"
        );
        assert_eq!(
            labeled_total(&generate_isofree(n, &Predicate::Tripartite).unwrap()),
            expected,
            "n={n}"
        );
    }
}
