use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::{recover_partition, Partition3};
use crate::report::{RunReport, Table};
use crate::system::{slot_count, Triple, TripleSystem, MAX_VERTICES};

use super::{mask_of, random_subset, substream, GENERATOR};

/// A tripartite system whose crossing triples were each kept with probability `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedSample {
    pub system: TripleSystem,
    pub planted: Partition3,
    pub p: f64,
    pub seed: u64,
}

/// Parts of sizes `⌊(n+2)/3⌋, ⌊(n+1)/3⌋, ⌊n/3⌋`, assigned to a random
/// permutation of the vertices.
pub fn sample_planted(n: usize, p: f64, seed: u64) -> Result<PlantedSample> {
    let mut rng = substream(seed, 0);
    let (system, planted) = sample_planted_with(n, p, &mut rng)?;
    Ok(PlantedSample {
        system,
        planted,
        p,
        seed,
    })
}

pub(crate) fn sample_planted_with<R: Rng>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<(TripleSystem, Partition3)> {
    if !(3..=MAX_VERTICES).contains(&n) {
        return Err(Error::Domain(format!(
            "planted sample needs 3 <= n <= {MAX_VERTICES}, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability {p} outside [0, 1]")));
    }
    let sizes = [n.div_ceil(3), (n + 1) / 3, n / 3];
    let mut labels: Vec<u8> = sizes
        .iter()
        .enumerate()
        .flat_map(|(part, &s)| std::iter::repeat_n(part as u8, s))
        .collect();
    labels.shuffle(rng);
    let planted = Partition3::new(labels)?;
    let mut system = TripleSystem::empty(n);
    for r in 0..slot_count(n) {
        let t = Triple::unrank(r);
        if planted.is_crossing(t) && rng.random_bool(p) {
            system.insert(t);
        }
    }
    Ok((system, planted))
}

#[derive(Clone, Debug)]
pub struct UniquePartitionConfig {
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Random `(A_i, A_j, v)` probes of the second condition per trial.
    pub condition_samples: usize,
    /// Pass threshold for the recovery and first-condition rates.
    pub min_rate: f64,
}

impl UniquePartitionConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        UniquePartitionConfig {
            n,
            p: 0.5,
            trials,
            seed,
            condition_samples: 200,
            min_rate: 0.95,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub recovered: bool,
    pub condition_i: bool,
    /// Crossing pairs `(u, v)` with `|L_{U_l}(u, v)| > n/10`, and all crossing pairs.
    pub condition_i_pairs: (usize, usize),
    /// Probes of the second condition that found a violation.
    pub condition_ii_failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquePartitionOutcome {
    pub trials: Vec<TrialResult>,
}

impl UniquePartitionOutcome {
    pub fn recovered(&self) -> usize {
        self.trials.iter().filter(|t| t.recovered).count()
    }

    pub fn condition_i_held(&self) -> usize {
        self.trials.iter().filter(|t| t.condition_i).count()
    }

    /// Fraction of crossing pairs, over all trials, whose link into the third
    /// part exceeds `n/10`.
    pub fn condition_i_pair_rate(&self) -> f64 {
        let (ok, all) = self.trials.iter().fold((0, 0), |(a, b), t| {
            (a + t.condition_i_pairs.0, b + t.condition_i_pairs.1)
        });
        if all == 0 {
            1.0
        } else {
            ok as f64 / all as f64
        }
    }

    pub fn condition_ii_clean(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.condition_ii_failures == 0)
            .count()
    }
}

/// Counts crossing pairs `u ∈ U_i, v ∈ U_j` with `|L_{U_l}(u, v)| > n/10`.
fn condition_i_pairs(h: &TripleSystem, p: &Partition3) -> (usize, usize) {
    let n = h.n();
    let links = h.links();
    let masks = p.masks();
    let (mut ok, mut all) = (0, 0);
    for u in 0..n {
        for v in u + 1..n {
            let (pu, pv) = (p.part(u), p.part(v));
            if pu != pv {
                all += 1;
                ok += (10 * (links.get(u, v) & masks[3 - pu - pv]).count_ones() as usize > n) as usize;
            }
        }
    }
    (ok, all)
}

/// Random probes: `A_i ⊆ U_i`, `A_j ⊆ U_j` with `|A| > n/10`, `v ∈ U_l`; the
/// edges `{a, b, v}` with `a ∈ A_i, b ∈ A_j` must number at least `|A_i||A_j|/10`.
fn condition_ii_failures<R: Rng>(h: &TripleSystem, p: &Partition3, samples: usize, rng: &mut R) -> usize {
    let n = h.n();
    let links = h.links();
    let parts: Vec<Vec<usize>> = (0..3)
        .map(|q| (0..n).filter(|&v| p.part(v) == q).collect())
        .collect();
    let min = n / 10 + 1;
    let mut failures = 0;
    for s in 0..samples {
        let l = s % 3;
        let (i, j) = ((l + 1) % 3, (l + 2) % 3);
        if parts[i].len() < min || parts[j].len() < min || parts[l].is_empty() {
            continue;
        }
        let ai = random_subset(rng, &parts[i], min);
        let aj = random_subset(rng, &parts[j], min);
        let v = parts[l][rng.random_range(0..parts[l].len())];
        let aj_mask = mask_of(&aj);
        let count: usize = ai
            .iter()
            .map(|&a| (links.get(a, v) & aj_mask).count_ones() as usize)
            .sum();
        if 10 * count < ai.len() * aj.len() {
            failures += 1;
        }
    }
    failures
}

/// Samples planted systems, audits the two uniqueness conditions, and checks
/// whether [`recover_partition`] returns the planted partition up to renaming.
pub fn unique_partition_experiment(cfg: &UniquePartitionConfig) -> Result<UniquePartitionOutcome> {
    if cfg.trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(cfg.seed, t);
            let (h, planted) = sample_planted_with(cfg.n, cfg.p, &mut rng)?;
            let recovered = recover_partition(&h).is_some_and(|q| q.same_up_to_renaming(&planted));
            let pairs = condition_i_pairs(&h, &planted);
            Ok(TrialResult {
                recovered,
                condition_i: pairs.0 == pairs.1,
                condition_i_pairs: pairs,
                condition_ii_failures: condition_ii_failures(&h, &planted, cfg.condition_samples, &mut rng),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UniquePartitionOutcome { trials })
}

impl UniquePartitionOutcome {
    pub fn report(&self, cfg: &UniquePartitionConfig) -> RunReport {
        let mut r = RunReport::new("experiment unique-partition");
        r.param("n", cfg.n)
            .param("p", cfg.p)
            .param("trials", cfg.trials)
            .param("seed", cfg.seed)
            .param("condition_samples", cfg.condition_samples)
            .param("min_rate", cfg.min_rate)
            .param("generator", GENERATOR);
        let total = self.trials.len();
        let need = (cfg.min_rate * total as f64).ceil() as usize;
        let mut table = Table::new(
            "trials",
            &[
                "trial",
                "recovered",
                "condition_i",
                "condition_i_pairs",
                "condition_ii_failures",
            ],
        );
        for (t, tr) in self.trials.iter().enumerate() {
            table.push([
                t.to_string(),
                tr.recovered.to_string(),
                tr.condition_i.to_string(),
                format!("{}/{}", tr.condition_i_pairs.0, tr.condition_i_pairs.1),
                tr.condition_ii_failures.to_string(),
            ]);
        }
        r.table(table);
        r.check(
            "recovery rate",
            self.recovered() >= need,
            format!(
                "{}/{} recovered (threshold {need}, artifact convention)",
                self.recovered(),
                total
            ),
        );
        r.observe(
            "condition (i) rate",
            format!(
                "{}/{} trials with every crossing-pair link > n/10",
                self.condition_i_held(),
                total
            ),
        );
        r.observe(
            "condition (i) pair rate",
            format!("{:.6}", self.condition_i_pair_rate()),
        );
        r.observe(
            "condition (ii) probes",
            format!(
                "{}/{} trials with no violating probe (sampled, not a proof)",
                self.condition_ii_clean(),
                total
            ),
        );
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::s;
    use crate::partition::non_crossing_count;

    #[test]
    fn extreme_probabilities() {
        let full = sample_planted(9, 1.0, 4).unwrap();
        assert_eq!(full.system.edge_count() as u64, s(9));
        assert_eq!(full.planted.part_sizes(), [3, 3, 3]);
        assert!(sample_planted(9, 0.0, 4).unwrap().system.is_empty());
        assert!(sample_planted(2, 0.5, 0).is_err());
        assert!(sample_planted(9, 1.5, 0).is_err());
    }

    #[test]
    fn planted_sample_is_deterministic_and_crossing() {
        let a = sample_planted(20, 0.5, 11).unwrap();
        let b = sample_planted(20, 0.5, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(non_crossing_count(&a.system, &a.planted), 0);
        assert_eq!(a.planted.part_sizes(), [7, 7, 6]);
    }

    #[test]
    fn edge_count_follows_binomial_model() {
        // s(30) = 1000 crossing slots; mean 500, sd = sqrt(250).
        let sd = 250f64.sqrt();
        for seed in 0..100 {
            let m = sample_planted(30, 0.5, seed).unwrap().system.edge_count() as f64;
            assert!((m - 500.0).abs() <= 4.0 * sd, "seed {seed}: {m}");
        }
    }

    #[test]
    fn complete_tripartite_always_recovers() {
        let mut cfg = UniquePartitionConfig::new(12, 20, 5);
        cfg.p = 1.0;
        let out = unique_partition_experiment(&cfg).unwrap();
        assert_eq!(out.recovered(), 20);
        assert_eq!(out.condition_i_held(), 20);
    }

    #[test]
    fn small_n_is_reported_not_asserted() {
        let out = unique_partition_experiment(&UniquePartitionConfig::new(9, 100, 1)).unwrap();
        assert!(out.recovered() < 100);
        let report = out.report(&UniquePartitionConfig::new(9, 100, 1));
        assert!(report.find("recovery rate").is_some());
    }
}
