use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::cache::cache_read;
use crate::enumerate::Predicate;
use crate::error::{Error, Result};
use crate::formulas::chernoff_bound;
use crate::partition::optimal_partition;
use crate::report::{RunReport, Table};

use super::graph::sample_cylinder_with;
use super::{substream, GENERATOR};

/// Triangle counts of `trials` random cylinders with density `1/l`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleOutcome {
    pub l: u64,
    pub m: usize,
    pub theta: f64,
    pub counts: Vec<u64>,
}

impl TriangleOutcome {
    /// `m³ / l³`.
    pub fn expected(&self) -> f64 {
        (self.m as f64 / self.l as f64).powi(3)
    }

    pub fn in_band(&self) -> usize {
        let e = self.expected();
        self.counts
            .iter()
            .filter(|&&c| (c as f64 - e).abs() <= self.theta * e)
            .count()
    }

    pub fn report(&self, seed: u64, min_rate: f64) -> RunReport {
        let mut r = RunReport::new("experiment triangle");
        r.param("l", self.l)
            .param("m", self.m)
            .param("theta", self.theta)
            .param("trials", self.counts.len())
            .param("seed", seed)
            .param("min_rate", min_rate)
            .param("generator", GENERATOR);
        let mut t = Table::new("triangle counts", &["trial", "count", "in_band"]);
        let e = self.expected();
        for (i, &c) in self.counts.iter().enumerate() {
            t.push([
                i.to_string(),
                c.to_string(),
                ((c as f64 - e).abs() <= self.theta * e).to_string(),
            ]);
        }
        r.table(t);
        let need = (min_rate * self.counts.len() as f64).ceil() as usize;
        r.check(
            "in-band fraction",
            self.in_band() >= need,
            format!(
                "{}/{} trials within (1 ± {}) · {} (threshold {need}, artifact convention)",
                self.in_band(),
                self.counts.len(),
                self.theta,
                e
            ),
        );
        if self.l == 1 {
            let exact = (self.m as u64).pow(3);
            r.check(
                "complete cylinder count",
                self.counts.iter().all(|&c| c == exact),
                format!("every trial must count exactly m^3 = {exact}"),
            );
        }
        r
    }
}

pub fn triangle_experiment(l: u64, m: usize, theta: f64, trials: u64, seed: u64) -> Result<TriangleOutcome> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::Domain(format!("theta must be non-negative, got {theta}")));
    }
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t);
            Ok(sample_cylinder_with(l, m, &mut rng)?.triangle_count())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TriangleOutcome { l, m, theta, counts })
}

/// Empirical lower-tail frequency `P(X < pm - a)` for `X ~ Binomial(m, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernoffOutcome {
    pub m: u64,
    pub p: f64,
    pub a: f64,
    pub trials: u64,
    pub hits: u64,
    pub bound: f64,
}

impl ChernoffOutcome {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    /// `bound + 3 sqrt(bound / trials)`.
    pub fn allowance(&self) -> f64 {
        self.bound + 3.0 * (self.bound / self.trials as f64).sqrt()
    }

    pub fn passed(&self) -> bool {
        self.frequency() <= self.allowance()
    }

    pub fn report(&self, seed: u64) -> RunReport {
        let mut r = RunReport::new("experiment chernoff");
        r.param("m", self.m)
            .param("p", self.p)
            .param("a", self.a)
            .param("trials", self.trials)
            .param("seed", seed)
            .param("generator", GENERATOR);
        let mut t = Table::new("tail", &["hits", "frequency", "bound", "allowance"]);
        t.push([
            self.hits.to_string(),
            format!("{:.6}", self.frequency()),
            format!("{:.6e}", self.bound),
            format!("{:.6e}", self.allowance()),
        ]);
        r.table(t);
        r.check(
            "empirical tail within bound",
            self.passed(),
            format!(
                "frequency {:.6} <= exp(-a^2/(2pm)) + 3 sqrt(bound/trials) = {:.6} (slack is an artifact convention)",
                self.frequency(),
                self.allowance()
            ),
        );
        r
    }
}

pub fn chernoff_empirical(m: u64, p: f64, a: f64, trials: u64, seed: u64) -> Result<ChernoffOutcome> {
    let bound = chernoff_bound(m, p, a)?;
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let cutoff = p * m as f64 - a;
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = substream(seed, t);
            let x = (0..m).filter(|_| rng.random_bool(p)).count();
            (x as f64) < cutoff
        })
        .count() as u64;
    Ok(ChernoffOutcome {
        m,
        p,
        a,
        trials,
        hits,
        bound,
    })
}

/// Optimal-partition defect `D_H / n³` over cached F5-free classes with at least
/// `fraction · n³/27` edges. Observational only.
pub fn stability_probe(n: usize, fraction: f64, cache_dir: &Path) -> Result<RunReport> {
    if n > 6 {
        return Err(Error::UnsupportedSize {
            what: "stability probe",
            n,
            limit: 6,
        });
    }
    let (_, records) = cache_read(cache_dir, n, Predicate::F5Free)?;
    let threshold = fraction * (n * n * n) as f64 / 27.0;
    let mut r = RunReport::new("experiment stability");
    r.param("n", n)
        .param("fraction", fraction)
        .param("edge_threshold", format!("{threshold:.4}"));

    let mut table = Table::new(
        "dense F5-free classes",
        &[
            "edges",
            "labeled",
            "aut",
            "D_H",
            "D_H/n^3",
            "cancellative",
            "tripartite",
            "system",
        ],
    );
    let mut by_defect: BTreeMap<usize, (usize, u128)> = BTreeMap::new();
    let mut max_defect = 0usize;
    for rec in records.iter().filter(|rec| rec.edge_count as f64 >= threshold) {
        let d = optimal_partition(&rec.key)?.bad_count;
        max_defect = max_defect.max(d);
        let entry = by_defect.entry(d).or_default();
        entry.0 += 1;
        entry.1 += rec.labeled_weight() as u128;
        let edges: Vec<String> = rec.key.edges().map(|e| e.to_string()).collect();
        table.push([
            rec.edge_count.to_string(),
            rec.labeled_weight().to_string(),
            rec.aut_order.to_string(),
            d.to_string(),
            format!("{:.6}", d as f64 / (n * n * n) as f64),
            rec.flags.cancellative.to_string(),
            rec.flags.tripartite.to_string(),
            edges.join(","),
        ]);
    }
    let mut dist = Table::new("D_H distribution", &["D_H", "classes", "labeled"]);
    for (d, (classes, labeled)) in &by_defect {
        dist.push([d.to_string(), classes.to_string(), labeled.to_string()]);
    }
    let considered: usize = by_defect.values().map(|v| v.0).sum();
    r.table(table).table(dist);
    r.observe(
        "max D_H/n^3",
        format!(
            "{:.6} over {considered} classes",
            max_defect as f64 / (n * n * n) as f64
        ),
    );
    if n < 5 {
        r.observe(
            "note",
            "every system on fewer than 5 vertices is F5-free; the probe is vacuous",
        );
    }
    Ok(r)
}
