//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;

use triplesys::cli;
use triplesys::enumerate::{brute_force_count, extremal_number, generate_isofree, labeled_total, Predicate};
use triplesys::formulas::{check_s_gap, check_t_bounds, chernoff_bound, s};
use triplesys::partition::is_tripartite;
use triplesys::patterns::{contains_f5, contains_k4minus, is_cancellative};
use triplesys::randlab::{
    chernoff_empirical, greedy_matching, is_maximal_matching, sample_gnp, triangle_experiment,
    unique_partition_experiment, SimpleGraph, UniquePartitionConfig,
};
use triplesys::report::RunReport;
use triplesys::system::{slot_count, TripleSystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn oracle_equivalence() -> Outcome {
    use Predicate::*;
    let cases = [
        (4, F5Free),
        (4, Cancellative),
        (4, Tripartite),
        (5, F5Free),
        (5, Cancellative),
        (5, Tripartite),
        (6, F5Free),
        (6, Tripartite),
    ];
    let mut parts = Vec::new();
    for (n, p) in cases {
        let records = generate_isofree(n, &p).map_err(|e| e.to_string())?;
        let generated = labeled_total(&records);
        let oracle = brute_force_count(n, &p).map_err(|e| e.to_string())?;
        ensure(
            generated == oracle.labeled_total,
            format!(
                "n={n} {p}: generated {generated}, oracle {}",
                oracle.labeled_total
            ),
        )?;
        for r in &records {
            let entry = oracle.histogram.get(&r.edge_count);
            ensure(
                entry.is_some(),
                format!("n={n} {p}: edge count {} missing from oracle", r.edge_count),
            )?;
        }
        parts.push(format!("{p}({n})={generated}"));
    }
    Ok(parts.join(" "))
}

fn vacuous_f5_count() -> Outcome {
    let oracle = brute_force_count(4, &Predicate::F5Free)
        .map_err(|e| e.to_string())?
        .labeled_total;
    let generated = labeled_total(&generate_isofree(4, &Predicate::F5Free).map_err(|e| e.to_string())?);
    ensure(
        oracle == 16 && generated == 16,
        format!("oracle {oracle}, generated {generated}"),
    )?;
    Ok("|Forb(4,F5)| = 16".into())
}

fn cancellative_extremal() -> Outcome {
    let mut parts = Vec::new();
    for (n, expected) in [(4, 2), (5, 4), (6, 8)] {
        ensure(s(n as u64) == expected, format!("s({n}) = {}", s(n as u64)))?;
        let res = extremal_number(n, Predicate::Cancellative).map_err(|e| e.to_string())?;
        ensure(
            res.max_edges as u64 == expected,
            format!("ex({n}) = {}, s({n}) = {expected}", res.max_edges),
        )?;
        ensure(
            is_cancellative(&res.witness),
            format!("witness at n={n} is not cancellative"),
        )?;
        parts.push(format!("ex({n})={}", res.max_edges));
    }
    Ok(parts.join(" "))
}

fn run_cli(args: &[&str]) -> Result<RunReport, String> {
    let argv: Vec<&str> = std::iter::once("triplesys").chain(args.iter().copied()).collect();
    let out = cli::run(argv);
    let report = out
        .report
        .ok_or_else(|| format!("{args:?}: {}", out.stderr.trim()))?;
    if out.code != 0 {
        return Err(format!("{args:?} exited {}", out.code));
    }
    Ok(report)
}

fn equivalence_suite() -> Outcome {
    let mut discrepancies = 0;
    for mask in 0..1u64 << 10 {
        let h = TripleSystem::from_mask(5, mask);
        let both = contains_f5(&h).is_none() && contains_k4minus(&h).is_none();
        discrepancies += (is_cancellative(&h) != both) as u32;
    }
    ensure(
        discrepancies == 0,
        format!("{discrepancies} discrepancies at n=5"),
    )?;
    for n in ["6", "7"] {
        let r = run_cli(&[
            "check", "--n", n, "--mode", "sampled", "--trials", "100000", "--seed", "2024",
        ])?;
        ensure(r.passed(), format!("sampled suite at n={n} failed"))?;
    }
    Ok("1024 systems at n=5 exhaustively, 100000 seeded systems at each of n=6,7; zero discrepancies".into())
}

fn tripartite_implies_cancellative() -> Outcome {
    let mut total = 0u64;
    for n in 0..=5 {
        for mask in 0..1u64 << slot_count(n) {
            let h = TripleSystem::from_mask(n, mask);
            ensure(
                !is_tripartite(&h) || is_cancellative(&h),
                format!("counterexample {h:?}"),
            )?;
            total += 1;
        }
    }
    Ok(format!("{total} systems with n <= 5"))
}

fn t_bounds() -> Outcome {
    let mut parts = Vec::new();
    for n in 3..=6usize {
        let t = labeled_total(&generate_isofree(n, &Predicate::Tripartite).map_err(|e| e.to_string())?);
        let c = check_t_bounds(n as u64, &BigUint::from(t));
        ensure(c.holds, format!("n={n}: {c}"))?;
        if n == 4 {
            ensure(t == 11, format!("T(4) = {t}"))?;
        }
        parts.push(format!("T({n})={t}"));
    }
    Ok(parts.join(" "))
}

fn s_gap_sweep() -> Outcome {
    let checks = check_s_gap(1000).map_err(|e| e.to_string())?;
    ensure(checks.len() == 998, format!("{} checks", checks.len()))?;
    let failed: Vec<_> = checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| c.params.clone())
        .collect();
    ensure(failed.is_empty(), format!("failing: {failed:?}"))?;
    Ok("3 <= n <= 1000 all hold".into())
}

fn triangle_counting() -> Outcome {
    let out = triangle_experiment(2, 200, 0.1, 100, 17).map_err(|e| e.to_string())?;
    ensure(out.in_band() >= 95, format!("{} of 100 in band", out.in_band()))?;
    let control = triangle_experiment(1, 200, 0.1, 10, 17).map_err(|e| e.to_string())?;
    ensure(
        control.counts.iter().all(|&c| c == 8_000_000),
        "l=1 control deviates from m^3",
    )?;
    Ok(format!("{}/100 in band; l=1 control exact", out.in_band()))
}

fn chernoff() -> Outcome {
    let analytic = chernoff_bound(100, 0.5, 10.0).map_err(|e| e.to_string())?;
    ensure(
        (analytic - (-1f64).exp()).abs() < 1e-12,
        format!("bound {analytic}"),
    )?;
    let out = chernoff_empirical(100, 0.5, 10.0, 100_000, 5).map_err(|e| e.to_string())?;
    ensure(
        out.passed(),
        format!("frequency {} > {}", out.frequency(), out.allowance()),
    )?;
    Ok(format!(
        "frequency {:.5} <= {:.5}",
        out.frequency(),
        out.allowance()
    ))
}

fn matching_bound() -> Outcome {
    let check = |g: &SimpleGraph, label: &str| -> Result<(), String> {
        let m = greedy_matching(g);
        ensure(is_maximal_matching(g, &m), format!("{label}: not maximal"))?;
        ensure(
            2 * g.vertex_count() * m.len() >= g.edge_count(),
            format!("{label}: {} < {}/(2n)", m.len(), g.edge_count()),
        )
    };
    for seed in 0..200 {
        check(
            &sample_gnp(50, 0.2, seed).map_err(|e| e.to_string())?,
            &format!("G(50,0.2) seed {seed}"),
        )?;
    }
    let star = SimpleGraph::new(10, (1..10).map(|v| (0, v))).map_err(|e| e.to_string())?;
    let path = SimpleGraph::new(10, (0..9).map(|v| (v, v + 1))).map_err(|e| e.to_string())?;
    let perfect = SimpleGraph::new(10, (0..5).map(|i| (2 * i, 2 * i + 1))).map_err(|e| e.to_string())?;
    check(&star, "star")?;
    check(&path, "path")?;
    check(&perfect, "perfect matching")?;
    Ok("200 random graphs and 3 fixtures, zero violations".into())
}

/// `P(Bin(m, 1/2) <= k)`.
fn binomial_half_cdf(m: u64, k: u64) -> f64 {
    let mut term = BigUint::from(1u32);
    let mut sum = BigUint::from(1u32);
    for i in 1..=k {
        term = term * (m - i + 1) / i;
        sum += &term;
    }
    let num: f64 = sum.to_string().parse().unwrap();
    num / 2f64.powi(m as i32)
}

fn unique_partition() -> Outcome {
    let cfg = UniquePartitionConfig::new(60, 100, 11);
    let out = unique_partition_experiment(&cfg).map_err(|e| e.to_string())?;
    ensure(
        out.recovered() >= 95,
        format!("{} of 100 recovered", out.recovered()),
    )?;
    // Each crossing pair sees Bin(20, 1/2) common neighbours in the third
    // part; condition (i) needs more than 6.
    let expected = 1.0 - binomial_half_cdf(20, 6);
    let rate = out.condition_i_pair_rate();
    ensure(
        (rate - expected).abs() < 0.01,
        format!("pair rate {rate:.5} vs exact {expected:.5}"),
    )?;
    Ok(format!(
        "{}/100 recovered; condition (i) held for all pairs in {}/100 trials, pair rate {rate:.4} (exact {expected:.4})",
        out.recovered(),
        out.condition_i_held()
    ))
}

fn ratio_table() -> Outcome {
    // Values from an independent definitional count over all edge subsets.
    let golden = [(4, 11u128, 16u128), (5, 141, 261), (6, 4666, 9259)];
    let mut parts = Vec::new();
    for (n, trip, f5) in golden {
        let t = brute_force_count(n, &Predicate::Tripartite)
            .map_err(|e| e.to_string())?
            .labeled_total;
        let f = brute_force_count(n, &Predicate::F5Free)
            .map_err(|e| e.to_string())?
            .labeled_total;
        ensure(
            t == trip && f == f5,
            format!("n={n}: {t}/{f}, golden {trip}/{f5}"),
        )?;
        parts.push(format!("n={n}: {t}/{f}"));
    }
    Ok(parts.join(", "))
}

fn determinism() -> Outcome {
    let f5 = fixture("f5.txt");
    let f5 = f5.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["count", "--n", "5", "--predicate", "cancellative", "--oracle"],
        vec!["extremal", "--n", "5", "--predicate", "cancellative"],
        vec!["partition", "--file", f5],
        vec!["check", "--file", f5],
        vec![
            "check", "--n", "6", "--mode", "sampled", "--trials", "20000", "--seed", "9",
        ],
        vec!["check-formulas", "--s-gap-max", "1000"],
        vec![
            "experiment",
            "triangle",
            "--m",
            "60",
            "--trials",
            "40",
            "--seed",
            "3",
        ],
        vec!["experiment", "chernoff", "--trials", "20000", "--seed", "3"],
        vec![
            "experiment",
            "unique-partition",
            "--n",
            "45",
            "--trials",
            "30",
            "--seed",
            "3",
        ],
        vec![
            "experiment",
            "density",
            "--n",
            "24",
            "--mode",
            "exact",
            "--seed",
            "3",
        ],
    ];
    for cmd in &commands {
        let mut docs = Vec::new();
        for workers in ["1", "4", "4"] {
            let mut argv = vec!["triplesys", "--format", "machine", "--workers", workers];
            argv.extend(cmd.iter().copied());
            let out = cli::run(argv);
            let report = out
                .report
                .ok_or_else(|| format!("{cmd:?}: {}", out.stderr.trim()))?;
            let reparsed = RunReport::from_machine(out.stdout.trim()).map_err(|e| e.to_string())?;
            ensure(
                reparsed == report,
                format!("{cmd:?}: machine output does not round-trip"),
            )?;
            docs.push(report.without_timing().to_machine());
        }
        ensure(
            docs.windows(2).all(|w| w[0] == w[1]),
            format!("{cmd:?}: reports differ"),
        )?;
    }
    Ok(format!(
        "{} commands identical across 1/4/4 workers",
        commands.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("oracle equivalence", oracle_equivalence),
        ("vacuous F5 count", vacuous_f5_count),
        ("cancellative extremal = s(n)", cancellative_extremal),
        ("cancellative iff F5-free and K4^- free", equivalence_suite),
        ("tripartite implies cancellative", tripartite_implies_cancellative),
        ("T(n) upper bound", t_bounds),
        ("s gap sweep", s_gap_sweep),
        ("triangle counting", triangle_counting),
        ("chernoff tail", chernoff),
        ("matching bound", matching_bound),
        ("unique partition recovery", unique_partition),
        ("tripartite / F5-free ratio", ratio_table),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({ms} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({ms} ms)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
