//! Operation-count benchmarks: the decomposition pipeline against exhaustive search.

use std::fmt::Write as _;
use std::time::Instant;

use crate::accsat::{acc_sat, AccSatParams, Verdict};
use crate::circuit::{Circuit, GateKind};
use crate::error::Result;
use crate::gen;
use crate::oracle;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub gates: usize,
    pub k: usize,
    pub monomials: usize,
    pub eval_points: u64,
    pub gate_evals: u64,
    pub monomial_ops: u64,
    /// Gate evaluations + monomial operations + point lookups of the pipeline.
    pub acc_work: u128,
    /// Gate evaluations of exhaustive search: every gate on every point.
    pub brute_work: u128,
    /// The `n * 2^n` reference count the ratio is taken against.
    pub baseline: u128,
    pub sat: bool,
    /// Verdict agreement with exhaustive search, when it was run.
    pub agrees: Option<bool>,
    pub wall_ms: f64,
}

impl BenchRow {
    /// Pipeline work over `n * 2^n`.
    pub fn ratio(&self) -> f64 {
        self.acc_work as f64 / self.baseline as f64
    }
}

pub const TSV_HEADER: &str =
    "family\tn\tseed\tgates\tk\tK\teval_points\tgate_evals\tmonomial_ops\tacc_work\tbrute_work\tbaseline\tratio\tverdict\tagrees\twall_ms";

/// Tab-separated report with a header line; the wall-clock column is last.
pub fn tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rows {
        let agrees = match r.agrees {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{:.1}",
            r.family,
            r.n,
            r.seed,
            r.gates,
            r.k,
            r.monomials,
            r.eval_points,
            r.gate_evals,
            r.monomial_ops,
            r.acc_work,
            r.brute_work,
            r.baseline,
            r.ratio(),
            if r.sat { "SAT" } else { "UNSAT" },
            agrees,
            r.wall_ms
        );
    }
    out
}

/// `n * 2^n`.
pub fn reference_count(n: usize) -> u128 {
    (n as u128) << n
}

/// Runs the pipeline on one circuit, optionally checking the verdict by exhaustive search.
pub fn bench_instance(family: &str, seed: u64, c: &Circuit, params: &AccSatParams, check: bool) -> Result<BenchRow> {
    let start = Instant::now();
    let res = acc_sat(c, params)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let sat = res.verdict == Verdict::Sat;
    let agrees = if check { Some(oracle::brute_sat(c)?.is_some() == sat) } else { None };
    let m = &res.metrics;
    Ok(BenchRow {
        family: family.to_string(),
        n: c.n_inputs(),
        seed,
        gates: c.size(),
        k: m.k,
        monomials: m.monomials,
        eval_points: m.eval_points,
        gate_evals: m.gate_evals,
        monomial_ops: m.monomial_ops,
        acc_work: m.total_work(),
        brute_work: oracle::brute_gate_evals(c),
        baseline: reference_count(c.n_inputs()),
        sat,
        agrees,
        wall_ms,
    })
}

/// The SYM∘AND sweep: `MOD_6` over `n^2 / 8` three-literal ANDs for each `n` and seed.
pub fn sym_and_sweep(ns: &[usize], seeds: &[u64], params: &AccSatParams, check: bool) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &seed in seeds {
            let c = gen::bench_sym_and(n, seed);
            rows.push(bench_instance("sym-and", seed, &c, params, check)?);
        }
    }
    Ok(rows)
}

/// Layered depth-3 circuits with `MOD_2`/`MOD_3` gates.
pub fn acc_depth_sweep(ns: &[usize], seeds: &[u64], params: &AccSatParams, check: bool) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &seed in seeds {
            let c = gen::layered(&mut gen::rng(seed ^ ((n as u64) << 32)), n, 3, n, &[2, 3], 0.2);
            rows.push(bench_instance("acc-depth-3", seed, &c, params, check)?);
        }
    }
    Ok(rows)
}

/// Per-`n` ratio of summed pipeline work to summed reference counts, in increasing `n`.
pub fn ratios_by_n(rows: &[BenchRow]) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let (a, b) = rows
                .iter()
                .filter(|r| r.n == n)
                .fold((0u128, 0u128), |(a, b), r| (a + r.acc_work, b + r.baseline));
            (n, a as f64 / b as f64)
        })
        .collect()
}

/// Smallest `n` from which on the pipeline does strictly less work than exhaustive search.
pub fn advantage_threshold(ratios: &[(usize, f64)]) -> Option<usize> {
    let mut n0 = None;
    for &(n, r) in ratios.iter().rev() {
        if r < 1.0 {
            n0 = Some(n);
        } else {
            break;
        }
    }
    n0
}

/// Whether the ratio strictly decreases along the sweep.
pub fn strictly_improving(ratios: &[(usize, f64)]) -> bool {
    ratios.windows(2).all(|w| w[1].1 < w[0].1)
}

/// Named suites accepted by the CLI.
pub const SUITES: [&str; 3] = ["sym-and", "acc-depth", "k-zero"];

pub fn run_suite(name: &str, seeds: &[u64], params: &AccSatParams, check: bool) -> Result<Vec<BenchRow>> {
    match name {
        "sym-and" => sym_and_sweep(&(16..=24).collect::<Vec<_>>(), seeds, params, check),
        "acc-depth" => acc_depth_sweep(&(12..=20).step_by(2).collect::<Vec<_>>(), seeds, params, check),
        "k-zero" => {
            let p = AccSatParams { k: Some(0), ..params.clone() };
            let mut rows = Vec::new();
            for n in [8usize, 10, 12, 14] {
                for &seed in seeds {
                    let c = gen::sym_and(&mut gen::rng(seed + n as u64), n, 2 * n, GateKind::Mod(3), 1..=3, 0.3);
                    rows.push(bench_instance("k-zero", seed, &c, &p, check)?);
                }
            }
            Ok(rows)
        }
        other => Err(crate::error::Error::Format(format!(
            "unknown suite {other:?} (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(rows: &[BenchRow]) -> Vec<(u64, u64, u64, u128)> {
        rows.iter().map(|r| (r.eval_points, r.gate_evals, r.monomial_ops, r.acc_work)).collect()
    }

    #[test]
    fn repeat_runs_give_identical_counts() {
        let p = AccSatParams::default();
        let a = sym_and_sweep(&[10, 12], &[5], &p, true).unwrap();
        let b = sym_and_sweep(&[10, 12], &[5], &p, true).unwrap();
        assert_eq!(counts(&a), counts(&b));
        assert!(a.iter().all(|r| r.agrees == Some(true)));
    }

    #[test]
    fn k_zero_evaluates_every_point() {
        let rows = run_suite("k-zero", &[1], &AccSatParams::default(), true).unwrap();
        for r in rows {
            assert_eq!(r.k, 0);
            assert_eq!(r.eval_points, 1u64 << r.n);
        }
    }

    #[test]
    fn threshold_takes_the_trailing_run() {
        let r = [(16, 1.2), (17, 0.9), (18, 1.1), (19, 0.8), (20, 0.7)];
        assert_eq!(advantage_threshold(&r), Some(19));
        assert!(!strictly_improving(&r));
        assert!(strictly_improving(&r[3..]));
        assert_eq!(advantage_threshold(&[(16, 1.0)]), None);
    }

    #[test]
    fn tsv_has_header_and_one_line_per_row() {
        let rows = sym_and_sweep(&[8], &[1, 2], &AccSatParams::default(), false).unwrap();
        let t = tsv(&rows);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], TSV_HEADER);
        assert_eq!(lines[1].split('\t').count(), TSV_HEADER.split('\t').count());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &[1], &AccSatParams::default(), false).is_err());
    }
}
