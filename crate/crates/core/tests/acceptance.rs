//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints its PASS / FAIL line on each `cargo test` run.
//!
//! A criterion may be registered as known-red: its line still says FAIL, but
//! the target only fails when the observed outcome differs from the recorded
//! one.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Rational64;

use rootabc::arith::Factorizer;
use rootabc::cf::{expand, RootSpec};
use rootabc::equation::{equations, normalize_to_abc, AbcTriple};
use rootabc::metrics::{equation_metrics, triple_metrics};
use rootabc::roth::{
    eps_roth_from_abc, ridout_sqrt_bound, ridout_sqrt_solutions, roth_table, scaled_error_scan, KSelection,
    RidoutQuery, FLAG_PAPER_DISCREPANCY,
};
use rootabc::verify::{bvdp_suite, gain_quality_suite, scan_gains};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn cbrt2() -> RootSpec {
    RootSpec::new(2, 3).unwrap()
}

fn digits(v: &[BigUint]) -> Vec<String> {
    v.iter().map(|b| b.to_string()).collect()
}

fn cf_fidelity() -> Outcome {
    let a = digits(expand(cbrt2(), 4).unwrap().coefficients());
    let b = digits(expand(RootSpec::new(109, 5).unwrap(), 5).unwrap().coefficients());
    let pass = a == ["1", "3", "1", "5"] && b == ["2", "1", "1", "4", "77733"];
    outcome(pass, format!("[{}] and [{}]", a.join(","), b.join(",")))
}

fn cbrt2_equations() -> Outcome {
    let eqs = equations(cbrt2(), &expand(cbrt2(), 3).unwrap().convergents()).unwrap();
    let shown: Vec<String> = eqs.iter().map(|e| e.to_string()).collect();
    let t1 = normalize_to_abc(&eqs[1]).unwrap();
    let t2 = normalize_to_abc(&eqs[2]).unwrap();
    let pass = shown == ["2 = 1 + 1", "64 = 54 + 10", "128 = 125 + 3"]
        && eqs[1].g() == 2
        && t1 == AbcTriple::from_u64(5, 27, 32).unwrap()
        && eqs[2].g() == 1
        && t2 == AbcTriple::from_u64(3, 125, 128).unwrap();
    outcome(pass, format!("{}; g={} -> ({t1}); g={}", shown.join("; "), eqs[1].g(), eqs[2].g()))
}

fn record_hit_quality() -> Outcome {
    let c = BigUint::from(23u32).pow(5);
    let b = BigUint::from(3u32).pow(10) * 109u32;
    let t = AbcTriple::new(BigUint::from(2u32), b, c).unwrap();
    let m = triple_metrics(&t, &[], &Factorizer::default()).unwrap();
    outcome(close(m.quality, 1.62991, 2e-4), format!("quality {:.6}", m.quality))
}

fn k_epsilon_values() -> Outcome {
    let t = AbcTriple::from_u64(3, 125, 128).unwrap();
    let eps = [rat(1, 5), rat(2, 13), rat(1, 2)];
    let m = triple_metrics(&t, &eps, &Factorizer::default()).unwrap();
    let got: Vec<f64> = m.k_epsilon.iter().map(|(_, v)| *v).collect();
    let pass = got.iter().zip([2.16, 2.527, 0.78]).all(|(g, w)| close(*g, w, 0.01));
    outcome(pass, format!("K = {:.4} / {:.4} / {:.4}", got[0], got[1], got[2]))
}

fn inverse_c_table() -> Outcome {
    let eps = [rat(2, 5), rat(1, 2), rat(1, 1), rat(0, 1)];
    let rows = roth_table(cbrt2(), &eps, KSelection::default(), None, &Factorizer::default()).unwrap();
    let b: Vec<f64> = rows.iter().map(|r| r.bound).collect();
    let flagged = rows[3].flags.iter().any(|f| f == FLAG_PAPER_DISCREPANCY);
    let pass = close(b[0], 15.03, 0.02)
        && close(b[1], 13.16, 0.02)
        && close(b[2], 6.78, 0.02)
        && close(b[3], 25.60, 0.02)
        && flagged
        && rows[..3].iter().all(|r| r.flags.is_empty());
    outcome(
        pass,
        format!(
            "{:.3} / {:.3} / {:.3}; eps 0 -> {:.3} flagged={flagged} (printed {})",
            b[0],
            b[1],
            b[2],
            b[3],
            rows[3].published_bound.unwrap_or(f64::NAN)
        ),
    )
}

fn eps_mapping() -> Outcome {
    let got: Vec<Rational64> = [rat(1, 5), rat(2, 13), rat(1, 2)]
        .into_iter()
        .map(|e| eps_roth_from_abc(e).unwrap())
        .collect();
    let pass = got == [rat(1, 2), rat(2, 5), rat(1, 1)];
    outcome(pass, format!("{} / {} / {}", got[0], got[1], got[2]))
}

fn ridout_table() -> Outcome {
    let root = RootSpec::new(2, 2).unwrap();
    let cases: [(&[u64], f64, &[&str]); 4] = [
        (&[2], 16.0, &["3/2"]),
        (&[3], 36.0, &[]),
        (&[5], 100.0, &["7/5"]),
        (&[2, 3], 144.0, &["3/2", "17/12"]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (primes, bound, sols) in cases {
        let q = RidoutQuery::new(root, primes.to_vec(), rat(1, 1), 1.0, 40).unwrap();
        let got_bound = ridout_sqrt_bound(&q).unwrap();
        let got: Vec<String> = ridout_sqrt_solutions(&q).unwrap().iter().map(|c| c.to_string()).collect();
        pass &= (got_bound - bound).abs() < 1e-9 && got == sols;
        parts.push(format!("{primes:?}: {got_bound} {{{}}}", got.join(", ")));
    }
    outcome(pass, parts.join("; "))
}

fn gains() -> Outcome {
    let eqs = equations(cbrt2(), &expand(cbrt2(), 6).unwrap().convergents()).unwrap();
    let fz = Factorizer::default();
    let a = equation_metrics(&eqs[2], &[], &fz).unwrap();
    let b = equation_metrics(&eqs[5], &[], &fz).unwrap();
    let g = [a.approximation_gain, a.power_gain, b.approximation_gain, b.power_gain].map(Option::unwrap);
    let pass = g.iter().zip([1.009, 1.408, 0.987, 1.370]).all(|(x, w)| close(*x, w, 0.005));
    outcome(
        pass,
        format!("{}: {:.4} / {:.4}; {}: {:.4} / {:.4}", eqs[2], g[0], g[1], eqs[5], g[2], g[3]),
    )
}

const CORPUS_K: std::ops::RangeInclusive<u64> = 2..=200;
const CORPUS_DEPTH: usize = 40;

fn gain_theorem() -> Outcome {
    let r = scan_gains(3, CORPUS_K, CORPUS_DEPTH).unwrap();
    let max = r.max_observed.clone().unwrap();
    outcome(
        r.violations.is_empty() && r.instances > 0,
        format!(
            "{} equations, {} violations, max gain {:.4} at k={} n={}",
            r.instances,
            r.violations.len(),
            max.value,
            max.k,
            max.n
        ),
    )
}

// (k, n) pairs where the two-sided |d| bound is false; see README.
const BVDP_KNOWN: [(u64, usize); 17] = [
    (3, 0),
    (5, 0),
    (6, 0),
    (7, 0),
    (15, 0),
    (21, 0),
    (22, 0),
    (23, 0),
    (24, 0),
    (25, 0),
    (26, 0),
    (31, 0),
    (34, 0),
    (37, 0),
    (41, 0),
    (42, 0),
    (49, 1),
];

fn bvdp() -> (Outcome, bool) {
    // 20 convergents, each paired with the next coefficient
    let r = bvdp_suite(3, 2..=50, 21).unwrap();
    let found: Vec<(u64, usize)> = r.violations.iter().map(|v| (v.k, v.n)).collect();
    let listed: Vec<String> = r
        .violations
        .iter()
        .map(|v| format!("k={} n={} ({} vs {})", v.k, v.n, v.lhs, v.rhs))
        .collect();
    let detail = format!("{} checks, {} violations: {}", r.instances, found.len(), listed.join("; "));
    (outcome(found.is_empty(), detail), found == BVDP_KNOWN)
}

fn korobov() -> Outcome {
    let scan = scaled_error_scan(cbrt2(), 10_000, rat(5, 2), &[4]).unwrap();
    let at4 = scan.excluded[0].1;
    let pass = scan.violations.is_empty() && scan.min_value > 1.0 && close(at4, 0.317, 0.005) && close(1.0 / at4, 3.15, 0.05);
    outcome(
        pass,
        format!(
            "min {:.4} at q={}, q=4 -> {:.4} (1/C = {:.4})",
            scan.min_value,
            scan.argmin_q,
            at4,
            1.0 / at4
        ),
    )
}

fn gain_below_quality() -> Outcome {
    let r = gain_quality_suite(3, CORPUS_K, CORPUS_DEPTH, &Factorizer::default()).unwrap();
    let listed: Vec<String> = r.violations.iter().map(|v| format!("k={} n={}", v.k, v.n)).collect();
    let unfactored = r.notes.iter().filter(|n| n.contains("factorization")).count();
    let max = r.max_observed.clone().unwrap();
    outcome(
        r.violations.is_empty() && unfactored == 0,
        format!(
            "{} equations, {} unfactored, max gain - quality {:.2e} at k={} n={}; violations [{}]",
            r.instances,
            unfactored,
            max.value,
            max.k,
            max.n,
            listed.join(", ")
        ),
    )
}

// Integer-only expansion of sqrt(k): m' = d a - m, d' = (k - m'^2) / d, a' = (a0 + m') / d'.
fn surd_expansion(k: u64, terms: usize) -> Vec<BigUint> {
    let a0 = (1..).take_while(|x: &u64| x * x <= k).last().unwrap();
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let mut out = vec![BigUint::from(a0)];
    while out.len() < terms {
        m = d * a - m;
        d = (k - m * m) / d;
        a = (a0 + m) / d;
        out.push(BigUint::from(a));
    }
    out
}

fn surd_oracle() -> Outcome {
    let mut mismatched = Vec::new();
    for k in [2, 3, 5, 7, 61] {
        let got = expand(RootSpec::new(k, 2).unwrap(), 50).unwrap();
        if got.coefficients() != surd_expansion(k, 50).as_slice() {
            mismatched.push(k);
        }
    }
    outcome(mismatched.is_empty(), format!("50 terms for k in 2,3,5,7,61; mismatches {mismatched:?}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (bvdp_outcome, bvdp_as_recorded) = bvdp();
    let results: Vec<(u32, &str, Outcome, bool)> = vec![
        (1, "continued fraction fidelity", cf_fidelity(), true),
        (2, "resulting equations of the cube root of 2", cbrt2_equations(), true),
        (3, "quality of 2 + 3^10 109 = 23^5", record_hit_quality(), true),
        (4, "K_eps of 3 + 125 = 128", k_epsilon_values(), true),
        (5, "inverse Roth constant table", inverse_c_table(), true),
        (6, "eps mapping", eps_mapping(), true),
        (7, "Ridout bounds for sqrt(2)", ridout_table(), true),
        (8, "approximation and power gains", gains(), true),
        (9, "approximation gain < 3/2 (k <= 200, 40 terms)", gain_theorem(), true),
        (10, "two-sided |d| bound (k <= 50, 20 convergents)", bvdp_outcome, false),
        (11, "scaled error |cbrt2 - p/q| q^(5/2)", korobov(), true),
        (12, "approximation gain <= quality", gain_below_quality(), true),
        (13, "square roots against the surd algorithm", surd_oracle(), true),
    ];
    let mut unexpected = 0;
    for (id, name, o, expect_pass) in &results {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, expect_pass) {
            (false, false) if *id == 10 && bvdp_as_recorded => " [known: inequality false at small convergents]",
            _ => "",
        };
        println!("[{id:>2}] {status} {name}: {}{note}", o.detail);
        let as_expected = if *id == 10 { !o.pass && bvdp_as_recorded } else { o.pass == *expect_pass };
        if !as_expected {
            unexpected += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "acceptance: {passed}/{} pass, {unexpected} unexpected, {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
