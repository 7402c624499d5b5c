//! Exact checks of the continued-fraction inequalities over scan ranges.
//!
//! Every pass/fail decision is an integer comparison. Floats only appear in
//! the reported slacks and maxima.
//!
//! | suite        | inequality                                             |
//! |--------------|--------------------------------------------------------|
//! | `bvdp`       | `s p^(s-1) / (q (b+2)) <= |d| <= s p^(s-1) / (q b)`    |
//! | `liouville`  | `b <= s k q`                                           |
//! | `gains`      | approximation gain `< s/2` when `p > q`                |
//! | `roth-form`  | `b <= C^-1 q^eps`                                      |
//! | `gain-quality` | approximation gain `<=` quality `+ 1e-9`             |
//!
//! Here `b` is always the next partial quotient `b_(n+1)`. For degrees other
//! than 3 the `bvdp` and `liouville` suites only record observations.

use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{log_big, Factorizer};
use crate::cf::{expand, CfExpansion, Convergent, RootSpec};
use crate::equation::{resulting_equation, ResultingEquation};
use crate::error::{Error, Result};
use crate::metrics::{approximation_gain, equation_metrics, gain_numerator};

pub const GAIN_QUALITY_TOLERANCE: f64 = 1e-9;

/// A failed (or, in observational mode, noted) inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub k: u64,
    pub s: u32,
    pub n: usize,
    pub lhs: String,
    pub rhs: String,
    /// rhs / lhs for `lhs <= rhs` checks; below 1 means failure.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub k: u64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub s: u32,
    /// Violations fail the run only in failing mode.
    pub failing_mode: bool,
    pub instances: u64,
    /// Instances skipped by the suite's hypothesis (or perfect powers).
    pub skipped: u64,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
    pub max_observed: Option<Extremum>,
    pub runtime: Runtime,
}

impl VerificationReport {
    fn new(suite: &str, s: u32, failing_mode: bool) -> Self {
        Self {
            suite: suite.to_string(),
            s,
            failing_mode,
            instances: 0,
            skipped: 0,
            violations: Vec::new(),
            notes: Vec::new(),
            max_observed: None,
            runtime: Runtime::default(),
        }
    }

    /// Failing-mode suite with at least one violation.
    pub fn failed(&self) -> bool {
        self.failing_mode && !self.violations.is_empty()
    }

    fn observe_max(&mut self, value: f64, k: u64, n: usize) {
        if self.max_observed.as_ref().is_none_or(|m| value > m.value) {
            self.max_observed = Some(Extremum { value, k, n });
        }
    }

    fn absorb(&mut self, part: Partial) {
        self.instances += part.instances;
        self.skipped += part.skipped;
        self.violations.extend(part.violations);
        self.notes.extend(part.notes);
        if let Some(m) = part.max {
            self.observe_max(m.value, m.k, m.n);
        }
    }

    /// JSON with the runtime zeroed, identical across runs of one configuration.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.runtime = Runtime::default();
        serde_json::to_string(&copy).expect("report serializes")
    }
}

#[derive(Default)]
struct Partial {
    instances: u64,
    skipped: u64,
    violations: Vec<Violation>,
    notes: Vec<String>,
    max: Option<Extremum>,
}

impl Partial {
    fn max(&mut self, value: f64, k: u64, n: usize) {
        if self.max.as_ref().is_none_or(|m| value > m.value) {
            self.max = Some(Extremum { value, k, n });
        }
    }
}

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    if den.is_zero() {
        return f64::INFINITY;
    }
    if num.is_zero() {
        return 0.0;
    }
    (log_big(num) - log_big(den)).exp()
}

/// Both sides of the two-sided bound on `|d|`.
#[derive(Debug, Clone, PartialEq)]
pub struct BvdpCheck {
    /// `|d| q b <= s p^(s-1)`
    pub upper_ok: bool,
    /// `s p^(s-1) <= |d| q (b+2)`
    pub lower_ok: bool,
    /// `s p^(s-1) / (|d| q b)`
    pub upper_slack: f64,
    /// `|d| q (b+2) / (s p^(s-1))`
    pub lower_slack: f64,
}

impl BvdpCheck {
    pub fn passed(&self) -> bool {
        self.upper_ok && self.lower_ok
    }
}

/// Check `s p^(s-1) / (q (b+2)) <= |d| <= s p^(s-1) / (q b)` by cross-multiplying.
pub fn check_bvdp(eq: &ResultingEquation, b_next: &BigUint) -> BvdpCheck {
    let s = eq.root().s();
    let scaled = BigUint::from(s) * eq.p().pow(s - 1);
    let dq = eq.abs_d() * eq.q();
    let upper_lhs = &dq * b_next;
    let lower_rhs = &dq * (b_next + 2u32);
    BvdpCheck {
        upper_ok: upper_lhs <= scaled,
        lower_ok: scaled <= lower_rhs,
        upper_slack: ratio(&scaled, &upper_lhs),
        lower_slack: ratio(&lower_rhs, &scaled),
    }
}

/// `b_(n+1) <= s k q_n`, with slack `s k q_n / b_(n+1)`.
pub fn check_liouville_b(root: RootSpec, q_n: &BigUint, b_next: &BigUint) -> (bool, f64) {
    let bound = BigUint::from(root.s()) * BigUint::from(root.k()) * q_n;
    (b_next <= &bound, ratio(&bound, b_next))
}

/// Whether the approximation gain is `>= num/den`, decided as `N^den >= D^num`.
pub fn gain_at_least(eq: &ResultingEquation, num: u32, den: u32) -> bool {
    gain_numerator(eq).pow(den) >= eq.gain_product().pow(num)
}

struct RootData {
    root: RootSpec,
    cf: CfExpansion,
    convergents: Vec<Convergent>,
    equations: Vec<ResultingEquation>,
}

fn root_data(root: RootSpec, depth: usize) -> Result<RootData> {
    let cf = expand(root, depth)?;
    let convergents = cf.convergents();
    let equations = convergents
        .iter()
        .map(|c| resulting_equation(root, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(RootData {
        root,
        cf,
        convergents,
        equations,
    })
}

// Runs `per_root` on every valid root in range in parallel; the merge is
// ordered by k so reports do not depend on scheduling.
fn run_suite<F>(mut report: VerificationReport, k_range: RangeInclusive<u64>, depth: usize, per_root: F) -> Result<VerificationReport>
where
    F: Fn(&RootData) -> Result<Partial> + Sync,
{
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let start = Instant::now();
    let s = report.s;
    let parts: Vec<Result<Partial>> = k_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| match RootSpec::new(k, s) {
            Ok(root) => per_root(&root_data(root, depth)?),
            Err(_) => Ok(Partial {
                skipped: 1,
                notes: vec![format!("k = {k}: perfect power for s = {s}, skipped")],
                ..Partial::default()
            }),
        })
        .collect();
    for part in parts {
        report.absorb(part?);
    }
    report.runtime.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Two-sided `|d|` bound for every convergent that has a next coefficient.
pub fn bvdp_suite(s: u32, k_range: RangeInclusive<u64>, depth: usize) -> Result<VerificationReport> {
    let report = VerificationReport::new("bvdp", s, s == 3);
    run_suite(report, k_range, depth, |data| {
        let mut part = Partial::default();
        let k = data.root.k();
        for (n, eq) in data.equations.iter().enumerate() {
            let Some(b_next) = data.cf.coefficient(n + 1) else { break };
            part.instances += 1;
            let check = check_bvdp(eq, b_next);
            let scaled = BigUint::from(s) * eq.p().pow(s - 1);
            if !check.upper_ok {
                part.violations.push(Violation {
                    k,
                    s,
                    n,
                    lhs: format!("|d| q b = {}", eq.abs_d() * eq.q() * b_next),
                    rhs: format!("s p^(s-1) = {scaled}"),
                    slack: check.upper_slack,
                });
            }
            if !check.lower_ok {
                part.violations.push(Violation {
                    k,
                    s,
                    n,
                    lhs: format!("s p^(s-1) = {scaled}"),
                    rhs: format!("|d| q (b+2) = {}", eq.abs_d() * eq.q() * (b_next + 2u32)),
                    slack: check.lower_slack,
                });
            }
        }
        Ok(part)
    })
}

/// `b_(n+1) <= s k q_n` for every convergent that has a next coefficient.
pub fn liouville_suite(s: u32, k_range: RangeInclusive<u64>, depth: usize) -> Result<VerificationReport> {
    let report = VerificationReport::new("liouville", s, s == 3);
    run_suite(report, k_range, depth, |data| {
        let mut part = Partial::default();
        let k = data.root.k();
        for (n, conv) in data.convergents.iter().enumerate() {
            let Some(b_next) = data.cf.coefficient(n + 1) else { break };
            part.instances += 1;
            let (ok, slack) = check_liouville_b(data.root, &conv.q, b_next);
            if !ok {
                part.violations.push(Violation {
                    k,
                    s,
                    n,
                    lhs: format!("b_(n+1) = {b_next}"),
                    rhs: format!("s k q_n = {}", BigUint::from(s) * BigUint::from(k) * &conv.q),
                    slack,
                });
            }
        }
        Ok(part)
    })
}

/// Approximation gains of all equations with `p > q`; a gain `>= s/2` is a violation.
pub fn scan_gains(s: u32, k_range: RangeInclusive<u64>, depth: usize) -> Result<VerificationReport> {
    let report = VerificationReport::new("gains", s, true);
    run_suite(report, k_range, depth, |data| {
        let mut part = Partial::default();
        let k = data.root.k();
        for eq in &data.equations {
            if eq.p() <= eq.q() {
                part.skipped += 1;
                continue;
            }
            part.instances += 1;
            let gain = approximation_gain(eq)?;
            part.max(gain, k, eq.n());
            if gain_at_least(eq, s, 2) {
                part.violations.push(Violation {
                    k,
                    s,
                    n: eq.n(),
                    lhs: format!("gain = {gain}"),
                    rhs: format!("{s}/2"),
                    slack: s as f64 / 2.0 / gain,
                });
            }
        }
        Ok(part)
    })
}

/// `b_(n+1) <= C^-1 q_n^eps` for one root, decided with exact rationals.
pub fn check_roth_form(root: RootSpec, eps_roth: Rational64, c_inverse: f64, depth: usize) -> Result<VerificationReport> {
    if eps_roth < Rational64::zero() {
        return Err(Error::InvalidParameter("eps must be non-negative".into()));
    }
    let c_inv = BigRational::from_float(c_inverse)
        .filter(|c| c.is_positive())
        .ok_or_else(|| Error::InvalidParameter(format!("1/C must be positive and finite, got {c_inverse}")))?;
    let (u, v) = (*eps_roth.numer() as u32, *eps_roth.denom() as u32);
    let report = VerificationReport::new("roth-form", root.s(), true);
    let k = root.k();
    run_suite(report, k..=k, depth, |data| {
        let mut part = Partial::default();
        for (n, conv) in data.convergents.iter().enumerate() {
            let Some(b_next) = data.cf.coefficient(n + 1) else { break };
            part.instances += 1;
            // b^v <= C^-v q^u
            let lhs = BigRational::from_integer(BigInt::from(b_next.pow(v)));
            let rhs = num_traits::pow(c_inv.clone(), v as usize) * BigRational::from_integer(BigInt::from(conv.q.pow(u)));
            let bound = c_inverse * (log_big(&conv.q) * u as f64 / v as f64).exp();
            let slack = bound / (log_big(b_next)).exp();
            part.max(1.0 / slack, k, n);
            if lhs > rhs {
                part.violations.push(Violation {
                    k,
                    s: root.s(),
                    n,
                    lhs: format!("b_(n+1) = {b_next}"),
                    rhs: format!("C^-1 q_n^{eps_roth} = {bound}"),
                    slack,
                });
            }
        }
        Ok(part)
    })
}

/// Approximation gain against quality for every equation in range.
/// Factorization failures are skipped with a note.
pub fn gain_quality_suite(
    s: u32,
    k_range: RangeInclusive<u64>,
    depth: usize,
    factorizer: &Factorizer,
) -> Result<VerificationReport> {
    let report = VerificationReport::new("gain-quality", s, true);
    run_suite(report, k_range, depth, |data| {
        let mut part = Partial::default();
        let k = data.root.k();
        for eq in &data.equations {
            let metrics = match equation_metrics(eq, &[], factorizer) {
                Ok(m) => m,
                Err(Error::FactorizationBudgetExceeded { bits }) => {
                    part.skipped += 1;
                    part.notes.push(format!("k = {k}, n = {}: factorization skipped ({bits}-bit cofactor)", eq.n()));
                    continue;
                }
                Err(e) => return Err(e),
            };
            part.instances += 1;
            let gain = metrics.approximation_gain.expect("equation metrics carry gains");
            part.max(gain - metrics.quality, k, eq.n());
            if gain > metrics.quality + GAIN_QUALITY_TOLERANCE {
                part.violations.push(Violation {
                    k,
                    s,
                    n: eq.n(),
                    lhs: format!("gain = {gain}"),
                    rhs: format!("quality = {}", metrics.quality),
                    slack: metrics.quality / gain,
                });
            }
        }
        Ok(part)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::equations;
    use num_traits::One;

    fn cbrt2_data(terms: usize) -> (CfExpansion, Vec<ResultingEquation>) {
        let root = RootSpec::new(2, 3).unwrap();
        let cf = expand(root, terms).unwrap();
        let eqs = equations(root, &cf.convergents()).unwrap();
        (cf, eqs)
    }

    #[test]
    fn bvdp_examples() {
        let (cf, eqs) = cbrt2_data(4);
        // n = 2: 75/28 <= 3 <= 75/20
        let c = check_bvdp(&eqs[2], cf.coefficient(3).unwrap());
        assert!(c.passed());
        assert!((c.upper_slack - 75.0 / 60.0).abs() < 1e-12);
        assert!((c.lower_slack - 84.0 / 75.0).abs() < 1e-12);
        // n = 1: 16/3 <= 10 <= 16
        assert!(check_bvdp(&eqs[1], cf.coefficient(2).unwrap()).passed());
        // n = 0: 3/5 <= 1 <= 1, the upper side is tight
        let c = check_bvdp(&eqs[0], cf.coefficient(1).unwrap());
        assert!(c.passed());
        assert_eq!(c.upper_slack, 1.0);
        // a wrong b breaks it
        assert!(!check_bvdp(&eqs[2], &BigUint::from(50u32)).upper_ok);
        assert!(!check_bvdp(&eqs[2], &BigUint::from(1u32)).lower_ok);
    }

    #[test]
    fn liouville_examples() {
        let root = RootSpec::new(2, 3).unwrap();
        assert!(check_liouville_b(root, &BigUint::from(4u32), &BigUint::from(5u32)).0);
        assert!(check_liouville_b(root, &BigUint::one(), &BigUint::from(3u32)).0);
        assert!(!check_liouville_b(root, &BigUint::one(), &BigUint::from(7u32)).0);
        let fifth = RootSpec::new(109, 5).unwrap();
        let (ok, slack) = check_liouville_b(fifth, &BigUint::from(9u32), &BigUint::from(77733u32));
        assert!(!ok);
        assert!((slack - 4905.0 / 77733.0).abs() < 1e-12);
    }

    #[test]
    fn liouville_degree_five_is_observational() {
        let r = liouville_suite(5, 109..=109, 5).unwrap();
        assert!(!r.failing_mode);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].n, 3);
        assert!(!r.failed());
    }

    #[test]
    fn exact_gain_threshold() {
        let (_, eqs) = cbrt2_data(3);
        // gain(128 = 125 + 3) ~ 1.0086
        assert!(gain_at_least(&eqs[2], 1, 1));
        assert!(!gain_at_least(&eqs[2], 101, 100));
        assert!(!gain_at_least(&eqs[2], 3, 2));
    }

    #[test]
    fn gain_scan_small() {
        let r = scan_gains(3, 2..=2, 10).unwrap();
        assert!(r.violations.is_empty());
        let max = r.max_observed.unwrap();
        // 635/504 beats 5/4 (gain ~1.0086) among the first ten
        assert_eq!((max.k, max.n), (2, 8));
        assert!((max.value - 1.0242365).abs() < 1e-6);
        // 1/1 is the only convergent with p <= q
        assert_eq!(r.skipped, 1);
        assert_eq!(r.instances, 9);
    }

    #[test]
    fn gain_scan_fifth_root() {
        let r = scan_gains(5, 109..=109, 4).unwrap();
        let max = r.max_observed.unwrap();
        assert_eq!(max.n, 3);
        // ln(9^5 * 109) / ln(2 * 9 * 109 * 23)
        assert!((max.value - 6436341f64.ln() / 45126f64.ln()).abs() < 1e-12);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn perfect_powers_are_skipped() {
        let r = scan_gains(3, 7..=9, 5).unwrap();
        assert_eq!(r.notes, vec!["k = 8: perfect power for s = 3, skipped".to_string()]);
    }

    #[test]
    fn roth_form() {
        let root = RootSpec::new(2, 3).unwrap();
        let half = Rational64::new(1, 2);
        assert!(check_roth_form(root, half, 13.16, 20).unwrap().violations.is_empty());
        assert!(check_roth_form(root, half, 3.125, 20).unwrap().violations.is_empty());
        let r = check_roth_form(root, Rational64::zero(), 0.5, 5).unwrap();
        assert!(r.failed());
        assert_eq!(r.violations[0].n, 0);
        assert_eq!(r.violations[0].lhs, "b_(n+1) = 3");
        assert!(check_roth_form(root, half, -1.0, 5).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = bvdp_suite(3, 2..=12, 15).unwrap();
        let b = bvdp_suite(3, 2..=12, 15).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        // the integer-part convergent 1/1 of cbrt(3) breaks the upper side: 2 * 1 * 2 > 3
        assert!(a.failed());
        assert_eq!((a.violations[0].k, a.violations[0].n), (3, 0));
    }
}
