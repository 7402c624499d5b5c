//! Explicit bound calculators.
//!
//! * the map between the ABC exponent and the Roth exponent,
//!   `eps_roth = 3 eps_abc / (1 + eps_abc)`;
//! * the bound on the inverse Roth constant of a cube root,
//!   `1/C <= K^(1/(1+e)) * 3k * (p1/q1)^(3e/(1+e))`, and the table built from it;
//! * Ridout-type bounds on the numerators of S-integer convergents of square
//!   and cube roots;
//! * the power-gain bound under an explicit ABC with exponent `3 + eps`;
//! * an exhaustive scan of `|alpha - p/q| q^e` over denominators.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime_u64, log_big, Factorizer};
use crate::cf::{expand, Convergent, RootSpec};
use crate::equation::{equations, resulting_equation};
use crate::error::{Error, Result};
use crate::metrics::{equation_metrics, rational_to_f64};

/// `3e / (1 + e)`.
pub fn eps_roth_from_abc(eps_abc: Rational64) -> Result<Rational64> {
    if eps_abc < Rational64::zero() {
        return Err(Error::InvalidParameter(format!("eps_abc must be non-negative, got {eps_abc}")));
    }
    Ok(Rational64::from_integer(3) * eps_abc / (Rational64::one() + eps_abc))
}

/// `e / (3 - e)`, the inverse of [`eps_roth_from_abc`].
pub fn eps_abc_from_roth(eps_roth: Rational64) -> Result<Rational64> {
    let three = Rational64::from_integer(3);
    if eps_roth < Rational64::zero() || eps_roth >= three {
        return Err(Error::InvalidParameter(format!("eps_roth must lie in [0, 3), got {eps_roth}")));
    }
    Ok(eps_roth / (three - eps_roth))
}

fn ratio_gt_root(ratio: Rational64, root: RootSpec) -> bool {
    let (p, q) = (ratio.numer(), ratio.denom());
    if *p <= 0 || *q <= 0 {
        return false;
    }
    let p = BigUint::from(*p as u64);
    let q = BigUint::from(*q as u64);
    p.pow(root.s()) > BigUint::from(root.k()) * q.pow(root.s())
}

/// The convergent `p_1 / q_1`, the first one above the root.
pub fn first_upper_convergent(root: RootSpec) -> Result<Rational64> {
    let conv = expand(root, 2)?.convergents();
    let c = &conv[1];
    let as_i64 = |x: &BigUint| x.to_i64().ok_or_else(|| Error::InvalidParameter("p1/q1 out of range".into()));
    Ok(Rational64::new(as_i64(&c.p)?, as_i64(&c.q)?))
}

/// Inputs of the inverse Roth constant bound for a cube root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RothBoundParams {
    root: RootSpec,
    eps_abc: Rational64,
    k_eps: f64,
    p1_over_q1: Rational64,
}

impl RothBoundParams {
    pub fn new(root: RootSpec, eps_abc: Rational64, k_eps: f64, p1_over_q1: Rational64) -> Result<Self> {
        if root.s() != 3 {
            return Err(Error::InvalidParameter(format!("the Roth bound needs a cube root, got {root}")));
        }
        if eps_abc < Rational64::zero() || eps_abc > Rational64::new(1, 2) {
            return Err(Error::InvalidParameter(format!("eps_abc must lie in [0, 1/2], got {eps_abc}")));
        }
        if !(k_eps >= 0.0 && k_eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("K_eps must be finite and non-negative, got {k_eps}")));
        }
        if !ratio_gt_root(p1_over_q1, root) {
            return Err(Error::InvalidParameter(format!("p1/q1 = {p1_over_q1} must exceed {root}")));
        }
        Ok(Self {
            root,
            eps_abc,
            k_eps,
            p1_over_q1,
        })
    }

    pub fn eps_roth(&self) -> Rational64 {
        eps_roth_from_abc(self.eps_abc).expect("validated")
    }
}

/// `K^(1/(1+e)) * 3k * (p1/q1)^(3e/(1+e))`, with the gcd factor taken as 1.
pub fn inverse_c_bound(params: &RothBoundParams) -> f64 {
    let e = rational_to_f64(&params.eps_abc);
    let ratio = rational_to_f64(&params.p1_over_q1);
    params.k_eps.powf(1.0 / (1.0 + e)) * 3.0 * params.root.k() as f64 * ratio.powf(3.0 * e / (1.0 + e))
}

/// How K_eps is chosen for a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSelection {
    /// Largest K_eps over the resulting equations of convergents `1..=depth`
    /// (or `0..=depth` with the seed equation included).
    MaxOverCorpus { depth: usize, include_seed: bool },
    /// K_eps of the equation of convergent `n`.
    Equation(usize),
}

impl Default for KSelection {
    fn default() -> Self {
        KSelection::MaxOverCorpus {
            depth: 3,
            include_seed: false,
        }
    }
}

pub const FLAG_PAPER_DISCREPANCY: &str = "paper-discrepancy";

/// Previously published values for the cube root of 2: (eps_roth, K_eps, bound on 1/C, known bound).
const PUBLISHED_CBRT2: [(i64, i64, f64, f64, &str); 4] = [
    (0, 1, 4.267, 60.686, "probably unbounded"),
    (2, 5, 2.5, 15.03, "not known (hypergeometric method: 1e99 at eps 0.4321)"),
    (1, 2, 2.161, 13.16, "3.125 (Korobov, exact)"),
    (1, 1, 0.78, 6.78, "6 (Liouville; can be lowered to 1.575)"),
];

/// One row of the inverse Roth constant table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RothTableRow {
    pub eps_roth: String,
    pub eps_abc: String,
    pub k_eps: f64,
    /// Convergent index of the equation that supplied K_eps.
    pub source_n: usize,
    pub source_equation: String,
    pub bound: f64,
    pub published_bound: Option<f64>,
    pub known_bound: Option<String>,
    pub flags: Vec<String>,
}

/// Rows `(eps_roth, eps_abc, K_eps, bound)` for a cube root.
pub fn roth_table(
    root: RootSpec,
    eps_roth_list: &[Rational64],
    selection: KSelection,
    p1_over_q1: Option<Rational64>,
    factorizer: &Factorizer,
) -> Result<Vec<RothTableRow>> {
    if root.s() != 3 {
        return Err(Error::InvalidParameter(format!("the Roth table needs a cube root, got {root}")));
    }
    let p1q1 = match p1_over_q1 {
        Some(r) => r,
        None => first_upper_convergent(root)?,
    };
    let eps_abc_list = eps_roth_list
        .iter()
        .map(|&e| eps_abc_from_roth(e))
        .collect::<Result<Vec<_>>>()?;

    let (first, last) = match selection {
        KSelection::MaxOverCorpus { depth, include_seed } => (if include_seed { 0 } else { 1 }, depth),
        KSelection::Equation(n) => (n, n),
    };
    if last < first {
        return Err(Error::InvalidParameter("empty equation corpus".into()));
    }
    let convs = expand(root, last + 1)?.convergents();
    let corpus = equations(root, &convs[first..=last])?;
    let metrics = corpus
        .iter()
        .map(|eq| equation_metrics(eq, &eps_abc_list, factorizer))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(eps_roth_list.len());
    for (i, (&eps_roth, &eps_abc)) in eps_roth_list.iter().zip(&eps_abc_list).enumerate() {
        let (best, k_eps) = metrics
            .iter()
            .enumerate()
            .map(|(j, m)| (j, m.k_epsilon[i].1))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty corpus");
        let params = RothBoundParams::new(root, eps_abc, k_eps, p1q1)?;
        let bound = inverse_c_bound(&params);

        let published = (root.k() == 2)
            .then(|| PUBLISHED_CBRT2.iter().find(|(n, d, ..)| Rational64::new(*n, *d) == eps_roth))
            .flatten();
        let mut flags = Vec::new();
        if let Some((_, _, _, printed, _)) = published {
            if (bound - printed).abs() > 0.01 * printed {
                flags.push(FLAG_PAPER_DISCREPANCY.to_string());
            }
        }
        rows.push(RothTableRow {
            eps_roth: eps_roth.to_string(),
            eps_abc: eps_abc.to_string(),
            k_eps,
            source_n: corpus[best].n(),
            source_equation: corpus[best].to_string(),
            bound,
            published_bound: published.map(|p| p.3),
            known_bound: published.map(|p| p.4.to_string()),
            flags,
        });
    }
    Ok(rows)
}

/// Inputs of the Ridout-type bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RidoutQuery {
    pub root: RootSpec,
    pub primes: Vec<u64>,
    pub eps: Rational64,
    pub k_const: f64,
    pub depth: usize,
}

impl RidoutQuery {
    pub fn new(root: RootSpec, primes: Vec<u64>, eps: Rational64, k_const: f64, depth: usize) -> Result<Self> {
        let primes: Vec<u64> = primes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if primes.is_empty() {
            return Err(Error::InvalidParameter("the prime set S must be non-empty".into()));
        }
        if let Some(p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        if eps < Rational64::zero() {
            return Err(Error::InvalidParameter("eps must be non-negative".into()));
        }
        if !(k_const >= 0.0 && k_const.is_finite()) {
            return Err(Error::InvalidParameter("K must be finite and non-negative".into()));
        }
        Ok(Self {
            root,
            primes,
            eps,
            k_const,
            depth,
        })
    }

    /// Product of the primes in S, the largest radical an S-integer can have.
    pub fn rad_s(&self) -> BigUint {
        self.primes.iter().map(|&p| BigUint::from(p)).product()
    }

    /// `q > 1` with every prime factor in S.
    pub fn is_s_integer(&self, q: &BigUint) -> bool {
        if q <= &BigUint::one() {
            return false;
        }
        let mut rest = q.clone();
        for &p in &self.primes {
            let p = BigUint::from(p);
            while (&rest % &p).is_zero() {
                rest /= &p;
            }
        }
        rest.is_one()
    }

    fn require_degree(&self, s: u32) -> Result<()> {
        if self.root.s() != s {
            return Err(Error::InvalidParameter(format!("expected a degree {s} root, got {}", self.root)));
        }
        Ok(())
    }
}

/// `(K * radS^(1+e) * k^(1+e))^((1+e)/2)` for a square root.
pub fn ridout_sqrt_bound(query: &RidoutQuery) -> Result<f64> {
    query.require_degree(2)?;
    let e = 1.0 + rational_to_f64(&query.eps);
    let rad = query.rad_s().to_f64().unwrap_or(f64::INFINITY);
    let base = query.k_const * rad.powf(e) * (query.root.k() as f64).powf(e);
    Ok(base.powf(e / 2.0))
}

fn within_bound(p: &BigUint, bound: f64) -> bool {
    if bound.is_infinite() {
        return true;
    }
    match BigRational::from_float(bound) {
        Some(b) => BigRational::from_integer(BigInt::from(p.clone())) <= b,
        None => false,
    }
}

/// Convergents `p/q` of a square root with `q > 1` an S-integer,
/// `p^2 - k q^2 = +-1`, and `p` within [`ridout_sqrt_bound`].
pub fn ridout_sqrt_solutions(query: &RidoutQuery) -> Result<Vec<Convergent>> {
    let bound = ridout_sqrt_bound(query)?;
    let convs = expand(query.root, query.depth)?.convergents();
    Ok(convs
        .into_iter()
        .filter(|c| query.is_s_integer(&c.q))
        .filter(|c| query.root.defect(&c.p, &c.q).abs().is_one())
        .filter(|c| within_bound(&c.p, bound))
        .collect())
}

/// `(K * radS^(1+e) * k^(2+2e) * (p1/q1)^(1+e))^(2(1+e)/3)` for a cube root.
pub fn ridout_cbrt_bound(query: &RidoutQuery, p1_over_q1: Rational64) -> Result<f64> {
    query.require_degree(3)?;
    if !ratio_gt_root(p1_over_q1, query.root) {
        return Err(Error::InvalidParameter(format!("p1/q1 = {p1_over_q1} must exceed {}", query.root)));
    }
    if query.k_const == 0.0 {
        return Ok(0.0);
    }
    let e = 1.0 + rational_to_f64(&query.eps);
    let log_base = query.k_const.ln()
        + e * log_big(&query.rad_s())
        + 2.0 * e * (query.root.k() as f64).ln()
        + e * rational_to_f64(&p1_over_q1).ln();
    Ok((2.0 * e / 3.0 * log_base).exp())
}

/// Convergents of a cube root with S-integer `q > 1` and `p` within [`ridout_cbrt_bound`].
pub fn ridout_cbrt_candidates(query: &RidoutQuery, p1_over_q1: Rational64) -> Result<Vec<Convergent>> {
    let bound = ridout_cbrt_bound(query, p1_over_q1)?;
    let convs = expand(query.root, query.depth)?.convergents();
    Ok(convs
        .into_iter()
        .filter(|c| query.is_s_integer(&c.q) && within_bound(&c.p, bound))
        .collect())
}

/// Explicit ABC `c < L * rad(abc)^(3 + eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitAbcParams {
    l_eps: f64,
    eps: Rational64,
}

impl ExplicitAbcParams {
    pub fn new(l_eps: f64, eps: Rational64) -> Result<Self> {
        if !(l_eps > 0.0 && l_eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("L_eps must be positive, got {l_eps}")));
        }
        if eps < Rational64::zero() {
            return Err(Error::InvalidParameter(format!("eps must be non-negative, got {eps}")));
        }
        Ok(Self { l_eps, eps })
    }
}

/// `ln(k^2 p^3) / ln((p^3 / L)^(1/(3+eps)))`, which tends to `3 + eps` as `p` grows.
pub fn explicit_power_gain_bound(k: u64, p_n: &BigUint, params: &ExplicitAbcParams) -> Result<f64> {
    let cube = BigRational::from_integer(BigInt::from(p_n.pow(3)));
    let l = BigRational::from_float(params.l_eps).expect("finite");
    if cube <= l {
        return Err(Error::BoundUndefined(format!(
            "p^3 = {} does not exceed L = {}; n is not large enough",
            cube, params.l_eps
        )));
    }
    let exponent = 3.0 + rational_to_f64(&params.eps);
    let num = 2.0 * (k as f64).ln() + 3.0 * log_big(p_n);
    let den = (3.0 * log_big(p_n) - params.l_eps.ln()) / exponent;
    Ok(num / den)
}

/// Result of scanning `|alpha - p/q| * q^e` over denominators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledErrorScan {
    pub exponent: String,
    pub q_max: u64,
    /// Smallest value over the non-excluded denominators, and where it occurs.
    pub min_value: f64,
    pub argmin_q: u64,
    /// Non-excluded denominators whose value is certified `<= 1`.
    pub violations: Vec<u64>,
    /// Values at the excluded denominators.
    pub excluded: Vec<(u64, f64)>,
}

/// `|alpha - p/q| * q^exponent` for the nearest numerator `p`, as a float.
pub fn scaled_error(root: RootSpec, q: u64, exponent: Rational64) -> f64 {
    let (_, upper, _) = scaled_gap(root, q, 192);
    // upper / 2^192 approximates |alpha q - p| far beyond f64 precision
    let gap = (log_big(&upper) - 192.0 * std::f64::consts::LN_2).exp();
    gap * (q as f64).powf(rational_to_f64(&exponent) - 1.0)
}

// Bounds on |alpha q - p| scaled by 2^bits for the nearest p: (lower, upper, p).
fn scaled_gap(root: RootSpec, q: u64, bits: u64) -> (BigUint, BigUint, BigUint) {
    let r = root.enclosure(bits);
    let scale = BigUint::one() << bits;
    let q_big = BigUint::from(q);
    let lo = &r * &q_big;
    let hi = (&r + 1u32) * &q_big;
    // nearest integer to alpha q (the enclosure is far narrower than 1/2)
    let p = (&lo + (&scale >> 1u32)) / &scale;
    let target = &p * &scale;
    let dist = |x: &BigUint| if x > &target { x - &target } else { &target - x };
    let (d_lo, d_hi) = (dist(&lo), dist(&hi));
    let straddles = (lo <= target) && (target <= hi);
    let lower = if straddles { BigUint::zero() } else { d_lo.clone().min(d_hi.clone()) };
    (lower, d_lo.max(d_hi), p)
}

/// Scan `2 <= q <= q_max` and certify `|alpha - p/q| q^e > 1` exactly for
/// every `q` outside `exclude`.
pub fn scaled_error_scan(root: RootSpec, q_max: u64, exponent: Rational64, exclude: &[u64]) -> Result<ScaledErrorScan> {
    if exponent <= Rational64::one() {
        return Err(Error::InvalidParameter("exponent must exceed 1".into()));
    }
    let (u, v) = (*exponent.numer() as u32, *exponent.denom() as u32);
    let mut scan = ScaledErrorScan {
        exponent: exponent.to_string(),
        q_max,
        min_value: f64::INFINITY,
        argmin_q: 0,
        violations: Vec::new(),
        excluded: Vec::new(),
    };
    for q in 2..=q_max {
        let value = scaled_error(root, q, exponent);
        if exclude.contains(&q) {
            scan.excluded.push((q, value));
            continue;
        }
        if value < scan.min_value {
            scan.min_value = value;
            scan.argmin_q = q;
        }
        // |alpha q - p|^v q^(u - v) > 1, with the gap bounded below by the enclosure
        let mut bits = 128;
        let certified = loop {
            let (lower, upper, _) = scaled_gap(root, q, bits);
            let q_pow = BigUint::from(q).pow(u - v);
            let threshold = BigUint::one() << (bits * v as u64);
            if lower.pow(v) * &q_pow > threshold {
                break true;
            }
            if upper.pow(v) * &q_pow <= threshold {
                break false;
            }
            bits *= 2;
            if bits > 1 << 14 {
                break false;
            }
        };
        if !certified {
            scan.violations.push(q);
        }
    }
    Ok(scan)
}

/// Numbers printed next to a table, kept together so callers can compare.
pub fn published_cbrt2_rows() -> impl Iterator<Item = (Rational64, f64, f64)> {
    PUBLISHED_CBRT2.iter().map(|(n, d, k, b, _)| (Rational64::new(*n, *d), *k, *b))
}

/// K_eps of the equation of convergent `n` of `root`.
pub fn equation_k_epsilon(root: RootSpec, n: usize, eps_abc: Rational64, factorizer: &Factorizer) -> Result<f64> {
    let convs = expand(root, n + 1)?.convergents();
    let eq = resulting_equation(root, &convs[n])?;
    Ok(equation_metrics(&eq, &[eps_abc], factorizer)?.k_epsilon[0].1)
}
