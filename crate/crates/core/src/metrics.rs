//! Quality, hit detection, K_eps and the two gains of a resulting equation.
//!
//! For a resulting equation with `D = |d| q k p`:
//!
//! * approximation gain = `ln(k q^s) / ln D` when `d > 0`, `ln(p^s) / ln D` when `d < 0`
//! * power gain = `ln D / ln rad(D)`
//!
//! Radicals of equation triples are assembled from the factorizations of
//! `p`, `q`, `k` and `|d|` rather than of the (much larger) triple entries.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::arith::{log_big, Factorizer};
use crate::equation::{normalize_to_abc, AbcTriple, Form, ResultingEquation};
use crate::error::{Error, Result};

/// Everything computed for one triple (and, when available, its equation).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub triple: AbcTriple,
    pub rad_abc: BigUint,
    pub quality: f64,
    pub is_hit: bool,
    /// `(eps, K_eps)` pairs in the order requested.
    pub k_epsilon: Vec<(Rational64, f64)>,
    pub approximation_gain: Option<f64>,
    pub power_gain: Option<f64>,
    /// Some prime factor above 2^64 was only probabilistically certified.
    pub probable_primes: bool,
}

pub fn rational_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `ln c / ln rad`.
pub fn quality_from_rad(c: &BigUint, rad: &BigUint) -> Result<f64> {
    if rad < &BigUint::from(2u32) {
        return Err(Error::InvalidParameter("quality needs rad(abc) >= 2".into()));
    }
    Ok(log_big(c) / log_big(rad))
}

/// `c / rad^(1 + eps)`, evaluated in log space.
pub fn k_epsilon_from_rad(c: &BigUint, rad: &BigUint, eps: Rational64) -> f64 {
    let exponent = 1.0 + rational_to_f64(&eps);
    (log_big(c) - exponent * log_big(rad)).exp()
}

/// rad(abc) of a coprime triple: the product of the three radicals.
pub fn triple_radical(t: &AbcTriple, factorizer: &Factorizer) -> Result<BigUint> {
    let mut rad = BigUint::one();
    for x in [t.a(), t.b(), t.c()] {
        rad *= factorizer.radical(x)?;
    }
    Ok(rad)
}

pub fn quality(t: &AbcTriple) -> Result<f64> {
    quality_from_rad(t.c(), &triple_radical(t, &Factorizer::default())?)
}

/// `rad(abc) < c`.
pub fn is_hit(t: &AbcTriple) -> Result<bool> {
    Ok(triple_radical(t, &Factorizer::default())? < *t.c())
}

pub fn k_epsilon(t: &AbcTriple, eps: Rational64) -> Result<f64> {
    let rad = triple_radical(t, &Factorizer::default())?;
    Ok(k_epsilon_from_rad(t.c(), &rad, eps))
}

/// The smaller power side, `k q^s` if `d > 0` and `p^s` if `d < 0`.
pub fn gain_numerator(eq: &ResultingEquation) -> BigUint {
    match eq.form() {
        Form::PowerLarger => eq.norm_side(),
        Form::NormLarger => eq.power_side(),
    }
}

pub fn approximation_gain(eq: &ResultingEquation) -> Result<f64> {
    let denom = eq.gain_product();
    if denom.is_one() {
        return Err(Error::GainUndefined);
    }
    Ok(log_big(&gain_numerator(eq)) / log_big(&denom))
}

pub fn power_gain(eq: &ResultingEquation) -> Result<f64> {
    power_gain_with(eq, &Factorizer::default())
}

pub fn power_gain_with(eq: &ResultingEquation, factorizer: &Factorizer) -> Result<f64> {
    let rads = EquationRadicals::compute(eq, factorizer)?;
    power_gain_from_rad(eq, &rads.rad_gain_product)
}

fn power_gain_from_rad(eq: &ResultingEquation, rad: &BigUint) -> Result<f64> {
    if rad.is_one() {
        return Err(Error::GainUndefined);
    }
    Ok(log_big(&eq.gain_product()) / log_big(rad))
}

/// Radicals of an equation, from the primes of `p`, `q`, `k` and `|d|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationRadicals {
    /// rad(|d| q k p)
    pub rad_gain_product: BigUint,
    /// rad(abc) of the normalized triple
    pub rad_abc: BigUint,
    pub probable_primes: bool,
}

impl EquationRadicals {
    pub fn compute(eq: &ResultingEquation, factorizer: &Factorizer) -> Result<Self> {
        let k = BigUint::from(eq.root().k());
        let mut primes = BTreeSet::new();
        let mut probable = false;
        for x in [eq.p(), eq.q(), &k, eq.abs_d()] {
            let f = factorizer.factorize(x)?;
            probable |= f.is_probable();
            primes.extend(f.primes().cloned());
        }
        let rad_gain_product = primes.iter().product();
        // dividing by g can remove a prime entirely, so test each one against
        // the triple itself
        let triple = normalize_to_abc(eq)?;
        let rad_abc = primes
            .iter()
            .filter(|p| [triple.a(), triple.b(), triple.c()].iter().any(|x| (*x % *p).is_zero()))
            .product();
        Ok(Self {
            rad_gain_product,
            rad_abc,
            probable_primes: probable,
        })
    }
}

/// Full metrics for a resulting equation.
pub fn equation_metrics(
    eq: &ResultingEquation,
    eps: &[Rational64],
    factorizer: &Factorizer,
) -> Result<MetricsRecord> {
    let triple = normalize_to_abc(eq)?;
    let rads = EquationRadicals::compute(eq, factorizer)?;
    let quality = quality_from_rad(triple.c(), &rads.rad_abc)?;
    Ok(MetricsRecord {
        is_hit: rads.rad_abc < *triple.c(),
        k_epsilon: eps
            .iter()
            .map(|&e| (e, k_epsilon_from_rad(triple.c(), &rads.rad_abc, e)))
            .collect(),
        approximation_gain: Some(approximation_gain(eq)?),
        power_gain: Some(power_gain_from_rad(eq, &rads.rad_gain_product)?),
        probable_primes: rads.probable_primes,
        rad_abc: rads.rad_abc,
        quality,
        triple,
    })
}

/// Metrics for a bare triple; the gains are absent.
pub fn triple_metrics(t: &AbcTriple, eps: &[Rational64], factorizer: &Factorizer) -> Result<MetricsRecord> {
    let mut rad = BigUint::one();
    let mut probable = false;
    for x in [t.a(), t.b(), t.c()] {
        let f = factorizer.factorize(x)?;
        probable |= f.is_probable();
        rad *= f.radical();
    }
    Ok(MetricsRecord {
        triple: t.clone(),
        quality: quality_from_rad(t.c(), &rad)?,
        is_hit: rad < *t.c(),
        k_epsilon: eps.iter().map(|&e| (e, k_epsilon_from_rad(t.c(), &rad, e))).collect(),
        approximation_gain: None,
        power_gain: None,
        probable_primes: probable,
        rad_abc: rad,
    })
}

/// Index of the largest K_eps among `records` for the given eps.
pub fn argmax_k_epsilon(records: &[MetricsRecord], eps: Rational64) -> Option<usize> {
    records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.k_epsilon.iter().find(|(e, _)| *e == eps).map(|(_, v)| (i, *v)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

pub fn format_metric(x: f64) -> String {
    format!("{x:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{expand, RootSpec};
    use crate::equation::equations;
    use num_traits::ToPrimitive;

    fn cbrt2(terms: usize) -> Vec<ResultingEquation> {
        let root = RootSpec::new(2, 3).unwrap();
        equations(root, &expand(root, terms).unwrap().convergents()).unwrap()
    }

    fn t(a: u64, b: u64, c: u64) -> AbcTriple {
        AbcTriple::from_u64(a, b, c).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn quality_examples() {
        // 2 + 3^10 * 109 = 23^5
        let record = t(2, 6436341, 6436343);
        assert!(close(quality(&record).unwrap(), 1.62991, 1e-4));
        assert_eq!(quality(&t(1, 1, 2)).unwrap(), 1.0);
        // ln 128 / ln 30
        assert!(close(quality(&t(3, 125, 128)).unwrap(), 1.4265653296335434, 1e-12));
    }

    #[test]
    fn hits() {
        assert!(is_hit(&t(3, 125, 128)).unwrap());
        assert!(!is_hit(&t(1, 1, 2)).unwrap());
        assert!(is_hit(&t(1, 8, 9)).unwrap());
        // rad = 30 < 32
        assert!(is_hit(&t(5, 27, 32)).unwrap());
    }

    #[test]
    fn k_epsilon_examples() {
        let tr = t(3, 125, 128);
        assert!(close(k_epsilon(&tr, Rational64::new(1, 5)).unwrap(), 2.16, 0.01));
        assert!(close(k_epsilon(&tr, Rational64::new(2, 13)).unwrap(), 2.527, 0.01));
        assert!(close(k_epsilon(&tr, Rational64::new(1, 2)).unwrap(), 0.78, 0.01));
        assert!(close(k_epsilon(&tr, Rational64::zero()).unwrap(), 128.0 / 30.0, 1e-12));
    }

    #[test]
    fn gains_of_cube_root_of_two() {
        let eqs = cbrt2(6);
        // 2 = 1 + 1: numerator ln 1
        assert_eq!(approximation_gain(&eqs[0]).unwrap(), 0.0);
        assert!(close(power_gain(&eqs[0]).unwrap(), 1.0, 1e-15));
        // 128 = 125 + 3: ln 125 / ln 120 and ln 120 / ln 30
        assert!(close(approximation_gain(&eqs[2]).unwrap(), 125f64.ln() / 120f64.ln(), 1e-12));
        assert!(close(approximation_gain(&eqs[2]).unwrap(), 1.01, 0.005));
        assert!(close(power_gain(&eqs[2]).unwrap(), 120f64.ln() / 30f64.ln(), 1e-12));
        // 63/50: d = 47, ln 250000 / ln 296100 and ln 296100 / ln 9870
        assert_eq!(eqs[5].d().to_string(), "47");
        assert!(close(approximation_gain(&eqs[5]).unwrap(), 250000f64.ln() / 296100f64.ln(), 1e-12));
        assert!(close(power_gain(&eqs[5]).unwrap(), 296100f64.ln() / 9870f64.ln(), 1e-12));
    }

    #[test]
    fn equation_metrics_match_triple_metrics() {
        let fz = Factorizer::default();
        let eps = [Rational64::zero(), Rational64::new(1, 5)];
        for eq in cbrt2(14) {
            let from_eq = equation_metrics(&eq, &eps, &fz).unwrap();
            let from_triple = triple_metrics(&from_eq.triple, &eps, &fz).unwrap();
            assert_eq!(from_eq.rad_abc, from_triple.rad_abc, "{eq}");
            assert_eq!(from_eq.quality, from_triple.quality);
            assert_eq!(from_eq.is_hit, from_eq.quality > 1.0);
        }
    }

    #[test]
    fn k_epsilon_monotone() {
        let fz = Factorizer::default();
        let grid: Vec<Rational64> = (0..=20).map(|i| Rational64::new(i, 20)).collect();
        for eq in cbrt2(12) {
            let m = equation_metrics(&eq, &grid, &fz).unwrap();
            let c = m.triple.c().to_f64().unwrap();
            let rad = m.rad_abc.to_f64().unwrap();
            assert!(close(m.k_epsilon[0].1, c / rad, 1e-9 * c / rad));
            for w in m.k_epsilon.windows(2) {
                assert!(w[1].1 <= w[0].1);
            }
        }
    }

    #[test]
    fn argmax_over_corpus() {
        let fz = Factorizer::default();
        let eps = [Rational64::new(1, 2), Rational64::new(1, 5)];
        let records: Vec<_> = cbrt2(11)[1..]
            .iter()
            .map(|e| equation_metrics(e, &eps, &fz).unwrap())
            .collect();
        // eps = 1/2: 128 = 125 + 3 (index 2) dominates the first ten equations
        assert_eq!(argmax_k_epsilon(&records, eps[0]), Some(1));
        // eps = 1/5: the 63/50 equation overtakes it
        assert_eq!(argmax_k_epsilon(&records, eps[1]), Some(4));
    }
}
