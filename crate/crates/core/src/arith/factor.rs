use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::primes::{is_prime, is_prime_u64, mul_mod, small_primes, SIEVE_LIMIT};
use super::roots::is_perfect_power;
use crate::error::{Error, Result};

/// A positive integer together with its prime factorization.
///
/// Primes are strictly increasing. `probable` is set when some factor is
/// above 2^64 and was only certified by Miller-Rabin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
    probable: bool,
}

impl FactoredInteger {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn is_probable(&self) -> bool {
        self.probable
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> BigUint {
        self.primes().product()
    }

    /// Multiply the factorization back out.
    pub fn reconstruct(&self) -> BigUint {
        self.factors.iter().map(|(p, e)| p.pow(*e)).product()
    }
}

/// Effort limits for [`Factorizer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorConfig {
    /// Trial division covers all primes up to this bound (at most one million).
    pub trial_bound: u32,
    /// Total Pollard-rho iterations allowed per composite cofactor.
    pub rho_iterations: u64,
    /// Composite cofactors wider than this are rejected outright.
    pub max_composite_bits: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            trial_bound: SIEVE_LIMIT,
            rho_iterations: 1 << 23,
            max_composite_bits: 256,
        }
    }
}

/// Trial division followed by Miller-Rabin and Brent's variant of Pollard rho.
#[derive(Debug, Clone, Default)]
pub struct Factorizer {
    config: FactorConfig,
}

const BLOCK_LEN: usize = 256;

struct PrimeBlock {
    start: usize,
    end: usize,
    product: BigUint,
}

// Products of consecutive sieve primes; a gcd against each block finds the
// blocks that actually need per-prime division.
fn prime_blocks() -> &'static [PrimeBlock] {
    static BLOCKS: OnceLock<Vec<PrimeBlock>> = OnceLock::new();
    BLOCKS.get_or_init(|| {
        let primes = small_primes();
        (0..primes.len())
            .step_by(BLOCK_LEN)
            .map(|start| {
                let end = (start + BLOCK_LEN).min(primes.len());
                let product = primes[start..end].iter().map(|&p| BigUint::from(p)).product();
                PrimeBlock { start, end, product }
            })
            .collect()
    })
}

impl Factorizer {
    pub fn new(config: FactorConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &FactorConfig {
        &self.config
    }

    pub fn factorize(&self, x: &BigUint) -> Result<FactoredInteger> {
        assert!(!x.is_zero(), "cannot factorize zero");
        let mut found: Vec<BigUint> = Vec::new();
        let mut rest = x.clone();
        self.trial_divide(&mut rest, &mut found);

        let mut probable = false;
        let mut pending = Vec::new();
        if !rest.is_one() {
            pending.push(rest);
        }
        while let Some(n) = pending.pop() {
            let bound = BigUint::from(self.config.trial_bound.min(SIEVE_LIMIT));
            if n < &bound * &bound || is_prime(&n) {
                probable |= n.bits() > 64;
                found.push(n);
                continue;
            }
            if n.bits() > self.config.max_composite_bits {
                return Err(Error::FactorizationBudgetExceeded { bits: n.bits() });
            }
            let d = self.split(&n)?;
            let other = &n / &d;
            pending.push(d);
            pending.push(other);
        }

        found.sort();
        let mut factors: Vec<(BigUint, u32)> = Vec::new();
        for p in found {
            match factors.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        Ok(FactoredInteger {
            value: x.clone(),
            factors,
            probable,
        })
    }

    pub fn radical(&self, x: &BigUint) -> Result<BigUint> {
        Ok(self.factorize(x)?.radical())
    }

    fn trial_divide(&self, n: &mut BigUint, found: &mut Vec<BigUint>) {
        let primes = small_primes();
        let limit = self.config.trial_bound.min(SIEVE_LIMIT);
        for block in prime_blocks() {
            if n.is_one() {
                return;
            }
            let first = primes[block.start] as u64;
            if first > limit as u64 {
                return;
            }
            // nothing below first^2 can be composite at this point
            if n.bits() <= 64 {
                let small = n.to_u64().unwrap();
                if small < first * first || is_prime_u64(small) {
                    found.push(n.clone());
                    *n = BigUint::one();
                    return;
                }
            }
            if (&block.product % &*n).gcd(n).is_one() {
                continue;
            }
            for &p in &primes[block.start..block.end] {
                if p > limit {
                    break;
                }
                let pb = BigUint::from(p);
                loop {
                    let (quot, rem) = n.div_rem(&pb);
                    if !rem.is_zero() {
                        break;
                    }
                    *n = quot;
                    found.push(pb.clone());
                }
            }
        }
    }

    /// A nontrivial divisor of the composite `n`.
    fn split(&self, n: &BigUint) -> Result<BigUint> {
        for s in [2u32, 3, 5, 7] {
            if let Some(r) = is_perfect_power(n, s) {
                return Ok(r);
            }
        }
        let mut remaining = self.config.rho_iterations;
        let mut c = 1u64;
        while remaining > 0 {
            let (hit, used) = match n.to_u64() {
                Some(small) => {
                    let (d, used) = rho_u64(small, c, remaining);
                    (d.map(BigUint::from), used)
                }
                None => rho_big(n, c, remaining),
            };
            if let Some(d) = hit {
                return Ok(d);
            }
            remaining = remaining.saturating_sub(used.max(1));
            c += 1;
        }
        Err(Error::FactorizationBudgetExceeded { bits: n.bits() })
    }
}

/// Radical with the default factorizer.
pub fn radical(x: &BigUint) -> Result<BigUint> {
    Factorizer::default().radical(x)
}

const RHO_BATCH: u64 = 128;

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

// Brent's cycle detection on x -> x^2 + c (mod n), multiplying differences
// in batches before taking a gcd. Returns the divisor (if found) and the
// number of iterations spent.
fn rho_u64(n: u64, c: u64, budget: u64) -> (Option<u64>, u64) {
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
    let (mut r, mut q, mut g) = (1u64, 1u64, 1u64);
    let mut used = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        used += r;
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = RHO_BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            used += steps;
            g = gcd_u64(q, n);
            k += steps;
        }
        r *= 2;
        if used > budget && g == 1 {
            return (None, used);
        }
    }
    if g == n {
        // the batch overshot; replay it one step at a time
        loop {
            ys = f(ys);
            used += 1;
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 || used > budget {
                break;
            }
        }
    }
    if g > 1 && g < n {
        (Some(g), used)
    } else {
        (None, used)
    }
}

fn rho_big(n: &BigUint, c: u64, budget: u64) -> (Option<BigUint>, u64) {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let two = BigUint::from(2u32);
    let (mut x, mut y, mut ys) = (two.clone(), two.clone(), two);
    let (mut r, mut q, mut g) = (1u64, BigUint::one(), BigUint::one());
    let mut used = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        used += r;
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = RHO_BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = (&q * diff(&x, &y)) % n;
            }
            used += steps;
            g = q.gcd(n);
            k += steps;
        }
        r *= 2;
        if used > budget && g.is_one() {
            return (None, used);
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            used += 1;
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() || used > budget {
                break;
            }
        }
    }
    if !g.is_one() && &g != n {
        (Some(g), used)
    } else {
        (None, used)
    }
}
