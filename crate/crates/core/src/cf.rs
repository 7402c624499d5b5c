//! Certified regular continued fractions of `k^(1/s)` and their convergents.
//!
//! The root is enclosed in a dyadic interval `[r / 2^B, (r + 1) / 2^B]` with
//! `r = floor(k^(1/s) * 2^B)`, and the continued fraction algorithm runs on
//! both endpoints at once. A partial quotient is accepted only when the two
//! endpoints agree on it; otherwise the precision is doubled and the
//! expansion restarts.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{integer_nth_root, is_perfect_power};
use crate::error::{Error, Result};

/// Maximum number of precision doublings before giving up.
pub const MAX_DOUBLINGS: u32 = 8;
/// Starting precision per requested term, in bits.
pub const BITS_PER_TERM: u64 = 64;

/// The real number `k^(1/s)` with `k` not a perfect s-th power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootSpec {
    k: u64,
    s: u32,
}

impl RootSpec {
    pub fn new(k: u64, s: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidRoot(format!("k must be at least 2, got {k}")));
        }
        if s < 2 {
            return Err(Error::InvalidRoot(format!("s must be at least 2, got {s}")));
        }
        if let Some(r) = is_perfect_power(&BigUint::from(k), s) {
            return Err(Error::InvalidRoot(format!("{k} = {r}^{s} is a perfect power")));
        }
        Ok(Self { k, s })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// `r` with `r / 2^bits < k^(1/s) < (r + 1) / 2^bits`.
    ///
    /// Both inequalities are strict because the root is irrational.
    pub fn enclosure(&self, bits: u64) -> BigUint {
        let scaled = BigUint::from(self.k) << (bits * self.s as u64);
        integer_nth_root(&scaled, self.s)
    }

    /// `p^s - k q^s`, the value of the scaled minimal polynomial at `p / q`.
    pub fn defect(&self, p: &BigUint, q: &BigUint) -> BigInt {
        BigInt::from(p.pow(self.s)) - BigInt::from(BigUint::from(self.k) * q.pow(self.s))
    }

    pub fn approx(&self) -> f64 {
        (self.k as f64).powf(1.0 / self.s as f64)
    }
}

impl fmt::Display for RootSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^(1/{})", self.k, self.s)
    }
}

/// Partial quotients `b_0, b_1, ...` of a root, each certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    root: RootSpec,
    coefficients: Vec<BigUint>,
    precision_bits: u64,
}

impl CfExpansion {
    pub fn root(&self) -> RootSpec {
        self.root
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    /// Precision of the enclosure that certified every coefficient.
    pub fn precision_bits(&self) -> u64 {
        self.precision_bits
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `b_n`, where `b_0` is the integer part.
    pub fn coefficient(&self, n: usize) -> Option<&BigUint> {
        self.coefficients.get(n)
    }

    pub fn convergents(&self) -> Vec<Convergent> {
        convergents(self)
    }
}

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut it = self.coefficients.iter();
        write!(f, "[")?;
        if let Some(b0) = it.next() {
            write!(f, "{b0}")?;
        }
        for (i, b) in it.enumerate() {
            write!(f, "{}{b}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, "]")
    }
}

/// The convergent `p_n / q_n` paired with coefficient `b_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub n: usize,
    pub p: BigUint,
    pub q: BigUint,
}

impl fmt::Display for Convergent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Expand `root` to `terms` certified partial quotients, starting at
/// `64 * terms` bits with up to eight doublings.
pub fn expand(root: RootSpec, terms: usize) -> Result<CfExpansion> {
    expand_with(root, terms, BITS_PER_TERM * terms as u64, MAX_DOUBLINGS)
}

pub fn expand_with(
    root: RootSpec,
    terms: usize,
    start_bits: u64,
    max_doublings: u32,
) -> Result<CfExpansion> {
    if terms == 0 {
        return Err(Error::InvalidParameter("terms must be at least 1".into()));
    }
    let mut bits = start_bits.max(1);
    let mut best = 0;
    for attempt in 0..=max_doublings {
        let coefficients = certified_prefix(root, bits, terms);
        best = best.max(coefficients.len());
        if coefficients.len() == terms {
            return Ok(CfExpansion {
                root,
                coefficients,
                precision_bits: bits,
            });
        }
        if attempt < max_doublings {
            bits *= 2;
        }
    }
    Err(Error::PrecisionExhausted {
        requested: terms,
        certified: best,
        bits,
    })
}

// Runs the continued fraction algorithm on both ends of the enclosure and
// returns the coefficients on which they agree.
fn certified_prefix(root: RootSpec, bits: u64, terms: usize) -> Vec<BigUint> {
    let r = root.enclosure(bits);
    let scale = BigUint::one() << bits;
    let (mut lo_num, mut lo_den) = (r.clone(), scale.clone());
    let (mut hi_num, mut hi_den) = (r + 1u32, scale);

    let mut out = Vec::with_capacity(terms);
    while out.len() < terms {
        let a = &lo_num / &lo_den;
        if a != &hi_num / &hi_den {
            break;
        }
        let lo_rem = &lo_num - &a * &lo_den;
        let hi_rem = &hi_num - &a * &hi_den;
        out.push(a);
        if out.len() == terms {
            break;
        }
        // the value lies strictly inside, so a zero remainder on the lower
        // end means the next quotient is unbounded at this precision
        if lo_rem.is_zero() || hi_rem.is_zero() {
            break;
        }
        // x in (lo, hi)  =>  1/(x - a) in (1/(hi - a), 1/(lo - a))
        let (next_lo_num, next_lo_den) = (hi_den, hi_rem);
        let (next_hi_num, next_hi_den) = (lo_den, lo_rem);
        lo_num = next_lo_num;
        lo_den = next_lo_den;
        hi_num = next_hi_num;
        hi_den = next_hi_den;
    }
    out
}

/// Convergents via `p_n = b_n p_(n-1) + p_(n-2)`, `q_n = b_n q_(n-1) + q_(n-2)`.
pub fn convergents(cf: &CfExpansion) -> Vec<Convergent> {
    let (mut p_prev, mut q_prev) = (BigUint::zero(), BigUint::one());
    let (mut p, mut q) = (BigUint::one(), BigUint::zero());
    let mut out = Vec::with_capacity(cf.len());
    for (n, b) in cf.coefficients.iter().enumerate() {
        let p_next = b * &p + &p_prev;
        let q_next = b * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        debug_assert!(p.gcd(&q).is_one());
        out.push(Convergent {
            n,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// `p_n q_(n-1) - p_(n-1) q_n`, which must equal `(-1)^(n-1)`.
pub fn determinant(prev: &Convergent, cur: &Convergent) -> BigInt {
    BigInt::from(&cur.p * &prev.q) - BigInt::from(&prev.p * &cur.q)
}

/// Whether `|root - p/q| < 1 / (q * q_next)`, decided exactly against an enclosure.
pub fn within_convergent_bound(root: RootSpec, conv: &Convergent, q_next: &BigUint, bits: u64) -> bool {
    let r = BigInt::from(root.enclosure(bits));
    let scale = BigInt::one() << bits;
    let p = BigInt::from(conv.p.clone());
    let q = BigInt::from(conv.q.clone());
    // |x - p/q| < 1/(q q')  <=>  |x q - p| q' < 1, checked at both endpoints
    // scaled by 2^bits; the root lies between them so the worse one bounds it.
    let lhs = |num: BigInt| (num * &q - &p * &scale).abs() * BigInt::from(q_next.clone());
    lhs(r.clone()) <= scale && lhs(r + 1) <= scale
}
