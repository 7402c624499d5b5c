//! Resulting equations `p^s = k q^s + d` of convergents and the coprime
//! ABC triples obtained by dividing out their common factor.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::{Convergent, RootSpec};
use crate::error::{Error, Result};

/// Which side of the identity is the larger power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `d > 0`: `p^s = k q^s + d`.
    PowerLarger,
    /// `d < 0`: `k q^s = p^s + |d|`.
    NormLarger,
}

/// The identity `p^s = k q^s + d` for one convergent, with its gcd `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultingEquation {
    root: RootSpec,
    n: usize,
    p: BigUint,
    q: BigUint,
    d: BigInt,
    g: u64,
}

impl ResultingEquation {
    pub fn root(&self) -> RootSpec {
        self.root
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// Signed `d = p^s - k q^s`.
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn abs_d(&self) -> &BigUint {
        self.d.magnitude()
    }

    /// Common factor of the two smaller addends; `1 <= g <= k`.
    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn form(&self) -> Form {
        if self.d.is_positive() {
            Form::PowerLarger
        } else {
            Form::NormLarger
        }
    }

    /// `p^s`.
    pub fn power_side(&self) -> BigUint {
        self.p.pow(self.root.s())
    }

    /// `k q^s`.
    pub fn norm_side(&self) -> BigUint {
        BigUint::from(self.root.k()) * self.q.pow(self.root.s())
    }

    /// Positive arrangement `larger = other + |d|`, returned as `(larger, other, |d|)`.
    pub fn arrangement(&self) -> (BigUint, BigUint, BigUint) {
        let (larger, other) = match self.form() {
            Form::PowerLarger => (self.power_side(), self.norm_side()),
            Form::NormLarger => (self.norm_side(), self.power_side()),
        };
        (larger, other, self.abs_d().clone())
    }

    /// `|d| q k p`, the product whose logarithm appears in both gains.
    pub fn gain_product(&self) -> BigUint {
        self.abs_d() * &self.q * BigUint::from(self.root.k()) * &self.p
    }
}

impl fmt::Display for ResultingEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (larger, other, d) = self.arrangement();
        write!(f, "{larger} = {other} + {d}")
    }
}

/// Coprime positive integers with `a + b = c` and `a <= b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbcTriple {
    a: BigUint,
    b: BigUint,
    c: BigUint,
}

impl AbcTriple {
    /// Orders `a` and `b`, then checks the sum and pairwise coprimality.
    pub fn new(a: BigUint, b: BigUint, c: BigUint) -> Result<Self> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a.is_zero() {
            return Err(Error::InvalidParameter("triple entries must be positive".into()));
        }
        if &a + &b != c {
            return Err(Error::InvalidParameter(format!("{a} + {b} != {c}")));
        }
        if !(a.gcd(&b).is_one() && a.gcd(&c).is_one() && b.gcd(&c).is_one()) {
            return Err(Error::NotCoprime {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
            });
        }
        Ok(Self { a, b, c })
    }

    pub fn from_u64(a: u64, b: u64, c: u64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn a(&self) -> &BigUint {
        &self.a
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub fn c(&self) -> &BigUint {
        &self.c
    }
}

impl fmt::Display for AbcTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {} = {}", self.a, self.b, self.c)
    }
}

/// Build the resulting equation of `conv`, a convergent of `root`.
pub fn resulting_equation(root: RootSpec, conv: &Convergent) -> Result<ResultingEquation> {
    let d = root.defect(&conv.p, &conv.q);
    if d.is_zero() {
        return Err(Error::DegenerateEquation);
    }
    // gcd of |d| with the smaller power side; equals gcd(k q^s, d) when d > 0
    // and gcd(p^s, |d|) when d < 0
    let other = if d.is_positive() {
        BigUint::from(root.k()) * conv.q.pow(root.s())
    } else {
        conv.p.pow(root.s())
    };
    let g = other.gcd(d.magnitude());
    let g = g.to_u64().filter(|&g| g <= root.k()).ok_or_else(|| {
        Error::InvalidParameter(format!("gcd {g} exceeds k = {}; {} is not a convergent of {root}", root.k(), conv))
    })?;
    Ok(ResultingEquation {
        root,
        n: conv.n,
        p: conv.p.clone(),
        q: conv.q.clone(),
        d,
        g,
    })
}

/// Divide the positive arrangement by `g` to get a coprime triple.
pub fn normalize_to_abc(eq: &ResultingEquation) -> Result<AbcTriple> {
    let (larger, other, abs_d) = eq.arrangement();
    let g = BigUint::from(eq.g);
    debug_assert!((&larger % &g).is_zero() && (&other % &g).is_zero() && (&abs_d % &g).is_zero());
    AbcTriple::new(other / &g, abs_d / &g, larger / &g)
}

/// Resulting equations for every convergent in `convs`.
pub fn equations(root: RootSpec, convs: &[Convergent]) -> Result<Vec<ResultingEquation>> {
    convs.iter().map(|c| resulting_equation(root, c)).collect()
}
