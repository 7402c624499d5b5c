use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Largest `r` with `r^s <= x`.
///
/// Starts from a float estimate nudged upward, runs integer Newton from above
/// and finishes with an explicit bracketing check.
pub fn integer_nth_root(x: &BigUint, s: u32) -> BigUint {
    assert!(s >= 1, "root degree must be at least 1");
    if s == 1 || x.is_zero() || x.is_one() {
        return x.clone();
    }
    let bits = x.bits();
    if bits <= s as u64 {
        // x < 2^s, so the root is 1
        return BigUint::one();
    }

    let mut r = initial_estimate(x, s);
    // Newton converges monotonically from above; make sure we start there.
    while &r.pow(s) <= x {
        r <<= 1u32;
    }
    let s_big = BigUint::from(s);
    let s_minus_one = BigUint::from(s - 1);
    loop {
        let next = (&s_minus_one * &r + x / r.pow(s - 1)) / &s_big;
        if next >= r {
            break;
        }
        r = next;
    }

    while &r.pow(s) > x {
        r -= 1u32;
    }
    loop {
        let up = &r + 1u32;
        if &up.pow(s) <= x {
            r = up;
        } else {
            break;
        }
    }
    r
}

fn initial_estimate(x: &BigUint, s: u32) -> BigUint {
    let bits = x.bits();
    // Keep the top 64 bits for the mantissa and fold the rest into an exponent
    // that is a multiple of s, so the root of the exponent part is exact.
    let shift = bits.saturating_sub(64) / s as u64 * s as u64;
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    let est = top.powf(1.0 / s as f64) * (1.0 + 1e-9) + 1.0;
    let est = BigUint::from(est.ceil() as u128);
    est << (shift / s as u64)
}

/// `Some(r)` when `x = r^s` exactly.
pub fn is_perfect_power(x: &BigUint, s: u32) -> Option<BigUint> {
    let r = integer_nth_root(x, s);
    if &r.pow(s) == x {
        Some(r)
    } else {
        None
    }
}
