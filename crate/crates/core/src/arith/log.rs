use std::f64::consts::LN_2;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

/// Natural logarithm of a positive big integer.
///
/// The top 64 bits become an f64 mantissa and the dropped bits are added
/// back as `shift * ln 2`, so the result keeps full double precision at any size.
pub fn log_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    assert!(bits > 0, "log of zero");
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("at most 64 bits after shift");
    (top as f64).ln() + shift as f64 * LN_2
}

/// Natural logarithm of `|x|`.
pub fn log_bigint(x: &BigInt) -> f64 {
    log_big(x.magnitude())
}
