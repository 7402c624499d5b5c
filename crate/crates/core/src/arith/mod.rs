//! Exact integer utilities: nth roots, primality, factorization, radicals
//! and logarithms of big integers.

mod factor;
mod log;
mod primes;
mod roots;

pub use factor::{radical, FactorConfig, FactoredInteger, Factorizer};
pub use log::{log_big, log_bigint};
pub use primes::{is_prime, is_prime_u64, small_primes};
pub use roots::{integer_nth_root, is_perfect_power};
