//! Exact arithmetic over Q and its completions.

pub mod factor;
pub mod fp_curve;
pub mod hilbert;
pub mod modular;
pub mod padic;
pub mod place;
pub mod poly;
pub mod primes;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use factor::{factor, Factorization};
pub use fp_curve::{count_points_hyperelliptic, find_smooth_fp_point, hasse_weil_holds, Chart, FpPoint};
pub use hilbert::hilbert_symbol;
pub use modular::{hensel_nth_root, hensel_sqrt, jacobi, legendre, roots_mod_p, sqrt_mod_prime};
pub use padic::{is_local_square, padic_val, padic_val_int, unit_part};
pub use place::Place;
pub use poly::Polynomial;
pub use primes::{is_prime, is_prime_u64, primes_up_to, PRIMALITY_BOUND};

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} exceeds the deterministic primality range")]
    PrimalityBound(BigInt),
    #[error("{0} is not an odd prime")]
    NotOddPrime(BigInt),
    #[error("{0} is not a prime")]
    NotPrime(BigInt),
    #[error("zero argument")]
    Zero,
    #[error("{0} is not a unit at the given prime")]
    NotUnit(String),
    #[error("polynomial is not separable modulo {0}")]
    Singular(BigInt),
    #[error("{0}")]
    Domain(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_int(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Residue of a p-integral rational modulo m, or None when the denominator is not invertible.
pub fn reduce_mod(x: &Rational, m: &BigInt) -> Option<BigInt> {
    let inv = inv_mod(x.denom(), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

pub fn pow_rat(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

/// Perfect square test over Z; returns the nonnegative root.
pub fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    if n.is_zero() {
        return Some(BigInt::zero());
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Whether a rational number is a square in Q.
pub fn is_rational_square(x: &Rational) -> bool {
    int_sqrt_exact(x.numer()).is_some() && int_sqrt_exact(x.denom()).is_some()
}

pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    Some(Rational::new(int_sqrt_exact(x.numer())?, int_sqrt_exact(x.denom())?))
}

pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}
