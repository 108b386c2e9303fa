use super::ArithError;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Miller-Rabin with the bases 2, 3, ..., 41 is deterministic below this value.
pub const PRIMALITY_BOUND: &str = "3317044064679887385961981";

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn primality_bound() -> &'static BigInt {
    static B: OnceLock<BigInt> = OnceLock::new();
    B.get_or_init(|| PRIMALITY_BOUND.parse().unwrap())
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for every u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES[..12] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primality of n; inputs at or above [`PRIMALITY_BOUND`] are rejected.
pub fn is_prime(n: &BigInt) -> Result<bool, ArithError> {
    if let Some(m) = n.to_u64() {
        return Ok(is_prime_u64(m));
    }
    if n < &BigInt::zero() {
        return Ok(false);
    }
    if n >= primality_bound() {
        return Err(ArithError::PrimalityBound(n.clone()));
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return Ok(false);
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn agrees_with_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "{n}");
            assert_eq!(is_prime(&BigInt::from(n)).unwrap(), trial(n), "{n}");
        }
        let sieve = primes_up_to(20_000);
        assert_eq!(sieve.len(), (0..=20_000u64).filter(|&n| trial(n)).count());
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        for n in [2047u64, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383, 341550071728321] {
            assert!(!is_prime_u64(n), "{n}");
        }
        let n: BigInt = "3825123056546413051".parse().unwrap();
        assert!(!is_prime(&n).unwrap());
    }

    #[test]
    fn large_known_primes() {
        assert!(is_prime(&BigInt::from(1753u64)).unwrap());
        let m61 = (BigInt::one() << 61) - 1;
        assert!(is_prime(&m61).unwrap());
        let m89 = (BigInt::one() << 89) - 1;
        assert!(matches!(is_prime(&m89), Err(ArithError::PrimalityBound(_))));
        let p: BigInt = "1000000000000000000000007".parse().unwrap();
        assert!(is_prime(&p).unwrap());
        assert!(!is_prime(&(&p * 3)).unwrap());
    }
}
