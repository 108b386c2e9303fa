use super::modular::{jacobi, pm_gcd, sqrt_mod_prime, trim};
use super::{inv_mod, primes::is_prime, ArithError, Polynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Affine chart of a hyperelliptic curve: `st` is s^2 = f(t), `ST` is S^2 = F(T) with F the reversal of f.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    #[serde(rename = "st")]
    Affine,
    #[serde(rename = "ST")]
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoint {
    pub chart: Chart,
    pub s: BigInt,
    pub t: BigInt,
}

/// Largest prime accepted by naive point counting.
pub const COUNT_LIMIT: u64 = 1 << 25;

fn check_odd_prime(p: &BigInt) -> Result<(), ArithError> {
    if p.is_even() || !is_prime(p)? {
        return Err(ArithError::NotOddPrime(p.clone()));
    }
    Ok(())
}

/// Number of F_p-points on the smooth projective model of s^2 = f(t), deg f = 2g+2 or 2g+1.
pub fn count_points_hyperelliptic(f: &Polynomial, g: u32, p: &BigInt) -> Result<u64, ArithError> {
    check_odd_prime(p)?;
    let pu = p.to_u64().filter(|&q| q <= COUNT_LIMIT).ok_or_else(|| ArithError::Domain(format!("{p} too large to count")))?;
    let res = trim(f.residues(p).ok_or_else(|| ArithError::Singular(p.clone()))?);
    let deg = res.len().saturating_sub(1);
    if deg != 2 * g as usize + 2 && deg != 2 * g as usize + 1 {
        return Err(ArithError::Singular(p.clone()));
    }
    let dres: Vec<BigInt> = trim(res.iter().enumerate().skip(1).map(|(i, c)| (c * i).mod_floor(p)).collect());
    if pm_gcd(&res, &dres, p).len() > 1 {
        return Err(ArithError::Singular(p.clone()));
    }
    let mut chi = vec![-1i8; pu as usize];
    chi[0] = 0;
    for x in 1..=pu / 2 {
        chi[((x * x) % pu) as usize] = 1;
    }
    let cu: Vec<u64> = res.iter().map(|c| c.to_u64().unwrap()).collect();
    let mut total: i64 = 0;
    for t in 0..pu {
        let mut acc: u64 = 0;
        for &c in cu.iter().rev() {
            acc = ((acc as u128 * t as u128 + c as u128) % pu as u128) as u64;
        }
        total += 1 + chi[acc as usize] as i64;
    }
    total += if deg % 2 == 1 { 1 } else { 1 + chi[cu[deg] as usize] as i64 };
    Ok(total as u64)
}

/// |N - (p+1)| <= 2g sqrt(p), decided in integers.
pub fn hasse_weil_holds(n: u64, p: u64, g: u32) -> bool {
    let d = n as i128 - p as i128 - 1;
    d * d <= 4 * (g as i128) * (g as i128) * p as i128
}

/// A smooth F_p-point on a S^2 = b (1 - r T^{g+1}), found by scanning T = 0, 1, 2, ...
pub fn find_smooth_fp_point(a: &BigInt, b: &BigInt, r: &BigInt, g: u32, p: &BigInt) -> Result<Option<FpPoint>, ArithError> {
    check_odd_prime(p)?;
    let n = BigInt::from(g + 1);
    if (a % p).is_zero() || (b % p).is_zero() || (r % p).is_zero() || (&n % p).is_zero() {
        return Err(ArithError::Domain("a, b, r and g+1 must be units".into()));
    }
    if p <= &BigInt::from(4 * g * g) {
        return Err(ArithError::Domain(format!("{p} <= 4g^2")));
    }
    let ainv = inv_mod(a, p).unwrap();
    let mut t = BigInt::zero();
    while &t < p {
        let rhs = (b * (BigInt::from(1) - r * t.modpow(&n, p)) * &ainv).mod_floor(p);
        if rhs.is_zero() {
            return Ok(Some(FpPoint { chart: Chart::Infinity, s: BigInt::zero(), t }));
        }
        if jacobi(&rhs, p) == 1 {
            let s = sqrt_mod_prime(&rhs, p).unwrap();
            return Ok(Some(FpPoint { chart: Chart::Infinity, s, t }));
        }
        t += 1;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(f: &[i64], p: i64) -> u64 {
        let ev = |t: i64| f.iter().rev().fold(0i64, |acc, &c| (acc * t + c).rem_euclid(p));
        let mut n = 0u64;
        for t in 0..p {
            let v = ev(t);
            n += (0..p).filter(|s| (s * s - v).rem_euclid(p) == 0).count() as u64;
        }
        let lc = f.last().unwrap().rem_euclid(p);
        n + (0..p).filter(|s| (s * s - lc).rem_euclid(p) == 0).count() as u64
    }

    #[test]
    fn counts_match_brute_force() {
        let curves: [&[i64]; 4] = [&[1, 0, 0, 0, 1], &[4, 0, -5, 0, 1], &[3, 1, 0, 2, 5], &[1, 2, 0, 0, 0, 0, 3]];
        for f in curves {
            let poly = Polynomial::from_ints(f);
            let g = ((f.len() - 1) / 2 - 1) as u32;
            for p in [5i64, 7, 11, 13, 17, 19, 23, 29, 31] {
                match count_points_hyperelliptic(&poly, g, &BigInt::from(p)) {
                    Ok(n) => {
                        assert_eq!(n, brute(f, p), "{f:?} mod {p}");
                        assert!(hasse_weil_holds(n, p as u64, g));
                    }
                    Err(ArithError::Singular(_)) => {
                        let d = poly.discriminant();
                        assert!((d.numer() % p).is_zero() || (f.last().unwrap() % p) == 0);
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert_eq!(count_points_hyperelliptic(&Polynomial::from_ints(&[1, 0, 0, 0, 1]), 1, &BigInt::from(5)).unwrap(), brute(&[1, 0, 0, 0, 1], 5));
    }

    #[test]
    fn smooth_point_examples() {
        let one = BigInt::from(1);
        let pt = find_smooth_fp_point(&one, &one, &one, 0, &BigInt::from(5)).unwrap().unwrap();
        assert_eq!((pt.s, pt.t), (BigInt::from(1), BigInt::from(0)));
        for p in [7i64, 11, 13, 101, 1009] {
            for (a, b, r) in [(3i64, 5, 2), (2, 1, 6), (5, 3, 3)] {
                let pb = BigInt::from(p);
                let pt = find_smooth_fp_point(&BigInt::from(a), &BigInt::from(b), &BigInt::from(r), 1, &pb).unwrap().unwrap();
                let lhs = (BigInt::from(a) * &pt.s * &pt.s).mod_floor(&pb);
                let rhs = (BigInt::from(b) * (BigInt::from(1) - BigInt::from(r) * pt.t.pow(2))).mod_floor(&pb);
                assert_eq!(lhs, rhs);
            }
        }
    }
}
