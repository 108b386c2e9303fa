use super::primes::{is_prime, primes_up_to};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Trial division covers every prime below this bound.
pub const TRIAL_BOUND: u64 = 1 << 20;

fn small_primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

/// Prime factorization of |n| as far as it can be completed.
///
/// `unresolved` holds cofactors that could not be split within the budget or whose
/// primality cannot be proved; all of their prime factors exceed [`TRIAL_BOUND`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    pub primes: Vec<(BigInt, u32)>,
    pub unresolved: Vec<BigInt>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }

    pub fn prime_list(&self) -> Vec<BigInt> {
        self.primes.iter().map(|(p, _)| p.clone()).collect()
    }

    fn add(&mut self, p: BigInt, e: u32) {
        if let Some(entry) = self.primes.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            self.primes.push((p, e));
        }
    }
}

fn probable_prime(n: &BigInt) -> bool {
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
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
        return false;
    }
    true
}

fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let max_k = (n.bits() / 20).max(2) as u32;
    for k in 2..=max_k {
        let r = n.nth_root(k);
        if num_traits::pow(r.clone(), k as usize) == *n {
            return Some((r, k));
        }
    }
    None
}

fn brent(n: &BigInt, c: u64, budget: u64) -> Option<BigInt> {
    let c = BigInt::from(c);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2);
    let mut r: u64 = 1;
    let mut q = BigInt::one();
    let mut spent = 0u64;
    let m = 128u64;
    let mut x;
    let mut ys;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            spent += m.min(r - k);
            let g = q.gcd(n);
            k += m;
            if !g.is_one() {
                if &g == n {
                    loop {
                        ys = f(&ys);
                        let g2 = (&x - &ys).abs().gcd(n);
                        if !g2.is_one() {
                            return if &g2 == n { None } else { Some(g2) };
                        }
                    }
                }
                return Some(g);
            }
            if k >= r || spent > budget {
                break;
            }
        }
        if spent > budget {
            return None;
        }
        r *= 2;
    }
}

/// Factor |n| by trial division and Pollard-Brent with at most `rho_budget` iterations per cofactor.
pub fn factor(n: &BigInt, rho_budget: u64) -> Factorization {
    let mut out = Factorization::default();
    let mut m = n.abs();
    if m.is_zero() {
        return out;
    }
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        if let Some(small) = m.to_u64() {
            if p * p > small {
                break;
            }
        }
        let pb = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.add(pb, e);
        }
    }
    let mut stack = vec![(m, 1u32)];
    while let Some((m, mult)) = stack.pop() {
        if m.is_one() {
            continue;
        }
        match is_prime(&m) {
            Ok(true) => {
                out.add(m, mult);
                continue;
            }
            Ok(false) => {}
            Err(_) => {
                if probable_prime(&m) {
                    out.unresolved.push(m);
                    continue;
                }
            }
        }
        if let Some((r, k)) = perfect_power(&m) {
            stack.push((r, mult * k));
            continue;
        }
        let split = (1..=3).find_map(|c| brent(&m, c, rho_budget / 3 + 1));
        match split {
            Some(d) => {
                let e = &m / &d;
                stack.push((d, mult));
                stack.push((e, mult));
            }
            None => out.unresolved.push(m),
        }
    }
    out.primes.sort();
    out.unresolved.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(f: &Factorization) -> BigInt {
        let mut acc = BigInt::one();
        for (p, e) in &f.primes {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        for u in &f.unresolved {
            acc *= u;
        }
        acc
    }

    #[test]
    fn small_numbers_complete() {
        for n in 1..3000i64 {
            let f = factor(&BigInt::from(n), 10_000);
            assert!(f.is_complete());
            assert_eq!(product(&f), BigInt::from(n));
            for (p, _) in &f.primes {
                assert!(is_prime(p).unwrap());
            }
        }
    }

    #[test]
    fn rho_splits_semiprime() {
        let p: BigInt = "1000000007".parse().unwrap();
        let q: BigInt = "998244353".parse().unwrap();
        let r: BigInt = "2305843009213693951".parse().unwrap();
        let n = &p * &q * &r * &r * 1753;
        let f = factor(&n, 1_000_000);
        assert!(f.is_complete());
        assert_eq!(product(&f), n);
        assert!(f.primes.contains(&(r, 2)));
    }

    #[test]
    fn large_prime_cofactor_left_unresolved() {
        let big = (BigInt::one() << 127) - 1;
        let n = &big * 6;
        let f = factor(&n, 1000);
        assert_eq!(f.prime_list(), vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(f.unresolved, vec![big]);
    }
}
