use super::primes::is_prime;
use super::{inv_mod, padic::padic_val, reduce_mod, ArithError, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i8 {
    assert!(n.is_positive() && n.is_odd(), "jacobi needs an odd positive modulus");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let r = (&n % 8u32).to_u32().unwrap();
            if tz % 2 == 1 && (r == 3 || r == 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i8, ArithError> {
    if p.is_even() || !is_prime(p)? {
        return Err(ArithError::NotOddPrime(p.clone()));
    }
    Ok(jacobi(a, p))
}

/// Square root modulo a prime by Tonelli-Shanks; the root returned lies in [0, p/2].
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    let two = BigInt::from(2);
    if p == &two {
        return Some(a);
    }
    if jacobi(&a, p) != 1 {
        return None;
    }
    let one = BigInt::one();
    let pm1 = p - &one;
    let s = pm1.trailing_zeros().unwrap();
    let q = &pm1 >> s;
    let mut z = two.clone();
    while jacobi(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    let other = p - &r;
    Some(if other < r { other } else { r })
}

fn unit_residue(a: &Rational, p: &BigInt, k: u32) -> Result<(BigInt, BigInt), ArithError> {
    if a.is_zero() || padic_val(a, p) != Some(0) {
        return Err(ArithError::NotUnit(a.to_string()));
    }
    let m = num_traits::pow(p.clone(), k as usize);
    let r = reduce_mod(a, &m).expect("unit denominators are invertible");
    Ok((r, m))
}

/// r with r^2 = a mod p^k for a p-adic unit a, or None when a is not a square in Q_p.
/// The returned root is the smallest nonnegative one.
pub fn hensel_sqrt(a: &Rational, p: &BigInt, k: u32) -> Result<Option<BigInt>, ArithError> {
    let (res, m) = unit_residue(a, p, k.max(3))?;
    let m_k = num_traits::pow(p.clone(), k as usize);
    if p == &BigInt::from(2) {
        if (&res % 8u32).to_u32() != Some(1) {
            return Ok(None);
        }
        let mut r = BigInt::one();
        for i in 3..k {
            let modulus = BigInt::one() << (i + 1);
            if !((&r * &r - &res).mod_floor(&modulus)).is_zero() {
                r += BigInt::one() << (i - 1);
            }
        }
        if k <= 3 {
            return Ok(Some(BigInt::one().mod_floor(&m_k)));
        }
        let half = BigInt::one() << (k - 1);
        let cands = [r.clone(), (-&r).mod_floor(&m_k), (&r + &half).mod_floor(&m_k), (&half - &r).mod_floor(&m_k)];
        return Ok(cands.into_iter().min());
    }
    let _ = m;
    let a_p = res.mod_floor(p);
    let Some(mut r) = sqrt_mod_prime(&a_p, p) else {
        return Ok(None);
    };
    let target = res.mod_floor(&m_k);
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let mp = num_traits::pow(p.clone(), prec as usize);
        let inv = inv_mod(&(&r * 2), &mp).unwrap();
        r = (&r - (&r * &r - &target) * inv).mod_floor(&mp);
    }
    let r = r.mod_floor(&m_k);
    let other = (&m_k - &r).mod_floor(&m_k);
    Ok(Some(if other < r { other } else { r }))
}

/// r with r^n = a mod p^k for a p-adic unit a and p not dividing n.
pub fn hensel_nth_root(a: &Rational, n: u32, p: &BigInt, k: u32) -> Result<Option<BigInt>, ArithError> {
    if n == 0 || (BigInt::from(n) % p).is_zero() {
        return Err(ArithError::Domain(format!("root index {n} divisible by {p}")));
    }
    let (res, _) = unit_residue(a, p, k.max(1))?;
    let m_k = num_traits::pow(p.clone(), k as usize);
    let target = res.mod_floor(&m_k);
    let r0 = if p == &BigInt::from(2) {
        BigInt::one()
    } else {
        let mut poly = vec![BigInt::zero(); n as usize + 1];
        poly[0] = -target.mod_floor(p);
        poly[n as usize] = BigInt::one();
        match roots_mod_p(&poly, p).into_iter().next() {
            Some(r) => r,
            None => return Ok(None),
        }
    };
    let nb = BigInt::from(n);
    let mut r = r0;
    let mut prec = 1u32;
    while prec < k {
        prec = (prec * 2).min(k);
        let mp = num_traits::pow(p.clone(), prec as usize);
        let rn1 = r.modpow(&BigInt::from(n - 1), &mp);
        let fr = (&rn1 * &r - &target).mod_floor(&mp);
        let inv = inv_mod(&(&nb * &rn1), &mp).unwrap();
        r = (&r - fr * inv).mod_floor(&mp);
    }
    Ok(Some(r.mod_floor(&m_k)))
}

pub(crate) type Pm = Vec<BigInt>;

pub(crate) fn trim(mut f: Pm) -> Pm {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn pm_mul(f: &Pm, g: &Pm, p: &BigInt) -> Pm {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); f.len() + g.len() - 1];
    for (i, x) in f.iter().enumerate() {
        for (j, y) in g.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out.into_iter().map(|c| c.mod_floor(p)).collect())
}

fn pm_rem(f: &Pm, g: &Pm, p: &BigInt) -> Pm {
    let mut r = f.clone();
    let dg = g.len() - 1;
    let inv = inv_mod(g.last().unwrap(), p).unwrap();
    while r.len() > dg && !r.is_empty() {
        let c = (r.last().unwrap() * &inv).mod_floor(p);
        let shift = r.len() - 1 - dg;
        for (i, gc) in g.iter().enumerate() {
            r[shift + i] = (&r[shift + i] - &c * gc).mod_floor(p);
        }
        r = trim(r);
    }
    r
}

fn pm_divexact(f: &Pm, g: &Pm, p: &BigInt) -> Pm {
    let mut r = f.clone();
    let dg = g.len() - 1;
    let inv = inv_mod(g.last().unwrap(), p).unwrap();
    let mut q = vec![BigInt::zero(); f.len() - dg];
    while r.len() > dg {
        let c = (r.last().unwrap() * &inv).mod_floor(p);
        let shift = r.len() - 1 - dg;
        q[shift] = c.clone();
        for (i, gc) in g.iter().enumerate() {
            r[shift + i] = (&r[shift + i] - &c * gc).mod_floor(p);
        }
        r = trim(r);
    }
    q
}

pub(crate) fn pm_gcd(f: &Pm, g: &Pm, p: &BigInt) -> Pm {
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_empty() {
        let r = pm_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(lc) = a.last() {
        let inv = inv_mod(lc, p).unwrap();
        a = a.into_iter().map(|c| (c * &inv).mod_floor(p)).collect();
    }
    a
}

fn pm_powmod(base: &Pm, e: &BigInt, m: &Pm, p: &BigInt) -> Pm {
    let mut result: Pm = vec![BigInt::one()];
    let b = pm_rem(base, m, p);
    let bits = e.bits();
    for i in (0..bits).rev() {
        result = pm_rem(&pm_mul(&result, &result, p), m, p);
        if e.bit(i) {
            result = pm_rem(&pm_mul(&result, &b, p), m, p);
        }
    }
    result
}

fn split_roots(g: &Pm, p: &BigInt, out: &mut Vec<BigInt>) {
    let d = g.len() - 1;
    if d == 0 {
        return;
    }
    if d == 1 {
        let inv = inv_mod(&g[1], p).unwrap();
        out.push((-&g[0] * inv).mod_floor(p));
        return;
    }
    let e = (p - 1u32) >> 1;
    let mut delta = BigInt::zero();
    loop {
        let lin = vec![delta.clone(), BigInt::one()];
        let mut h = pm_powmod(&lin, &e, g, p);
        if h.is_empty() {
            h = vec![BigInt::zero()];
        }
        h[0] = (&h[0] - 1u32).mod_floor(p);
        let h = trim(h);
        let c = pm_gcd(g, &h, p);
        let dc = c.len().saturating_sub(1);
        if dc > 0 && dc < d {
            let rest = pm_divexact(g, &c, p);
            split_roots(&c, p, out);
            split_roots(&rest, p, out);
            return;
        }
        delta += 1;
    }
}

/// Distinct roots in [0, p) of a polynomial (coefficients low to high) modulo a prime p, sorted.
pub fn roots_mod_p(coeffs: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let f = trim(coeffs.iter().map(|c| c.mod_floor(p)).collect());
    if f.len() <= 1 {
        return Vec::new();
    }
    if let Some(small) = p.to_u64().filter(|&q| q < 2000) {
        let fu: Vec<u64> = f.iter().map(|c| c.to_u64().unwrap()).collect();
        return (0..small)
            .filter(|&t| fu.iter().rev().fold(0u64, |acc, &c| (acc * t + c) % small) == 0)
            .map(BigInt::from)
            .collect();
    }
    let x = vec![BigInt::zero(), BigInt::one()];
    let mut xp = pm_powmod(&x, p, &f, p);
    while xp.len() < 2 {
        xp.push(BigInt::zero());
    }
    xp[1] = (&xp[1] - 1u32).mod_floor(p);
    let xp = trim(xp);
    let g = if xp.is_empty() { pm_gcd(&f, &f, p) } else { pm_gcd(&f, &xp, p) };
    let mut out = Vec::new();
    split_roots(&g, p, &mut out);
    out.sort();
    out.dedup();
    out
}
