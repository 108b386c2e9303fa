use super::modular::jacobi;
use super::padic::padic_val_int;
use super::{ArithError, Place, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

fn split(n: &BigInt, p: &BigInt) -> (u64, BigInt) {
    let v = padic_val_int(n, p).unwrap();
    (v, n / num_traits::pow(p.clone(), v as usize))
}

/// The Hilbert symbol (a, b)_v in {+1, -1}.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: &Place) -> Result<i8, ArithError> {
    if a.is_zero() || b.is_zero() {
        return Err(ArithError::Zero);
    }
    let a = a.numer() * a.denom();
    let b = b.numer() * b.denom();
    let p = match place {
        Place::Real => return Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Finite(p) => p,
    };
    let (alpha, u) = split(&a, p);
    let (beta, v) = split(&b, p);
    if p == &BigInt::from(2) {
        let u8 = u.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        let v8 = v.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        let eps = |x: u64| ((x - 1) / 2) % 2;
        let omega = |x: u64| ((x * x - 1) / 8) % 2;
        let e = eps(u8) * eps(v8) + alpha * omega(v8) + beta * omega(u8);
        return Ok(if e % 2 == 0 { 1 } else { -1 });
    }
    let mut s: i8 = 1;
    let eps_p = ((p - 1u32) / 2u32).is_odd();
    if alpha % 2 == 1 && beta % 2 == 1 && eps_p {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= jacobi(&u, p);
    }
    if alpha % 2 == 1 {
        s *= jacobi(&v, p);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn h(a: i64, b: i64, p: i64) -> i8 {
        let place = if p == 0 { Place::Real } else { Place::finite(p) };
        hilbert_symbol(&rat(a), &rat(b), &place).unwrap()
    }

    #[test]
    fn reference_values() {
        assert_eq!(h(2, 5, 5), -1);
        assert_eq!(h(-1, -1, 2), -1);
        assert_eq!(h(-1, -1, 0), -1);
        assert_eq!(h(-1, -1, 3), 1);
        assert_eq!(h(2, 3, 3), -1);
        assert_eq!(h(5, 5, 5), 1);
        assert_eq!(h(3, 3, 3), -1);
    }

    /// Solvability of z^2 = a x^2 + b y^2 with (x, y, z) primitive modulo 2^6.
    fn oracle_two(a: i64, b: i64) -> i8 {
        let m = 64i64;
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                        continue;
                    }
                    if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn two_adic_matches_exhaustive_search() {
        let vals = [1i64, -1, 2, -2, 3, -3, 5, 6, -6, 7, 10, -5, 14, 15];
        for &a in &vals {
            for &b in &vals {
                assert_eq!(h(a, b, 2), oracle_two(a, b), "({a},{b})_2");
            }
        }
    }
}
