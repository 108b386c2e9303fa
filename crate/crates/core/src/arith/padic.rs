use super::modular::jacobi;
use super::{Place, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// v_p(n) for an integer; None stands for +infinity.
pub fn padic_val_int(n: &BigInt, p: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// v_p(x) for a rational; None stands for +infinity.
pub fn padic_val(x: &Rational, p: &BigInt) -> Option<i64> {
    let vn = padic_val_int(x.numer(), p)? as i64;
    let vd = padic_val_int(x.denom(), p).unwrap_or(0) as i64;
    Some(vn - vd)
}

/// x / p^{v_p(x)}.
pub fn unit_part(x: &Rational, p: &BigInt) -> Rational {
    match padic_val(x, p) {
        None => Rational::zero(),
        Some(v) => x / pow_p(p, v),
    }
}

/// p^e as a rational, e of either sign.
pub fn pow_p(p: &BigInt, e: i64) -> Rational {
    let m = num_traits::pow(p.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(m)
    } else {
        Rational::new(BigInt::one(), m)
    }
}

/// Whether x is a nonzero square in Q_v.
pub fn is_local_square(x: &Rational, place: &Place) -> bool {
    if x.is_zero() {
        return false;
    }
    match place {
        Place::Real => x.is_positive(),
        Place::Finite(p) => {
            let v = padic_val(x, p).unwrap();
            if v % 2 != 0 {
                return false;
            }
            let u = unit_part(x, p);
            if p == &BigInt::from(2) {
                let m = BigInt::from(8);
                let r = (u.numer() * u.denom()).mod_floor(&m);
                r.is_one()
            } else {
                let r = (u.numer() * u.denom()).mod_floor(p);
                jacobi(&r, p) == 1
            }
        }
    }
}
