use super::RealWitness;
use crate::arith::{Chart, Polynomial, Rational};
use crate::family::HyperellipticCurve;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Whether s^2 = f(t) (glued to its reversal of degree d) has a real point.
///
/// The witness carries an exact rational t with f(t) >= 0. When f only touches zero at
/// irrational roots of even multiplicity the answer is true and no witness is returned.
pub fn decide_real_poly(f: &Polynomial, d: usize) -> (bool, Option<RealWitness>) {
    if f.is_zero() {
        return (true, Some(RealWitness { chart: Chart::Affine, t: Rational::zero() }));
    }
    if d.is_multiple_of(2) && f.degree() == Some(d) && f.leading().is_positive() {
        let t = f.root_bound() + Rational::one();
        return (true, Some(RealWitness { chart: Chart::Affine, t }));
    }
    if f.degree() < Some(d) {
        return (true, Some(RealWitness { chart: Chart::Infinity, t: Rational::zero() }));
    }
    if !f.eval(&Rational::zero()).is_negative() {
        return (true, Some(RealWitness { chart: Chart::Affine, t: Rational::zero() }));
    }
    if f.degree() == Some(0) || f.count_real_roots() == 0 {
        return (false, None);
    }
    let sqf = {
        let g = f.gcd(&f.derivative());
        if g.degree().unwrap_or(0) == 0 {
            f.clone()
        } else {
            f.div_rem(&g).0
        }
    };
    let bound = f.root_bound();
    let mut stack = vec![(-bound.clone(), bound)];
    let mut exact_root = None;
    while let Some((lo, hi)) = stack.pop() {
        let n = sqf.count_roots_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        for x in [&lo, &hi] {
            let v = f.eval(x);
            if v.is_positive() {
                return (true, Some(RealWitness { chart: Chart::Affine, t: x.clone() }));
            }
            if v.is_zero() {
                exact_root.get_or_insert_with(|| x.clone());
            }
        }
        if &hi - &lo < Rational::new(BigInt::one(), BigInt::from(1u64 << 40)) {
            let c = simplest_between(&lo, &hi);
            if f.eval(&c).is_zero() {
                exact_root.get_or_insert(c);
            }
            continue;
        }
        let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    (true, exact_root.map(|t| RealWitness { chart: Chart::Affine, t }))
}

/// Decides real solvability of the curve on both of its charts.
pub fn decide_real_points(curve: &HyperellipticCurve) -> (bool, Option<RealWitness>) {
    decide_real_poly(&curve.f, curve.degree())
}

/// The rational with the smallest denominator in [lo, hi].
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if &fl == lo || fl.clone() + Rational::one() <= *hi {
        return if &fl == lo { fl } else { fl + Rational::one() };
    }
    let lo_f = lo - &fl;
    let hi_f = hi - &fl;
    let inner = simplest_between(&(Rational::one() / hi_f), &(Rational::one() / lo_f));
    fl + Rational::one() / inner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ratio, rat};

    #[test]
    fn examples() {
        let neg = Polynomial::from_ints(&[-2, 0, -2, 0, -1]);
        assert_eq!(decide_real_poly(&neg, 4), (false, None));
        let touch = Polynomial::from_ints(&[-1, 0, 2, 0, -1]);
        let (ok, w) = decide_real_poly(&touch, 4);
        assert!(ok);
        assert_eq!(w.unwrap().t.abs(), rat(1));
        let pos = Polynomial::from_ints(&[-1, 0, 1]);
        let (ok, w) = decide_real_poly(&pos, 2);
        assert!(ok && !pos.eval(&w.unwrap().t).is_negative());
        // -(t^2 - 2)^2 touches zero only at irrational points
        let irr = Polynomial::from_ints(&[-4, 0, 4, 0, -1]);
        assert_eq!(decide_real_poly(&irr, 4), (true, None));
        // sign change strictly inside: -(t^2 - 3)(t^2 - 5)
        let bump = Polynomial::from_ints(&[-15, 0, 8, 0, -1]);
        let (ok, w) = decide_real_poly(&bump, 4);
        assert!(ok && bump.eval(&w.unwrap().t).is_positive());
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&ratio(1, 3), &ratio(1, 2)), ratio(1, 2));
        assert_eq!(simplest_between(&ratio(3, 10), &ratio(7, 20)), ratio(1, 3));
        assert_eq!(simplest_between(&ratio(-7, 5), &ratio(-6, 5)), ratio(-4, 3));
    }
}
