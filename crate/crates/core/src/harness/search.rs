//! Bounded search for rational points on the fiber curves and surfaces.
//!
//! When a is a prime not dividing the denominators, a rational point forces a congruence
//! modulo a (v_a of a square is even while v_a(a) = 1), so only the residue classes that
//! satisfy it are tested exactly.

use super::HarnessError;
use crate::arith::{int_sqrt_exact, is_prime, jacobi, rational_sqrt, reduce_mod, roots_mod_p, sqrt_mod_prime, Chart, Rational};
use crate::family::{Dp4Surface, HyperellipticCurve, ProjPoint};
use crate::json::{dec, rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub chart: Chart,
    #[serde(with = "rational")]
    pub s: Rational,
    #[serde(with = "rational")]
    pub t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSearchResult {
    #[serde(with = "dec")]
    pub height: u64,
    pub curve_points: Vec<CurvePoint>,
    pub surface_points: Vec<ProjPoint>,
    /// Whether the congruence sieve modulo a was used for the curve and the surface.
    pub sieved: [bool; 2],
}

impl PointSearchResult {
    pub fn is_empty(&self) -> bool {
        self.curve_points.is_empty() && self.surface_points.is_empty()
    }
}

const fn square_mask(m: u32) -> u128 {
    let mut mask = 0u128;
    let mut x = 0;
    while x < m {
        mask |= 1 << (x * x % m);
        x += 1;
    }
    mask
}

const SQUARE_MASKS: [(u32, u128); 6] = [(64, square_mask(64)), (63, square_mask(63)), (65, square_mask(65)), (11, square_mask(11)), (17, square_mask(17)), (19, square_mask(19))];

/// Cheap rejection of non-squares before the exact root.
fn square_root(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    for (m, mask) in SQUARE_MASKS {
        let r = (n % m).to_u32().unwrap();
        if mask >> r & 1 == 0 {
            return None;
        }
    }
    int_sqrt_exact(n)
}

fn lcm_den(xs: &[&Rational]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn int_pow(x: &BigInt, e: u32) -> BigInt {
    num_traits::pow(x.clone(), e as usize)
}

/// An odd prime a with v_a(a) = 1 that divides none of the given denominators.
fn sieve_prime(a: &Rational, dens: &[&BigInt]) -> Option<BigInt> {
    if !a.denom().is_one() || a.numer() <= &BigInt::from(2) {
        return None;
    }
    let p = a.numer().clone();
    if !is_prime(&p).unwrap_or(false) || dens.iter().any(|d| (*d % &p).is_zero()) {
        return None;
    }
    Some(p)
}

/// Integers in [-h, h] congruent to r modulo m.
fn class_members(r: &BigInt, m: &BigInt, h: i64) -> Vec<i64> {
    let hb = BigInt::from(h);
    let mut x = (r + &hb).mod_floor(m) - &hb;
    let mut out = Vec::new();
    while x <= hb {
        out.push(x.to_i64().unwrap());
        x += m;
    }
    out
}

/// Rational points s^2 = f(t) with t = m/k, |m|, k <= h, and the points at infinity.
pub fn curve_point_search(curve: &HyperellipticCurve, h: u64) -> Result<(Vec<CurvePoint>, bool), HarnessError> {
    if h == 0 {
        return Err(HarnessError::Height);
    }
    let h = h as i64;
    let e = curve.n();
    let mut out = Vec::new();
    if let Some(s) = rational_sqrt(&curve.F.eval(&Rational::zero())) {
        out.push(CurvePoint { chart: Chart::Infinity, s, t: Rational::zero() });
    }
    // a^2 L^2 k^(2e) f(m/k) = a b (L m^e - L A k^e)(L m^e - L B k^e), an integer
    let l = lcm_den(&[&curve.A, &curve.B, &curve.a, &curve.b]);
    let lr = Rational::from_integer(l.clone());
    let (la, lb) = ((&curve.A * &lr).to_integer(), (&curve.B * &lr).to_integer());
    let ab = &curve.a * &curve.b * &lr * &lr;
    let ab = if ab.is_integer() { ab.to_integer() } else { return Err(HarnessError::Unsupported("b/a has a non-square denominator".into())) };
    let p = sieve_prime(&curve.a, &[&l]).filter(|p| !(&ab % (p * p)).is_zero());
    let roots: Option<Vec<BigInt>> = p.as_ref().map(|p| {
        let mut rs = Vec::new();
        for r in [&curve.A, &curve.B] {
            let mut c = vec![BigInt::zero(); e as usize + 1];
            c[0] = -reduce_mod(r, p).unwrap();
            c[e as usize] = BigInt::one();
            rs.extend(roots_mod_p(&c, p));
        }
        rs.sort();
        rs.dedup();
        rs
    });
    for k in 1..=h {
        let kb = BigInt::from(k);
        let ke = int_pow(&kb, e);
        let ms: Vec<i64> = match (&p, &roots) {
            (Some(p), Some(rs)) => {
                let mut ms: Vec<i64> = rs.iter().flat_map(|r| class_members(&(r * &kb), p, h)).collect();
                ms.sort_unstable();
                ms.dedup();
                ms
            }
            _ => (-h..=h).collect(),
        };
        for m in ms {
            if num_integer::gcd(m, k) != 1 {
                continue;
            }
            let lme = &l * int_pow(&BigInt::from(m), e);
            let v = &ab * (&lme - &la * &ke) * (&lme - &lb * &ke);
            if square_root(&v).is_some() {
                let t = Rational::new(BigInt::from(m), kb.clone());
                let s = rational_sqrt(&curve.f.eval(&t)).expect("square value");
                out.push(CurvePoint { chart: Chart::Affine, s, t });
            }
        }
    }
    Ok((out, p.is_some()))
}

/// Points (x : y : z : u : v) with integers |u|, |v|, |y| <= h, x and z rational.
///
/// Given u, v, y the first equation gives x^2 = a(y^2 - C^2 u v) and the second
/// z^2 = (x^2 + b(u - A v)(u - B v)) / a; both must be rational squares.
#[allow(non_snake_case)]
pub fn surface_point_search(surface: &Dp4Surface, h: u64) -> Result<(Vec<ProjPoint>, bool), HarnessError> {
    if h == 0 {
        return Err(HarnessError::Height);
    }
    let h = h as i64;
    let s = surface;
    let C2 = &s.C * &s.C;
    let p = sieve_prime(&s.a, &[C2.denom(), s.A.denom(), s.B.denom(), s.b.denom()]);
    // square roots of u mod p and of u n mod p for a fixed nonresidue n
    let table = p.as_ref().map(|p| SqrtTable::new(p, h));
    let c_mod = p.as_ref().map(|p| reduce_mod(&s.C, p).unwrap());
    let (cn, cd) = (C2.numer(), C2.denom());
    let a_cd = match s.a.is_integer() {
        true => s.a.numer() * cd,
        false => return Err(HarnessError::Unsupported("a must be an integer".into())),
    };
    let mut out = Vec::new();
    for v in 0..=h {
        for u in -h..=h {
            if v == 0 && u <= 0 {
                continue;
            }
            let g_uv = num_integer::gcd(u, v);
            let ys: Vec<i64> = match (&p, &table, &c_mod) {
                (Some(p), Some(t), Some(c)) => match t.sqrt_product(u, v) {
                    Some(r) => {
                        let y0 = (c * r).mod_floor(p);
                        let mut ys = class_members(&y0, p, h);
                        ys.extend(class_members(&(p - &y0), p, h));
                        ys.sort_unstable();
                        ys.dedup();
                        ys
                    }
                    None => Vec::new(),
                },
                _ => (-h..=h).collect(),
            };
            let uv = BigInt::from(u * v);
            for y in ys {
                if num_integer::gcd(g_uv, y) != 1 {
                    continue;
                }
                // x^2 cd^2 = a cd (cd y^2 - cn u v) with C^2 = cn / cd
                let yb = BigInt::from(y);
                if square_root(&(&a_cd * (cd * &yb * &yb - cn * &uv))).is_none() {
                    continue;
                }
                let (ur, vr, yr) = (Rational::from_integer(u.into()), Rational::from_integer(v.into()), Rational::from_integer(yb));
                let x2 = &s.a * (&yr * &yr - &C2 * &ur * &vr);
                let Some(x) = rational_square_root(&x2) else { continue };
                let z2 = (&x2 + &s.b * (&ur - &s.A * &vr) * (&ur - &s.B * &vr)) / &s.a;
                let Some(z) = rational_square_root(&z2) else { continue };
                out.push(ProjPoint { coords: vec![x, yr, z, ur, vr] }.normalized());
            }
        }
    }
    Ok((out, p.is_some()))
}

fn rational_square_root(x: &Rational) -> Option<Rational> {
    let n = square_root(x.numer())?;
    let d = square_root(x.denom())?;
    Some(Rational::new(n, d))
}

/// sqrt(u) or sqrt(u n) modulo p for |u| <= h, with n a fixed nonresidue.
struct SqrtTable {
    p: BigInt,
    h: i64,
    chi: Vec<i8>,
    root: Vec<BigInt>,
    n_inv: BigInt,
}

impl SqrtTable {
    fn new(p: &BigInt, h: i64) -> Self {
        let mut n = BigInt::from(2);
        while jacobi(&n, p) != -1 {
            n += 1;
        }
        let mut chi = Vec::new();
        let mut root = Vec::new();
        for u in -h..=h {
            let x = BigInt::from(u).mod_floor(p);
            let c = jacobi(&x, p);
            let r = match c {
                0 => BigInt::zero(),
                1 => sqrt_mod_prime(&x, p).unwrap(),
                _ => sqrt_mod_prime(&(&x * &n).mod_floor(p), p).unwrap(),
            };
            chi.push(c);
            root.push(r);
        }
        let n_inv = crate::arith::inv_mod(&n, p).unwrap();
        SqrtTable { p: p.clone(), h, chi, root, n_inv }
    }

    /// A square root of u v modulo p, or None when u v is a nonresidue.
    fn sqrt_product(&self, u: i64, v: i64) -> Option<BigInt> {
        let (i, j) = ((u + self.h) as usize, (v + self.h) as usize);
        let (cu, cv) = (self.chi[i], self.chi[j]);
        if cu == 0 || cv == 0 {
            return Some(BigInt::zero());
        }
        if cu != cv {
            return None;
        }
        let r = &self.root[i] * &self.root[j];
        Some(if cu == 1 { r.mod_floor(&self.p) } else { (r * &self.n_inv).mod_floor(&self.p) })
    }
}

/// Both searches up to height h.
pub fn rational_point_search(curve: &HyperellipticCurve, surface: &Dp4Surface, h: u64) -> Result<PointSearchResult, HarnessError> {
    let (curve_points, c_sieved) = curve_point_search(curve, h)?;
    let (surface_points, s_sieved) = surface_point_search(surface, h)?;
    Ok(PointSearchResult { height: h, curve_points, surface_points, sieved: [c_sieved, s_sieved] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn control_curve_has_its_roots() {
        // s^2 = (t^2 - 1)(t^2 - 4)
        let c = HyperellipticCurve::new(1, rat(1), rat(1), rat(1), rat(4));
        let (pts, sieved) = curve_point_search(&c, 10).unwrap();
        assert!(!sieved);
        let mut zeros: Vec<Rational> = pts.iter().filter(|p| p.s.is_zero()).map(|p| p.t.clone()).collect();
        zeros.sort();
        assert_eq!(zeros, vec![rat(-2), rat(-1), rat(1), rat(2)]);
        assert!(pts.iter().all(|p| c.contains(p.chart, &p.s, &p.t)));
        assert!(pts.iter().any(|p| p.chart == Chart::Infinity));
        assert_eq!(curve_point_search(&c, 0), Err(HarnessError::Height));
    }

    /// Plain enumeration without the congruence filter.
    fn brute_curve(c: &HyperellipticCurve, h: i64) -> Vec<Rational> {
        let mut out = Vec::new();
        for k in 1..=h {
            for m in -h..=h {
                if num_integer::gcd(m, k) == 1 && rational_sqrt(&c.f.eval(&Rational::new(m.into(), k.into()))).is_some() {
                    out.push(Rational::new(m.into(), k.into()));
                }
            }
        }
        out
    }

    #[test]
    fn sieve_matches_brute_force() {
        // a = 7 prime, points at t with t^2 = A or B mod 7 among others
        for (a, b, aa, bb) in [(7, 2, 2, 9), (7, 1, 1, 4), (5, 5, 1, 6), (11, 3, -2, 5)] {
            let c = HyperellipticCurve::new(1, rat(a), rat(b), rat(aa), rat(bb));
            let (pts, _) = curve_point_search(&c, 40).unwrap();
            let mut got: Vec<Rational> = pts.iter().filter(|p| p.chart == Chart::Affine).map(|p| p.t.clone()).collect();
            got.sort();
            got.dedup();
            assert_eq!(got, brute_curve(&c, 40).into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());
        }
    }

    fn brute_surface(s: &Dp4Surface, h: i64) -> usize {
        let mut n = 0;
        for v in 0..=h {
            for u in -h..=h {
                if v == 0 && u <= 0 {
                    continue;
                }
                for y in -h..=h {
                    if num_integer::gcd(num_integer::gcd(u, v), y) != 1 {
                        continue;
                    }
                    let (ur, vr, yr) = (rat(u), rat(v), rat(y));
                    let x2 = &s.a * (&yr * &yr - &s.C * &s.C * &ur * &vr);
                    let z2 = (&x2 + &s.b * (&ur - &s.A * &vr) * (&ur - &s.B * &vr)) / &s.a;
                    if rational_sqrt(&x2).is_some() && rational_sqrt(&z2).is_some() {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn surface_sieve_matches_brute_force() {
        for (a, b, aa, bb, cc) in [(7, 2, 2, 9, 1), (5, 1, 1, 6, 2), (13, 3, 4, -5, 1)] {
            let s = Dp4Surface::new(rat(a), rat(b), rat(aa), rat(bb), rat(cc));
            let (pts, sieved) = surface_point_search(&s, 12).unwrap();
            assert!(sieved);
            assert_eq!(pts.len(), brute_surface(&s, 12), "{a} {b} {aa} {bb} {cc}");
            for p in &pts {
                let (q1, q2) = s.quadrics(&p.array());
                assert!(q1.is_zero() && q2.is_zero());
            }
        }
    }

    #[test]
    fn square_filter() {
        for n in 0..2000i64 {
            let r = square_root(&BigInt::from(n));
            assert_eq!(r.is_some(), ((n as f64).sqrt().round() as i64).pow(2) == n, "{n}");
        }
    }
}
