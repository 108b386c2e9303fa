use super::{normalize, s_lift, t_lift, LocalError, PadicWitness};
use crate::arith::modular::trim;
use crate::arith::padic::pow_p;
use crate::arith::{is_prime, jacobi, padic_val, reduce_mod, roots_mod_p, Chart, Polynomial, Rational};
use crate::family::{integral_model, CurveChange, HyperellipticCurve};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// Residues scanned per disc when looking for a nonzero square value.
const SCAN_CAP: u64 = 1 << 16;

/// Depth used when the polynomial is not squarefree.
const INSEPARABLE_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QpDecision {
    Points(PadicWitness),
    NoPoints { discs: u64 },
    Inconclusive(String),
}

impl QpDecision {
    pub fn has_points(&self) -> Option<bool> {
        match self {
            QpDecision::Points(_) => Some(true),
            QpDecision::NoPoints { .. } => Some(false),
            QpDecision::Inconclusive(_) => None,
        }
    }
}

/// v_p(disc h) + 2 v_p(lc h) + 3 for the normalized chart polynomial.
pub fn default_depth_bound(h: &Polynomial, p: &BigInt) -> u32 {
    let disc = h.discriminant();
    let lc = padic_val(&h.leading(), p).unwrap_or(0).max(0) as u32;
    match padic_val(&disc, p) {
        Some(v) => v.max(0) as u32 + 2 * lc + 3,
        None => INSEPARABLE_DEPTH + 2 * lc,
    }
}

enum Disc {
    Found(PadicWitness),
    Empty(u64),
    Open(String),
}

struct Chartwise<'a> {
    p: &'a BigInt,
    chart: Chart,
    g: &'a Polynomial,
    h: Polynomial,
    change: &'a CurveChange,
    bound: u32,
}

impl Chartwise<'_> {
    fn symbol(&self, c: &BigInt) -> i8 {
        jacobi(c, self.p)
    }

    fn explore(&self, x0: &BigInt, m: u32) -> Disc {
        let p = self.p;
        let pm = num_traits::pow(p.clone(), m as usize);
        let gz = self.h.substitute_linear(&Rational::from_integer(x0.clone()), &Rational::from_integer(pm.clone()));
        let Some(w) = gz.content_val(p) else {
            return match s_lift(self.g, p, self.chart, &Rational::from_integer(x0.clone()), self.change) {
                Some(wit) => Disc::Found(wit),
                None => Disc::Open("polynomial vanishes identically".into()),
            };
        };
        let big_h = gz.scale(&pow_p(p, -w));
        let hb = trim(big_h.residues(p).expect("integral after scaling"));
        let at = |z: &BigInt| Rational::from_integer(x0 + &pm * z);
        if hb.len() == 1 {
            if w % 2 == 0 && self.symbol(&hb[0]) == 1 {
                if let Some(wit) = s_lift(self.g, p, self.chart, &at(&BigInt::zero()), self.change) {
                    return Disc::Found(wit);
                }
            }
            return Disc::Empty(1);
        }
        let roots = roots_mod_p(&hb, p);
        let mut open = None;
        if w % 2 == 0 {
            let limit = p.to_u64().map_or(SCAN_CAP, |q| q.min(SCAN_CAP));
            for z in 0..limit {
                let zb = BigInt::from(z);
                if roots.binary_search(&zb).is_ok() {
                    continue;
                }
                let val = eval_mod(&hb, &zb, p);
                if self.symbol(&val) == 1 {
                    if let Some(wit) = s_lift(self.g, p, self.chart, &at(&zb), self.change) {
                        return Disc::Found(wit);
                    }
                }
            }
            if p.to_u64().is_none_or(|q| q > SCAN_CAP) {
                open = Some(format!("residue scan capped at {SCAN_CAP} in a disc of depth {m}"));
            }
        }
        let dhb: Vec<BigInt> = hb.iter().enumerate().skip(1).map(|(i, c)| (c * i).mod_floor(p)).collect();
        let mut discs = 1u64;
        for z in &roots {
            if !eval_mod(&dhb, z, p).is_zero() {
                let z0 = newton_unit(&big_h, z, p, (w - 2 * m as i64 + 2).max(1) as u32);
                if let Some(wit) = t_lift(self.g, p, self.chart, &at(&z0), self.change) {
                    return Disc::Found(wit);
                }
                open.get_or_insert_with(|| "simple root failed to lift".into());
                continue;
            }
            if m + 1 > self.bound {
                open.get_or_insert_with(|| format!("depth bound {} reached", self.bound));
                continue;
            }
            match self.explore(&(x0 + &pm * z), m + 1) {
                Disc::Found(wit) => return Disc::Found(wit),
                Disc::Empty(n) => discs += n,
                Disc::Open(why) => {
                    open.get_or_insert(why);
                }
            }
        }
        match open {
            Some(why) => Disc::Open(why),
            None => Disc::Empty(discs),
        }
    }
}

fn eval_mod(c: &[BigInt], z: &BigInt, p: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, x| (acc * z + x).mod_floor(p))
}

/// Root of H near a simple root z mod p, accurate to v(H(z)) >= prec.
fn newton_unit(h: &Polynomial, z: &BigInt, p: &BigInt, prec: u32) -> BigInt {
    let dh = h.derivative();
    let modulus = num_traits::pow(p.clone(), prec as usize + 1);
    let mut z = z.clone();
    let mut have = 1u32;
    while have < prec + 1 {
        let zr = Rational::from_integer(z.clone());
        let hv = h.eval(&zr);
        if hv.is_zero() {
            break;
        }
        let step = hv / dh.eval(&zr);
        z = reduce_mod(&(zr - step), &modulus).expect("unit derivative");
        have *= 2;
    }
    z
}

fn decide_charts(f: &Polynomial, big_f: &Polynomial, p: &BigInt, depth: Option<u32>, change: &CurveChange) -> Result<QpDecision, LocalError> {
    if p == &BigInt::from(2) {
        return Err(LocalError::TwoAdic);
    }
    if !is_prime(p)? {
        return Err(LocalError::NotPrime(p.clone()));
    }
    let mut discs = 0u64;
    let mut open = None;
    for (chart, g, m0) in [(Chart::Affine, f, 0u32), (Chart::Infinity, big_f, 1)] {
        if g.is_zero() {
            return Err(LocalError::Unavailable("zero polynomial".into()));
        }
        let (h, _) = normalize(g, p);
        let bound = depth.unwrap_or_else(|| default_depth_bound(&h, p));
        let cw = Chartwise { p, chart, g, h, change, bound };
        match cw.explore(&BigInt::zero(), m0) {
            Disc::Found(w) => return Ok(QpDecision::Points(w)),
            Disc::Empty(n) => discs += n,
            Disc::Open(why) => {
                open.get_or_insert(format!("{chart:?} chart: {why}"));
            }
        }
    }
    Ok(match open {
        Some(why) => QpDecision::Inconclusive(why),
        None => QpDecision::NoPoints { discs },
    })
}

/// Decides whether the curve has a Q_p-point by residue discs on both charts of its integral model.
pub fn decide_qp_points(curve: &HyperellipticCurve, p: &BigInt, depth_bound: Option<u32>) -> Result<QpDecision, LocalError> {
    let (model, change) = integral_model(curve, p);
    decide_charts(&model.f, &model.F, p, depth_bound, &change)
}

/// The same decision for s^2 = f(t) with f of formal degree d (even), glued to S^2 = T^d f(1/T).
pub fn decide_qp_poly(f: &Polynomial, d: usize, p: &BigInt, depth_bound: Option<u32>) -> Result<QpDecision, LocalError> {
    decide_charts(f, &f.reversed(d), p, depth_bound, &CurveChange::identity())
}
