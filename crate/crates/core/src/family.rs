//! Fibers of the curve family X, the surface family S and the map between them.
//!
//! For a parameter quadruple and theta in P^1(Q) the fiber curve is
//! `s^2 = (b/a)(t^{g+1} - A)(t^{g+1} - B)` and the fiber surface is the intersection of
//! `x^2 - a z^2 + b(u - A v)(u - B v) = 0` and `x^2 - a y^2 + a C^2 u v = 0` in P^4.

use crate::arith::{padic_val, pow_rat, rat_int, rational_sqrt, Chart, Polynomial, Rational};
use crate::json::{rational, RationalRepr};
use crate::params::ParamSet;
use crate::arith::padic::pow_p;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("coefficient {0} vanishes")]
    Vanishing(&'static str),
    #[error("genus {0} is even")]
    EvenGenus(u32),
    #[error("the j-invariant is defined for genus 1 only, got genus {0}")]
    NotGenusOne(u32),
    #[error("j-invariant denominator A B (A - B)^4 vanishes")]
    DegenerateJ,
    #[error("invalid theta: {0}")]
    BadTheta(String),
}

/// A point of P^1(Q).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Theta {
    Finite(Rational),
    Infinity,
}

impl Theta {
    pub fn zero() -> Self {
        Theta::Finite(Rational::zero())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Theta::Finite(Rational::new(n.into(), d.into()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Theta::Finite(x) if x.is_zero())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Theta::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Theta::Finite(x) => Some(x),
            Theta::Infinity => None,
        }
    }

    /// v_p(theta), with theta = 0 giving None (+infinity) and theta = inf giving Some(i64::MIN).
    pub fn valuation(&self, p: &BigInt) -> Option<i64> {
        match self {
            Theta::Finite(x) => padic_val(x, p),
            Theta::Infinity => Some(i64::MIN),
        }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::Finite(x) => write!(f, "{x}"),
            Theta::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Theta {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Theta::Infinity);
        }
        let bad = || FamilyError::BadTheta(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse::<BigInt>().map_err(|_| bad())?, d.trim().parse::<BigInt>().map_err(|_| bad())?),
            None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Theta::Finite(Rational::new(n, d)))
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Theta::Finite(x) => RationalRepr::from(x).serialize(s),
            Theta::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Tag(String),
            Rat(RationalRepr),
        }
        match Repr::deserialize(d)? {
            Repr::Tag(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Rat(r) => Ok(Theta::Finite(r.to_rational()?)),
        }
    }
}

/// Structured coefficients of one fiber.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCoeffs {
    pub params: ParamSet,
    pub theta: Theta,
    #[serde(with = "rational")]
    pub A: Rational,
    #[serde(with = "rational")]
    pub B: Rational,
    #[serde(with = "rational")]
    pub C: Rational,
    #[serde(with = "rational")]
    pub D: Rational,
}

fn int_pow(x: &BigInt, e: u32) -> BigInt {
    num_traits::pow(x.clone(), e as usize)
}

/// A, B, C, D of the fiber over theta.
#[allow(non_snake_case)]
pub fn coeffs(params: &ParamSet, theta: &Theta) -> FamilyCoeffs {
    let (a, b, c, d) = (&params.a, &params.b, &params.c, &params.d);
    let (g, h) = (params.g, params.h);
    let ab = a * b;
    let (C, D, lead) = match theta {
        Theta::Finite(x) => {
            let tn = pow_rat(x, g + 1);
            let C = rat_int(&int_pow(a, 2 * h + 1)) * &tn - Rational::one();
            let D = rat_int(&int_pow(&ab, 2 * h + 1)) * &tn - Rational::one();
            let lead = rat_int(&int_pow(a, 4 * h + 3)) * &tn * &tn;
            (C, D, lead)
        }
        Theta::Infinity => (rat_int(&int_pow(a, 2 * h + 1)), rat_int(&int_pow(&ab, 2 * h + 1)), rat_int(&int_pow(a, 4 * h + 3))),
    };
    let d2 = &D * &D;
    let A = &lead + rat_int(&(b * c * c * d)) * &d2;
    let B = &A + rat_int(&(BigInt::from(2) * c)) * &d2;
    FamilyCoeffs { params: params.clone(), theta: theta.clone(), A, B, C, D }
}

/// Fails naming the first of A, B, C, D that vanishes.
pub fn check_nonvanishing(k: &FamilyCoeffs) -> Result<(), FamilyError> {
    for (name, v) in [("A", &k.A), ("B", &k.B), ("C", &k.C), ("D", &k.D)] {
        if v.is_zero() {
            return Err(FamilyError::Vanishing(name));
        }
    }
    Ok(())
}

/// `s^2 = f(t) = (b/a)(t^n - A)(t^n - B)` with n = g+1, glued with `S^2 = F(T) = T^{2n} f(1/T)`.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    pub genus: u32,
    pub a: Rational,
    pub b: Rational,
    pub A: Rational,
    pub B: Rational,
    pub f: Polynomial,
    pub F: Polynomial,
    pub coeffs: Option<FamilyCoeffs>,
}

#[allow(non_snake_case)]
impl HyperellipticCurve {
    pub fn new(genus: u32, a: Rational, b: Rational, A: Rational, B: Rational) -> Self {
        let n = genus as usize + 1;
        let lead = &b / &a;
        let p1 = &Polynomial::monomial(Rational::one(), n) - &Polynomial::constant(A.clone());
        let p2 = &Polynomial::monomial(Rational::one(), n) - &Polynomial::constant(B.clone());
        let f = (&p1 * &p2).scale(&lead);
        let F = f.reversed(2 * n);
        HyperellipticCurve { genus, a, b, A, B, f, F, coeffs: None }
    }

    pub fn n(&self) -> u32 {
        self.genus + 1
    }

    pub fn degree(&self) -> usize {
        2 * self.genus as usize + 2
    }

    pub fn poly(&self, chart: Chart) -> &Polynomial {
        match chart {
            Chart::Affine => &self.f,
            Chart::Infinity => &self.F,
        }
    }

    pub fn contains(&self, chart: Chart, s: &Rational, t: &Rational) -> bool {
        s * s == self.poly(chart).eval(t)
    }
}

pub fn build_curve(k: &FamilyCoeffs) -> HyperellipticCurve {
    let mut c = HyperellipticCurve::new(k.params.g, rat_int(&k.params.a), rat_int(&k.params.b), k.A.clone(), k.B.clone());
    c.coeffs = Some(k.clone());
    c
}

/// a, b, A, B and A - B all nonzero.
pub fn check_smooth_curve(c: &HyperellipticCurve) -> bool {
    !(c.a.is_zero() || c.b.is_zero() || c.A.is_zero() || c.B.is_zero() || c.A == c.B)
}

/// Original coordinates in terms of model ones: s = lambda_s s', t = lambda_t t'.
/// On the second chart this reads S = (lambda_s / lambda_t^n) S', T = T' / lambda_t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveChange {
    #[serde(with = "rational")]
    pub lambda_s: Rational,
    #[serde(with = "rational")]
    pub lambda_t: Rational,
}

impl CurveChange {
    pub fn identity() -> Self {
        CurveChange { lambda_s: Rational::one(), lambda_t: Rational::one() }
    }

    pub fn is_identity(&self) -> bool {
        self.lambda_s.is_one() && self.lambda_t.is_one()
    }

    /// (mu_S, mu_T) with S = mu_S S', T = mu_T T' on the second chart.
    pub fn chart2(&self, n: u32) -> (Rational, Rational) {
        (&self.lambda_s / pow_rat(&self.lambda_t, n), Rational::one() / &self.lambda_t)
    }

    /// Scalings (mu_s, mu_t) of the given chart.
    pub fn scalings(&self, chart: Chart, n: u32) -> (Rational, Rational) {
        match chart {
            Chart::Affine => (self.lambda_s.clone(), self.lambda_t.clone()),
            Chart::Infinity => self.chart2(n),
        }
    }

    /// Model polynomial of a chart: g(t') = f(mu_t t') / mu_s^2.
    pub fn transform(&self, curve: &HyperellipticCurve, chart: Chart) -> Polynomial {
        let (ms, mt) = self.scalings(chart, curve.n());
        let inv = Rational::one() / (&ms * &ms);
        curve.poly(chart).substitute_linear(&Rational::zero(), &mt).scale(&inv)
    }

    /// Original coordinates of a model point.
    pub fn pull_back(&self, chart: Chart, n: u32, s: &Rational, t: &Rational) -> (Rational, Rational) {
        let (ms, mt) = self.scalings(chart, n);
        (ms * s, mt * t)
    }

    /// Apply `self`, then `inner` on the resulting model.
    pub fn then(&self, inner: &CurveChange) -> CurveChange {
        CurveChange { lambda_s: &self.lambda_s * &inner.lambda_s, lambda_t: &self.lambda_t * &inner.lambda_t }
    }
}

/// A model over Z_(p) with a, b, A, B p-integral, and the change back to the given curve.
///
/// When theta has v_p(theta) = -l < 0 the substitution theta = p^{-l} theta~ is used, i.e.
/// (s, t) = (p^{-2(g+1)l} s', p^{-2l} t'). Otherwise t is scaled by the least power of p^{-1}
/// making A and B integral.
#[allow(non_snake_case)]
pub fn integral_model(curve: &HyperellipticCurve, p: &BigInt) -> (HyperellipticCurve, CurveChange) {
    let n = curve.n() as i64;
    let k = match curve.coeffs.as_ref().and_then(|c| c.theta.finite()).and_then(|x| padic_val(x, p)) {
        Some(v) if v < 0 => -2 * v,
        _ => {
            let m = padic_val(&curve.A, p).unwrap_or(0).min(padic_val(&curve.B, p).unwrap_or(0));
            if m < 0 {
                (-m + n - 1) / n
            } else {
                0
            }
        }
    };
    if k == 0 {
        let mut model = curve.clone();
        model.coeffs = None;
        return (model, CurveChange::identity());
    }
    let scale = pow_p(p, k * n);
    let model = HyperellipticCurve::new(curve.genus, curve.a.clone(), curve.b.clone(), &curve.A * &scale, &curve.B * &scale);
    (model, CurveChange { lambda_s: pow_p(p, -k * n), lambda_t: pow_p(p, -k) })
}

/// The quadric pair `x^2 - a z^2 + b(u - A v)(u - B v) = 0`, `x^2 - a y^2 + a C^2 u v = 0`.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dp4Surface {
    #[serde(with = "rational")]
    pub a: Rational,
    #[serde(with = "rational")]
    pub b: Rational,
    #[serde(with = "rational")]
    pub A: Rational,
    #[serde(with = "rational")]
    pub B: Rational,
    #[serde(with = "rational")]
    pub C: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub change: Option<SurfaceChange>,
}

/// Original coordinates are `scalings[i]` times model coordinates, in the order x, y, z, u, v.
/// The class (a, b(u - A v)/v) on the original model equals (a, class_factor * b(u' - A' v')/v')
/// on the new one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceChange {
    #[serde(with = "crate::json::rational_vec")]
    pub scalings: Vec<Rational>,
    #[serde(with = "rational")]
    pub class_factor: Rational,
    pub class_factor_is_square: bool,
}

#[allow(non_snake_case)]
impl Dp4Surface {
    pub fn new(a: Rational, b: Rational, A: Rational, B: Rational, C: Rational) -> Self {
        Dp4Surface { a, b, A, B, C, change: None }
    }

    /// Values of both quadrics at (x, y, z, u, v).
    pub fn quadrics(&self, p: &[Rational; 5]) -> (Rational, Rational) {
        let [x, y, z, u, v] = p;
        let q1 = x * x - &self.a * z * z + &self.b * (u - &self.A * v) * (u - &self.B * v);
        let q2 = x * x - &self.a * y * y + &self.a * &self.C * &self.C * u * v;
        (q1, q2)
    }

    /// The same quadrics written through squared coordinates x^2, y^2, z^2.
    pub fn quadrics_squared(&self, x2: &Rational, y2: &Rational, z2: &Rational, u: &Rational, v: &Rational) -> (Rational, Rational) {
        let q1 = x2 - &self.a * z2 + &self.b * (u - &self.A * v) * (u - &self.B * v);
        let q2 = x2 - &self.a * y2 + &self.a * &self.C * &self.C * u * v;
        (q1, q2)
    }

    /// b^2 (B-A)^2 + 2ab C^2 (B-A) + 4ab C^2 A + a^2 C^4.
    pub fn smoothness_quartic(&self) -> Rational {
        let (a, b) = (&self.a, &self.b);
        let c2 = &self.C * &self.C;
        let e = &self.B - &self.A;
        b * b * &e * &e + Rational::from_integer(2.into()) * a * b * &c2 * &e + Rational::from_integer(4.into()) * a * b * &c2 * &self.A + a * a * &c2 * &c2
    }

    fn scaled(&self, kappa: &Rational, c_scale: &Rational) -> Dp4Surface {
        Dp4Surface::new(self.a.clone(), self.b.clone(), &self.A * kappa, &self.B * kappa, &self.C * c_scale, )
    }
}

pub fn build_surface(k: &FamilyCoeffs) -> Dp4Surface {
    Dp4Surface::new(rat_int(&k.params.a), rat_int(&k.params.b), k.A.clone(), k.B.clone(), k.C.clone())
}

/// a, b, A, B, C, A - B nonzero and the smoothness quartic nonzero.
pub fn check_smooth_surface(s: &Dp4Surface) -> bool {
    let nonzero = [&s.a, &s.b, &s.A, &s.B, &s.C].iter().all(|x| !x.is_zero()) && s.A != s.B;
    nonzero && !s.smoothness_quartic().is_zero()
}

/// A model with a, b, A, B, C p-integral reached by v = kappa v', kappa a square.
///
/// At theta = inf the global rescaling kappa = C^{-2} comes first. Then kappa is multiplied by
/// p^{-2 floor(m/2)}, m the least valuation among A, B and C^2.
pub fn admissible_model(surface: &Dp4Surface, p: &BigInt, theta: &Theta) -> (Dp4Surface, SurfaceChange) {
    let mut kappa = Rational::one();
    let mut c_scale = Rational::one();
    if theta.is_infinity() {
        kappa = Rational::one() / (&surface.C * &surface.C);
        c_scale = Rational::one() / &surface.C;
    }
    let first = surface.scaled(&kappa, &c_scale);
    let vals = [padic_val(&first.A, p), padic_val(&first.B, p), padic_val(&first.C, p).map(|v| 2 * v)];
    let m = vals.iter().flatten().copied().min().unwrap_or(0);
    let half = Integer::div_floor(&m, &2);
    kappa *= pow_p(p, -2 * half);
    c_scale *= pow_p(p, -half);
    let mut model = surface.scaled(&kappa, &c_scale);
    let one = Rational::one();
    let class_factor = &one / &kappa;
    let change = SurfaceChange {
        scalings: vec![one.clone(), one.clone(), one.clone(), one, kappa.clone()],
        class_factor_is_square: rational_sqrt(&class_factor).is_some(),
        class_factor,
    };
    model.change = Some(change.clone());
    (model, change)
}

/// A point of P^4 with exact rational coordinates (x : y : z : u : v).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjPoint {
    #[serde(with = "crate::json::rational_vec")]
    pub coords: Vec<Rational>,
}

impl ProjPoint {
    pub fn array(&self) -> [Rational; 5] {
        [self.coords[0].clone(), self.coords[1].clone(), self.coords[2].clone(), self.coords[3].clone(), self.coords[4].clone()]
    }

    /// Representative with coprime integer coordinates and a positive first nonzero entry.
    pub fn normalized(&self) -> ProjPoint {
        let den = self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coords.iter().map(|c| (c * rat_int(&den)).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if let Some(first) = ints.iter().find(|c| !c.is_zero()) {
            if first.is_negative() {
                g = -g;
            }
        }
        if g.is_zero() {
            return self.clone();
        }
        ProjPoint { coords: ints.iter().map(|c| Rational::from_integer(c / &g)).collect() }
    }
}

/// Image of a curve point: (0 : C t^{n/2} : s : t^n : 1) on the first chart and
/// (0 : C T^{n/2} : S : 1 : T^n) on the second, n = g+1.
#[allow(non_snake_case)]
pub fn delta_map(chart: Chart, s: &Rational, t: &Rational, C: &Rational, g: u32) -> Result<ProjPoint, FamilyError> {
    if g.is_multiple_of(2) {
        return Err(FamilyError::EvenGenus(g));
    }
    let n = g + 1;
    let y = C * pow_rat(t, n / 2);
    let tn = pow_rat(t, n);
    let zero = Rational::zero();
    let coords = match chart {
        Chart::Affine => vec![zero, y, s.clone(), tn, Rational::one()],
        Chart::Infinity => vec![zero, y, s.clone(), Rational::one(), tn],
    };
    Ok(ProjPoint { coords })
}

/// 16 [(A-B)^2 + 16 A B]^3 / (A B (A-B)^4) for genus 1 fibers.
#[allow(non_snake_case)]
pub fn j_invariant(k: &FamilyCoeffs) -> Result<Rational, FamilyError> {
    if k.params.g != 1 {
        return Err(FamilyError::NotGenusOne(k.params.g));
    }
    j_from(&k.A, &k.B)
}

#[allow(non_snake_case)]
pub fn j_from(A: &Rational, B: &Rational) -> Result<Rational, FamilyError> {
    let e = A - B;
    let e2 = &e * &e;
    let den = A * B * &e2 * &e2;
    if den.is_zero() {
        return Err(FamilyError::DegenerateJ);
    }
    let sixteen = Rational::from_integer(16.into());
    let inner = &e2 + &sixteen * A * B;
    Ok(sixteen * &inner * &inner * &inner / den)
}

/// A fiber with all of its models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub coeffs: FamilyCoeffs,
    pub curve: HyperellipticCurve,
    pub surface: Dp4Surface,
}

impl Fiber {
    pub fn new(params: &ParamSet, theta: &Theta) -> Result<Fiber, FamilyError> {
        let k = coeffs(params, theta);
        check_nonvanishing(&k)?;
        Ok(Fiber { curve: build_curve(&k), surface: build_surface(&k), coeffs: k })
    }

    pub fn params(&self) -> &ParamSet {
        &self.coeffs.params
    }

    pub fn theta(&self) -> &Theta {
        &self.coeffs.theta
    }

    pub fn descriptor(&self) -> FiberDescriptor {
        let k = &self.coeffs;
        FiberDescriptor {
            params: k.params.clone(),
            theta: k.theta.clone(),
            coeffs: CoeffValues { a: k.A.clone(), b: k.B.clone(), c: k.C.clone(), d: k.D.clone() },
            genus: k.params.g,
            h: k.params.h,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffValues {
    #[serde(rename = "A", with = "rational")]
    pub a: Rational,
    #[serde(rename = "B", with = "rational")]
    pub b: Rational,
    #[serde(rename = "C", with = "rational")]
    pub c: Rational,
    #[serde(rename = "D", with = "rational")]
    pub d: Rational,
}

/// JSON form of a fiber: `{params, theta, coeffs: {A, B, C, D}, genus, h}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberDescriptor {
    pub params: ParamSet,
    pub theta: Theta,
    pub coeffs: CoeffValues,
    #[serde(with = "crate::json::dec")]
    pub genus: u32,
    #[serde(with = "crate::json::dec")]
    pub h: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{padic_val_int, rat, ratio};
    use crate::testutil::{params_g1, params_g5};
    use proptest::prelude::*;

    fn r(n: &BigInt) -> Rational {
        rat_int(n)
    }

    #[test]
    fn theta_zero_and_infinity() {
        let p = params_g1();
        let (a, b, c, d) = (r(&p.a), r(&p.b), r(&p.c), r(&p.d));
        let k = coeffs(&p, &Theta::zero());
        assert_eq!(k.A, &b * &c * &c * &d);
        assert_eq!(k.B, &b * &c * &c * &d + rat(2) * &c);
        assert_eq!((k.C.clone(), k.D.clone()), (rat(-1), rat(-1)));
        let k = coeffs(&p, &Theta::Infinity);
        assert_eq!(k.D, &a * &b);
        assert_eq!(k.C, a);
        let p5 = params_g5();
        let k = coeffs(&p5, &Theta::Infinity);
        assert_eq!(k.D, pow_rat(&(r(&p5.a) * r(&p5.b)), 3));
    }

    #[test]
    fn nonvanishing() {
        let p = params_g1();
        for t in [Theta::zero(), Theta::ratio(22, 7), Theta::Infinity] {
            assert!(check_nonvanishing(&coeffs(&p, &t)).is_ok());
        }
        let mut k = coeffs(&p, &Theta::zero());
        k.D = rat(0);
        assert_eq!(check_nonvanishing(&k), Err(FamilyError::Vanishing("D")));
    }

    #[test]
    fn smooth_fibers() {
        let p = params_g1();
        for t in [Theta::zero(), Theta::ratio(1, 1), Theta::Infinity] {
            let f = Fiber::new(&p, &t).unwrap();
            assert!(check_smooth_curve(&f.curve));
            assert!(check_smooth_surface(&f.surface));
        }
        let c = HyperellipticCurve::new(1, rat(1), rat(1), rat(3), rat(3));
        assert!(!check_smooth_curve(&c));
    }

    #[test]
    fn quartic_at_zero_reduces_to_valuation_identity() {
        let p = params_g1();
        let (a, b, c, d) = (r(&p.a), r(&p.b), r(&p.c), r(&p.d));
        let s = build_surface(&coeffs(&p, &Theta::zero()));
        let rhs = &a * &b * &c * &c * &d + &a * &c + &b * &c * &c;
        assert_eq!(s.smoothness_quartic(), &a * &a + rat(4) * &b * &rhs);
        let lhs = -(&a * &a) / (rat(4) * &b);
        assert_eq!(padic_val(&lhs, &p.a), Some(2));
        assert_eq!(padic_val(&rhs, &p.a), Some(0));
    }

    #[test]
    fn synthetic_singular_surface() {
        let (a, b, c, e) = (rat(3), rat(5), rat(2), rat(7));
        let c2 = &c * &c;
        let big_a = -(&b * &b * &e * &e + rat(2) * &a * &b * &c2 * &e + &a * &a * &c2 * &c2) / (rat(4) * &a * &b * &c2);
        let s = Dp4Surface::new(a, b, big_a.clone(), &big_a + &e, c);
        assert!(s.smoothness_quartic().is_zero());
        assert!(!check_smooth_surface(&s));
    }

    #[test]
    fn curve_models() {
        let p = params_g1();
        let k = coeffs(&p, &Theta::zero());
        let c = build_curve(&k);
        let (a, b) = (r(&p.a), r(&p.b));
        let a0 = &b * r(&p.c) * r(&p.c) * r(&p.d);
        let expect = (&(&Polynomial::monomial(rat(1), 2) - &Polynomial::constant(a0.clone()))
            * &(&Polynomial::monomial(rat(1), 2) - &Polynomial::constant(&a0 + rat(2) * r(&p.c))))
            .scale(&(&b / &a));
        assert_eq!(c.f, expect);
        let mut rev = c.f.coeffs().to_vec();
        rev.reverse();
        assert_eq!(c.F.coeffs(), &rev[..]);
        let s = build_surface(&k);
        assert_eq!(&s.C * &s.C, rat(1));
    }

    #[test]
    fn delta_lands_on_surface() {
        let p = params_g1();
        for t in [Theta::zero(), Theta::ratio(-3, 2), Theta::Infinity] {
            let fib = Fiber::new(&p, &t).unwrap();
            let n = fib.curve.n();
            for tv in [rat(0), rat(5), ratio(-7, 3), ratio(11, 13)] {
                for chart in [Chart::Affine, Chart::Infinity] {
                    let s2 = fib.curve.poly(chart).eval(&tv);
                    let cc = &fib.surface.C * &fib.surface.C;
                    let y2 = &cc * pow_rat(&tv, n);
                    let (u, v) = match chart {
                        Chart::Affine => (pow_rat(&tv, n), rat(1)),
                        Chart::Infinity => (rat(1), pow_rat(&tv, n)),
                    };
                    let (q1, q2) = fib.surface.quadrics_squared(&rat(0), &y2, &s2, &u, &v);
                    assert!(q1.is_zero() && q2.is_zero());
                }
            }
        }
        let c = HyperellipticCurve::new(1, rat(1), rat(1), rat(1), rat(4));
        let surf = Dp4Surface::new(rat(1), rat(1), rat(1), rat(4), rat(3));
        for (s, t) in [(rat(2), rat(0)), (rat(0), rat(1)), (rat(0), rat(-2))] {
            assert!(c.contains(Chart::Affine, &s, &t));
            let img = delta_map(Chart::Affine, &s, &t, &surf.C, 1).unwrap();
            let (q1, q2) = surf.quadrics(&img.array());
            assert!(q1.is_zero() && q2.is_zero());
            assert!(img.coords[0].is_zero());
        }
        let img = delta_map(Chart::Affine, &rat(0), &rat(0), &rat(-1), 1).unwrap();
        assert_eq!(img.coords, vec![rat(0), rat(0), rat(0), rat(0), rat(1)]);
        assert!(delta_map(Chart::Affine, &rat(0), &rat(0), &rat(1), 2).is_err());
    }

    #[test]
    fn j_invariants() {
        assert_eq!(j_from(&rat(5), &rat(-5)).unwrap(), rat(1728));
        assert_eq!(j_from(&rat(5), &rat(5)), Err(FamilyError::DegenerateJ));
        let p = params_g1();
        let j0 = j_invariant(&coeffs(&p, &Theta::zero())).unwrap();
        let j1 = j_invariant(&coeffs(&p, &Theta::ratio(1, 1))).unwrap();
        assert_ne!(j0, j1);
        assert_eq!(j_invariant(&coeffs(&params_g5(), &Theta::zero())), Err(FamilyError::NotGenusOne(5)));
    }

    #[test]
    fn integral_model_tilde_substitution() {
        let p = params_g1();
        let q = BigInt::from(7);
        let fib = Fiber::new(&p, &Theta::ratio(0, 1)).unwrap();
        let (m, ch) = integral_model(&fib.curve, &q);
        assert!(ch.is_identity());
        assert_eq!(m.f, fib.curve.f);
        let fib = Fiber::new(&p, &Theta::Finite(Rational::new(1.into(), q.clone()))).unwrap();
        let (m, ch) = integral_model(&fib.curve, &q);
        let (a, b, c, d) = (r(&p.a), r(&p.b), r(&p.c), r(&p.d));
        let dt = &a * &b - rat(49);
        let at = &a * &a * &a + &b * &c * &c * &d * &dt * &dt;
        let bt = &a * &a * &a + (&b * &c * &c * &d + rat(2) * &c) * &dt * &dt;
        assert_eq!((m.A.clone(), m.B.clone()), (at, bt));
        assert_eq!(ch.lambda_t, ratio(1, 49));
        for tv in [rat(0), rat(3), ratio(2, 5)] {
            for chart in [Chart::Affine, Chart::Infinity] {
                let model_poly = ch.transform(&fib.curve, chart);
                assert_eq!(&model_poly, m.poly(chart));
                let (ms, mt) = ch.scalings(chart, fib.curve.n());
                assert_eq!(&ms * &ms * model_poly.eval(&tv), fib.curve.poly(chart).eval(&(&mt * &tv)));
            }
        }
    }

    #[test]
    fn admissible_models() {
        let p = params_g1();
        let fib = Fiber::new(&p, &Theta::zero()).unwrap();
        for q in [3i64, 5, 73, 1753] {
            let (m, ch) = admissible_model(&fib.surface, &BigInt::from(q), fib.theta());
            assert_eq!((m.A.clone(), m.B.clone()), (fib.surface.A.clone(), fib.surface.B.clone()));
            assert!(ch.class_factor.is_one());
        }
        let (a, b, c, d) = (r(&p.a), r(&p.b), r(&p.c), r(&p.d));
        let fib = Fiber::new(&p, &Theta::Infinity).unwrap();
        let (m, ch) = admissible_model(&fib.surface, &p.a, fib.theta());
        assert_eq!(m.A, &a + &b * &b * &b * &c * &c * &d);
        assert_eq!(m.B - &m.A, rat(2) * &b * &b * &c);
        assert_eq!(m.C, rat(1));
        assert!(ch.class_factor_is_square);
        let fib = Fiber::new(&p, &Theta::Finite(Rational::new(1.into(), p.a.clone()))).unwrap();
        let (m, ch) = admissible_model(&fib.surface, &p.a, fib.theta());
        let dt = &b - &a;
        assert_eq!(m.A, &a + &b * &c * &c * &d * &dt * &dt);
        assert_eq!(m.C, rat(1) - &a);
        assert!(ch.class_factor_is_square);
        for x in [&m.A, &m.B, &m.C] {
            assert!(padic_val(x, &p.a).unwrap() >= 0);
        }
        assert_eq!(padic_val_int(&(m.B - m.A).to_integer(), &p.a), Some(0));
    }

    #[test]
    fn theta_text_and_json() {
        for (s, t) in [("inf", Theta::Infinity), ("0", Theta::zero()), ("-3/6", Theta::ratio(-1, 2))] {
            assert_eq!(s.parse::<Theta>().unwrap(), t);
            let js = serde_json::to_string(&t).unwrap();
            assert_eq!(serde_json::from_str::<Theta>(&js).unwrap(), t);
        }
        assert_eq!(serde_json::to_string(&Theta::ratio(2, 3)).unwrap(), r#"{"num":"2","den":"3"}"#);
        assert!("1/0".parse::<Theta>().is_err());
        let fib = Fiber::new(&params_g1(), &Theta::ratio(1, 2)).unwrap();
        let js = serde_json::to_string(&fib.descriptor()).unwrap();
        assert_eq!(serde_json::from_str::<FiberDescriptor>(&js).unwrap(), fib.descriptor());
    }

    proptest! {
        #[test]
        fn coefficient_identities(n in -100i64..=100, d in 1i64..=100) {
            let p = params_g1();
            let t = Theta::ratio(n, d);
            let k = coeffs(&p, &t);
            prop_assert_eq!(&k.B - &k.A, rat(2) * r(&p.c) * &k.D * &k.D);
            let fib = Fiber::new(&p, &t).unwrap();
            prop_assert!(check_smooth_curve(&fib.curve));
            prop_assert!(check_smooth_surface(&fib.surface));
            let mut rev = fib.curve.F.coeffs().to_vec();
            rev.resize(fib.curve.degree() + 1, Rational::zero());
            rev.reverse();
            prop_assert_eq!(Polynomial::new(rev), fib.curve.f.clone());
        }
    }
}
