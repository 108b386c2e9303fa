//! Local invariants of the quaternion class (a, b(u - A v)/v) on the fiber surfaces and the
//! resulting obstruction to rational points.

use crate::arith::{hilbert_symbol, inv_mod, is_local_square, jacobi, padic_val, reduce_mod, unit_part, ArithError, Place, Rational};
use crate::family::{admissible_model, Dp4Surface, Fiber, FiberDescriptor, Theta};
use crate::local::{sample_direct_points, sample_surface_points, BlanketRecord, Check, CriticalSet, LocalCertificate, LocalReport, LocalSurfacePoint};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Add;
use std::str::FromStr;
use thiserror::Error;

/// Points drawn per place when no count is given.
pub const DEFAULT_SAMPLES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("point does not lie on the surface: {0}")]
    BadPoint(String),
    #[error("no representation of the class is defined and nonzero at the point")]
    Undefined,
    #[error("representations disagree at {0}")]
    Mismatch(Place),
}

/// An element of (1/2)Z/Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inv {
    Zero,
    Half,
}

impl Inv {
    pub fn from_symbol(s: i8) -> Inv {
        if s == 1 {
            Inv::Zero
        } else {
            Inv::Half
        }
    }
}

impl Add for Inv {
    type Output = Inv;
    fn add(self, o: Inv) -> Inv {
        if self == o {
            Inv::Zero
        } else {
            Inv::Half
        }
    }
}

impl std::iter::Sum for Inv {
    fn sum<I: Iterator<Item = Inv>>(iter: I) -> Inv {
        iter.fold(Inv::Zero, |a, b| a + b)
    }
}

impl fmt::Display for Inv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inv::Zero => "0",
            Inv::Half => "1/2",
        })
    }
}

impl FromStr for Inv {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "0" => Ok(Inv::Zero),
            "1/2" => Ok(Inv::Half),
            _ => Err(format!("invalid invariant {s}")),
        }
    }
}

impl Serialize for Inv {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Inv {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The class (a, r) with r any of b phi/v, -psi/v, b phi/(-a u), -psi/(-a u),
/// where phi = u - A v and psi = u - B v.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuaternionClass {
    pub first_slot: Rational,
    pub b: Rational,
    pub A: Rational,
    pub B: Rational,
}

pub const REPRESENTATIONS: [&str; 4] = ["b phi/v", "-psi/v", "b phi/(-a u)", "-psi/(-a u)"];

impl QuaternionClass {
    pub fn of(surface: &Dp4Surface) -> Self {
        QuaternionClass { first_slot: surface.a.clone(), b: surface.b.clone(), A: surface.A.clone(), B: surface.B.clone() }
    }

    /// Values of the four second slots; None where the denominator vanishes.
    pub fn representations(&self, u: &Rational, v: &Rational) -> [Option<Rational>; 4] {
        let phi = u - &self.A * v;
        let psi = u - &self.B * v;
        let bphi = &self.b * &phi;
        let au = -(&self.first_slot * u);
        let over = |num: &Rational, den: &Rational| if den.is_zero() { None } else { Some(num / den) };
        [over(&bphi, v), over(&-psi.clone(), v), over(&bphi, &au), over(&-psi, &au)]
    }

    /// Invariant at a point, evaluated through every usable representation; all must agree.
    pub fn evaluate(&self, point: &LocalSurfacePoint) -> Result<Inv, BrauerError> {
        let mut value: Option<i8> = None;
        for r in self.representations(&point.u, &point.v).into_iter().flatten() {
            if r.is_zero() {
                continue;
            }
            let s = hilbert_symbol(&self.first_slot, &r, &point.place)?;
            match value {
                Some(prev) if prev != s => return Err(BrauerError::Mismatch(point.place.clone())),
                _ => value = Some(s),
            }
        }
        value.map(Inv::from_symbol).ok_or(BrauerError::Undefined)
    }
}

/// inv_v of the class at a local point of the surface.
pub fn evaluate_invariant_at_point(surface: &Dp4Surface, point: &LocalSurfacePoint) -> Result<Inv, BrauerError> {
    point.verify(surface).map_err(BrauerError::BadPoint)?;
    QuaternionClass::of(surface).evaluate(point)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub value: Option<Inv>,
    pub consistent: bool,
    pub count: usize,
    pub requested: usize,
}

impl SampleOutcome {
    /// Fewer points than requested were found.
    pub fn short(&self) -> bool {
        self.count < self.requested
    }
}

fn outcome(values: &[Inv], requested: usize) -> SampleOutcome {
    let consistent = values.windows(2).all(|w| w[0] == w[1]);
    SampleOutcome { value: values.first().copied(), consistent, count: values.len(), requested }
}

/// Invariant at n local points of the fiber surface: the witness image, curve images and direct samples.
pub fn sample_invariant(fiber: &Fiber, place: &Place, cert: Option<&LocalCertificate>, n: usize, seed: u64) -> Result<SampleOutcome, BrauerError> {
    if n == 0 {
        return Err(BrauerError::NoSamples);
    }
    let class = QuaternionClass::of(&fiber.surface);
    let points = sample_surface_points(&fiber.curve, &fiber.surface, cert, place, n, seed);
    let values = points.iter().map(|p| class.evaluate(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(outcome(&values, n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantMethod {
    PropGood,
    PropC,
    PropA,
    PropSquare,
    Sampled,
}

impl fmt::Display for InvariantMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantMethod::PropGood => "prop-good",
            InvariantMethod::PropC => "prop-c",
            InvariantMethod::PropA => "prop-a",
            InvariantMethod::PropSquare => "prop-square",
            InvariantMethod::Sampled => "sampled",
        })
    }
}

impl FromStr for InvariantMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "prop-good" => InvariantMethod::PropGood,
            "prop-c" => InvariantMethod::PropC,
            "prop-a" => InvariantMethod::PropA,
            "prop-square" => InvariantMethod::PropSquare,
            "sampled" => InvariantMethod::Sampled,
            _ => return Err(format!("unknown method {s}")),
        })
    }
}

impl Serialize for InvariantMethod {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InvariantMethod {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantCertificate {
    pub place: Place,
    pub value: Inv,
    pub method: InvariantMethod,
    /// Hypotheses of the branch that fired, all holding unless the method is sampled.
    pub hypotheses: Vec<Check>,
    /// Branches tried before, each with its first failing hypothesis.
    pub rejected: Vec<String>,
    pub sample_count: usize,
    pub samples_agree: Option<bool>,
    pub warnings: Vec<String>,
}

impl InvariantCertificate {
    pub fn is_rigorous(&self) -> bool {
        self.method != InvariantMethod::Sampled && self.hypotheses.iter().all(|c| c.holds)
    }
}

/// Legendre symbol of a p-integral rational, 0 when p divides it.
fn residue_symbol(x: &Rational, p: &BigInt) -> i8 {
    if p.is_even() {
        return 0;
    }
    match reduce_mod(x, p) {
        Some(r) => jacobi(&r, p),
        None => 0,
    }
}

fn divides(p: &BigInt, x: &Rational) -> bool {
    padic_val(x, p).is_none_or(|v| v > 0)
}

struct Branch {
    method: InvariantMethod,
    value: Inv,
    checks: Vec<Check>,
}

impl Branch {
    fn new(method: InvariantMethod, value: Inv) -> Self {
        Branch { method, value, checks: Vec::new() }
    }

    fn check(mut self, name: &str, holds: bool, detail: impl Into<String>) -> Self {
        self.checks.push(Check::new(name, holds, detail));
        self
    }

    fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    fn first_failure(&self) -> String {
        let c = self.checks.iter().find(|c| !c.holds).expect("failing branch");
        format!("{}: {} fails ({})", self.method, c.name, c.detail)
    }
}

fn prop_square(surface: &Dp4Surface, place: &Place) -> Branch {
    let nonzero = [&surface.a, &surface.b, &surface.A, &surface.B, &surface.C].iter().all(|x| !x.is_zero()) && surface.A != surface.B;
    Branch::new(InvariantMethod::PropSquare, Inv::Zero)
        .check("coefficients-nonzero", nonzero, "a, b, A, B, C, B - A nonzero")
        .check("a-local-square", is_local_square(&surface.a, place), format!("a is a square in Q_{place}"))
}

/// Hypotheses shared by the three propositions that need an admissible model.
fn admissible(model: &Dp4Surface, p: &BigInt) -> Vec<Check> {
    let coeffs = [&model.a, &model.b, &model.A, &model.B, &model.C];
    let integral = coeffs.iter().all(|x| !x.is_zero() && padic_val(x, p).is_some_and(|v| v >= 0));
    let change = model.change.as_ref();
    let square = change.is_some_and(|c| c.class_factor_is_square);
    let factor = change.map_or("none".to_string(), |c| c.class_factor.to_string());
    vec![
        Check::new("model.admissible", integral && model.A != model.B, "a, b, A, B, C nonzero p-integral and A != B"),
        Check::new("model.class-factor-square", square, format!("class factor {}", abbreviate(&factor))),
    ]
}

fn with(mut b: Branch, checks: &[Check]) -> Branch {
    b.checks.extend_from_slice(checks);
    b
}

fn prop_good(model: &Dp4Surface, p: &BigInt, base: &[Check]) -> Branch {
    let two_ab = Rational::from_integer(BigInt::from(2)) * &model.a * &model.b;
    with(Branch::new(InvariantMethod::PropGood, Inv::Zero), base)
        .check("p-nmid-2ab", !divides(p, &two_ab), "p does not divide 2ab")
        .check("p-nmid-B-A", !divides(p, &(&model.B - &model.A)), "p does not divide B - A")
}

fn prop_c(model: &Dp4Surface, p: &BigInt, base: &[Check]) -> Branch {
    let two_ab = Rational::from_integer(BigInt::from(2)) * &model.a * &model.b;
    let va = padic_val(&model.A, p).unwrap_or(1);
    with(Branch::new(InvariantMethod::PropC, Inv::Zero), base)
        .check("p-nmid-2ab", !divides(p, &two_ab), "p does not divide 2ab")
        .check("p-nmid-C", !divides(p, &model.C), "p does not divide C")
        .check("a-nonsquare-mod-p", residue_symbol(&model.a, p) == -1, "a is not a square mod p")
        .check("v(A)-even", va % 2 == 0, format!("v_p(A) = {va}"))
        .check("unit(A)-nonsquare-mod-p", residue_symbol(&unit_part(&model.A, p), p) == -1, "A / p^v(A) is not a square mod p")
}

fn prop_a(model: &Dp4Surface, p: &BigInt, base: &[Check]) -> Branch {
    let two_b = Rational::from_integer(BigInt::from(2)) * &model.b;
    let e = &model.B - &model.A;
    let prod = &model.A * &model.B * &model.C * &e;
    with(Branch::new(InvariantMethod::PropA, Inv::Half), base)
        .check("p-nmid-2b", !divides(p, &two_b), "p does not divide 2b")
        .check("v(a)=1", padic_val(&model.a, p) == Some(1), "v_p(a) = 1")
        .check("p-nmid-ABC(B-A)", !divides(p, &prod), "p does not divide A B C (B - A)")
        .check("b-square-mod-p", residue_symbol(&model.b, p) == 1, "b is a square mod p")
        .check("B-A-nonsquare-mod-p", residue_symbol(&e, p) == -1, "B - A is not a square mod p")
}

fn abbreviate(s: &str) -> String {
    if s.len() > 40 {
        format!("{}...{} ({} chars)", &s[..16], &s[s.len() - 16..], s.len())
    } else {
        s.to_string()
    }
}

/// Result of walking the decision tree: the branch that fired, if any, and the rejected ones.
fn decide(surface: &Dp4Surface, place: &Place, theta: &Theta) -> (Option<Branch>, Vec<String>) {
    let mut rejected = Vec::new();
    let p = match place {
        Place::Real => {
            let b = prop_square(surface, place);
            return if b.holds() { (Some(b), rejected) } else { (None, vec![b.first_failure()]) };
        }
        Place::Finite(p) => p,
    };
    let mut order = Vec::new();
    let two = BigInt::from(2);
    if p == &two || divides(p, &surface.b) {
        order.push(prop_square(surface, place));
    }
    let (model, _) = admissible_model(surface, p, theta);
    let base = admissible(&model, p);
    if padic_val(&surface.a, p).is_some_and(|v| v > 0) {
        order.push(prop_a(&model, p, &base));
    } else {
        order.push(prop_good(&model, p, &base));
        order.push(prop_c(&model, p, &base));
        order.push(prop_square(surface, place));
    }
    for b in order {
        if b.holds() {
            return (Some(b), rejected);
        }
        rejected.push(b.first_failure());
    }
    (None, rejected)
}

/// Certified invariant at a place, or a sampled value from direct surface points when no branch applies.
pub fn certify_invariant(surface: &Dp4Surface, place: &Place, theta: &Theta) -> Result<InvariantCertificate, BrauerError> {
    let (branch, rejected) = decide(surface, place, theta);
    if let Some(b) = branch {
        return Ok(InvariantCertificate { place: place.clone(), value: b.value, method: b.method, hypotheses: b.checks, rejected, sample_count: 0, samples_agree: None, warnings: Vec::new() });
    }
    let class = QuaternionClass::of(surface);
    let points = sample_direct_points(surface, place, DEFAULT_SAMPLES, seed_for(place, surface));
    let values = points.iter().map(|p| class.evaluate(p)).collect::<Result<Vec<_>, _>>()?;
    sampled_certificate(place, rejected, outcome(&values, DEFAULT_SAMPLES))
}

fn sampled_certificate(place: &Place, rejected: Vec<String>, out: SampleOutcome) -> Result<InvariantCertificate, BrauerError> {
    let value = out.value.ok_or_else(|| BrauerError::BadPoint(format!("no local points found at {place}")))?;
    let mut warnings = vec!["no proposition applies; the value is sampled and not rigorous".to_string()];
    if out.short() {
        warnings.push(format!("only {} of {} sample points found", out.count, out.requested));
    }
    Ok(InvariantCertificate {
        place: place.clone(),
        value,
        method: InvariantMethod::Sampled,
        hypotheses: Vec::new(),
        rejected,
        sample_count: out.count,
        samples_agree: Some(out.consistent),
        warnings,
    })
}

fn seed_for(place: &Place, surface: &Dp4Surface) -> u64 {
    let text = format!("{place}|{}|{}|{}|{}", surface.a, surface.b, surface.A, surface.B);
    text.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Certified invariant at a place of a fiber, cross-checked on `samples` local points.
pub fn certify_fiber_place(fiber: &Fiber, place: &Place, cert: Option<&LocalCertificate>, samples: usize) -> Result<InvariantCertificate, BrauerError> {
    let seed = seed_for(place, &fiber.surface);
    let (branch, rejected) = decide(&fiber.surface, place, fiber.theta());
    let out = sample_invariant(fiber, place, cert, samples, seed)?;
    let Some(b) = branch else {
        return sampled_certificate(place, rejected, out);
    };
    let agree = out.consistent && out.value.is_none_or(|v| v == b.value);
    let mut warnings = Vec::new();
    if out.short() {
        warnings.push(format!("only {} of {} sample points found", out.count, out.requested));
    }
    if !agree {
        warnings.push(format!("samples disagree with the certified value {}", b.value));
    }
    Ok(InvariantCertificate { place: place.clone(), value: b.value, method: b.method, hypotheses: b.checks, rejected, sample_count: out.count, samples_agree: Some(agree), warnings })
}

/// Symbolic coverage of the places outside the critical set: prop-square at 2, b and infinity
/// (all critical), prop-good at primes prime to 2abc num(D) den(theta), and prop-c or prop-square at
/// primes dividing num(D).
#[allow(non_snake_case)]
pub fn brauer_blanket(fiber: &Fiber, set: &CriticalSet) -> BlanketRecord {
    let k = &fiber.coeffs;
    let ps = &k.params;
    let mut checks = Vec::new();
    let listed = [&ps.a, &ps.b, &ps.c].iter().all(|x| set.contains_prime(x)) && set.contains(&Place::Real) && set.contains_prime(&BigInt::from(2));
    checks.push(Check::new("set.real-2-a-b-c", listed, "Real, 2, a, b, c are critical"));
    let den = k.theta.finite().map(|t| t.denom().clone()).unwrap_or_else(BigInt::one);
    let den_ok = den.is_one() || factor_primes_listed(&den, set);
    checks.push(Check::new("set.den(theta)", den_ok, format!("prime factors of {den} are critical")));
    let two_c = Rational::from_integer(BigInt::from(2) * &ps.c);
    checks.push(Check::new("identity.B-A=2cD^2", &k.B - &k.A == two_c * &k.D * &k.D, "B - A = 2 c D^2"));
    let two_abc_den = BigInt::from(2) * &ps.a * &ps.b * &ps.c * &den;
    let n = ps.g + 1;
    for (name, r) in set.cofactors() {
        if name == "num(D)" {
            let s = match &k.theta {
                Theta::Finite(t) => Rational::from_integer(num_traits::pow(ps.a.clone(), 2 * ps.h as usize + 1)) * crate::arith::pow_rat(t, n),
                Theta::Infinity => Rational::one(),
            };
            let a = Rational::from_integer(ps.a.clone());
            let congruent = match (reduce_mod(&k.A, r), reduce_mod(&(&a * &s * &s), r)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            };
            let s_unit = reduce_mod(&s, r).is_some_and(|x| inv_mod(&x, r).is_some());
            checks.push(Check::new(
                format!("cofactor.{name}.A=a*s^2"),
                congruent && s_unit && r.gcd(&two_abc_den).is_one(),
                format!("{} digits: A = a s^2 mod R with s = a^(2h+1) theta^(g+1) a unit, R prime to 2abc den(theta)", r.to_string().len()),
            ));
        } else {
            let ok = r.gcd(&(&two_abc_den * k.D.numer())).is_one();
            checks.push(Check::new(format!("cofactor.{name}.prop-good"), ok, format!("{} digits: prime to 2abc num(D) den(theta)", r.to_string().len())));
        }
    }
    let statement = "At primes outside the critical set the model is admissible since p does not divide den(theta). \
        If p does not divide B - A = 2cD^2 the invariant vanishes by prop-good. If p divides num(D) then A = a s^2 mod p \
        with s a unit: either a is a square mod p and prop-square applies, or a is not, so p does not divide C \
        and prop-c applies with v_p(A) = 0. The real place and 2 are critical.";
    BlanketRecord::new(statement, checks)
}

fn factor_primes_listed(n: &BigInt, set: &CriticalSet) -> bool {
    let f = crate::arith::factor(n, crate::local::DEFAULT_RHO_BUDGET);
    f.is_complete() && f.prime_list().iter().all(|p| set.contains_prime(p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub fiber: FiberDescriptor,
    pub table: Vec<InvariantCertificate>,
    pub blanket: BlanketRecord,
    pub sum: Inv,
    pub locally_solvable: bool,
    pub conclusion: bool,
    pub rigorous: bool,
    pub pullback: String,
    pub notes: Vec<String>,
    pub failure: Option<String>,
}

impl ObstructionCertificate {
    pub fn value_at(&self, place: &Place) -> Option<Inv> {
        self.table.iter().find(|c| &c.place == place).map(|c| c.value)
    }
}

const PULLBACK: &str = "The sum of local invariants is 1/2 at every adelic point, so the surface S has no rational point. \
    The map delta sends a rational point of the curve X to a rational point of S, and Y lies inside S, so X and Y have no rational points either.";

const GENUS_ONE_NOTE: &str = "For genus 1 the curve X is a torsor under its Jacobian E, locally trivial everywhere and without rational points, \
    so it defines a nonzero element of Sha(E); the element is annihilated by 2 since X has points over a quadratic field.";

/// Invariant table over the critical set with sampling cross-checks, the blanket record and the conclusion.
pub fn obstruction_certificate(fiber: &Fiber, local: &LocalReport, samples: usize) -> Result<ObstructionCertificate, BrauerError> {
    if samples == 0 {
        return Err(BrauerError::NoSamples);
    }
    let places = &local.critical.places;
    let table = places
        .par_iter()
        .map(|place| {
            let cert = local.certificates.iter().find(|c| &c.place == place);
            certify_fiber_place(fiber, place, cert, samples)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let blanket = brauer_blanket(fiber, &local.critical);
    let sum: Inv = table.iter().map(|c| c.value).sum();
    let mut failure = None;
    if let Some(c) = table.iter().find(|c| c.samples_agree == Some(false)) {
        failure = Some(format!("sampled invariants disagree at {}", c.place));
    } else if sum == Inv::Zero {
        failure = Some("the invariants sum to 0".to_string());
    } else if !blanket.holds {
        failure = Some("the blanket record does not hold".to_string());
    }
    let rigorous = table.iter().all(|c| c.is_rigorous()) && blanket.holds && local.blanket.holds;
    let conclusion = local.solvable_everywhere && sum != Inv::Zero && failure.is_none();
    let mut notes = Vec::new();
    if fiber.params().g == 1 && conclusion {
        notes.push(GENUS_ONE_NOTE.to_string());
    }
    if !rigorous {
        notes.push("some entries are sampled rather than certified".to_string());
    }
    Ok(ObstructionCertificate {
        fiber: fiber.descriptor(),
        table,
        blanket,
        sum,
        locally_solvable: local.solvable_everywhere,
        conclusion,
        rigorous,
        pullback: if conclusion { PULLBACK.to_string() } else { String::new() },
        notes,
        failure,
    })
}

#[cfg(test)]
mod tests;
