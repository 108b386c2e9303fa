//! Local solvability of the fiber curves at every place of Q.

mod certify;
mod critical;
mod points;
mod qp;
mod real;

pub use certify::{certify_all_local, certify_local_curve, spot_check_primes, LocalReport, SpotCheck};
pub use critical::{blanket_record, critical_places, critical_places_with, BlanketRecord, CriticalSet, FactoredPrime, FactoredValue, PlaceReason, DEFAULT_RHO_BUDGET};
pub use points::{curve_image, sample_curve_points, sample_direct_points, sample_surface_points, sampling_precision, surface_local_point, LocalSurfacePoint, PointSource, SAMPLER_BUDGET};
pub use qp::{decide_qp_points, decide_qp_poly, default_depth_bound, QpDecision};
pub use real::{decide_real_points, decide_real_poly};

use crate::arith::{hensel_sqrt, is_local_square, padic_val, reduce_mod, unit_part, ArithError, Chart, Place, Polynomial, Rational};
use crate::arith::padic::pow_p;
use crate::family::{CurveChange, HyperellipticCurve};
use crate::json::{dec, rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("the generic decider does not run at p = 2")]
    TwoAdic,
    #[error("{0}")]
    Unavailable(String),
}

/// One named hypothesis together with its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), holds, detail: detail.into() }
    }
}

/// How a witness becomes a point over Q_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lift {
    /// The coordinates satisfy the chart equation exactly.
    Exact,
    /// t is fixed and s is lifted: v(s^2 - g(t)) >= k > 2 v(2s).
    S,
    /// s = 0 and t is lifted: v(h(t)) >= k > 2 v(h'(t)), h the normalized model polynomial.
    T,
}

/// A point modulo p^k on a chart of a model of the curve, with enough precision to lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicWitness {
    #[serde(with = "dec")]
    pub prime: BigInt,
    pub chart: Chart,
    pub lift: Lift,
    /// s and t modulo p^precision as decimal strings.
    pub coords: Vec<String>,
    #[serde(with = "dec")]
    pub precision: u32,
    /// Twice the valuation of the slope; the precision strictly exceeds it.
    #[serde(with = "dec")]
    pub margin: i64,
    #[serde(with = "rational")]
    pub s: Rational,
    #[serde(with = "rational")]
    pub t: Rational,
    pub model: CurveChange,
}

/// A real point: the chart polynomial is nonnegative at the exact rational t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealWitness {
    pub chart: Chart,
    #[serde(with = "rational")]
    pub t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Padic(PadicWitness),
    Real(RealWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    TrivialPoint,
    AbSquare,
    GoodReductionHw,
    PowerRoot,
    FpSmoothLift,
    CaseAnalysis(String),
    GenericSearch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::TrivialPoint => write!(f, "trivial-point"),
            Method::AbSquare => write!(f, "ab-square"),
            Method::GoodReductionHw => write!(f, "good-reduction-hw"),
            Method::PowerRoot => write!(f, "g+1-power"),
            Method::FpSmoothLift => write!(f, "fp-smooth-lift"),
            Method::CaseAnalysis(id) => write!(f, "case-analysis({id})"),
            Method::GenericSearch => write!(f, "generic-search"),
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "trivial-point" => Method::TrivialPoint,
            "ab-square" => Method::AbSquare,
            "good-reduction-hw" => Method::GoodReductionHw,
            "g+1-power" => Method::PowerRoot,
            "fp-smooth-lift" => Method::FpSmoothLift,
            "generic-search" => Method::GenericSearch,
            _ => match s.strip_prefix("case-analysis(").and_then(|r| r.strip_suffix(')')) {
                Some(id) => Method::CaseAnalysis(id.to_string()),
                None => return Err(format!("unknown method {s}")),
            },
        })
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Solvable,
    NotSolvable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCertificate {
    pub place: Place,
    pub solvable: bool,
    pub verdict: Verdict,
    pub method: Option<Method>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl LocalCertificate {
    pub(crate) fn solved(place: Place, method: Method, witness: Witness) -> Self {
        LocalCertificate { place, solvable: true, verdict: Verdict::Solvable, method: Some(method), witness: Some(witness), notes: Vec::new() }
    }

    pub(crate) fn open(place: Place, verdict: Verdict, method: Option<Method>, notes: Vec<String>) -> Self {
        LocalCertificate { place, solvable: verdict == Verdict::Solvable, verdict, method, witness: None, notes }
    }

    /// Re-verifies the witness against the curve; certificates without witness pass only when not solvable
    /// or when a note explains the point.
    pub fn verify(&self, curve: &HyperellipticCurve) -> Result<(), String> {
        match (&self.witness, &self.place) {
            (Some(Witness::Padic(w)), Place::Finite(p)) if &w.prime == p => verify_witness(curve, w),
            (Some(Witness::Real(w)), Place::Real) => verify_real_witness(curve, w),
            (None, _) if !self.solvable || !self.notes.is_empty() => Ok(()),
            _ => Err(format!("witness does not match place {}", self.place)),
        }
    }
}

/// p^e g with e even and content valuation 0 or 1; the exponent e is returned.
pub(crate) fn normalize(g: &Polynomial, p: &BigInt) -> (Polynomial, i64) {
    let c = g.content_val(p).unwrap_or(0);
    let e = -2 * Integer::div_floor(&c, &2);
    (g.scale(&pow_p(p, e)), e)
}

fn two_val(p: &BigInt) -> i64 {
    if p == &BigInt::from(2) {
        1
    } else {
        0
    }
}

fn residue_string(x: &Rational, m: &BigInt) -> String {
    match reduce_mod(x, m) {
        Some(r) => r.to_string(),
        None => x.to_string(),
    }
}

fn finish(p: &BigInt, chart: Chart, lift: Lift, s: Rational, t: Rational, precision: u32, margin: i64, model: &CurveChange) -> PadicWitness {
    let m = num_traits::pow(p.clone(), precision as usize);
    let coords = vec![residue_string(&s, &m), residue_string(&t, &m)];
    PadicWitness { prime: p.clone(), chart, lift, coords, precision, margin, s, t, model: model.clone() }
}

/// Witness over the point of the model chart above t when g(t) is zero or a nonzero square in Q_p.
pub(crate) fn s_lift(g: &Polynomial, p: &BigInt, chart: Chart, t: &Rational, model: &CurveChange) -> Option<PadicWitness> {
    let c = g.eval(t);
    if c.is_zero() {
        return Some(finish(p, chart, Lift::Exact, Rational::zero(), t.clone(), 3, 0, model));
    }
    if !is_local_square(&c, &Place::Finite(p.clone())) {
        return None;
    }
    let v = padic_val(&c, p)?;
    let margin = v + 2 * two_val(p);
    let k = (margin + 2).max(3);
    let r = hensel_sqrt(&unit_part(&c, p), p, (k - v) as u32).ok()??;
    let s = pow_p(p, v / 2) * Rational::from_integer(r);
    let w = finish(p, chart, Lift::S, s, t.clone(), k as u32, margin, model);
    verify_on(g, &w).ok().map(|_| w)
}

/// Witness at a root of the model polynomial near the p-integral t0, refined by Newton steps.
pub(crate) fn t_lift(g: &Polynomial, p: &BigInt, chart: Chart, t0: &Rational, model: &CurveChange) -> Option<PadicWitness> {
    if padic_val(t0, p).is_some_and(|v| v < 0) {
        return None;
    }
    let (h, _) = normalize(g, p);
    let dh = h.derivative();
    let mut t = t0.clone();
    let mu = padic_val(&dh.eval(&t), p)?;
    let k = (2 * mu + 2).max(3);
    let modulus = num_traits::pow(p.clone(), (k + mu + 1) as usize);
    for _ in 0..200 {
        let hv = h.eval(&t);
        let Some(vh) = padic_val(&hv, p) else {
            return Some(finish(p, chart, Lift::Exact, Rational::zero(), t, 3, 0, model));
        };
        if vh <= 2 * mu {
            return None;
        }
        if vh >= k {
            let w = finish(p, chart, Lift::T, Rational::zero(), t, k as u32, 2 * mu, model);
            return verify_on(g, &w).ok().map(|_| w);
        }
        let delta = hv / dh.eval(&t);
        t = Rational::from_integer(reduce_mod(&(&t - delta), &modulus)?);
    }
    None
}

/// Checks a witness against the model polynomial of its chart.
pub fn verify_on(g: &Polynomial, w: &PadicWitness) -> Result<(), String> {
    let p = &w.prime;
    let k = w.precision as i64;
    match w.lift {
        Lift::Exact => {
            if &w.s * &w.s == g.eval(&w.t) {
                Ok(())
            } else {
                Err("exact point is not on the chart".into())
            }
        }
        Lift::S => {
            if w.s.is_zero() {
                return Err("s-lift needs s != 0".into());
            }
            let margin = 2 * (padic_val(&w.s, p).unwrap() + two_val(p));
            if margin != w.margin || k <= margin {
                return Err(format!("precision {k} does not exceed margin {margin}"));
            }
            let r = &w.s * &w.s - g.eval(&w.t);
            match padic_val(&r, p) {
                Some(v) if v < k => Err(format!("residual valuation {v} below {k}")),
                _ => Ok(()),
            }
        }
        Lift::T => {
            if !w.s.is_zero() || padic_val(&w.t, p).is_some_and(|v| v < 0) {
                return Err("t-lift needs s = 0 and t integral".into());
            }
            let (h, _) = normalize(g, p);
            if h.coeffs().iter().any(|c| padic_val(c, p).is_some_and(|v| v < 0)) {
                return Err("normalized polynomial is not integral".into());
            }
            let d = h.derivative().eval(&w.t);
            let margin = 2 * padic_val(&d, p).ok_or("double root")?;
            if margin != w.margin || k <= margin {
                return Err(format!("precision {k} does not exceed margin {margin}"));
            }
            match padic_val(&h.eval(&w.t), p) {
                Some(v) if v < k => Err(format!("value valuation {v} below {k}")),
                _ => Ok(()),
            }
        }
    }
}

/// Checks a p-adic witness against the model of the curve it refers to.
pub fn verify_witness(curve: &HyperellipticCurve, w: &PadicWitness) -> Result<(), String> {
    verify_on(&w.model.transform(curve, w.chart), w)
}

pub fn verify_real_witness(curve: &HyperellipticCurve, w: &RealWitness) -> Result<(), String> {
    if curve.poly(w.chart).eval(&w.t).is_negative() {
        Err("chart polynomial is negative at the witness".into())
    } else {
        Ok(())
    }
}

/// Original coordinates (chart, s, t) of a p-adic witness, valid up to the lifting step.
pub fn witness_original(curve: &HyperellipticCurve, w: &PadicWitness) -> (Chart, Rational, Rational) {
    let (s, t) = w.model.pull_back(w.chart, curve.n(), &w.s, &w.t);
    (w.chart, s, t)
}
