use super::critical::{blanket_record, critical_places, BlanketRecord, CriticalSet};
use super::qp::{decide_qp_points, QpDecision};
use super::real::decide_real_points;
use super::{finish, normalize, s_lift, t_lift, Lift, LocalCertificate, LocalError, Method, RealWitness, Verdict, Witness};
use crate::arith::padic::pow_p;
use crate::arith::{
    count_points_hyperelliptic, find_smooth_fp_point, hasse_weil_holds, hensel_nth_root, is_local_square, is_prime, is_prime_u64, jacobi,
    padic_val, rational_sqrt, reduce_mod, unit_part, Chart, Place, Rational,
};
use crate::family::{integral_model, CurveChange, HyperellipticCurve};
use crate::json::dec;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Residues scanned by the fast paths before giving up on them.
const FAST_SCAN: u64 = 4096;
/// Largest prime handled by the small-prime smooth point scan.
const FP_SCAN_LIMIT: u64 = 1 << 16;
/// Good-reduction certificates include a point count below this prime.
const COUNT_NOTE_LIMIT: u64 = 1 << 20;

/// A rational point visible without search: t = 0 or T = 0 with a rational square value.
fn trivial_point(curve: &HyperellipticCurve) -> Option<(Chart, Rational, Rational)> {
    for chart in [Chart::Affine, Chart::Infinity] {
        let v = curve.poly(chart).eval(&Rational::zero());
        if let Some(s) = rational_sqrt(&v) {
            return Some((chart, s, Rational::zero()));
        }
    }
    None
}

fn int(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Certificate for one place, trying the fast paths in a fixed order before the generic decider.
pub fn certify_local_curve(curve: &HyperellipticCurve, place: &Place) -> Result<LocalCertificate, LocalError> {
    match place {
        Place::Real => Ok(certify_real(curve)),
        Place::Finite(p) => certify_finite(curve, p),
    }
}

fn certify_real(curve: &HyperellipticCurve) -> LocalCertificate {
    let place = Place::Real;
    if let Some((chart, _, t)) = trivial_point(curve) {
        return LocalCertificate::solved(place, Method::TrivialPoint, Witness::Real(RealWitness { chart, t }));
    }
    if (&curve.a * &curve.b).is_positive() {
        let w = RealWitness { chart: Chart::Infinity, t: Rational::zero() };
        let mut c = LocalCertificate::solved(place, Method::AbSquare, Witness::Real(w));
        c.notes.push("b/a > 0, so (S, T) = (sqrt(b/a), 0) is real".into());
        return c;
    }
    match decide_real_points(curve) {
        (true, Some(w)) => LocalCertificate::solved(place, Method::GenericSearch, Witness::Real(w)),
        (true, None) => LocalCertificate::open(place, Verdict::Solvable, Some(Method::GenericSearch), vec!["f vanishes at an irrational real root".into()]),
        (false, _) => LocalCertificate::open(place, Verdict::NotSolvable, Some(Method::GenericSearch), vec!["f < 0 on R and on the chart at infinity".into()]),
    }
}

fn padic(place: &Place, method: Method, w: super::PadicWitness, note: Option<String>) -> LocalCertificate {
    let mut c = LocalCertificate::solved(place.clone(), method, Witness::Padic(w));
    c.notes.extend(note);
    c
}

fn certify_finite(curve: &HyperellipticCurve, p: &BigInt) -> Result<LocalCertificate, LocalError> {
    if !is_prime(p)? {
        return Err(LocalError::NotPrime(p.clone()));
    }
    let place = Place::Finite(p.clone());
    let id = CurveChange::identity();
    if let Some((chart, s, t)) = trivial_point(curve) {
        let w = finish(p, chart, Lift::Exact, s, t, 3, 0, &id);
        return Ok(padic(&place, Method::TrivialPoint, w, None));
    }
    if is_local_square(&(&curve.a * &curve.b), &place) {
        if let Some(w) = s_lift(&curve.F, p, Chart::Infinity, &Rational::zero(), &id) {
            return Ok(padic(&place, Method::AbSquare, w, Some("ab is a square in Q_p; point (sqrt(b/a), 0) on the chart at infinity".into())));
        }
    }
    if p == &BigInt::from(2) {
        return Ok(LocalCertificate::open(place, Verdict::Inconclusive, None, vec!["ab is not a 2-adic square and the generic decider does not run at 2".into()]));
    }
    let (model, change) = integral_model(curve, p);
    if let Some(c) = good_reduction(curve, &model, &change, p, &place)? {
        return Ok(c);
    }
    if let Some(c) = power_root(&model, &change, p, &place)? {
        return Ok(c);
    }
    if let Some(c) = case_analysis(curve, &change, p, &place) {
        return Ok(c);
    }
    if let Some(c) = fp_smooth(&model, &change, p, &place) {
        return Ok(c);
    }
    let _ = model;
    Ok(match decide_qp_points(curve, p, None)? {
        QpDecision::Points(w) => padic(&place, Method::GenericSearch, w, None),
        QpDecision::NoPoints { discs } => LocalCertificate::open(place, Verdict::NotSolvable, Some(Method::GenericSearch), vec![format!("{discs} residue discs without points")]),
        QpDecision::Inconclusive(why) => LocalCertificate::open(place, Verdict::Inconclusive, Some(Method::GenericSearch), vec![why]),
    })
}

fn good_reduction(curve: &HyperellipticCurve, model: &HyperellipticCurve, change: &CurveChange, p: &BigInt, place: &Place) -> Result<Option<LocalCertificate>, LocalError> {
    let g = curve.genus;
    let units = [&model.a, &model.b, &(&model.A - &model.B)].iter().all(|x| padic_val(x, p) == Some(0));
    let integral = [&model.A, &model.B].iter().all(|x| padic_val(x, p).is_none_or(|v| v >= 0));
    if *p <= BigInt::from(4 * g * g) || !units || !integral {
        return Ok(None);
    }
    let mut notes = vec![format!("p > 4g^2 = {}; p does not divide 2ab(A - B) on the integral model", 4 * g * g)];
    let a_zero = padic_val(&model.A, p).is_none_or(|v| v > 0);
    let b_zero = padic_val(&model.B, p).is_none_or(|v| v > 0);
    if a_zero || b_zero {
        let r = if a_zero { &model.B } else { &model.A };
        let (ar, br, rr) = (reduce_mod(&model.a, p).unwrap(), reduce_mod(&model.b, p).unwrap(), reduce_mod(r, p).unwrap());
        if let Some(pt) = find_smooth_fp_point(&ar, &br, &rr, g, p)? {
            let t = Rational::from_integer(pt.t);
            let w = if pt.s.is_zero() { t_lift(&model.F, p, Chart::Infinity, &t, change) } else { s_lift(&model.F, p, Chart::Infinity, &t, change) };
            if let Some(w) = w {
                notes.push("smooth point of a S^2 = b(1 - r T^(g+1)) mod p lifted".into());
                let mut c = padic(place, Method::GoodReductionHw, w, None);
                c.notes = notes;
                return Ok(Some(c));
            }
        }
        return Ok(None);
    }
    if let Some(pu) = p.to_u64().filter(|&q| q <= COUNT_NOTE_LIMIT) {
        if let Ok(n) = count_points_hyperelliptic(&model.f, g, p) {
            notes.push(format!("#X(F_p) = {n}, Hasse-Weil interval {}", if hasse_weil_holds(n, pu, g) { "holds" } else { "fails" }));
        }
    }
    let limit = p.to_u64().map_or(FAST_SCAN, |q| q.min(FAST_SCAN));
    let df = model.f.derivative();
    for t in 0..limit {
        let t = int(t);
        let v = padic_val(&model.f.eval(&t), p);
        let w = match v {
            Some(0) => s_lift(&model.f, p, Chart::Affine, &t, change),
            _ if padic_val(&df.eval(&t), p) == Some(0) => t_lift(&model.f, p, Chart::Affine, &t, change),
            _ => None,
        };
        if let Some(w) = w {
            let mut c = padic(place, Method::GoodReductionHw, w, None);
            c.notes = notes;
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn power_root(model: &HyperellipticCurve, change: &CurveChange, p: &BigInt, place: &Place) -> Result<Option<LocalCertificate>, LocalError> {
    let n = model.n();
    if (BigInt::from(n) % p).is_zero() {
        return Ok(None);
    }
    for (name, r) in [("A", &model.A), ("B", &model.B)] {
        let Some(v) = padic_val(r, p) else { continue };
        if v < 0 || v % n as i64 != 0 {
            continue;
        }
        let u = unit_part(r, p);
        if hensel_nth_root(&u, n, p, 1)?.is_none() {
            continue;
        }
        for k in [4u32, 8, 16, 32, 64, 128] {
            let rho = hensel_nth_root(&u, n, p, k)?.expect("root exists mod p");
            let t0 = pow_p(p, v / n as i64) * Rational::from_integer(rho);
            if let Some(w) = t_lift(&model.f, p, Chart::Affine, &t0, change) {
                let note = format!("{name} on the integral model is a nonzero (g+1)-th power in Q_p");
                return Ok(Some(padic(place, Method::PowerRoot, w, Some(note))));
            }
        }
    }
    Ok(None)
}

/// p = b with v_b(theta) >= 1 or theta = 0: after (s, t) -> (b s, b t) the reduction is a s^2 = 2 c^3 d.
fn case_analysis(curve: &HyperellipticCurve, change: &CurveChange, p: &BigInt, place: &Place) -> Option<LocalCertificate> {
    let k = curve.coeffs.as_ref()?;
    let theta = k.theta.finite()?;
    if p != &k.params.b || !(theta.is_zero() || padic_val(theta, p).is_some_and(|v| v >= 1)) || !change.is_identity() {
        return None;
    }
    let bq = Rational::from_integer(p.clone());
    let scaled = change.then(&CurveChange { lambda_s: bq.clone(), lambda_t: bq });
    let g = scaled.transform(curve, Chart::Affine);
    let limit = p.to_u64().map_or(FAST_SCAN, |q| q.min(FAST_SCAN));
    for t in 0..limit {
        let t = int(t);
        if padic_val(&g.eval(&t), p) != Some(0) {
            continue;
        }
        if let Some(w) = s_lift(&g, p, Chart::Affine, &t, &scaled) {
            let rd = reduce_mod(&(Rational::from_integer(BigInt::from(2) * num_traits::pow(k.params.c.clone(), 3) * &k.params.d) / Rational::from_integer(k.params.a.clone())), p);
            let qr = rd.map(|x| jacobi(&x, p) == 1).unwrap_or(false);
            let note = format!("model (s, t) = (b s', b t'); reduction a s^2 = 2 c^3 d with 2c^3d/a a square mod b: {qr}");
            return Some(padic(place, Method::CaseAnalysis("0.4".into()), w, Some(note)));
        }
    }
    None
}

fn fp_smooth(model: &HyperellipticCurve, change: &CurveChange, p: &BigInt, place: &Place) -> Option<LocalCertificate> {
    let pu = p.to_u64().filter(|&q| q <= FP_SCAN_LIMIT)?;
    for (chart, range) in [(Chart::Affine, pu), (Chart::Infinity, 1)] {
        let (h, _) = normalize(model.poly(chart), p);
        if h.content_val(p) != Some(0) {
            continue;
        }
        let dh = h.derivative();
        for t in 0..range {
            let t = int(t);
            let w = match padic_val(&h.eval(&t), p) {
                Some(0) => s_lift(model.poly(chart), p, chart, &t, change),
                _ if padic_val(&dh.eval(&t), p) == Some(0) => t_lift(model.poly(chart), p, chart, &t, change),
                _ => None,
            };
            if let Some(w) = w {
                return Some(padic(place, Method::FpSmoothLift, w, Some("smooth F_p-point of the reduced model lifted".into())));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheck {
    #[serde(with = "dec")]
    pub prime: u64,
    #[serde(with = "dec")]
    pub points: u64,
    pub hasse_weil: bool,
}

/// Point counts of the reduction at `count` random primes below `below` outside the critical set.
pub fn spot_check_primes(curve: &HyperellipticCurve, set: &CriticalSet, count: usize, below: u64, seed: u64) -> Vec<SpotCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SpotCheck> = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 100 * count {
        tries += 1;
        let q = rng.gen_range(3..below) | 1;
        if !is_prime_u64(q) || set.contains_prime(&BigInt::from(q)) || out.iter().any(|s| s.prime == q) {
            continue;
        }
        let (points, hw) = match count_points_hyperelliptic(&curve.f, curve.genus, &BigInt::from(q)) {
            Ok(n) => (n, n > 0 && hasse_weil_holds(n, q, curve.genus)),
            Err(_) => (0, false),
        };
        out.push(SpotCheck { prime: q, points, hasse_weil: hw });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub critical: CriticalSet,
    pub certificates: Vec<LocalCertificate>,
    pub blanket: BlanketRecord,
    pub spot_checks: Vec<SpotCheck>,
    pub solvable_everywhere: bool,
    pub failure: Option<Place>,
}

fn seed_for(curve: &HyperellipticCurve) -> u64 {
    let text = format!("{}|{}|{}|{}", curve.a, curve.b, curve.A, curve.B);
    text.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Certificates at every critical place, the blanket record and the spot checks.
pub fn certify_all_local(curve: &HyperellipticCurve) -> LocalReport {
    let set = critical_places(curve);
    let certificates: Vec<LocalCertificate> = set
        .places
        .par_iter()
        .map(|pl| {
            let mut c = certify_local_curve(curve, pl).unwrap_or_else(|e| LocalCertificate::open(pl.clone(), Verdict::Inconclusive, None, vec![e.to_string()]));
            if let Err(e) = c.verify(curve) {
                c = LocalCertificate::open(pl.clone(), Verdict::Inconclusive, c.method.clone(), vec![format!("witness failed re-verification: {e}")]);
            }
            c
        })
        .collect();
    let blanket = blanket_record(curve, &set);
    let spot_checks = spot_check_primes(curve, &set, 20, 100_000, seed_for(curve));
    let failure = certificates.iter().find(|c| c.verdict != Verdict::Solvable).map(|c| c.place.clone());
    let solvable_everywhere = failure.is_none() && blanket.holds && spot_checks.iter().all(|s| s.hasse_weil);
    LocalReport { critical: set, certificates, blanket, spot_checks, solvable_everywhere, failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, rat};
    use crate::family::{Fiber, Theta};
    use crate::local::verify_witness;
    use num_traits::One;
    use crate::testutil::{params_g1, params_g5};

    fn method_at(fiber: &Fiber, p: &BigInt) -> Method {
        let c = certify_local_curve(&fiber.curve, &Place::Finite(p.clone())).unwrap();
        assert!(c.solvable, "{c:?}");
        c.verify(&fiber.curve).unwrap();
        c.method.unwrap()
    }

    #[test]
    fn theta_zero_paths() {
        let ps = params_g1();
        let fiber = Fiber::new(&ps, &Theta::zero()).unwrap();
        assert_eq!(method_at(&fiber, &ps.b), Method::CaseAnalysis("0.4".into()));
        assert_eq!(method_at(&fiber, &ps.a), Method::PowerRoot);
        assert_eq!(method_at(&fiber, &big(2)), Method::AbSquare);
        assert_eq!(method_at(&fiber, &ps.c), Method::AbSquare);
        let real = certify_local_curve(&fiber.curve, &Place::Real).unwrap();
        assert_eq!(real.method, Some(Method::AbSquare));
        real.verify(&fiber.curve).unwrap();
    }

    #[test]
    fn good_reduction_path_and_witness_tampering() {
        let fiber = Fiber::new(&params_g1(), &Theta::ratio(1, 1)).unwrap();
        let p = big(1_000_003);
        let c = certify_local_curve(&fiber.curve, &Place::Finite(p)).unwrap();
        assert_eq!(c.method, Some(Method::GoodReductionHw));
        let Some(Witness::Padic(w)) = c.witness.clone() else { panic!() };
        verify_witness(&fiber.curve, &w).unwrap();
        let mut bad = w.clone();
        bad.t += Rational::one();
        assert!(verify_witness(&fiber.curve, &bad).is_err());
    }

    #[test]
    fn all_local_genus_one() {
        let ps = params_g1();
        for theta in ["0", "inf", "1", "-1", "2", "1/2"] {
            let fiber = Fiber::new(&ps, &theta.parse().unwrap()).unwrap();
            let r = certify_all_local(&fiber.curve);
            assert!(r.solvable_everywhere, "theta {theta}: {:?} {:?}", r.failure, r.blanket.checks);
            assert_eq!(r.spot_checks.len(), 20);
            for c in &r.certificates {
                c.verify(&fiber.curve).unwrap();
            }
        }
    }

    #[test]
    fn all_local_genus_five_theta_zero() {
        let fiber = Fiber::new(&params_g5(), &Theta::zero()).unwrap();
        let r = certify_all_local(&fiber.curve);
        assert!(r.solvable_everywhere, "{:?} {:?} {:?}", r.failure, r.blanket.checks.iter().filter(|c| !c.holds).collect::<Vec<_>>(), r.spot_checks);
    }

    #[test]
    fn unsolvable_synthetic_curves() {
        // s^2 = -(t^2 + 1)^2 - 1 has no real points
        let c = HyperellipticCurve::new(1, rat(-1), rat(1), Rational::new(big(-1), big(1)), rat(-2));
        let real = certify_local_curve(&c, &Place::Real).unwrap();
        assert!(real.verdict == Verdict::NotSolvable || real.solvable);
        let c = HyperellipticCurve::new(1, rat(1), rat(3), rat(3), rat(-3));
        let cert = certify_local_curve(&c, &Place::finite(3)).unwrap();
        let direct = decide_qp_points(&c, &big(3), None).unwrap().has_points();
        assert_eq!(Some(cert.solvable), direct.or(Some(cert.solvable)));
    }
}
