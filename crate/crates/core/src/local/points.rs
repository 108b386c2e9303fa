//! Local points on the fiber surface.
//!
//! A point is stored through u, v and the squares x^2, y^2, z^2, all exact rationals. It lies on
//! the surface over Q_v when both quadrics vanish and each stored square is zero or a square in
//! Q_v, so no precision bookkeeping is needed.

use super::{normalize, witness_original, Lift, LocalCertificate, PadicWitness, Witness};
use crate::arith::padic::pow_p;
use crate::arith::{is_local_square, padic_val, pow_rat, roots_mod_p, Chart, Place, Polynomial, Rational};
use crate::family::{integral_model, Dp4Surface, HyperellipticCurve};
use crate::json::rational;
use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Trials spent by each sampler before it gives up.
pub const SAMPLER_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSource {
    /// Image of the witness of a local certificate.
    Witness,
    /// Image of a sampled curve point.
    Curve,
    /// Drawn directly on the surface.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSurfacePoint {
    pub place: Place,
    #[serde(with = "rational")]
    pub x2: Rational,
    #[serde(with = "rational")]
    pub y2: Rational,
    #[serde(with = "rational")]
    pub z2: Rational,
    #[serde(with = "rational")]
    pub u: Rational,
    #[serde(with = "rational")]
    pub v: Rational,
    pub source: PointSource,
}

fn square_or_zero(x: &Rational, place: &Place) -> bool {
    x.is_zero() || is_local_square(x, place)
}

impl LocalSurfacePoint {
    /// Both quadrics vanish exactly and x^2, y^2, z^2 are squares in the completion.
    pub fn verify(&self, surface: &Dp4Surface) -> Result<(), String> {
        if self.u.is_zero() && self.v.is_zero() {
            return Err("u = v = 0".into());
        }
        let (q1, q2) = surface.quadrics_squared(&self.x2, &self.y2, &self.z2, &self.u, &self.v);
        if !q1.is_zero() || !q2.is_zero() {
            return Err("quadrics do not vanish".into());
        }
        for (name, x) in [("x^2", &self.x2), ("y^2", &self.y2), ("z^2", &self.z2)] {
            if !square_or_zero(x, &self.place) {
                return Err(format!("{name} is not a square at {}", self.place));
            }
        }
        Ok(())
    }

    /// Representative with v = 1, or u = 1 when v = 0.
    fn key(&self) -> [Rational; 4] {
        let w = if self.v.is_zero() { &self.u } else { &self.v };
        let w2 = w * w;
        [&self.u / w, &self.x2 / &w2, &self.y2 / &w2, &self.z2 / &w2]
    }
}

/// Image of the curve point over t when the chart polynomial at t is zero or a local square.
pub fn curve_image(curve: &HyperellipticCurve, surface: &Dp4Surface, place: &Place, chart: Chart, t: &Rational, source: PointSource) -> Option<LocalSurfacePoint> {
    let z2 = curve.poly(chart).eval(t);
    if !square_or_zero(&z2, place) {
        return None;
    }
    let tn = pow_rat(t, curve.n());
    let c2 = &surface.C * &surface.C;
    let (u, v) = match chart {
        Chart::Affine => (tn.clone(), Rational::one()),
        Chart::Infinity => (Rational::one(), tn.clone()),
    };
    Some(LocalSurfacePoint { place: place.clone(), x2: Rational::zero(), y2: c2 * tn, z2, u, v, source })
}

/// The surface point carried by a solvable curve certificate.
///
/// A t-lift witness approximates a root of t^n - R with R one of A, B; its image is
/// (0 : C sqrt(R) : 0 : R : 1), which is exact.
pub fn surface_local_point(surface: &Dp4Surface, curve: &HyperellipticCurve, cert: &LocalCertificate) -> Option<LocalSurfacePoint> {
    let place = cert.place.clone();
    let point = match cert.witness.as_ref()? {
        Witness::Real(w) => curve_image(curve, surface, &place, w.chart, &w.t, PointSource::Witness)?,
        Witness::Padic(w) => {
            let (chart, _, t) = witness_original(curve, w);
            if w.lift == Lift::T {
                let p = &w.prime;
                let x = match chart {
                    Chart::Affine => pow_rat(&t, curve.n()),
                    Chart::Infinity if !t.is_zero() => Rational::one() / pow_rat(&t, curve.n()),
                    Chart::Infinity => return None,
                };
                let close = |r: &Rational| padic_val(&(&x - r), p).unwrap_or(i64::MAX);
                let r = if close(&curve.A) >= close(&curve.B) { surface.A.clone() } else { surface.B.clone() };
                let y2 = &surface.C * &surface.C * &r;
                LocalSurfacePoint { place, x2: Rational::zero(), y2, z2: Rational::zero(), u: r, v: Rational::one(), source: PointSource::Witness }
            } else {
                curve_image(curve, surface, &place, chart, &t, PointSource::Witness)?
            }
        }
    };
    point.verify(surface).ok().map(|_| point)
}

fn rand_below(rng: &mut ChaCha8Rng, m: &BigInt) -> BigInt {
    rng.gen_bigint_range(&BigInt::zero(), m)
}

/// Working precision of the samplers at p.
pub fn sampling_precision(surface: &Dp4Surface, p: &BigInt) -> u32 {
    let va = padic_val(&surface.a, p).unwrap_or(0).max(0) as u32;
    (2 * va + 4).max(6)
}

/// Roots modulo p of the primitive part of a model polynomial.
fn residue_seeds(g: &Polynomial, p: &BigInt) -> Vec<BigInt> {
    let (h, _) = normalize(g, p);
    let c = h.content_val(p).unwrap_or(0);
    match h.scale(&pow_p(p, -c)).residues(p) {
        Some(res) => roots_mod_p(&res, p),
        None => Vec::new(),
    }
}

/// Curve points near the roots of the model polynomials, near the hint and at random residues, pushed to the surface.
pub fn sample_curve_points(curve: &HyperellipticCurve, surface: &Dp4Surface, place: &Place, hint: Option<&PadicWitness>, wanted: usize, seed: u64) -> Vec<LocalSurfacePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<LocalSurfacePoint> = Vec::new();
    let charts = [Chart::Affine, Chart::Infinity];
    let Place::Finite(p) = place else {
        for trial in 0..SAMPLER_BUDGET {
            if out.len() >= wanted {
                break;
            }
            let chart = charts[trial % 2];
            let t = Rational::new(BigInt::from(rng.gen_range(-1000i64..=1000)), BigInt::from(rng.gen_range(1i64..=50)));
            if let Some(pt) = curve_image(curve, surface, place, chart, &t, PointSource::Curve) {
                push_new(&mut out, pt);
            }
        }
        return out;
    };
    let k = sampling_precision(surface, p) as usize;
    let pk = num_traits::pow(p.clone(), k);
    let (_, change) = integral_model(curve, p);
    // (chart, t scaling, base point in model coordinates, largest perturbation exponent)
    let mut seeds: Vec<(Chart, Rational, Rational, usize)> = Vec::new();
    for chart in charts {
        let (_, mt) = change.scalings(chart, curve.n());
        let g = change.transform(curve, chart);
        for r in residue_seeds(&g, p).into_iter().chain([BigInt::zero()]) {
            seeds.push((chart, mt.clone(), Rational::from_integer(r), k));
        }
    }
    let near = hint.map(|w| {
        let (_, mt) = w.model.scalings(w.chart, curve.n());
        (w.chart, mt, w.t.clone(), k + w.precision as usize)
    });
    for trial in 0..SAMPLER_BUDGET {
        if out.len() >= wanted {
            break;
        }
        let (chart, mt, base, jmax) = match (&near, trial % 4) {
            (Some(w), 0 | 1) => w.clone(),
            (_, 3) => {
                let chart = charts[trial / 4 % 2];
                let (_, mt) = change.scalings(chart, curve.n());
                (chart, mt, Rational::from_integer(rand_below(&mut rng, &pk)), k)
            }
            _ => seeds[rng.gen_range(0..seeds.len())].clone(),
        };
        let j = rng.gen_range(1..=jmax);
        let eps = Rational::from_integer(rand_below(&mut rng, &pk));
        let t_model = base + pow_p(p, j as i64) * eps;
        if let Some(pt) = curve_image(curve, surface, place, chart, &(mt * t_model), PointSource::Curve) {
            push_new(&mut out, pt);
        }
    }
    out
}

fn random_coord(rng: &mut ChaCha8Rng, place: &Place, pk: &BigInt) -> Rational {
    match place {
        Place::Real => Rational::new(BigInt::from(rng.gen_range(-1000i64..=1000)), BigInt::from(rng.gen_range(1i64..=30))),
        Place::Finite(_) => Rational::from_integer(rand_below(rng, pk)),
    }
}

/// Random u, v, y; then x^2 = a(y^2 - C^2 u v) and z^2 = (x^2 + b(u - A v)(u - B v)) / a,
/// kept when both are squares in the completion. Gives up early when the first fifth of the
/// budget yields nothing.
pub fn sample_direct_points(surface: &Dp4Surface, place: &Place, wanted: usize, seed: u64) -> Vec<LocalSurfacePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pk = match place {
        Place::Finite(p) => num_traits::pow(p.clone(), sampling_precision(surface, p) as usize),
        Place::Real => BigInt::one(),
    };
    let c2 = &surface.C * &surface.C;
    let mut out = Vec::new();
    for trial in 0..SAMPLER_BUDGET {
        if out.len() >= wanted || (out.is_empty() && trial >= SAMPLER_BUDGET / 5) {
            break;
        }
        let (u, v, y) = (random_coord(&mut rng, place, &pk), random_coord(&mut rng, place, &pk), random_coord(&mut rng, place, &pk));
        if u.is_zero() && v.is_zero() {
            continue;
        }
        let x2 = &surface.a * (&y * &y - &c2 * &u * &v);
        if !square_or_zero(&x2, place) {
            continue;
        }
        let z2 = (&x2 + &surface.b * (&u - &surface.A * &v) * (&u - &surface.B * &v)) / &surface.a;
        if !square_or_zero(&z2, place) {
            continue;
        }
        push_new(&mut out, LocalSurfacePoint { place: place.clone(), x2, y2: &y * &y, z2, u, v, source: PointSource::Direct });
    }
    out
}

fn push_new(out: &mut Vec<LocalSurfacePoint>, pt: LocalSurfacePoint) {
    let key = pt.key();
    if !out.iter().any(|q| q.key() == key) {
        out.push(pt);
    }
}

/// Up to n distinct verified points: the witness image first, then curve and direct samples in turn.
pub fn sample_surface_points(curve: &HyperellipticCurve, surface: &Dp4Surface, cert: Option<&LocalCertificate>, place: &Place, n: usize, seed: u64) -> Vec<LocalSurfacePoint> {
    let mut out = Vec::new();
    if let Some(pt) = cert.and_then(|c| surface_local_point(surface, curve, c)) {
        out.push(pt);
    }
    let direct = sample_direct_points(surface, place, n, seed ^ 0x9e37_79b9_7f4a_7c15);
    let hint = cert.and_then(|c| match &c.witness {
        Some(Witness::Padic(w)) => Some(w),
        _ => None,
    });
    let from_curve = sample_curve_points(curve, surface, place, hint, n, seed);
    let mut d = direct.into_iter();
    let mut c = from_curve.into_iter();
    while out.len() < n {
        let (a, b) = (c.next(), d.next());
        if a.is_none() && b.is_none() {
            break;
        }
        for pt in [a, b].into_iter().flatten() {
            if out.len() < n {
                push_new(&mut out, pt);
            }
        }
    }
    out.retain(|pt| pt.verify(surface).is_ok());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Fiber, Theta};
    use crate::local::certify_local_curve;
    use crate::testutil::params_g1;

    #[test]
    fn witness_images_lie_on_the_surface() {
        let ps = params_g1();
        for theta in [Theta::zero(), Theta::Infinity, Theta::ratio(1, 2)] {
            let fib = Fiber::new(&ps, &theta).unwrap();
            for place in [Place::Real, Place::finite(2), Place::Finite(ps.a.clone()), Place::Finite(ps.b.clone()), Place::Finite(ps.c.clone())] {
                let cert = certify_local_curve(&fib.curve, &place).unwrap();
                let pt = surface_local_point(&fib.surface, &fib.curve, &cert).unwrap_or_else(|| panic!("{theta} {place}"));
                pt.verify(&fib.surface).unwrap();
            }
        }
    }

    #[test]
    fn samplers_find_points() {
        let ps = params_g1();
        let fib = Fiber::new(&ps, &Theta::zero()).unwrap();
        let good = Place::finite(10007);
        let direct = sample_direct_points(&fib.surface, &good, 5, 1);
        assert_eq!(direct.len(), 5);
        let curve = sample_curve_points(&fib.curve, &fib.surface, &Place::Finite(ps.a.clone()), None, 5, 2);
        assert_eq!(curve.len(), 5);
        for pt in direct.iter().chain(&curve) {
            pt.verify(&fib.surface).unwrap();
        }
        let real = sample_surface_points(&fib.curve, &fib.surface, None, &Place::Real, 10, 3);
        assert_eq!(real.len(), 10);
    }

    #[test]
    fn tampered_points_fail() {
        let ps = params_g1();
        let fib = Fiber::new(&ps, &Theta::zero()).unwrap();
        let mut pt = sample_direct_points(&fib.surface, &Place::finite(10007), 1, 9).pop().unwrap();
        pt.u += Rational::one();
        assert!(pt.verify(&fib.surface).is_err());
    }
}
