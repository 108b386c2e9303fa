use super::Check;
use crate::arith::factor::TRIAL_BOUND;
use crate::arith::{factor, inv_mod, primes_up_to, Place, Rational};
use crate::family::HyperellipticCurve;
use crate::json::{dec, dec_vec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Pollard-Brent iterations spent on each cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceReason {
    pub place: Place,
    pub reasons: Vec<String>,
}

/// A factored integer: prime powers plus cofactors whose prime factors all exceed the trial bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredValue {
    pub name: String,
    #[serde(with = "dec")]
    pub value: BigInt,
    pub primes: Vec<FactoredPrime>,
    #[serde(with = "dec_vec")]
    pub unresolved: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredPrime {
    #[serde(with = "dec")]
    pub prime: BigInt,
    #[serde(with = "dec")]
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub places: Vec<Place>,
    pub provenance: Vec<PlaceReason>,
    pub factored: Vec<FactoredValue>,
    /// True when every factorization was completed.
    pub complete: bool,
}

impl CriticalSet {
    pub fn contains(&self, place: &Place) -> bool {
        self.places.binary_search(place).is_ok()
    }

    pub fn contains_prime(&self, p: &BigInt) -> bool {
        self.contains(&Place::Finite(p.clone()))
    }

    pub fn reasons(&self, place: &Place) -> &[String] {
        self.provenance.iter().find(|r| &r.place == place).map_or(&[], |r| &r.reasons)
    }

    pub fn cofactors(&self) -> impl Iterator<Item = (&str, &BigInt)> {
        self.factored.iter().flat_map(|f| f.unresolved.iter().map(move |r| (f.name.as_str(), r)))
    }
}

/// Symbolic coverage of all places outside a critical set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlanketRecord {
    pub statement: String,
    pub checks: Vec<Check>,
    pub holds: bool,
}

impl BlanketRecord {
    pub fn new(statement: impl Into<String>, checks: Vec<Check>) -> Self {
        let holds = checks.iter().all(|c| c.holds);
        BlanketRecord { statement: statement.into(), checks, holds }
    }
}

struct Builder {
    map: BTreeMap<Place, Vec<String>>,
    factored: Vec<FactoredValue>,
    budget: u64,
}

impl Builder {
    fn add(&mut self, place: Place, reason: impl Into<String>) {
        let r = reason.into();
        let entry = self.map.entry(place).or_default();
        if !entry.contains(&r) {
            entry.push(r);
        }
    }

    fn add_prime(&mut self, p: &BigInt, reason: &str) {
        self.add(Place::Finite(p.clone()), reason);
    }

    /// Factors n after dividing out the known primes in `hints`.
    fn add_factors(&mut self, name: &str, n: &BigInt, hints: &[BigInt]) {
        if n.is_zero() {
            return;
        }
        let mut rest = n.abs();
        let mut primes: Vec<(BigInt, u32)> = Vec::new();
        for q in hints {
            let mut e = 0;
            while q > &BigInt::one() && (&rest % q).is_zero() {
                rest /= q;
                e += 1;
            }
            if e > 0 {
                primes.push((q.clone(), e));
            }
        }
        let f = factor(&rest, self.budget);
        primes.extend(f.primes);
        for (p, _) in &primes {
            self.add_prime(p, &format!("divides {name}"));
        }
        self.factored.push(FactoredValue {
            name: name.to_string(),
            value: n.abs(),
            primes: primes.iter().map(|(p, e)| FactoredPrime { prime: p.clone(), exponent: *e }).collect(),
            unresolved: f.unresolved,
        });
    }

    fn finish(self) -> CriticalSet {
        let complete = self.factored.iter().all(|f| f.unresolved.is_empty());
        let places: Vec<Place> = self.map.keys().cloned().collect();
        let provenance = self.map.into_iter().map(|(place, reasons)| PlaceReason { place, reasons }).collect();
        CriticalSet { places, provenance, factored: self.factored, complete }
    }
}

/// Critical places with the default factorization budget.
pub fn critical_places(curve: &HyperellipticCurve) -> CriticalSet {
    critical_places_with(curve, DEFAULT_RHO_BUDGET)
}

/// Places where local solvability needs an explicit argument.
pub fn critical_places_with(curve: &HyperellipticCurve, rho_budget: u64) -> CriticalSet {
    let mut b = Builder { map: BTreeMap::new(), factored: Vec::new(), budget: rho_budget };
    b.add(Place::Real, "real place");
    b.add_prime(&BigInt::from(2), "p = 2");
    let g = curve.genus as u64;
    for q in primes_up_to(4 * g * g).into_iter().filter(|&q| q != 2) {
        b.add_prime(&BigInt::from(q), "odd prime up to 4g^2");
    }
    match &curve.coeffs {
        Some(k) => {
            let ps = &k.params;
            for &q in &ps.omega0 {
                b.add_prime(&BigInt::from(q), "in omega0");
            }
            for (name, x) in [("a", &ps.a), ("b", &ps.b), ("c", &ps.c), ("d", &ps.d)] {
                b.add_prime(x, &format!("equals {name}"));
            }
            let hints = [ps.a.clone(), ps.b.clone(), ps.c.clone(), ps.d.clone()];
            if let Some(theta) = k.theta.finite() {
                b.add_factors("den(theta)", theta.denom(), &[]);
            }
            b.add_factors("num(A)", k.A.numer(), &hints);
            b.add_factors("num(B)", k.B.numer(), &hints);
            b.add_factors("num(D)", k.D.numer(), &hints);
        }
        None => {
            for (name, x) in [("a", &curve.a), ("b", &curve.b), ("A", &curve.A), ("B", &curve.B)] {
                b.add_factors(&format!("num({name})"), x.numer(), &[]);
                b.add_factors(&format!("den({name})"), x.denom(), &[]);
            }
            b.add_factors("num(A-B)", (&curve.A - &curve.B).numer(), &[]);
        }
    }
    b.finish()
}

fn coprime(r: &BigInt, x: &BigInt) -> bool {
    r.gcd(x).is_one()
}

fn reduce(x: &Rational, m: &BigInt) -> Option<BigInt> {
    crate::arith::reduce_mod(x, m)
}

/// Re-verifies that every place outside `set` has a smooth point by good reduction or because
/// ab is a local square there.
pub fn blanket_record(curve: &HyperellipticCurve, set: &CriticalSet) -> BlanketRecord {
    let mut checks = Vec::new();
    let g = curve.genus as u64;
    checks.push(Check::new("set.real-and-2", set.contains(&Place::Real) && set.contains_prime(&BigInt::from(2)), "Real and 2 are critical"));
    let small: Vec<u64> = primes_up_to(4 * g * g).into_iter().filter(|&q| q != 2).collect();
    let missing: Vec<u64> = small.iter().copied().filter(|&q| !set.contains_prime(&BigInt::from(q))).collect();
    checks.push(Check::new("set.odd-primes-up-to-4g^2", missing.is_empty(), format!("{} primes, missing {missing:?}", small.len())));
    for f in &set.factored {
        let mut prod = BigInt::one();
        for fp in &f.primes {
            prod *= num_traits::pow(fp.prime.clone(), fp.exponent as usize);
        }
        for r in &f.unresolved {
            prod *= r;
        }
        let listed = f.primes.iter().all(|fp| set.contains_prime(&fp.prime));
        checks.push(Check::new(format!("factorization.{}", f.name), prod == f.value && listed, format!("{} primes, {} cofactors", f.primes.len(), f.unresolved.len())));
    }
    let statement;
    match &curve.coeffs {
        Some(k) => {
            let ps = &k.params;
            let abcd = [&ps.a, &ps.b, &ps.c, &ps.d].iter().all(|x| set.contains_prime(x));
            checks.push(Check::new("set.abcd", abcd, "a, b, c, d are critical"));
            let om = ps.omega0.iter().all(|&q| set.contains_prime(&BigInt::from(q)));
            checks.push(Check::new("set.omega0", om, format!("{:?}", ps.omega0)));
            let two_c = Rational::from_integer(BigInt::from(2) * &ps.c);
            let ident = &k.A - &k.B == -(two_c * &k.D * &k.D);
            checks.push(Check::new("identity.A-B=-2cD^2", ident, "A - B = -2 c D^2"));
            let n = curve.n() as usize;
            let den = k.theta.finite().map(|t| t.denom().clone()).unwrap_or_else(BigInt::one);
            let den_pow = num_traits::pow(den.clone(), 2 * n);
            let integral = (&den_pow % k.A.denom()).is_zero() && (&den_pow % k.B.denom()).is_zero() && (&den_pow % k.D.denom()).is_zero();
            checks.push(Check::new("identity.denominators", integral, "den(A), den(B), den(D) divide den(theta)^(2g+2)"));
            let two_abc = BigInt::from(2) * &ps.a * &ps.b * &ps.c;
            let ab = &ps.a * &ps.b;
            for (name, r) in set.cofactors() {
                let big_enough = *r > BigInt::from(TRIAL_BOUND) && BigInt::from(TRIAL_BOUND) > BigInt::from(4 * g * g);
                if name == "num(D)" {
                    let theta = k.theta.finite().cloned().unwrap_or_else(Rational::zero);
                    let w = inv_mod(&ab, r).and_then(|abi| {
                        let ti = inv_mod(&reduce(&theta, r)?, r)?;
                        let half = num_traits::pow(ti, n / 2);
                        Some((num_traits::pow(abi, ps.h as usize) * half).mod_floor(r))
                    });
                    let square = w.as_ref().is_some_and(|w| ((w * w - &ab).mod_floor(r)).is_zero());
                    let unit = coprime(r, &(&two_abc * &den));
                    checks.push(Check::new(
                        format!("cofactor.{name}.ab-square"),
                        square && unit && big_enough,
                        format!("{} digits: w^2 = ab with w = (ab)^(-h) theta^(-(g+1)/2), coprime to 2abc den(theta)", r.to_string().len()),
                    ));
                } else {
                    let ok = coprime(r, &(&two_abc * k.D.numer() * &den));
                    checks.push(Check::new(
                        format!("cofactor.{name}.good-reduction"),
                        ok && big_enough,
                        format!("{} digits: coprime to 2abc num(D) den(theta), prime factors above {TRIAL_BOUND}", r.to_string().len()),
                    ));
                }
            }
            statement = "Every prime p outside the critical set is odd, exceeds 4g^2 and divides neither den(theta) nor 2ab(A - B) = -4abcD^2, \
                so the curve has good reduction at p and a smooth F_p-point lifts. Prime factors of unresolved cofactors of num(D) \
                satisfy ab = w^2 mod p, so ab is a square in Q_p and (S, T) = (sqrt(b/a), 0) is a point. The real place and 2 are critical."
                .to_string();
        }
        None => {
            let num_den = |x: &Rational| x.numer() * x.denom();
            let bad = BigInt::from(2) * num_den(&curve.a) * num_den(&curve.b) * curve.A.denom() * curve.B.denom() * (&curve.A - &curve.B).numer();
            for (name, r) in set.cofactors() {
                let ok = name != "num(A-B)" && coprime(r, &bad) && *r > BigInt::from(4 * g * g);
                checks.push(Check::new(format!("cofactor.{name}.good-reduction"), ok, format!("{} digits", r.to_string().len())));
            }
            statement = "Every prime outside the critical set is odd, exceeds 4g^2 and divides neither the denominators nor 2ab(A - B), \
                so the curve has good reduction there and a smooth F_p-point lifts."
                .to_string();
        }
    }
    BlanketRecord::new(statement, checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, rat};
    use crate::family::{Fiber, Theta};
    use crate::testutil::params_g1;

    #[test]
    fn theta_zero_set_matches_factorizations() {
        let ps = params_g1();
        let fiber = Fiber::new(&ps, &Theta::zero()).unwrap();
        let set = critical_places(&fiber.curve);
        for x in [&ps.a, &ps.b, &ps.c, &ps.d] {
            assert!(set.contains_prime(x));
        }
        assert!(set.contains(&Place::Real) && set.contains_prime(&big(2)) && set.contains_prime(&big(3)));
        // independent trial division of bc^2d and bc^2d + 2c
        let a0 = &ps.b * &ps.c * &ps.c * &ps.d;
        let b0 = &a0 + BigInt::from(2) * &ps.c;
        for n in [a0, b0] {
            let mut m = n.clone();
            let mut q = BigInt::from(2);
            while &q * &q <= m {
                while (&m % &q).is_zero() {
                    assert!(set.contains_prime(&q), "{q} divides {n}");
                    m /= &q;
                }
                q += 1;
            }
            if m > BigInt::one() {
                assert!(set.contains_prime(&m));
            }
        }
        assert!(set.complete);
        let blanket = blanket_record(&fiber.curve, &set);
        assert!(blanket.holds, "{:?}", blanket.checks);
    }

    #[test]
    fn theta_denominator_is_critical() {
        let fiber = Fiber::new(&params_g1(), &"2/7".parse::<Theta>().unwrap()).unwrap();
        let set = critical_places(&fiber.curve);
        assert!(set.contains_prime(&big(7)));
        assert!(set.reasons(&Place::finite(7)).iter().any(|r| r.contains("den(theta)")));
    }

    #[test]
    fn generic_curve_set() {
        let c = HyperellipticCurve::new(1, rat(1), rat(1), rat(1), rat(4));
        let set = critical_places(&c);
        assert_eq!(set.places, vec![Place::Real, Place::finite(2), Place::finite(3)]);
        assert!(blanket_record(&c, &set).holds);
    }
}
