use super::*;
use crate::arith::{rat, Place};
use crate::family::{Fiber, Theta};
use crate::local::{certify_all_local, sample_direct_points, PointSource};
use crate::testutil::{params_g1, params_g5};
use proptest::prelude::*;

fn fiber(theta: Theta) -> Fiber {
    Fiber::new(&params_g1(), &theta).unwrap()
}

#[test]
fn inv_arithmetic_and_serde() {
    assert_eq!(Inv::Half + Inv::Half, Inv::Zero);
    assert_eq!([Inv::Half, Inv::Zero, Inv::Half, Inv::Half].into_iter().sum::<Inv>(), Inv::Half);
    assert_eq!(serde_json::to_string(&Inv::Half).unwrap(), "\"1/2\"");
    assert_eq!(serde_json::from_str::<Inv>("\"0\"").unwrap(), Inv::Zero);
    assert!(serde_json::from_str::<Inv>("\"1/3\"").is_err());
    for m in ["prop-good", "prop-c", "prop-a", "prop-square", "sampled"] {
        assert_eq!(m.parse::<InvariantMethod>().unwrap().to_string(), m);
    }
}

#[test]
fn theta_zero_at_c_uses_prop_c() {
    let ps = params_g1();
    let f = fiber(Theta::zero());
    let c = certify_invariant(&f.surface, &Place::Finite(ps.c.clone()), f.theta()).unwrap();
    assert_eq!((c.method.clone(), c.value), (InvariantMethod::PropC, Inv::Zero));
    assert!(c.is_rigorous());
    assert!(c.hypotheses.iter().any(|h| h.name == "v(A)-even"));
    assert!(c.rejected.iter().any(|r| r.starts_with("prop-good")));
}

#[test]
fn prop_a_fires_at_a() {
    let ps = params_g1();
    for theta in [Theta::Infinity, Theta::zero(), Theta::ratio(1, 1), Theta::ratio(-2, 3)] {
        let f = fiber(theta.clone());
        let c = certify_invariant(&f.surface, &Place::Finite(ps.a.clone()), f.theta()).unwrap();
        assert_eq!((c.method.clone(), c.value), (InvariantMethod::PropA, Inv::Half), "{theta}");
        assert!(c.is_rigorous());
    }
}

#[test]
fn square_places() {
    let ps = params_g1();
    let f = fiber(Theta::ratio(3, 2));
    for place in [Place::Real, Place::finite(2), Place::Finite(ps.b.clone())] {
        let c = certify_invariant(&f.surface, &place, f.theta()).unwrap();
        assert_eq!(c.method, InvariantMethod::PropSquare, "{place}");
        assert_eq!(c.value, Inv::Zero);
    }
}

#[test]
fn sampled_values_match_propositions() {
    let ps = params_g1();
    let f = fiber(Theta::zero());
    let at_a = sample_invariant(&f, &Place::Finite(ps.a.clone()), None, 10, 5).unwrap();
    assert_eq!((at_a.value, at_a.consistent, at_a.count), (Some(Inv::Half), true, 10));
    let good = sample_invariant(&f, &Place::finite(10007), None, 10, 6).unwrap();
    assert_eq!((good.value, good.consistent, good.count), (Some(Inv::Zero), true, 10));
    assert_eq!(sample_invariant(&f, &Place::Real, None, 0, 1), Err(BrauerError::NoSamples));
}

#[test]
fn off_surface_points_are_rejected() {
    let f = fiber(Theta::zero());
    let mut pt = sample_direct_points(&f.surface, &Place::finite(10007), 1, 3).pop().unwrap();
    assert_eq!(pt.source, PointSource::Direct);
    pt.z2 += rat(1);
    assert!(matches!(evaluate_invariant_at_point(&f.surface, &pt), Err(BrauerError::BadPoint(_))));
}

#[test]
fn synthetic_surface_falls_back_to_sampling() {
    // a = 3 is not a square at 5 and 5 divides B - A, so no proposition applies
    let s = Dp4Surface::new(rat(3), rat(1), rat(1), rat(6), rat(1));
    let c = certify_invariant(&s, &Place::finite(5), &Theta::zero()).unwrap();
    assert_eq!(c.method, InvariantMethod::Sampled);
    assert!(!c.is_rigorous() && !c.warnings.is_empty());
    assert_eq!(c.rejected.len(), 3);
}

/// Independent evaluation through the Legendre symbol: at an odd p not dividing a, the symbol
/// (a, r)_p is (a/p)^{v_p(r)}.
fn oracle_unramified(a: &Rational, r: &Rational, p: &BigInt) -> Inv {
    let v = padic_val(r, p).unwrap();
    let s = crate::arith::legendre(&reduce_mod(a, p).unwrap(), p).unwrap();
    if v % 2 != 0 && s == -1 {
        Inv::Half
    } else {
        Inv::Zero
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn representations_agree(seed in any::<u64>(), idx in 0usize..4) {
        let ps = params_g1();
        let places = [Place::Real, Place::Finite(ps.a.clone()), Place::Finite(ps.c.clone()), Place::finite(10007)];
        let place = &places[idx];
        let f = fiber(Theta::ratio(1, 2));
        let pts = sample_surface_points(&f.curve, &f.surface, None, place, 4, seed);
        let class = QuaternionClass::of(&f.surface);
        for pt in &pts {
            prop_assert!(class.evaluate(pt).is_ok());
            if let Place::Finite(p) = place {
                if padic_val(&f.surface.a, p) == Some(0) {
                    let r = class.representations(&pt.u, &pt.v).into_iter().flatten().find(|r| !r.is_zero()).unwrap();
                    prop_assert_eq!(class.evaluate(pt).unwrap(), oracle_unramified(&f.surface.a, &r, p));
                }
            }
        }
    }
}

#[test]
fn genus_one_obstruction() {
    let ps = params_g1();
    for theta in [Theta::zero(), Theta::Infinity, Theta::ratio(-1, 3)] {
        let f = fiber(theta.clone());
        let local = certify_all_local(&f.curve);
        let ob = obstruction_certificate(&f, &local, 10).unwrap();
        assert!(ob.conclusion && ob.rigorous, "{theta}: {:?}", ob.failure);
        assert_eq!(ob.sum, Inv::Half);
        for c in &ob.table {
            let expected = if c.place == Place::Finite(ps.a.clone()) { Inv::Half } else { Inv::Zero };
            assert_eq!(c.value, expected, "{theta} {}", c.place);
            assert_eq!(c.samples_agree, Some(true), "{theta} {}", c.place);
            assert!(c.sample_count >= 10, "{theta} {} {}", c.place, c.sample_count);
        }
        assert!(ob.notes.iter().any(|n| n.contains("Sha")));
        let json = serde_json::to_string(&ob).unwrap();
        assert_eq!(serde_json::from_str::<ObstructionCertificate>(&json).unwrap(), ob);
    }
}

#[test]
fn genus_five_obstruction() {
    let f = Fiber::new(&params_g5(), &Theta::ratio(3, 2)).unwrap();
    let local = certify_all_local(&f.curve);
    let ob = obstruction_certificate(&f, &local, 10).unwrap();
    assert!(ob.conclusion && ob.rigorous, "{:?}", ob.failure);
    assert_eq!(ob.sum, Inv::Half);
}
