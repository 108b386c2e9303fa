use super::*;
use crate::arith::{rat, Rational};
use crate::family::Theta;
use crate::params::{omega0_for_genus, ParamSet};
use crate::testutil::params_g1;
use num_bigint::BigInt;

fn g1_config(thetas: Vec<Theta>, height: u64) -> RunConfig {
    let mut c = RunConfig::new(1, 0, Mode::Full);
    c.params = ParamSource::Explicit(params_g1());
    c.thetas = ThetaSpec::List(thetas);
    c.height_bound = height;
    c
}

#[test]
fn genus_one_fibers_are_certified() {
    let c = g1_config(vec![Theta::zero(), Theta::ratio(1, 1), Theta::Infinity], 30);
    let r = run_certify(&c).unwrap();
    assert!(r.all_certified(), "{:?}", r.fibers.iter().map(|f| &f.failure).collect::<Vec<_>>());
    assert_eq!(r.summary.fibers, 3);
    assert_eq!(r.summary.points_found, 0);
    for f in &r.fibers {
        assert!(f.j_invariant.is_some() && f.obstruction.as_ref().unwrap().conclusion);
        assert!(f.point_search.as_ref().unwrap().is_empty());
    }
    let json = serde_json::to_string(&r).unwrap();
    assert_eq!(serde_json::from_str::<GlobalReport>(&json).unwrap(), r);
}

#[test]
fn parallel_and_serial_runs_agree() {
    let mut c = g1_config(vec![Theta::ratio(-1, 2), Theta::ratio(2, 3)], 10);
    let serial = serde_json::to_string(&run_certify(&c).unwrap().fibers).unwrap();
    c.parallelism = 3;
    let parallel = serde_json::to_string(&run_certify(&c).unwrap().fibers).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn failures_are_isolated_and_named() {
    // with a = b = 1 the coefficient D = theta^2 - 1 vanishes at theta = 1
    let one = BigInt::from(1);
    let ps = ParamSet { a: one.clone(), b: one, c: 5.into(), d: 7.into(), omega0: omega0_for_genus(1), g: 1, h: 0 };
    let c = RunConfig::new(1, 0, Mode::Full);
    let r = run_fiber(&ps, &Theta::ratio(1, 1), &c, Stage::JInvariant);
    assert!(!r.certified);
    assert_eq!(r.failure.unwrap().stage, Stage::Build);
    let r = run_fiber(&params_g1(), &Theta::ratio(1, 1), &c, Stage::Smoothness);
    assert!(r.certified && r.local.is_none());
}

#[test]
fn mode_violation_is_rejected_before_running() {
    let e = run_certify(&RunConfig::new(3, 0, Mode::Full)).unwrap_err();
    assert!(matches!(e, HarnessError::Config(ref s) if s.contains("g = 1 mod 4")), "{e}");
}

#[test]
fn j_report() {
    let r = report_j_invariants(&g1_config(vec![Theta::zero(), Theta::ratio(1, 1)], 1)).unwrap();
    assert_eq!((r.rows.len(), r.distinct), (2, 2));
    assert!(r.rows.iter().all(|row| row.denominator != Rational::from_integer(0.into())));
    let one = report_j_invariants(&g1_config(vec![Theta::ratio(2, 1)], 1)).unwrap();
    assert_eq!((one.rows.len(), one.distinct), (1, 1));
    let mut c = RunConfig::new(5, 1, Mode::Full);
    c.thetas = ThetaSpec::List(vec![Theta::zero()]);
    assert_eq!(report_j_invariants(&c), Err(HarnessError::NotGenusOne(5)));
    assert_eq!(crate::family::j_from(&rat(3), &rat(-3)).unwrap(), rat(1728));
}
