//! Parameter quadruples (a, b, c, d): an independent condition checker and a deterministic sieve.

use crate::arith::{inv_mod, is_prime, is_prime_u64, jacobi, legendre, primes_up_to};
use crate::json::{dec, dec_vec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSet {
    #[serde(with = "dec")]
    pub a: BigInt,
    #[serde(with = "dec")]
    pub b: BigInt,
    #[serde(with = "dec")]
    pub c: BigInt,
    #[serde(with = "dec")]
    pub d: BigInt,
    #[serde(with = "dec_vec")]
    pub omega0: Vec<u64>,
    #[serde(with = "dec")]
    pub g: u32,
    #[serde(with = "dec")]
    pub h: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub id: String,
    pub holds: bool,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn accepted(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.holds)
    }

    pub fn failures(&self) -> Vec<&ConditionEntry> {
        self.entries.iter().filter(|e| !e.holds).collect()
    }

    pub fn get(&self, id: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    fn push(&mut self, id: impl Into<String>, holds: bool, witness: impl Into<String>) {
        self.entries.push(ConditionEntry { id: id.into(), holds, witness: witness.into() });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Slot::A => "a",
            Slot::B => "b",
            Slot::C => "c",
            Slot::D => "d",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("search bound {bound} exhausted in slot {slot}")]
    Exhausted { slot: Slot, bound: u64 },
    #[error("invalid sieve input: {0}")]
    Invalid(String),
}

/// All odd primes p <= 4 g^2.
pub fn omega0_for_genus(g: u32) -> Vec<u64> {
    primes_up_to(4 * g as u64 * g as u64).into_iter().filter(|&p| p != 2).collect()
}

fn symbol(x: &BigInt, p: &BigInt) -> Result<i8, String> {
    legendre(x, p).map_err(|e| e.to_string())
}

/// Checks conditions (i)-(vii) for a quadruple over Q, each sub-item separately.
pub fn verify_conditions(ps: &ParamSet) -> ConditionReport {
    let mut r = ConditionReport::default();
    let two = BigInt::from(2);
    let eight = BigInt::from(8);
    let named = [("a", &ps.a), ("b", &ps.b), ("c", &ps.c), ("d", &ps.d)];

    let omega_ok = ps.omega0.iter().all(|&q| q % 2 == 1 && is_prime_u64(q));
    r.push("omega0.odd-primes", omega_ok, format!("{:?}", ps.omega0));

    for (name, x) in named {
        let prime = x.is_odd() && x > &two && is_prime(x).unwrap_or(false);
        r.push(format!("i.odd-prime.{name}"), prime, x.to_string());
        let outside = !ps.omega0.iter().any(|&q| BigInt::from(q) == *x);
        r.push(format!("i.outside-omega0.{name}"), outside, x.to_string());
    }
    let mut distinct = true;
    for i in 0..4 {
        for j in i + 1..4 {
            distinct &= named[i].1 != named[j].1;
        }
    }
    r.push("i.distinct", distinct, format!("{} {} {} {}", ps.a, ps.b, ps.c, ps.d));

    for (name, x) in [("a", &ps.a), ("b", &ps.b)] {
        let m = x.mod_floor(&eight);
        r.push(format!("ii.{name}-mod-8"), m.is_one(), format!("{name} mod 8 = {m}"));
        r.push(format!("ii.{name}-positive"), x.is_positive(), x.to_string());
        for &q in &ps.omega0 {
            let s = symbol(x, &BigInt::from(q));
            r.push(format!("ii.({name}/{q})"), s == Ok(1), format!("{s:?}"));
        }
    }

    for (name, x) in [("a", &ps.a), ("b", &ps.b)] {
        let s2 = symbol(&two, x);
        r.push(format!("iii.(2/{name})"), s2 == Ok(1), format!("{s2:?}"));
        let sm = symbol(&BigInt::from(-1), x);
        r.push(format!("iii.(-1/{name})"), sm == Ok(1), format!("{sm:?}"));
    }

    let amb = ps.a.mod_floor(&ps.b);
    r.push("iv.a-mod-b", amb.is_one(), format!("a mod b = {amb}"));
    let prod = (&ps.b * &ps.c * &ps.c * &ps.d).mod_floor(&ps.a);
    r.push("iv.bc2d-mod-a", prod.is_one(), format!("b c^2 d mod a = {prod}"));

    let sym_checks: [(&str, &BigInt, &BigInt, i8); 9] = [
        ("v.(c/a)", &ps.c, &ps.a, -1),
        ("v.(c/b)", &ps.c, &ps.b, -1),
        ("v.(d/b)", &ps.d, &ps.b, -1),
        ("v.(d/c)", &ps.d, &ps.c, 1),
        ("vi.(a/b)", &ps.a, &ps.b, 1),
        ("vi.(a/c)", &ps.a, &ps.c, -1),
        ("vi.(b/a)", &ps.b, &ps.a, 1),
        ("vi.(b/c)", &ps.b, &ps.c, -1),
        ("vi.(d/a)", &ps.d, &ps.a, 1),
    ];
    for (id, x, p, want) in sym_checks {
        let s = symbol(x, p);
        r.push(id, s == Ok(want), format!("{s:?}"));
    }

    let v = (&ps.b * &ps.c * &ps.d + 2u32).mod_floor(&ps.a);
    r.push("vii.a-not-dividing-bcd+2", !v.is_zero(), format!("(bcd+2) mod a = {v}"));
    r
}

/// Residue conditions modulo the smallest Omega0 primes are enumerated as classes while the
/// number of classes stays below this size.
const WHEEL_CLASSES: usize = 1 << 21;

/// Sorted residues r mod (base * prod q) with r = r0 mod base and `admissible(q, r mod q)` for each q.
fn wheel_classes(base: u64, r0: u64, primes: &[u64], admissible: impl Fn(u64, u64) -> bool) -> (u64, Vec<u64>) {
    let mut modulus = base;
    let mut classes = vec![r0 % base];
    for &q in primes {
        let good: Vec<u64> = (0..q).filter(|&s| admissible(q, s)).collect();
        let inv = inv_mod(&BigInt::from(modulus % q), &BigInt::from(q)).unwrap().to_u64().unwrap();
        let mut next = Vec::with_capacity(classes.len() * good.len());
        for &r in &classes {
            for &s in &good {
                let t = ((s + q - r % q) % q) * inv % q;
                next.push(r + modulus * t);
            }
        }
        modulus *= q;
        classes = next;
    }
    classes.sort_unstable();
    (modulus, classes)
}

fn wheel_split(omega: &[u64], per_prime: impl Fn(u64) -> usize) -> usize {
    let mut size = 1usize;
    let mut n = 0;
    for &q in omega {
        let next = size * per_prime(q);
        if next > WHEEL_CLASSES {
            break;
        }
        size = next;
        n += 1;
    }
    n
}

fn qr_table(q: u64) -> Vec<bool> {
    let mut t = vec![false; q as usize];
    for x in 1..q {
        t[((x * x) % q) as usize] = true;
    }
    t
}

struct Budget {
    slot: Slot,
    bound: u64,
    used: u64,
}

impl Budget {
    fn new(slot: Slot, bound: u64) -> Self {
        Budget { slot, bound, used: 0 }
    }

    fn tick(&mut self) -> Result<(), SieveError> {
        self.used += 1;
        if self.used > self.bound {
            Err(SieveError::Exhausted { slot: self.slot, bound: self.bound })
        } else {
            Ok(())
        }
    }
}

fn residue_ok(x: u128, tables: &[(u64, Vec<bool>)]) -> bool {
    tables.iter().all(|(q, t)| t[(x % *q as u128) as usize])
}

fn big128(x: u128) -> BigInt {
    BigInt::from(x)
}

fn prime128(x: u128) -> bool {
    match u64::try_from(x) {
        Ok(v) => is_prime_u64(v),
        Err(_) => is_prime(&big128(x)).unwrap_or(false),
    }
}

/// Deterministic search for quadruples satisfying (i)-(vii).
///
/// Each slot scans its own progression and `bound` caps the number of candidates examined
/// per slot: b runs over 1 mod 8 restricted to quadratic-residue classes modulo the wheel
/// primes, a over 1 mod 8b restricted the same way, c over odd integers, and d over the class
/// of (b c^2)^{-1} modulo a. The first a, b, c found are kept and up to `count` values of d
/// are returned.
pub fn sieve_params(g: u32, h: u32, omega0: &[u64], bound: u64, count: usize) -> Result<Vec<ParamSet>, SieveError> {
    if count == 0 {
        return Err(SieveError::Invalid("count must be at least 1".into()));
    }
    if omega0.iter().any(|&q| q % 2 == 0 || !is_prime_u64(q)) {
        return Err(SieveError::Invalid("omega0 must consist of odd primes".into()));
    }
    let mut omega: Vec<u64> = omega0.to_vec();
    omega.sort_unstable();
    omega.dedup();
    let split = wheel_split(&omega, |q| (q as usize - 1) / 2);
    let wheel: Vec<u64> = omega[..split].to_vec();
    let rest: Vec<(u64, Vec<bool>)> = omega[split..].iter().map(|&q| (q, qr_table(q))).collect();
    let tables: Vec<Vec<bool>> = wheel.iter().map(|&q| qr_table(q)).collect();
    let is_qr = |q: u64, s: u64| tables[wheel.iter().position(|&x| x == q).unwrap()][s as usize];

    // slot b
    let (wb, classes_b) = wheel_classes(8, 1, &wheel, is_qr);
    let mut budget = Budget::new(Slot::B, bound);
    let b = 'b: {
        for j in 0u64.. {
            for &r in &classes_b {
                let b = j as u128 * wb as u128 + r as u128;
                if b <= 1 {
                    continue;
                }
                budget.tick()?;
                if residue_ok(b, &rest) && prime128(b) {
                    break 'b b;
                }
            }
        }
        unreachable!()
    };

    // slot a
    let step = 8 * b;
    let (wa, classes_a) = wheel_classes(1, 0, &wheel, |q, k| is_qr(q, ((1 + step * k as u128) % q as u128) as u64));
    let mut budget = Budget::new(Slot::A, bound);
    let a = 'a: {
        for j in 0u64.. {
            for &r in &classes_a {
                let k = j as u128 * wa as u128 + r as u128;
                if k == 0 {
                    continue;
                }
                budget.tick()?;
                let a = 1 + step * k;
                if residue_ok(a, &rest) && prime128(a) {
                    break 'a a;
                }
            }
        }
        unreachable!()
    };

    let (a, b) = (big128(a), big128(b));
    let in_omega = |x: &BigInt| x.to_u64().is_some_and(|v| omega.binary_search(&v).is_ok());

    // slot c
    let mut budget = Budget::new(Slot::C, bound);
    let mut c = BigInt::from(1);
    loop {
        c += 2;
        budget.tick()?;
        if in_omega(&c) || c == a || c == b {
            continue;
        }
        if jacobi(&c, &a) == -1 && jacobi(&c, &b) == -1 && is_prime(&c).unwrap_or(false) {
            break;
        }
    }

    // slot d
    let bc2 = (&b * &c * &c).mod_floor(&a);
    let d0 = inv_mod(&bc2, &a).expect("b c^2 is a unit modulo the prime a");
    let mut budget = Budget::new(Slot::D, bound);
    let mut out = Vec::new();
    let mut d = d0;
    loop {
        if budget.tick().is_err() {
            break;
        }
        let candidate = d.clone();
        d += &a;
        if candidate.is_even() || candidate <= BigInt::from(2) || in_omega(&candidate) {
            continue;
        }
        if candidate == a || candidate == b || candidate == c {
            continue;
        }
        if jacobi(&candidate, &b) != -1 || jacobi(&candidate, &c) != 1 {
            continue;
        }
        if (&b * &c * &candidate + 2u32).mod_floor(&a).is_zero() {
            continue;
        }
        if !is_prime(&candidate).unwrap_or(false) {
            continue;
        }
        out.push(ParamSet { a: a.clone(), b: b.clone(), c: c.clone(), d: candidate, omega0: omega.clone(), g, h });
        if out.len() == count {
            break;
        }
    }
    if out.is_empty() {
        return Err(SieveError::Exhausted { slot: Slot::D, bound });
    }
    Ok(out)
}
