use crate::params::{omega0_for_genus, ParamSet};
use num_bigint::BigInt;

fn quad(a: &str, b: &str, c: &str, d: &str, g: u32, h: u32) -> ParamSet {
    let n = |s: &str| s.parse::<BigInt>().unwrap();
    ParamSet { a: n(a), b: n(b), c: n(c), d: n(d), omega0: omega0_for_genus(g), g, h }
}

/// First sieve output for g = 1.
pub fn params_g1() -> ParamSet {
    quad("1753", "73", "5", "146059", 1, 0)
}

/// First sieve output for g = 5, h = 1.
pub fn params_g5() -> ParamSet {
    quad("82957914004081763089", "23616331489", "107", "75831858899179651581527", 5, 1)
}
