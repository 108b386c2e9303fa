//! Certifies one genus 1 fiber and prints its invariant table.
//!
//! cargo run --release -p hasse-core --example certify_fiber -- 3/2

use hasse_core::brauer::obstruction_certificate;
use hasse_core::family::{Fiber, Theta};
use hasse_core::local::certify_all_local;
use hasse_core::params::{omega0_for_genus, sieve_params};

fn main() {
    let theta: Theta = std::env::args().nth(1).as_deref().unwrap_or("0").parse().expect("theta as m/n, 0 or inf");
    let params = sieve_params(1, 0, &omega0_for_genus(1), 10_000_000, 1).expect("sieve").remove(0);
    println!("a = {}, b = {}, c = {}, d = {}, theta = {theta}", params.a, params.b, params.c, params.d);
    let fiber = Fiber::new(&params, &theta).expect("fiber");
    let local = certify_all_local(&fiber.curve);
    println!("locally solvable everywhere: {}", local.solvable_everywhere);
    let ob = obstruction_certificate(&fiber, &local, 10).expect("obstruction");
    for c in &ob.table {
        println!("  inv at {:>24} = {:>3}  ({})", c.place.to_string(), c.value.to_string(), c.method);
    }
    println!("sum = {}, no rational points: {}", ob.sum, ob.conclusion);
}
