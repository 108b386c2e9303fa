//! Certified Hasse principle violations for explicit families of hyperelliptic curves
//! and degree 4 del Pezzo surfaces over Q.

pub mod arith;
pub mod brauer;
pub mod family;
pub mod harness;
pub mod json;
pub mod local;
pub mod params;

#[cfg(test)]
pub(crate) mod testutil;
