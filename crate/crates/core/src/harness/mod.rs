//! End-to-end runs: configuration, certification of fiber grids, point searches and reports.

mod config;
mod run;
mod search;

pub use config::{Mode, ParamSource, RunConfig, ThetaSpec, DEFAULT_HEIGHT, DEFAULT_SIEVE_BOUND, THETA_ZERO_OMEGA_CAP};
pub use run::{report_j_invariants, run_certify, run_fiber, run_stages, FiberReport, GlobalReport, JReport, JRow, Smoothness, Stage, StageFailure, Summary, VERSION};
pub use search::{curve_point_search, rational_point_search, surface_point_search, CurvePoint, PointSearchResult};

use crate::params::SieveError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("height bound must be at least 1")]
    Height,
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parameter sieve: {0}")]
    Sieve(#[from] SieveError),
    #[error("j-invariants need genus 1, got g = {0}")]
    NotGenusOne(u32),
    #[error("the j-invariant is constant on the theta list")]
    ConstantJ,
}

#[cfg(test)]
mod tests;
