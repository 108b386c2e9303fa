use super::{rational_point_search, HarnessError, PointSearchResult, RunConfig};
use crate::brauer::{obstruction_certificate, ObstructionCertificate};
use crate::family::{check_smooth_curve, check_smooth_surface, j_from, j_invariant, Fiber, FiberDescriptor, Theta};
use crate::json::{dec, rational};
use crate::local::{certify_all_local, LocalReport};
use crate::params::ParamSet;
use crate::arith::Rational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Build,
    Smoothness,
    Local,
    Obstruction,
    PointSearch,
    JInvariant,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Build => "build",
            Stage::Smoothness => "smoothness",
            Stage::Local => "local",
            Stage::Obstruction => "obstruction",
            Stage::PointSearch => "point-search",
            Stage::JInvariant => "j-invariant",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoothness {
    pub curve: bool,
    pub surface: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub theta: Theta,
    pub certified: bool,
    pub failure: Option<StageFailure>,
    pub fiber: Option<FiberDescriptor>,
    pub smoothness: Option<Smoothness>,
    pub local: Option<LocalReport>,
    pub obstruction: Option<ObstructionCertificate>,
    pub point_search: Option<PointSearchResult>,
    #[serde(default, with = "opt_rational")]
    pub j_invariant: Option<Rational>,
}

mod opt_rational {
    use crate::arith::Rational;
    use crate::json::RationalRepr;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(RationalRepr::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<RationalRepr>::deserialize(d)?.map(|r| r.to_rational()).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(with = "dec")]
    pub fibers: usize,
    #[serde(with = "dec")]
    pub certified: usize,
    #[serde(with = "dec")]
    pub failed: usize,
    #[serde(with = "dec")]
    pub points_found: usize,
    pub last_stage: Stage,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub version: String,
    pub config: RunConfig,
    pub params: ParamSet,
    pub fibers: Vec<FiberReport>,
    pub summary: Summary,
}

impl GlobalReport {
    pub fn all_certified(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn fiber(&self, theta: &Theta) -> Option<&FiberReport> {
        self.fibers.iter().find(|f| &f.theta == theta)
    }
}

impl FiberReport {
    fn empty(theta: &Theta) -> Self {
        FiberReport {
            theta: theta.clone(),
            certified: false,
            failure: None,
            fiber: None,
            smoothness: None,
            local: None,
            obstruction: None,
            point_search: None,
            j_invariant: None,
        }
    }
}

/// Runs the stages of one fiber up to `last`, stopping at the first one that fails.
pub fn run_fiber(params: &ParamSet, theta: &Theta, config: &RunConfig, last: Stage) -> FiberReport {
    let mut r = FiberReport::empty(theta);
    match fiber_stages(params, theta, config, last, &mut r) {
        Ok(()) => r.certified = true,
        Err(f) => r.failure = Some(f),
    }
    r
}

fn fiber_stages(params: &ParamSet, theta: &Theta, config: &RunConfig, last: Stage, r: &mut FiberReport) -> Result<(), StageFailure> {
    let fail = |stage, reason: String| StageFailure { stage, reason };
    let fiber = Fiber::new(params, theta).map_err(|e| fail(Stage::Build, e.to_string()))?;
    r.fiber = Some(fiber.descriptor());
    if last == Stage::Build {
        return Ok(());
    }

    let sm = Smoothness { curve: check_smooth_curve(&fiber.curve), surface: check_smooth_surface(&fiber.surface) };
    let smooth = sm.curve && sm.surface;
    r.smoothness = Some(sm);
    if !smooth {
        return Err(fail(Stage::Smoothness, "the curve or the surface is singular".into()));
    }
    if last == Stage::Smoothness {
        return Ok(());
    }

    let local = certify_all_local(&fiber.curve);
    let solvable = local.solvable_everywhere;
    let local_failure = match &local.failure {
        Some(p) => format!("no certified local point at {p}"),
        None if !local.blanket.holds => "the blanket record does not hold".to_string(),
        None => "a spot check failed".to_string(),
    };
    r.local = Some(local);
    if !solvable {
        return Err(fail(Stage::Local, local_failure));
    }
    if last == Stage::Local {
        return Ok(());
    }

    let ob = obstruction_certificate(&fiber, r.local.as_ref().unwrap(), config.sample_count).map_err(|e| fail(Stage::Obstruction, e.to_string()))?;
    let reason = match (&ob.failure, ob.rigorous, ob.conclusion) {
        (Some(f), _, _) => Some(f.clone()),
        (None, false, _) => Some("some invariants are not proposition-backed".to_string()),
        (None, true, false) => Some("no obstruction".to_string()),
        _ => None,
    };
    r.obstruction = Some(ob);
    if let Some(reason) = reason {
        return Err(fail(Stage::Obstruction, reason));
    }
    if last == Stage::Obstruction {
        return Ok(());
    }

    let search = rational_point_search(&fiber.curve, &fiber.surface, config.height_bound).map_err(|e| fail(Stage::PointSearch, e.to_string()))?;
    let found = !search.is_empty();
    r.point_search = Some(search);
    if found {
        return Err(fail(Stage::PointSearch, "a rational point was found".into()));
    }
    if last == Stage::PointSearch || params.g != 1 {
        return Ok(());
    }

    r.j_invariant = Some(j_invariant(&fiber.coeffs).map_err(|e| fail(Stage::JInvariant, e.to_string()))?);
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| HarnessError::Config(e.to_string()))
}

/// Every fiber of the configuration through the stages up to `last`.
pub fn run_stages(config: &RunConfig, last: Stage) -> Result<GlobalReport, HarnessError> {
    config.validate()?;
    let params = config.resolve_params()?;
    let thetas = config.thetas.expand();
    let fibers: Vec<FiberReport> = pool(config.parallelism)?.install(|| thetas.par_iter().map(|t| run_fiber(&params, t, config, last)).collect());
    let certified = fibers.iter().filter(|f| f.certified).count();
    let points_found = fibers.iter().filter_map(|f| f.point_search.as_ref()).map(|s| s.curve_points.len() + s.surface_points.len()).sum();
    let summary = Summary { fibers: fibers.len(), certified, failed: fibers.len() - certified, points_found, last_stage: last };
    Ok(GlobalReport { version: VERSION.to_string(), config: config.clone(), params, fibers, summary })
}

/// Build, smoothness, local certificates, obstruction, point search and (g = 1) j for every fiber.
pub fn run_certify(config: &RunConfig) -> Result<GlobalReport, HarnessError> {
    run_stages(config, Stage::JInvariant)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JRow {
    pub theta: Theta,
    #[serde(with = "rational")]
    pub j: Rational,
    /// A B (A - B)^4.
    #[serde(with = "rational")]
    pub denominator: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JReport {
    pub params: ParamSet,
    pub rows: Vec<JRow>,
    #[serde(with = "dec")]
    pub distinct: usize,
}

/// Exact j-invariants of the genus 1 fibers; at least two distinct values are required when
/// there are at least two fibers.
pub fn report_j_invariants(config: &RunConfig) -> Result<JReport, HarnessError> {
    if config.g != 1 {
        return Err(HarnessError::NotGenusOne(config.g));
    }
    config.validate()?;
    let params = config.resolve_params()?;
    let mut rows = Vec::new();
    for theta in config.thetas.expand() {
        let fiber = Fiber::new(&params, &theta).map_err(|e| HarnessError::Config(format!("theta = {theta}: {e}")))?;
        let (a, b) = (&fiber.coeffs.A, &fiber.coeffs.B);
        let j = j_from(a, b).map_err(|e| HarnessError::Config(format!("theta = {theta}: {e}")))?;
        let e = a - b;
        let e2 = &e * &e;
        rows.push(JRow { theta, j, denominator: a * b * &e2 * &e2 });
    }
    let mut values: Vec<&Rational> = rows.iter().map(|r| &r.j).collect();
    values.sort();
    values.dedup();
    let distinct = values.len();
    if rows.len() >= 2 && distinct < 2 {
        return Err(HarnessError::ConstantJ);
    }
    Ok(JReport { params, rows, distinct })
}
