use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use hasse_core::family::{Fiber, Theta};
use hasse_core::harness::{rational_point_search, report_j_invariants, run_stages, HarnessError, Mode, RunConfig, Stage, ThetaSpec};
use hasse_core::params::{sieve_params, verify_conditions, ConditionReport, ParamSet};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hasse", version, about = "Certified Hasse principle violations for explicit curve and surface families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    g: Option<u32>,
    #[arg(long, global = true)]
    h: Option<u32>,
    /// Fiber parameter: m/n, 0 or inf. Repeat or separate with commas.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<String>,
    /// Height bound for the rational point search.
    #[arg(long, global = true)]
    height: Option<u64>,
    /// Points sampled per place to cross-check the invariants.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// full or theta-zero.
    #[arg(long, global = true)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Search for parameter quadruples (a, b, c, d) and check them.
    SieveParams {
        /// Candidates examined per slot.
        #[arg(long, default_value_t = hasse_core::harness::DEFAULT_SIEVE_BOUND)]
        bound: u64,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Build the fibers and check smoothness.
    Instantiate,
    /// Local solvability certificates at every place.
    CertifyLocal,
    /// Local certificates and the Brauer-Manin obstruction.
    CertifyBrauer,
    /// The full pipeline including the point search and j-invariants.
    CertifyAll,
    /// Bounded search for rational points on the curves and surfaces.
    PointSearch,
    /// Exact j-invariants of genus 1 fibers.
    JReport,
}

/// An error carrying its exit code.
struct Failure(u8, anyhow::Error);

fn config_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure(2, e.into())
}

fn harness_error(e: HarnessError) -> Failure {
    match e {
        HarnessError::ConstantJ => Failure(1, e.into()),
        _ => config_error(e),
    }
}

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut config = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(config_error)?;
            serde_json::from_str::<RunConfig>(&text).with_context(|| format!("parsing {}", path.display())).map_err(config_error)?
        }
        None => {
            let (g, h) = match (c.g, c.h) {
                (Some(g), Some(h)) => (g, h),
                _ => return Err(config_error(anyhow!("--g and --h are required without --config"))),
            };
            RunConfig::new(g, h, c.mode.unwrap_or_default())
        }
    };
    if let Some(g) = c.g {
        config.g = g;
    }
    if let Some(h) = c.h {
        config.h = h;
    }
    if let Some(m) = c.mode {
        if m != config.mode && c.theta.is_empty() && m == Mode::ThetaZero {
            config.thetas = ThetaSpec::List(vec![Theta::zero()]);
        }
        config.mode = m;
    }
    if !c.theta.is_empty() {
        let thetas = c.theta.iter().map(|s| s.parse::<Theta>()).collect::<Result<Vec<_>, _>>().map_err(config_error)?;
        config.thetas = ThetaSpec::List(thetas);
    }
    if let Some(h) = c.height {
        config.height_bound = h;
    }
    if let Some(s) = c.samples {
        config.sample_count = s;
    }
    if let Some(j) = c.jobs {
        config.parallelism = j;
    }
    if let Some(out) = &c.out {
        config.output_path = Some(out.display().to_string());
    }
    config.validate().map_err(harness_error)?;
    Ok(config)
}

fn emit<T: Serialize>(value: &T, out: Option<&str>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure(1, e.into()))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")).map_err(config_error),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SievedParams {
    params: ParamSet,
    conditions: ConditionReport,
}

#[derive(Serialize)]
struct SearchRow {
    theta: Theta,
    result: Option<hasse_core::harness::PointSearchResult>,
    error: Option<String>,
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let common = &cli.common;
    if let Command::SieveParams { bound, count } = cli.command {
        let (g, h) = match (common.g, common.h) {
            (Some(g), Some(h)) => (g, h),
            _ => return Err(config_error(anyhow!("--g and --h are required"))),
        };
        let config = RunConfig::new(g, h, common.mode.unwrap_or_default());
        config.validate().map_err(harness_error)?;
        let found = sieve_params(g, h, &config.omega0(), bound, count).map_err(config_error)?;
        let rows: Vec<SievedParams> = found.into_iter().map(|p| SievedParams { conditions: verify_conditions(&p), params: p }).collect();
        emit(&rows, common.out.as_ref().and_then(|p| p.to_str()))?;
        eprintln!("{} quadruple(s)", rows.len());
        return Ok(rows.iter().all(|r| r.conditions.accepted()));
    }

    let config = load_config(common)?;
    let out = config.output_path.clone();
    let last = match cli.command {
        Command::Instantiate => Stage::Smoothness,
        Command::CertifyLocal => Stage::Local,
        Command::CertifyBrauer => Stage::Obstruction,
        Command::CertifyAll => Stage::JInvariant,
        Command::PointSearch => {
            let params = config.resolve_params().map_err(harness_error)?;
            let rows: Vec<SearchRow> = config
                .thetas
                .expand()
                .into_iter()
                .map(|theta| {
                    let found = Fiber::new(&params, &theta)
                        .map_err(|e| e.to_string())
                        .and_then(|f| rational_point_search(&f.curve, &f.surface, config.height_bound).map_err(|e| e.to_string()));
                    match found {
                        Ok(r) => SearchRow { theta, result: Some(r), error: None },
                        Err(e) => SearchRow { theta, result: None, error: Some(e) },
                    }
                })
                .collect();
            emit(&rows, out.as_deref())?;
            let empty = rows.iter().all(|r| r.result.as_ref().is_some_and(|s| s.is_empty()));
            eprintln!("{} fiber(s), {}", rows.len(), if empty { "no points found" } else { "points found or errors" });
            return Ok(empty);
        }
        Command::JReport => {
            let report = report_j_invariants(&config).map_err(harness_error)?;
            emit(&report, out.as_deref())?;
            eprintln!("{} row(s), {} distinct value(s)", report.rows.len(), report.distinct);
            return Ok(true);
        }
        Command::SieveParams { .. } => unreachable!(),
    };
    let report = run_stages(&config, last).map_err(harness_error)?;
    emit(&report, out.as_deref())?;
    for f in report.fibers.iter().filter(|f| !f.certified) {
        let failure = f.failure.as_ref().map(|x| format!("{}: {}", x.stage, x.reason)).unwrap_or_default();
        eprintln!("theta = {}: failed at {failure}", f.theta);
    }
    eprintln!("{}/{} fiber(s) certified through {}", report.summary.certified, report.summary.fibers, last);
    Ok(report.all_certified())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
