use super::HarnessError;
use crate::arith::primes_up_to;
use crate::family::Theta;
use crate::json::dec;
use crate::params::{omega0_for_genus, sieve_params, verify_conditions, ParamSet};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_HEIGHT: u64 = 1000;
pub const DEFAULT_SIEVE_BOUND: u64 = 10_000_000;
/// Largest Omega0 prime used by the theta-zero mode.
pub const THETA_ZERO_OMEGA_CAP: u64 = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every theta in the list, for g = 1 mod 4 with (g + 1) | (4h + 2).
    #[default]
    Full,
    /// Only theta = 0, for any odd g.
    ThetaZero,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::ThetaZero => "theta-zero",
        })
    }
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "theta-zero" => Ok(Mode::ThetaZero),
            _ => Err(HarnessError::Config(format!("unknown mode {s:?} (expected full or theta-zero)"))),
        }
    }
}

/// Explicit thetas or the grid {m/n : num_min <= m <= num_max, 1 <= n <= den_max}, optionally with 0 and inf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSpec {
    List(Vec<Theta>),
    Grid {
        #[serde(with = "dec")]
        num_min: i64,
        #[serde(with = "dec")]
        num_max: i64,
        #[serde(with = "dec")]
        den_max: i64,
        include_zero_and_infinity: bool,
    },
}

impl Default for ThetaSpec {
    fn default() -> Self {
        ThetaSpec::Grid { num_min: -3, num_max: 3, den_max: 3, include_zero_and_infinity: true }
    }
}

impl ThetaSpec {
    /// Distinct thetas in a fixed order: 0 and inf first, then by denominator and numerator.
    pub fn expand(&self) -> Vec<Theta> {
        let mut out: Vec<Theta> = Vec::new();
        let mut push = |t: Theta| {
            if !out.contains(&t) {
                out.push(t);
            }
        };
        match self {
            ThetaSpec::List(ts) => ts.iter().cloned().for_each(&mut push),
            ThetaSpec::Grid { num_min, num_max, den_max, include_zero_and_infinity } => {
                if *include_zero_and_infinity {
                    push(Theta::zero());
                    push(Theta::Infinity);
                }
                for n in 1..=*den_max {
                    for m in *num_min..=*num_max {
                        if m.gcd(&n) == 1 && (m != 0 || *include_zero_and_infinity) {
                            push(Theta::ratio(m, n));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    Explicit(ParamSet),
    /// The `index`-th quadruple returned by the sieve with the given candidate budget.
    Sieve {
        #[serde(with = "dec")]
        bound: u64,
        #[serde(with = "dec")]
        index: usize,
    },
}

impl Default for ParamSource {
    fn default() -> Self {
        ParamSource::Sieve { bound: DEFAULT_SIEVE_BOUND, index: 0 }
    }
}

fn default_height() -> u64 {
    DEFAULT_HEIGHT
}

fn default_samples() -> usize {
    crate::brauer::DEFAULT_SAMPLES
}

fn default_parallelism() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(with = "dec")]
    pub g: u32,
    #[serde(with = "dec")]
    pub h: u32,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub thetas: ThetaSpec,
    #[serde(default)]
    pub params: ParamSource,
    #[serde(default = "default_height", with = "dec")]
    pub height_bound: u64,
    #[serde(default = "default_samples", with = "dec")]
    pub sample_count: usize,
    /// Worker threads; 0 uses every available core.
    #[serde(default = "default_parallelism", with = "dec")]
    pub parallelism: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl RunConfig {
    pub fn new(g: u32, h: u32, mode: Mode) -> Self {
        let thetas = match mode {
            Mode::Full => ThetaSpec::default(),
            Mode::ThetaZero => ThetaSpec::List(vec![Theta::zero()]),
        };
        RunConfig {
            g,
            h,
            mode,
            thetas,
            params: ParamSource::default(),
            height_bound: DEFAULT_HEIGHT,
            sample_count: default_samples(),
            parallelism: 1,
            output_path: None,
        }
    }

    /// Rejects a configuration outside the hypotheses of its mode, naming the failing one.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |s: String| Err(HarnessError::Config(s));
        let (g, h) = (self.g as u64, self.h as u64);
        match self.mode {
            Mode::Full => {
                if g % 4 != 1 {
                    return bad(format!("full mode requires g = 1 mod 4, got g = {g}"));
                }
                if (4 * h + 2) % (g + 1) != 0 {
                    return bad(format!("full mode requires (g + 1) | (4h + 2), got g + 1 = {} and 4h + 2 = {}", g + 1, 4 * h + 2));
                }
            }
            Mode::ThetaZero => {
                if g % 2 == 0 {
                    return bad(format!("theta-zero mode requires odd g, got g = {g}"));
                }
                if self.thetas.expand() != [Theta::zero()] {
                    return bad("theta-zero mode requires the theta list to be exactly {0}".into());
                }
            }
        }
        if self.thetas.expand().is_empty() {
            return bad("the theta list is empty".into());
        }
        if self.height_bound == 0 {
            return Err(HarnessError::Height);
        }
        if self.sample_count == 0 {
            return bad("sample_count must be at least 1".into());
        }
        if let ParamSource::Explicit(ps) = &self.params {
            if (ps.g, ps.h) != (self.g, self.h) {
                return bad(format!("explicit parameters are for (g, h) = ({}, {}), config has ({}, {})", ps.g, ps.h, self.g, self.h));
            }
            let report = verify_conditions(ps);
            if !report.accepted() {
                let ids: Vec<&str> = report.failures().iter().map(|e| e.id.as_str()).collect();
                return bad(format!("explicit parameters fail conditions {}", ids.join(", ")));
            }
        }
        Ok(())
    }

    /// The Omega0 set used by the sieve.
    pub fn omega0(&self) -> Vec<u64> {
        match self.mode {
            Mode::Full => omega0_for_genus(self.g),
            Mode::ThetaZero => {
                let cap = (4 * self.g as u64 * self.g as u64).min(THETA_ZERO_OMEGA_CAP);
                primes_up_to(cap).into_iter().filter(|&p| p != 2).collect()
            }
        }
    }

    pub fn resolve_params(&self) -> Result<ParamSet, HarnessError> {
        match &self.params {
            ParamSource::Explicit(ps) => Ok(ps.clone()),
            ParamSource::Sieve { bound, index } => {
                let mut all = sieve_params(self.g, self.h, &self.omega0(), *bound, index + 1)?;
                if all.len() <= *index {
                    return Err(HarnessError::Config(format!("the sieve returned {} quadruples, index {index} requested", all.len())));
                }
                Ok(all.swap_remove(*index))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::params_g1;

    #[test]
    fn default_grid_has_sixteen_fibers() {
        let ts = ThetaSpec::default().expand();
        assert_eq!(ts.len(), 16);
        assert_eq!(&ts[..2], &[Theta::zero(), Theta::Infinity]);
        assert!(ts.contains(&Theta::ratio(-3, 2)) && !ts.contains(&Theta::ratio(4, 3)));
    }

    #[test]
    fn mode_hypotheses() {
        assert!(RunConfig::new(1, 0, Mode::Full).validate().is_ok());
        assert!(RunConfig::new(5, 1, Mode::Full).validate().is_ok());
        let e = RunConfig::new(3, 0, Mode::Full).validate().unwrap_err().to_string();
        assert!(e.contains("g = 1 mod 4"), "{e}");
        let e = RunConfig::new(5, 0, Mode::Full).validate().unwrap_err().to_string();
        assert!(e.contains("(g + 1) | (4h + 2)"), "{e}");
        assert!(RunConfig::new(3, 0, Mode::ThetaZero).validate().is_ok());
        assert!(RunConfig::new(2, 0, Mode::ThetaZero).validate().unwrap_err().to_string().contains("odd g"));
        let mut c = RunConfig::new(3, 0, Mode::ThetaZero);
        c.thetas = ThetaSpec::List(vec![Theta::zero(), Theta::ratio(1, 1)]);
        assert!(c.validate().unwrap_err().to_string().contains("exactly {0}"));
        let mut c = RunConfig::new(1, 0, Mode::Full);
        c.height_bound = 0;
        assert_eq!(c.validate(), Err(HarnessError::Height));
    }

    #[test]
    fn explicit_params_are_checked() {
        let mut c = RunConfig::new(1, 0, Mode::Full);
        c.params = ParamSource::Explicit(params_g1());
        assert!(c.validate().is_ok());
        let mut bad = params_g1();
        bad.d += 1;
        c.params = ParamSource::Explicit(bad);
        assert!(c.validate().unwrap_err().to_string().contains("fail conditions"));
        c.h = 1;
        assert!(c.validate().unwrap_err().to_string().contains("(g, h)"));
    }

    #[test]
    fn config_json_uses_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"g": "1", "h": "0"}"#).unwrap();
        assert_eq!(c, RunConfig::new(1, 0, Mode::Full));
        let c: RunConfig = serde_json::from_str(r#"{"g": "3", "h": "0", "mode": "theta-zero", "thetas": {"list": ["0"]}, "params": {"sieve": {"bound": "1000", "index": "2"}}}"#).unwrap();
        assert_eq!(c.mode, Mode::ThetaZero);
        assert_eq!(c.params, ParamSource::Sieve { bound: 1000, index: 2 });
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
    }

    #[test]
    fn theta_zero_omega_is_capped() {
        assert_eq!(RunConfig::new(3, 0, Mode::ThetaZero).omega0(), omega0_for_genus(3));
        assert_eq!(RunConfig::new(7, 0, Mode::ThetaZero).omega0().last(), Some(&97));
    }
}
