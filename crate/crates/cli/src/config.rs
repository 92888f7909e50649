use std::fs;
use std::path::{Path, PathBuf};

use mvno_pricing::grid::GridSpec;
use mvno_pricing::{game, Market, MarketParams, MnoId, ModelError, Scenario};
use serde::Deserialize;
use thiserror::Error;

use crate::Options;

/// Refinement rounds used by every grid search the CLI runs.
pub const GRID_REFINEMENTS: usize = 3;
pub const DEFAULT_GRID_RESOLUTION: usize = 801;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid market: {0}")]
    Market(#[from] ModelError),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Top-level JSON document.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub market: MarketParams,
    #[serde(default)]
    pub run: RunSection,
}

/// Command parameters; each may be overridden on the command line.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scenario: Option<String>,
    pub leader: Option<u8>,
    pub sweep: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub grid_resolution: Option<usize>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Gamma,
    R0,
    Eps,
}

impl SweepVar {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name {
            "gamma" => Ok(SweepVar::Gamma),
            "r0" => Ok(SweepVar::R0),
            "eps" => Ok(SweepVar::Eps),
            other => Err(invalid(format!("unknown sweep variable `{other}` (expected gamma, r0 or eps)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Gamma => "gamma",
            SweepVar::R0 => "r0",
            SweepVar::Eps => "eps",
        }
    }

    pub fn apply(self, params: MarketParams, value: f64) -> MarketParams {
        match self {
            SweepVar::Gamma => params.with_gamma(value),
            SweepVar::R0 => params.with_r0(value),
            SweepVar::Eps => params.with_eps(value),
        }
    }

    fn check(self, value: f64) -> Result<(), ConfigError> {
        let ok = value.is_finite()
            && match self {
                SweepVar::Gamma => (0.0..=mvno_pricing::market::MAX_GAMMA).contains(&value),
                SweepVar::R0 => value >= 0.0,
                SweepVar::Eps => value > 0.0,
            };
        if ok {
            Ok(())
        } else {
            let domain = match self {
                SweepVar::Gamma => "[0, 0.999]",
                SweepVar::R0 => "[0, inf)",
                SweepVar::Eps => "(0, inf)",
            };
            Err(invalid(format!("sweep value {value} of {} outside {domain}", self.name())))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == last {
                    self.to
                } else {
                    self.from + (self.to - self.from) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// Scenario as named on the command line; the leader is resolved per market.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioChoice {
    PartNonPart(MnoId),
    PartPartFs(Option<MnoId>),
    PartPartPs,
    NonPartNonPart,
}

impl ScenarioChoice {
    pub fn parse(name: &str, leader: Option<MnoId>) -> Result<Self, ConfigError> {
        Ok(match name {
            "part-nonpart-1" => ScenarioChoice::PartNonPart(MnoId::One),
            "part-nonpart-2" => ScenarioChoice::PartNonPart(MnoId::Two),
            "part-part-fs" => ScenarioChoice::PartPartFs(leader),
            "part-part-ps" => ScenarioChoice::PartPartPs,
            "nonpart-nonpart" => ScenarioChoice::NonPartNonPart,
            other => return Err(invalid(format!("unknown scenario `{other}`"))),
        })
    }

    pub fn resolve(self, m: &Market) -> Scenario {
        match self {
            ScenarioChoice::PartNonPart(p) => Scenario::PartNonPart(p),
            ScenarioChoice::PartPartFs(l) => Scenario::PartPartFs(l.unwrap_or_else(|| game::default_leader(m))),
            ScenarioChoice::PartPartPs => Scenario::PartPartPs,
            ScenarioChoice::NonPartNonPart => Scenario::NonPartNonPart,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: MarketParams,
    pub tolerance: f64,
    pub scenario: Option<ScenarioChoice>,
    pub leader: Option<MnoId>,
    pub sweep: Option<SweepSpec>,
    pub grid: GridSpec,
    pub out: Option<PathBuf>,
    pub perturbation: f64,
}

impl RunConfig {
    /// Merges the config file (reference market when absent) with the
    /// command-line flags, which take precedence.
    pub fn from_options(opts: &Options) -> Result<Self, ConfigError> {
        let file = match &opts.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile {
                market: MarketParams::reference(),
                run: RunSection::default(),
            },
        };
        let run = file.run;
        let leader = match opts.leader.or(run.leader) {
            Some(n) => Some(MnoId::try_from(n).map_err(invalid)?),
            None => None,
        };
        let scenario = opts
            .scenario
            .as_deref()
            .or(run.scenario.as_deref())
            .map(|s| ScenarioChoice::parse(s, leader))
            .transpose()?;

        let tolerance = opts.tolerance.or(run.tolerance).unwrap_or(mvno_pricing::market::DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tolerance}")));
        }
        let resolution = opts
            .grid_resolution
            .or(run.grid_resolution)
            .unwrap_or(DEFAULT_GRID_RESOLUTION);
        let grid = GridSpec::new(resolution, GRID_REFINEMENTS);
        grid.validate().map_err(|e| invalid(e.to_string()))?;

        let sweep = match opts.sweep.as_deref().or(run.sweep.as_deref()) {
            None => None,
            Some(name) => {
                let var = SweepVar::parse(name)?;
                let from = opts.from.or(run.from).ok_or_else(|| invalid("sweep needs --from"))?;
                let to = opts.to.or(run.to).ok_or_else(|| invalid("sweep needs --to"))?;
                let steps = opts.steps.or(run.steps).ok_or_else(|| invalid("sweep needs --steps"))?;
                if steps < 2 {
                    return Err(invalid(format!("sweep needs at least 2 steps, got {steps}")));
                }
                var.check(from)?;
                var.check(to)?;
                Some(SweepSpec { var, from, to, steps })
            }
        };

        file.market.validate()?;
        Ok(RunConfig {
            params: file.market,
            tolerance,
            scenario,
            leader,
            sweep,
            grid,
            out: opts.out.clone().or(run.out),
            perturbation: opts.perturb_closed_form.unwrap_or(0.0),
        })
    }

    pub fn market(&self, params: MarketParams) -> Result<Market, ConfigError> {
        Ok(Market::new(params)?.with_tolerance(self.tolerance))
    }

    pub fn require_scenario(&self) -> Result<ScenarioChoice, ConfigError> {
        self.scenario.ok_or_else(|| invalid("a scenario is required (--scenario)"))
    }

    pub fn require_sweep(&self) -> Result<&SweepSpec, ConfigError> {
        self.sweep.as_ref().ok_or_else(|| invalid("a sweep variable is required (--sweep)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_values_hit_both_ends() {
        let s = SweepSpec {
            var: SweepVar::Gamma,
            from: 0.0,
            to: 0.95,
            steps: 20,
        };
        let v = s.values();
        assert_eq!(v.len(), 20);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[19], 0.95);
    }

    #[test]
    fn parses_reference_config() {
        let text = r#"{"market": {"q1": 600, "q2": 400, "p1": 40, "p2": 30, "c1": 8, "c2": 6,
            "ct1": 4, "ct2": 3, "cf1": 0, "cf2": 0, "eps": 0.5, "gamma": 0.4, "r0": 10,
            "ct0": 2, "cf0": 0}, "run": {"scenario": "part-part-fs", "leader": 1}}"#;
        let cfg: ConfigFile = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.market, MarketParams::reference());
        assert_eq!(cfg.run.leader, Some(1));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{"market": {"q1": 600, "q2": 400, "p1": 40, "p2": 30, "c1": 8, "c2": 6,
            "ct1": 4, "ct2": 3, "cf1": 0, "cf2": 0, "eps": 0.5, "gamma": 0.4, "r0": 10,
            "ct0": 2, "cf0": 0, "q3": 1}}"#;
        assert!(serde_json::from_str::<ConfigFile>(text).is_err());
        let text = r#"{"market": {"q1": 600, "q2": 400, "p1": 40, "p2": 30, "c1": 8, "c2": 6,
            "ct1": 4, "ct2": 3, "cf1": 0, "cf2": 0, "eps": 0.5, "gamma": 0.4, "r0": 10,
            "ct0": 2, "cf0": 0}, "run": {"scenaro": "part-part-ps"}}"#;
        assert!(serde_json::from_str::<ConfigFile>(text).is_err());
    }

    #[test]
    fn scenario_names() {
        assert_eq!(
            ScenarioChoice::parse("part-nonpart-2", None).unwrap(),
            ScenarioChoice::PartNonPart(MnoId::Two)
        );
        assert!(ScenarioChoice::parse("part-part", None).is_err());
        let m = Market::reference();
        assert_eq!(
            ScenarioChoice::parse("part-part-fs", None).unwrap().resolve(&m),
            Scenario::PartPartFs(MnoId::One)
        );
    }

    #[test]
    fn sweep_domains() {
        assert!(SweepVar::Gamma.check(1.0).is_err());
        assert!(SweepVar::Gamma.check(0.999).is_ok());
        assert!(SweepVar::R0.check(-0.1).is_err());
        assert!(SweepVar::Eps.check(0.0).is_err());
    }
}
