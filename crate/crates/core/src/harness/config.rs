use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ensemble::Ensemble;
use super::{HarnessError, Result};
use crate::funcalc::{Domain, ScalarFunction};
use crate::{Tolerances, C64};

pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Stacking,
    Thm1,
    Thm3,
    Thm4,
    Commuting,
    HypothesisTransfer,
    LipschitzProbe,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Stacking,
        Suite::Thm1,
        Suite::Thm3,
        Suite::Thm4,
        Suite::Commuting,
        Suite::HypothesisTransfer,
        Suite::LipschitzProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stacking => "stacking",
            Suite::Thm1 => "thm1",
            Suite::Thm3 => "thm3",
            Suite::Thm4 => "thm4",
            Suite::Commuting => "commuting",
            Suite::HypothesisTransfer => "hypothesis-transfer",
            Suite::LipschitzProbe => "lipschitz-probe",
        }
    }

    /// Probe suites report measurements and never fail.
    pub fn is_probe(self) -> bool {
        self == Suite::LipschitzProbe
    }

    pub fn default_ensemble(self) -> Ensemble {
        match self {
            Suite::Commuting => Ensemble::CommutingDiagonalPair,
            _ => Ensemble::HermitianGaussian,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub seed: u64,
    pub dim1: usize,
    pub dim2: usize,
    pub ensemble: Ensemble,
    pub function_name: String,
    pub trials: usize,
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub eps_grid: Option<Vec<C64>>,
    /// Worker threads. Never part of the report.
    pub parallel: usize,
}

impl TrialConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            seed: 0,
            dim1: 4,
            dim2: 4,
            ensemble: suite.default_ensemble(),
            function_name: "square".into(),
            trials: 100,
            tolerance_overrides: BTreeMap::new(),
            eps_grid: None,
            parallel: 1,
        }
    }
}

/// A configuration that passed validation, with everything resolved.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub suite: Suite,
    pub config: TrialConfig,
    pub function: ScalarFunction,
    pub tolerances: Tolerances,
}

fn reject<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Config(msg.into()))
}

/// Every check that can fail before a trial runs.
pub fn validate(config: &TrialConfig, suite: Suite) -> Result<ValidatedConfig> {
    for (name, d) in [("dim1", config.dim1), ("dim2", config.dim2)] {
        if !(1..=MAX_DIM).contains(&d) {
            return reject(format!("{name} = {d} is outside 1..={MAX_DIM}"));
        }
    }
    if config.trials == 0 {
        return reject("trials must be at least 1");
    }
    if config.parallel == 0 {
        return reject("parallel must be at least 1");
    }
    let function: ScalarFunction = config
        .function_name
        .parse()
        .map_err(|e: crate::funcalc::FuncalcError| HarnessError::Config(e.to_string()))?;

    let mut tolerances = Tolerances::default();
    for (name, &value) in &config.tolerance_overrides {
        tolerances
            .set(name, value)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }

    if let Some(grid) = &config.eps_grid {
        if grid.is_empty() {
            return reject("eps grid is empty");
        }
        for eps in grid {
            if !(eps.re.is_finite() && eps.im.is_finite()) {
                return reject(format!("eps grid entry {eps} is not finite"));
            }
            if eps.norm() == 0.0 {
                return reject("eps grid contains 0; the shift must be nonzero");
            }
            match function.domain() {
                Domain::NonNegativeReal if eps.im != 0.0 || eps.re < 0.0 => {
                    return reject(format!("{} needs real positive shifts, got {eps}", function.name()))
                }
                Domain::Real if eps.im != 0.0 => {
                    return reject(format!("{} needs real shifts, got {eps}", function.name()))
                }
                _ => {}
            }
        }
    }

    if function.domain() != Domain::Entire && !config.ensemble.real_spectrum() {
        return reject(format!(
            "{} is only defined on real spectra; use hermitian-gaussian or commuting-diagonal-pair",
            function.name()
        ));
    }
    match suite {
        Suite::HypothesisTransfer if !function.is_polynomial() => {
            return reject(format!(
                "no constructive bound for {}; use lipschitz-probe instead",
                function.name()
            ))
        }
        Suite::Commuting if config.ensemble != Ensemble::CommutingDiagonalPair => {
            return reject("commuting needs the commuting-diagonal-pair ensemble")
        }
        Suite::Commuting if config.dim1 != config.dim2 => {
            return reject("commuting needs dim1 == dim2")
        }
        _ => {}
    }

    Ok(ValidatedConfig { suite, config: config.clone(), function, tolerances })
}

/// Parses `a,b,c` into complex shifts (`0.5`, `-1e-3`, `0.2i`, `1+1i`).
pub fn parse_eps_grid(list: &str) -> Result<Vec<C64>> {
    list.split(',')
        .map(|t| {
            let t = t.trim();
            C64::from_str(t).map_err(|_| HarnessError::Config(format!("bad eps grid entry `{t}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(suite: Suite) -> TrialConfig {
        TrialConfig::new(suite)
    }

    #[test]
    fn default_config_is_valid_for_every_suite() {
        for s in Suite::ALL {
            validate(&cfg(s), s).unwrap();
        }
    }

    #[test]
    fn zero_shift_rejected() {
        let mut c = cfg(Suite::Thm3);
        c.eps_grid = Some(vec![C64::new(0.1, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(validate(&c, Suite::Thm3), Err(HarnessError::Config(_))));
    }

    #[test]
    fn bounds_and_domains() {
        let mut c = cfg(Suite::Thm1);
        c.dim1 = 65;
        assert!(validate(&c, Suite::Thm1).is_err());
        let mut c = cfg(Suite::Thm1);
        c.trials = 0;
        assert!(validate(&c, Suite::Thm1).is_err());
        let mut c = cfg(Suite::Thm1);
        c.function_name = "tan".into();
        assert!(validate(&c, Suite::Thm1).is_err());
        let mut c = cfg(Suite::Thm1);
        c.function_name = "sqrt".into();
        c.ensemble = Ensemble::NormalRandom;
        assert!(validate(&c, Suite::Thm1).is_err());
        let mut c = cfg(Suite::Thm3);
        c.function_name = "sqrt".into();
        c.eps_grid = Some(vec![C64::new(-0.5, 0.0)]);
        assert!(validate(&c, Suite::Thm3).is_err());
        let mut c = cfg(Suite::HypothesisTransfer);
        c.function_name = "exp".into();
        assert!(validate(&c, Suite::HypothesisTransfer).is_err());
        let mut c = cfg(Suite::Commuting);
        c.dim2 = 3;
        assert!(validate(&c, Suite::Commuting).is_err());
        let mut c = cfg(Suite::Thm1);
        c.tolerance_overrides.insert("nonsense".into(), 1.0);
        assert!(validate(&c, Suite::Thm1).is_err());
    }

    #[test]
    fn eps_grid_parsing() {
        let g = parse_eps_grid("1e-3, -0.5,0.2i,1+1i").unwrap();
        assert_eq!(g, vec![C64::new(1e-3, 0.0), C64::new(-0.5, 0.0), C64::new(0.0, 0.2), C64::new(1.0, 1.0)]);
        assert!(parse_eps_grid("1,x").is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }
}
