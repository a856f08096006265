//! Experiment configs: one TOML document per run.
//!
//! ```toml
//! schema = "mdrate/1"
//!
//! [model]
//! kind = "preset"
//! name = "pareto3_centered"
//!
//! [scale]
//! kind = "identity"
//!
//! [experiment]
//! method = "crude"
//! x = [5.0]
//! n_grid = [100, 1000, 10000]
//! reps = 100000
//! seed = 7
//! ```

use mdrate_core::{Method, ScaleFunction, TailModel};
use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::presets::model_preset;

/// Schema tag every config must carry.
pub const SCHEMA: &str = "mdrate/1";

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must equal [`SCHEMA`].
    pub schema: String,
    /// Summand law.
    pub model: ModelSpec,
    /// Scale function; a preset model supplies its own when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleSpec>,
    /// Estimator settings.
    pub experiment: ExperimentSpec,
}

/// Summand law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// A named preset (see `mdrate list-presets`).
    Preset { name: String },
    /// Normal law.
    Gaussian { mean: f64, sd: f64 },
    /// `high` with probability `p_high`, else `low`.
    TwoPoint { low: f64, high: f64, p_high: f64 },
    /// `P(X > t) = (t / scale)^-alpha` for `t >= scale`.
    Pareto {
        alpha: f64,
        scale: f64,
        #[serde(default)]
        centered: bool,
    },
    /// Point mass.
    Constant { value: f64 },
    /// Tails `t^-2 exp(-lambda g(log t))` beyond `t0`, on the config scale.
    Designed {
        lambda_plus: f64,
        lambda_minus: f64,
        t0: f64,
    },
    /// Tail exponent alternating between `lambda_lo` and `lambda_hi`.
    Oscillating {
        lambda_lo: f64,
        lambda_hi: f64,
        growth: f64,
    },
}

/// Scale function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleSpec {
    /// `g(t) = t`.
    Identity,
    /// `g(t) = log(t max 1)`.
    Log,
    /// `g(t) = t^rho`.
    Power { rho: f64 },
    /// `g(t) = t log(t max e)`.
    LinearLog,
    /// `g(t) = t^rho (1 + 1 / log(t max e))`.
    PowerLogCorrected { rho: f64 },
}

/// Estimator choice in a config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    /// Plain Monte Carlo.
    Crude,
    /// Tilted truncated sum.
    Tilted,
    /// Upper and lower truncation bounds.
    Split,
}

impl From<MethodSpec> for Method {
    fn from(m: MethodSpec) -> Method {
        match m {
            MethodSpec::Crude => Method::Crude,
            MethodSpec::Tilted => Method::Tilted,
            MethodSpec::Split => Method::Split,
        }
    }
}

/// Estimator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Estimator.
    pub method: MethodSpec,
    /// Deviation levels.
    pub x: Vec<f64>,
    /// Strictly increasing sample sizes.
    pub n_grid: Vec<u64>,
    /// Replications per grid point, at least 1000.
    pub reps: u64,
    /// Base seed.
    pub seed: u64,
    /// Truncation slack; defaults per method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ScaleSpec {
    /// Builds the scale function.
    pub fn build(&self) -> Result<ScaleFunction, RunError> {
        let g = match *self {
            ScaleSpec::Identity => ScaleFunction::identity(),
            ScaleSpec::Log => ScaleFunction::log_clamp(),
            ScaleSpec::Power { rho } => ScaleFunction::power(rho).map_err(invalid)?,
            ScaleSpec::LinearLog => ScaleFunction::linear_log(),
            ScaleSpec::PowerLogCorrected { rho } => {
                ScaleFunction::power_log_corrected(rho).map_err(invalid)?
            }
        };
        Ok(g)
    }
}

fn invalid(e: mdrate_core::Error) -> RunError {
    RunError::Validation(e.to_string())
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| RunError::Validation(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Canonical TOML form; parses back to an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks the schema tag, grid, rep count, levels and model parameters.
    pub fn validate(&self) -> Result<(), RunError> {
        if self.schema != SCHEMA {
            return Err(RunError::Validation(format!(
                "schema must be \"{SCHEMA}\", got \"{}\"",
                self.schema
            )));
        }
        let e = &self.experiment;
        if e.n_grid.is_empty() {
            return Err(RunError::Validation("n_grid is empty".into()));
        }
        if e.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RunError::Validation(format!(
                "n_grid must be strictly increasing, got {:?}",
                e.n_grid
            )));
        }
        if e.n_grid[0] < 2 {
            return Err(RunError::Validation("n_grid entries must be >= 2".into()));
        }
        if e.reps < 1000 {
            return Err(RunError::Validation(format!(
                "reps must be >= 1000, got {}",
                e.reps
            )));
        }
        if e.x.is_empty() || e.x.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(RunError::Validation(format!(
                "x must be a non-empty list of positive levels, got {:?}",
                e.x
            )));
        }
        if let Some(eps) = e.eps {
            let smallest = e.x.iter().copied().fold(f64::INFINITY, f64::min);
            if !(eps >= 0.0 && eps < smallest) {
                return Err(RunError::Validation(format!(
                    "eps must lie in [0, min x), got {eps}"
                )));
            }
        }
        self.build()?;
        Ok(())
    }

    /// Model and scale for this config.
    pub fn build(&self) -> Result<(TailModel, ScaleFunction), RunError> {
        let scale = self.scale.map(|s| s.build()).transpose()?;
        let g = scale.unwrap_or_else(ScaleFunction::identity);
        let model = match &self.model {
            ModelSpec::Preset { name } => {
                let p = model_preset(name).ok_or_else(|| {
                    RunError::Validation(format!("unknown model preset \"{name}\""))
                })?;
                return Ok((p.model, scale.unwrap_or(p.scale)));
            }
            ModelSpec::Gaussian { mean, sd } => TailModel::gaussian(*mean, *sd),
            ModelSpec::TwoPoint { low, high, p_high } => TailModel::two_point(*low, *high, *p_high),
            ModelSpec::Pareto {
                alpha,
                scale,
                centered,
            } => {
                let m = TailModel::pareto(*alpha, *scale);
                if *centered {
                    m.and_then(|m| m.centered())
                } else {
                    m
                }
            }
            ModelSpec::Constant { value } => TailModel::constant(*value),
            ModelSpec::Designed {
                lambda_plus,
                lambda_minus,
                t0,
            } => TailModel::designed(*lambda_plus, *lambda_minus, g, *t0),
            ModelSpec::Oscillating {
                lambda_lo,
                lambda_hi,
                growth,
            } => TailModel::oscillating(*lambda_lo, *lambda_hi, g, *growth),
        }
        .map_err(invalid)?;
        Ok((model, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
schema = "mdrate/1"

[model]
kind = "designed"
lambda_plus = 1.0
lambda_minus = inf
t0 = 2.718281828459045

[scale]
kind = "power"
rho = 2.0

[experiment]
method = "split"
x = [1.0, 2.5]
n_grid = [100, 1000]
reps = 2000
seed = 42
eps = 0.1
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::from_toml(BASIC).unwrap();
        assert_eq!(c.experiment.method, MethodSpec::Split);
        assert_eq!(c.scale, Some(ScaleSpec::Power { rho: 2.0 }));
        let again = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_bad_grids_and_fields() {
        let bad = BASIC.replace("[100, 1000]", "[1000, 100]");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad),
            Err(RunError::Validation(_))
        ));
        let bad = BASIC.replace("reps = 2000", "reps = 10");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = BASIC.replace("mdrate/1", "mdrate/2");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = BASIC.replace("seed = 42", "seed = 42\nworkers = 3");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = BASIC.replace("eps = 0.1", "eps = 1.0");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = BASIC.replace("lambda_plus = 1.0", "lambda_plus = -1.0");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn preset_models_bring_their_scale() {
        let text = r#"
schema = "mdrate/1"
[model]
kind = "preset"
name = "designed_sq_1.5_3"
[experiment]
method = "crude"
x = [1.0]
n_grid = [10]
reps = 1000
seed = 1
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        let (_, g) = c.build().unwrap();
        assert_eq!(g.rho(), 2.0);
        let unknown = text.replace("designed_sq_1.5_3", "nothing");
        assert!(ExperimentConfig::from_toml(&unknown).is_err());
    }
}
