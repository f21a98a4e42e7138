//! Run configuration: built-in defaults, layered config files, and flag
//! overrides (flags always win).
//!
//! Config files are plain `key = value` text — one pair per line, `#`
//! comments, blank lines ignored. Recognized keys are exactly the fields
//! below; anything else is an error rather than a silent typo.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use robustrate_core::simulate::SCENARIO2_REFERENCE_SEED;
use robustrate_core::state::EngineParams;
use robustrate_core::{LevelMapping, ScoreMethod};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected key = value, got {text:?}")]
    Malformed {
        path: String,
        line: usize,
        text: String,
    },
    #[error("{path}:{line}: unknown key {key:?}")]
    UnknownKey {
        path: String,
        line: usize,
        key: String,
    },
    #[error("{path}:{line}: bad value {value:?} for {key}: {reason}")]
    BadValue {
        path: String,
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("source_min, source_max and source_step must be set together")]
    IncompleteScale,
    #[error("levels must be at least 2, got {0}")]
    BadLevels(usize),
    #[error(transparent)]
    Params(#[from] robustrate_core::ParamError),
}

/// Everything a command run needs beyond its own arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub p_exponent: f64,
    /// Items per list for generated and ingested graphs.
    pub levels: usize,
    pub seed: u64,
    /// Which credibility-derived score the sweep compares.
    pub score_method: ScoreMethod,
    /// Source rating scale for ingestion; `None` means the identity scale
    /// `1..=levels`. Config-file keys `source_min`/`source_max`/
    /// `source_step`, settable only together.
    pub source_scale: Option<(f64, f64, f64)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = EngineParams::default();
        Self {
            alpha: p.alpha,
            epsilon: p.epsilon,
            max_iters: p.max_iters,
            p_exponent: p.p_exponent,
            levels: 10,
            seed: SCENARIO2_REFERENCE_SEED,
            score_method: ScoreMethod::default(),
            source_scale: None,
        }
    }
}

impl RunConfig {
    pub fn engine_params(&self) -> EngineParams {
        EngineParams {
            alpha: self.alpha,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            p_exponent: self.p_exponent,
        }
    }

    pub fn level_mapping(&self) -> LevelMapping {
        match self.source_scale {
            Some((min, max, step)) => LevelMapping {
                source_min: min,
                source_max: max,
                source_step: step,
                target_levels: self.levels,
            },
            None => LevelMapping::identity(self.levels),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.levels < 2 {
            return Err(ConfigError::BadLevels(self.levels));
        }
        self.engine_params().validate()?;
        Ok(())
    }

    /// Applies one config file on top of the current values.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        // The three scale keys may arrive in any order; stage them and
        // check completeness at the end.
        let mut staged = self.source_scale.map(Staged::from);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    path: display.clone(),
                    line,
                    text: raw.trim().to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let ctx = ValueCtx {
                path: &display,
                line,
                key,
                value,
            };
            match key {
                "alpha" => self.alpha = ctx.parse()?,
                "epsilon" => self.epsilon = ctx.parse()?,
                "max_iters" => self.max_iters = ctx.parse()?,
                "p_exponent" => self.p_exponent = ctx.parse()?,
                "levels" => self.levels = ctx.parse()?,
                "seed" => self.seed = ctx.parse()?,
                "score_method" => {
                    self.score_method = match value {
                        "weighted" => ScoreMethod::Weighted,
                        "max_credibility" => ScoreMethod::MaxCredibility,
                        _ => {
                            return Err(ctx.bad("expected weighted or max_credibility"));
                        }
                    }
                }
                "source_min" => staged.get_or_insert_with(Staged::default).min = Some(ctx.parse()?),
                "source_max" => staged.get_or_insert_with(Staged::default).max = Some(ctx.parse()?),
                "source_step" => {
                    staged.get_or_insert_with(Staged::default).step = Some(ctx.parse()?)
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        path: display.clone(),
                        line,
                        key: key.to_string(),
                    });
                }
            }
        }
        if let Some(staged) = staged {
            match (staged.min, staged.max, staged.step) {
                (Some(min), Some(max), Some(step)) => self.source_scale = Some((min, max, step)),
                _ => return Err(ConfigError::IncompleteScale),
            }
        }
        Ok(())
    }
}

/// Partially specified source scale while a file is being read.
#[derive(Debug, Default, Clone, Copy)]
struct Staged {
    min: Option<f64>,
    max: Option<f64>,
    step: Option<f64>,
}

impl From<(f64, f64, f64)> for Staged {
    fn from((min, max, step): (f64, f64, f64)) -> Self {
        Self {
            min: Some(min),
            max: Some(max),
            step: Some(step),
        }
    }
}

/// One key/value occurrence, carrying enough context for an exact error.
struct ValueCtx<'a> {
    path: &'a str,
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl ValueCtx<'_> {
    fn parse<T: std::str::FromStr>(&self) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.value
            .parse()
            .map_err(|e: T::Err| self.bad(&e.to_string()))
    }

    fn bad(&self, reason: &str) -> ConfigError {
        ConfigError::BadValue {
            path: self.path.to_string(),
            line: self.line,
            key: self.key.to_string(),
            value: self.value.to_string(),
            reason: reason.to_string(),
        }
    }
}
