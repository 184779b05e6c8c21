//! `key = value` run configuration.

use std::path::PathBuf;

use dpring::algebra::Field;
use dpring::construction::{Budget, ConstructionParams, SwapRule};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

/// Everything a run needs. Campaign knobs left unset fall back to
/// per-campaign defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub b: u64,
    pub r: u64,
    pub k_max: u32,
    pub field: Field,
    pub swap_rule: SwapRule,
    pub seed: u64,
    pub max_expansion_m: u64,
    pub max_component_dim: u128,
    pub max_spanning_set: u128,
    pub cross_check_dim: u128,
    pub output: Option<PathBuf>,
    pub extra_fields: Vec<Field>,
    pub embed_certificates: bool,
    pub k: Option<u32>,
    pub h: Option<u64>,
    pub trials: Option<usize>,
    pub m_max: Option<u64>,
    pub degree_cap: Option<u64>,
    pub lengths: Option<Vec<usize>>,
    pub dimension: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let budget = Budget::default();
        RunConfig {
            b: 10,
            r: 3,
            k_max: 1,
            field: Field::Rationals,
            swap_rule: SwapRule::AllowZero,
            seed: 0x5eed,
            max_expansion_m: dpring::ore::DEFAULT_EXPANSION_BUDGET,
            max_component_dim: budget.max_component_dim,
            max_spanning_set: budget.max_spanning_set,
            cross_check_dim: 0,
            output: None,
            extra_fields: Vec::new(),
            embed_certificates: false,
            k: None,
            h: None,
            trials: None,
            m_max: None,
            degree_cap: None,
            lengths: None,
            dimension: None,
        }
    }
}

fn value<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("`{raw}` is not a valid value for `{key}`"),
    })
}

fn list<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<Vec<T>, ConfigError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| value(line, key, s))
        .collect()
}

fn field(line: usize, raw: &str) -> Result<Field, ConfigError> {
    Field::parse(raw).map_err(|e| ConfigError::Parse {
        line,
        message: e.to_string(),
    })
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment. The result is
    /// validated before it is returned.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut prime: Option<u64> = None;
        let mut field_name: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, val)) = content.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let (key, val) = (key.trim(), val.trim());
            match key {
                "b" => cfg.b = value(line, key, val)?,
                "r" => cfg.r = value(line, key, val)?,
                "k_max" => cfg.k_max = value(line, key, val)?,
                "field" => field_name = Some(val.to_string()),
                "prime" => prime = Some(value(line, key, val)?),
                "swap_rule" => {
                    cfg.swap_rule = match val {
                        "allow_zero" => SwapRule::AllowZero,
                        "positive_only" => SwapRule::PositiveOnly,
                        _ => {
                            return Err(ConfigError::Parse {
                                line,
                                message: format!("swap_rule must be allow_zero or positive_only, found `{val}`"),
                            })
                        }
                    }
                }
                "seed" => cfg.seed = value(line, key, val)?,
                "max_expansion_m" => cfg.max_expansion_m = value(line, key, val)?,
                "max_component_dim" => cfg.max_component_dim = value(line, key, val)?,
                "max_spanning_set" => cfg.max_spanning_set = value(line, key, val)?,
                "cross_check_dim" => cfg.cross_check_dim = value(line, key, val)?,
                "output" => cfg.output = Some(PathBuf::from(val)),
                "extra_fields" => {
                    cfg.extra_fields = val
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| field(line, s))
                        .collect::<Result<_, _>>()?
                }
                "embed_certificates" => cfg.embed_certificates = value(line, key, val)?,
                "k" => cfg.k = Some(value(line, key, val)?),
                "h" => cfg.h = Some(value(line, key, val)?),
                "trials" => cfg.trials = Some(value(line, key, val)?),
                "m_max" => cfg.m_max = Some(value(line, key, val)?),
                "degree_cap" => cfg.degree_cap = Some(value(line, key, val)?),
                "lengths" => cfg.lengths = Some(list(line, key, val)?),
                "dimension" => cfg.dimension = Some(value(line, key, val)?),
                _ => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        cfg.field = match (field_name.as_deref(), prime) {
            (None, None) => Field::Rationals,
            (None, Some(p)) | (Some("gf"), Some(p)) => Field::prime(p)
                .map_err(|e| ConfigError::Validation(e.to_string()))?,
            (Some("gf"), None) => {
                return Err(ConfigError::Validation("field = gf needs `prime`".into()))
            }
            (Some(name), _) => {
                Field::parse(name).map_err(|e| ConfigError::Validation(e.to_string()))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params().map(|_| ())
    }

    pub fn params(&self) -> Result<ConstructionParams, ConfigError> {
        ConstructionParams::new(self.b, self.r, self.k_max, self.field)
            .map(|p| p.with_swap_rule(self.swap_rule))
            .map_err(|e| ConfigError::Validation(e.to_string()))
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_component_dim: self.max_component_dim,
            max_spanning_set: self.max_spanning_set,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        let d = RunConfig::default();
        assert_eq!((d.b, d.r, d.k_max, d.field), (10, 3, 1, Field::Rationals));
    }

    #[test]
    fn original_constants() {
        let cfg = RunConfig::parse("b = 100\nr = 3\nk_max = 1\n").unwrap();
        assert_eq!((cfg.b, cfg.r, cfg.k_max), (100, 3, 1));
    }

    #[test]
    fn b_below_two_is_rejected() {
        let err = RunConfig::parse("b = 1").unwrap_err();
        assert!(matches!(err, ConfigError::Validation(ref m) if m.contains("b >= 2")));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = RunConfig::parse("b = 10\n# comment\ncolour = red\n").unwrap_err();
        assert_eq!(err, ConfigError::Parse { line: 3, message: "unknown key `colour`".into() });
        let err = RunConfig::parse("r = three").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = RunConfig::parse("just words").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
    }

    #[test]
    fn fields_and_lists() {
        let cfg = RunConfig::parse("field = gf\nprime = 3\nlengths = 20, 30\nextra_fields = gf2, gf3").unwrap();
        assert_eq!(cfg.field, Field::Prime(3));
        assert_eq!(cfg.lengths, Some(vec![20, 30]));
        assert_eq!(cfg.extra_fields, vec![Field::Prime(2), Field::Prime(3)]);
        assert!(RunConfig::parse("prime = 4").is_err());
    }

    #[test]
    fn monotonicity_violation_is_a_validation_error() {
        let err = RunConfig::parse("b = 2\nr = 3\nk_max = 2").unwrap_err();
        assert!(matches!(err, ConfigError::Validation(_)));
    }
}
