//! Flat `key = value` config files plus CLI override merging.
//!
//! Precedence is built-in defaults, then the config file, then CLI flags.
//! Unknown keys are hard errors so typos cannot silently fall back to a
//! default.

use std::path::{Path, PathBuf};

use thiserror::Error;

use asian_impact::{ImpactSpec, MarketSpec, MethodChoice, RateConvention};

use crate::sweep::SweepAxis;

pub const VALID_KEYS: [&str; 18] = [
    "s0", "strike", "u", "d", "rate", "rate_convention", "n", "lambda", "vu", "vd", "method",
    "cap", "axis", "from", "to", "points", "regime", "out",
];

pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config file {path} is not valid UTF-8")]
    Utf8 { path: String },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}` (valid keys: {})", VALID_KEYS.join(", "))]
    UnknownKey { key: String, line: usize },
    #[error("config line {line}: key `{key}` expects {expected}, got `{value}`")]
    TypeError { key: String, value: String, expected: &'static str, line: usize },
    #[error("missing required parameter(s): {0} (set via CLI flags or a config file)")]
    MissingRequired(String),
    #[error("{0}")]
    Invalid(String),
}

/// Preset hedging-volume pairs (v_u, v_d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    UpBiased,
    DownBiased,
    Symmetric,
}

impl Regime {
    pub fn volumes(self) -> (f64, f64) {
        match self {
            Regime::UpBiased => (1.3, 1.0),
            Regime::DownBiased => (1.0, 1.3),
            Regime::Symmetric => (1.0, 1.0),
        }
    }
}

/// One layer of configuration: every field optional so layers can be merged
/// before resolution fills in defaults and checks required fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub s0: Option<f64>,
    pub strike: Option<f64>,
    pub u: Option<f64>,
    pub d: Option<f64>,
    pub rate: Option<f64>,
    pub rate_convention: Option<RateConvention>,
    pub n: Option<u32>,
    pub lambda: Option<f64>,
    pub vu: Option<f64>,
    pub vd: Option<f64>,
    pub method: Option<MethodChoice>,
    pub cap: Option<u32>,
    pub axis: Option<SweepAxis>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<u32>,
    pub regime: Option<Regime>,
    pub out: Option<PathBuf>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let bytes = std::fs::read(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let text = String::from_utf8(bytes)
            .map_err(|_| ConfigError::Utf8 { path: path.display().to_string() })?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines. `#` starts a comment anywhere in a line;
    /// blank lines are skipped; a repeated key keeps the last value.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed { line, text: content.to_string() });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Malformed { line, text: content.to_string() });
            }
            config.set(key, value, line)?;
        }
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        match key {
            "s0" => self.s0 = Some(parse_number(key, value, line)?),
            "strike" => self.strike = Some(parse_number(key, value, line)?),
            "u" => self.u = Some(parse_number(key, value, line)?),
            "d" => self.d = Some(parse_number(key, value, line)?),
            "rate" => self.rate = Some(parse_number(key, value, line)?),
            "lambda" => self.lambda = Some(parse_number(key, value, line)?),
            "vu" => self.vu = Some(parse_number(key, value, line)?),
            "vd" => self.vd = Some(parse_number(key, value, line)?),
            "from" => self.from = Some(parse_number(key, value, line)?),
            "to" => self.to = Some(parse_number(key, value, line)?),
            "n" => self.n = Some(parse_integer(key, value, line)?),
            "cap" => self.cap = Some(parse_integer(key, value, line)?),
            "points" => self.points = Some(parse_integer(key, value, line)?),
            "rate_convention" => {
                self.rate_convention = Some(match value {
                    "per-step" => RateConvention::PerStep,
                    "total" => RateConvention::TotalHorizon,
                    _ => return Err(type_error(key, value, "`per-step` or `total`", line)),
                });
            }
            "method" => {
                self.method = Some(match value {
                    "enum" => MethodChoice::Enumeration,
                    "recombined" => MethodChoice::Recombined,
                    "auto" => MethodChoice::Auto,
                    _ => return Err(type_error(key, value, "`enum`, `recombined`, or `auto`", line)),
                });
            }
            "axis" => {
                self.axis = Some(match value {
                    "lambda" => SweepAxis::Lambda,
                    "vu" => SweepAxis::Vu,
                    "vd" => SweepAxis::Vd,
                    "moneyness" => SweepAxis::Moneyness,
                    "maturity" => SweepAxis::Maturity,
                    _ => {
                        return Err(type_error(
                            key,
                            value,
                            "`lambda`, `vu`, `vd`, `moneyness`, or `maturity`",
                            line,
                        ))
                    }
                });
            }
            "regime" => {
                self.regime = Some(match value {
                    "up-biased" => Regime::UpBiased,
                    "down-biased" => Regime::DownBiased,
                    "symmetric" => Regime::Symmetric,
                    _ => {
                        return Err(type_error(
                            key,
                            value,
                            "`up-biased`, `down-biased`, or `symmetric`",
                            line,
                        ))
                    }
                });
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey { key: key.to_string(), line }),
        }
        Ok(())
    }

    /// Field-wise merge where `overrides` wins wherever it is set.
    pub fn overridden_by(self, overrides: Self) -> Self {
        Self {
            s0: overrides.s0.or(self.s0),
            strike: overrides.strike.or(self.strike),
            u: overrides.u.or(self.u),
            d: overrides.d.or(self.d),
            rate: overrides.rate.or(self.rate),
            rate_convention: overrides.rate_convention.or(self.rate_convention),
            n: overrides.n.or(self.n),
            lambda: overrides.lambda.or(self.lambda),
            vu: overrides.vu.or(self.vu),
            vd: overrides.vd.or(self.vd),
            method: overrides.method.or(self.method),
            cap: overrides.cap.or(self.cap),
            axis: overrides.axis.or(self.axis),
            from: overrides.from.or(self.from),
            to: overrides.to.or(self.to),
            points: overrides.points.or(self.points),
            regime: overrides.regime.or(self.regime),
            out: overrides.out.or(self.out),
        }
    }
}

fn parse_number(key: &str, value: &str, line: usize) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| type_error(key, value, "a number", line))
}

fn parse_integer(key: &str, value: &str, line: usize) -> Result<u32, ConfigError> {
    value.parse().map_err(|_| type_error(key, value, "a non-negative integer", line))
}

fn type_error(key: &str, value: &str, expected: &'static str, line: usize) -> ConfigError {
    ConfigError::TypeError { key: key.to_string(), value: value.to_string(), expected, line }
}

/// Fully resolved run parameters after defaulting and validation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub market: MarketSpec,
    pub impact: ImpactSpec,
    pub method: MethodChoice,
    pub cap: u32,
    pub out: Option<PathBuf>,
}

/// Applies defaults (rate_convention = total, method = auto, cap = 24,
/// zero impact) and builds the validated domain specs. A regime preset
/// supplies volumes only where explicit `vu` / `vd` values are absent.
pub fn resolve(config: &RawConfig) -> Result<Resolved, ConfigError> {
    let missing: Vec<&str> = [
        ("s0", config.s0.is_none()),
        ("strike", config.strike.is_none()),
        ("u", config.u.is_none()),
        ("d", config.d.is_none()),
        ("rate", config.rate.is_none()),
        ("n", config.n.is_none()),
    ]
    .into_iter()
    .filter_map(|(key, absent)| absent.then_some(key))
    .collect();
    if !missing.is_empty() {
        return Err(ConfigError::MissingRequired(missing.join(", ")));
    }

    let market = MarketSpec::new(
        config.s0.unwrap(),
        config.u.unwrap(),
        config.d.unwrap(),
        config.rate.unwrap(),
        config.rate_convention.unwrap_or(RateConvention::TotalHorizon),
        config.n.unwrap(),
        config.strike.unwrap(),
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    let (regime_vu, regime_vd) = match config.regime.map(Regime::volumes) {
        Some((vu, vd)) => (Some(vu), Some(vd)),
        None => (None, None),
    };
    let impact = ImpactSpec::new(
        config.lambda.unwrap_or(0.0),
        config.vu.or(regime_vu).unwrap_or(0.0),
        config.vd.or(regime_vd).unwrap_or(0.0),
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    Ok(Resolved {
        market,
        impact,
        method: config.method.unwrap_or(MethodChoice::Auto),
        cap: config.cap.unwrap_or(DEFAULT_ENUMERATION_CAP),
        out: config.out.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_flags() -> RawConfig {
        RawConfig {
            s0: Some(100.0),
            strike: Some(100.0),
            u: Some(1.2),
            d: Some(0.8),
            rate: Some(1.05),
            n: Some(6),
            ..RawConfig::default()
        }
    }

    #[test]
    fn empty_file_plus_full_flags_resolves_with_defaults() {
        let file = RawConfig::parse("").unwrap();
        let resolved = resolve(&file.overridden_by(full_flags())).unwrap();
        assert_eq!(resolved.market.rate_convention, RateConvention::TotalHorizon);
        assert_eq!(resolved.method, MethodChoice::Auto);
        assert_eq!(resolved.cap, 24);
        assert_eq!(resolved.impact, ImpactSpec::zero());
        assert!(resolved.out.is_none());
    }

    #[test]
    fn cli_flags_override_file_values() {
        let file = RawConfig::parse("lambda = 0.1\nvu = 1.0\n").unwrap();
        let cli = RawConfig { lambda: Some(0.2), ..full_flags() };
        let resolved = resolve(&file.overridden_by(cli)).unwrap();
        assert_eq!(resolved.impact.lambda, 0.2);
        assert_eq!(resolved.impact.v_u, 1.0);
    }

    #[test]
    fn comments_blanks_and_repeats_parse() {
        let text = "# full line comment\n\ns0 = 90 # trailing comment\ns0 = 110\n  strike=95\n";
        let config = RawConfig::parse(text).unwrap();
        assert_eq!(config.s0, Some(110.0));
        assert_eq!(config.strike, Some(95.0));
    }

    #[test]
    fn unknown_key_lists_the_valid_keys() {
        let err = RawConfig::parse("uu = 1.2\n").unwrap_err();
        let message = err.to_string();
        assert!(matches!(err, ConfigError::UnknownKey { ref key, line: 1 } if key == "uu"));
        assert!(message.contains("unknown key `uu`"));
        for key in VALID_KEYS {
            assert!(message.contains(key), "message misses valid key {key}");
        }
    }

    #[test]
    fn type_errors_name_key_value_and_line() {
        let err = RawConfig::parse("s0 = 100\nn = 2.5\n").unwrap_err();
        assert!(
            matches!(err, ConfigError::TypeError { ref key, ref value, line: 2, .. } if key == "n" && value == "2.5")
        );
        let err = RawConfig::parse("method = fast\n").unwrap_err();
        assert!(err.to_string().contains("`enum`, `recombined`, or `auto`"));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(matches!(
            RawConfig::parse("just words\n").unwrap_err(),
            ConfigError::Malformed { line: 1, .. }
        ));
        assert!(matches!(
            RawConfig::parse("s0 =\n").unwrap_err(),
            ConfigError::Malformed { line: 1, .. }
        ));
    }

    #[test]
    fn missing_required_names_every_absent_key() {
        let err = resolve(&RawConfig { s0: Some(100.0), ..RawConfig::default() }).unwrap_err();
        let message = err.to_string();
        for key in ["strike", "u", "d", "rate", "n"] {
            assert!(message.contains(key), "message misses {key}");
        }
        assert!(!message.contains("s0,"));
    }

    #[test]
    fn regime_fills_volumes_but_explicit_values_win() {
        let base = RawConfig { regime: Some(Regime::UpBiased), ..full_flags() };
        let resolved = resolve(&base).unwrap();
        assert_eq!((resolved.impact.v_u, resolved.impact.v_d), (1.3, 1.0));

        let pinned = RawConfig { vu: Some(0.5), ..base };
        let resolved = resolve(&pinned).unwrap();
        assert_eq!((resolved.impact.v_u, resolved.impact.v_d), (0.5, 1.0));
    }

    #[test]
    fn enum_valued_keys_parse_all_tokens() {
        let text = "rate_convention = per-step\nmethod = recombined\naxis = moneyness\nregime = symmetric\nout = rows.csv\n";
        let config = RawConfig::parse(text).unwrap();
        assert_eq!(config.rate_convention, Some(RateConvention::PerStep));
        assert_eq!(config.method, Some(MethodChoice::Recombined));
        assert_eq!(config.axis, Some(SweepAxis::Moneyness));
        assert_eq!(config.regime, Some(Regime::Symmetric));
        assert_eq!(config.out, Some(PathBuf::from("rows.csv")));
    }

    #[test]
    fn invalid_market_surfaces_as_config_error() {
        let bad = RawConfig { d: Some(1.4), ..full_flags() };
        assert!(matches!(resolve(&bad).unwrap_err(), ConfigError::Invalid(_)));
    }
}
