//! Tolerances and thresholds shared by every stage.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Every tolerance the pipeline uses, in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Plane-side tolerance for hull construction and convexity checks.
    pub eps_geom: f64,
    /// Boundary band for point classification (m).
    pub eps_bnd: f64,
    /// Surface distance under which two hulls count as touching (m).
    pub eps_touch: f64,
    pub relation: RelationConfig,
    /// Consecutive frames a touch edge must persist before it flips.
    pub debounce: usize,
    /// `In`/`Su` collapse onto `Wi`/`Co` when set.
    pub in_su_alias: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps_geom: 1e-9,
            eps_bnd: 1e-7,
            eps_touch: 5e-3,
            relation: RelationConfig::default(),
            debounce: 3,
            in_su_alias: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationConfig {
    /// Maximum gap for `Around` (m).
    pub theta_near: f64,
    /// Per-frame displacement above which an object counts as moving (m/frame).
    pub delta_move: f64,
    /// Per-frame change of centroid distance treated as significant (m/frame).
    pub delta_rel: f64,
    /// DSR evaluation window (frames).
    pub window: usize,
}

impl Default for RelationConfig {
    fn default() -> Self {
        RelationConfig { theta_near: 0.15, delta_move: 2e-3, delta_rel: 1e-3, window: 10 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    Value { line: usize, key: String, value: String },
    #[error("`{key}` out of range: {reason}")]
    Range { key: String, reason: String },
}

/// Keys understood by [`Config::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "eps_geom",
    "eps_bnd",
    "eps_touch",
    "theta_near",
    "delta_move",
    "delta_rel",
    "window",
    "debounce",
    "in_su_alias",
];

impl Config {
    /// Applies one `key = value` override. Returns `Ok(false)` when the key
    /// is not a tolerance key so callers can handle their own keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, String> {
        fn num<T: FromStr>(v: &str) -> Result<T, String> {
            v.trim().parse::<T>().map_err(|_| v.to_string())
        }
        match key {
            "eps_geom" => self.eps_geom = num(value)?,
            "eps_bnd" => self.eps_bnd = num(value)?,
            "eps_touch" => self.eps_touch = num(value)?,
            "theta_near" => self.relation.theta_near = num(value)?,
            "delta_move" => self.relation.delta_move = num(value)?,
            "delta_rel" => self.relation.delta_rel = num(value)?,
            "window" => self.relation.window = num(value)?,
            "debounce" => self.debounce = num(value)?,
            "in_su_alias" => self.in_su_alias = num(value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("eps_touch", self.eps_touch),
            ("theta_near", self.relation.theta_near),
            ("delta_move", self.relation.delta_move),
            ("delta_rel", self.relation.delta_rel),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Range { key: key.into(), reason: format!("{v} must be > 0") });
            }
        }
        for (key, v) in [("eps_geom", self.eps_geom), ("eps_bnd", self.eps_bnd)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Range { key: key.into(), reason: format!("{v} must be >= 0") });
            }
        }
        if self.relation.window < 2 {
            return Err(ConfigError::Range { key: "window".into(), reason: "must be >= 2".into() });
        }
        if self.debounce < 1 {
            return Err(ConfigError::Range { key: "debounce".into(), reason: "must be >= 1".into() });
        }
        Ok(())
    }
}

/// Parses a `key = value` file into ordered pairs. `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eps_geom = {}", self.eps_geom)?;
        writeln!(f, "eps_bnd = {}", self.eps_bnd)?;
        writeln!(f, "eps_touch = {}", self.eps_touch)?;
        writeln!(f, "theta_near = {}", self.relation.theta_near)?;
        writeln!(f, "delta_move = {}", self.relation.delta_move)?;
        writeln!(f, "delta_rel = {}", self.relation.delta_rel)?;
        writeln!(f, "window = {}", self.relation.window)?;
        writeln!(f, "debounce = {}", self.debounce)?;
        writeln!(f, "in_su_alias = {}", self.in_su_alias)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn set_and_reject() {
        let mut c = Config::default();
        assert_eq!(c.set("eps_touch", "0.01"), Ok(true));
        assert_eq!(c.eps_touch, 0.01);
        assert_eq!(c.set("library", "x"), Ok(false));
        assert!(c.set("window", "ten").is_err());
        c.relation.window = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn key_value_lines() {
        let kv = parse_key_values("# c\n a = 1 \n\nb=two # trailing\n").unwrap();
        assert_eq!(kv, vec![(2, "a".into(), "1".into()), (4, "b".into(), "two".into())]);
        assert_eq!(parse_key_values("nope"), Err(ConfigError::Syntax { line: 1 }));
    }
}
