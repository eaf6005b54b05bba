//! Analysis hyperparameters and output controls.
//!
//! Values are resolved with the precedence `overrides > config file > defaults`.
//! The config file is a flat list of `key = value` lines; `#` starts a comment.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CleshError, Result};

/// Every key accepted by [`load_config`], in canonical order.
pub const CONFIG_KEYS: &[&str] = &[
    "candidate_num_min",
    "candidate_num_max",
    "p_feature_selection",
    "cont_bound",
    "manual_num",
    "p_univariate",
    "p_interaction",
    "output_dir",
    "rng_seed",
    "strict_paired_nonparametric",
    "interaction_top_k",
    "welch_two_sample",
    "html",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    /// Smallest admissible number of important features.
    pub candidate_num_min: usize,
    /// Largest admissible number of important features.
    pub candidate_num_max: usize,
    /// Significance level for adjacent-rank tests (and their normality gate).
    pub p_feature_selection: f64,
    /// Features with more distinct values than this are continuous.
    pub cont_bound: usize,
    /// Forces the number of analyzed features when set.
    pub manual_num: Option<usize>,
    pub p_univariate: f64,
    pub p_interaction: f64,
    pub output_dir: PathBuf,
    /// Seed for the row subsample used by interaction ranking on very large inputs.
    pub rng_seed: u64,
    /// Use the signed-rank test instead of rank-sum on the non-parametric
    /// route of paired comparisons.
    pub strict_paired_nonparametric: bool,
    /// Number of interaction partners analyzed per target feature.
    pub interaction_top_k: usize,
    /// Use Welch's unequal-variance form for two-sample t-tests.
    pub welch_two_sample: bool,
    /// Also write a self-contained HTML report.
    pub html: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            candidate_num_min: 10,
            candidate_num_max: 20,
            p_feature_selection: 0.05,
            cont_bound: 10,
            manual_num: None,
            p_univariate: 0.05,
            p_interaction: 0.05,
            output_dir: PathBuf::from("clesh_result"),
            rng_seed: 0,
            strict_paired_nonparametric: false,
            interaction_top_k: 1,
            welch_two_sample: false,
            html: false,
        }
    }
}

impl Config {
    /// Checks the cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        if self.candidate_num_min == 0 {
            return Err(invalid("candidate_num_min", "0", "must be positive"));
        }
        if self.candidate_num_max == 0 {
            return Err(invalid("candidate_num_max", "0", "must be positive"));
        }
        if self.candidate_num_min > self.candidate_num_max {
            return Err(CleshError::InvalidConfig(format!(
                "candidate_num_min ({}) exceeds candidate_num_max ({})",
                self.candidate_num_min, self.candidate_num_max
            )));
        }
        if self.cont_bound == 0 {
            return Err(invalid("cont_bound", "0", "must be positive"));
        }
        if self.manual_num == Some(0) {
            return Err(invalid("manual_num", "0", "must be positive"));
        }
        if self.interaction_top_k == 0 {
            return Err(invalid("interaction_top_k", "0", "must be positive"));
        }
        for (key, p) in [
            ("p_feature_selection", self.p_feature_selection),
            ("p_univariate", self.p_univariate),
            ("p_interaction", self.p_interaction),
        ] {
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid(key, &p.to_string(), "must lie strictly between 0 and 1"));
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(invalid("output_dir", "", "must not be empty"));
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = unquote(value.trim());
        match key {
            "candidate_num_min" => self.candidate_num_min = parse_usize(key, value)?,
            "candidate_num_max" => self.candidate_num_max = parse_usize(key, value)?,
            "p_feature_selection" => self.p_feature_selection = parse_level(key, value)?,
            "cont_bound" => self.cont_bound = parse_usize(key, value)?,
            "manual_num" => {
                self.manual_num = match value.to_ascii_lowercase().as_str() {
                    "" | "none" | "null" => None,
                    _ => Some(parse_usize(key, value)?),
                }
            }
            "p_univariate" => self.p_univariate = parse_level(key, value)?,
            "p_interaction" => self.p_interaction = parse_level(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "rng_seed" => {
                self.rng_seed = value
                    .parse()
                    .map_err(|_| invalid(key, value, "expected an unsigned integer"))?
            }
            "strict_paired_nonparametric" => {
                self.strict_paired_nonparametric = parse_bool(key, value)?
            }
            "interaction_top_k" => self.interaction_top_k = parse_usize(key, value)?,
            "welch_two_sample" => self.welch_two_sample = parse_bool(key, value)?,
            "html" => self.html = parse_bool(key, value)?,
            other => return Err(CleshError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Flat `key -> rendered value` view, used by the report and manifest.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("candidate_num_min", self.candidate_num_min.to_string()),
            ("candidate_num_max", self.candidate_num_max.to_string()),
            ("p_feature_selection", self.p_feature_selection.to_string()),
            ("cont_bound", self.cont_bound.to_string()),
            (
                "manual_num",
                self.manual_num
                    .map_or_else(|| "none".to_string(), |n| n.to_string()),
            ),
            ("p_univariate", self.p_univariate.to_string()),
            ("p_interaction", self.p_interaction.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("rng_seed", self.rng_seed.to_string()),
            (
                "strict_paired_nonparametric",
                self.strict_paired_nonparametric.to_string(),
            ),
            ("interaction_top_k", self.interaction_top_k.to_string()),
            ("welch_two_sample", self.welch_two_sample.to_string()),
            ("html", self.html.to_string()),
        ]
    }
}

/// Builds a [`Config`] from defaults, an optional config file, and overrides.
pub fn load_config(path: Option<&Path>, overrides: &BTreeMap<String, String>) -> Result<Config> {
    let mut config = Config::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|source| CleshError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        for (key, value) in parse_config_text(&text)? {
            config.set(&key, &value)?;
        }
    }
    for (key, value) in overrides {
        config.set(&key.replace('-', "_"), value)?;
    }
    config.validate()?;
    Ok(config)
}

/// Parses the flat `key = value` format into ordered pairs.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CleshError::ConfigSyntax {
                line: idx + 1,
                text: raw.to_string(),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(CleshError::ConfigSyntax {
                line: idx + 1,
                text: raw.to_string(),
            });
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn strip_comment(line: &str) -> &str {
    // A '#' inside a quoted value is kept.
    let mut in_quotes = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str) -> &str {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value)
}

fn invalid(key: &str, value: &str, reason: &str) -> CleshError {
    CleshError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(0) => Err(invalid(key, value, "must be positive")),
        Ok(n) => Ok(n),
        Err(_) => Err(invalid(key, value, "expected a positive integer")),
    }
}

fn parse_level(key: &str, value: &str) -> Result<f64> {
    let p: f64 = value
        .parse()
        .map_err(|_| invalid(key, value, "expected a number"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(invalid(key, value, "must lie strictly between 0 and 1"))
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(invalid(key, value, "expected true or false")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn defaults_match_documented_values() {
        let c = load_config(None, &BTreeMap::new()).unwrap();
        assert_eq!(c.candidate_num_min, 10);
        assert_eq!(c.candidate_num_max, 20);
        assert_eq!(c.cont_bound, 10);
        assert_eq!(c.manual_num, None);
        assert_eq!(c.p_feature_selection, 0.05);
        assert_eq!(c.p_univariate, 0.05);
        assert_eq!(c.p_interaction, 0.05);
        assert_eq!(c.output_dir, PathBuf::from("clesh_result"));
        assert_eq!(c.rng_seed, 0);
        assert_eq!(c.interaction_top_k, 1);
    }

    #[test]
    fn single_override() {
        let c = load_config(None, &overrides(&[("p_univariate", "0.01")])).unwrap();
        assert_eq!(c.p_univariate, 0.01);
        assert_eq!(c, Config { p_univariate: 0.01, ..Config::default() });
    }

    #[test]
    fn min_above_max_rejected() {
        let err = load_config(None, &overrides(&[("candidate_num_min", "25")])).unwrap_err();
        assert!(matches!(err, CleshError::InvalidConfig(_)), "{err}");
    }

    #[test]
    fn level_out_of_range_rejected() {
        for bad in ["1", "1.5", "0", "-0.1", "abc"] {
            let err = load_config(None, &overrides(&[("p_interaction", bad)])).unwrap_err();
            assert!(matches!(err, CleshError::InvalidValue { .. }), "{bad}: {err}");
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let err = load_config(None, &overrides(&[("p_everything", "0.1")])).unwrap_err();
        assert!(matches!(err, CleshError::UnknownKey(k) if k == "p_everything"));
    }

    #[test]
    fn file_then_overrides_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clesh.conf");
        fs::write(
            &path,
            "# settings\ncont_bound = 7\np_univariate = 0.02  # tighter\noutput_dir = \"out dir\"\nmanual_num = 4\n",
        )
        .unwrap();
        let c = load_config(Some(&path), &overrides(&[("cont-bound", "12")])).unwrap();
        assert_eq!(c.cont_bound, 12);
        assert_eq!(c.p_univariate, 0.02);
        assert_eq!(c.output_dir, PathBuf::from("out dir"));
        assert_eq!(c.manual_num, Some(4));
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_config_text("cont_bound = 3\njust words\n").unwrap_err();
        assert!(matches!(err, CleshError::ConfigSyntax { line: 2, .. }));
    }

    #[test]
    fn pairs_cover_every_key() {
        let keys: Vec<_> = Config::default().to_pairs().into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys, CONFIG_KEYS);
    }
}
