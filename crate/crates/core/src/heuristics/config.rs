//! Keyword lists and thresholds, with a small `key = value` file format:
//!
//! ```text
//! # comment
//! stake_names = stake, deposit
//! earn_spend_pairs = earn|reward > spend|claim, points > burnpoints
//! max_distance = 12
//! ```
//!
//! Absent keys keep their defaults.

use crate::error::{Error, Result};

/// Entry-side and exit-side function-name keywords of one pair set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeywordPair {
    pub entry: Vec<String>,
    pub exit: Vec<String>,
}

impl KeywordPair {
    pub fn new(entry: &[&str], exit: &[&str]) -> Self {
        Self { entry: words(entry), exit: words(exit) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeywordConfig {
    pub stake_names: Vec<String>,
    pub unstake_names: Vec<String>,
    pub exit_names: Vec<String>,
    pub price_names: Vec<String>,
    pub transfer_names: Vec<String>,
    pub earn_spend_pairs: Vec<KeywordPair>,
    pub collateral_pairs: Vec<KeywordPair>,
    /// Statements allowed between a price call and a transfer call.
    pub max_distance: usize,
    /// Largest edit distance for two names to count as confusable.
    pub similarity_threshold: usize,
    /// Arithmetic operations a single statement may hold before it is flagged.
    pub complexity_threshold: usize,
}

/// Names shorter than this are never compared for similarity.
pub const SIMILARITY_MIN_LEN: usize = 4;

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl Default for KeywordConfig {
    fn default() -> Self {
        Self {
            stake_names: words(&["stake", "deposit", "lock", "provide"]),
            unstake_names: words(&["unstake", "withdraw", "unlock", "release"]),
            exit_names: words(&["withdraw", "unstake", "claim", "redeem", "transfer"]),
            price_names: words(&["rebase", "fetchprice", "updateprice", "getrate"]),
            transfer_names: words(&["transfer", "transferfrom", "safetransfer", "send"]),
            earn_spend_pairs: vec![KeywordPair::new(&["earn", "reward", "accrue"], &["spend", "redeem", "claim"])],
            collateral_pairs: vec![KeywordPair::new(&["borrow", "lock"], &["repay", "release"])],
            max_distance: 10,
            similarity_threshold: 1,
            complexity_threshold: 5,
        }
    }
}

fn check_list(key: &str, list: &[String]) -> Result<(), String> {
    if list.is_empty() {
        return Err(format!("`{key}` must not be empty"));
    }
    for w in list {
        if w.is_empty() {
            return Err(format!("`{key}` contains an empty keyword"));
        }
        if w.chars().any(|c| c.is_uppercase() || c.is_whitespace()) {
            return Err(format!("`{key}` keyword `{w}` must be lowercase without spaces"));
        }
    }
    Ok(())
}

fn parse_list(value: &str) -> Vec<String> {
    value.split(',').map(|w| w.trim().to_lowercase()).collect()
}

fn parse_pairs(value: &str) -> Result<Vec<KeywordPair>, String> {
    value
        .split(',')
        .map(|pair| {
            let (entry, exit) =
                pair.split_once('>').ok_or_else(|| format!("pair `{}` needs the form `a|b > c|d`", pair.trim()))?;
            let side = |s: &str| s.split('|').map(|w| w.trim().to_lowercase()).collect::<Vec<_>>();
            Ok(KeywordPair { entry: side(entry), exit: side(exit) })
        })
        .collect()
}

fn parse_count(key: &str, value: &str) -> Result<usize, String> {
    value.trim().parse::<usize>().map_err(|_| format!("`{key}` expects a non-negative integer, got `{}`", value.trim()))
}

impl KeywordConfig {
    /// Checks keyword and threshold invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::Config { line: 0, message };
        for (key, list) in [
            ("stake_names", &self.stake_names),
            ("unstake_names", &self.unstake_names),
            ("exit_names", &self.exit_names),
            ("price_names", &self.price_names),
            ("transfer_names", &self.transfer_names),
        ] {
            check_list(key, list).map_err(fail)?;
        }
        for (key, pairs) in [("earn_spend_pairs", &self.earn_spend_pairs), ("collateral_pairs", &self.collateral_pairs)]
        {
            for p in pairs {
                check_list(key, &p.entry).map_err(fail)?;
                check_list(key, &p.exit).map_err(fail)?;
            }
        }
        if self.max_distance < 1 {
            return Err(fail("`max_distance` must be at least 1".into()));
        }
        if self.complexity_threshold < 2 {
            return Err(fail("`complexity_threshold` must be at least 2".into()));
        }
        Ok(())
    }

    /// Defaults overridden by the keys present in `text`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_config_str(text)?;
        Ok(cfg)
    }

    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line, message };
            let (key, value) =
                content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let result = match key {
                "stake_names" => {
                    self.stake_names = parse_list(value);
                    Ok(())
                }
                "unstake_names" => {
                    self.unstake_names = parse_list(value);
                    Ok(())
                }
                "exit_names" => {
                    self.exit_names = parse_list(value);
                    Ok(())
                }
                "price_names" => {
                    self.price_names = parse_list(value);
                    Ok(())
                }
                "transfer_names" => {
                    self.transfer_names = parse_list(value);
                    Ok(())
                }
                "earn_spend_pairs" => parse_pairs(value).map(|p| self.earn_spend_pairs = p),
                "collateral_pairs" => parse_pairs(value).map(|p| self.collateral_pairs = p),
                "max_distance" => parse_count(key, value).map(|n| self.max_distance = n),
                "similarity_threshold" => parse_count(key, value).map(|n| self.similarity_threshold = n),
                "complexity_threshold" => parse_count(key, value).map(|n| self.complexity_threshold = n),
                _ => Err(format!("unknown key `{key}`")),
            };
            result.map_err(err)?;
            self.validate().map_err(|e| match e {
                Error::Config { message, .. } => err(message),
                other => other,
            })?;
        }
        Ok(())
    }
}
