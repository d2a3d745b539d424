//! Ingredient-phrase and label canonicalization.
//!
//! A phrase like "Fresh Chopped Tomatoes" becomes the token set
//! `{tomato}`: lowercase, split on punctuation, drop low-content
//! modifiers, stem what remains.

pub mod porter;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of normalized tokens. Ordered so that serialization and
/// tie-breaking are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSet(BTreeSet<String>);

impl TokenSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn insert(&mut self, token: impl Into<String>) {
        self.0.insert(token.into());
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn intersection_count(&self, other: &TokenSet) -> usize {
        if self.len() <= other.len() {
            self.0.iter().filter(|t| other.0.contains(*t)).count()
        } else {
            other.0.iter().filter(|t| self.0.contains(*t)).count()
        }
    }

    /// Join predicate between photo labels and corpus ingredients:
    /// true iff the two sets share at least one token.
    pub fn shares_token(&self, other: &TokenSet) -> bool {
        if self.len() <= other.len() {
            self.0.iter().any(|t| other.0.contains(t))
        } else {
            other.0.iter().any(|t| self.0.contains(t))
        }
    }

    pub fn is_subset(&self, other: &TokenSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Extend with every token of `other`.
    pub fn absorb(&mut self, other: &TokenSet) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl FromIterator<String> for TokenSet {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        TokenSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for TokenSet {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        TokenSet(iter.into_iter().map(str::to_string).collect())
    }
}

impl fmt::Display for TokenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for token in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(token)?;
            first = false;
        }
        Ok(())
    }
}

/// Knobs for [`normalize_phrase`]. The default modifier list ships with
/// the crate and can be replaced from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationConfig {
    /// Low-content descriptor tokens dropped before stemming; all lowercase.
    pub stop_modifiers: BTreeSet<String>,
    /// Tokens shorter than this never survive normalization.
    pub min_token_length: usize,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        let shipped = include_str!("../resources/stop_modifiers.txt");
        NormalizationConfig {
            stop_modifiers: parse_token_lines(shipped).into_iter().collect(),
            min_token_length: 2,
        }
    }
}

impl NormalizationConfig {
    /// Replace the stop-modifier list with the contents of `path`
    /// (one token per line, `#` starts a comment).
    pub fn with_stop_modifiers_from(path: impl AsRef<Path>) -> Result<Self> {
        let tokens = read_token_lines(path.as_ref())?;
        Ok(NormalizationConfig {
            stop_modifiers: tokens.into_iter().collect(),
            ..Self::default()
        })
    }
}

/// Parse a token-list resource: one token per line, blank lines and
/// `#` comments ignored, tokens lowercased.
pub fn parse_token_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        })
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// [`parse_token_lines`] for a file on disk.
pub fn read_token_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_token_lines(&text))
}

/// Canonicalize a free-text ingredient phrase or recognition label into a
/// token set: lowercase, split on anything non-alphanumeric, drop stop
/// modifiers, stem, dedupe. An empty result is legal (the phrase was all
/// modifiers).
pub fn normalize_phrase(phrase: &str, config: &NormalizationConfig) -> TokenSet {
    phrase
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|tok| !tok.is_empty())
        .filter(|tok| !config.stop_modifiers.contains(*tok))
        .map(porter::stem)
        .filter(|tok| tok.chars().count() >= config.min_token_length)
        .collect()
}

/// Normalize each token of an already-tokenized list (stop list applied,
/// stemmed). Used for resource files that hold one concept per line.
pub fn normalize_tokens<'a>(
    tokens: impl IntoIterator<Item = &'a str>,
    config: &NormalizationConfig,
) -> TokenSet {
    let mut out = TokenSet::new();
    for token in tokens {
        out.absorb(&normalize_phrase(token, config));
    }
    out
}
