//! Per-cuisine ingredient frequency tables and distinctive-ingredient sets.
//!
//! Frequency alone ranks ubiquitous items (salt, water) at the top of
//! every cuisine, so two filters are applied: a shipped ubiquitous-token
//! list, and a cross-cuisine commonness filter that drops entries ranked
//! high in at least half of all cuisines.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::normalize::{normalize_phrase, parse_token_lines, NormalizationConfig, TokenSet};

/// Ranked ingredient frequencies per cuisine: count descending, ties in
/// token-set order.
pub type FrequencyTable = BTreeMap<String, Vec<(TokenSet, usize)>>;

/// Frequency table plus derived distinctive sets.
#[derive(Debug, Clone, Serialize)]
pub struct DistinctiveTable {
    pub per_cuisine_freq: FrequencyTable,
    pub ubiquitous: TokenSet,
    pub distinctive: BTreeMap<String, BTreeSet<TokenSet>>,
    pub top_n: usize,
    /// Recipe count per cuisine, used downstream for tie-breaking.
    pub cuisine_sizes: BTreeMap<String, usize>,
}

/// Default number of top-ranked ingredients kept per cuisine.
pub const DEFAULT_TOP_N: usize = 50;

/// Ubiquitous-ingredient tokens shipped with the crate.
pub fn default_ubiquitous(config: &NormalizationConfig) -> TokenSet {
    let shipped = include_str!("../resources/ubiquitous.txt");
    let mut out = TokenSet::new();
    for token in parse_token_lines(shipped) {
        out.absorb(&normalize_phrase(&token, config));
    }
    out
}

/// Count, per cuisine, how many of that cuisine's recipes contain each
/// normalized ingredient. An ingredient counts at most once per recipe;
/// phrases that normalize to nothing are skipped.
pub fn build_frequency_table(corpus: &Corpus, config: &NormalizationConfig) -> FrequencyTable {
    let mut counts: BTreeMap<String, BTreeMap<TokenSet, usize>> = BTreeMap::new();
    for recipe in corpus.recipes() {
        let entries: BTreeSet<TokenSet> = recipe
            .ingredients_raw
            .iter()
            .map(|raw| normalize_phrase(raw, config))
            .filter(|set| !set.is_empty())
            .collect();
        let cuisine_counts = counts.entry(recipe.cuisine.clone()).or_default();
        for entry in entries {
            *cuisine_counts.entry(entry).or_insert(0) += 1;
        }
    }

    counts
        .into_iter()
        .map(|(cuisine, freq)| {
            let mut ranked: Vec<(TokenSet, usize)> = freq.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            (cuisine, ranked)
        })
        .collect()
}

/// Entries that survive ubiquitous removal: an entry is dropped only when
/// every one of its tokens is ubiquitous.
fn survivors<'a, 'b>(
    ranked: &'a [(TokenSet, usize)],
    ubiquitous: &'b TokenSet,
) -> impl Iterator<Item = &'a (TokenSet, usize)> + use<'a, 'b> {
    ranked
        .iter()
        .filter(move |(entry, _)| !entry.is_subset(ubiquitous))
}

/// The `top_n` leading entries of a cuisine's ranked list after ubiquitous
/// removal.
pub fn frequent_set(
    table: &FrequencyTable,
    cuisine: &str,
    ubiquitous: &TokenSet,
    top_n: usize,
) -> Result<Vec<(TokenSet, usize)>> {
    let ranked = table.get(cuisine).ok_or_else(|| Error::UnknownCuisine {
        name: cuisine.to_string(),
    })?;
    Ok(survivors(ranked, ubiquitous).take(top_n).cloned().collect())
}

/// Per-cuisine distinctive sets: the `top_n` leading survivors that are
/// not common across cuisines (present in the top ranks of at least half
/// of them).
pub fn derive_distinctive(
    table: &FrequencyTable,
    ubiquitous: &TokenSet,
    top_n: usize,
) -> BTreeMap<String, BTreeSet<TokenSet>> {
    let n_cuisines = table.len();
    let mut top_presence: BTreeMap<&TokenSet, usize> = BTreeMap::new();
    for ranked in table.values() {
        for (entry, _) in survivors(ranked, ubiquitous).take(top_n) {
            *top_presence.entry(entry).or_insert(0) += 1;
        }
    }
    let common: BTreeSet<&TokenSet> = top_presence
        .into_iter()
        .filter(|(_, cuisines_with)| cuisines_with * 2 >= n_cuisines)
        .map(|(entry, _)| entry)
        .collect();

    table
        .iter()
        .map(|(cuisine, ranked)| {
            let set: BTreeSet<TokenSet> = survivors(ranked, ubiquitous)
                .filter(|(entry, _)| !common.contains(entry))
                .take(top_n)
                .map(|(entry, _)| entry.clone())
                .collect();
            (cuisine.clone(), set)
        })
        .collect()
}

impl DistinctiveTable {
    /// Build the full table for a corpus.
    pub fn build(
        corpus: &Corpus,
        config: &NormalizationConfig,
        ubiquitous: TokenSet,
        top_n: usize,
    ) -> Self {
        let per_cuisine_freq = build_frequency_table(corpus, config);
        let distinctive = derive_distinctive(&per_cuisine_freq, &ubiquitous, top_n);
        DistinctiveTable {
            per_cuisine_freq,
            ubiquitous,
            distinctive,
            top_n,
            cuisine_sizes: corpus.cuisine_counts(),
        }
    }

    pub fn cuisines(&self) -> impl Iterator<Item = &str> {
        self.per_cuisine_freq.keys().map(String::as_str)
    }

    /// Ranked frequent entries for one cuisine (ubiquitous removed).
    pub fn frequent(&self, cuisine: &str, top_n: usize) -> Result<Vec<(TokenSet, usize)>> {
        frequent_set(&self.per_cuisine_freq, cuisine, &self.ubiquitous, top_n)
    }

    /// The ingredient sets a classifier matches against for one cuisine:
    /// the distinctive set united with the frequent set.
    pub fn classifier_set(&self, cuisine: &str) -> Result<BTreeSet<TokenSet>> {
        let mut set: BTreeSet<TokenSet> = self
            .distinctive
            .get(cuisine)
            .ok_or_else(|| Error::UnknownCuisine {
                name: cuisine.to_string(),
            })?
            .clone();
        for (entry, _) in self.frequent(cuisine, self.top_n)? {
            set.insert(entry);
        }
        Ok(set)
    }
}
