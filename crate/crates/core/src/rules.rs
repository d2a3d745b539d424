//! Rule-based cuisine classification: dish-name lookup first, then
//! distinctive-ingredient matching with strict thresholds.
//!
//! A food label whose probability is exactly at the cut is excluded
//! (strictly greater required), and a cuisine needs strictly more than
//! `match_min` matched ingredients to classify.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::distinctive::DistinctiveTable;
use crate::error::{Error, Result};
use crate::labels::PhotoRecord;
use crate::normalize::{normalize_phrase, NormalizationConfig, TokenSet};

/// Probability cut for ingredient selection (strictly greater than).
pub const DEFAULT_P_CUT: f64 = 0.75;
/// Minimum matched-ingredient count (strictly more than).
pub const DEFAULT_MATCH_MIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleConfig {
    pub p_cut: f64,
    pub match_min: usize,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            p_cut: DEFAULT_P_CUT,
            match_min: DEFAULT_MATCH_MIN,
        }
    }
}

/// Native-dish lookup table: normalized dish-name token set to cuisine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DishNameTable {
    entries: BTreeMap<TokenSet, String>,
    coverage: BTreeSet<String>,
}

impl DishNameTable {
    /// Parse a JSON map of dish phrase to cuisine. Keys are normalized;
    /// two phrases normalizing to the same token set are rejected.
    pub fn from_json_str(text: &str, norm: &NormalizationConfig) -> Result<Self> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| Error::schema("dish table", e.to_string()))?;
        let mut entries = BTreeMap::new();
        let mut coverage = BTreeSet::new();
        for (phrase, cuisine) in raw {
            let key = normalize_phrase(&phrase, norm);
            if key.is_empty() {
                return Err(Error::schema(
                    "dish table",
                    format!("dish {phrase:?} normalizes to nothing"),
                ));
            }
            let cuisine = cuisine.to_lowercase();
            if let Some(previous) = entries.insert(key, cuisine.clone()) {
                return Err(Error::schema(
                    "dish table",
                    format!("dish {phrase:?} collides with an entry for {previous:?}"),
                ));
            }
            coverage.insert(cuisine);
        }
        Ok(DishNameTable { entries, coverage })
    }

    pub fn from_file(
        path: impl AsRef<std::path::Path>,
        norm: &NormalizationConfig,
    ) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, norm)
    }

    /// The table shipped with the crate: roughly ten popular dishes for
    /// each of the ten largest corpus cuisines.
    pub fn shipped(norm: &NormalizationConfig) -> Self {
        Self::from_json_str(include_str!("../resources/dishes.json"), norm)
            .expect("shipped dish table is valid")
    }

    /// Cuisines the table covers.
    pub fn coverage(&self) -> &BTreeSet<String> {
        &self.coverage
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best entry whose token set is contained in `label_tokens`: the
    /// most specific (largest) entry wins, ties in token-set order.
    fn lookup(&self, label_tokens: &TokenSet) -> Option<(&TokenSet, &str)> {
        self.entries
            .iter()
            .filter(|(key, _)| key.is_subset(label_tokens))
            .max_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
            .map(|(key, cuisine)| (key, cuisine.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleOutcome {
    DishNameHit,
    IngredientRuleHit,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleEvidence {
    DishName {
        concept: String,
        probability: f64,
    },
    Ingredients {
        match_counts: BTreeMap<String, usize>,
        matched: Vec<String>,
    },
    None,
}

/// Outcome of classifying one photo. `cuisine` is present exactly when
/// the outcome is not `Unclassified`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleClassification {
    pub photo_id: String,
    pub outcome: RuleOutcome,
    pub cuisine: Option<String>,
    pub evidence: RuleEvidence,
}

/// Dish table plus per-cuisine ingredient match sets, prepared once and
/// shared across photos.
#[derive(Debug, Clone)]
pub struct RuleClassifier {
    dish_table: DishNameTable,
    match_sets: BTreeMap<String, BTreeSet<TokenSet>>,
    cuisine_sizes: BTreeMap<String, usize>,
    config: RuleConfig,
}

impl RuleClassifier {
    /// Prepare a classifier for the dish table's cuisines. The distinctive
    /// table must cover every one of them.
    pub fn new(
        dish_table: DishNameTable,
        distinctive: &DistinctiveTable,
        config: RuleConfig,
    ) -> Result<Self> {
        let mut match_sets = BTreeMap::new();
        for cuisine in dish_table.coverage() {
            match_sets.insert(cuisine.clone(), distinctive.classifier_set(cuisine)?);
        }
        Ok(RuleClassifier {
            dish_table,
            match_sets,
            cuisine_sizes: distinctive.cuisine_sizes.clone(),
            config,
        })
    }

    /// Assemble a classifier from explicit parts, bypassing table
    /// derivation. Useful when the match sets come from somewhere else.
    pub fn from_parts(
        dish_table: DishNameTable,
        match_sets: BTreeMap<String, BTreeSet<TokenSet>>,
        cuisine_sizes: BTreeMap<String, usize>,
        config: RuleConfig,
    ) -> Self {
        RuleClassifier {
            dish_table,
            match_sets,
            cuisine_sizes,
            config,
        }
    }

    /// Dish-name rule: the highest-probability food label whose normalized
    /// tokens contain a table entry decides the cuisine.
    pub fn classify_by_dish_name(
        &self,
        record: &PhotoRecord,
        norm: &NormalizationConfig,
    ) -> Option<(String, String, f64)> {
        for label in &record.food_labels {
            let tokens = normalize_phrase(&label.concept, norm);
            if tokens.is_empty() {
                continue;
            }
            if let Some((_, cuisine)) = self.dish_table.lookup(&tokens) {
                return Some((
                    cuisine.to_string(),
                    label.concept.clone(),
                    label.probability,
                ));
            }
        }
        None
    }

    /// Ingredient rule: food labels strictly above `p_cut` are matched
    /// against each cuisine's distinctive-plus-frequent set; a cuisine
    /// with strictly more than `match_min` distinct matches wins. Returns
    /// the winner (if any), the per-cuisine counts, and the winner's
    /// matched concepts.
    pub fn classify_by_ingredients(
        &self,
        record: &PhotoRecord,
        norm: &NormalizationConfig,
    ) -> (Option<String>, BTreeMap<String, usize>, Vec<String>) {
        // distinct normalized ingredients; first (highest-probability)
        // concept kept as the display name
        let mut selected: Vec<(String, TokenSet)> = Vec::new();
        let mut seen: BTreeSet<TokenSet> = BTreeSet::new();
        for label in &record.food_labels {
            if label.probability <= self.config.p_cut {
                continue;
            }
            let tokens = normalize_phrase(&label.concept, norm);
            if tokens.is_empty() || !seen.insert(tokens.clone()) {
                continue;
            }
            selected.push((label.concept.clone(), tokens));
        }

        let mut match_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut matched_per_cuisine: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (cuisine, match_set) in &self.match_sets {
            let mut matched = Vec::new();
            for (concept, tokens) in &selected {
                if match_set.iter().any(|entry| entry.shares_token(tokens)) {
                    matched.push(concept.as_str());
                }
            }
            match_counts.insert(cuisine.clone(), matched.len());
            matched_per_cuisine.insert(cuisine, matched);
        }

        let winner = match_counts
            .iter()
            .filter(|(_, &count)| count > self.config.match_min)
            .max_by(|(ca, &na), (cb, &nb)| {
                na.cmp(&nb)
                    .then_with(|| {
                        let size = |c: &str| self.cuisine_sizes.get(c).copied().unwrap_or(0);
                        size(ca).cmp(&size(cb))
                    })
                    .then_with(|| cb.cmp(ca))
            })
            .map(|(cuisine, _)| cuisine.clone());

        let matched = winner
            .as_deref()
            .and_then(|w| matched_per_cuisine.get(w))
            .map(|m| m.iter().map(|s| s.to_string()).collect())
            .unwrap_or_default();
        (winner, match_counts, matched)
    }

    /// Full rule: dish name first, ingredient matching only on a miss.
    pub fn classify(&self, record: &PhotoRecord, norm: &NormalizationConfig) -> RuleClassification {
        if let Some((cuisine, concept, probability)) = self.classify_by_dish_name(record, norm) {
            return RuleClassification {
                photo_id: record.photo_id.clone(),
                outcome: RuleOutcome::DishNameHit,
                cuisine: Some(cuisine),
                evidence: RuleEvidence::DishName {
                    concept,
                    probability,
                },
            };
        }
        let (winner, match_counts, matched) = self.classify_by_ingredients(record, norm);
        match winner {
            Some(cuisine) => RuleClassification {
                photo_id: record.photo_id.clone(),
                outcome: RuleOutcome::IngredientRuleHit,
                cuisine: Some(cuisine),
                evidence: RuleEvidence::Ingredients {
                    match_counts,
                    matched,
                },
            },
            None => RuleClassification {
                photo_id: record.photo_id.clone(),
                outcome: RuleOutcome::Unclassified,
                cuisine: None,
                evidence: RuleEvidence::None,
            },
        }
    }
}
