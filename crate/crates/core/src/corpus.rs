//! Recipe corpus loading, statistics, and train/test splitting.
//!
//! The on-disk format is the public Yummly distribution schema: a JSON
//! array of `{id, cuisine, ingredients}` objects.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{normalize_phrase, NormalizationConfig, TokenSet};

/// One corpus entry. `ingredients_norm` is empty until
/// [`Corpus::normalized`] fills it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recipe {
    pub id: i64,
    pub cuisine: String,
    pub ingredients_raw: Vec<String>,
    pub ingredients_norm: TokenSet,
}

/// Wire form of a recipe (Yummly schema).
#[derive(Debug, Serialize, Deserialize)]
struct RecipeWire {
    id: i64,
    cuisine: String,
    ingredients: Vec<String>,
}

/// An indexed recipe collection: the cuisine set and raw-ingredient
/// vocabulary are derived from the recipes and kept in sync. Immutable
/// after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    recipes: Vec<Recipe>,
    cuisines: BTreeSet<String>,
    vocabulary: BTreeSet<String>,
}

impl Corpus {
    /// Build a corpus from recipes, rejecting duplicate ids.
    pub fn from_recipes(recipes: Vec<Recipe>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (index, recipe) in recipes.iter().enumerate() {
            if !seen.insert(recipe.id) {
                return Err(Error::DuplicateRecipeId {
                    index,
                    id: recipe.id,
                });
            }
        }
        let cuisines = recipes.iter().map(|r| r.cuisine.clone()).collect();
        let vocabulary = recipes
            .iter()
            .flat_map(|r| r.ingredients_raw.iter().cloned())
            .collect();
        Ok(Corpus {
            recipes,
            cuisines,
            vocabulary,
        })
    }

    pub fn recipes(&self) -> &[Recipe] {
        &self.recipes
    }

    pub fn cuisines(&self) -> &BTreeSet<String> {
        &self.cuisines
    }

    /// Distinct raw ingredient phrases across the whole corpus.
    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.recipes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recipes.is_empty()
    }

    /// Recipe count per cuisine. Values sum to `len()`.
    pub fn cuisine_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> =
            self.cuisines.iter().map(|c| (c.clone(), 0)).collect();
        for recipe in &self.recipes {
            *counts.get_mut(&recipe.cuisine).expect("cuisine indexed") += 1;
        }
        counts
    }

    /// Copy of this corpus with `ingredients_norm` filled as the union of
    /// the normalized forms of each recipe's raw ingredients.
    pub fn normalized(&self, config: &NormalizationConfig) -> Corpus {
        let recipes = self
            .recipes
            .iter()
            .map(|r| {
                let mut norm = TokenSet::new();
                for raw in &r.ingredients_raw {
                    norm.absorb(&normalize_phrase(raw, config));
                }
                Recipe {
                    ingredients_norm: norm,
                    ..r.clone()
                }
            })
            .collect();
        Corpus {
            recipes,
            cuisines: self.cuisines.clone(),
            vocabulary: self.vocabulary.clone(),
        }
    }

    /// Deterministic stratified split into (train, test); `held_out_fraction`
    /// of each cuisine (rounded) goes to the test side. Input order is
    /// preserved within each side.
    pub fn split(&self, held_out_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
        if !(held_out_fraction > 0.0 && held_out_fraction < 1.0) {
            return Err(Error::DegenerateSplit {
                reason: format!("held-out fraction {held_out_fraction} not in (0, 1)"),
            });
        }
        if self.len() < 2 {
            return Err(Error::DegenerateSplit {
                reason: format!("corpus has {} recipe(s), need at least 2", self.len()),
            });
        }

        let mut by_cuisine: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, recipe) in self.recipes.iter().enumerate() {
            by_cuisine.entry(&recipe.cuisine).or_default().push(i);
        }

        let mut rng = StdRng::seed_from_u64(seed);
        let mut test_indices = BTreeSet::new();
        for indices in by_cuisine.values() {
            let mut shuffled = indices.clone();
            shuffled.shuffle(&mut rng);
            let take = ((indices.len() as f64) * held_out_fraction).round() as usize;
            let take = take.min(indices.len());
            test_indices.extend(shuffled.into_iter().take(take));
        }

        if test_indices.is_empty() || test_indices.len() == self.len() {
            return Err(Error::DegenerateSplit {
                reason: format!(
                    "fraction {held_out_fraction} leaves {} of {} recipes held out",
                    test_indices.len(),
                    self.len()
                ),
            });
        }

        let mut train = Vec::with_capacity(self.len() - test_indices.len());
        let mut test = Vec::with_capacity(test_indices.len());
        for (i, recipe) in self.recipes.iter().enumerate() {
            if test_indices.contains(&i) {
                test.push(recipe.clone());
            } else {
                train.push(recipe.clone());
            }
        }
        Ok((Corpus::from_recipes(train)?, Corpus::from_recipes(test)?))
    }

    /// Serialize to the Yummly wire schema.
    pub fn to_json(&self) -> String {
        let wire: Vec<RecipeWire> = self
            .recipes
            .iter()
            .map(|r| RecipeWire {
                id: r.id,
                cuisine: r.cuisine.clone(),
                ingredients: r.ingredients_raw.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&wire).expect("corpus serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Load a corpus file (JSON array of `{id, cuisine, ingredients}`).
/// Cuisine names are folded to lowercase. Errors carry the index of the
/// offending record.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, path)
}

fn parse_corpus(text: &str, path: &Path) -> Result<Corpus> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;

    let mut recipes = Vec::with_capacity(values.len());
    for (index, value) in values.into_iter().enumerate() {
        let wire: RecipeWire = serde_json::from_value(value).map_err(|e| Error::CorpusRecord {
            index,
            reason: e.to_string(),
        })?;
        if wire.cuisine.trim().is_empty() {
            return Err(Error::CorpusRecord {
                index,
                reason: "empty cuisine".into(),
            });
        }
        if wire.ingredients.is_empty() {
            return Err(Error::CorpusRecord {
                index,
                reason: "empty ingredient list".into(),
            });
        }
        recipes.push(Recipe {
            id: wire.id,
            cuisine: wire.cuisine.to_lowercase(),
            ingredients_raw: wire.ingredients,
            ingredients_norm: TokenSet::new(),
        });
    }
    Corpus::from_recipes(recipes)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn recipe(id: i64, cuisine: &str, ingredients: &[&str]) -> Recipe {
        Recipe {
            id,
            cuisine: cuisine.to_string(),
            ingredients_raw: ingredients.iter().map(|s| s.to_string()).collect(),
            ingredients_norm: TokenSet::new(),
        }
    }

    fn three_recipe_fixture() -> Corpus {
        Corpus::from_recipes(vec![
            recipe(1, "italian", &["spaghetti", "tomato sauce"]),
            recipe(2, "italian", &["risotto rice", "parmesan cheese"]),
            recipe(3, "mexican", &["corn tortillas", "salsa"]),
        ])
        .unwrap()
    }

    #[test]
    fn fixture_counts() {
        let corpus = three_recipe_fixture();
        assert_eq!(corpus.len(), 3);
        assert_eq!(
            corpus.cuisines().iter().cloned().collect::<Vec<_>>(),
            vec!["italian".to_string(), "mexican".to_string()]
        );
        let counts = corpus.cuisine_counts();
        assert_eq!(counts["italian"], 2);
        assert_eq!(counts["mexican"], 1);
        assert_eq!(counts.values().sum::<usize>(), corpus.len());
    }

    #[test]
    fn empty_array_loads() {
        let corpus = parse_corpus("[]", Path::new("mem")).unwrap();
        assert!(corpus.is_empty());
        assert!(corpus.cuisines().is_empty());
        assert!(corpus.vocabulary().is_empty());
    }

    #[test]
    fn duplicate_id_rejected_with_index() {
        let text = r#"[
            {"id": 1, "cuisine": "italian", "ingredients": ["pasta"]},
            {"id": 1, "cuisine": "mexican", "ingredients": ["salsa"]}
        ]"#;
        match parse_corpus(text, Path::new("mem")) {
            Err(Error::DuplicateRecipeId { index, id }) => {
                assert_eq!(index, 1);
                assert_eq!(id, 1);
            }
            other => panic!("expected duplicate-id error, got {other:?}"),
        }
    }

    #[test]
    fn missing_field_reported_with_index() {
        let text = r#"[
            {"id": 1, "cuisine": "italian", "ingredients": ["pasta"]},
            {"id": 2, "ingredients": ["salsa"]}
        ]"#;
        match parse_corpus(text, Path::new("mem")) {
            Err(Error::CorpusRecord { index, reason }) => {
                assert_eq!(index, 1);
                assert!(reason.contains("cuisine"), "reason: {reason}");
            }
            other => panic!("expected record error, got {other:?}"),
        }
    }

    #[test]
    fn cuisine_case_folded() {
        let text = r#"[{"id": 9, "cuisine": "Italian", "ingredients": ["pasta"]}]"#;
        let corpus = parse_corpus(text, Path::new("mem")).unwrap();
        assert!(corpus.cuisines().contains("italian"));
    }

    #[test]
    fn split_is_disjoint_and_deterministic() {
        let recipes: Vec<Recipe> = (0..10)
            .map(|i| recipe(i, if i < 5 { "italian" } else { "mexican" }, &["x"]))
            .collect();
        let corpus = Corpus::from_recipes(recipes).unwrap();
        let (train_a, test_a) = corpus.split(0.2, 7).unwrap();
        let (train_b, test_b) = corpus.split(0.2, 7).unwrap();
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        assert_eq!(train_a.len(), 8);
        assert_eq!(test_a.len(), 2);

        let train_ids: BTreeSet<i64> = train_a.recipes().iter().map(|r| r.id).collect();
        let test_ids: BTreeSet<i64> = test_a.recipes().iter().map(|r| r.id).collect();
        assert!(train_ids.is_disjoint(&test_ids));
        assert_eq!(train_ids.len() + test_ids.len(), corpus.len());
    }

    #[test]
    fn split_is_stratified() {
        let recipes: Vec<Recipe> = (0..100)
            .map(|i| recipe(i, if i % 2 == 0 { "italian" } else { "mexican" }, &["x"]))
            .collect();
        let corpus = Corpus::from_recipes(recipes).unwrap();
        let (_, test) = corpus.split(0.2, 3).unwrap();
        let counts = test.cuisine_counts();
        for cuisine in ["italian", "mexican"] {
            let got = counts.get(cuisine).copied().unwrap_or(0) as i64;
            assert!((got - 10).abs() <= 1, "{cuisine}: {got} held out");
        }
    }

    #[test]
    fn degenerate_splits_rejected() {
        let corpus = three_recipe_fixture();
        assert!(matches!(
            corpus.split(0.0, 1),
            Err(Error::DegenerateSplit { .. })
        ));
        assert!(matches!(
            corpus.split(1.0, 1),
            Err(Error::DegenerateSplit { .. })
        ));
        let tiny = Corpus::from_recipes(vec![recipe(1, "thai", &["rice"])]).unwrap();
        assert!(matches!(
            tiny.split(0.5, 1),
            Err(Error::DegenerateSplit { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let config = NormalizationConfig::default();
        let corpus = three_recipe_fixture().normalized(&config);
        let reloaded = parse_corpus(&corpus.to_json(), Path::new("mem"))
            .unwrap()
            .normalized(&config);
        assert_eq!(corpus, reloaded);
    }
}
