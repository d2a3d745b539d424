//! K-nearest-neighbors cuisine classification over ingredient token sets.
//!
//! Training points are corpus recipes; a query is the normalized
//! ingredient set extracted from one photo. Distances are set distances
//! (jaccard by default), neighbor ties break on smaller training id,
//! vote ties on smaller mean distance then lexicographic cuisine name.
//! An inverted index over tokens accelerates the scan; results are
//! identical to an exhaustive pass.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::normalize::TokenSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Jaccard,
    CosineBinary,
}

impl Metric {
    /// Accepts `jaccard`, `cosine`, or `cosine_binary`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "jaccard" => Ok(Metric::Jaccard),
            "cosine" | "cosine_binary" => Ok(Metric::CosineBinary),
            other => Err(Error::schema("metric", format!("unknown metric {other:?}"))),
        }
    }
}

fn distance_from_counts(shared: usize, len_a: usize, len_b: usize, metric: Metric) -> f64 {
    match metric {
        Metric::Jaccard => {
            let union = len_a + len_b - shared;
            if union == 0 {
                0.0
            } else {
                1.0 - (shared as f64) / (union as f64)
            }
        }
        Metric::CosineBinary => {
            if len_a == 0 && len_b == 0 {
                0.0
            } else if len_a == 0 || len_b == 0 {
                1.0
            } else {
                1.0 - (shared as f64) / ((len_a as f64) * (len_b as f64)).sqrt()
            }
        }
    }
}

/// Distance in [0, 1] between two token sets. Two empty sets are at
/// distance 0 under both metrics; an empty set is at distance 1 from any
/// non-empty one.
pub fn set_distance(a: &TokenSet, b: &TokenSet, metric: Metric) -> f64 {
    distance_from_counts(a.intersection_count(b), a.len(), b.len(), metric)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingPoint {
    pub id: i64,
    pub cuisine: String,
    pub tokens: TokenSet,
}

/// Immutable trained model. Queries are independent and parallelizable.
#[derive(Debug, Clone)]
pub struct KnnModel {
    /// Sorted by id ascending, so position order is id order.
    training: Vec<TrainingPoint>,
    k: usize,
    metric: Metric,
    postings: HashMap<String, Vec<u32>>,
    empty_points: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnPrediction {
    pub photo_id: String,
    pub cuisine: String,
    pub neighbor_ids: Vec<i64>,
    pub vote_counts: BTreeMap<String, usize>,
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// true cuisine -> predicted cuisine -> count
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

impl KnnModel {
    pub fn new(mut training: Vec<TrainingPoint>, k: usize, metric: Metric) -> Result<Self> {
        if k == 0 {
            return Err(Error::schema("knn", "k must be at least 1"));
        }
        if k > training.len() {
            return Err(Error::KExceedsTrainingSize {
                k,
                n: training.len(),
            });
        }
        training.sort_by_key(|p| p.id);
        for pair in training.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::schema(
                    "knn",
                    format!("duplicate training id {}", pair[0].id),
                ));
            }
        }
        let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
        let mut empty_points = Vec::new();
        for (pos, point) in training.iter().enumerate() {
            if point.tokens.is_empty() {
                empty_points.push(pos as u32);
            }
            for token in point.tokens.iter() {
                postings
                    .entry(token.to_string())
                    .or_default()
                    .push(pos as u32);
            }
        }
        Ok(KnnModel {
            training,
            k,
            metric,
            postings,
            empty_points,
        })
    }

    /// Train on a corpus whose recipes have been normalized.
    pub fn from_corpus(corpus: &Corpus, k: usize, metric: Metric) -> Result<Self> {
        let training = corpus
            .recipes()
            .iter()
            .map(|r| TrainingPoint {
                id: r.id,
                cuisine: r.cuisine.clone(),
                tokens: r.ingredients_norm.clone(),
            })
            .collect();
        Self::new(training, k, metric)
    }

    pub fn len(&self) -> usize {
        self.training.len()
    }

    pub fn is_empty(&self) -> bool {
        self.training.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// The `take` nearest training positions with their distances, ordered
    /// by (distance, training id).
    fn neighbors(&self, query: &TokenSet, take: usize) -> Vec<(f64, u32)> {
        let n = self.training.len();
        let take = take.min(n);

        if query.is_empty() {
            // empty query: empty training sets are exact matches, all
            // others sit at distance 1
            let mut out: Vec<(f64, u32)> = self.empty_points.iter().map(|&p| (0.0, p)).collect();
            if out.len() < take {
                let mut next_empty = 0;
                for p in 0..n as u32 {
                    if out.len() >= take {
                        break;
                    }
                    if next_empty < self.empty_points.len() && self.empty_points[next_empty] == p {
                        next_empty += 1;
                        continue;
                    }
                    out.push((1.0, p));
                }
            }
            out.truncate(take);
            return out;
        }

        let mut overlap = vec![0u32; n];
        for token in query.iter() {
            if let Some(postings) = self.postings.get(token) {
                for &p in postings {
                    overlap[p as usize] += 1;
                }
            }
        }
        // any shared token puts the distance strictly below 1, so overlap
        // candidates always precede zero-overlap points
        let mut candidates: Vec<(f64, u32)> = overlap
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(p, &c)| {
                let point = &self.training[p];
                let d =
                    distance_from_counts(c as usize, query.len(), point.tokens.len(), self.metric);
                (d, p as u32)
            })
            .collect();
        candidates.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("distances are finite")
                .then_with(|| a.1.cmp(&b.1))
        });
        if candidates.len() < take {
            for (p, &count) in overlap.iter().enumerate() {
                if candidates.len() >= take {
                    break;
                }
                if count == 0 {
                    candidates.push((1.0, p as u32));
                }
            }
        }
        candidates.truncate(take);
        candidates
    }

    /// Majority vote; ties go to the cuisine with the smaller mean
    /// distance among its voters, then the lexicographically smaller name.
    fn resolve(&self, neighbors: &[(f64, u32)]) -> (String, BTreeMap<String, usize>) {
        let mut votes: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
        for &(d, p) in neighbors {
            let entry = votes
                .entry(self.training[p as usize].cuisine.as_str())
                .or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += d;
        }
        let mut winner: Option<(&str, usize, f64)> = None;
        for (&cuisine, &(count, dist_sum)) in &votes {
            let mean = dist_sum / count as f64;
            let better = match winner {
                None => true,
                Some((_, best_count, best_mean)) => {
                    count > best_count || (count == best_count && mean < best_mean)
                }
            };
            if better {
                winner = Some((cuisine, count, mean));
            }
        }
        let cuisine = winner.expect("at least one neighbor").0.to_string();
        let vote_counts = votes
            .into_iter()
            .map(|(c, (count, _))| (c.to_string(), count))
            .collect();
        (cuisine, vote_counts)
    }

    fn prediction_from(&self, photo_id: &str, neighbors: &[(f64, u32)]) -> KnnPrediction {
        let (cuisine, vote_counts) = self.resolve(neighbors);
        KnnPrediction {
            photo_id: photo_id.to_string(),
            cuisine,
            neighbor_ids: neighbors
                .iter()
                .map(|&(_, p)| self.training[p as usize].id)
                .collect(),
            vote_counts,
            distances: neighbors.iter().map(|&(d, _)| d).collect(),
        }
    }

    /// Classify one query set.
    pub fn predict(&self, photo_id: &str, query: &TokenSet) -> KnnPrediction {
        let neighbors = self.neighbors(query, self.k);
        self.prediction_from(photo_id, neighbors.as_slice())
    }

    /// Predictions for several k values at once; the neighbor list is
    /// computed once per query and sliced per k.
    pub fn sweep_k(
        &self,
        queries: &[(String, TokenSet)],
        k_values: &[usize],
    ) -> Result<BTreeMap<usize, Vec<KnnPrediction>>> {
        let max_k = k_values.iter().copied().max().unwrap_or(0);
        if max_k == 0 {
            return Err(Error::schema("knn sweep", "no k values"));
        }
        if max_k > self.training.len() {
            return Err(Error::KExceedsTrainingSize {
                k: max_k,
                n: self.training.len(),
            });
        }
        let mut out: BTreeMap<usize, Vec<KnnPrediction>> =
            k_values.iter().map(|&k| (k, Vec::new())).collect();
        for (photo_id, query) in queries {
            let neighbors = self.neighbors(query, max_k);
            for &k in k_values {
                out.get_mut(&k)
                    .expect("initialized")
                    .push(self.prediction_from(photo_id, &neighbors[..k]));
            }
        }
        Ok(out)
    }

    /// Accuracy and confusion counts over a held-out corpus (normalized).
    pub fn evaluate(&self, test: &Corpus) -> Result<Evaluation> {
        if test.is_empty() {
            return Err(Error::EmptyTestSet);
        }
        let outcomes: Vec<(String, String)> = test
            .recipes()
            .par_iter()
            .map(|recipe| {
                let prediction = self.predict(&recipe.id.to_string(), &recipe.ingredients_norm);
                (recipe.cuisine.clone(), prediction.cuisine)
            })
            .collect();

        let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        let mut correct = 0;
        for (truth, predicted) in &outcomes {
            if truth == predicted {
                correct += 1;
            }
            *confusion
                .entry(truth.clone())
                .or_default()
                .entry(predicted.clone())
                .or_insert(0) += 1;
        }
        Ok(Evaluation {
            total: outcomes.len(),
            correct,
            accuracy: correct as f64 / outcomes.len() as f64,
            confusion,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(items: &[&str]) -> TokenSet {
        items.iter().copied().collect()
    }

    fn point(id: i64, cuisine: &str, items: &[&str]) -> TrainingPoint {
        TrainingPoint {
            id,
            cuisine: cuisine.to_string(),
            tokens: tokens(items),
        }
    }

    fn six_recipe_model(k: usize) -> KnnModel {
        KnnModel::new(
            vec![
                point(1, "italian", &["tomato", "basil", "mozzarella"]),
                point(2, "italian", &["tomato", "pasta"]),
                point(3, "mexican", &["tortilla", "salsa"]),
                point(4, "mexican", &["tomato", "jalapeno"]),
                point(5, "thai", &["rice", "basil", "lime"]),
                point(6, "greek", &["feta", "olive"]),
            ],
            k,
            Metric::Jaccard,
        )
        .unwrap()
    }

    #[test]
    fn distance_identities() {
        let a = tokens(&["a", "b"]);
        let b = tokens(&["b", "c"]);
        let disjoint = tokens(&["x", "y"]);
        assert_eq!(set_distance(&a, &a, Metric::Jaccard), 0.0);
        assert_eq!(set_distance(&a, &disjoint, Metric::Jaccard), 1.0);
        assert!((set_distance(&a, &b, Metric::Jaccard) - 2.0 / 3.0).abs() < 1e-12);

        let empty = TokenSet::new();
        assert_eq!(set_distance(&empty, &empty, Metric::Jaccard), 0.0);
        assert_eq!(set_distance(&empty, &empty, Metric::CosineBinary), 0.0);
        assert_eq!(set_distance(&empty, &a, Metric::Jaccard), 1.0);
        assert_eq!(set_distance(&empty, &a, Metric::CosineBinary), 1.0);

        // cosine over binary sets: 1 - |∩| / sqrt(|a||b|)
        assert!((set_distance(&a, &b, Metric::CosineBinary) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_match_dominates_k1() {
        let model = six_recipe_model(1);
        let prediction = model.predict("q", &tokens(&["tortilla", "salsa"]));
        assert_eq!(prediction.cuisine, "mexican");
        assert_eq!(prediction.neighbor_ids, vec![3]);
        assert_eq!(prediction.distances, vec![0.0]);
    }

    #[test]
    fn k_equal_to_training_size_gives_majority() {
        let mut points = vec![
            point(1, "italian", &["a"]),
            point(2, "italian", &["b"]),
            point(3, "italian", &["c"]),
            point(4, "mexican", &["d"]),
            point(5, "thai", &["e"]),
        ];
        points.sort_by_key(|p| p.id);
        let model = KnnModel::new(points, 5, Metric::Jaccard).unwrap();
        for query in [tokens(&["a"]), tokens(&["zz"]), tokens(&["d", "e"])] {
            let prediction = model.predict("q", &query);
            assert_eq!(prediction.cuisine, "italian");
            assert_eq!(prediction.vote_counts.values().sum::<usize>(), 5);
        }
    }

    #[test]
    fn six_recipe_fixture_matches_exhaustive_oracle() {
        let model = six_recipe_model(3);
        let query = tokens(&["tomato", "basil"]);
        let prediction = model.predict("q", &query);

        // oracle: exhaustive jaccard over all six recipes, independent of
        // the model's index path
        let recipes: Vec<(i64, &str, Vec<&str>)> = vec![
            (1, "italian", vec!["tomato", "basil", "mozzarella"]),
            (2, "italian", vec!["tomato", "pasta"]),
            (3, "mexican", vec!["tortilla", "salsa"]),
            (4, "mexican", vec!["tomato", "jalapeno"]),
            (5, "thai", vec!["rice", "basil", "lime"]),
            (6, "greek", vec!["feta", "olive"]),
        ];
        let q: Vec<&str> = vec!["tomato", "basil"];
        let mut scored: Vec<(f64, i64, &str)> = recipes
            .iter()
            .map(|(id, cuisine, ings)| {
                let shared = ings.iter().filter(|i| q.contains(i)).count();
                let union = ings.len() + q.len() - shared;
                (1.0 - shared as f64 / union as f64, *id, *cuisine)
            })
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let expected_ids: Vec<i64> = scored.iter().take(3).map(|s| s.1).collect();

        assert_eq!(prediction.neighbor_ids, expected_ids);
        assert_eq!(prediction.cuisine, "italian");
    }

    #[test]
    fn sweep_agrees_with_predict() {
        let model = six_recipe_model(1);
        let queries = vec![
            ("q1".to_string(), tokens(&["tomato", "basil"])),
            ("q2".to_string(), tokens(&["rice", "lime"])),
        ];
        let swept = model.sweep_k(&queries, &[1, 3, 6]).unwrap();
        assert_eq!(swept.len(), 3);
        for (photo_id, query) in &queries {
            let direct = model.predict(photo_id, query);
            let from_sweep = swept[&1].iter().find(|p| &p.photo_id == photo_id).unwrap();
            assert_eq!(&direct, from_sweep);
        }
    }

    #[test]
    fn k_bounds_enforced() {
        assert!(matches!(
            KnnModel::new(vec![point(1, "thai", &["rice"])], 2, Metric::Jaccard),
            Err(Error::KExceedsTrainingSize { .. })
        ));
        assert!(KnnModel::new(vec![point(1, "thai", &["rice"])], 0, Metric::Jaccard).is_err());
        let model = six_recipe_model(2);
        assert!(matches!(
            model.sweep_k(&[("q".into(), tokens(&["rice"]))], &[7]),
            Err(Error::KExceedsTrainingSize { .. })
        ));
    }

    #[test]
    fn empty_query_prefers_empty_training_sets() {
        let model = KnnModel::new(
            vec![
                point(1, "italian", &["tomato"]),
                point(2, "thai", &[]),
                point(3, "greek", &["feta"]),
            ],
            1,
            Metric::Jaccard,
        )
        .unwrap();
        let prediction = model.predict("q", &TokenSet::new());
        assert_eq!(prediction.cuisine, "thai");
        assert_eq!(prediction.distances, vec![0.0]);
    }

    #[test]
    fn evaluate_on_training_copy_is_perfect() {
        use crate::corpus::{Corpus, Recipe};
        let recipes: Vec<Recipe> = [
            (1, "italian", vec!["tomato", "basil"]),
            (2, "mexican", vec!["tortilla", "salsa"]),
            (3, "thai", vec!["rice", "lime"]),
        ]
        .into_iter()
        .map(|(id, cuisine, ings)| Recipe {
            id,
            cuisine: cuisine.to_string(),
            ingredients_raw: ings.iter().map(|s| s.to_string()).collect(),
            ingredients_norm: ings.iter().copied().collect(),
        })
        .collect();
        let corpus = Corpus::from_recipes(recipes).unwrap();
        let model = KnnModel::from_corpus(&corpus, 1, Metric::Jaccard).unwrap();
        let evaluation = model.evaluate(&corpus).unwrap();
        assert_eq!(evaluation.accuracy, 1.0);
        assert_eq!(evaluation.confusion["italian"]["italian"], 1);

        let empty = Corpus::from_recipes(vec![]).unwrap();
        assert!(matches!(model.evaluate(&empty), Err(Error::EmptyTestSet)));
    }

    #[test]
    fn deterministic_predictions() {
        let model = six_recipe_model(3);
        let query = tokens(&["tomato", "rice"]);
        let a = model.predict("q", &query);
        let b = model.predict("q", &query);
        assert_eq!(a, b);
    }
}
