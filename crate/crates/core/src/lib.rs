//! Cuisine preference profiling from food-photo label streams.
//!
//! The library covers the full flow: loading a recipe corpus, normalizing
//! ingredient phrases and recognition labels, deriving per-cuisine
//! distinctive ingredients, filtering a photo stream down to unique food
//! photos, classifying each photo by dish-name/ingredient rules or by a
//! KNN model trained on the corpus, and aggregating the results into a
//! per-user cuisine profile with radar-chart output.

pub mod corpus;
pub mod distinctive;
pub mod error;
pub mod knn;
pub mod labels;
pub mod normalize;
pub mod pipeline;
pub mod profile;
pub mod rules;

pub use corpus::{Corpus, Recipe};
pub use distinctive::DistinctiveTable;
pub use error::{Error, Result};
pub use knn::{KnnModel, KnnPrediction, Metric};
pub use labels::{Embedding, LabelAnnotation, ModelKind, PhotoRecord};
pub use normalize::{NormalizationConfig, TokenSet};
pub use pipeline::{FoodKnowledgeBase, PipelineConfig, PipelineReport};
pub use profile::CuisineProfile;
pub use rules::{DishNameTable, RuleClassification, RuleConfig};
