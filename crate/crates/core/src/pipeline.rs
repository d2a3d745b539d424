//! Photo-stream filtering: food gate, people removal, exact-duplicate
//! removal by EXIF DateTime, near-duplicate removal by embedding cosine.
//!
//! Stage order is fixed; the report accounts for every input photo
//! exactly once.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{embedding_similarity, PhotoRecord};
use crate::normalize::{normalize_phrase, read_token_lines, NormalizationConfig, TokenSet};

/// Default probability floor for the food gate.
pub const DEFAULT_P_FOOD: f64 = 0.9;
/// Default probability floor for the person gate.
pub const DEFAULT_P_PERSON: f64 = 0.85;
/// Default cosine threshold above which two photos count as near
/// duplicates.
pub const DEFAULT_SIM_THRESHOLD: f64 = 0.95;

/// General-model concepts that indicate a person is in the photo.
pub const DEFAULT_PERSON_CONCEPTS: [&str; 7] =
    ["people", "person", "man", "woman", "child", "girl", "boy"];

/// Food-concept tokens compiled from a seed image set; gates food vs.
/// non-food photos.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoodKnowledgeBase {
    pub food_concepts: TokenSet,
    pub built_from: String,
}

/// Union of the normalized food-label tokens across a seed record set.
pub fn build_knowledge_base(
    seeds: &[PhotoRecord],
    config: &NormalizationConfig,
) -> Result<FoodKnowledgeBase> {
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    let mut food_concepts = TokenSet::new();
    for record in seeds {
        for label in &record.food_labels {
            food_concepts.absorb(&normalize_phrase(&label.concept, config));
        }
    }
    Ok(FoodKnowledgeBase {
        food_concepts,
        built_from: format!("{} seed records", seeds.len()),
    })
}

impl FoodKnowledgeBase {
    /// Load a token-list file (same format as the stop-modifier list).
    pub fn from_token_file(
        path: impl AsRef<std::path::Path>,
        config: &NormalizationConfig,
    ) -> Result<Self> {
        let path = path.as_ref();
        let mut food_concepts = TokenSet::new();
        for token in read_token_lines(path)? {
            food_concepts.absorb(&normalize_phrase(&token, config));
        }
        Ok(FoodKnowledgeBase {
            food_concepts,
            built_from: path.display().to_string(),
        })
    }
}

/// Thresholds and person-concept set for one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub p_food: f64,
    pub p_person: f64,
    pub sim_threshold: f64,
    pub person_concepts: TokenSet,
}

impl PipelineConfig {
    pub fn new(norm: &NormalizationConfig) -> Self {
        let mut person_concepts = TokenSet::new();
        for concept in DEFAULT_PERSON_CONCEPTS {
            person_concepts.absorb(&normalize_phrase(concept, norm));
        }
        PipelineConfig {
            p_food: DEFAULT_P_FOOD,
            p_person: DEFAULT_P_PERSON,
            sim_threshold: DEFAULT_SIM_THRESHOLD,
            person_concepts,
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::new(&NormalizationConfig::default())
    }
}

/// Where a photo ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Accepted,
    RejectedNonfood,
    RejectedPerson,
    RejectedExactDup,
    RejectedNearDup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotoDisposition {
    pub photo_id: String,
    pub stage: Stage,
    pub reason: String,
}

/// Per-stage counters plus one disposition per input photo, in input
/// order. `input_count` always equals `accepted` plus the rejections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub input_count: usize,
    pub rejected_nonfood: usize,
    pub rejected_people: usize,
    pub rejected_exact_dup: usize,
    pub rejected_near_dup: usize,
    pub accepted: usize,
    pub dispositions: Vec<PhotoDisposition>,
}

impl PipelineReport {
    /// Conservation check: every input is accounted for exactly once.
    pub fn is_balanced(&self) -> bool {
        self.input_count
            == self.accepted
                + self.rejected_nonfood
                + self.rejected_people
                + self.rejected_exact_dup
                + self.rejected_near_dup
            && self.dispositions.len() == self.input_count
    }
}

/// True (with the matched concepts) when at least one general label at or
/// above `p_min` normalizes into the knowledge base.
pub fn is_food_photo(
    record: &PhotoRecord,
    kb: &FoodKnowledgeBase,
    p_min: f64,
    norm: &NormalizationConfig,
) -> (bool, Vec<String>) {
    let mut matched = Vec::new();
    for label in &record.general_labels {
        if label.probability < p_min {
            continue;
        }
        let tokens = normalize_phrase(&label.concept, norm);
        if tokens.shares_token(&kb.food_concepts) {
            matched.push(label.concept.clone());
        }
    }
    (!matched.is_empty(), matched)
}

/// The first general label at or above `p_min` whose normalized tokens
/// hit the person-concept set, if any. Token-level match: "mannequin"
/// does not trigger it.
pub fn has_person(
    record: &PhotoRecord,
    person_concepts: &TokenSet,
    p_min: f64,
    norm: &NormalizationConfig,
) -> Option<String> {
    record
        .general_labels
        .iter()
        .filter(|label| label.probability >= p_min)
        .find(|label| normalize_phrase(&label.concept, norm).shares_token(person_concepts))
        .map(|label| label.concept.clone())
}

/// Among records sharing an identical non-empty EXIF DateTime, only the
/// first in input order survives. Records without a DateTime always
/// survive. Returns (survivor indices, (removed index, kept index)).
pub fn dedup_exact(records: &[PhotoRecord]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut first_seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut survivors = Vec::new();
    let mut removed = Vec::new();
    for (i, record) in records.iter().enumerate() {
        match record.exif_datetime.as_deref() {
            None => survivors.push(i),
            Some(dt) => match first_seen.get(dt) {
                Some(&kept) => removed.push((i, kept)),
                None => {
                    first_seen.insert(dt, i);
                    survivors.push(i);
                }
            },
        }
    }
    (survivors, removed)
}

/// Removal record for [`dedup_near`]: (removed index, kept index, cosine).
pub type NearDupRemoval = (usize, usize, f64);

/// Greedy sweep in input order: a record is removed iff its cosine
/// similarity to an already-accepted record reaches `sim_threshold`.
/// Records without an embedding pass through untouched and are never
/// compared against. Returns (survivor indices, removals).
pub fn dedup_near(
    records: &[PhotoRecord],
    sim_threshold: f64,
) -> Result<(Vec<usize>, Vec<NearDupRemoval>)> {
    let mut survivors = Vec::new();
    let mut accepted_with_embedding: Vec<usize> = Vec::new();
    let mut removed = Vec::new();
    for (i, record) in records.iter().enumerate() {
        let Some(embedding) = record.embedding.as_ref() else {
            survivors.push(i);
            continue;
        };
        let mut duplicate_of = None;
        for &kept in &accepted_with_embedding {
            let kept_embedding = records[kept]
                .embedding
                .as_ref()
                .expect("indexed with embedding");
            let sim = embedding_similarity(embedding, kept_embedding)?;
            if sim >= sim_threshold {
                duplicate_of = Some((kept, sim));
                break;
            }
        }
        match duplicate_of {
            Some((kept, sim)) => removed.push((i, kept, sim)),
            None => {
                survivors.push(i);
                accepted_with_embedding.push(i);
            }
        }
    }
    Ok((survivors, removed))
}

/// Run all four stages in order: food gate, people gate, exact dedup,
/// near dedup. The per-photo gates run in parallel; output is identical
/// to the sequential result.
pub fn run_pipeline(
    records: Vec<PhotoRecord>,
    kb: &FoodKnowledgeBase,
    config: &PipelineConfig,
    norm: &NormalizationConfig,
) -> Result<(Vec<PhotoRecord>, PipelineReport)> {
    let input_count = records.len();
    let mut seen_ids = BTreeSet::new();
    let mut input_order = Vec::with_capacity(input_count);
    for record in &records {
        if !seen_ids.insert(record.photo_id.clone()) {
            return Err(Error::DuplicatePhotoId {
                photo_id: record.photo_id.clone(),
            });
        }
        input_order.push(record.photo_id.clone());
    }

    // input order -> disposition, filled stage by stage
    let mut dispositions: BTreeMap<String, PhotoDisposition> = BTreeMap::new();
    let mut reject = |r: &PhotoRecord, stage: Stage, reason: String| {
        dispositions.insert(
            r.photo_id.clone(),
            PhotoDisposition {
                photo_id: r.photo_id.clone(),
                stage,
                reason,
            },
        );
    };

    enum GateOutcome {
        Food,
        NonFood,
        Person(String),
    }
    let gate_results: Vec<GateOutcome> = records
        .par_iter()
        .map(|record| {
            let (is_food, _) = is_food_photo(record, kb, config.p_food, norm);
            if !is_food {
                return GateOutcome::NonFood;
            }
            match has_person(record, &config.person_concepts, config.p_person, norm) {
                Some(concept) => GateOutcome::Person(concept),
                None => GateOutcome::Food,
            }
        })
        .collect();

    let mut rejected_nonfood = 0;
    let mut rejected_people = 0;
    let mut after_gates = Vec::new();
    for (record, outcome) in records.into_iter().zip(gate_results) {
        match outcome {
            GateOutcome::NonFood => {
                rejected_nonfood += 1;
                reject(
                    &record,
                    Stage::RejectedNonfood,
                    format!("no general label >= {} in knowledge base", config.p_food),
                );
            }
            GateOutcome::Person(concept) => {
                rejected_people += 1;
                reject(
                    &record,
                    Stage::RejectedPerson,
                    format!("person concept {concept:?}"),
                );
            }
            GateOutcome::Food => after_gates.push(record),
        }
    }

    let (survivor_idx, removed_exact) = dedup_exact(&after_gates);
    for &(removed, kept) in &removed_exact {
        reject(
            &after_gates[removed],
            Stage::RejectedExactDup,
            format!("same DateTime as photo {:?}", after_gates[kept].photo_id),
        );
    }
    let keep: BTreeSet<usize> = survivor_idx.into_iter().collect();
    let after_exact: Vec<PhotoRecord> = after_gates
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, r)| r)
        .collect();
    let rejected_exact_dup = removed_exact.len();

    let (survivor_idx, removed_near) = dedup_near(&after_exact, config.sim_threshold)?;
    for &(removed, kept, sim) in &removed_near {
        reject(
            &after_exact[removed],
            Stage::RejectedNearDup,
            format!(
                "cosine {:.4} to photo {:?}",
                sim, after_exact[kept].photo_id
            ),
        );
    }
    let keep: BTreeSet<usize> = survivor_idx.into_iter().collect();
    let accepted: Vec<PhotoRecord> = after_exact
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, r)| r)
        .collect();
    let rejected_near_dup = removed_near.len();

    for record in &accepted {
        dispositions.insert(
            record.photo_id.clone(),
            PhotoDisposition {
                photo_id: record.photo_id.clone(),
                stage: Stage::Accepted,
                reason: String::new(),
            },
        );
    }

    let ordered: Vec<PhotoDisposition> = input_order
        .iter()
        .map(|id| {
            dispositions
                .get(id)
                .expect("every input dispatched")
                .clone()
        })
        .collect();

    let report = PipelineReport {
        input_count,
        rejected_nonfood,
        rejected_people,
        rejected_exact_dup,
        rejected_near_dup,
        accepted: accepted.len(),
        dispositions: ordered,
    };
    debug_assert!(report.is_balanced());
    Ok((accepted, report))
}
