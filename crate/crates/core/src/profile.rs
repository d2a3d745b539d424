//! Cuisine profiles: classification tallies, label aggregates, radar
//! charts, and versioned persistence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::labels::PhotoRecord;

/// Persisted format version; bumped on any incompatible change.
pub const PROFILE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    Rule,
    Knn { k: usize },
}

/// One photo's classification outcome, method-agnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhotoOutcome {
    pub photo_id: String,
    pub cuisine: Option<String>,
}

/// Per-cuisine classification counts plus label aggregates over the
/// accepted photos' food labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuisineProfile {
    pub schema_version: u32,
    pub user_id: String,
    pub method: ProfileMethod,
    pub counts: BTreeMap<String, usize>,
    pub unclassified: usize,
    /// label -> sum of its probabilities across photos
    pub label_prob_sums: BTreeMap<String, f64>,
    /// label -> number of photos it occurred in
    pub label_counts: BTreeMap<String, usize>,
}

/// Tally classifications and label aggregates. `min_p`, when set, limits
/// the label aggregates to labels at or above that probability.
pub fn aggregate(
    user_id: &str,
    method: ProfileMethod,
    outcomes: &[PhotoOutcome],
    records: &[PhotoRecord],
    min_p: Option<f64>,
) -> Result<CuisineProfile> {
    let mut seen = BTreeSet::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut unclassified = 0;
    for outcome in outcomes {
        if !seen.insert(outcome.photo_id.as_str()) {
            return Err(Error::DuplicatePhotoId {
                photo_id: outcome.photo_id.clone(),
            });
        }
        match &outcome.cuisine {
            Some(cuisine) => *counts.entry(cuisine.clone()).or_insert(0) += 1,
            None => unclassified += 1,
        }
    }

    let mut label_prob_sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut label_counts: BTreeMap<String, usize> = BTreeMap::new();
    for record in records {
        for label in &record.food_labels {
            if min_p.is_some_and(|floor| label.probability < floor) {
                continue;
            }
            *label_prob_sums.entry(label.concept.clone()).or_insert(0.0) += label.probability;
            *label_counts.entry(label.concept.clone()).or_insert(0) += 1;
        }
    }

    Ok(CuisineProfile {
        schema_version: PROFILE_SCHEMA_VERSION,
        user_id: user_id.to_string(),
        method,
        counts,
        unclassified,
        label_prob_sums,
        label_counts,
    })
}

/// Axis order for radar charts: corpus cuisines by descending recipe
/// count, ties alphabetical.
pub fn default_axes(corpus: &Corpus, limit: usize) -> Vec<String> {
    let mut sized: Vec<(String, usize)> = corpus.cuisine_counts().into_iter().collect();
    sized.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    sized.into_iter().take(limit).map(|(c, _)| c).collect()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the profile as a radar chart: one closed polygon over
/// equiangular axes, counts normalized so the maximum touches the unit
/// radius. Byte-deterministic for a fixed input.
pub fn render_radar(profile: &CuisineProfile, axes: &[String]) -> Result<String> {
    if axes.is_empty() {
        return Err(Error::EmptyAxes);
    }
    const SIZE: f64 = 600.0;
    const CENTER: f64 = 300.0;
    const RADIUS: f64 = 210.0;
    const LABEL_RADIUS: f64 = 250.0;

    let max_count = axes
        .iter()
        .map(|axis| profile.counts.get(axis).copied().unwrap_or(0))
        .max()
        .unwrap_or(0);

    let angle_of = |i: usize| -> f64 {
        std::f64::consts::TAU * (i as f64) / (axes.len() as f64) - std::f64::consts::FRAC_PI_2
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <title>{} cuisine profile</title>"#,
        xml_escape(&profile.user_id)
    )
    .unwrap();

    // grid rings
    for step in 1..=4 {
        let r = RADIUS * (step as f64) / 4.0;
        writeln!(
            svg,
            r##"  <circle cx="{CENTER}" cy="{CENTER}" r="{r:.2}" fill="none" stroke="#ddd" stroke-width="1"/>"##
        )
        .unwrap();
    }

    // axis spokes and labels
    for (i, axis) in axes.iter().enumerate() {
        let angle = angle_of(i);
        let x = CENTER + RADIUS * angle.cos();
        let y = CENTER + RADIUS * angle.sin();
        writeln!(
            svg,
            r##"  <line x1="{CENTER}" y1="{CENTER}" x2="{x:.2}" y2="{y:.2}" stroke="#bbb" stroke-width="1"/>"##
        )
        .unwrap();
        let lx = CENTER + LABEL_RADIUS * angle.cos();
        let ly = CENTER + LABEL_RADIUS * angle.sin();
        let count = profile.counts.get(axis).copied().unwrap_or(0);
        writeln!(
            svg,
            r#"  <text x="{lx:.2}" y="{ly:.2}" font-size="14" text-anchor="middle" dominant-baseline="middle">{} ({count})</text>"#,
            xml_escape(axis)
        )
        .unwrap();
    }

    // the profile polygon itself
    let points: Vec<String> = axes
        .iter()
        .enumerate()
        .map(|(i, axis)| {
            let count = profile.counts.get(axis).copied().unwrap_or(0);
            let value = if max_count == 0 {
                0.0
            } else {
                count as f64 / max_count as f64
            };
            let angle = angle_of(i);
            let x = CENTER + RADIUS * value * angle.cos();
            let y = CENTER + RADIUS * value * angle.sin();
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(
        svg,
        r#"  <polygon points="{}" fill="rgba(70,130,180,0.35)" stroke="steelblue" stroke-width="2"/>"#,
        points.join(" ")
    )
    .unwrap();
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Write the profile as versioned JSON.
pub fn save_profile(profile: &CuisineProfile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(profile).expect("profile serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Read a profile back, rejecting unknown schema versions explicitly
/// rather than misparsing them.
pub fn load_profile(path: impl AsRef<Path>) -> Result<CuisineProfile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let found = value
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::schema(path.display().to_string(), "missing schema_version"))?
        as u32;
    if found != PROFILE_SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            expected: PROFILE_SCHEMA_VERSION,
            found,
        });
    }
    serde_json::from_value(value)
        .map_err(|e| Error::schema(path.display().to_string(), e.to_string()))
}
