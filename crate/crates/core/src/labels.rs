//! Image-recognition results: label annotations, embeddings, photo
//! records, and the backends that produce them.
//!
//! Two backends implement [`LabelBackend`]: JSON fixture sidecars (one
//! `<photo_id>.labels.json` per photo) for offline and test use, and a
//! configurable HTTP client.

pub mod fixture;
pub mod http;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension every embedding vector must have.
pub const EMBEDDING_DIM: usize = 1024;

/// Which recognition model produced a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    General,
    Food,
}

/// One recognition concept on an image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelAnnotation {
    pub concept: String,
    pub probability: f64,
    pub model: ModelKind,
}

/// Fixed-length image vector; visually similar images land close together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding(Vec<f32>);

impl Embedding {
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if values.len() != EMBEDDING_DIM {
            return Err(Error::schema(
                "embedding",
                format!("expected {} values, got {}", EMBEDDING_DIM, values.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::schema(
                "embedding",
                format!("non-finite value {bad}"),
            ));
        }
        Ok(Embedding(values))
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }
}

/// Cosine similarity in [-1, 1]. Errors on a zero-norm vector.
pub fn embedding_similarity(a: &Embedding, b: &Embedding) -> Result<f64> {
    let mut dot = 0.0f64;
    let mut norm_a = 0.0f64;
    let mut norm_b = 0.0f64;
    for (&x, &y) in a.0.iter().zip(&b.0) {
        dot += f64::from(x) * f64::from(y);
        norm_a += f64::from(x) * f64::from(x);
        norm_b += f64::from(y) * f64::from(y);
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(Error::ZeroNormEmbedding);
    }
    Ok(dot / (norm_a.sqrt() * norm_b.sqrt()))
}

/// Everything known about one photo after annotation. Label lists are
/// sorted by probability descending.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotoRecord {
    pub photo_id: String,
    /// EXIF DateTime as written by the camera, `YYYY:MM:DD HH:MM:SS`.
    pub exif_datetime: Option<String>,
    pub general_labels: Vec<LabelAnnotation>,
    pub food_labels: Vec<LabelAnnotation>,
    pub embedding: Option<Embedding>,
}

/// Which model outputs a fetch should populate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelRequest {
    pub general: bool,
    pub food: bool,
    pub embedding: bool,
}

impl Default for ModelRequest {
    fn default() -> Self {
        ModelRequest {
            general: true,
            food: true,
            embedding: true,
        }
    }
}

impl ModelRequest {
    pub fn all() -> Self {
        Self::default()
    }

    /// Parse a comma-separated list like `general,food,embedding`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut req = ModelRequest {
            general: false,
            food: false,
            embedding: false,
        };
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "general" => req.general = true,
                "food" => req.food = true,
                "embedding" => req.embedding = true,
                other => {
                    return Err(Error::schema(
                        "model request",
                        format!("unknown model {other:?}"),
                    ))
                }
            }
        }
        Ok(req)
    }
}

/// Source of photo annotations. Fetches are independent; implementations
/// must be safe to call from several threads at once.
pub trait LabelBackend: Send + Sync {
    /// Resolve one photo reference into a [`PhotoRecord`] carrying the
    /// requested model outputs. Missing EXIF is not an error.
    fn fetch_annotations(&self, photo_ref: &str, models: &ModelRequest) -> Result<PhotoRecord>;
}

/// Wire schema shared by fixture sidecars and fetched-record files:
/// `{"photo_id", "exif_datetime", "general": [{"concept", "p"}], "food":
/// [...], "embedding": [...]|null}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhotoRecordWire {
    pub photo_id: String,
    pub exif_datetime: Option<String>,
    #[serde(default)]
    pub general: Vec<LabelWire>,
    #[serde(default)]
    pub food: Vec<LabelWire>,
    pub embedding: Option<Vec<f32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelWire {
    pub concept: String,
    pub p: f64,
}

fn valid_exif_datetime(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 19 {
        return false;
    }
    for (i, &c) in b.iter().enumerate() {
        let ok = match i {
            4 | 7 => c == b':',
            10 => c == b' ',
            13 | 16 => c == b':',
            _ => c.is_ascii_digit(),
        };
        if !ok {
            return false;
        }
    }
    true
}

fn labels_from_wire(
    wire: Vec<LabelWire>,
    model: ModelKind,
    context: &str,
) -> Result<Vec<LabelAnnotation>> {
    let mut labels = Vec::with_capacity(wire.len());
    for entry in wire {
        if entry.concept.is_empty() {
            return Err(Error::schema(context, "empty concept"));
        }
        if !(0.0..=1.0).contains(&entry.p) || entry.p.is_nan() {
            return Err(Error::schema(
                context,
                format!(
                    "probability {} out of [0, 1] for {:?}",
                    entry.p, entry.concept
                ),
            ));
        }
        labels.push(LabelAnnotation {
            concept: entry.concept,
            probability: entry.p,
            model,
        });
    }
    // stable: equal probabilities keep payload order
    labels.sort_by(|a, b| b.probability.partial_cmp(&a.probability).expect("no NaN"));
    Ok(labels)
}

impl PhotoRecord {
    /// Validate a wire record and keep the requested model outputs.
    pub fn from_wire(wire: PhotoRecordWire, models: &ModelRequest, context: &str) -> Result<Self> {
        if wire.photo_id.is_empty() {
            return Err(Error::schema(context, "empty photo_id"));
        }
        let exif_datetime = match wire.exif_datetime {
            Some(s) if s.is_empty() => None,
            Some(s) => {
                if !valid_exif_datetime(&s) {
                    return Err(Error::schema(
                        context,
                        format!("EXIF DateTime {s:?} is not YYYY:MM:DD HH:MM:SS"),
                    ));
                }
                Some(s)
            }
            None => None,
        };
        let general_labels = if models.general {
            labels_from_wire(wire.general, ModelKind::General, context)?
        } else {
            Vec::new()
        };
        let food_labels = if models.food {
            labels_from_wire(wire.food, ModelKind::Food, context)?
        } else {
            Vec::new()
        };
        let embedding = if models.embedding {
            match wire.embedding {
                Some(values) => Some(Embedding::new(values)?),
                None => {
                    return Err(Error::MissingEmbedding {
                        photo_id: wire.photo_id,
                    })
                }
            }
        } else {
            None
        };
        Ok(PhotoRecord {
            photo_id: wire.photo_id,
            exif_datetime,
            general_labels,
            food_labels,
            embedding,
        })
    }

    /// Validate a wire record, keeping exactly the model outputs present
    /// in it. Used when reading back already-fetched records, where a
    /// missing embedding means it was never requested.
    pub fn from_wire_present(wire: PhotoRecordWire, context: &str) -> Result<Self> {
        let models = ModelRequest {
            general: true,
            food: true,
            embedding: wire.embedding.is_some(),
        };
        Self::from_wire(wire, &models, context)
    }

    pub fn to_wire(&self) -> PhotoRecordWire {
        let label = |l: &LabelAnnotation| LabelWire {
            concept: l.concept.clone(),
            p: l.probability,
        };
        PhotoRecordWire {
            photo_id: self.photo_id.clone(),
            exif_datetime: self.exif_datetime.clone(),
            general: self.general_labels.iter().map(label).collect(),
            food: self.food_labels.iter().map(label).collect(),
            embedding: self.embedding.as_ref().map(|e| e.values().to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_embedding(axis: usize) -> Embedding {
        let mut v = vec![0.0f32; EMBEDDING_DIM];
        v[axis] = 1.0;
        Embedding::new(v).unwrap()
    }

    #[test]
    fn similarity_identities() {
        let mut v = vec![0.0f32; EMBEDDING_DIM];
        v[0] = 0.5;
        v[1] = 0.25;
        let a = Embedding::new(v.clone()).unwrap();
        assert!((embedding_similarity(&a, &a).unwrap() - 1.0).abs() < 1e-12);

        let b = unit_embedding(2);
        assert!(embedding_similarity(&a, &b).unwrap().abs() < 1e-12);

        let neg = Embedding::new(v.iter().map(|x| -x).collect()).unwrap();
        assert!((embedding_similarity(&a, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_scale_invariant_and_symmetric() {
        let a = unit_embedding(0);
        let mut v = vec![0.0f32; EMBEDDING_DIM];
        v[0] = 3.0;
        v[5] = 4.0;
        let b = Embedding::new(v.clone()).unwrap();
        let scaled = Embedding::new(v.iter().map(|x| x * 2.5).collect()).unwrap();
        let sim_ab = embedding_similarity(&a, &b).unwrap();
        let sim_ba = embedding_similarity(&b, &a).unwrap();
        let sim_as = embedding_similarity(&a, &scaled).unwrap();
        assert!((sim_ab - sim_ba).abs() < 1e-12);
        assert!((sim_ab - sim_as).abs() < 1e-12);
        assert!((sim_ab - 0.6).abs() < 1e-9);
    }

    #[test]
    fn zero_norm_rejected() {
        let zero = Embedding::new(vec![0.0; EMBEDDING_DIM]).unwrap();
        let a = unit_embedding(1);
        assert!(matches!(
            embedding_similarity(&zero, &a),
            Err(Error::ZeroNormEmbedding)
        ));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(Embedding::new(vec![0.5; 12]).is_err());
    }

    #[test]
    fn wire_probability_range_enforced() {
        let wire = PhotoRecordWire {
            photo_id: "p1".into(),
            exif_datetime: None,
            general: vec![],
            food: vec![LabelWire {
                concept: "pizza".into(),
                p: 1.7,
            }],
            embedding: None,
        };
        let models = ModelRequest {
            general: false,
            food: true,
            embedding: false,
        };
        assert!(matches!(
            PhotoRecord::from_wire(wire, &models, "test"),
            Err(Error::SchemaViolation { .. })
        ));
    }

    #[test]
    fn labels_sorted_descending() {
        let wire = PhotoRecordWire {
            photo_id: "p1".into(),
            exif_datetime: Some("2023:06:10 12:30:00".into()),
            general: vec![],
            food: vec![
                LabelWire {
                    concept: "bread".into(),
                    p: 0.4,
                },
                LabelWire {
                    concept: "pizza".into(),
                    p: 0.9,
                },
                LabelWire {
                    concept: "cheese".into(),
                    p: 0.7,
                },
            ],
            embedding: None,
        };
        let models = ModelRequest {
            general: false,
            food: true,
            embedding: false,
        };
        let record = PhotoRecord::from_wire(wire, &models, "test").unwrap();
        let concepts: Vec<&str> = record
            .food_labels
            .iter()
            .map(|l| l.concept.as_str())
            .collect();
        assert_eq!(concepts, vec!["pizza", "cheese", "bread"]);
    }

    #[test]
    fn exif_format_checked() {
        let wire = PhotoRecordWire {
            photo_id: "p1".into(),
            exif_datetime: Some("2023-06-10T12:30:00".into()),
            general: vec![],
            food: vec![],
            embedding: None,
        };
        let models = ModelRequest {
            general: false,
            food: false,
            embedding: false,
        };
        assert!(PhotoRecord::from_wire(wire, &models, "test").is_err());
        assert!(valid_exif_datetime("2023:06:10 12:30:00"));
        assert!(!valid_exif_datetime("2023:06:10"));
    }

    #[test]
    fn missing_embedding_only_when_requested() {
        let wire = PhotoRecordWire {
            photo_id: "p1".into(),
            exif_datetime: None,
            general: vec![],
            food: vec![],
            embedding: None,
        };
        let without = ModelRequest {
            general: true,
            food: true,
            embedding: false,
        };
        assert!(PhotoRecord::from_wire(wire.clone(), &without, "test").is_ok());
        let with = ModelRequest::all();
        assert!(matches!(
            PhotoRecord::from_wire(wire, &with, "test"),
            Err(Error::MissingEmbedding { .. })
        ));
    }
}
