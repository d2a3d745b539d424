//! HTTP backend: a generic recognition-API client.
//!
//! The vendor is a pluggable detail: base URL, per-model path segments,
//! a request body template, and dot-paths into the JSON response are all
//! configuration. The API key comes from an environment variable.

use std::time::Duration;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::labels::{LabelBackend, LabelWire, ModelRequest, PhotoRecord, PhotoRecordWire};

/// Environment variable the API key is read from by default.
pub const API_KEY_ENV: &str = "PROFILER_API_KEY";

#[derive(Debug, Clone)]
pub struct HttpBackendConfig {
    /// Root endpoint; the model segment is appended to it.
    pub base_url: String,
    pub general_model: String,
    pub food_model: String,
    pub embedding_model: String,
    /// JSON body sent with each POST; `{photo}` is replaced by the photo
    /// reference.
    pub body_template: String,
    /// Dot-path to the concept array in a label-model response.
    pub concepts_path: String,
    pub concept_name_key: String,
    pub concept_prob_key: String,
    /// Dot-path to the vector in an embedding-model response.
    pub embedding_path: String,
    /// Optional dot-path to an EXIF DateTime string in the response.
    pub exif_path: Option<String>,
    pub api_key_env: String,
    /// Additional attempts after a retryable failure.
    pub max_retries: u32,
    pub timeout_secs: u64,
}

impl Default for HttpBackendConfig {
    fn default() -> Self {
        HttpBackendConfig {
            base_url: String::new(),
            general_model: "general".into(),
            food_model: "food".into(),
            embedding_model: "embedding".into(),
            body_template: r#"{"image": "{photo}"}"#.into(),
            concepts_path: "concepts".into(),
            concept_name_key: "name".into(),
            concept_prob_key: "value".into(),
            embedding_path: "embedding".into(),
            exif_path: Some("exif_datetime".into()),
            api_key_env: API_KEY_ENV.into(),
            max_retries: 2,
            timeout_secs: 30,
        }
    }
}

pub struct HttpBackend {
    config: HttpBackendConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(config: HttpBackendConfig) -> Result<Self> {
        let api_key = std::env::var(&config.api_key_env).map_err(|_| Error::MissingApiKey {
            name: config.api_key_env.clone(),
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| Error::Http {
                status: None,
                retryable: false,
                message: format!("client construction failed: {e}"),
            })?;
        Ok(HttpBackend {
            config,
            api_key,
            client,
        })
    }

    fn request_body(&self, photo_ref: &str) -> Result<Value> {
        let quoted = serde_json::to_string(photo_ref).expect("string serializes");
        let escaped = &quoted[1..quoted.len() - 1];
        let body = self.config.body_template.replace("{photo}", escaped);
        serde_json::from_str(&body).map_err(|e| {
            Error::schema(
                "request body template",
                format!("not valid JSON after substitution: {e}"),
            )
        })
    }

    /// POST to one model endpoint, retrying transport errors and 5xx
    /// responses up to `max_retries` extra times.
    fn post_model(&self, model: &str, photo_ref: &str) -> Result<Value> {
        let url = format!("{}/{}", self.config.base_url.trim_end_matches('/'), model);
        let body = self.request_body(photo_ref)?;
        let mut attempt = 0;
        loop {
            let outcome = self
                .client
                .post(&url)
                .header("Authorization", format!("Key {}", self.api_key))
                .json(&body)
                .send();
            match outcome {
                Err(e) => {
                    if attempt < self.config.max_retries {
                        attempt += 1;
                        std::thread::sleep(Duration::from_millis(100 * u64::from(attempt)));
                        continue;
                    }
                    return Err(Error::Http {
                        status: None,
                        retryable: true,
                        message: format!("{url}: {e}"),
                    });
                }
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        return resp.json().map_err(|e| {
                            Error::schema(&url, format!("response is not JSON: {e}"))
                        });
                    }
                    if status.is_server_error() && attempt < self.config.max_retries {
                        attempt += 1;
                        std::thread::sleep(Duration::from_millis(100 * u64::from(attempt)));
                        continue;
                    }
                    return Err(Error::Http {
                        status: Some(status.as_u16()),
                        retryable: status.is_server_error(),
                        message: format!("{url}: {}", status),
                    });
                }
            }
        }
    }

    fn extract_labels(&self, response: &Value, url: &str) -> Result<Vec<LabelWire>> {
        let concepts = json_path(response, &self.config.concepts_path)
            .and_then(Value::as_array)
            .ok_or_else(|| {
                Error::schema(url, format!("no array at {:?}", self.config.concepts_path))
            })?;
        let mut labels = Vec::with_capacity(concepts.len());
        for concept in concepts {
            let name = concept
                .get(&self.config.concept_name_key)
                .and_then(Value::as_str)
                .ok_or_else(|| {
                    Error::schema(
                        url,
                        format!("concept without {:?}", self.config.concept_name_key),
                    )
                })?;
            let p = concept
                .get(&self.config.concept_prob_key)
                .and_then(Value::as_f64)
                .ok_or_else(|| {
                    Error::schema(
                        url,
                        format!("concept without {:?}", self.config.concept_prob_key),
                    )
                })?;
            labels.push(LabelWire {
                concept: name.to_string(),
                p,
            });
        }
        Ok(labels)
    }

    fn extract_exif(&self, response: &Value) -> Option<String> {
        let path = self.config.exif_path.as_ref()?;
        json_path(response, path)
            .and_then(Value::as_str)
            .map(str::to_string)
    }
}

impl LabelBackend for HttpBackend {
    fn fetch_annotations(&self, photo_ref: &str, models: &ModelRequest) -> Result<PhotoRecord> {
        let mut wire = PhotoRecordWire {
            photo_id: photo_ref.to_string(),
            exif_datetime: None,
            general: Vec::new(),
            food: Vec::new(),
            embedding: None,
        };
        if models.general {
            let resp = self.post_model(&self.config.general_model, photo_ref)?;
            wire.general = self.extract_labels(&resp, &self.config.general_model)?;
            wire.exif_datetime = wire.exif_datetime.or_else(|| self.extract_exif(&resp));
        }
        if models.food {
            let resp = self.post_model(&self.config.food_model, photo_ref)?;
            wire.food = self.extract_labels(&resp, &self.config.food_model)?;
            wire.exif_datetime = wire.exif_datetime.or_else(|| self.extract_exif(&resp));
        }
        if models.embedding {
            let resp = self.post_model(&self.config.embedding_model, photo_ref)?;
            let vector = json_path(&resp, &self.config.embedding_path)
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    Error::schema(
                        &self.config.embedding_model,
                        format!("no array at {:?}", self.config.embedding_path),
                    )
                })?;
            let mut values = Vec::with_capacity(vector.len());
            for v in vector {
                let v = v.as_f64().ok_or_else(|| {
                    Error::schema(&self.config.embedding_model, "non-numeric embedding value")
                })?;
                values.push(v as f32);
            }
            wire.embedding = Some(values);
        }
        PhotoRecord::from_wire(wire, models, photo_ref)
    }
}

/// Walk a dot-path through a JSON value; numeric segments index arrays.
/// An empty path returns the value itself.
fn json_path<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    if path.is_empty() {
        return Some(value);
    }
    let mut current = value;
    for segment in path.split('.') {
        current = match segment.parse::<usize>() {
            Ok(index) => current.get(index)?,
            Err(_) => current.get(segment)?,
        };
    }
    Some(current)
}
