//! TOML run configuration with validated thresholds.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use profiler_core::labels::http::HttpBackendConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_user_id")]
    pub user_id: String,
    /// 0 means the rayon default.
    #[serde(default)]
    pub jobs: usize,
    pub paths: Paths,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub knn: KnnSection,
    #[serde(default)]
    pub report: ReportSection,
    #[serde(default)]
    pub backend: BackendSection,
}

fn default_user_id() -> String {
    "user".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub corpus: PathBuf,
    pub photos: PathBuf,
    pub kb: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub dishes: Option<PathBuf>,
    #[serde(default)]
    pub stop_modifiers: Option<PathBuf>,
    #[serde(default)]
    pub ubiquitous: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub p_food: f64,
    pub p_person: f64,
    pub sim_threshold: f64,
    pub p_cut: f64,
    pub match_min: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            p_food: profiler_core::pipeline::DEFAULT_P_FOOD,
            p_person: profiler_core::pipeline::DEFAULT_P_PERSON,
            sim_threshold: profiler_core::pipeline::DEFAULT_SIM_THRESHOLD,
            p_cut: profiler_core::rules::DEFAULT_P_CUT,
            match_min: profiler_core::rules::DEFAULT_MATCH_MIN,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KnnSection {
    pub k: usize,
    /// Inclusive range like "1..25"; takes precedence over `k`.
    pub k_range: Option<String>,
    pub metric: String,
    /// Seed for held-out splits in `evaluate`.
    pub seed: u64,
}

impl Default for KnnSection {
    fn default() -> Self {
        KnnSection {
            k: 5,
            k_range: None,
            metric: "jaccard".to_string(),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportSection {
    pub methods: Vec<String>,
    pub top_n: usize,
    /// Radar axes; empty means the ten largest corpus cuisines.
    pub axes: Vec<String>,
    pub min_p: Option<f64>,
}

impl Default for ReportSection {
    fn default() -> Self {
        ReportSection {
            methods: vec!["rule".to_string(), "knn".to_string()],
            top_n: profiler_core::distinctive::DEFAULT_TOP_N,
            axes: Vec::new(),
            min_p: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackendSection {
    /// "fixture" or "http".
    pub kind: String,
    pub models: String,
    pub base_url: String,
    pub general_model: String,
    pub food_model: String,
    pub embedding_model: String,
    pub body_template: String,
    pub concepts_path: String,
    pub concept_name_key: String,
    pub concept_prob_key: String,
    pub embedding_path: String,
    pub exif_path: Option<String>,
    pub api_key_env: String,
    pub max_retries: u32,
    pub timeout_secs: u64,
}

impl Default for BackendSection {
    fn default() -> Self {
        let http = HttpBackendConfig::default();
        BackendSection {
            kind: "fixture".to_string(),
            models: "general,food,embedding".to_string(),
            base_url: http.base_url,
            general_model: http.general_model,
            food_model: http.food_model,
            embedding_model: http.embedding_model,
            body_template: http.body_template,
            concepts_path: http.concepts_path,
            concept_name_key: http.concept_name_key,
            concept_prob_key: http.concept_prob_key,
            embedding_path: http.embedding_path,
            exif_path: http.exif_path,
            api_key_env: http.api_key_env,
            max_retries: http.max_retries,
            timeout_secs: http.timeout_secs,
        }
    }
}

impl BackendSection {
    pub fn http_config(&self) -> HttpBackendConfig {
        HttpBackendConfig {
            base_url: self.base_url.clone(),
            general_model: self.general_model.clone(),
            food_model: self.food_model.clone(),
            embedding_model: self.embedding_model.clone(),
            body_template: self.body_template.clone(),
            concepts_path: self.concepts_path.clone(),
            concept_name_key: self.concept_name_key.clone(),
            concept_prob_key: self.concept_prob_key.clone(),
            embedding_path: self.embedding_path.clone(),
            exif_path: self.exif_path.clone(),
            api_key_env: self.api_key_env.clone(),
            max_retries: self.max_retries,
            timeout_secs: self.timeout_secs,
        }
    }
}

/// Parse an inclusive "a..b" range into the list of k values.
pub fn parse_k_range(spec: &str) -> Result<Vec<usize>> {
    let (lo, hi) = spec
        .split_once("..")
        .with_context(|| format!("k range {spec:?} is not of the form a..b"))?;
    let lo: usize = lo.trim().parse().context("k range start")?;
    let hi: usize = hi.trim().parse().context("k range end")?;
    if lo == 0 || hi < lo {
        bail!("k range {spec:?} is empty or starts at zero");
    }
    Ok((lo..=hi).collect())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&v) {
                bail!("{name} = {v} is outside [0, 1]");
            }
            Ok(())
        };
        unit("thresholds.p_food", self.thresholds.p_food)?;
        unit("thresholds.p_person", self.thresholds.p_person)?;
        unit("thresholds.p_cut", self.thresholds.p_cut)?;
        if !(self.thresholds.sim_threshold > 0.0 && self.thresholds.sim_threshold <= 1.0) {
            bail!(
                "thresholds.sim_threshold = {} is outside (0, 1]",
                self.thresholds.sim_threshold
            );
        }
        for method in &self.report.methods {
            if method != "rule" && method != "knn" {
                bail!("report.methods entry {method:?} is neither \"rule\" nor \"knn\"");
            }
        }
        if self.backend.kind != "fixture" && self.backend.kind != "http" {
            bail!(
                "backend.kind {:?} is neither \"fixture\" nor \"http\"",
                self.backend.kind
            );
        }
        if let Some(range) = &self.knn.k_range {
            parse_k_range(range)?;
        } else if self.knn.k == 0 {
            bail!("knn.k must be at least 1");
        }
        Ok(())
    }

    pub fn k_values(&self) -> Result<Vec<usize>> {
        match &self.knn.k_range {
            Some(range) => parse_k_range(range),
            None => Ok(vec![self.knn.k]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            "[paths]\ncorpus = \"c.json\"\nphotos = \"p\"\nkb = \"kb.txt\"\nout_dir = \"out\"\n{extra}"
        )
    }

    #[test]
    fn defaults_match_stated_thresholds() {
        let config: RunConfig = toml::from_str(&minimal("")).unwrap();
        config.validate().unwrap();
        assert_eq!(config.thresholds.p_cut, 0.75);
        assert_eq!(config.thresholds.match_min, 10);
        assert_eq!(config.thresholds.p_food, 0.9);
        assert_eq!(config.knn.k, 5);
    }

    #[test]
    fn bad_threshold_rejected() {
        let config: RunConfig = toml::from_str(&minimal("[thresholds]\np_cut = 1.5\n")).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn k_range_parsing() {
        assert_eq!(parse_k_range("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_k_range("25..25").unwrap(), vec![25]);
        assert!(parse_k_range("0..5").is_err());
        assert!(parse_k_range("9..2").is_err());
        assert!(parse_k_range("oops").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = minimal("[thresholds]\np_fod = 0.9\n");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }
}
