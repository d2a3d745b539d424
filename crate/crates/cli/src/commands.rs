//! Subcommand implementations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use profiler_core::corpus::load_corpus;
use profiler_core::distinctive::{default_ubiquitous, DistinctiveTable};
use profiler_core::knn::{KnnModel, KnnPrediction, Metric};
use profiler_core::labels::fixture::{list_sidecars, FixtureBackend};
use profiler_core::labels::http::HttpBackend;
use profiler_core::labels::{LabelBackend, ModelRequest, PhotoRecord, PhotoRecordWire};
use profiler_core::normalize::{normalize_phrase, read_token_lines, NormalizationConfig, TokenSet};
use profiler_core::pipeline::{
    build_knowledge_base, run_pipeline, FoodKnowledgeBase, PipelineConfig, PipelineReport,
};
use profiler_core::profile::{
    aggregate, default_axes, render_radar, save_profile, PhotoOutcome, ProfileMethod,
};
use profiler_core::rules::{DishNameTable, RuleClassification, RuleClassifier, RuleConfig};

use crate::config::RunConfig;

// ---------------------------------------------------------------- helpers

fn norm_config(stop_modifiers: Option<&Path>) -> Result<NormalizationConfig> {
    match stop_modifiers {
        Some(path) => Ok(NormalizationConfig::with_stop_modifiers_from(path)?),
        None => Ok(NormalizationConfig::default()),
    }
}

fn ubiquitous_tokens(path: Option<&Path>, norm: &NormalizationConfig) -> Result<TokenSet> {
    match path {
        Some(path) => {
            let mut out = TokenSet::new();
            for token in read_token_lines(path)? {
                out.absorb(&normalize_phrase(&token, norm));
            }
            Ok(out)
        }
        None => Ok(default_ubiquitous(norm)),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    write_text(path, &out)
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        items.push(
            serde_json::from_str(line)
                .with_context(|| format!("{}:{}: bad record", path.display(), i + 1))?,
        );
    }
    Ok(items)
}

/// Load photo records either from a directory of sidecar fixtures or from
/// a records.jsonl file produced by `fetch`.
fn load_records(path: &Path) -> Result<Vec<PhotoRecord>> {
    if path.is_dir() {
        return list_sidecars(path)?
            .iter()
            .map(|p| {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read {}", p.display()))?;
                let wire: PhotoRecordWire = serde_json::from_str(&text)
                    .with_context(|| format!("cannot parse {}", p.display()))?;
                Ok(PhotoRecord::from_wire_present(
                    wire,
                    &p.display().to_string(),
                )?)
            })
            .collect();
    }
    let wires: Vec<PhotoRecordWire> = read_jsonl(path)?;
    wires
        .into_iter()
        .map(|w| {
            Ok(PhotoRecord::from_wire_present(
                w,
                &path.display().to_string(),
            )?)
        })
        .collect()
}

fn load_kb(path: &Path, norm: &NormalizationConfig) -> Result<FoodKnowledgeBase> {
    if path.is_dir() {
        let seeds = load_records(path)?;
        Ok(build_knowledge_base(&seeds, norm)?)
    } else {
        Ok(FoodKnowledgeBase::from_token_file(path, norm)?)
    }
}

/// Union of the normalized food-label tokens of one photo: the KNN query.
fn knn_query(record: &PhotoRecord, norm: &NormalizationConfig) -> TokenSet {
    let mut query = TokenSet::new();
    for label in &record.food_labels {
        query.absorb(&normalize_phrase(&label.concept, norm));
    }
    query
}

// --------------------------------------------------------------- commands

pub fn corpus_stats(path: &Path, json: bool) -> Result<()> {
    let corpus = load_corpus(path)?;
    let counts = corpus.cuisine_counts();
    if json {
        #[derive(Serialize)]
        struct Stats<'a> {
            recipes: usize,
            cuisines: usize,
            distinct_ingredients: usize,
            counts: &'a BTreeMap<String, usize>,
        }
        let stats = Stats {
            recipes: corpus.len(),
            cuisines: corpus.cuisines().len(),
            distinct_ingredients: corpus.vocabulary().len(),
            counts: &counts,
        };
        println!("{}", serde_json::to_string_pretty(&stats)?);
        return Ok(());
    }
    let mut ranked: Vec<(&String, &usize)> = counts.iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let width = ranked
        .iter()
        .map(|(c, _)| c.len())
        .max()
        .unwrap_or(7)
        .max(7);
    for (cuisine, count) in ranked {
        println!("{cuisine:<width$}  {count:>6}");
    }
    println!("{:<width$}  {:>6}", "total", corpus.len());
    println!(
        "{} cuisines, {} distinct ingredients",
        corpus.cuisines().len(),
        corpus.vocabulary().len()
    );
    Ok(())
}

pub fn distinctive(
    corpus_path: &Path,
    top_n: usize,
    json: bool,
    ubiquitous_path: Option<&Path>,
    stop_modifiers: Option<&Path>,
) -> Result<()> {
    let norm = norm_config(stop_modifiers)?;
    let corpus = load_corpus(corpus_path)?;
    let ubiquitous = ubiquitous_tokens(ubiquitous_path, &norm)?;
    let table = DistinctiveTable::build(&corpus, &norm, ubiquitous, top_n);
    if json {
        println!("{}", serde_json::to_string_pretty(&table)?);
        return Ok(());
    }
    for (cuisine, set) in &table.distinctive {
        let entries: Vec<String> = set.iter().map(|e| e.to_string()).collect();
        println!("{cuisine}: {}", entries.join(", "));
    }
    Ok(())
}

pub struct FetchArgs<'a> {
    pub photos: &'a Path,
    pub backend: &'a str,
    pub models: &'a str,
    pub out: Option<&'a Path>,
    pub jobs: usize,
    pub config: Option<&'a Path>,
}

pub fn fetch(args: FetchArgs<'_>) -> Result<()> {
    configure_jobs(args.jobs)?;
    let models = ModelRequest::parse(args.models)?;
    let records = match args.backend {
        "fixture" => {
            let sidecars = list_sidecars(args.photos)?;
            let backend = FixtureBackend::new(args.photos);
            let refs: Vec<String> = sidecars
                .iter()
                .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
                .collect();
            fetch_all(&backend, &refs, &models)?
        }
        "http" => {
            let section = match args.config {
                Some(path) => RunConfig::load(path)?.backend,
                None => bail!("--backend http needs --config for the endpoint settings"),
            };
            let backend = HttpBackend::new(section.http_config())?;
            let refs: Vec<String> = std::fs::read_to_string(args.photos)
                .with_context(|| format!("cannot read photo list {}", args.photos.display()))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect();
            fetch_all(&backend, &refs, &models)?
        }
        other => bail!("unknown backend {other:?} (expected fixture or http)"),
    };

    let wires: Vec<PhotoRecordWire> = records.iter().map(PhotoRecord::to_wire).collect();
    match args.out {
        Some(path) => write_jsonl(path, &wires)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for wire in &wires {
                writeln!(lock, "{}", serde_json::to_string(wire)?)?;
            }
        }
    }
    eprintln!("fetched {} records", records.len());
    Ok(())
}

fn fetch_all(
    backend: &dyn LabelBackend,
    refs: &[String],
    models: &ModelRequest,
) -> Result<Vec<PhotoRecord>> {
    let fetched: std::result::Result<Vec<PhotoRecord>, profiler_core::Error> = refs
        .par_iter()
        .map(|r| backend.fetch_annotations(r, models))
        .collect();
    Ok(fetched?)
}

pub struct FilterArgs<'a> {
    pub photos: &'a Path,
    pub kb: &'a Path,
    pub p_food: f64,
    pub p_person: f64,
    pub sim_threshold: f64,
    pub report: &'a Path,
    pub out: Option<&'a Path>,
}

pub fn filter(args: FilterArgs<'_>) -> Result<()> {
    let norm = NormalizationConfig::default();
    let kb = load_kb(args.kb, &norm)?;
    let records = load_records(args.photos)?;
    let mut config = PipelineConfig::new(&norm);
    config.p_food = args.p_food;
    config.p_person = args.p_person;
    config.sim_threshold = args.sim_threshold;

    let (accepted, report) = run_pipeline(records, &kb, &config, &norm)?;
    write_json_pretty(args.report, &report)?;
    if let Some(out) = args.out {
        let wires: Vec<PhotoRecordWire> = accepted.iter().map(PhotoRecord::to_wire).collect();
        write_jsonl(out, &wires)?;
    }
    eprintln!(
        "accepted {} of {} photos (nonfood {}, people {}, exact dup {}, near dup {})",
        report.accepted,
        report.input_count,
        report.rejected_nonfood,
        report.rejected_people,
        report.rejected_exact_dup,
        report.rejected_near_dup,
    );
    Ok(())
}

pub struct ClassifyArgs<'a> {
    pub records: &'a Path,
    pub corpus: &'a Path,
    pub method: &'a str,
    pub k: Option<usize>,
    pub k_range: Option<&'a str>,
    pub metric: &'a str,
    pub top_n: usize,
    pub dishes: Option<&'a Path>,
    pub p_cut: f64,
    pub match_min: usize,
    pub out: Option<&'a Path>,
    pub out_dir: Option<&'a Path>,
}

pub fn classify(args: ClassifyArgs<'_>) -> Result<()> {
    let norm = NormalizationConfig::default();
    let records = load_records(args.records)?;
    let corpus = load_corpus(args.corpus)?;

    match args.method {
        "rule" => {
            let table =
                DistinctiveTable::build(&corpus, &norm, default_ubiquitous(&norm), args.top_n);
            let dish_table = match args.dishes {
                Some(path) => DishNameTable::from_file(path, &norm)?,
                None => DishNameTable::shipped(&norm),
            };
            let classifier = RuleClassifier::new(
                dish_table,
                &table,
                RuleConfig {
                    p_cut: args.p_cut,
                    match_min: args.match_min,
                },
            )?;
            let classifications: Vec<RuleClassification> = records
                .iter()
                .map(|r| classifier.classify(r, &norm))
                .collect();
            emit_jsonl(&classifications, args.out)?;
        }
        "knn" => {
            let k_values: Vec<usize> = match (args.k, args.k_range) {
                (_, Some(range)) => crate::config::parse_k_range(range)?,
                (Some(k), None) => vec![k],
                (None, None) => bail!("--method knn needs --k or --k-range"),
            };
            let metric = Metric::parse(args.metric)?;
            let normalized = corpus.normalized(&norm);
            let max_k = *k_values.iter().max().expect("nonempty");
            let model = KnnModel::from_corpus(&normalized, max_k, metric)?;
            let queries: Vec<(String, TokenSet)> = records
                .iter()
                .map(|r| (r.photo_id.clone(), knn_query(r, &norm)))
                .collect();
            let swept = model.sweep_k(&queries, &k_values)?;
            if k_values.len() == 1 {
                emit_jsonl(&swept[&k_values[0]], args.out)?;
            } else {
                let dir = args
                    .out_dir
                    .context("--k-range writes one file per k; pass --out-dir")?;
                for (k, predictions) in &swept {
                    write_jsonl(&dir.join(format!("knn_k{k}.jsonl")), predictions)?;
                }
            }
        }
        other => bail!("unknown method {other:?} (expected rule or knn)"),
    }
    Ok(())
}

fn emit_jsonl<T: Serialize>(items: &[T], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_jsonl(path, items),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for item in items {
                writeln!(lock, "{}", serde_json::to_string(item)?)?;
            }
            Ok(())
        }
    }
}

pub struct EvaluateArgs<'a> {
    pub corpus: Option<&'a Path>,
    pub config: Option<&'a Path>,
    pub split: f64,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub metric: Option<&'a str>,
    pub json: bool,
}

pub fn evaluate(args: EvaluateArgs<'_>) -> Result<()> {
    let run_config = args.config.map(RunConfig::load).transpose()?;
    let corpus_path = match (args.corpus, &run_config) {
        (Some(path), _) => path.to_path_buf(),
        (None, Some(config)) => config.paths.corpus.clone(),
        (None, None) => bail!("pass --corpus or --config"),
    };
    let seed = args
        .seed
        .or(run_config.as_ref().map(|c| c.knn.seed))
        .unwrap_or(42);
    let k = args
        .k
        .or(run_config.as_ref().map(|c| c.knn.k))
        .unwrap_or(10);
    let metric_name = args
        .metric
        .map(str::to_string)
        .or(run_config.as_ref().map(|c| c.knn.metric.clone()))
        .unwrap_or_else(|| "jaccard".to_string());
    let (split, json) = (args.split, args.json);

    let norm = NormalizationConfig::default();
    let corpus = load_corpus(&corpus_path)?.normalized(&norm);
    let (train, test) = corpus.split(split, seed)?;
    let model = KnnModel::from_corpus(&train, k, Metric::parse(&metric_name)?)?;
    let evaluation = model.evaluate(&test)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&evaluation)?);
        return Ok(());
    }
    println!(
        "accuracy {:.4} ({} of {} test recipes, k = {k}, train {} / test {})",
        evaluation.accuracy,
        evaluation.correct,
        evaluation.total,
        train.len(),
        test.len(),
    );
    println!("confusion (true cuisine -> predicted: count):");
    for (truth, row) in &evaluation.confusion {
        let cells: Vec<String> = row.iter().map(|(p, n)| format!("{p}: {n}")).collect();
        println!("  {truth} -> {}", cells.join(", "));
    }
    Ok(())
}

pub struct ProfileArgs<'a> {
    pub classifications: &'a Path,
    pub records: &'a Path,
    pub out: &'a Path,
    pub radar: Option<&'a Path>,
    pub axes: Vec<String>,
    pub corpus: Option<&'a Path>,
    pub min_p: Option<f64>,
    pub user_id: &'a str,
}

/// Read classification JSONL of either method into outcomes.
fn read_classifications(path: &Path) -> Result<(ProfileMethod, Vec<PhotoOutcome>)> {
    let values: Vec<serde_json::Value> = read_jsonl(path)?;
    let mut outcomes = Vec::with_capacity(values.len());
    let mut method = ProfileMethod::Rule;
    for (i, value) in values.iter().enumerate() {
        let context = || format!("{}:{}", path.display(), i + 1);
        if value.get("outcome").is_some() {
            let parsed: RuleClassification =
                serde_json::from_value(value.clone()).with_context(context)?;
            outcomes.push(PhotoOutcome {
                photo_id: parsed.photo_id,
                cuisine: parsed.cuisine,
            });
        } else {
            let parsed: KnnPrediction =
                serde_json::from_value(value.clone()).with_context(context)?;
            method = ProfileMethod::Knn {
                k: parsed.distances.len(),
            };
            outcomes.push(PhotoOutcome {
                photo_id: parsed.photo_id,
                cuisine: Some(parsed.cuisine),
            });
        }
    }
    Ok((method, outcomes))
}

pub fn profile(args: ProfileArgs<'_>) -> Result<()> {
    let records = load_records(args.records)?;
    let (method, outcomes) = read_classifications(args.classifications)?;
    let profile = aggregate(args.user_id, method, &outcomes, &records, args.min_p)?;
    save_profile(&profile, args.out)?;

    if let Some(radar_path) = args.radar {
        let axes = if !args.axes.is_empty() {
            args.axes.clone()
        } else if let Some(corpus_path) = args.corpus {
            default_axes(&load_corpus(corpus_path)?, 10)
        } else {
            // fall back to the profile's own cuisines
            profile.counts.keys().cloned().collect()
        };
        let svg = render_radar(&profile, &axes)?;
        write_text(radar_path, &svg)?;
    }
    Ok(())
}

fn configure_jobs(jobs: usize) -> Result<()> {
    if jobs > 0 {
        // ignore the error if a pool is already installed (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    Ok(())
}

/// The whole flow: corpus, distinctive table, fetch, filter, classify,
/// profile. Every artifact lands under `paths.out_dir`; reruns with the
/// same inputs are byte-identical.
pub fn run(
    config_path: &Path,
    out_dir_override: Option<&Path>,
    jobs_override: Option<usize>,
) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    configure_jobs(jobs_override.unwrap_or(config.jobs))?;
    let out_dir: PathBuf = out_dir_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.paths.out_dir.clone());
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    let norm = norm_config(config.paths.stop_modifiers.as_deref()).context("corpus stage")?;

    // corpus
    let corpus = load_corpus(&config.paths.corpus).context("corpus stage")?;
    let normalized = corpus.normalized(&norm);

    // distinctive table
    let ubiquitous = ubiquitous_tokens(config.paths.ubiquitous.as_deref(), &norm)
        .context("distinctive stage")?;
    let table = DistinctiveTable::build(&corpus, &norm, ubiquitous, config.report.top_n);

    // fetch
    let models = ModelRequest::parse(&config.backend.models).context("fetch stage")?;
    let records = match config.backend.kind.as_str() {
        "fixture" => {
            let sidecars = list_sidecars(&config.paths.photos).context("fetch stage")?;
            let backend = FixtureBackend::new(&config.paths.photos);
            let refs: Vec<String> = sidecars
                .iter()
                .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
                .collect();
            fetch_all(&backend, &refs, &models).context("fetch stage")?
        }
        _ => {
            let backend = HttpBackend::new(config.backend.http_config()).context("fetch stage")?;
            let refs: Vec<String> = std::fs::read_to_string(&config.paths.photos)
                .with_context(|| {
                    format!("fetch stage: cannot read {}", config.paths.photos.display())
                })?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect();
            fetch_all(&backend, &refs, &models).context("fetch stage")?
        }
    };
    let wires: Vec<PhotoRecordWire> = records.iter().map(PhotoRecord::to_wire).collect();
    write_jsonl(&out_dir.join("records.jsonl"), &wires).context("fetch stage")?;

    // filter
    let kb = load_kb(&config.paths.kb, &norm).context("filter stage")?;
    let mut pipeline_config = PipelineConfig::new(&norm);
    pipeline_config.p_food = config.thresholds.p_food;
    pipeline_config.p_person = config.thresholds.p_person;
    pipeline_config.sim_threshold = config.thresholds.sim_threshold;
    let (accepted, report): (Vec<PhotoRecord>, PipelineReport) =
        run_pipeline(records, &kb, &pipeline_config, &norm).context("filter stage")?;
    write_json_pretty(&out_dir.join("pipeline_report.json"), &report).context("filter stage")?;
    let accepted_wires: Vec<PhotoRecordWire> = accepted.iter().map(PhotoRecord::to_wire).collect();
    write_jsonl(&out_dir.join("accepted.jsonl"), &accepted_wires).context("filter stage")?;

    // radar axes
    let axes = if config.report.axes.is_empty() {
        default_axes(&corpus, 10)
    } else {
        config.report.axes.clone()
    };

    // classify + profile per method
    for method in &config.report.methods {
        match method.as_str() {
            "rule" => {
                let dish_table = match &config.paths.dishes {
                    Some(path) => DishNameTable::from_file(path, &norm),
                    None => Ok(DishNameTable::shipped(&norm)),
                }
                .context("classify stage")?;
                let classifier = RuleClassifier::new(
                    dish_table,
                    &table,
                    RuleConfig {
                        p_cut: config.thresholds.p_cut,
                        match_min: config.thresholds.match_min,
                    },
                )
                .context("classify stage")?;
                let classifications: Vec<RuleClassification> = accepted
                    .iter()
                    .map(|r| classifier.classify(r, &norm))
                    .collect();
                write_jsonl(&out_dir.join("rule.jsonl"), &classifications)
                    .context("classify stage")?;

                let outcomes: Vec<PhotoOutcome> = classifications
                    .iter()
                    .map(|c| PhotoOutcome {
                        photo_id: c.photo_id.clone(),
                        cuisine: c.cuisine.clone(),
                    })
                    .collect();
                let profile = aggregate(
                    &config.user_id,
                    ProfileMethod::Rule,
                    &outcomes,
                    &accepted,
                    config.report.min_p,
                )
                .context("profile stage")?;
                save_profile(&profile, out_dir.join("profile_rule.json"))
                    .context("profile stage")?;
                let svg = render_radar(&profile, &axes).context("profile stage")?;
                write_text(&out_dir.join("radar_rule.svg"), &svg).context("profile stage")?;
            }
            "knn" => {
                let k_values = config.k_values().context("classify stage")?;
                let metric = Metric::parse(&config.knn.metric).context("classify stage")?;
                let max_k = *k_values.iter().max().expect("nonempty");
                let model =
                    KnnModel::from_corpus(&normalized, max_k, metric).context("classify stage")?;
                let queries: Vec<(String, TokenSet)> = accepted
                    .iter()
                    .map(|r| (r.photo_id.clone(), knn_query(r, &norm)))
                    .collect();
                let swept = model
                    .sweep_k(&queries, &k_values)
                    .context("classify stage")?;
                for (k, predictions) in &swept {
                    write_jsonl(&out_dir.join(format!("knn_k{k}.jsonl")), predictions)
                        .context("classify stage")?;
                    let outcomes: Vec<PhotoOutcome> = predictions
                        .iter()
                        .map(|p| PhotoOutcome {
                            photo_id: p.photo_id.clone(),
                            cuisine: Some(p.cuisine.clone()),
                        })
                        .collect();
                    let profile = aggregate(
                        &config.user_id,
                        ProfileMethod::Knn { k: *k },
                        &outcomes,
                        &accepted,
                        config.report.min_p,
                    )
                    .context("profile stage")?;
                    save_profile(&profile, out_dir.join(format!("profile_knn_k{k}.json")))
                        .context("profile stage")?;
                    let svg = render_radar(&profile, &axes).context("profile stage")?;
                    write_text(&out_dir.join(format!("radar_knn_k{k}.svg")), &svg)
                        .context("profile stage")?;
                }
            }
            _ => unreachable!("validated"),
        }
    }

    eprintln!(
        "run complete: {} photos in, {} accepted; artifacts in {}",
        report.input_count,
        report.accepted,
        out_dir.display()
    );
    Ok(())
}
