//! `profiler` — build a personal cuisine-preference profile from a stream
//! of food-photo label records.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "profiler",
    version,
    about = "Cuisine preference profiling from food-photo labels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recipe corpus operations
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Per-cuisine distinctive-ingredient table
    Distinctive {
        /// Corpus JSON file
        corpus: PathBuf,
        #[arg(long, default_value_t = profiler_core::distinctive::DEFAULT_TOP_N)]
        top_n: usize,
        #[arg(long)]
        json: bool,
        /// Override the ubiquitous-ingredient list (one token per line)
        #[arg(long)]
        ubiquitous: Option<PathBuf>,
        /// Override the stop-modifier list (one token per line)
        #[arg(long)]
        stop_modifiers: Option<PathBuf>,
    },
    /// Fetch photo annotations through a backend
    Fetch {
        /// Fixture directory (fixture backend) or photo-reference list
        /// file (http backend)
        photos: PathBuf,
        #[arg(long, default_value = "fixture")]
        backend: String,
        #[arg(long, default_value = "general,food,embedding")]
        models: String,
        /// Output records.jsonl (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Run config supplying [backend] endpoint settings
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Filter a photo stream down to unique food photos
    Filter {
        /// Sidecar fixture directory or records.jsonl
        photos: PathBuf,
        /// Knowledge-base token file, or a directory of seed sidecars
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, default_value_t = profiler_core::pipeline::DEFAULT_P_FOOD)]
        p_food: f64,
        #[arg(long, default_value_t = profiler_core::pipeline::DEFAULT_P_PERSON)]
        p_person: f64,
        #[arg(long, default_value_t = profiler_core::pipeline::DEFAULT_SIM_THRESHOLD)]
        sim: f64,
        /// Pipeline report JSON output
        #[arg(long)]
        report: PathBuf,
        /// Accepted records JSONL output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify accepted photos by rule or KNN
    Classify {
        /// Accepted records (JSONL or sidecar directory)
        #[arg(long)]
        records: PathBuf,
        /// Training corpus JSON
        #[arg(long)]
        corpus: PathBuf,
        /// "rule" or "knn"
        #[arg(long)]
        method: String,
        #[arg(long)]
        k: Option<usize>,
        /// Inclusive range like 1..25 (one output file per k)
        #[arg(long)]
        k_range: Option<String>,
        /// "jaccard" or "cosine"
        #[arg(long, default_value = "jaccard")]
        metric: String,
        #[arg(long, default_value_t = profiler_core::distinctive::DEFAULT_TOP_N)]
        top_n: usize,
        /// Dish-name table JSON (shipped default when omitted)
        #[arg(long)]
        dishes: Option<PathBuf>,
        #[arg(long, default_value_t = profiler_core::rules::DEFAULT_P_CUT)]
        p_cut: f64,
        #[arg(long, default_value_t = profiler_core::rules::DEFAULT_MATCH_MIN)]
        match_min: usize,
        /// Classification JSONL output (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output directory for --k-range
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Hold out part of the corpus and measure KNN accuracy
    Evaluate {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Run config supplying corpus path and [knn] defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Held-out fraction
        #[arg(long, default_value_t = 0.2)]
        split: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        metric: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Aggregate classifications into a profile and radar chart
    Profile {
        /// Classification JSONL (rule or knn)
        classifications: PathBuf,
        /// The accepted records the classifications refer to
        #[arg(long)]
        records: PathBuf,
        /// Profile JSON output
        #[arg(long)]
        out: PathBuf,
        /// Radar SVG output
        #[arg(long)]
        radar: Option<PathBuf>,
        /// Explicit axis order (comma separated)
        #[arg(long, value_delimiter = ',')]
        axes: Vec<String>,
        /// Corpus for the default axis order (ten largest cuisines)
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Only aggregate labels at or above this probability
        #[arg(long)]
        min_p: Option<f64>,
        #[arg(long, default_value = "user")]
        user_id: String,
    },
    /// Run the whole pipeline from a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override [paths].out_dir
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the worker count (0 = rayon default)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Per-cuisine recipe counts and corpus totals
    Stats {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Corpus { command } => match command {
            CorpusCommand::Stats { path, json } => commands::corpus_stats(&path, json),
        },
        Command::Distinctive {
            corpus,
            top_n,
            json,
            ubiquitous,
            stop_modifiers,
        } => commands::distinctive(
            &corpus,
            top_n,
            json,
            ubiquitous.as_deref(),
            stop_modifiers.as_deref(),
        ),
        Command::Fetch {
            photos,
            backend,
            models,
            out,
            jobs,
            config,
        } => commands::fetch(commands::FetchArgs {
            photos: &photos,
            backend: &backend,
            models: &models,
            out: out.as_deref(),
            jobs,
            config: config.as_deref(),
        }),
        Command::Filter {
            photos,
            kb,
            p_food,
            p_person,
            sim,
            report,
            out,
        } => commands::filter(commands::FilterArgs {
            photos: &photos,
            kb: &kb,
            p_food,
            p_person,
            sim_threshold: sim,
            report: &report,
            out: out.as_deref(),
        }),
        Command::Classify {
            records,
            corpus,
            method,
            k,
            k_range,
            metric,
            top_n,
            dishes,
            p_cut,
            match_min,
            out,
            out_dir,
        } => commands::classify(commands::ClassifyArgs {
            records: &records,
            corpus: &corpus,
            method: &method,
            k,
            k_range: k_range.as_deref(),
            metric: &metric,
            top_n,
            dishes: dishes.as_deref(),
            p_cut,
            match_min,
            out: out.as_deref(),
            out_dir: out_dir.as_deref(),
        }),
        Command::Evaluate {
            corpus,
            config,
            split,
            seed,
            k,
            metric,
            json,
        } => commands::evaluate(commands::EvaluateArgs {
            corpus: corpus.as_deref(),
            config: config.as_deref(),
            split,
            seed,
            k,
            metric: metric.as_deref(),
            json,
        }),
        Command::Profile {
            classifications,
            records,
            out,
            radar,
            axes,
            corpus,
            min_p,
            user_id,
        } => commands::profile(commands::ProfileArgs {
            classifications: &classifications,
            records: &records,
            out: &out,
            radar: radar.as_deref(),
            axes,
            corpus: corpus.as_deref(),
            min_p,
            user_id: &user_id,
        }),
        Command::Run {
            config,
            out_dir,
            jobs,
        } => commands::run(&config, out_dir.as_deref(), jobs),
    }
}
