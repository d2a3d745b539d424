//! End-to-end checks of the `profiler` binary's subcommands against the
//! bundled demo fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root")
        .to_path_buf()
}

fn profiler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profiler"))
        .current_dir(workspace_root())
        .args(args)
        .output()
        .expect("profiler runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn corpus_stats_json() {
    let output = profiler(&["corpus", "stats", "demo/corpus.json", "--json"]);
    let stats: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(stats["recipes"], 100);
    assert_eq!(stats["cuisines"], 10);
    assert_eq!(stats["counts"]["italian"], 20);
}

#[test]
fn corpus_stats_table_lists_every_cuisine() {
    let output = profiler(&["corpus", "stats", "demo/corpus.json"]);
    let text = stdout_of(&output);
    for cuisine in ["italian", "mexican", "greek", "total"] {
        assert!(text.contains(cuisine), "missing {cuisine} in:\n{text}");
    }
}

#[test]
fn distinctive_json_contains_known_entries() {
    let output = profiler(&["distinctive", "demo/corpus.json", "--json"]);
    let table: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let italian = table["distinctive"]["italian"].as_array().unwrap();
    let has = |needle: &str| {
        italian.iter().any(|entry| {
            entry
                .as_array()
                .unwrap()
                .iter()
                .any(|tok| tok.as_str() == Some(needle))
        })
    };
    assert!(
        has("parmesan"),
        "italian distinctive lacks parmesan: {italian:?}"
    );
    assert!(has("ricotta"), "italian distinctive lacks ricotta");
}

#[test]
fn fetch_filter_classify_profile_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let records = tmp.path().join("records.jsonl");
    let report = tmp.path().join("report.json");
    let accepted = tmp.path().join("accepted.jsonl");
    let rule_out = tmp.path().join("rule.jsonl");
    let profile_out = tmp.path().join("profile.json");
    let radar_out = tmp.path().join("radar.svg");

    let output = profiler(&["fetch", "demo/photos", "--out", records.to_str().unwrap()]);
    assert!(output.status.success());
    let fetched = std::fs::read_to_string(&records).unwrap();
    assert_eq!(fetched.lines().count(), 20);

    let output = profiler(&[
        "filter",
        records.to_str().unwrap(),
        "--kb",
        "demo/kb.txt",
        "--report",
        report.to_str().unwrap(),
        "--out",
        accepted.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report_json["accepted"], 14);

    let output = profiler(&[
        "classify",
        "--records",
        accepted.to_str().unwrap(),
        "--corpus",
        "demo/corpus.json",
        "--method",
        "rule",
        "--out",
        rule_out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert_eq!(
        std::fs::read_to_string(&rule_out).unwrap().lines().count(),
        14
    );

    let output = profiler(&[
        "profile",
        rule_out.to_str().unwrap(),
        "--records",
        accepted.to_str().unwrap(),
        "--out",
        profile_out.to_str().unwrap(),
        "--radar",
        radar_out.to_str().unwrap(),
        "--corpus",
        "demo/corpus.json",
        "--user-id",
        "demo-user",
    ]);
    assert!(output.status.success());
    let profile = profiler_core::profile::load_profile(&profile_out).unwrap();
    assert_eq!(profile.counts["mexican"], 5);
    assert_eq!(profile.counts["italian"], 3);
    let svg = std::fs::read_to_string(&radar_out).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn classify_knn_range_writes_one_file_per_k() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("knn");
    let output = profiler(&[
        "classify",
        "--records",
        "demo/photos",
        "--corpus",
        "demo/corpus.json",
        "--method",
        "knn",
        "--k-range",
        "1..4",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    for k in 1..=4 {
        assert!(
            out_dir.join(format!("knn_k{k}.jsonl")).exists(),
            "missing k={k}"
        );
    }
}

#[test]
fn run_with_k_range_emits_radar_per_k() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config_path = tmp.path().join("config.toml");
    let root = workspace_root();
    let config = format!(
        r#"user_id = "demo-user"

[paths]
corpus = "{root}/demo/corpus.json"
photos = "{root}/demo/photos"
kb = "{root}/demo/kb.txt"
out_dir = "{out}"

[knn]
k_range = "1..25"
metric = "jaccard"

[report]
methods = ["knn"]
"#,
        root = root.display(),
        out = out_dir.display(),
    );
    std::fs::write(&config_path, config).unwrap();

    let output = profiler(&["run", "--config", config_path.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let radars = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            name.starts_with("radar_knn_k") && name.ends_with(".svg")
        })
        .count();
    assert_eq!(radars, 25, "expected one radar per k");
}

#[test]
fn missing_corpus_names_the_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.toml");
    let root = workspace_root();
    let config = format!(
        r#"[paths]
corpus = "{root}/demo/no-such-corpus.json"
photos = "{root}/demo/photos"
kb = "{root}/demo/kb.txt"
out_dir = "{out}"
"#,
        root = root.display(),
        out = tmp.path().join("out").display(),
    );
    std::fs::write(&config_path, config).unwrap();

    let output = profiler(&["run", "--config", config_path.to_str().unwrap()]);
    assert!(!output.status.success(), "run should fail");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("corpus stage"),
        "stderr does not name the stage:\n{stderr}"
    );
}

#[test]
fn evaluate_reports_accuracy() {
    let output = profiler(&[
        "evaluate",
        "--corpus",
        "demo/corpus.json",
        "--split",
        "0.2",
        "--seed",
        "7",
        "--k",
        "3",
        "--json",
    ]);
    let evaluation: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let accuracy = evaluation["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&accuracy));
    assert!(evaluation["total"].as_u64().unwrap() > 0);
}

#[test]
fn default_seed_matches_config_default() {
    // same split either way: explicit seed 42 vs the config-file default
    let explicit = profiler(&[
        "evaluate",
        "--corpus",
        "demo/corpus.json",
        "--seed",
        "42",
        "--k",
        "3",
        "--json",
    ]);
    let tmp = tempfile::tempdir().unwrap();
    let config_path = tmp.path().join("config.toml");
    let root = workspace_root();
    std::fs::write(
        &config_path,
        format!(
            "[paths]\ncorpus = \"{root}/demo/corpus.json\"\nphotos = \"x\"\nkb = \"x\"\nout_dir = \"x\"\n[knn]\nk = 3\n",
            root = root.display()
        ),
    )
    .unwrap();
    let from_config = profiler(&[
        "evaluate",
        "--config",
        config_path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(stdout_of(&explicit), stdout_of(&from_config));
}
