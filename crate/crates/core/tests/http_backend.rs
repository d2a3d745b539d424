//! Exercises the HTTP backend against a minimal local server.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use profiler_core::error::Error;
use profiler_core::labels::http::{HttpBackend, HttpBackendConfig};
use profiler_core::labels::{LabelBackend, ModelRequest};

/// Serve canned HTTP responses; the n-th request gets bodies[min(n, len-1)].
/// Returns the base URL and a request counter.
fn canned_server(responses: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let counter = Arc::new(AtomicUsize::new(0));
    let seen = Arc::clone(&counter);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let n = seen.fetch_add(1, Ordering::SeqCst);
            let (status, body) = responses[n.min(responses.len() - 1)].clone();

            // read the request until the end of its body
            let mut buf = Vec::new();
            let mut chunk = [0u8; 4096];
            let mut content_length = None;
            while let Ok(read) = stream.read(&mut chunk) {
                if read == 0 {
                    break;
                }
                buf.extend_from_slice(&chunk[..read]);
                if content_length.is_none() {
                    if let Some(head_end) = find_head_end(&buf) {
                        content_length = Some((head_end, body_length(&buf[..head_end])));
                    }
                }
                if let Some((head_end, want)) = content_length {
                    if buf.len() >= head_end + want {
                        break;
                    }
                }
            }

            let reason = match status {
                200 => "OK",
                404 => "Not Found",
                500 => "Internal Server Error",
                _ => "Status",
            };
            let response = format!(
                "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://{addr}"), counter)
}

fn find_head_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n").map(|p| p + 4)
}

fn body_length(head: &[u8]) -> usize {
    let head = String::from_utf8_lossy(head);
    head.lines()
        .find_map(|line| {
            let (name, value) = line.split_once(':')?;
            name.eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse().ok())?
        })
        .unwrap_or(0)
}

fn config_for(base_url: &str) -> HttpBackendConfig {
    HttpBackendConfig {
        base_url: base_url.to_string(),
        concepts_path: "outputs.0.data.concepts".into(),
        exif_path: Some("outputs.0.exif".into()),
        max_retries: 2,
        ..HttpBackendConfig::default()
    }
}

fn label_body() -> String {
    r#"{"outputs": [{"exif": "2023:06:10 12:30:00", "data": {"concepts": [
        {"name": "pizza", "value": 0.93},
        {"name": "cheese", "value": 0.95}
    ]}}]}"#
        .to_string()
}

const FOOD_ONLY: ModelRequest = ModelRequest {
    general: false,
    food: true,
    embedding: false,
};

#[test]
fn fetches_and_sorts_labels() {
    let (base, _) = canned_server(vec![(200, label_body())]);
    std::env::set_var("PROFILER_API_KEY", "test-key");
    let backend = HttpBackend::new(config_for(&base)).unwrap();
    let record = backend.fetch_annotations("photo-9", &FOOD_ONLY).unwrap();
    assert_eq!(record.photo_id, "photo-9");
    assert_eq!(record.exif_datetime.as_deref(), Some("2023:06:10 12:30:00"));
    let concepts: Vec<&str> = record
        .food_labels
        .iter()
        .map(|l| l.concept.as_str())
        .collect();
    assert_eq!(concepts, vec!["cheese", "pizza"]);
    assert_eq!(record.food_labels[0].probability, 0.95);
}

#[test]
fn retries_server_errors_then_succeeds() {
    let (base, counter) = canned_server(vec![
        (500, "{}".to_string()),
        (500, "{}".to_string()),
        (200, label_body()),
    ]);
    std::env::set_var("PROFILER_API_KEY", "test-key");
    let backend = HttpBackend::new(config_for(&base)).unwrap();
    let record = backend.fetch_annotations("p", &FOOD_ONLY).unwrap();
    assert_eq!(record.food_labels.len(), 2);
    assert_eq!(counter.load(Ordering::SeqCst), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (base, counter) = canned_server(vec![(404, "{}".to_string())]);
    std::env::set_var("PROFILER_API_KEY", "test-key");
    let backend = HttpBackend::new(config_for(&base)).unwrap();
    match backend.fetch_annotations("p", &FOOD_ONLY) {
        Err(Error::Http {
            status, retryable, ..
        }) => {
            assert_eq!(status, Some(404));
            assert!(!retryable);
        }
        other => panic!("expected http error, got {other:?}"),
    }
    assert_eq!(counter.load(Ordering::SeqCst), 1);
}

#[test]
fn schema_violations_surface() {
    // response shape is fine but a probability is out of range
    let bad = r#"{"outputs": [{"data": {"concepts": [{"name": "pizza", "value": 1.7}]}}]}"#;
    let (base, _) = canned_server(vec![(200, bad.to_string())]);
    std::env::set_var("PROFILER_API_KEY", "test-key");
    let backend = HttpBackend::new(config_for(&base)).unwrap();
    assert!(matches!(
        backend.fetch_annotations("p", &FOOD_ONLY),
        Err(Error::SchemaViolation { .. })
    ));
}

#[test]
fn missing_api_key_is_an_error() {
    let mut config = config_for("http://127.0.0.1:1");
    config.api_key_env = "PROFILER_API_KEY_UNSET_FOR_TEST".into();
    std::env::remove_var("PROFILER_API_KEY_UNSET_FOR_TEST");
    match HttpBackend::new(config) {
        Err(Error::MissingApiKey { name }) => {
            assert_eq!(name, "PROFILER_API_KEY_UNSET_FOR_TEST");
        }
        other => panic!("expected missing-key error, got {:?}", other.map(|_| ())),
    }
}
