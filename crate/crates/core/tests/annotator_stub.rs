//! Annotator client against a local HTTP stub.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use arena_ratings::data_io::{annotate_via_llm, AnnotatorConfig};
use arena_ratings::domain::{Battle, BattleStream, ModelId, Outcome};

/// Minimal HTTP/1.1 stub: answers every POST with the payload produced by
/// `respond` and closes the connection.
fn spawn_stub(
    respond: impl Fn(usize) -> String + Send + Sync + 'static,
) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub");
    let address = format!("http://{}", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { break };
            let n = counter.fetch_add(1, Ordering::SeqCst);
            let body = respond(n);
            handle(stream, &body);
        }
    });
    (address, hits)
}

fn handle(stream: TcpStream, body: &str) {
    let mut reader = BufReader::new(stream);
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).is_err() || line == "\r\n" || line.is_empty() {
            break;
        }
        let lower = line.to_lowercase();
        if let Some(rest) = lower.strip_prefix("content-length:") {
            content_length = rest.trim().parse().unwrap_or(0);
        }
    }
    let mut payload = vec![0u8; content_length];
    let _ = reader.read_exact(&mut payload);
    let mut stream = reader.into_inner();
    let response = format!(
        "HTTP/1.1 200 OK\r\ncontent-type: text/plain\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
        body.len(),
        body
    );
    let _ = stream.write_all(response.as_bytes());
}

fn battles_with_queries(n: usize) -> BattleStream {
    let a = ModelId::new("a").unwrap();
    let b = ModelId::new("b").unwrap();
    let battles: Vec<Battle> = (0..n)
        .map(|i| {
            Battle::new(
                format!("b{i}"),
                i as i64,
                a.clone(),
                b.clone(),
                Outcome::WinA,
                Some(format!("question number {i}")),
            )
            .unwrap()
        })
        .collect();
    BattleStream::new(battles).unwrap()
}

#[test]
fn stub_round_trip_annotates_everything() {
    let (endpoint, _) = spawn_stub(|_| "difficulty: 2, subjectivity: 3".to_string());
    let stream = battles_with_queries(10);
    let run = annotate_via_llm(&stream, &AnnotatorConfig::new(endpoint), 10).unwrap();
    assert_eq!(run.annotations.len(), 10);
    assert_eq!(run.failures, 0);
    assert!(run
        .annotations
        .iter()
        .all(|a| a.difficulty == 2 && a.subjectivity == 3));
}

#[test]
fn out_of_range_responses_retry_then_skip() {
    let (endpoint, hits) = spawn_stub(|_| "7 and 3".to_string());
    let stream = battles_with_queries(2);
    let mut config = AnnotatorConfig::new(endpoint);
    config.max_retries = 2;
    let err = annotate_via_llm(&stream, &config, 2).unwrap_err();
    assert!(
        err.to_string().contains("no successful annotations"),
        "{err}"
    );
    // Every battle burned its initial attempt plus two retries.
    assert_eq!(hits.load(Ordering::SeqCst), 6);
}

#[test]
fn failures_are_skipped_but_successes_kept() {
    // Odd-numbered requests return garbage; retries make them succeed on
    // the next hit, so only persistent failures would be dropped.
    let (endpoint, _) = spawn_stub(|n| {
        if n % 2 == 1 {
            "no numbers".to_string()
        } else {
            "difficulty: 1, subjectivity: 4".to_string()
        }
    });
    let stream = battles_with_queries(5);
    let mut config = AnnotatorConfig::new(endpoint);
    config.max_retries = 1;
    let run = annotate_via_llm(&stream, &config, 5).unwrap();
    assert_eq!(run.annotations.len() + run.failures, 5);
    assert!(run.annotations.len() >= 3);
}

#[test]
fn limit_of_three_thousand_annotations() {
    let (endpoint, _) = spawn_stub(|_| "difficulty: 0, subjectivity: 5".to_string());
    let stream = battles_with_queries(3500);
    let run = annotate_via_llm(&stream, &AnnotatorConfig::new(endpoint), 3000).unwrap();
    assert_eq!(run.annotations.len(), 3000);
    // Unique battles: the sample is without replacement.
    let unique: std::collections::HashSet<&str> = run
        .annotations
        .iter()
        .map(|a| a.battle_id.as_str())
        .collect();
    assert_eq!(unique.len(), 3000);
}

#[test]
fn sampling_is_seeded_and_reproducible() {
    let (endpoint, _) = spawn_stub(|_| "difficulty: 2, subjectivity: 2".to_string());
    let stream = battles_with_queries(50);
    let mut config = AnnotatorConfig::new(endpoint);
    config.sample_seed = 7;
    let first = annotate_via_llm(&stream, &config, 10).unwrap();
    let second = annotate_via_llm(&stream, &config, 10).unwrap();
    let ids = |run: &arena_ratings::data_io::AnnotatorRun| {
        run.annotations
            .iter()
            .map(|a| a.battle_id.clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(ids(&first), ids(&second));
}

#[test]
fn battles_without_queries_cannot_be_annotated() {
    let a = ModelId::new("a").unwrap();
    let b = ModelId::new("b").unwrap();
    let stream = BattleStream::new(vec![
        Battle::new("b0", 0, a, b, Outcome::Draw, None).unwrap()
    ])
    .unwrap();
    let (endpoint, _) = spawn_stub(|_| "1 1".to_string());
    assert!(annotate_via_llm(&stream, &AnnotatorConfig::new(endpoint), 1).is_err());
}
