//! Generic HTTP annotation client: renders a prompt per query, posts it as
//! JSON to any completion-style endpoint, and extracts a difficulty and a
//! subjectivity score from the response text.
//!
//! Requests are sequential; the output set does not depend on response
//! timing. Failures are retried per request and then skipped — an
//! annotation is only ever emitted from a successfully parsed response.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::domain::{Annotation, BattleStream};
use crate::error::{Error, Result};
use crate::rng::DetRng;

/// Environment variable holding the optional bearer token.
pub const TOKEN_ENV_VAR: &str = "ARENA_ANNOTATOR_TOKEN";

pub const DEFAULT_PROMPT_TEMPLATE: &str = "Rate the difficulty and subjectivity of the \
following user query, each on a scale from 0-5.\nReply with two labeled integers, for \
example: \"difficulty: 2, subjectivity: 3\".\n\nQuery:\n{query}\n";

/// How the response body is turned into scores.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseParser {
    /// Look for integers labeled "difficulty" and "subjectivity"; fall back
    /// to the first two bare integers. Both must be within 0..=5.
    #[default]
    IntegerPair,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnotatorConfig {
    pub endpoint: String,
    /// Prompt with a `{query}` placeholder.
    pub prompt_template: String,
    pub timeout_secs: u64,
    /// Retries per battle after the first attempt.
    pub max_retries: u32,
    pub parser: ResponseParser,
    /// Seed for sampling which battles to annotate when `limit` is below
    /// the number of eligible battles.
    pub sample_seed: u64,
}

impl AnnotatorConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        AnnotatorConfig {
            endpoint: endpoint.into(),
            prompt_template: DEFAULT_PROMPT_TEMPLATE.to_string(),
            timeout_secs: 30,
            max_retries: 2,
            parser: ResponseParser::IntegerPair,
            sample_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.endpoint.is_empty() {
            return Err(Error::invalid("annotator endpoint must be set"));
        }
        if self.timeout_secs == 0 {
            return Err(Error::invalid("annotator timeout must be positive"));
        }
        if !self.prompt_template.contains("{query}") {
            return Err(Error::invalid(
                "prompt template must contain a {query} placeholder",
            ));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct AnnotatorRun {
    pub annotations: Vec<Annotation>,
    /// Battles skipped after exhausting retries.
    pub failures: usize,
    pub warnings: Vec<String>,
}

/// Annotates up to `limit` battles that carry query text. When more are
/// eligible than `limit`, a uniform sample is drawn with the config seed.
/// Fails if no battle yields a successful annotation.
pub fn annotate_via_llm(
    battles: &BattleStream,
    config: &AnnotatorConfig,
    limit: usize,
) -> Result<AnnotatorRun> {
    config.validate()?;
    let eligible: Vec<&crate::domain::Battle> =
        battles.iter().filter(|b| b.query_text.is_some()).collect();
    if eligible.is_empty() {
        return Err(Error::invalid(
            "no battles carry query text; nothing to annotate",
        ));
    }
    let selected = sample(&eligible, limit, config.sample_seed);

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
        .build()
        .into();
    let token = std::env::var(TOKEN_ENV_VAR).ok();

    let mut annotations = Vec::with_capacity(selected.len());
    let mut warnings = Vec::new();
    let mut failures = 0usize;

    for battle in selected {
        let query = battle.query_text.as_deref().expect("filtered to annotated");
        let prompt = config.prompt_template.replace("{query}", query);
        match request_scores(&agent, config, token.as_deref(), &prompt) {
            Ok((difficulty, subjectivity)) => {
                annotations.push(Annotation::new(
                    battle.battle_id.clone(),
                    difficulty,
                    subjectivity,
                )?);
            }
            Err(e) => {
                failures += 1;
                warnings.push(format!("battle {}: skipped ({e})", battle.battle_id));
            }
        }
    }

    if annotations.is_empty() {
        return Err(Error::Annotator(format!(
            "no successful annotations in {failures} attempts"
        )));
    }
    Ok(AnnotatorRun {
        annotations,
        failures,
        warnings,
    })
}

fn sample<'a>(
    eligible: &[&'a crate::domain::Battle],
    limit: usize,
    seed: u64,
) -> Vec<&'a crate::domain::Battle> {
    if limit >= eligible.len() {
        return eligible.to_vec();
    }
    // Partial Fisher-Yates: uniform without replacement, order fixed by seed.
    let mut rng = DetRng::new(seed);
    let mut indices: Vec<usize> = (0..eligible.len()).collect();
    let mut picked = Vec::with_capacity(limit);
    for i in 0..limit {
        let j = i + rng.next_index(indices.len() - i);
        indices.swap(i, j);
        picked.push(eligible[indices[i]]);
    }
    picked
}

fn request_scores(
    agent: &ureq::Agent,
    config: &AnnotatorConfig,
    token: Option<&str>,
    prompt: &str,
) -> Result<(u8, u8)> {
    let body = serde_json::json!({ "prompt": prompt });
    let mut last_error = String::new();
    for _attempt in 0..=config.max_retries {
        let mut request = agent.post(&config.endpoint);
        if let Some(token) = token {
            request = request.header("authorization", &format!("Bearer {token}"));
        }
        let response = match request.send_json(&body) {
            Ok(mut response) => response.body_mut().read_to_string(),
            Err(e) => {
                last_error = e.to_string();
                continue;
            }
        };
        match response {
            Ok(text) => match parse_scores(&text, config.parser) {
                Some(scores) => return Ok(scores),
                None => {
                    last_error = format!("no valid score pair in response {text:?}");
                }
            },
            Err(e) => {
                last_error = e.to_string();
            }
        }
    }
    Err(Error::Annotator(last_error))
}

/// Extracts `(difficulty, subjectivity)` from free-form response text.
fn parse_scores(text: &str, parser: ResponseParser) -> Option<(u8, u8)> {
    match parser {
        ResponseParser::IntegerPair => {
            if let (Some(d), Some(s)) = (
                labeled_int(text, "difficulty"),
                labeled_int(text, "subjectivity"),
            ) {
                if d <= 5 && s <= 5 {
                    return Some((d as u8, s as u8));
                }
                return None;
            }
            let ints = bare_ints(text);
            if ints.len() < 2 {
                return None;
            }
            let (d, s) = (ints[0], ints[1]);
            (d <= 5 && s <= 5).then_some((d as u8, s as u8))
        }
    }
}

/// First integer following a case-insensitive label.
fn labeled_int(text: &str, label: &str) -> Option<u64> {
    let lower = text.to_lowercase();
    let pos = lower.find(label)?;
    let tail = &text[pos + label.len()..];
    bare_ints(tail).first().copied()
}

fn bare_ints(text: &str) -> Vec<u64> {
    let mut values = Vec::new();
    let mut current: Option<u64> = None;
    for c in text.chars() {
        if let Some(digit) = c.to_digit(10) {
            current = Some(current.unwrap_or(0).saturating_mul(10) + digit as u64);
        } else if let Some(value) = current.take() {
            values.push(value);
        }
    }
    if let Some(value) = current {
        values.push(value);
    }
    values
}
