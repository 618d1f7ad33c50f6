//! Battle log ingestion (JSONL or CSV) and canonical serialization.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};

use serde_json::Value;

use crate::domain::{Battle, BattleStream, ModelId, Outcome};
use crate::error::{Error, Result};

use super::schema::{FileFormat, SchemaMapping};

/// Parsed stream plus non-fatal observations (re-sorts, dropped rows).
#[derive(Debug)]
pub struct ParsedBattles {
    pub stream: BattleStream,
    pub warnings: Vec<String>,
}

/// Parses battles in source order. When a timestamp field is mapped and the
/// source contains strictly decreasing pairs, the battles are stably
/// re-sorted by timestamp and a warning is emitted; otherwise file order is
/// battle order. Unknown outcome tokens, missing mandatory fields, self
/// battles, and duplicate battle ids are hard errors naming the row.
pub fn parse_battles(
    source: impl Read,
    format: FileFormat,
    mapping: &SchemaMapping,
) -> Result<ParsedBattles> {
    mapping.validate()?;
    let mut warnings = Vec::new();
    let mut battles = match format {
        FileFormat::Jsonl => parse_jsonl(source, mapping, &mut warnings)?,
        FileFormat::Csv => parse_csv(source, mapping, &mut warnings)?,
    };

    let mut seen = HashSet::with_capacity(battles.len());
    for (battle, location) in &battles {
        if !seen.insert(battle.battle_id.clone()) {
            return Err(Error::parse(
                location.clone(),
                format!("duplicate battle id {:?}", battle.battle_id),
            ));
        }
    }

    if mapping.timestamp.is_some()
        && battles
            .windows(2)
            .any(|pair| pair[1].0.timestamp < pair[0].0.timestamp)
    {
        warnings.push(
            "timestamps are not non-decreasing in source order; re-sorted stably by timestamp"
                .to_string(),
        );
        battles.sort_by_key(|(battle, _)| battle.timestamp);
    }

    let stream = BattleStream::new(battles.into_iter().map(|(battle, _)| battle).collect())?;
    Ok(ParsedBattles { stream, warnings })
}

fn parse_jsonl(
    source: impl Read,
    mapping: &SchemaMapping,
    warnings: &mut Vec<String>,
) -> Result<Vec<(Battle, String)>> {
    let reader = BufReader::new(source);
    let mut battles = Vec::new();
    let mut row_index = 0usize;
    for (line_number, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let location = format!("line {}", line_number + 1);
        let value: Value = serde_json::from_str(&line)
            .map_err(|e| Error::parse(&location, format!("invalid JSON: {e}")))?;
        if let Some(battle) = battle_from_fields(&JsonRow(&value), mapping, &location, row_index)? {
            battles.push((battle, location));
            row_index += 1;
        } else {
            warnings.push(format!("{location}: row dropped by outcome token"));
        }
    }
    Ok(battles)
}

fn parse_csv(
    source: impl Read,
    mapping: &SchemaMapping,
    warnings: &mut Vec<String>,
) -> Result<Vec<(Battle, String)>> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers()?.clone();
    let mut battles = Vec::new();
    let mut row_index = 0usize;
    for (record_number, record) in reader.records().enumerate() {
        let record = record?;
        let location = format!("row {}", record_number + 2); // 1-based, after header
        let row = CsvRow {
            headers: &headers,
            record: &record,
        };
        if let Some(battle) = battle_from_fields(&row, mapping, &location, row_index)? {
            battles.push((battle, location));
            row_index += 1;
        } else {
            warnings.push(format!("{location}: row dropped by outcome token"));
        }
    }
    Ok(battles)
}

/// Uniform field access over a JSON object or a CSV record.
trait Row {
    /// The field as a string, if present and non-null.
    fn text(&self, key: &str) -> Option<String>;
    /// The field as a timestamp. Integers pass through; fractional values
    /// (epoch seconds) are scaled to milliseconds, preserving order.
    fn timestamp(&self, key: &str) -> Option<Result<i64>>;
}

struct JsonRow<'a>(&'a Value);

impl Row for JsonRow<'_> {
    fn text(&self, key: &str) -> Option<String> {
        match self.0.get(key) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => Some(other.to_string()),
        }
    }

    fn timestamp(&self, key: &str) -> Option<Result<i64>> {
        let value = match self.0.get(key) {
            None | Some(Value::Null) => return None,
            Some(v) => v,
        };
        Some(match value {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(i)
                } else if let Some(f) = n.as_f64() {
                    Ok((f * 1000.0).round() as i64)
                } else {
                    Err(Error::invalid(format!("timestamp {n} out of range")))
                }
            }
            Value::String(s) => parse_timestamp_text(s),
            other => Err(Error::invalid(format!("timestamp {other} is not numeric"))),
        })
    }
}

struct CsvRow<'a> {
    headers: &'a csv::StringRecord,
    record: &'a csv::StringRecord,
}

impl CsvRow<'_> {
    fn field(&self, key: &str) -> Option<&str> {
        let index = self.headers.iter().position(|h| h == key)?;
        self.record.get(index)
    }
}

impl Row for CsvRow<'_> {
    fn text(&self, key: &str) -> Option<String> {
        match self.field(key) {
            None | Some("") => None,
            Some(s) => Some(s.to_string()),
        }
    }

    fn timestamp(&self, key: &str) -> Option<Result<i64>> {
        match self.field(key) {
            None | Some("") => None,
            Some(s) => Some(parse_timestamp_text(s)),
        }
    }
}

fn parse_timestamp_text(s: &str) -> Result<i64> {
    if let Ok(i) = s.parse::<i64>() {
        return Ok(i);
    }
    s.parse::<f64>()
        .map(|f| (f * 1000.0).round() as i64)
        .map_err(|_| Error::invalid(format!("timestamp {s:?} is not numeric")))
}

fn battle_from_fields(
    row: &dyn Row,
    mapping: &SchemaMapping,
    location: &str,
    row_index: usize,
) -> Result<Option<Battle>> {
    let required = |key: &str| -> Result<String> {
        row.text(key)
            .ok_or_else(|| Error::parse(location, format!("missing mandatory field {key:?}")))
    };

    let token = required(&mapping.outcome)?;
    let outcome: Outcome = match mapping.resolve_outcome(&token, location)? {
        Some(outcome) => outcome,
        None => return Ok(None),
    };

    let model_a = ModelId::new(required(&mapping.model_a)?)
        .map_err(|e| Error::parse(location, e.to_string()))?;
    let model_b = ModelId::new(required(&mapping.model_b)?)
        .map_err(|e| Error::parse(location, e.to_string()))?;

    let battle_id = match &mapping.battle_id {
        Some(key) => match row.text(key) {
            Some(id) => id,
            None => format!("row-{row_index:06}"),
        },
        None => format!("row-{row_index:06}"),
    };

    let timestamp = match &mapping.timestamp {
        Some(key) => match row.timestamp(key) {
            Some(value) => value.map_err(|e| Error::parse(location, e.to_string()))?,
            None => row_index as i64,
        },
        None => row_index as i64,
    };

    let query_text = mapping.query_text.as_ref().and_then(|key| row.text(key));

    Battle::new(battle_id, timestamp, model_a, model_b, outcome, query_text)
        .map(Some)
        .map_err(|e| Error::parse(location, e.to_string()))
}

const CANONICAL_WIN_A: &str = "model_a";
const CANONICAL_WIN_B: &str = "model_b";
const CANONICAL_DRAW: &str = "tie";

fn canonical_token(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::WinA => CANONICAL_WIN_A,
        Outcome::WinB => CANONICAL_WIN_B,
        Outcome::Draw => CANONICAL_DRAW,
    }
}

/// Writes a stream in the canonical schema (the default [`SchemaMapping`]
/// parses it back unchanged). JSONL keys are ordered alphabetically; CSV has
/// a fixed header.
pub fn write_battles(
    stream: &BattleStream,
    format: FileFormat,
    sink: &mut dyn Write,
) -> Result<()> {
    match format {
        FileFormat::Jsonl => {
            for battle in stream {
                let mut object = serde_json::Map::new();
                object.insert("battle_id".into(), Value::from(battle.battle_id.clone()));
                object.insert("timestamp".into(), Value::from(battle.timestamp));
                object.insert("model_a".into(), Value::from(battle.model_a.as_str()));
                object.insert("model_b".into(), Value::from(battle.model_b.as_str()));
                object.insert(
                    "outcome".into(),
                    Value::from(canonical_token(battle.outcome)),
                );
                if let Some(query) = &battle.query_text {
                    object.insert("query_text".into(), Value::from(query.clone()));
                }
                serde_json::to_writer(&mut *sink, &Value::Object(object))?;
                sink.write_all(b"\n")?;
            }
        }
        FileFormat::Csv => {
            let mut writer = csv::Writer::from_writer(sink);
            writer.write_record([
                "battle_id",
                "timestamp",
                "model_a",
                "model_b",
                "outcome",
                "query_text",
            ])?;
            for battle in stream {
                writer.write_record([
                    battle.battle_id.as_str(),
                    &battle.timestamp.to_string(),
                    battle.model_a.as_str(),
                    battle.model_b.as_str(),
                    canonical_token(battle.outcome),
                    battle.query_text.as_deref().unwrap_or(""),
                ])?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}
