//! Annotation file ingestion and serialization
//! (`battle_id, difficulty, subjectivity`).

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::Deserialize;

use crate::domain::Annotation;
use crate::error::{Error, Result};

use super::schema::FileFormat;

#[derive(Debug)]
pub struct ParsedAnnotations {
    pub annotations: Vec<Annotation>,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct RawAnnotation {
    battle_id: String,
    difficulty: i64,
    subjectivity: i64,
}

/// Parses annotations, validating both scores into 0..=5 (out-of-range is a
/// hard error naming the location). Duplicate battle ids resolve to the last
/// occurrence, with a warning.
pub fn parse_annotations(source: impl Read, format: FileFormat) -> Result<ParsedAnnotations> {
    let mut annotations: Vec<Annotation> = Vec::new();
    let mut index_by_id: HashMap<String, usize> = HashMap::new();
    let mut warnings = Vec::new();

    let mut push = |raw: RawAnnotation, location: String| -> Result<()> {
        if !(0..=5).contains(&raw.difficulty) || !(0..=5).contains(&raw.subjectivity) {
            return Err(Error::parse(
                &location,
                format!(
                    "scores must be within 0..=5 (got {}, {})",
                    raw.difficulty, raw.subjectivity
                ),
            ));
        }
        let annotation = Annotation::new(
            raw.battle_id.clone(),
            raw.difficulty as u8,
            raw.subjectivity as u8,
        )
        .map_err(|e| Error::parse(&location, e.to_string()))?;
        match index_by_id.get(&raw.battle_id) {
            Some(&i) => {
                warnings.push(format!(
                    "{location}: duplicate annotation for {}; keeping the later one",
                    raw.battle_id
                ));
                annotations[i] = annotation;
            }
            None => {
                index_by_id.insert(raw.battle_id, annotations.len());
                annotations.push(annotation);
            }
        }
        Ok(())
    };

    match format {
        FileFormat::Jsonl => {
            for (line_number, line) in BufReader::new(source).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let location = format!("line {}", line_number + 1);
                let raw: RawAnnotation = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(&location, format!("invalid JSON: {e}")))?;
                push(raw, location)?;
            }
        }
        FileFormat::Csv => {
            let mut reader = csv::Reader::from_reader(source);
            for (record_number, record) in reader.deserialize::<RawAnnotation>().enumerate() {
                let location = format!("row {}", record_number + 2);
                let raw =
                    record.map_err(|e| Error::parse(&location, format!("invalid row: {e}")))?;
                push(raw, location)?;
            }
        }
    }

    Ok(ParsedAnnotations {
        annotations,
        warnings,
    })
}

pub fn write_annotations(
    annotations: &[Annotation],
    format: FileFormat,
    sink: &mut dyn Write,
) -> Result<()> {
    match format {
        FileFormat::Jsonl => {
            for annotation in annotations {
                serde_json::to_writer(&mut *sink, annotation)?;
                sink.write_all(b"\n")?;
            }
        }
        FileFormat::Csv => {
            let mut writer = csv::Writer::from_writer(sink);
            writer.write_record(["battle_id", "difficulty", "subjectivity"])?;
            for annotation in annotations {
                writer.write_record([
                    annotation.battle_id.as_str(),
                    &annotation.difficulty.to_string(),
                    &annotation.subjectivity.to_string(),
                ])?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}
