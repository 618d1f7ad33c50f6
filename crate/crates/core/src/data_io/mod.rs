//! Ingestion of battle logs and annotation files, schema mapping for
//! heterogeneous arena exports, report serialization, and a generic HTTP
//! annotation client.

mod annotations;
mod annotator;
mod battles;
mod report;
mod schema;

pub use annotations::{parse_annotations, write_annotations, ParsedAnnotations};
pub use annotator::{annotate_via_llm, AnnotatorConfig, AnnotatorRun, ResponseParser};
pub use battles::{parse_battles, write_battles, ParsedBattles};
pub use report::{round_sig, write_report, Report, ReportFormat};
pub use schema::{FileFormat, SchemaMapping};
