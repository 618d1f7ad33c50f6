//! Draw risk ratios binned by annotation score and by rating-gap percentile.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::{Annotation, BattleStream};
use crate::error::{Error, Result};
use crate::prequential::PredictionLog;

use super::risk_ratio::{risk_ratio, RiskRatioResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationField {
    Difficulty,
    Subjectivity,
}

impl AnnotationField {
    pub fn name(self) -> &'static str {
        match self {
            AnnotationField::Difficulty => "difficulty",
            AnnotationField::Subjectivity => "subjectivity",
        }
    }

    fn score(self, annotation: &Annotation) -> u8 {
        match self {
            AnnotationField::Difficulty => annotation.difficulty,
            AnnotationField::Subjectivity => annotation.subjectivity,
        }
    }
}

impl std::str::FromStr for AnnotationField {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "difficulty" => Ok(AnnotationField::Difficulty),
            "subjectivity" => Ok(AnnotationField::Subjectivity),
            other => Err(Error::invalid(format!(
                "unknown annotation field {other:?}"
            ))),
        }
    }
}

/// Risk ratio of drawing for battles scored `bin` against all other
/// annotated battles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationBinRr {
    pub bin: u8,
    pub result: RiskRatioResult,
}

/// Per-score draw risk ratios over the annotated subset of a stream.
///
/// Every annotation must refer to a battle in the stream; unannotated
/// battles are excluded. Duplicate annotations for a battle resolve to the
/// last one. Bins with an empty exposed or unexposed group come back with an
/// undefined ratio.
pub fn rr_by_annotation(
    stream: &BattleStream,
    annotations: &[Annotation],
    field: AnnotationField,
) -> Result<Vec<AnnotationBinRr>> {
    let outcomes: HashMap<&str, bool> = stream
        .iter()
        .map(|b| (b.battle_id.as_str(), b.outcome.is_draw()))
        .collect();

    let mut deduped: HashMap<&str, &Annotation> = HashMap::with_capacity(annotations.len());
    for annotation in annotations {
        if !outcomes.contains_key(annotation.battle_id.as_str()) {
            return Err(Error::invalid(format!(
                "annotation refers to unknown battle {}",
                annotation.battle_id
            )));
        }
        deduped.insert(annotation.battle_id.as_str(), annotation);
    }

    let mut draws = [0usize; 6];
    let mut totals = [0usize; 6];
    for (battle_id, annotation) in &deduped {
        let score = field.score(annotation) as usize;
        totals[score] += 1;
        if outcomes[battle_id] {
            draws[score] += 1;
        }
    }
    let all_draws: usize = draws.iter().sum();
    let all_totals: usize = totals.iter().sum();

    Ok((0u8..6)
        .map(|bin| {
            let i = bin as usize;
            AnnotationBinRr {
                bin,
                result: risk_ratio(
                    draws[i],
                    totals[i],
                    all_draws - draws[i],
                    all_totals - totals[i],
                ),
            }
        })
        .collect())
}

/// One percentile bin of rating gaps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBinRr {
    /// Percentile range covered, e.g. (90, 100) for the top decile.
    pub percentile_low: f64,
    pub percentile_high: f64,
    /// Gap range covered (closed on the upper edge).
    pub gap_low: f64,
    pub gap_high: f64,
    /// True when tied gap values collapsed several percentile bins into one.
    pub merged: bool,
    pub result: RiskRatioResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRrReport {
    pub n_records: usize,
    pub n_bins_requested: usize,
    /// True when any requested bins had to be merged.
    pub degenerate: bool,
    pub bins: Vec<GapBinRr>,
}

/// Draw risk ratio as a function of the pre-battle rating gap, binned by gap
/// percentile (deciles by default). Gaps exactly on a bin edge fall in the
/// lower bin. Bins emptied by tied edges are merged into their lower
/// neighbor and flagged.
pub fn rr_by_rating_gap(log: &PredictionLog, n_bins: usize) -> Result<GapRrReport> {
    let pairs: Vec<(f64, bool)> = log
        .records
        .iter()
        .map(|r| (r.pre_gap, r.actual.is_draw()))
        .collect();
    rr_by_gap_pairs(&pairs, n_bins)
}

/// [`rr_by_rating_gap`] over raw `(gap, is_draw)` pairs, for gaps that come
/// from somewhere other than a replay (e.g. a published final-ratings
/// table).
pub fn rr_by_gap_pairs(pairs: &[(f64, bool)], n_bins: usize) -> Result<GapRrReport> {
    if pairs.is_empty() {
        return Err(Error::invalid("cannot bin an empty gap list"));
    }
    if n_bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    let n = pairs.len();

    let mut sorted: Vec<f64> = pairs.iter().map(|(gap, _)| *gap).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("gaps are finite"));

    // Nearest-rank percentile edges between consecutive bins.
    let edges: Vec<f64> = (1..n_bins)
        .map(|k| sorted[((k * n).div_ceil(n_bins)) - 1])
        .collect();

    let assign = |gap: f64| edges.iter().filter(|e| **e < gap).count();

    let mut draws = vec![0usize; n_bins];
    let mut totals = vec![0usize; n_bins];
    for (gap, is_draw) in pairs {
        let bin = assign(*gap);
        totals[bin] += 1;
        if *is_draw {
            draws[bin] += 1;
        }
    }
    let all_draws: usize = draws.iter().sum();

    // Tied edges leave later bins empty; fold each empty bin into the run
    // that swallowed its mass (the nearest non-empty bin below).
    let mut bins = Vec::new();
    let mut degenerate = false;
    let mut start = 0usize;
    while start < n_bins {
        let mut end = start;
        while end + 1 < n_bins && totals[end + 1] == 0 {
            end += 1;
        }
        let bin_draws: usize = draws[start..=end].iter().sum();
        let bin_total: usize = totals[start..=end].iter().sum();
        let merged = end > start;
        degenerate |= merged;
        bins.push(GapBinRr {
            percentile_low: start as f64 * 100.0 / n_bins as f64,
            percentile_high: (end + 1) as f64 * 100.0 / n_bins as f64,
            gap_low: if start == 0 {
                sorted[0]
            } else {
                edges[start - 1]
            },
            gap_high: if end + 1 < n_bins {
                edges[end]
            } else {
                sorted[n - 1]
            },
            merged,
            result: risk_ratio(bin_draws, bin_total, all_draws - bin_draws, n - bin_total),
        });
        start = end + 1;
    }

    Ok(GapRrReport {
        n_records: n,
        n_bins_requested: n_bins,
        degenerate,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Battle, ModelId, Outcome};
    use crate::prequential::{PredictionRecord, TreatmentPolicy};
    use crate::rating::OutcomeProbs;

    fn stream_with_outcomes(outcomes: &[Outcome]) -> BattleStream {
        let a = ModelId::new("a").unwrap();
        let b = ModelId::new("b").unwrap();
        let battles: Vec<Battle> = outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| {
                Battle::new(format!("b{i}"), i as i64, a.clone(), b.clone(), *o, None).unwrap()
            })
            .collect();
        BattleStream::new(battles).unwrap()
    }

    fn log_with_gaps(gaps_and_draws: &[(f64, bool)]) -> PredictionLog {
        PredictionLog {
            system: "elo".into(),
            policy: TreatmentPolicy::ApplyAll,
            epsilon: 0.0,
            records: gaps_and_draws
                .iter()
                .enumerate()
                .map(|(i, (gap, draw))| PredictionRecord {
                    battle_id: format!("b{i}"),
                    predicted: Outcome::WinA,
                    actual: if *draw { Outcome::Draw } else { Outcome::WinA },
                    probs: OutcomeProbs::decisive(0.6),
                    pre_gap: *gap,
                    in_calibration: false,
                })
                .collect(),
        }
    }

    #[test]
    fn annotation_bins_partition_the_annotated_set() {
        let stream = stream_with_outcomes(&[
            Outcome::Draw,
            Outcome::WinA,
            Outcome::Draw,
            Outcome::WinB,
            Outcome::WinA,
        ]);
        let annotations = vec![
            Annotation::new("b0", 0, 5).unwrap(),
            Annotation::new("b1", 0, 4).unwrap(),
            Annotation::new("b2", 3, 0).unwrap(),
            Annotation::new("b3", 3, 0).unwrap(),
        ];
        let bins = rr_by_annotation(&stream, &annotations, AnnotationField::Difficulty).unwrap();
        assert_eq!(bins.len(), 6);
        let totals: usize = bins.iter().map(|b| b.result.exposed.total).sum();
        assert_eq!(totals, 4); // b4 is unannotated and excluded
        assert_eq!(bins[0].result.exposed.draws, 1);
        assert_eq!(bins[3].result.exposed.draws, 1);
        // Scores 1, 2, 4, 5 are empty: undefined ratios.
        assert_eq!(bins[1].result.rr, None);
    }

    #[test]
    fn annotation_for_unknown_battle_is_an_error() {
        let stream = stream_with_outcomes(&[Outcome::Draw]);
        let annotations = vec![Annotation::new("missing", 0, 0).unwrap()];
        assert!(rr_by_annotation(&stream, &annotations, AnnotationField::Difficulty).is_err());
    }

    #[test]
    fn duplicate_annotations_last_wins() {
        let stream = stream_with_outcomes(&[Outcome::Draw, Outcome::WinA]);
        let annotations = vec![
            Annotation::new("b0", 1, 0).unwrap(),
            Annotation::new("b1", 2, 0).unwrap(),
            Annotation::new("b0", 4, 0).unwrap(),
        ];
        let bins = rr_by_annotation(&stream, &annotations, AnnotationField::Difficulty).unwrap();
        assert_eq!(bins[1].result.exposed.total, 0);
        assert_eq!(bins[4].result.exposed.total, 1);
    }

    #[test]
    fn single_bin_has_no_unexposed_group() {
        let stream = stream_with_outcomes(&[Outcome::Draw, Outcome::WinA]);
        let annotations = vec![
            Annotation::new("b0", 2, 0).unwrap(),
            Annotation::new("b1", 2, 0).unwrap(),
        ];
        let bins = rr_by_annotation(&stream, &annotations, AnnotationField::Difficulty).unwrap();
        assert_eq!(bins[2].result.rr, None); // unexposed group is empty
    }

    #[test]
    fn gap_bins_partition_all_records() {
        let records: Vec<(f64, bool)> = (0..100).map(|i| (i as f64, i % 3 == 0)).collect();
        let report = rr_by_rating_gap(&log_with_gaps(&records), 10).unwrap();
        assert!(!report.degenerate);
        assert_eq!(report.bins.len(), 10);
        let total: usize = report.bins.iter().map(|b| b.result.exposed.total).sum();
        assert_eq!(total, 100);
        for bin in &report.bins {
            assert_eq!(bin.result.exposed.total, 10);
        }
    }

    #[test]
    fn edge_values_fall_in_the_lower_bin() {
        // Two distinct values split 50/50 into two bins; the edge value
        // itself belongs below.
        let mut records: Vec<(f64, bool)> = vec![(1.0, false); 5];
        records.extend(vec![(2.0, false); 5]);
        let report = rr_by_rating_gap(&log_with_gaps(&records), 2).unwrap();
        assert_eq!(report.bins[0].result.exposed.total, 5);
        assert_eq!(report.bins[1].result.exposed.total, 5);
    }

    #[test]
    fn all_equal_gaps_collapse_to_one_flagged_bin() {
        let records = vec![(3.5, true); 40];
        let report = rr_by_rating_gap(&log_with_gaps(&records), 10).unwrap();
        assert!(report.degenerate);
        assert_eq!(report.bins.len(), 1);
        assert!(report.bins[0].merged);
        assert_eq!(report.bins[0].result.rr, None); // empty unexposed group
    }

    #[test]
    fn one_bin_is_degenerate_by_construction() {
        let records = vec![(1.0, true), (2.0, false)];
        let report = rr_by_rating_gap(&log_with_gaps(&records), 1).unwrap();
        assert_eq!(report.bins.len(), 1);
        assert_eq!(report.bins[0].result.rr, None);
    }

    #[test]
    fn permuting_records_leaves_ratios_unchanged() {
        let records: Vec<(f64, bool)> = (0..60).map(|i| (i as f64 * 0.7, i % 4 == 0)).collect();
        let mut shuffled = records.clone();
        shuffled.reverse();
        let a = rr_by_rating_gap(&log_with_gaps(&records), 5).unwrap();
        let b = rr_by_rating_gap(&log_with_gaps(&shuffled), 5).unwrap();
        assert_eq!(a.bins, b.bins);
    }
}
