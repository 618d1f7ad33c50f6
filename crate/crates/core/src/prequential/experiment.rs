//! The full ablation grid: systems x treatments, with one calibrated margin
//! per system and McNemar significance against the apply-all baseline.

use serde::{Deserialize, Serialize};

use crate::analysis::mcnemar_from_records;
use crate::domain::BattleStream;
use crate::error::Result;
use crate::rating::SystemConfig;

use super::calibrate::calibrate_margin_config;
use super::metrics::{metrics, MetricsReport, WlMode};
use super::policy::TreatmentPolicy;
use super::replay::{replay_config, PredictionRecord};

/// Treatment selector for experiment grids. `RandomOmit` gets its rate from
/// the stream's own draw fraction, so skipping is matched in volume to a
/// skip-draw run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreatmentKind {
    ApplyAll,
    RandomOmit,
    SkipDrawUpdates,
}

impl TreatmentKind {
    pub fn name(self) -> &'static str {
        match self {
            TreatmentKind::ApplyAll => "apply_all",
            TreatmentKind::RandomOmit => "random_omit",
            TreatmentKind::SkipDrawUpdates => "skip_draw_updates",
        }
    }

    pub fn all() -> Vec<TreatmentKind> {
        vec![
            TreatmentKind::ApplyAll,
            TreatmentKind::RandomOmit,
            TreatmentKind::SkipDrawUpdates,
        ]
    }

    fn to_policy(self, draw_fraction: f64, seed: u64) -> TreatmentPolicy {
        match self {
            TreatmentKind::ApplyAll => TreatmentPolicy::ApplyAll,
            TreatmentKind::SkipDrawUpdates => TreatmentPolicy::SkipDrawUpdates,
            TreatmentKind::RandomOmit => TreatmentPolicy::RandomOmit {
                omit_rate: draw_fraction,
                seed,
            },
        }
    }
}

impl std::str::FromStr for TreatmentKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "apply_all" | "apply-all" | "baseline" => Ok(TreatmentKind::ApplyAll),
            "random_omit" | "random-omit" => Ok(TreatmentKind::RandomOmit),
            "skip_draw_updates" | "skip-draws" | "skip-draw-updates" => {
                Ok(TreatmentKind::SkipDrawUpdates)
            }
            other => Err(crate::Error::invalid(format!(
                "unknown treatment {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentOptions {
    /// Leading fraction of the stream used only to tune the margin.
    pub calibration_fraction: f64,
    pub wl_mode: WlMode,
    /// Seed for random-omission skip patterns.
    pub omit_seed: u64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            calibration_fraction: 0.05,
            wl_mode: WlMode::ZeroMargin,
            omit_seed: 0,
        }
    }
}

/// One system-treatment cell of the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub system: String,
    pub treatment: String,
    pub epsilon: f64,
    pub acc: f64,
    pub wl_acc: Option<f64>,
    pub draw_acc: Option<f64>,
    /// Relative change of `acc` against the apply-all baseline, in percent.
    pub rel_acc_pct: f64,
    pub rel_wl_pct: Option<f64>,
    /// Mean of the available relative changes, in percent.
    pub delta_pct: f64,
    /// Discordant-pair counts against the baseline (treatment right /
    /// baseline wrong, and the reverse). Absent on the baseline row.
    pub mcnemar_b: Option<usize>,
    pub mcnemar_c: Option<usize>,
    /// One-sided McNemar p-value for the treatment beating the baseline.
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_battles: usize,
    pub n_validation: usize,
    pub draw_fraction: f64,
    pub calibration_fraction: f64,
    pub wl_mode: WlMode,
    pub rows: Vec<ExperimentRow>,
}

/// Runs the grid. For each system the margin is calibrated once with every
/// update applied, then reused across all treatments of that system; random
/// omission skips at the stream's draw fraction. Metrics are over the
/// validation slice.
pub fn run_experiment(
    stream: &BattleStream,
    systems: &[SystemConfig],
    treatments: &[TreatmentKind],
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    let draw_fraction = stream.draw_fraction()?;
    let mut rows = Vec::with_capacity(systems.len() * treatments.len());
    let mut n_validation = 0;

    for system in systems {
        let epsilon = calibrate_margin_config(stream, system, options.calibration_fraction)?;
        let baseline = replay_config(
            stream,
            system,
            &TreatmentPolicy::ApplyAll,
            epsilon,
            options.calibration_fraction,
        )?;
        let baseline_metrics = metrics(&baseline, true, options.wl_mode)?;
        let baseline_records: Vec<&PredictionRecord> = baseline.validation_records().collect();
        n_validation = baseline_records.len();

        for kind in treatments {
            let row = match kind {
                TreatmentKind::ApplyAll => cell(
                    system.name(),
                    *kind,
                    epsilon,
                    &baseline_metrics,
                    &baseline_metrics,
                    None,
                ),
                _ => {
                    let policy = kind.to_policy(draw_fraction, options.omit_seed);
                    let log = replay_config(
                        stream,
                        system,
                        &policy,
                        epsilon,
                        options.calibration_fraction,
                    )?;
                    let treatment_metrics = metrics(&log, true, options.wl_mode)?;
                    let treatment_records: Vec<&PredictionRecord> =
                        log.validation_records().collect();
                    let test = mcnemar_from_records(&treatment_records, &baseline_records)?;
                    cell(
                        system.name(),
                        *kind,
                        epsilon,
                        &treatment_metrics,
                        &baseline_metrics,
                        Some(test),
                    )
                }
            };
            rows.push(row);
        }
    }

    Ok(ExperimentReport {
        n_battles: stream.len(),
        n_validation,
        draw_fraction,
        calibration_fraction: options.calibration_fraction,
        wl_mode: options.wl_mode,
        rows,
    })
}

fn cell(
    system: &str,
    kind: TreatmentKind,
    epsilon: f64,
    m: &MetricsReport,
    base: &MetricsReport,
    test: Option<crate::analysis::McNemarResult>,
) -> ExperimentRow {
    let rel = |value: f64, baseline: f64| {
        if baseline == 0.0 {
            0.0
        } else {
            (value - baseline) / baseline * 100.0
        }
    };
    let rel_acc_pct = rel(m.acc, base.acc);
    let rel_wl_pct = match (m.wl_acc, base.wl_acc) {
        (Some(v), Some(b)) => Some(rel(v, b)),
        _ => None,
    };
    let mut deltas = vec![rel_acc_pct];
    deltas.extend(rel_wl_pct);
    let delta_pct = deltas.iter().sum::<f64>() / deltas.len() as f64;
    ExperimentRow {
        system: system.to_string(),
        treatment: kind.name().to_string(),
        epsilon,
        acc: m.acc,
        wl_acc: m.wl_acc,
        draw_acc: m.draw_acc,
        rel_acc_pct,
        rel_wl_pct,
        delta_pct,
        mcnemar_b: test.as_ref().map(|t| t.b),
        mcnemar_c: test.as_ref().map(|t| t.c),
        p_value: test.map(|t| t.p_one_sided),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Battle, ModelId, Outcome};
    use crate::rating::{BradleyTerryConfig, EloConfig, Glicko2Config, TrueSkillConfig};

    fn small_stream() -> BattleStream {
        let ids: Vec<ModelId> = (0..4)
            .map(|i| ModelId::new(format!("m{i}")).unwrap())
            .collect();
        let battles: Vec<Battle> = (0..60)
            .map(|i| {
                let a = &ids[i % 4];
                let b = &ids[(i + 1 + i % 3) % 4];
                let outcome = match i % 5 {
                    0 | 3 => Outcome::WinA,
                    1 => Outcome::Draw,
                    _ => Outcome::WinB,
                };
                Battle::new(
                    format!("b{i}"),
                    i as i64,
                    a.clone(),
                    b.clone(),
                    outcome,
                    None,
                )
                .unwrap()
            })
            .collect();
        BattleStream::new(battles).unwrap()
    }

    fn all_systems() -> Vec<SystemConfig> {
        vec![
            SystemConfig::Elo(EloConfig::default()),
            SystemConfig::Glicko2(Glicko2Config::default()),
            SystemConfig::BradleyTerry(BradleyTerryConfig::default()),
            SystemConfig::Trueskill(TrueSkillConfig::default()),
        ]
    }

    #[test]
    fn baseline_only_grid_has_zero_deltas() {
        let report = run_experiment(
            &small_stream(),
            &all_systems(),
            &[TreatmentKind::ApplyAll],
            &ExperimentOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 4);
        for row in &report.rows {
            assert_eq!(row.rel_acc_pct, 0.0);
            assert_eq!(row.delta_pct, 0.0);
            assert_eq!(row.p_value, None);
        }
    }

    #[test]
    fn full_grid_has_twelve_rows_in_declared_order() {
        let systems = all_systems();
        let treatments = TreatmentKind::all();
        let report = run_experiment(
            &small_stream(),
            &systems,
            &treatments,
            &ExperimentOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 12);
        for (i, row) in report.rows.iter().enumerate() {
            assert_eq!(row.system, systems[i / 3].name());
            assert_eq!(row.treatment, treatments[i % 3].name());
            if row.treatment != "apply_all" {
                assert!(row.p_value.is_some());
                let p = row.p_value.unwrap();
                assert!((0.0..=1.0).contains(&p));
            }
        }
        // One margin per system, shared by its three rows.
        for chunk in report.rows.chunks(3) {
            assert!(chunk.iter().all(|r| r.epsilon == chunk[0].epsilon));
        }
    }

    #[test]
    fn treatment_parsing() {
        assert_eq!(
            "skip-draws".parse::<TreatmentKind>().unwrap(),
            TreatmentKind::SkipDrawUpdates
        );
        assert_eq!(
            "apply_all".parse::<TreatmentKind>().unwrap(),
            TreatmentKind::ApplyAll
        );
        assert!("typo".parse::<TreatmentKind>().is_err());
    }
}
