//! Subcommand implementations. Data goes to files (or stdout with `-`);
//! progress and warnings go to standard error.

use std::io::Write;
use std::path::Path;

use arena_ratings::analysis::{
    rr_by_annotation, rr_by_gap_pairs, rr_by_rating_gap, AnnotationField,
};
use arena_ratings::data_io::{
    annotate_via_llm, parse_annotations, parse_battles, write_annotations, write_battles,
    write_report, AnnotatorConfig, FileFormat, Report, ReportFormat, SchemaMapping,
};
use arena_ratings::domain::BattleStream;
use arena_ratings::prequential::{
    calibrate_margin_config, margin_grid, metrics, replay_config, run_experiment, tradeoff_curve,
    ExperimentOptions, TreatmentKind, TreatmentPolicy, WlMode,
};
use arena_ratings::rating::SystemConfig;
use arena_ratings::simulator::{simulate, DrawModel, SimulatorConfig};
use arena_ratings::{Error, Result};

use crate::args;
use crate::config::{
    manifest_path, system_by_name, validate_config, Diagnostic, EpsilonName, EpsilonSpec, Manifest,
    ResolvedRun, RunConfigFile, Severity,
};

/// Prints diagnostics to stderr; fails when any is an error.
fn enforce(diagnostics: &[Diagnostic]) -> std::result::Result<(), crate::ExitError> {
    for diagnostic in diagnostics {
        eprintln!(
            "{}: {}",
            match diagnostic.severity {
                Severity::Warning => "warning",
                Severity::Error => "error",
            },
            diagnostic.message
        );
    }
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return Err(crate::ExitError::Usage(format!(
            "{} configuration error(s)",
            diagnostics
                .iter()
                .filter(|d| d.severity == Severity::Error)
                .count()
        )));
    }
    Ok(())
}

fn infer_format(path: &Path, explicit: Option<FileFormat>) -> FileFormat {
    explicit.unwrap_or_else(|| {
        if path.extension().is_some_and(|e| e == "csv") {
            FileFormat::Csv
        } else {
            FileFormat::Jsonl
        }
    })
}

fn infer_report_format(path: &Path, explicit: Option<&str>) -> Result<ReportFormat> {
    if let Some(name) = explicit {
        return name.parse();
    }
    Ok(match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => ReportFormat::Csv,
        Some("txt") | Some("text") => ReportFormat::Text,
        _ => ReportFormat::Json,
    })
}

fn load_schema(
    schema_path: Option<&Path>,
    from_config: Option<&SchemaMapping>,
    drop_bothbad: bool,
) -> Result<SchemaMapping> {
    let mut schema = match (schema_path, from_config) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)?
        }
        (None, Some(schema)) => schema.clone(),
        (None, None) => SchemaMapping::default(),
    };
    if drop_bothbad {
        schema = schema.without_bothbad();
    }
    Ok(schema)
}

fn load_stream(input: &Path, format: FileFormat, schema: &SchemaMapping) -> Result<BattleStream> {
    let file = std::fs::File::open(input)?;
    let parsed = parse_battles(std::io::BufReader::new(file), format, schema)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {}: {warning}", input.display());
    }
    Ok(parsed.stream)
}

fn write_report_to(report: &impl Report, format: ReportFormat, out: &Path) -> Result<()> {
    if out.as_os_str() == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        write_report(report, format, &mut lock)?;
        lock.flush()?;
        return Ok(());
    }
    let mut file = std::fs::File::create(out)?;
    write_report(report, format, &mut file)?;
    Ok(())
}

pub fn run_simulate(args: &args::SimulateArgs) -> std::result::Result<(), crate::ExitError> {
    let draw_model =
        DrawModel::bin0_boosted(args.draw_rate, args.difficulty0_rr, args.subjectivity0_rr)
            .map_err(crate::ExitError::usage)?;
    let mut config = SimulatorConfig::new(args.models, args.battles, args.seed);
    config.skill_scale = args.skill_scale;
    config.gap_coupling = args.gap_coupling;
    config.draw_model = draw_model;
    config.validate().map_err(crate::ExitError::usage)?;

    let (stream, annotations, truth) = simulate(&config)?;

    let format = args.file_format.unwrap_or(FileFormat::Jsonl);
    let mut battles_file = std::fs::File::create(&args.out_battles).map_err(Error::from)?;
    write_battles(&stream, format, &mut battles_file)?;
    let mut manifest =
        Manifest::new("simulate", &config)?.with_output("battles", &args.out_battles);

    if let Some(path) = &args.out_annotations {
        let mut file = std::fs::File::create(path).map_err(Error::from)?;
        write_annotations(&annotations, format, &mut file)?;
        manifest = manifest.with_output("annotations", path);
    }
    if let Some(path) = &args.out_truth {
        let mut bytes = serde_json::to_vec_pretty(&truth).map_err(Error::from)?;
        bytes.push(b'\n');
        std::fs::write(path, bytes).map_err(Error::from)?;
        manifest = manifest.with_output("ground_truth", path);
    }

    manifest.write(&manifest_path(args.manifest.as_deref(), &args.out_battles))?;
    eprintln!(
        "simulated {} battles over {} models (draw fraction {:.4})",
        stream.len(),
        args.models,
        stream.draw_fraction()?
    );
    Ok(())
}

/// Shared resolution for the replay-style commands.
struct ReplaySetup {
    resolved: ResolvedRun,
    stream: BattleStream,
}

#[allow(clippy::too_many_arguments)]
fn resolve_replay(
    command: &str,
    input: Option<&Path>,
    format: Option<FileFormat>,
    schema_path: Option<&Path>,
    drop_bothbad: bool,
    config_path: Option<&Path>,
    system_names: &[String],
    treatments: Option<Vec<TreatmentKind>>,
    epsilon: Option<EpsilonSpec>,
    calibration_fraction: Option<f64>,
    wl_mode: Option<WlMode>,
    seed: Option<u64>,
) -> std::result::Result<ReplaySetup, crate::ExitError> {
    let file = match config_path {
        Some(path) => RunConfigFile::load(path).map_err(crate::ExitError::usage)?,
        None => RunConfigFile::default(),
    };

    let input = input
        .map(Path::to_path_buf)
        .or(file.input.clone())
        .ok_or_else(|| crate::ExitError::Usage("no input path given".into()))?;
    let format = infer_format(&input, format.or(file.format));
    let schema = load_schema(
        schema_path.or(file.schema_path.as_deref()),
        file.schema.as_ref(),
        drop_bothbad || file.drop_bothbad.unwrap_or(false),
    )
    .map_err(crate::ExitError::usage)?;

    let names: Vec<String> = if !system_names.is_empty() {
        system_names.to_vec()
    } else if let Some(names) = &file.systems {
        names.clone()
    } else if let Some(system) = &file.system {
        vec![system.name().to_string()]
    } else {
        Vec::new()
    };
    let systems: Vec<SystemConfig> = names
        .iter()
        .map(|name| system_by_name(name, file.system.as_ref()))
        .collect::<Result<_>>()
        .map_err(crate::ExitError::usage)?;

    let resolved = ResolvedRun {
        input,
        format,
        schema,
        systems,
        treatments: treatments
            .or(file.treatments)
            .unwrap_or_else(|| vec![TreatmentKind::ApplyAll]),
        epsilon: epsilon
            .or(file.epsilon)
            .unwrap_or(EpsilonSpec::Named(EpsilonName::Calibrate)),
        calibration_fraction: calibration_fraction
            .or(file.calibration_fraction)
            .unwrap_or(0.05),
        wl_mode: wl_mode.or(file.wl_mode).unwrap_or_default(),
        seed: seed.or(file.seed).unwrap_or(0),
    };
    enforce(&validate_config(&resolved))?;

    let stream = load_stream(&resolved.input, resolved.format, &resolved.schema)
        .map_err(crate::ExitError::from)?;
    eprintln!(
        "{command}: loaded {} battles from {}",
        stream.len(),
        resolved.input.display()
    );
    Ok(ReplaySetup { resolved, stream })
}

fn resolve_epsilon(
    spec: EpsilonSpec,
    stream: &BattleStream,
    system: &SystemConfig,
    calibration_fraction: f64,
) -> Result<f64> {
    match spec {
        EpsilonSpec::Fixed(value) => Ok(value),
        EpsilonSpec::Named(EpsilonName::Calibrate) => {
            calibrate_margin_config(stream, system, calibration_fraction)
        }
    }
}

fn policy_for(
    kind: TreatmentKind,
    omit_rate: Option<f64>,
    stream: &BattleStream,
    seed: u64,
) -> Result<TreatmentPolicy> {
    Ok(match kind {
        TreatmentKind::ApplyAll => TreatmentPolicy::ApplyAll,
        TreatmentKind::SkipDrawUpdates => TreatmentPolicy::SkipDrawUpdates,
        TreatmentKind::RandomOmit => TreatmentPolicy::RandomOmit {
            omit_rate: match omit_rate {
                Some(rate) => rate,
                None => stream.draw_fraction()?,
            },
            seed,
        },
    })
}

pub fn run_evaluate(args: &args::EvaluateArgs) -> std::result::Result<(), crate::ExitError> {
    let setup = resolve_replay(
        "evaluate",
        args.common.input.as_deref(),
        args.common.format,
        args.common.schema.as_deref(),
        args.common.drop_bothbad,
        args.common.config.as_deref(),
        &args.system.clone().map(|s| vec![s]).unwrap_or_default(),
        Some(vec![args.policy]),
        args.epsilon,
        args.calibration_fraction,
        args.wl_mode,
        args.seed,
    )?;
    let resolved = &setup.resolved;
    let system = &resolved.systems[0];

    let epsilon = resolve_epsilon(
        resolved.epsilon,
        &setup.stream,
        system,
        resolved.calibration_fraction,
    )?;
    let policy = policy_for(args.policy, args.omit_rate, &setup.stream, resolved.seed)?;
    let log = replay_config(
        &setup.stream,
        system,
        &policy,
        epsilon,
        resolved.calibration_fraction,
    )?;
    let report = metrics(&log, !args.include_calibration, resolved.wl_mode)?;

    let report_format = infer_report_format(&args.out, args.report_format.as_deref())
        .map_err(crate::ExitError::usage)?;
    write_report_to(&report, report_format, &args.out)?;

    #[derive(serde::Serialize)]
    struct EvaluateManifest<'a> {
        run: &'a ResolvedRun,
        policy: &'a TreatmentPolicy,
        epsilon: f64,
        include_calibration: bool,
    }
    Manifest::new(
        "evaluate",
        EvaluateManifest {
            run: resolved,
            policy: &policy,
            epsilon,
            include_calibration: args.include_calibration,
        },
    )?
    .with_output("report", &args.out)
    .write(&manifest_path(args.manifest.as_deref(), &args.out))?;

    eprintln!(
        "evaluate: {} under {} at margin {epsilon}: acc {:.6}",
        system.name(),
        policy.name(),
        report.acc
    );
    Ok(())
}

pub fn run_sweep(args: &args::SweepArgs) -> std::result::Result<(), crate::ExitError> {
    let setup = resolve_replay(
        "sweep",
        args.common.input.as_deref(),
        args.common.format,
        args.common.schema.as_deref(),
        args.common.drop_bothbad,
        args.common.config.as_deref(),
        &args.system.clone().map(|s| vec![s]).unwrap_or_default(),
        Some(vec![args.policy]),
        // The grid, not a single margin, drives sweep decisions.
        Some(EpsilonSpec::Named(EpsilonName::Calibrate)),
        args.calibration_fraction,
        None,
        args.seed,
    )?;
    let resolved = &setup.resolved;

    let grid = match &args.epsilon_grid {
        Some(text) => parse_grid(text).map_err(crate::ExitError::usage)?,
        None => margin_grid(),
    };
    let policy = policy_for(args.policy, args.omit_rate, &setup.stream, resolved.seed)?;
    let curve = tradeoff_curve(
        &setup.stream,
        &resolved.systems[0],
        &policy,
        &grid,
        resolved.calibration_fraction,
    )?;

    let report_format = infer_report_format(&args.out, args.report_format.as_deref())
        .map_err(crate::ExitError::usage)?;
    write_report_to(&curve, report_format, &args.out)?;

    #[derive(serde::Serialize)]
    struct SweepManifest<'a> {
        run: &'a ResolvedRun,
        policy: &'a TreatmentPolicy,
        grid: &'a [f64],
    }
    Manifest::new(
        "sweep",
        SweepManifest {
            run: resolved,
            policy: &policy,
            grid: &grid,
        },
    )?
    .with_output("curve", &args.out)
    .write(&manifest_path(args.manifest.as_deref(), &args.out))?;

    eprintln!("sweep: {} points written", curve.len());
    Ok(())
}

/// Parses "start:end:step" into an inclusive grid.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::invalid(format!(
            "grid must be start:end:step, got {text:?}"
        )));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::invalid(format!("grid bound {s:?} is not a number")))
    };
    let (start, end, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if step <= 0.0 || end < start {
        return Err(Error::invalid("grid needs end >= start and step > 0"));
    }
    let count = ((end - start) / step + 1.5).floor() as usize;
    Ok((0..count)
        .map(|i| start + i as f64 * step)
        .filter(|e| *e <= end + 1e-12)
        .collect())
}

pub fn run_ablate(args: &args::AblateArgs) -> std::result::Result<(), crate::ExitError> {
    let system_names: Vec<String> = match args.systems.as_deref() {
        None | Some("all") => ["elo", "glicko2", "bradley_terry", "trueskill"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
    };
    let treatments = match args.treatments.as_deref() {
        None | Some("all") => TreatmentKind::all(),
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()
            .map_err(crate::ExitError::usage)?,
    };

    let setup = resolve_replay(
        "ablate",
        args.common.input.as_deref(),
        args.common.format,
        args.common.schema.as_deref(),
        args.common.drop_bothbad,
        args.common.config.as_deref(),
        &system_names,
        Some(treatments),
        Some(EpsilonSpec::Named(EpsilonName::Calibrate)),
        args.calibration_fraction,
        args.wl_mode,
        args.seed,
    )?;
    let resolved = &setup.resolved;

    let options = ExperimentOptions {
        calibration_fraction: resolved.calibration_fraction,
        wl_mode: resolved.wl_mode,
        omit_seed: resolved.seed,
    };
    let report = run_experiment(
        &setup.stream,
        &resolved.systems,
        &resolved.treatments,
        &options,
    )?;

    let report_format = infer_report_format(&args.out, args.report_format.as_deref())
        .map_err(crate::ExitError::usage)?;
    write_report_to(&report, report_format, &args.out)?;
    let mut manifest = Manifest::new("ablate", resolved)?.with_output("grid", &args.out);
    if let Some(path) = &args.text_out {
        write_report_to(&report, ReportFormat::Text, path)?;
        manifest = manifest.with_output("grid_text", path);
    }
    manifest.write(&manifest_path(args.manifest.as_deref(), &args.out))?;

    eprintln!(
        "ablate: {} systems x {} treatments over {} battles",
        resolved.systems.len(),
        resolved.treatments.len(),
        setup.stream.len()
    );
    Ok(())
}

pub fn run_rr_annotations(
    args: &args::RrAnnotationsArgs,
) -> std::result::Result<(), crate::ExitError> {
    let schema = load_schema(args.schema.as_deref(), None, args.drop_bothbad)
        .map_err(crate::ExitError::usage)?;
    let stream = load_stream(
        &args.battles,
        infer_format(&args.battles, args.format),
        &schema,
    )?;
    let annotations_file = std::fs::File::open(&args.annotations).map_err(Error::from)?;
    let parsed = parse_annotations(
        std::io::BufReader::new(annotations_file),
        infer_format(&args.annotations, args.annotations_format),
    )?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }

    let field: AnnotationField = args.field.parse().map_err(crate::ExitError::usage)?;
    let bins = rr_by_annotation(&stream, &parsed.annotations, field)?;

    let report_format = infer_report_format(&args.out, args.report_format.as_deref())
        .map_err(crate::ExitError::usage)?;
    write_report_to(&bins, report_format, &args.out)?;

    #[derive(serde::Serialize)]
    struct RrAnnotationsManifest<'a> {
        battles: &'a Path,
        annotations: &'a Path,
        field: &'a str,
        n_annotations: usize,
    }
    Manifest::new(
        "analyze rr-annotations",
        RrAnnotationsManifest {
            battles: &args.battles,
            annotations: &args.annotations,
            field: field.name(),
            n_annotations: parsed.annotations.len(),
        },
    )?
    .with_output("risk_ratios", &args.out)
    .write(&manifest_path(args.manifest.as_deref(), &args.out))?;
    Ok(())
}

pub fn run_rr_gap(args: &args::RrGapArgs) -> std::result::Result<(), crate::ExitError> {
    let schema = load_schema(args.schema.as_deref(), None, args.drop_bothbad)
        .map_err(crate::ExitError::usage)?;
    let stream = load_stream(
        &args.battles,
        infer_format(&args.battles, args.format),
        &schema,
    )?;
    let system = system_by_name(&args.system, None).map_err(crate::ExitError::usage)?;

    let report = match &args.ratings_table {
        Some(table_path) => {
            // Fixed external ratings: gaps come straight from the table.
            let table: std::collections::HashMap<String, f64> =
                serde_json::from_str(&std::fs::read_to_string(table_path).map_err(Error::from)?)
                    .map_err(Error::from)?;
            let pairs: Vec<(f64, bool)> = stream
                .iter()
                .map(|battle| {
                    let rating = |id: &arena_ratings::domain::ModelId| {
                        table.get(id.as_str()).copied().ok_or_else(|| {
                            Error::invalid(format!(
                                "battle {}: model {id} missing from the ratings table",
                                battle.battle_id
                            ))
                        })
                    };
                    Ok((
                        (rating(&battle.model_a)? - rating(&battle.model_b)?).abs(),
                        battle.outcome.is_draw(),
                    ))
                })
                .collect::<Result<_>>()?;
            rr_by_gap_pairs(&pairs, args.bins)?
        }
        None => {
            // Gaps recorded online during an apply-all replay; the decision
            // margin is irrelevant to them.
            let log = replay_config(&stream, &system, &TreatmentPolicy::ApplyAll, 0.0, 0.0)?;
            rr_by_rating_gap(&log, args.bins)?
        }
    };
    if report.degenerate {
        eprintln!("warning: tied gap values forced bin merges");
    }

    let report_format = infer_report_format(&args.out, args.report_format.as_deref())
        .map_err(crate::ExitError::usage)?;
    write_report_to(&report, report_format, &args.out)?;

    #[derive(serde::Serialize)]
    struct RrGapManifest<'a> {
        battles: &'a Path,
        system: &'a str,
        ratings_table: Option<&'a Path>,
        bins: usize,
    }
    Manifest::new(
        "analyze rr-gap",
        RrGapManifest {
            battles: &args.battles,
            system: system.name(),
            ratings_table: args.ratings_table.as_deref(),
            bins: args.bins,
        },
    )?
    .with_output("risk_ratios", &args.out)
    .write(&manifest_path(args.manifest.as_deref(), &args.out))?;
    Ok(())
}

pub fn run_annotate(args: &args::AnnotateArgs) -> std::result::Result<(), crate::ExitError> {
    let schema = load_schema(args.schema.as_deref(), None, args.drop_bothbad)
        .map_err(crate::ExitError::usage)?;
    let stream = load_stream(
        &args.battles,
        infer_format(&args.battles, args.format),
        &schema,
    )?;

    let mut config = AnnotatorConfig::new(args.endpoint.clone());
    if let Some(path) = &args.prompt_file {
        config.prompt_template = std::fs::read_to_string(path).map_err(Error::from)?;
    }
    config.timeout_secs = args.timeout;
    config.max_retries = args.retries;
    config.sample_seed = args.seed;
    config.validate().map_err(crate::ExitError::usage)?;

    let run = annotate_via_llm(&stream, &config, args.limit)?;
    for warning in &run.warnings {
        eprintln!("warning: {warning}");
    }

    let mut file = std::fs::File::create(&args.out).map_err(Error::from)?;
    write_annotations(
        &run.annotations,
        infer_format(&args.out, args.out_format),
        &mut file,
    )?;

    #[derive(serde::Serialize)]
    struct AnnotateManifest<'a> {
        battles: &'a Path,
        config: &'a AnnotatorConfig,
        limit: usize,
        succeeded: usize,
        failed: usize,
    }
    Manifest::new(
        "annotate",
        AnnotateManifest {
            battles: &args.battles,
            config: &config,
            limit: args.limit,
            succeeded: run.annotations.len(),
            failed: run.failures,
        },
    )?
    .with_output("annotations", &args.out)
    .write(&manifest_path(args.manifest.as_deref(), &args.out))?;

    eprintln!(
        "annotate: {} annotated, {} skipped",
        run.annotations.len(),
        run.failures
    );
    Ok(())
}
