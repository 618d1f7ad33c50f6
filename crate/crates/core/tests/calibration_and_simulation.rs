//! Calibration against an exhaustive sweep oracle, and statistical
//! convergence of the simulator to its configured ground truth.

use arena_ratings::prequential::{calibrate_margin, decide, margin_grid, replay, TreatmentPolicy};
use arena_ratings::rating::BradleyTerryConfig;
use arena_ratings::simulator::{simulate, DrawModel, SimulatorConfig, SCORE_LEVELS};

/// Exhaustive oracle: one full replay per grid point, scored directly.
fn exhaustive_best_margin(
    stream: &arena_ratings::domain::BattleStream,
    system: &BradleyTerryConfig,
) -> f64 {
    let mut best_eps = f64::NAN;
    let mut best_correct = 0usize;
    for (i, eps) in margin_grid().into_iter().enumerate() {
        let log = replay(stream, system, &TreatmentPolicy::ApplyAll, eps, 1.0).unwrap();
        let correct = log
            .records
            .iter()
            .filter(|r| decide(&r.probs, eps) == r.actual)
            .count();
        if i == 0 || correct > best_correct {
            best_eps = eps;
            best_correct = correct;
        }
    }
    best_eps
}

fn draw_heavy_config(seed: u64) -> SimulatorConfig {
    let mut cfg = SimulatorConfig::new(20, 4000, seed);
    cfg.skill_scale = 1.2;
    cfg.draw_model = DrawModel::uniform(0.45).unwrap();
    cfg
}

#[test]
fn calibration_matches_the_exhaustive_sweep() {
    for seed in 0..8 {
        let (stream, _, _) = simulate(&draw_heavy_config(seed)).unwrap();
        let system = BradleyTerryConfig::default();
        let oracle = exhaustive_best_margin(&stream, &system);
        let calibrated = calibrate_margin(&stream, &system, 1.0).unwrap();
        assert_eq!(calibrated, oracle, "seed {seed}");
    }
}

#[test]
fn engineered_stream_calibrates_to_a_quarter() {
    // Draw-heavy, well-spread skills put the sweep optimum at 0.25; the
    // exhaustive oracle over all nine grid points confirms it.
    let (stream, _, _) = simulate(&draw_heavy_config(0)).unwrap();
    let system = BradleyTerryConfig::default();
    assert_eq!(exhaustive_best_margin(&stream, &system), 0.25);
    assert_eq!(calibrate_margin(&stream, &system, 1.0).unwrap(), 0.25);
}

#[test]
fn per_bin_draw_rates_converge_to_the_configured_table() {
    // Difficulty-0 queries draw more; every (seed, bin) cell should land
    // within three standard errors of its configured probability almost
    // always.
    let mut checked = 0usize;
    let mut within = 0usize;
    for seed in 0..10u64 {
        let mut cfg = SimulatorConfig::new(20, 100_000, 1000 + seed);
        cfg.draw_model = DrawModel::bin0_boosted(0.35, 1.37, 1.35).unwrap();
        let (stream, annotations, _) = simulate(&cfg).unwrap();

        let mut draws = [0usize; SCORE_LEVELS];
        let mut totals = [0usize; SCORE_LEVELS];
        for (battle, annotation) in stream.iter().zip(&annotations) {
            let bin = annotation.difficulty as usize;
            totals[bin] += 1;
            if battle.outcome.is_draw() {
                draws[bin] += 1;
            }
        }

        for bin in 0..SCORE_LEVELS {
            // Expected rate marginalized over the uniform subjectivity axis.
            let expected: f64 = (0..SCORE_LEVELS)
                .map(|s| cfg.draw_model.probability(bin as u8, s as u8))
                .sum::<f64>()
                / SCORE_LEVELS as f64;
            let n = totals[bin] as f64;
            let rate = draws[bin] as f64 / n;
            let se = (expected * (1.0 - expected) / n).sqrt();
            checked += 1;
            if (rate - expected).abs() <= 3.0 * se {
                within += 1;
            }
        }
    }
    assert!(
        within as f64 >= 0.95 * checked as f64,
        "only {within}/{checked} bin-seed cells within 3 standard errors"
    );
}
