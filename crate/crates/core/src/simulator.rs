//! Deterministic synthetic arena with configurable, known ground truth.
//!
//! Latent skills live on the Bradley-Terry log-odds scale. Each battle picks
//! a uniform model pair, samples query difficulty and subjectivity, decides
//! draw-or-not from the configured draw model (optionally discounted by the
//! skill gap), and resolves decisive battles by the logistic win
//! probability. With `gap_coupling = 0`, draws are independent of skill by
//! construction, which is exactly the regime the skip-draw treatment is
//! supposed to win in — so the generator doubles as a test oracle.
//!
//! Randomness: ChaCha8 seeded with `seed_from_u64`, uniform doubles from the
//! top 53 bits, categorical and index sampling by rejection, and normal
//! skills through the inverse CDF. The same seed yields the same stream
//! everywhere.

use serde::{Deserialize, Serialize};

use crate::domain::{Annotation, Battle, BattleStream, ModelId, Outcome};
use crate::error::{Error, Result};
use crate::numerics::inv_cdf_raw;
use crate::rng::DetRng;

pub const SCORE_LEVELS: usize = 6;

/// Base draw probability per (difficulty, subjectivity) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawModel {
    table: [[f64; SCORE_LEVELS]; SCORE_LEVELS],
}

impl DrawModel {
    pub fn from_table(table: [[f64; SCORE_LEVELS]; SCORE_LEVELS]) -> Result<Self> {
        for row in &table {
            for p in row {
                if !(0.0..1.0).contains(p) {
                    return Err(Error::invalid(format!(
                        "draw probabilities must be in [0, 1), got {p}"
                    )));
                }
            }
        }
        Ok(DrawModel { table })
    }

    /// The same draw probability everywhere: draws carry no information
    /// about the query.
    pub fn uniform(p: f64) -> Result<Self> {
        Self::from_table([[p; SCORE_LEVELS]; SCORE_LEVELS])
    }

    /// Multiplicative boosts for score-zero queries on each axis, scaled so
    /// the mean draw probability under uniform score distributions is
    /// `mean_rate`. With uniform score distributions the theoretical bin-0
    /// risk ratios are exactly the two boost factors.
    pub fn bin0_boosted(
        mean_rate: f64,
        difficulty0_ratio: f64,
        subjectivity0_ratio: f64,
    ) -> Result<Self> {
        if difficulty0_ratio <= 0.0 || subjectivity0_ratio <= 0.0 {
            return Err(Error::invalid("boost ratios must be positive"));
        }
        let levels = SCORE_LEVELS as f64;
        let mean_d = (difficulty0_ratio + (levels - 1.0)) / levels;
        let mean_s = (subjectivity0_ratio + (levels - 1.0)) / levels;
        let base = mean_rate / (mean_d * mean_s);
        let mut table = [[0.0; SCORE_LEVELS]; SCORE_LEVELS];
        for (d, row) in table.iter_mut().enumerate() {
            for (s, cell) in row.iter_mut().enumerate() {
                let fd = if d == 0 { difficulty0_ratio } else { 1.0 };
                let fs = if s == 0 { subjectivity0_ratio } else { 1.0 };
                *cell = base * fd * fs;
            }
        }
        Self::from_table(table)
    }

    pub fn probability(&self, difficulty: u8, subjectivity: u8) -> f64 {
        self.table[difficulty as usize][subjectivity as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatorConfig {
    pub n_models: usize,
    pub n_battles: usize,
    /// Standard deviation of latent skills on the log-odds scale.
    pub skill_scale: f64,
    /// Categorical weights over scores 0..=5.
    pub difficulty_dist: [f64; SCORE_LEVELS],
    pub subjectivity_dist: [f64; SCORE_LEVELS],
    pub draw_model: DrawModel,
    /// Per-unit-of-skill-gap reduction of the draw probability; zero makes
    /// draws independent of skill.
    pub gap_coupling: f64,
    pub seed: u64,
}

impl SimulatorConfig {
    /// Uniform score distributions, unit skills, and a flat 35% draw rate.
    pub fn new(n_models: usize, n_battles: usize, seed: u64) -> Self {
        SimulatorConfig {
            n_models,
            n_battles,
            skill_scale: 1.0,
            difficulty_dist: [1.0; SCORE_LEVELS],
            subjectivity_dist: [1.0; SCORE_LEVELS],
            draw_model: DrawModel::uniform(0.35).expect("valid default"),
            gap_coupling: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_models < 2 {
            return Err(Error::invalid("need at least two models"));
        }
        if self.n_battles == 0 {
            return Err(Error::invalid("need at least one battle"));
        }
        if self.skill_scale <= 0.0 || !self.skill_scale.is_finite() {
            return Err(Error::invalid("skill scale must be positive"));
        }
        if self.gap_coupling < 0.0 || !self.gap_coupling.is_finite() {
            return Err(Error::invalid("gap coupling must be non-negative"));
        }
        for dist in [&self.difficulty_dist, &self.subjectivity_dist] {
            if dist.iter().any(|w| *w < 0.0 || !w.is_finite()) {
                return Err(Error::invalid("score weights must be non-negative"));
            }
            if dist.iter().sum::<f64>() <= 0.0 {
                return Err(Error::invalid("score weights must not all be zero"));
            }
        }
        Ok(())
    }
}

/// Per-battle generation record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BattleTruth {
    pub difficulty: u8,
    pub subjectivity: u8,
    /// Draw probability actually used (after gap coupling and clamping).
    pub draw_probability: f64,
}

/// Everything the generator knew: the latent skills and each battle's draw
/// probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Latent skill per model, indexed like the generated model ids.
    pub skills: Vec<f64>,
    pub battles: Vec<BattleTruth>,
}

fn logistic(x: f64) -> f64 {
    (1.0 + (-x).exp()).recip()
}

/// Generates a battle stream, a full annotation set, and the ground truth,
/// all determined by `config.seed`.
pub fn simulate(config: &SimulatorConfig) -> Result<(BattleStream, Vec<Annotation>, GroundTruth)> {
    config.validate()?;
    let mut rng = DetRng::new(config.seed);

    let skills: Vec<f64> = (0..config.n_models)
        .map(|_| config.skill_scale * inv_cdf_raw(rng.next_f64_open()))
        .collect();
    let ids: Vec<ModelId> = (0..config.n_models)
        .map(|i| ModelId::new(format!("model-{i:03}")).expect("non-empty id"))
        .collect();

    let mut battles = Vec::with_capacity(config.n_battles);
    let mut annotations = Vec::with_capacity(config.n_battles);
    let mut truths = Vec::with_capacity(config.n_battles);

    for index in 0..config.n_battles {
        let a = rng.next_index(config.n_models);
        let mut b = rng.next_index(config.n_models - 1);
        if b >= a {
            b += 1;
        }

        let difficulty = rng.next_categorical(&config.difficulty_dist) as u8;
        let subjectivity = rng.next_categorical(&config.subjectivity_dist) as u8;

        let gap = (skills[a] - skills[b]).abs();
        let p_draw = (config.draw_model.probability(difficulty, subjectivity)
            - config.gap_coupling * gap)
            .clamp(0.0, 1.0);

        let outcome = if rng.next_f64() < p_draw {
            Outcome::Draw
        } else if rng.next_f64() < logistic(skills[a] - skills[b]) {
            Outcome::WinA
        } else {
            Outcome::WinB
        };

        let battle_id = format!("sim-{index:06}");
        battles.push(
            Battle::new(
                battle_id.clone(),
                index as i64,
                ids[a].clone(),
                ids[b].clone(),
                outcome,
                None,
            )
            .expect("generated battles are valid"),
        );
        annotations.push(
            Annotation::new(battle_id, difficulty, subjectivity).expect("scores within range"),
        );
        truths.push(BattleTruth {
            difficulty,
            subjectivity,
            draw_probability: p_draw,
        });
    }

    Ok((
        BattleStream::new(battles)?,
        annotations,
        GroundTruth {
            skills,
            battles: truths,
        },
    ))
}

/// Exact draw risk ratio implied by the configuration for one score bin:
/// expected draw probability inside the bin over the expectation outside it.
/// Only defined with `gap_coupling = 0` (no closed form otherwise).
pub fn theoretical_rr(
    config: &SimulatorConfig,
    field: crate::analysis::AnnotationField,
    bin: u8,
) -> Result<f64> {
    use crate::analysis::AnnotationField;

    config.validate()?;
    if config.gap_coupling != 0.0 {
        return Err(Error::invalid(
            "theoretical risk ratios require gap_coupling = 0",
        ));
    }
    if bin as usize >= SCORE_LEVELS {
        return Err(Error::invalid(format!(
            "bin must be within 0..=5, got {bin}"
        )));
    }

    // Marginalize the other axis; weights normalize out of the ratio except
    // for the binned axis itself.
    let (bin_dist, other_dist) = match field {
        AnnotationField::Difficulty => (&config.difficulty_dist, &config.subjectivity_dist),
        AnnotationField::Subjectivity => (&config.subjectivity_dist, &config.difficulty_dist),
    };
    let other_total: f64 = other_dist.iter().sum();
    let mean_at = |level: usize| -> f64 {
        (0..SCORE_LEVELS)
            .map(|other| {
                let p = match field {
                    AnnotationField::Difficulty => {
                        config.draw_model.probability(level as u8, other as u8)
                    }
                    AnnotationField::Subjectivity => {
                        config.draw_model.probability(other as u8, level as u8)
                    }
                };
                other_dist[other] / other_total * p
            })
            .sum()
    };

    let bin_total: f64 = bin_dist.iter().sum();
    let p_bin = bin_dist[bin as usize] / bin_total;
    if p_bin <= 0.0 {
        return Err(Error::invalid(format!("bin {bin} has zero probability")));
    }
    if p_bin >= 1.0 {
        return Err(Error::invalid(format!(
            "bin {bin} has full probability; the unexposed group is empty"
        )));
    }

    let exposed = mean_at(bin as usize);
    let mut unexposed = 0.0;
    for level in 0..SCORE_LEVELS {
        if level != bin as usize {
            unexposed += bin_dist[level] / (bin_total - bin_dist[bin as usize]) * mean_at(level);
        }
    }
    if unexposed <= 0.0 {
        return Err(Error::invalid(
            "unexposed draw probability is zero; the ratio is undefined",
        ));
    }
    Ok(exposed / unexposed)
}
