//! Which rating updates a replay applies.

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};
use crate::rng::DetRng;

/// Update treatment applied during a replay.
///
/// Predictions are always made and scored for every battle; the policy only
/// controls whether the post-battle update runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreatmentPolicy {
    /// Apply every update.
    ApplyAll,
    /// Apply updates for decisive battles only; draws are scored but leave
    /// the ratings untouched.
    SkipDrawUpdates,
    /// Skip updates for uniformly random battles at `omit_rate`, decided by
    /// a dedicated generator that consumes one variate per battle. This is
    /// the "less data" control: the same amount of skipping as a skip-draw
    /// run, without the draw semantics.
    RandomOmit { omit_rate: f64, seed: u64 },
}

impl TreatmentPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            TreatmentPolicy::ApplyAll => "apply_all",
            TreatmentPolicy::SkipDrawUpdates => "skip_draw_updates",
            TreatmentPolicy::RandomOmit { .. } => "random_omit",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let TreatmentPolicy::RandomOmit { omit_rate, .. } = self {
            if !(0.0..=1.0).contains(omit_rate) {
                return Err(Error::invalid(format!(
                    "omit rate must be in [0, 1], got {omit_rate}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn runner(&self) -> PolicyRunner {
        PolicyRunner {
            policy: self.clone(),
            rng: match self {
                TreatmentPolicy::RandomOmit { seed, .. } => Some(DetRng::new(*seed)),
                _ => None,
            },
        }
    }
}

pub(crate) struct PolicyRunner {
    policy: TreatmentPolicy,
    rng: Option<DetRng>,
}

impl PolicyRunner {
    /// Called exactly once per battle, in stream order.
    pub fn skip_update(&mut self, outcome: Outcome) -> bool {
        match &self.policy {
            TreatmentPolicy::ApplyAll => false,
            TreatmentPolicy::SkipDrawUpdates => outcome.is_draw(),
            TreatmentPolicy::RandomOmit { omit_rate, .. } => {
                // One variate per battle keeps the skip pattern independent
                // of outcomes and margins.
                let u = self
                    .rng
                    .as_mut()
                    .expect("random policy has a generator")
                    .next_f64();
                u < *omit_rate
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_all_never_skips() {
        let mut runner = TreatmentPolicy::ApplyAll.runner();
        assert!(!runner.skip_update(Outcome::Draw));
        assert!(!runner.skip_update(Outcome::WinA));
    }

    #[test]
    fn skip_draws_skips_only_draws() {
        let mut runner = TreatmentPolicy::SkipDrawUpdates.runner();
        assert!(runner.skip_update(Outcome::Draw));
        assert!(!runner.skip_update(Outcome::WinA));
        assert!(!runner.skip_update(Outcome::WinB));
    }

    #[test]
    fn random_omit_boundary_rates() {
        let mut always = TreatmentPolicy::RandomOmit {
            omit_rate: 1.0,
            seed: 3,
        }
        .runner();
        let mut never = TreatmentPolicy::RandomOmit {
            omit_rate: 0.0,
            seed: 3,
        }
        .runner();
        for _ in 0..100 {
            assert!(always.skip_update(Outcome::WinA));
            assert!(!never.skip_update(Outcome::WinA));
        }
    }

    #[test]
    fn random_omit_is_reproducible() {
        let run = |seed| {
            let mut runner = TreatmentPolicy::RandomOmit {
                omit_rate: 0.5,
                seed,
            }
            .runner();
            (0..64)
                .map(|_| runner.skip_update(Outcome::WinA))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn omit_rate_validated() {
        assert!(TreatmentPolicy::RandomOmit {
            omit_rate: 1.5,
            seed: 0
        }
        .validate()
        .is_err());
        assert!(TreatmentPolicy::RandomOmit {
            omit_rate: 0.35,
            seed: 0
        }
        .validate()
        .is_ok());
    }
}
