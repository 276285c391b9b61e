//! Monte Carlo estimation of the probability that the origin is eventually
//! occupied under windowed dynamics.

use rayon::prelude::*;

use crate::config::Configuration;
use crate::coupling::CouplingSource;
use crate::dynamics::{run_fixpoint, BoundaryPolicy, Rule, NEVER};
use crate::error::{Error, Result};
use crate::stats::wilson_interval;
use crate::window::BoxWindow;

#[derive(Debug, Clone)]
pub struct PhiParams {
    pub window: BoxWindow,
    pub rule: Rule,
    pub boundary: BoundaryPolicy,
    pub p: f64,
    pub q: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct EstimateResult {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Mean round at which the origin fired, over successful trials.
    pub mean_rounds: Option<f64>,
}

/// Runs `trials` independent samples and reports the fraction in which the
/// origin ends up occupied, with a Wilson score interval. Trial i draws its
/// configuration from the child source `derive(i)`, so the estimate is a
/// pure function of the parameters regardless of thread count.
pub fn origin_occupied_estimate(params: &PhiParams) -> Result<EstimateResult> {
    let origin = vec![0i64; params.window.dim()];
    if !params.window.contains(&origin) {
        return Err(Error::Parameter(
            "estimation window must contain the origin".into(),
        ));
    }
    if params.trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    params.boundary.validate(&params.window)?;
    let root = CouplingSource::new(params.seed);
    let outcomes: Result<Vec<(bool, u32)>> = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let cfg = Configuration::sample(
                params.window.clone(),
                params.p,
                params.q,
                root.derive(trial),
            )?;
            let res = run_fixpoint(&cfg, params.rule, &params.boundary)?;
            let round = res.round_of(&origin).expect("origin is inside the window");
            Ok((round != NEVER, round))
        })
        .collect();
    let outcomes = outcomes?;
    let successes = outcomes.iter().filter(|(hit, _)| *hit).count() as u64;
    let round_sum: u64 = outcomes
        .iter()
        .filter(|(hit, _)| *hit)
        .map(|&(_, r)| r as u64)
        .sum();
    let (ci_lo, ci_hi) = wilson_interval(successes, params.trials);
    let estimate = successes as f64 / params.trials as f64;
    Ok(EstimateResult {
        successes,
        trials: params.trials,
        estimate,
        ci_lo,
        ci_hi,
        mean_rounds: (successes > 0).then(|| round_sum as f64 / successes as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(p: f64, q: f64, trials: u64, seed: u64) -> PhiParams {
        PhiParams {
            window: BoxWindow::centered(vec![16, 16, 16]).unwrap(),
            rule: Rule::standard(2),
            boundary: BoundaryPolicy::ClosedOutside,
            p,
            q,
            trials,
            seed,
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let all = origin_occupied_estimate(&base(1.0, 0.0, 20, 1)).unwrap();
        assert_eq!(all.successes, 20);
        assert_eq!(all.estimate, 1.0);
        assert_eq!(all.mean_rounds, Some(0.0));
        let none = origin_occupied_estimate(&base(0.0, 1.0, 20, 1)).unwrap();
        assert_eq!(none.successes, 0);
        assert!(none.mean_rounds.is_none());
        assert!(none.ci_hi < 0.2);
    }

    #[test]
    fn deterministic_across_repeat_runs() {
        let a = origin_occupied_estimate(&base(0.1, 0.01, 64, 9)).unwrap();
        let b = origin_occupied_estimate(&base(0.1, 0.01, 64, 9)).unwrap();
        assert_eq!(a.successes, b.successes);
        assert_eq!(a.mean_rounds, b.mean_rounds);
        let c = origin_occupied_estimate(&base(0.1, 0.01, 64, 10)).unwrap();
        // different seed should not be forced to agree
        let _ = c;
    }

    #[test]
    fn estimate_brackets_occupied_density_when_rule_cannot_fire() {
        // oversized threshold: origin occupied iff initially occupied
        let mut params = base(0.3, 0.1, 4000, 5);
        params.rule = Rule::standard(99);
        let res = origin_occupied_estimate(&params).unwrap();
        assert!(res.ci_lo <= 0.3 && 0.3 <= res.ci_hi, "{res:?}");
        assert_eq!(res.mean_rounds, Some(0.0));
    }

    #[test]
    fn rejects_windows_missing_the_origin() {
        let mut params = base(0.1, 0.1, 4, 1);
        params.window = BoxWindow::new(vec![5, 5, 5], vec![4, 4, 4]).unwrap();
        assert!(origin_occupied_estimate(&params).is_err());
    }
}
