use serde::{Deserialize, Serialize};

use super::{ks_two_sample, run_replicas, KsTest, Problem, ReplicaPlan, Sampling, SolverChoice, CODE_VERSION};
use crate::constraints::ConstraintSpec;
use crate::error::{require_positive, Error, Result};
use crate::rng::derive_seed;
use crate::solvers::AnnealConfig;

/// A scaling check passes when the KS p-value exceeds this level.
pub const KS_PASS_LEVEL: f64 = 0.01;

/// Two sides of a distributional scaling identity.
///
/// Each variant names the left-hand configuration; the right-hand one is
/// derived from it by the exact change of variables, so truncating to a
/// window on one side truncates to the image window on the other.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalingPair {
    /// `L_lambda(t)` against `L_1(lambda^{1/(1+gamma)} t)`, Hölder point-to-point.
    HolderIntensity { gamma: f64, a_max: f64, lambda: f64, t: f64, window: f64 },
    /// `L^E_lambda(t)` against `L^E_1(lambda^{a/(a+b+1)} t)`, budget `B t`.
    EntropyIntensity { a: f64, b: f64, budget: f64, lambda: f64, t: f64, window: f64 },
    /// `Z_{1,beta}(t)` against `beta Z_{1,1}(beta^{1/(a+b)} t)`.
    Polymer { a: f64, b: f64, beta: f64, t: f64, window: f64 },
    /// `T_beta(R, wmin)` against `c^{-nu} T_1(c R, c^{2/alpha} wmin)` with
    /// `c = beta^{-alpha/(nu alpha - 2)}`.
    HeavyTail { alpha: f64, nu: f64, beta: f64, radius: f64, wmin: f64, anneal: AnnealConfig },
}

impl ScalingPair {
    /// Left plan, right plan and the factor applied to right-hand values.
    fn plans(&self, samples: u32, seed: u64) -> Result<(ReplicaPlan, ReplicaPlan, f64)> {
        let (ls, rs) = (derive_seed(seed, 0), derive_seed(seed, 1));
        let plan = |problem, sampling, solver, seed| ReplicaPlan { problem, sampling, solver, replicas: samples, seed, jobs: None };
        Ok(match *self {
            ScalingPair::HolderIntensity { gamma, a_max, lambda, t, window } => {
                require_positive("lambda", lambda)?;
                let problem = Problem::Lpp { spec: ConstraintSpec::Holder { gamma, a_max }, point_to_point: true };
                let ct = lambda.powf(1.0 / (1.0 + gamma));
                let cx = lambda.powf(gamma / (1.0 + gamma));
                (
                    plan(problem, Sampling::Poisson { lambda, t, window }, SolverChoice::Exact, ls),
                    plan(problem, Sampling::Poisson { lambda: 1.0, t: ct * t, window: cx * window }, SolverChoice::Exact, rs),
                    1.0,
                )
            }
            ScalingPair::EntropyIntensity { a, b, budget, lambda, t, window } => {
                require_positive("lambda", lambda)?;
                let problem = Problem::Lpp { spec: ConstraintSpec::Entropy { a, b, budget }, point_to_point: true };
                let ct = lambda.powf(a / (a + b + 1.0));
                let cx = lambda.powf((b + 1.0) / (a + b + 1.0));
                (
                    plan(problem, Sampling::Poisson { lambda, t, window }, SolverChoice::Exact, ls),
                    plan(problem, Sampling::Poisson { lambda: 1.0, t: ct * t, window: cx * window }, SolverChoice::Exact, rs),
                    1.0,
                )
            }
            ScalingPair::Polymer { a, b, beta, t, window } => {
                require_positive("beta", beta)?;
                let c = beta.powf(1.0 / (a + b));
                let sampling = |t, window| Sampling::Poisson { lambda: 1.0, t, window };
                (
                    plan(Problem::Polymer { beta, a, b }, sampling(t, window), SolverChoice::Exact, ls),
                    plan(Problem::Polymer { beta: 1.0, a, b }, sampling(c * t, window / c), SolverChoice::Exact, rs),
                    beta,
                )
            }
            ScalingPair::HeavyTail { alpha, nu, beta, radius, wmin, anneal } => {
                require_positive("beta", beta)?;
                if nu * alpha <= 2.0 {
                    return Err(Error::param("heavy-tail scaling needs nu alpha > 2"));
                }
                let c = beta.powf(-alpha / (nu * alpha - 2.0));
                let solver = SolverChoice::Anneal(anneal);
                (
                    plan(Problem::HeavyTail { beta, nu }, Sampling::HeavyTail { alpha, radius, wmin }, solver, ls),
                    plan(
                        Problem::HeavyTail { beta: 1.0, nu },
                        Sampling::HeavyTail { alpha, radius: c * radius, wmin: c.powf(2.0 / alpha) * wmin },
                        solver,
                        rs,
                    ),
                    c.powf(-nu),
                )
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub version: String,
    pub pair: ScalingPair,
    pub samples: u32,
    pub seed: u64,
    pub left_plan: ReplicaPlan,
    pub right_plan: ReplicaPlan,
    pub right_factor: f64,
    pub left: Vec<f64>,
    /// Right-hand values after multiplying by `right_factor`.
    pub right: Vec<f64>,
    pub ks: KsTest,
    pub passed: bool,
}

/// Two-sample KS test between the two sides of `pair` on independent samples.
pub fn check_scaling_distribution(pair: &ScalingPair, samples: u32, seed: u64) -> Result<ScalingReport> {
    let (left_plan, right_plan, right_factor) = pair.plans(samples, seed)?;
    let left: Vec<f64> = run_replicas(&left_plan)?.iter().map(|v| v.value).collect();
    let right: Vec<f64> = run_replicas(&right_plan)?.iter().map(|v| v.value * right_factor).collect();
    let ks = ks_two_sample(&left, &right)?;
    Ok(ScalingReport {
        version: CODE_VERSION.into(),
        pair: *pair,
        samples,
        seed,
        left_plan,
        right_plan,
        right_factor,
        left,
        right,
        passed: ks.p_value > KS_PASS_LEVEL,
        ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_pair_is_measure_preserving() {
        let pair = ScalingPair::HolderIntensity { gamma: 1.0, a_max: 1.0, lambda: 4.0, t: 10.0, window: 5.0 };
        let (l, r, f) = pair.plans(10, 0).unwrap();
        let (Sampling::Poisson { lambda: l1, t: t1, window: w1 }, Sampling::Poisson { lambda: l2, t: t2, window: w2 }) =
            (l.sampling, r.sampling)
        else {
            panic!()
        };
        assert!((l1 * t1 * w1 - l2 * t2 * w2).abs() < 1e-9);
        assert_eq!((t2, w2, f), (20.0, 10.0, 1.0));
    }

    #[test]
    fn heavy_pair_factors() {
        let pair = ScalingPair::HeavyTail {
            alpha: 1.5,
            nu: 2.0,
            beta: 2.0,
            radius: 8.0,
            wmin: 0.8,
            anneal: AnnealConfig::default(),
        };
        let (_, r, f) = pair.plans(10, 0).unwrap();
        assert!((f - 8.0).abs() < 1e-12);
        let Sampling::HeavyTail { radius, wmin, .. } = r.sampling else { panic!() };
        assert!((radius - 8.0 / 2f64.powf(1.5)).abs() < 1e-12);
        assert!((wmin - 0.2).abs() < 1e-12);
    }

    #[test]
    fn small_polymer_check_runs() {
        let pair = ScalingPair::Polymer { a: 2.0, b: 1.0, beta: 2.0, t: 6.0, window: 3.0 };
        let r = check_scaling_distribution(&pair, 60, 9).unwrap();
        assert_eq!(r.left.len(), 60);
        assert!(r.ks.p_value > 1e-4);
    }
}
