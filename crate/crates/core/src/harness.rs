//! Monte Carlo experiments that confront simulations with the limit theorems.
//!
//! Every replica draws from its own stream, derived from the master seed, an experiment name
//! and the replica index, and results are combined in index order. Reports are therefore a
//! function of the configuration and the seed alone, whatever the size of the thread pool.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::env::{CookieEnvironment, RegimeKind};
use crate::error::{Error, Result};
use crate::idla::{Cluster, Growth};
use crate::pbm::{self, PbmParams};
use crate::rng::RandomStream;
use crate::stats::{joint_stderr, ks_two_sample, EstimateWithCI, KsOutcome};
use crate::theory::{self, Prediction, PredictionKind};
use crate::walk::{self, ExitSampler, Side};

type Env = CookieEnvironment<f64>;

/// Default LLN slack constant: the verdict allows `slack_c / sqrt(N)` on top of `3 stderr`.
pub const DEFAULT_SLACK_C: f64 = 5.0;
/// Default escape radius of the transience proxy (the second radius is twice this).
pub const DEFAULT_ESCAPE_RADIUS: u64 = 1_000;
/// Default number of auxiliary walks per diagnostic point.
pub const DEFAULT_AUX_WALKS: u64 = 200;
/// Significance level of the KS comparison.
pub const KS_LEVEL: f64 = 0.01;
/// Width of the confidence band, in standard errors.
pub const K_SIGMA: f64 = 3.0;
/// Rounded targets within this distance of an integer are snapped to it first.
const ROUNDING_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Simulated quantity compared against a theoretical value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub predicted: Prediction,
    pub observed: EstimateWithCI,
    /// Pass iff `|observed - predicted| <= k_sigma * stderr + margin`.
    pub k_sigma: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub config: serde_json::Value,
}

impl ExperimentReport {
    fn judge(
        experiment: &str,
        predicted: Prediction,
        observed: EstimateWithCI,
        margin: f64,
        config: serde_json::Value,
    ) -> Self {
        let verdict = match predicted.p() {
            Some(p) => Verdict::from_bool(observed.within(p, K_SIGMA, margin)),
            None => Verdict::Inconclusive,
        };
        ExperimentReport {
            experiment: experiment.to_string(),
            predicted,
            observed,
            k_sigma: K_SIGMA,
            margin,
            verdict,
            config,
        }
    }
}

fn check_replicas(replicas: u64) -> Result<()> {
    if replicas == 0 {
        return Err(Error::InvalidArgument("replicas must be >= 1".into()));
    }
    Ok(())
}

/// Runs `f` once per replica on its own stream; results come back in replica order.
fn replicate<T, S, I, F>(seed: u64, experiment: &str, replicas: u64, init: I, f: F) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut RandomStream) -> Result<T> + Sync + Send,
{
    check_replicas(replicas)?;
    (0..replicas)
        .into_par_iter()
        .map_init(init, |state, k| {
            let mut rng = RandomStream::for_replica(seed, experiment, k);
            f(state, &mut rng)
        })
        .collect()
}

fn count_right(sides: &[Side]) -> u64 {
    sides.iter().filter(|&&s| s == Side::Right).count() as u64
}

/// `v` rounded toward zero, after snapping values within `1e-9` of an integer.
fn truncate(v: f64) -> i64 {
    let r = v.round();
    if (v - r).abs() <= ROUNDING_SNAP {
        r as i64
    } else {
        v.trunc() as i64
    }
}

/// Targets `([(n+2)x], [(n+2)(x-1)])` of `h_n(x)`, rounded toward zero.
///
/// Fails with `DegenerateBarrier` when a target is the origin, where the event is decided
/// before the walk moves.
pub fn hn_barriers(n: u64, x: f64) -> Result<(i64, i64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("x = {x} must lie in [0, 1]")));
    }
    let w = (n + 2) as f64;
    let right = truncate(w * x);
    let left = truncate(w * (x - 1.0));
    for v in [right, left] {
        if v == 0 {
            return Err(Error::DegenerateBarrier { value: v as f64 });
        }
    }
    Ok((right, left))
}

/// Monte Carlo estimate of `h_n(x)`, the probability that a fresh walk hits `[(n+2)x]` before
/// `[(n+2)(x-1)]`. A target at the origin decides the event: exactly 1 on the right, 0 on the
/// left.
pub fn estimate_h_n(env: &Env, n: u64, x: f64, replicas: u64, seed: u64) -> Result<EstimateWithCI> {
    check_replicas(replicas)?;
    let (right, left) = match hn_barriers(n, x) {
        Ok(b) => b,
        Err(Error::DegenerateBarrier { .. }) => {
            let right_at_origin = truncate((n + 2) as f64 * x) == 0;
            return Ok(EstimateWithCI::exact(if right_at_origin { 1.0 } else { 0.0 }, replicas));
        }
        Err(e) => return Err(e),
    };
    let sides = replicate(
        seed,
        "h_n",
        replicas,
        || ExitSampler::new(env),
        |s, rng| s.sample(right, left, rng),
    )?;
    Ok(EstimateWithCI::from_counts(count_right(&sides), replicas))
}

/// Compares `ĥ_n(x)` with the exact gambler's-ruin value (fair environment) or with the limit
/// `h(x)` within `slack_c / sqrt(n)` (fixed-point regime). Other environments are inconclusive.
pub fn h_n_experiment(
    env: &Env,
    n: u64,
    x: f64,
    replicas: u64,
    slack_c: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let observed = estimate_h_n(env, n, x, replicas, seed)?;
    let config = json!({"env": env, "n": n, "x": x, "replicas": replicas, "slack_c": slack_c, "seed": seed});
    let (predicted, margin) = match hn_barriers(n, x) {
        Err(Error::DegenerateBarrier { .. }) => (Prediction::reference(observed.mean), 0.0),
        Err(e) => return Err(e),
        Ok((a, b)) if env.pos_cookies().is_empty() && env.neg_cookies().is_empty() => {
            (Prediction::reference(-b as f64 / (a - b) as f64), 0.0)
        }
        Ok(_) => match env.classify().map(|r| r.kind) {
            Ok(RegimeKind::FixedPoint) => {
                let h = theory::h(env.alpha(), env.beta(), x)?;
                (Prediction::reference(h), slack_c / (n as f64).sqrt())
            }
            _ => (Prediction::of_kind(PredictionKind::Unknown), 0.0),
        },
    };
    Ok(ExperimentReport::judge("h-n", predicted, observed, margin, config))
}

/// `x_N` of `replicas` independent clusters.
pub fn final_x_values(env: &Env, n_max: u64, replicas: u64, seed: u64, experiment: &str) -> Result<Vec<f64>> {
    replicate(
        seed,
        experiment,
        replicas,
        || (),
        |_, rng| {
            let mut g = Growth::new(env);
            for _ in 0..n_max {
                g.advance(rng)?;
            }
            Ok(g.cluster().x_value())
        },
    )
}

/// Law of large numbers: mean `x_N` over replicas against the predicted limit, allowing
/// `3 stderr + slack_c / sqrt(N)`.
pub fn lln_experiment(
    env: &Env,
    n_max: u64,
    replicas: u64,
    slack_c: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let predicted = match theory::predict(env) {
        Ok(p) => p,
        Err(Error::HypothesisViolated) => Prediction::of_kind(PredictionKind::Unknown),
        Err(e) => return Err(e),
    };
    let xs = final_x_values(env, n_max, replicas, seed, "lln")?;
    let observed = EstimateWithCI::from_samples(&xs);
    let margin = slack_c / (n_max as f64).sqrt();
    let config = json!({"env": env, "n_max": n_max, "replicas": replicas, "slack_c": slack_c, "seed": seed});
    Ok(ExperimentReport::judge("lln", predicted, observed, margin, config))
}

/// Radius proxy for `P(X_n -> +inf)` at two radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransientReport {
    pub radius: u64,
    pub at_radius: EstimateWithCI,
    pub at_double_radius: EstimateWithCI,
    /// The two estimates agree within 3 joint standard errors.
    pub consistent: bool,
    pub config: serde_json::Value,
}

impl TransientReport {
    /// The estimate at the larger radius, which has the smaller bias.
    pub fn estimate(&self) -> EstimateWithCI {
        self.at_double_radius
    }

    /// Both estimates consistent and the larger-radius one strictly inside `(0, 1)` at 3σ.
    pub fn strictly_inside(&self) -> bool {
        let e = self.estimate();
        self.consistent && e.mean - K_SIGMA * e.stderr > 0.0 && e.mean + K_SIGMA * e.stderr < 1.0
    }
}

/// Fraction of walks reaching `+R` before `-R`, at `R = radius` and `2 radius`.
pub fn estimate_p_transient(env: &Env, replicas: u64, radius: u64, seed: u64) -> Result<TransientReport> {
    let regime = env.classify()?;
    if !regime.kind.is_transient() {
        return Err(Error::WrongRegime(format!("{:?}", regime.kind)));
    }
    if radius < 100 {
        return Err(Error::InvalidArgument(format!("escape radius {radius} must be >= 100")));
    }
    let at = |r: u64, name: &str| -> Result<EstimateWithCI> {
        let r = r as i64;
        let sides = replicate(seed, name, replicas, || ExitSampler::new(env), |s, rng| s.sample(r, -r, rng))?;
        Ok(EstimateWithCI::from_counts(count_right(&sides), replicas))
    };
    let at_radius = at(radius, "transient/R")?;
    let at_double_radius = at(2 * radius, "transient/2R")?;
    let consistent = (at_radius.mean - at_double_radius.mean).abs()
        <= K_SIGMA * joint_stderr(&at_radius, &at_double_radius);
    Ok(TransientReport {
        radius,
        at_radius,
        at_double_radius,
        consistent,
        config: json!({"env": env, "replicas": replicas, "escape_radius": radius, "seed": seed}),
    })
}

/// Distributional comparison of `X_n / sqrt(n)` with `Y_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub ks: KsOutcome,
    pub walk: EstimateWithCI,
    pub pbm: EstimateWithCI,
    pub verdict: Verdict,
    pub config: serde_json::Value,
}

/// Two-sample KS test between rescaled walk positions and perturbed Brownian motion at time 1.
pub fn clt_check(env: &Env, n: u64, replicas: u64, dt: f64, seed: u64) -> Result<CltReport> {
    let regime = env.classify()?;
    if regime.kind != RegimeKind::FixedPoint {
        return Err(Error::WrongRegime(format!("{:?}", regime.kind)));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let params = PbmParams::new(regime.alpha, regime.beta)?;
    let scale = (n as f64).sqrt();
    let mut xs = replicate(seed, "clt/walk", replicas, || (), |_, rng| {
        Ok(walk::position_after(env, n, rng) as f64 / scale)
    })?;
    let mut ys = replicate(seed, "clt/pbm", replicas, || (), |_, rng| {
        Ok(pbm::value_at(&params, 1.0, dt, rng))
    })?;
    let walk = EstimateWithCI::from_samples(&xs);
    let pbm = EstimateWithCI::from_samples(&ys);
    let ks = ks_two_sample(&mut xs, &mut ys, KS_LEVEL);
    Ok(CltReport {
        verdict: Verdict::from_bool(ks.pass),
        ks,
        walk,
        pbm,
        config: json!({"env": env, "n": n, "replicas": replicas, "dt": dt, "seed": seed}),
    })
}

/// `ε̂_{n+1} = 1(walker n+1 exits right) - ĥ_n(x_n)` at one subsampled time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaPoint {
    pub n: u64,
    pub x: f64,
    pub h_hat: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaReport {
    pub points: Vec<SaPoint>,
    pub running_mean: f64,
    /// `3 / sqrt(K)` plus the estimator-noise margin, for `K` points.
    pub bound: f64,
    /// `ĥ_n` is the exact gambler's-ruin value (fair environment).
    pub exact: bool,
    pub verdict: Verdict,
    pub config: serde_json::Value,
}

/// Martingale-increment diagnostics along one cluster trajectory.
///
/// Every `every`-th walker (default `max(1, N / 500)`) the exit probability from the current
/// cluster is estimated with `aux_walks` independent walks, or taken exactly as `1 - x_n` for
/// the fair environment. The cluster itself evolves exactly as in an ordinary trajectory with
/// the same seed.
pub fn sa_diagnostics(
    env: &Env,
    n_max: u64,
    aux_walks: u64,
    every: Option<u64>,
    seed: u64,
) -> Result<SaReport> {
    if n_max == 0 || aux_walks == 0 {
        return Err(Error::InvalidArgument("N and the auxiliary walk count must be >= 1".into()));
    }
    let every = every.unwrap_or((n_max / 500).max(1)).max(1);
    let fair = env.pos_cookies().is_empty() && env.neg_cookies().is_empty();
    let mut rng = RandomStream::for_replica(seed, "sa", 0);
    let mut aux_rng = RandomStream::for_replica(seed, "sa/aux", 0);
    let mut growth = Growth::new(env);
    let mut aux = ExitSampler::new(env);
    let mut points = Vec::new();
    for n in 0..n_max {
        let cluster: Cluster = growth.cluster();
        let h_hat = if n % every != 0 {
            None
        } else if fair {
            Some(1.0 - cluster.x_value::<f64>())
        } else {
            let (right, left) = cluster.barriers();
            let mut hits = 0u64;
            for _ in 0..aux_walks {
                if aux.sample(right, left, &mut aux_rng)? == Side::Right {
                    hits += 1;
                }
            }
            Some(hits as f64 / aux_walks as f64)
        };
        let side = growth.advance(&mut rng)?;
        if let Some(h_hat) = h_hat {
            let hit = if side == Side::Right { 1.0 } else { 0.0 };
            points.push(SaPoint {
                n,
                x: cluster.x_value(),
                h_hat,
                eps: hit - h_hat,
            });
        }
    }
    let k = points.len() as f64;
    let running_mean = points.iter().map(|p| p.eps).sum::<f64>() / k;
    let noise = if fair { 0.0 } else { K_SIGMA / (k * aux_walks as f64).sqrt() };
    let bound = K_SIGMA / k.sqrt() + noise;
    let verdict = if points.len() < 2 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(running_mean.abs() <= bound)
    };
    Ok(SaReport {
        points,
        running_mean,
        bound,
        exact: fair,
        verdict,
        config: json!({"env": env, "n_max": n_max, "aux_walks": aux_walks, "every": every, "seed": seed}),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub hi: EstimateWithCI,
    pub lo: EstimateWithCI,
    pub joint_stderr: f64,
    pub verdict: Verdict,
    pub config: serde_json::Value,
}

/// Checks `h_n(x)` under `env_hi` is at least `h_n(x)` under `env_lo`, up to 3 joint stderr.
pub fn dominance_check(
    env_hi: &Env,
    env_lo: &Env,
    n: u64,
    x: f64,
    replicas: u64,
    seed: u64,
) -> Result<DominanceReport> {
    if !env_hi.dominates(env_lo) {
        return Err(Error::InvalidArgument(
            "the first environment does not dominate the second".into(),
        ));
    }
    // distinct seeds keep the two estimates independent
    let hi = estimate_h_n(env_hi, n, x, replicas, seed)?;
    let lo = estimate_h_n(env_lo, n, x, replicas, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let se = joint_stderr(&hi, &lo);
    Ok(DominanceReport {
        hi,
        lo,
        joint_stderr: se,
        verdict: Verdict::from_bool(hi.mean >= lo.mean - K_SIGMA * se),
        config: json!({"env_hi": env_hi, "env_lo": env_lo, "n": n, "x": x, "replicas": replicas, "seed": seed}),
    })
}

/// Largest violation of monotonicity of `h` (nondecreasing in `alpha`, nonincreasing in
/// `beta`) over a grid; 0 when monotone.
pub fn h_monotonicity_violation(alphas: &[f64], betas: &[f64], xs: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in xs {
        for &b in betas {
            for w in alphas.windows(2) {
                let d = theory::h(w[0], b, x)? - theory::h(w[1], b, x)?;
                worst = worst.max(d);
            }
        }
        for &a in alphas {
            for w in betas.windows(2) {
                let d = theory::h(a, w[1], x)? - theory::h(a, w[0], x)?;
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

/// Perturbed Brownian motion exit estimate against `h(x)`, with a grid margin of `sqrt(dt)`.
pub fn pbm_h_experiment(alpha: f64, beta: f64, x: f64, dt: f64, replicas: u64, seed: u64) -> Result<ExperimentReport> {
    let params = PbmParams::new(alpha, beta)?;
    let predicted = Prediction::reference(theory::h(alpha, beta, x)?);
    let observed = pbm::estimate_h_mc(&params, x, dt, replicas, seed)?;
    let config = json!({"alpha": alpha, "beta": beta, "x": x, "dt": dt, "replicas": replicas, "seed": seed});
    Ok(ExperimentReport::judge("pbm-h", predicted, observed, dt.sqrt(), config))
}

/// Environment with drift parameters `(alpha, beta)`: the smallest number of equal cookies on
/// each side that keeps every probability inside `(0, 1)`.
pub fn environment_for(alpha: f64, beta: f64) -> Result<Env> {
    let stack = |drift: f64| -> Vec<f64> {
        if drift == 0.0 {
            return Vec::new();
        }
        let k = drift.abs().floor() + 1.0;
        vec![0.5 * (1.0 + drift / k); k as usize]
    };
    // beta counts drift toward the origin on the negative side
    CookieEnvironment::new(stack(alpha), stack(-beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub p_theory: f64,
    pub x_mean: f64,
    pub x_stderr: f64,
}

/// Mean `x_N` against the fixed point over a grid of `(alpha, beta)` in `(-inf, 1)^2`.
pub fn sweep(grid: &[(f64, f64)], n_max: u64, replicas: u64, seed: u64) -> Result<Vec<SweepRow>> {
    grid.iter()
        .enumerate()
        .map(|(i, &(alpha, beta))| {
            let p_theory = theory::fixed_point(alpha, beta)?;
            let env = environment_for(alpha, beta)?;
            let xs = final_x_values(&env, n_max, replicas, seed, &format!("sweep/{i}"))?;
            let e = EstimateWithCI::from_samples(&xs);
            Ok(SweepRow {
                alpha,
                beta,
                p_theory,
                x_mean: e.mean,
                x_stderr: e.stderr,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pos: &[f64], neg: &[f64]) -> Env {
        CookieEnvironment::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    #[test]
    fn barrier_rounding() {
        assert_eq!(hn_barriers(98, 0.3).unwrap(), (30, -70));
        assert_eq!(hn_barriers(8, 0.5).unwrap(), (5, -5));
        assert_eq!(hn_barriers(9, 0.5).unwrap(), (5, -5));
        assert!(matches!(hn_barriers(10, 0.0), Err(Error::DegenerateBarrier { .. })));
        assert!(matches!(hn_barriers(10, 0.05), Err(Error::DegenerateBarrier { .. })));
        assert!(hn_barriers(10, 1.5).is_err());
    }

    #[test]
    fn degenerate_targets_are_exact() {
        let e = Env::fair();
        assert_eq!(estimate_h_n(&e, 50, 0.0, 10, 1).unwrap().mean, 1.0);
        assert_eq!(estimate_h_n(&e, 50, 1.0, 10, 1).unwrap().mean, 0.0);
        assert_eq!(estimate_h_n(&e, 10, 0.05, 10, 1).unwrap().mean, 1.0);
        assert_eq!(estimate_h_n(&e, 10, 0.95, 10, 1).unwrap().mean, 0.0);
    }

    #[test]
    fn fair_h_n_is_gamblers_ruin() {
        let e = estimate_h_n(&Env::fair(), 98, 0.3, 20_000, 2).unwrap();
        assert!(e.within(0.7, 4.0, 0.0), "{e:?}");
        let e = estimate_h_n(&Env::fair(), 1000, 0.5, 20_000, 2).unwrap();
        assert!(e.within(0.5, 4.0, 0.0), "{e:?}");
        let r = h_n_experiment(&Env::fair(), 98, 0.3, 20_000, DEFAULT_SLACK_C, 2).unwrap();
        assert_eq!(r.predicted.p(), Some(0.7));
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn estimates_do_not_depend_on_the_pool_size() {
        let e = env(&[0.75, 0.6], &[0.3]);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    (
                        estimate_h_n(&e, 200, 0.4, 300, 9).unwrap(),
                        lln_experiment(&e, 300, 7, DEFAULT_SLACK_C, 9).unwrap(),
                    )
                })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn lln_fair_and_symmetric() {
        let r = lln_experiment(&Env::fair(), 10_000, 20, DEFAULT_SLACK_C, 1).unwrap();
        assert_eq!(r.predicted.p(), Some(0.5));
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let r = lln_experiment(&env(&[0.75], &[0.25]), 10_000, 10, DEFAULT_SLACK_C, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!((r.margin - 0.05).abs() < 1e-15);
    }

    #[test]
    fn lln_without_theory_is_inconclusive() {
        let r = lln_experiment(&env(&[0.9, 0.9], &[0.1, 0.1]), 500, 3, DEFAULT_SLACK_C, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = lln_experiment(&env(&[0.75, 0.75], &[0.125, 0.375]), 500, 3, DEFAULT_SLACK_C, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = lln_experiment(&env(&[0.75, 0.25], &[]), 500, 3, DEFAULT_SLACK_C, 1).unwrap();
        assert_eq!(r.predicted.kind(), PredictionKind::Unknown);
    }

    #[test]
    fn transient_proxy() {
        let right = env(&[0.9, 0.9], &[]);
        let r = estimate_p_transient(&right, 2_000, 100, 3).unwrap();
        assert!(r.estimate().mean > 0.95, "{r:?}");
        let r = estimate_p_transient(&right.mirror(), 2_000, 100, 3).unwrap();
        assert!(r.estimate().mean < 0.05, "{r:?}");
        let both = env(&[0.9, 0.9], &[0.1, 0.1]);
        let r = estimate_p_transient(&both, 4_000, 100, 3).unwrap();
        assert!(r.strictly_inside(), "{r:?}");
        assert!(matches!(
            estimate_p_transient(&env(&[0.75], &[]), 10, 100, 3),
            Err(Error::WrongRegime(_))
        ));
        assert!(estimate_p_transient(&both, 10, 50, 3).is_err());
    }

    #[test]
    fn clt_fair() {
        let r = clt_check(&Env::fair(), 400, 2_000, 1e-2, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(matches!(clt_check(&env(&[0.75, 0.75], &[]), 10, 10, 1e-2, 4), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn sa_fair_is_exact() {
        let r = sa_diagnostics(&Env::fair(), 5_000, DEFAULT_AUX_WALKS, None, 5).unwrap();
        assert!(r.exact);
        assert_eq!(r.points.len(), 500);
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.running_mean);
        for p in &r.points {
            assert!((p.h_hat - (1.0 - p.x)).abs() < 1e-15);
            assert!((-1.0..=1.0).contains(&p.eps));
        }
    }

    #[test]
    fn sa_with_auxiliary_walks() {
        let r = sa_diagnostics(&env(&[0.75], &[0.25]), 2_000, 50, Some(10), 6).unwrap();
        assert!(!r.exact);
        assert_eq!(r.points.len(), 200);
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.running_mean);
        assert!(r.points.iter().all(|p| (-1.0..=1.0).contains(&p.eps)));
        let one = sa_diagnostics(&Env::fair(), 1, 10, None, 6).unwrap();
        assert_eq!(one.points.len(), 1);
        assert_eq!(one.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn sa_trajectory_matches_plain_growth() {
        let e = env(&[0.75], &[0.25]);
        let r = sa_diagnostics(&e, 300, 5, Some(1), 8).unwrap();
        let mut rng = RandomStream::for_replica(8, "sa", 0);
        let t = crate::idla::run_trajectory(&e, 300, &mut rng, 1).unwrap();
        for (p, q) in r.points.iter().skip(1).zip(t.iter()) {
            assert_eq!(p.x, q.x);
        }
    }

    #[test]
    fn dominance() {
        let r = dominance_check(&env(&[0.8], &[]), &env(&[0.6], &[]), 1_000, 0.5, 4_000, 7).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.hi.mean > r.lo.mean);
        let same = env(&[0.7], &[0.4]);
        assert_eq!(dominance_check(&same, &same, 100, 0.5, 1_000, 7).unwrap().verdict, Verdict::Pass);
        assert!(dominance_check(&env(&[0.6], &[]), &env(&[0.8], &[]), 10, 0.5, 10, 7).is_err());
    }

    #[test]
    fn theory_dominance_grid() {
        let alphas: Vec<f64> = (0..12).map(|i| -2.0 + 0.25 * i as f64).collect();
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        assert!(h_monotonicity_violation(&alphas, &alphas, &xs).unwrap() <= 1e-9);
    }

    #[test]
    fn environments_for_parameters() {
        let e = environment_for(0.5, 0.0).unwrap();
        assert_eq!(e.pos_cookies(), &[0.75]);
        assert!(e.neg_cookies().is_empty());
        for &(a, b) in &[(0.5, 0.5), (-1.0, 0.3), (-3.7, -2.2), (0.99, -0.5)] {
            let e = environment_for(a, b).unwrap();
            assert!((e.alpha() - a).abs() < 1e-12 && (e.beta() - b).abs() < 1e-12);
            assert!(e.hypothesis_holds());
        }
    }

    #[test]
    fn sweep_rows() {
        assert!(sweep(&[], 10, 2, 1).unwrap().is_empty());
        let grid = [(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)];
        let rows = sweep(&grid, 200, 2, 1).unwrap();
        assert_eq!(rows.len(), 4);
        assert!((rows[3].p_theory - 0.5).abs() < 1e-10);
        assert!((rows[2].p_theory - 0.618_033_988_7).abs() < 1e-9);
        assert_eq!(rows, sweep(&grid, 200, 2, 1).unwrap());
    }

    #[test]
    fn pbm_against_theory() {
        let r = pbm_h_experiment(0.0, 0.0, 0.3, 1e-3, 4_000, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }
}
