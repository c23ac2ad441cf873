//! `(alpha, beta)`-perturbed Brownian motion `Y = B + alpha sup Y + beta inf Y`.
//!
//! Each step draws a Brownian increment and solves the defining identity exactly for the new
//! value: if the unconstrained candidate leaves `[inf, sup]`, the new value becomes the new
//! extremum and the identity is solved for it, which divides by `1 - alpha` or `1 - beta`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{tag_of, RandomStream};
use crate::scalar::Scalar;
use crate::stats::EstimateWithCI;
use crate::theory::check_below_one;

/// Default time step.
pub const DEFAULT_DT: f64 = 1e-4;
/// Default time budget for a two-sided exit.
pub const DEFAULT_T_MAX: f64 = 1e3;

/// Validated perturbation strengths, both `< 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PbmParams<F: Scalar = f64> {
    alpha: F,
    beta: F,
}

impl<F: Scalar> PbmParams<F> {
    pub fn new(alpha: F, beta: F) -> Result<Self> {
        check_below_one("alpha", alpha)?;
        check_below_one("beta", beta)?;
        Ok(PbmParams { alpha, beta })
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn beta(&self) -> F {
        self.beta
    }
}

/// Time, value, driving Brownian motion, running maximum and running minimum.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct PbmState<F: Scalar = f64> {
    pub t: F,
    pub y: F,
    pub b: F,
    pub m: F,
    pub i: F,
}

impl<F: Scalar> PbmState<F> {
    pub fn origin() -> Self {
        PbmState {
            t: F::zero(),
            y: F::zero(),
            b: F::zero(),
            m: F::zero(),
            i: F::zero(),
        }
    }

    /// `y - (b + alpha m + beta i)`.
    pub fn residual(&self, params: &PbmParams<F>) -> F {
        self.y - (self.b + params.alpha * self.m + params.beta * self.i)
    }
}

/// Advances the path by one Brownian increment `db` over a time step `dt`.
pub fn pbm_step<F: Scalar>(state: &PbmState<F>, db: F, dt: F, params: &PbmParams<F>) -> PbmState<F> {
    let (alpha, beta) = (params.alpha, params.beta);
    let one = F::one();
    let b = state.b + db;
    let candidate = b + alpha * state.m + beta * state.i;
    // candidate > m  <=>  (b + beta i) / (1 - alpha) > m, so the branches never conflict
    let (y, m, i) = if candidate > state.m {
        let y = (b + beta * state.i) / (one - alpha);
        (y, y, state.i)
    } else if candidate < state.i {
        let y = (b + alpha * state.m) / (one - beta);
        (y, state.m, y)
    } else {
        (candidate, state.m, state.i)
    };
    PbmState {
        t: state.t + dt,
        y,
        b,
        m,
        i,
    }
}

/// Which level the path reached first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hit {
    Upper,
    Lower,
}

fn increment<F: Scalar, R: Rng + ?Sized>(sd: F, rng: &mut R) -> F
where
    StandardNormal: Distribution<F>,
{
    let z: F = StandardNormal.sample(rng);
    sd * z
}

/// Simulates from 0 until `Y >= x` or `Y <= x - 1` on the time grid.
pub fn simulate_until_two_sided_exit<F: Scalar, R: Rng + ?Sized>(
    params: &PbmParams<F>,
    x: F,
    dt: F,
    rng: &mut R,
    t_max: F,
) -> Result<Hit>
where
    StandardNormal: Distribution<F>,
{
    if !(x > F::zero() && x < F::one()) {
        return Err(Error::InvalidArgument(format!("x = {x} must lie in (0, 1)")));
    }
    if !(dt > F::zero()) {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
    }
    let lower = x - F::one();
    let sd = dt.sqrt();
    let max_steps = (t_max / dt).ceil().to_u64().unwrap_or(u64::MAX);
    let mut s = PbmState::origin();
    for _ in 0..max_steps {
        s = pbm_step(&s, increment(sd, rng), dt, params);
        if s.y >= x {
            return Ok(Hit::Upper);
        }
        if s.y <= lower {
            return Ok(Hit::Lower);
        }
    }
    Err(Error::TimeBudgetExceeded {
        t_max: t_max.to_f64_lossy(),
    })
}

/// `steps` states of a path sampled every `dt`, starting with the origin.
pub fn simulate_path<F: Scalar, R: Rng + ?Sized>(
    params: &PbmParams<F>,
    dt: F,
    steps: usize,
    rng: &mut R,
) -> Vec<PbmState<F>>
where
    StandardNormal: Distribution<F>,
{
    let sd = dt.sqrt();
    let mut path = Vec::with_capacity(steps + 1);
    let mut s = PbmState::origin();
    path.push(s);
    for _ in 0..steps {
        s = pbm_step(&s, increment(sd, rng), dt, params);
        path.push(s);
    }
    path
}

/// Value of the path at time `t` (rounded to the grid).
pub fn value_at<F: Scalar, R: Rng + ?Sized>(params: &PbmParams<F>, t: F, dt: F, rng: &mut R) -> F
where
    StandardNormal: Distribution<F>,
{
    let steps = (t / dt).round().to_u64().unwrap_or(0);
    let sd = dt.sqrt();
    let mut s = PbmState::origin();
    for _ in 0..steps {
        s = pbm_step(&s, increment(sd, rng), dt, params);
    }
    s.y
}

/// Monte Carlo estimate of `P(T_x < T_{x-1})`; replica `k` uses its own stream of `seed`.
pub fn estimate_h_mc(
    params: &PbmParams<f64>,
    x: f64,
    dt: f64,
    replicas: u64,
    seed: u64,
) -> Result<EstimateWithCI> {
    if replicas == 0 {
        return Err(Error::InvalidArgument("replicas must be >= 1".into()));
    }
    let tag = tag_of("pbm-h");
    let hits = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut rng = RandomStream::derive(seed, tag, k);
            simulate_until_two_sided_exit(params, x, dt, &mut rng, DEFAULT_T_MAX)
                .map(|h| (h == Hit::Upper) as u64)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(EstimateWithCI::from_counts(hits.iter().sum(), replicas))
}
