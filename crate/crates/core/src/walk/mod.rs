//! A single excited random walk: transition kernel, local times and first exit from an
//! interval.
//!
//! [`WalkState`] and [`run_until_exit`] follow the walk one step at a time and keep exact
//! local times. [`ExitSampler`] produces the exit side only, with the same law, at a cost that
//! grows with the number of cookies eaten instead of the number of steps.

mod live;
mod sampler;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::CookieEnvironment;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use sampler::ExitSampler;

/// Default per-excursion step budget for the stepwise walk.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000_000;

/// Visit counts of a walk.
///
/// A nearest-neighbour walk started at 0 has visited exactly the sites of an interval
/// `[lo, hi]`, so the counts live in a dense window that grows at either end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalTimes {
    lo: i64,
    counts: Vec<u64>,
}

impl LocalTimes {
    fn started_at_origin() -> Self {
        LocalTimes {
            lo: 0,
            counts: vec![1],
        }
    }

    /// Number of visits to `site`, current visit included.
    pub fn get(&self, site: i64) -> u64 {
        let i = site - self.lo;
        if i < 0 {
            return 0;
        }
        self.counts.get(i as usize).copied().unwrap_or(0)
    }

    fn increment(&mut self, site: i64) {
        if site < self.lo {
            // the walk moves by one, so the window only ever grows by one slot
            debug_assert_eq!(site, self.lo - 1);
            self.counts.insert(0, 0);
            self.lo = site;
        }
        let i = (site - self.lo) as usize;
        if i == self.counts.len() {
            self.counts.push(0);
        }
        self.counts[i] += 1;
    }

    /// Visited sites in increasing order with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.lo + i as i64, c))
    }

    /// Smallest and largest visited site.
    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.counts.len() as i64 - 1)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Position, local times and step counter of one walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkState {
    position: i64,
    local_times: LocalTimes,
    steps: u64,
}

impl Default for WalkState {
    fn default() -> Self {
        Self::new()
    }
}

impl WalkState {
    /// A walk at the origin at time 0 (the origin counts as visited once).
    pub fn new() -> Self {
        WalkState {
            position: 0,
            local_times: LocalTimes::started_at_origin(),
            steps: 0,
        }
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn local_times(&self) -> &LocalTimes {
        &self.local_times
    }

    /// Local time at the current position.
    pub fn current_local_time(&self) -> u64 {
        self.local_times.get(self.position)
    }

    /// Checks the bookkeeping invariants.
    pub fn is_consistent(&self) -> bool {
        self.current_local_time() >= 1
            && self.local_times.total() == self.steps + 1
            && self.position.unsigned_abs() <= self.steps
            && self.local_times.iter().all(|(_, c)| c >= 1)
    }

    fn move_to(&mut self, site: i64) {
        self.position = site;
        self.local_times.increment(site);
        self.steps += 1;
    }
}

/// Which end of the interval a walk left through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Right,
    Left,
}

/// Exit side of a stepwise run together with its duration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitSide {
    pub side: Side,
    pub steps_taken: u64,
}

/// Cookie `visit` (1-based) of a stack, `1/2` once the stack is exhausted.
#[inline]
pub(crate) fn cookie<F: Scalar>(stack: &[F], visit: u64) -> F {
    usize::try_from(visit)
        .ok()
        .and_then(|i| i.checked_sub(1))
        .and_then(|i| stack.get(i).copied())
        .unwrap_or_else(|| F::lit(0.5))
}

/// Probability that the next step is `+1`.
///
/// Depends only on the sign of the position and the local time there.
pub fn step_prob<F: Scalar>(env: &CookieEnvironment<F>, state: &WalkState) -> F {
    let visit = state.current_local_time();
    match state.position.signum() {
        1 => cookie(env.pos_cookies(), visit),
        -1 => cookie(env.neg_cookies(), visit),
        _ => F::lit(0.5),
    }
}

/// Advances the walk using a uniform draw `u` in `[0, 1)`: up iff `u < step_prob`.
pub fn step_with_uniform<F: Scalar>(env: &CookieEnvironment<F>, state: &mut WalkState, u: f64) {
    let up = u < step_prob(env, state).to_f64_lossy();
    let next = if up { state.position + 1 } else { state.position - 1 };
    state.move_to(next);
}

/// Advances the walk by one random step.
pub fn step<F: Scalar, R: Rng + ?Sized>(
    env: &CookieEnvironment<F>,
    state: &mut WalkState,
    rng: &mut R,
) {
    let u: f64 = rng.random();
    step_with_uniform(env, state, u);
}

/// Runs a walk for exactly `n` steps and returns its final position.
pub fn position_after<F: Scalar, R: Rng + ?Sized>(
    env: &CookieEnvironment<F>,
    n: u64,
    rng: &mut R,
) -> i64 {
    let mut state = WalkState::new();
    for _ in 0..n {
        step(env, &mut state, rng);
    }
    state.position
}

fn check_barriers(right: i64, left: i64) -> Result<()> {
    if left < 0 && right > 0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "barriers must satisfy left < 0 < right, got left = {left}, right = {right}"
        )))
    }
}

/// Runs a fresh walk from 0 until it first hits `right` or `left`, returning the final state.
pub fn run_until_exit_with_state<F: Scalar, R: Rng + ?Sized>(
    env: &CookieEnvironment<F>,
    right: i64,
    left: i64,
    rng: &mut R,
    max_steps: u64,
) -> Result<(ExitSide, WalkState)> {
    check_barriers(right, left)?;
    let mut state = WalkState::new();
    while state.steps < max_steps {
        step(env, &mut state, rng);
        let side = if state.position == right {
            Side::Right
        } else if state.position == left {
            Side::Left
        } else {
            continue;
        };
        let exit = ExitSide {
            side,
            steps_taken: state.steps,
        };
        return Ok((exit, state));
    }
    Err(Error::MaxStepsExceeded { max_steps })
}

/// Runs a fresh walk from 0 until it first hits `right` (> 0) or `left` (< 0).
pub fn run_until_exit<F: Scalar, R: Rng + ?Sized>(
    env: &CookieEnvironment<F>,
    right: i64,
    left: i64,
    rng: &mut R,
    max_steps: u64,
) -> Result<ExitSide> {
    run_until_exit_with_state(env, right, left, rng, max_steps).map(|(e, _)| e)
}


#[cfg(test)]
mod tests {
    use super::testing::ConstRng;
    use super::*;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn env(pos: &[f64], neg: &[f64]) -> CookieEnvironment {
        CookieEnvironment::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    fn state_at(path: &[i64]) -> WalkState {
        let mut s = WalkState::new();
        for &x in path {
            s.move_to(x);
        }
        s
    }

    #[test]
    fn kernel_examples() {
        let e = env(&[0.75], &[0.2]);
        assert_eq!(step_prob(&e, &WalkState::new()), 0.5);
        assert_eq!(step_prob(&e, &state_at(&[1, 2, 3])), 0.75);
        assert_eq!(step_prob(&e, &state_at(&[1, 2, 3, 4, 3])), 0.5);
        assert_eq!(step_prob(&e, &state_at(&[-1])), 0.2);
        assert_eq!(step_prob(&e, &state_at(&[-1, 0, -1])), 0.5);
        assert_eq!(step_prob(&e, &state_at(&[1, 0])), 0.5);
    }

    #[test]
    fn forced_steps_bookkeeping() {
        let e = CookieEnvironment::<f64>::fair();
        let mut s = WalkState::new();
        step(&e, &mut s, &mut ConstRng(0));
        assert_eq!(s.position(), 1);
        assert_eq!(s.local_times().iter().collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
        assert_eq!(s.steps(), 1);

        step(&e, &mut s, &mut ConstRng(0));
        step(&e, &mut s, &mut ConstRng(u64::MAX));
        assert_eq!(s.position(), 1);
        assert_eq!(
            s.local_times().iter().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2), (2, 1)]
        );
        assert!(s.is_consistent());
    }

    #[test]
    fn first_step_is_fair() {
        // binomial oracle: 10^5 trials, p = 1/2
        let e = env(&[0.9], &[0.1]);
        let mut rng = RandomStream::from_seed(11);
        let trials = 100_000;
        let ups = (0..trials)
            .filter(|_| {
                let mut s = WalkState::new();
                step(&e, &mut s, &mut rng);
                s.position() == 1
            })
            .count() as f64;
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((ups - 0.5 * trials as f64).abs() < 3.0 * sigma, "ups = {ups}");
    }

    #[test]
    fn zero_budget_is_an_error() {
        let e = CookieEnvironment::<f64>::fair();
        let mut rng = RandomStream::from_seed(1);
        assert_eq!(
            run_until_exit(&e, 1, -1, &mut rng, 0),
            Err(Error::MaxStepsExceeded { max_steps: 0 })
        );
        assert!(run_until_exit(&e, 0, -1, &mut rng, 10).is_err());
    }

    #[test]
    fn unit_interval_exit_is_a_coin_flip() {
        let e = CookieEnvironment::<f64>::fair();
        let mut rng = RandomStream::from_seed(5);
        let n = 100_000;
        let right = (0..n)
            .filter(|_| run_until_exit(&e, 1, -1, &mut rng, 10).unwrap().side == Side::Right)
            .count() as f64;
        assert!((right / n as f64 - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn fair_walk_matches_gamblers_ruin() {
        let e = CookieEnvironment::<f64>::fair();
        let mut rng = RandomStream::from_seed(6);
        let n = 20_000;
        let (a, b) = (3, 7);
        let right = (0..n)
            .filter(|_| {
                run_until_exit(&e, a, -b, &mut rng, DEFAULT_MAX_STEPS).unwrap().side == Side::Right
            })
            .count() as f64;
        let p = b as f64 / (a + b) as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((right / n as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn replayed_probabilities_use_only_local_times() {
        let e = env(&[0.8, 0.3, 0.6], &[0.1, 0.45]);
        let mut rng = RandomStream::from_seed(9);
        let mut s = WalkState::new();
        let mut path = Vec::new();
        let mut probs = Vec::new();
        for _ in 0..500 {
            probs.push(step_prob(&e, &s));
            step(&e, &mut s, &mut rng);
            path.push(s.position());
        }
        // recompute from positions only
        let mut counts = std::collections::HashMap::from([(0i64, 1u64)]);
        let mut pos = 0i64;
        for (k, &next) in path.iter().enumerate() {
            let visit = counts[&pos];
            let expected = match pos.signum() {
                1 => cookie(e.pos_cookies(), visit),
                -1 => cookie(e.neg_cookies(), visit),
                _ => 0.5,
            };
            assert_eq!(probs[k], expected);
            pos = next;
            *counts.entry(pos).or_insert(0) += 1;
        }
    }

    proptest! {
        #[test]
        fn exit_state_invariants(seed in 0u64..10_000, a in 1i64..12, b in 1i64..12) {
            let e = env(&[0.7, 0.6], &[0.35]);
            let mut rng = RandomStream::from_seed(seed);
            let (exit, s) = run_until_exit_with_state(&e, a, -b, &mut rng, DEFAULT_MAX_STEPS).unwrap();
            prop_assert!(s.is_consistent());
            prop_assert!(exit.steps_taken >= 1);
            prop_assert_eq!(exit.steps_taken, s.steps());
            let exit_site = match exit.side { Side::Right => a, Side::Left => -b };
            prop_assert_eq!(s.position(), exit_site);
            let (lo, hi) = s.local_times().range();
            prop_assert!(lo >= -b && hi <= a);
            prop_assert_eq!(s.local_times().get(exit_site), 1);
        }
    }
}
