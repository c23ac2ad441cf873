//! One-dimensional internal DLA driven by excited walks.
//!
//! After `n` walkers the cluster is the interval `[d - n, d]`. Walker `n + 1` starts at 0 with
//! fresh cookie stacks and annexes the site it leaves the cluster through: the right boundary
//! grows iff it hits `d + 1` before `d - n - 1`.

use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::CookieEnvironment;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::walk::{self, ExitSampler, ExitSide, Side};

/// Cluster after `n` walkers, with right boundary `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Cluster {
    n: u64,
    d: u64,
}

impl Cluster {
    pub fn new() -> Self {
        Cluster { n: 0, d: 0 }
    }

    pub fn from_parts(n: u64, d: u64) -> Result<Self> {
        if d > n {
            return Err(Error::InvalidArgument(format!("right boundary {d} exceeds time {n}")));
        }
        Ok(Cluster { n, d })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Left boundary `d - n`.
    pub fn left(&self) -> i64 {
        self.d as i64 - self.n as i64
    }

    /// Exit sites `(d + 1, d - n - 1)` for the next walker.
    pub fn barriers(&self) -> (i64, i64) {
        (self.d as i64 + 1, self.left() - 1)
    }

    /// `(d + 1) / (n + 2)`.
    pub fn x_value<F: Scalar>(&self) -> F {
        F::from_u64(self.d + 1).unwrap() / F::from_u64(self.n + 2).unwrap()
    }

    /// The cluster after a walker left through `side`.
    pub fn grown(&self, side: Side) -> Self {
        Cluster {
            n: self.n + 1,
            d: self.d + (side == Side::Right) as u64,
        }
    }
}

/// Runs one stepwise walker and grows the cluster by it.
pub fn advance<F: Scalar, R: Rng + ?Sized>(
    cluster: &Cluster,
    env: &CookieEnvironment<F>,
    rng: &mut R,
    max_steps: u64,
) -> Result<(Cluster, ExitSide)> {
    let (right, left) = cluster.barriers();
    let exit = walk::run_until_exit(env, right, left, rng, max_steps)?;
    Ok((cluster.grown(exit.side), exit))
}

/// Grows a cluster with the exit sampler; the walker's path is never materialized.
#[derive(Clone, Debug)]
pub struct Growth {
    cluster: Cluster,
    sampler: ExitSampler,
}

impl Growth {
    pub fn new<F: Scalar>(env: &CookieEnvironment<F>) -> Self {
        Growth {
            cluster: Cluster::new(),
            sampler: ExitSampler::new(env),
        }
    }

    pub fn cluster(&self) -> Cluster {
        self.cluster
    }

    /// Adds one walker and returns the side it left through.
    pub fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Side> {
        let (right, left) = self.cluster.barriers();
        debug_assert_eq!(right - left, self.cluster.n as i64 + 2);
        let side = self.sampler.sample(right, left, rng)?;
        self.cluster = self.cluster.grown(side);
        Ok(side)
    }

    /// The underlying sampler, reusable for auxiliary walks.
    pub fn sampler_mut(&mut self) -> &mut ExitSampler {
        &mut self.sampler
    }
}

/// One recorded point of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub n: u64,
    pub d: u64,
    pub x: f64,
}

impl From<Cluster> for TrajectoryPoint {
    fn from(c: Cluster) -> Self {
        TrajectoryPoint {
            n: c.n,
            d: c.d,
            x: c.x_value(),
        }
    }
}

/// `max(1, n / 10^4)`.
pub fn default_record_every(n: u64) -> u64 {
    (n / 10_000).max(1)
}

/// Grows a cluster to `n` walkers, recording every `record_every`-th cluster and the last one.
pub fn run_trajectory<F: Scalar, R: Rng + ?Sized>(
    env: &CookieEnvironment<F>,
    n: u64,
    rng: &mut R,
    record_every: u64,
) -> Result<Vec<TrajectoryPoint>> {
    if n == 0 || record_every == 0 {
        return Err(Error::InvalidArgument(
            "trajectory length and record_every must be >= 1".into(),
        ));
    }
    let mut growth = Growth::new(env);
    let mut out = Vec::with_capacity((n / record_every) as usize + 1);
    for k in 1..=n {
        growth.advance(rng)?;
        if k % record_every == 0 || k == n {
            out.push(growth.cluster().into());
        }
    }
    Ok(out)
}

/// Final cluster after `n` walkers.
pub fn final_cluster<F: Scalar, R: Rng + ?Sized>(
    env: &CookieEnvironment<F>,
    n: u64,
    rng: &mut R,
) -> Result<Cluster> {
    let mut growth = Growth::new(env);
    for _ in 0..n {
        growth.advance(rng)?;
    }
    Ok(growth.cluster())
}

/// Writes `n,d,x` rows with a header.
pub fn write_csv<W: Write>(mut w: W, points: &[TrajectoryPoint]) -> io::Result<()> {
    writeln!(w, "n,d,x")?;
    for p in points {
        writeln!(w, "{},{},{}", p.n, p.d, p.x)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::walk::DEFAULT_MAX_STEPS;
    use proptest::prelude::*;

    fn env(pos: &[f64], neg: &[f64]) -> CookieEnvironment {
        CookieEnvironment::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    #[test]
    fn barrier_arithmetic() {
        assert_eq!(Cluster::new().barriers(), (1, -1));
        let c = Cluster::from_parts(5, 3).unwrap();
        assert_eq!(c.barriers(), (4, -3));
        assert_eq!(c.left(), -2);
        assert!(Cluster::from_parts(2, 3).is_err());
    }

    #[test]
    fn x_values() {
        assert_eq!(Cluster::new().x_value::<f64>(), 0.5);
        assert!((Cluster::from_parts(8, 8).unwrap().x_value::<f64>() - 0.9).abs() < 1e-15);
        assert!((Cluster::from_parts(8, 0).unwrap().x_value::<f32>() - 0.1).abs() < 1e-7);
    }

    #[test]
    fn first_walker_is_a_coin_flip() {
        let e = CookieEnvironment::<f64>::fair();
        let mut rng = RandomStream::from_seed(8);
        let reps = 20_000;
        let mut right = 0;
        for _ in 0..reps {
            let (c, exit) = advance(&Cluster::new(), &e, &mut rng, DEFAULT_MAX_STEPS).unwrap();
            assert_eq!(exit.steps_taken, 1);
            assert_eq!(c.n(), 1);
            right += c.d();
        }
        let f = right as f64 / reps as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25 / reps as f64).sqrt());
    }

    #[test]
    fn single_step_trajectory() {
        let mut rng = RandomStream::from_seed(1);
        let t = run_trajectory(&CookieEnvironment::<f64>::fair(), 1, &mut rng, 1).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].x == 1.0 / 3.0 || t[0].x == 2.0 / 3.0);
    }

    #[test]
    fn thinning_keeps_the_final_point() {
        let mut rng = RandomStream::from_seed(1);
        let t = run_trajectory(&CookieEnvironment::<f64>::fair(), 25, &mut rng, 10).unwrap();
        let ns: Vec<u64> = t.iter().map(|p| p.n).collect();
        assert_eq!(ns, vec![10, 20, 25]);
        assert_eq!(default_record_every(5), 1);
        assert_eq!(default_record_every(100_000), 10);
        assert!(run_trajectory(&CookieEnvironment::<f64>::fair(), 0, &mut rng, 1).is_err());
    }

    #[test]
    fn trajectories_are_reproducible() {
        let e = env(&[0.75, 0.6], &[0.3]);
        let a = run_trajectory(&e, 2_000, &mut RandomStream::from_seed(5), 7).unwrap();
        let b = run_trajectory(&e, 2_000, &mut RandomStream::from_seed(5), 7).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_csv(&mut buf, &a[..2]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,d,x\n7,"));
    }

    /// Law of `d_n` for the fair environment by exact recursion: walker `k + 1` grows the right end
    /// with probability `(k + 1 - d) / (k + 2)`.
    fn fair_law(n: usize) -> Vec<f64> {
        let mut law = vec![1.0];
        for k in 0..n {
            let mut next = vec![0.0; k + 2];
            for (d, &w) in law.iter().enumerate() {
                let up = (k + 1 - d) as f64 / (k + 2) as f64;
                next[d + 1] += w * up;
                next[d] += w * (1.0 - up);
            }
            law = next;
        }
        law
    }

    #[test]
    fn fair_law_by_hand() {
        // growth favours the shorter side: after two walkers d_2 = 1 with probability 2/3
        let law = fair_law(2);
        for (w, e) in law.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((w - e).abs() < 1e-15);
        }
        let law = fair_law(10);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for d in 0..=10 {
            assert!((law[d] - law[10 - d]).abs() < 1e-15);
        }
    }

    fn empirical_law(e: &CookieEnvironment, n: u64, reps: u64, seed: u64) -> Vec<f64> {
        let mut counts = vec![0u64; n as usize + 1];
        for k in 0..reps {
            let mut rng = RandomStream::derive(seed, 1, k);
            counts[final_cluster(e, n, &mut rng).unwrap().d() as usize] += 1;
        }
        counts.iter().map(|&c| c as f64 / reps as f64).collect()
    }

    #[test]
    fn fair_cluster_matches_enumeration() {
        let reps = 40_000;
        let emp = empirical_law(&CookieEnvironment::fair(), 10, reps, 3);
        for (d, (&e, &w)) in emp.iter().zip(fair_law(10).iter()).enumerate() {
            let sd = (w * (1.0 - w) / reps as f64).sqrt();
            assert!((e - w).abs() < 4.5 * sd, "d = {d}: {e} vs {w}");
        }
    }

    #[test]
    fn mirror_symmetric_cluster_is_balanced() {
        // d_n and n - d_n have the same law, compared bin by bin
        let reps = 40_000;
        let law = empirical_law(&env(&[0.75, 0.75], &[0.25, 0.25]), 10, reps, 4);
        for d in 0..=10 {
            let (a, b) = (law[d], law[10 - d]);
            let sd = ((a + b) / reps as f64).sqrt();
            assert!((a - b).abs() < 4.5 * sd.max(1e-9), "d = {d}: {a} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn boundary_moves_by_at_most_one(p in 0.05f64..0.95, q in 0.05f64..0.95, seed in 0u64..500) {
            let e = env(&[p, q], &[q]);
            let t = run_trajectory(&e, 300, &mut RandomStream::from_seed(seed), 1).unwrap();
            let mut prev = Cluster::new();
            for (k, pt) in t.iter().enumerate() {
                prop_assert_eq!(pt.n, k as u64 + 1);
                prop_assert!(pt.d == prev.d() || pt.d == prev.d() + 1);
                prop_assert!(pt.x > 0.0 && pt.x < 1.0);
                prev = Cluster::from_parts(pt.n, pt.d).unwrap();
            }
        }
    }
}
