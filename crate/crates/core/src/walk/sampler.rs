//! Exit-side sampler for excited walks on a finite interval.
//!
//! The walk is advanced by macro-moves that have exactly the law of the underlying
//! nearest-neighbour dynamics, observed only at the sites where a cookie decision is taken:
//!
//! * from a site with no cookie left, the walk is simple symmetric until it reaches the
//!   nearest site on either side that still holds a cookie (or a barrier), so the landing site
//!   is drawn from the gambler's-ruin law;
//! * from a site whose last cookie is being eaten, the cookie step and the ensuing ruin problem
//!   are merged into a single two-point draw; along a run of neighbouring sites that all hold
//!   exactly one cookie the success probabilities telescope into a ratio of Gamma functions,
//!   which is inverted directly for long runs;
//! * a step into a run of sites that will serve the same cookie index is repeated a geometric
//!   number of times.
//!
//! Visit counts saturate at the stack length plus one, so exhausted sites crossed during a
//! ruin move need no bookkeeping.

use rand::Rng;

use super::live::LiveSet;
use super::Side;
use crate::env::CookieEnvironment;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Longest explored run looked at before a batched move (fresh runs are not scanned).
const SCAN_CAP: usize = 512;
/// Runs at least this long are inverted through Gamma ratios instead of site by site.
const GAMMA_MIN: usize = 48;

/// Reusable exit sampler for one environment.
#[derive(Clone, Debug)]
pub struct ExitSampler {
    pos: Vec<f64>,
    neg: Vec<f64>,
    counts: Vec<u32>,
    live: LiveSet,
    len: usize,
    origin: usize,
    lo: usize,
    hi: usize,
}

impl ExitSampler {
    pub fn new<F: Scalar>(env: &CookieEnvironment<F>) -> Self {
        let conv = |s: &[F]| s.iter().map(|p| p.to_f64_lossy()).collect();
        ExitSampler {
            pos: conv(env.pos_cookies()),
            neg: conv(env.neg_cookies()),
            counts: Vec::new(),
            live: LiveSet::default(),
            len: 0,
            origin: 0,
            lo: 0,
            hi: 0,
        }
    }

    /// Side through which a fresh walk from 0 leaves `(left, right)`.
    pub fn sample<R: Rng + ?Sized>(&mut self, right: i64, left: i64, rng: &mut R) -> Result<Side> {
        if !(left < 0 && right > 0) {
            return Err(Error::InvalidArgument(format!(
                "barriers must satisfy left < 0 < right, got left = {left}, right = {right}"
            )));
        }
        self.reset(right, left);
        let mut p = self.origin;
        loop {
            if p == 0 {
                return Ok(Side::Left);
            }
            if p == self.len {
                return Ok(Side::Right);
            }
            let m = self.stack_len(p);
            let c = if p == self.origin { m + 1 } else { self.counts[p] };
            p = if c > m {
                self.ruin_move(p, rng)
            } else if c == m {
                self.last_cookie_move(p, m, rng)
            } else {
                self.cookie_run(p, c, rng)
            };
        }
    }

    fn reset(&mut self, right: i64, left: i64) {
        if self.hi < self.counts.len() {
            self.counts[self.lo..=self.hi].fill(0);
        }
        self.len = (right - left) as usize;
        self.origin = (-left) as usize;
        if self.counts.len() < self.len + 1 {
            self.counts.resize(self.len + 1, 0);
        }
        self.live.reset(self.len + 1);
        self.live.insert(0);
        self.live.insert(self.len);
        if !self.pos.is_empty() {
            self.live.insert_range(self.origin + 1, self.len);
        }
        if !self.neg.is_empty() {
            self.live.insert_range(1, self.origin);
        }
        self.lo = self.origin;
        self.hi = self.origin;
    }

    #[inline]
    fn stack(&self, p: usize) -> &[f64] {
        if p > self.origin {
            &self.pos
        } else if p < self.origin {
            &self.neg
        } else {
            &[]
        }
    }

    #[inline]
    fn stack_len(&self, p: usize) -> u32 {
        self.stack(p).len() as u32
    }

    #[inline]
    fn arrive(&mut self, p: usize) {
        if p == 0 || p == self.len || p == self.origin {
            return;
        }
        let m = self.stack_len(p);
        let c = &mut self.counts[p];
        if *c <= m {
            *c += 1;
            if *c == m {
                self.live.remove(p);
            }
        }
        self.lo = self.lo.min(p);
        self.hi = self.hi.max(p);
    }

    /// Symmetric walk from `p` until the nearest live site on either side.
    fn ruin_move<R: Rng + ?Sized>(&mut self, p: usize, rng: &mut R) -> usize {
        let u = self.live.prev_before(p);
        let w = self.live.next_after(p);
        let t = if rng.random_range(0..(w - u) as u64) < (p - u) as u64 {
            w
        } else {
            u
        };
        self.arrive(t);
        t
    }

    /// The visit at `p` eats its last cookie; after the step the walk is symmetric until it
    /// reaches a live site.
    fn last_cookie_move<R: Rng + ?Sized>(&mut self, p: usize, m: u32, rng: &mut R) -> usize {
        let q = self.stack(p)[m as usize - 1];
        let u = self.live.prev_before(p);
        let w = self.live.next_after(p);
        if w == p + 1 {
            let r = self.run_length(p, true, m - 1);
            if r > 0 {
                return self.grow(p, u, 2.0 * (1.0 - q), (p + 1 - u) as f64, r, true, m, rng);
            }
        }
        if u + 1 == p {
            let r = self.run_length(p, false, m - 1);
            if r > 0 {
                return self.grow(p, w, 2.0 * q, (w + 1 - p) as f64, r, false, m, rng);
            }
        }
        // P(land at w) = (q (p + 1 - u) + (1 - q) (p - 1 - u)) / (w - u)
        let t = (p - u) as f64 - 1.0 + 2.0 * q;
        let target = if rng.random::<f64>() * ((w - u) as f64) < t {
            w
        } else {
            u
        };
        self.arrive(target);
        target
    }

    /// Eats the last cookies of a run of `r` neighbouring single-cookie sites while the walk
    /// keeps landing on the next one; on the first failure it lands on `anchor` instead.
    /// Step `i` fails with probability `drift / (d0 + i)`.
    #[allow(clippy::too_many_arguments)]
    fn grow<R: Rng + ?Sized>(
        &mut self,
        p: usize,
        anchor: usize,
        drift: f64,
        d0: f64,
        r: usize,
        up: bool,
        m: u32,
        rng: &mut R,
    ) -> usize {
        let k = sample_run(d0, drift, r, rng);
        let (a, b) = if up { (p + 1, p + k) } else { (p - k, p - 1) };
        if k > 0 {
            self.counts[a..=b].fill(m);
            self.live.remove_range(a, b + 1);
            self.lo = self.lo.min(a);
            self.hi = self.hi.max(b);
        }
        if k == r {
            if up {
                b
            } else {
                a
            }
        } else {
            self.arrive(anchor);
            anchor
        }
    }

    /// Cookie step from a site that keeps cookies afterwards, repeated while the walk moves
    /// through sites that serve the same cookie index.
    fn cookie_run<R: Rng + ?Sized>(&mut self, p: usize, c: u32, rng: &mut R) -> usize {
        let q = self.stack(p)[c as usize - 1];
        let up = rng.random::<f64>() < q;
        let r = self.run_length(p, up, c - 1);
        let step = |x: usize, k: usize| if up { x + k } else { x - k };
        if r == 0 {
            let t = step(p, 1);
            self.arrive(t);
            return t;
        }
        let keep = if up { q } else { 1.0 - q };
        // continuations before the first reversal
        let g = {
            let u: f64 = 1.0 - rng.random::<f64>();
            let g = u.ln() / keep.ln();
            if g >= r as f64 {
                r
            } else {
                g as usize
            }
        };
        let visited = (g + 1).min(r);
        let (a, b) = if up {
            (p + 1, p + visited)
        } else {
            (p - visited, p - 1)
        };
        self.counts[a..=b].fill(c);
        self.lo = self.lo.min(a);
        self.hi = self.hi.max(b);
        let t = if g >= r { step(p, r + 1) } else { step(p, g) };
        self.arrive(t);
        t
    }

    /// Number of consecutive sites next to `p` in the given direction, on the same side of the
    /// origin and strictly inside the interval, whose visit count equals `want`.
    fn run_length(&self, p: usize, up: bool, want: u32) -> usize {
        let positive = p > self.origin;
        let mut r = 0;
        if up {
            let end = if positive { self.len } else { self.origin };
            let mut j = p + 1;
            while j < end && r < SCAN_CAP {
                if positive && j > self.hi {
                    if want == 0 {
                        r += end - j;
                    }
                    break;
                }
                if self.counts[j] != want {
                    break;
                }
                r += 1;
                j += 1;
            }
        } else {
            let end = if positive { self.origin } else { 0 };
            let mut j = p - 1;
            while j > end && r < SCAN_CAP {
                if !positive && j < self.lo {
                    if want == 0 {
                        r += j - end;
                    }
                    break;
                }
                if self.counts[j] != want {
                    break;
                }
                r += 1;
                j -= 1;
            }
        }
        r
    }
}

/// Number of successes, capped at `r`, in a run whose step `i` fails with probability
/// `drift / (d0 + i)` (`0 < drift < 2 <= d0`).
fn sample_run<R: Rng + ?Sized>(d0: f64, drift: f64, r: usize, rng: &mut R) -> usize {
    if r < GAMMA_MIN {
        for i in 0..r {
            if rng.random::<f64>() * (d0 + i as f64) < drift {
                return i;
            }
        }
        return r;
    }
    // P(K >= k) = prod_{i<k} (1 - drift/(d0+i)) = exp(g(d0 + k) - g(d0)),
    // g(x) = ln Gamma(x - drift) - ln Gamma(x)
    let e = -(1.0 - rng.random::<f64>()).ln();
    let base = ln_gamma_ratio(d0, drift);
    let ok = |k: usize| base - ln_gamma_ratio(d0 + k as f64, drift) < e;
    if ok(r) {
        return r;
    }
    let (mut lo, mut hi) = (0usize, 1usize);
    while hi < r && ok(hi) {
        lo = hi;
        hi *= 2;
    }
    let mut hi = hi.min(r);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `ln Gamma(x - c) - ln Gamma(x)` for `x - c > 0`, accurate in absolute terms for large `x`.
pub(crate) fn ln_gamma_ratio(x: f64, c: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 16.0 {
        // Gamma(x - c) = Gamma(x - c + 1) / (x - c), Gamma(x) = Gamma(x + 1) / x
        acc += (x / (x - c)).ln();
        x += 1.0;
    }
    let y = x - c;
    let stirling_tail = |z: f64| {
        let z2 = z * z;
        (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z
    };
    // (y - 1/2) ln y - y - [(x - 1/2) ln x - x]
    let main = -c * x.ln() + (y - 0.5) * (-c / x).ln_1p() + c;
    acc + main + stirling_tail(y) - stirling_tail(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::theory::ln_gamma;
    use crate::walk::{run_until_exit, DEFAULT_MAX_STEPS};

    #[test]
    fn gamma_ratio_matches_log_gamma() {
        for &x in &[2.0, 2.5, 7.0, 15.9, 16.0, 40.0, 300.0] {
            for &c in &[0.1, 0.5, 1.0, 1.7, 1.99] {
                let direct = ln_gamma::<f64>(x - c) - ln_gamma::<f64>(x);
                assert!((ln_gamma_ratio(x, c) - direct).abs() < 1e-12, "x={x} c={c}");
            }
        }
        // large-x: product telescoping against a direct sum
        let (d0, c) = (1.0e5, 0.5);
        let direct: f64 = (0..1000).map(|i| (1.0 - c / (d0 + i as f64)).ln()).sum();
        let via = ln_gamma_ratio(d0 + 1000.0, c) - ln_gamma_ratio(d0, c);
        assert!((direct - via).abs() < 1e-12);
    }

    #[test]
    fn run_sampling_law() {
        // compare both branches of sample_run against the exact survival function
        let (d0, drift) = (5.0, 0.9);
        let survival = |k: usize| (0..k).map(|i| 1.0 - drift / (d0 + i as f64)).product::<f64>();
        let mut rng = RandomStream::from_seed(3);
        let n = 200_000;
        for r in [20usize, 200] {
            let mut hist = vec![0usize; r + 1];
            for _ in 0..n {
                hist[sample_run(d0, drift, r, &mut rng)] += 1;
            }
            for k in [1usize, 3, 10, 19] {
                let emp = hist[k..].iter().sum::<usize>() as f64 / n as f64;
                let p = survival(k);
                let se = (p * (1.0 - p) / n as f64).sqrt();
                assert!((emp - p).abs() < 4.0 * se + 1e-4, "r={r} k={k} emp={emp} p={p}");
            }
        }
    }

    #[test]
    fn rejects_bad_barriers() {
        let mut s = ExitSampler::new(&CookieEnvironment::<f64>::fair());
        let mut rng = RandomStream::from_seed(1);
        assert!(s.sample(0, -3, &mut rng).is_err());
        assert!(s.sample(3, 0, &mut rng).is_err());
    }

    fn right_freq(
        env: &CookieEnvironment,
        a: i64,
        b: i64,
        n: usize,
        seed: u64,
        fast: bool,
    ) -> f64 {
        let mut rng = RandomStream::from_seed(seed);
        let mut s = ExitSampler::new(env);
        let hits = (0..n)
            .filter(|_| {
                if fast {
                    s.sample(a, -b, &mut rng).unwrap() == Side::Right
                } else {
                    run_until_exit(env, a, -b, &mut rng, DEFAULT_MAX_STEPS)
                        .unwrap()
                        .side
                        == Side::Right
                }
            })
            .count();
        hits as f64 / n as f64
    }

    #[test]
    fn agrees_with_the_stepwise_walk() {
        let envs = [
            CookieEnvironment::new(vec![0.75], vec![0.25]).unwrap(),
            CookieEnvironment::new(vec![0.75, 0.75], vec![]).unwrap(),
            CookieEnvironment::new(vec![0.9, 0.9], vec![0.1, 0.1]).unwrap(),
            CookieEnvironment::new(vec![0.3, 0.8, 0.6], vec![0.7]).unwrap(),
        ];
        let n = 40_000;
        for (i, e) in envs.iter().enumerate() {
            for (a, b) in [(5, 9), (60, 40)] {
                let f = right_freq(e, a, b, n, 100 + i as u64, true);
                let s = right_freq(e, a, b, n, 200 + i as u64, false);
                let se = (f * (1.0 - f) / n as f64 * 2.0).sqrt().max(1e-3);
                assert!((f - s).abs() < 4.0 * se, "env {i} ({a},{b}): fast {f} vs step {s}");
            }
        }
    }

    #[test]
    fn fair_walk_is_gamblers_ruin() {
        let e = CookieEnvironment::<f64>::fair();
        let n = 100_000;
        let f = right_freq(&e, 30, 70, n, 4, true);
        assert!((f - 0.7).abs() < 3.0 * (0.21 / n as f64).sqrt());
    }

    #[test]
    fn sampler_is_reusable_across_interval_sizes() {
        let e = CookieEnvironment::new(vec![0.75, 0.75], vec![0.25]).unwrap();
        let mut s = ExitSampler::new(&e);
        let mut rng = RandomStream::from_seed(8);
        for (a, b) in [(500, 700), (3, 2), (1000, 1), (1, 1), (40, 60)] {
            s.sample(a, -b, &mut rng).unwrap();
        }
        // a reused sampler and a fresh one see the same law on a small interval
        let n = 40_000;
        let mut rng_a = RandomStream::from_seed(9);
        let hits = (0..n)
            .filter(|i| {
                if i % 2 == 0 {
                    s.sample(800, -800, &mut rng_a).unwrap();
                }
                s.sample(4, -6, &mut rng_a).unwrap() == Side::Right
            })
            .count() as f64
            / n as f64;
        let fresh = right_freq(&e, 4, 6, n, 10, true);
        assert!((hits - fresh).abs() < 4.0 * (0.5 / n as f64).sqrt());
    }
}
