//! Monte Carlo estimates and the two-sample Kolmogorov–Smirnov test.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub stderr: f64,
    pub replicas: u64,
}

impl EstimateWithCI {
    /// Fraction of successes among `replicas` Bernoulli trials.
    pub fn from_counts(successes: u64, replicas: u64) -> Self {
        assert!(replicas >= 1, "an estimate needs at least one replica");
        let n = replicas as f64;
        let mean = successes as f64 / n;
        let stderr = if replicas > 1 {
            // sample variance of 0/1 data: n/(n-1) * mean * (1 - mean)
            (mean * (1.0 - mean) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        EstimateWithCI {
            mean,
            stderr,
            replicas,
        }
    }

    /// Mean and standard error of real samples, summed in slice order.
    pub fn from_samples(samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "an estimate needs at least one replica");
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let ss: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum();
            (ss / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        EstimateWithCI {
            mean,
            stderr,
            replicas: samples.len() as u64,
        }
    }

    /// Exact value, no sampling error.
    pub fn exact(value: f64, replicas: u64) -> Self {
        EstimateWithCI {
            mean: value,
            stderr: 0.0,
            replicas,
        }
    }

    /// A single replica carries no error information.
    pub fn is_degenerate(&self) -> bool {
        self.replicas < 2
    }

    /// `|mean - target| <= k * stderr + margin`.
    pub fn within(&self, target: f64, k: f64, margin: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr + margin
    }
}

/// Standard error of the difference of two independent estimates.
pub fn joint_stderr(a: &EstimateWithCI, b: &EstimateWithCI) -> f64 {
    (a.stderr * a.stderr + b.stderr * b.stderr).sqrt()
}

/// Two-sample KS statistic `sup |F_a - F_b|`. Sorts its inputs.
pub fn ks_statistic<F: Scalar>(a: &mut [F], b: &mut [F]) -> F {
    let cmp = |x: &F, y: &F| x.partial_cmp(y).unwrap_or(Ordering::Equal);
    a.sort_by(cmp);
    b.sort_by(cmp);
    let (na, nb) = (a.len(), b.len());
    let (fa, fb) = (F::from_usize(na).unwrap(), F::from_usize(nb).unwrap());
    let (mut i, mut j) = (0, 0);
    let mut d = F::zero();
    while i < na && j < nb {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < na && a[i] <= v {
            i += 1;
        }
        while j < nb && b[j] <= v {
            j += 1;
        }
        let gap = (F::from_usize(i).unwrap() / fa - F::from_usize(j).unwrap() / fb).abs();
        d = d.max(gap);
    }
    d
}

/// Asymptotic critical value of the two-sample KS statistic at significance `level`.
pub fn ks_critical_value(level: f64, na: usize, nb: usize) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}

/// Asymptotic p-value of a two-sample KS statistic.
pub fn ks_p_value(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na as f64 * nb as f64) / (na + nb) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Result of a two-sample KS comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub level: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub pass: bool,
}

pub fn ks_two_sample(a: &mut [f64], b: &mut [f64], level: f64) -> KsOutcome {
    let statistic = ks_statistic(a, b);
    let critical_value = ks_critical_value(level, a.len(), b.len());
    KsOutcome {
        statistic,
        critical_value,
        p_value: ks_p_value(statistic, a.len(), b.len()),
        level,
        n_a: a.len(),
        n_b: b.len(),
        pass: statistic < critical_value,
    }
}
