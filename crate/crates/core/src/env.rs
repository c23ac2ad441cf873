//! Cookie environments: finite cookie stacks on both half-lines with a fair tail.
//!
//! A walk standing at a positive site for the `i`-th time steps right with probability
//! `pos_cookies[i-1]` (and `1/2` once the stack is used up); negative sites read
//! `neg_cookies` the same way; the origin is always fair.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance used to decide `alpha == 1`, `beta == 1` and mirror symmetry.
///
/// Dyadic cookie values (0.75, 0.625, ...) make the sums exact, so boundary cases should be
/// encoded with them.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Two finite cookie stacks, `P(step = +1)` per visit index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnvironment<F>", into = "RawEnvironment<F>")]
#[serde(bound = "F: Scalar")]
pub struct CookieEnvironment<F: Scalar = f64> {
    pos_cookies: Vec<F>,
    neg_cookies: Vec<F>,
}

/// Unchecked wire form of an environment (`{"pos_cookies": [...], "neg_cookies": [...]}`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RawEnvironment<F: Scalar> {
    #[serde(default)]
    pub pos_cookies: Vec<F>,
    #[serde(default)]
    pub neg_cookies: Vec<F>,
}

impl<F: Scalar> TryFrom<RawEnvironment<F>> for CookieEnvironment<F> {
    type Error = Error;

    fn try_from(raw: RawEnvironment<F>) -> Result<Self> {
        Self::new(raw.pos_cookies, raw.neg_cookies)
    }
}

impl<F: Scalar> From<CookieEnvironment<F>> for RawEnvironment<F> {
    fn from(env: CookieEnvironment<F>) -> Self {
        RawEnvironment {
            pos_cookies: env.pos_cookies,
            neg_cookies: env.neg_cookies,
        }
    }
}

/// Sign pattern of a stack's deviations `p_i - 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StackSign {
    /// Every cookie is exactly fair (includes the empty stack).
    Fair,
    NonNegative,
    NonPositive,
    Mixed,
}

impl StackSign {
    fn of<F: Scalar>(stack: &[F]) -> Self {
        let half = F::lit(0.5);
        let up = stack.iter().any(|&p| p > half);
        let down = stack.iter().any(|&p| p < half);
        match (up, down) {
            (false, false) => StackSign::Fair,
            (true, false) => StackSign::NonNegative,
            (false, true) => StackSign::NonPositive,
            (true, true) => StackSign::Mixed,
        }
    }
}

/// Outcome of [`CookieEnvironment::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pos_sign: StackSign,
    pub neg_sign: StackSign,
    /// Both stacks are sign-consistent; theory-backed operations require this.
    pub hypothesis_holds: bool,
}

/// Regime tags for the limit of the normalized right boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeKind {
    /// `alpha < 1`, `beta < 1`.
    FixedPoint,
    /// `alpha > 1`, `beta <= 1`.
    TransientRight,
    /// `alpha <= 1`, `beta > 1`.
    TransientLeft,
    /// `alpha > 1`, `beta > 1`.
    TransientBoth,
    /// `alpha = 1`, `beta < 1`.
    BoundaryRight,
    /// `alpha < 1`, `beta = 1`.
    BoundaryLeft,
    /// `alpha = beta = 1` and the environment equals its mirror image.
    SymmetricCritical,
    /// `alpha = beta = 1` without mirror symmetry.
    UnknownCritical,
}

impl RegimeKind {
    pub const ALL: [RegimeKind; 8] = [
        RegimeKind::FixedPoint,
        RegimeKind::TransientRight,
        RegimeKind::TransientLeft,
        RegimeKind::TransientBoth,
        RegimeKind::BoundaryRight,
        RegimeKind::BoundaryLeft,
        RegimeKind::SymmetricCritical,
        RegimeKind::UnknownCritical,
    ];

    /// The walk is transient (to at least one side).
    pub fn is_transient(self) -> bool {
        matches!(
            self,
            RegimeKind::TransientRight | RegimeKind::TransientLeft | RegimeKind::TransientBoth
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Regime<F: Scalar = f64> {
    pub kind: RegimeKind,
    pub alpha: F,
    pub beta: F,
}

fn cmp_one<F: Scalar>(x: F) -> Ordering {
    let d = x - F::one();
    if d.abs() <= F::lit(BOUNDARY_TOLERANCE) {
        Ordering::Equal
    } else if d < F::zero() {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Regime of a parameter pair; `symmetric` only matters on the critical point.
pub fn classify_parameters<F: Scalar>(alpha: F, beta: F, symmetric: bool) -> RegimeKind {
    use Ordering::*;
    match (cmp_one(alpha), cmp_one(beta)) {
        (Less, Less) => RegimeKind::FixedPoint,
        (Greater, Greater) => RegimeKind::TransientBoth,
        (Greater, _) => RegimeKind::TransientRight,
        (_, Greater) => RegimeKind::TransientLeft,
        (Equal, Less) => RegimeKind::BoundaryRight,
        (Less, Equal) => RegimeKind::BoundaryLeft,
        (Equal, Equal) if symmetric => RegimeKind::SymmetricCritical,
        (Equal, Equal) => RegimeKind::UnknownCritical,
    }
}

impl<F: Scalar> CookieEnvironment<F> {
    /// Builds an environment, rejecting any probability outside the open unit interval.
    pub fn new(pos_cookies: Vec<F>, neg_cookies: Vec<F>) -> Result<Self> {
        check_stack("pos", &pos_cookies)?;
        check_stack("neg", &neg_cookies)?;
        Ok(CookieEnvironment {
            pos_cookies,
            neg_cookies,
        })
    }

    /// The simple symmetric walk.
    pub fn fair() -> Self {
        CookieEnvironment {
            pos_cookies: Vec::new(),
            neg_cookies: Vec::new(),
        }
    }

    /// One cookie per side; `alpha = 2p - 1`, `beta = 1 - 2q`.
    pub fn single(p_pos: F, p_neg: F) -> Result<Self> {
        Self::new(vec![p_pos], vec![p_neg])
    }

    pub fn pos_cookies(&self) -> &[F] {
        &self.pos_cookies
    }

    pub fn neg_cookies(&self) -> &[F] {
        &self.neg_cookies
    }

    pub fn validate(&self) -> ValidationReport {
        let pos_sign = StackSign::of(&self.pos_cookies);
        let neg_sign = StackSign::of(&self.neg_cookies);
        ValidationReport {
            pos_sign,
            neg_sign,
            hypothesis_holds: pos_sign != StackSign::Mixed && neg_sign != StackSign::Mixed,
        }
    }

    pub fn hypothesis_holds(&self) -> bool {
        self.validate().hypothesis_holds
    }

    /// Total drift stored on the positive half-line, `sum (2 p_{i,+} - 1)`.
    pub fn alpha(&self) -> F {
        self.pos_cookies
            .iter()
            .fold(F::zero(), |acc, &p| acc + (p + p - F::one()))
    }

    /// Total drift stored on the negative half-line, `-sum (2 p_{i,-} - 1)`.
    pub fn beta(&self) -> F {
        -self
            .neg_cookies
            .iter()
            .fold(F::zero(), |acc, &p| acc + (p + p - F::one()))
    }

    /// Environment of the reflected walk `-X`: sides swapped, each `q` replaced by `1 - q`.
    pub fn mirror(&self) -> Self {
        let flip = |s: &[F]| s.iter().map(|&q| F::one() - q).collect::<Vec<_>>();
        CookieEnvironment {
            pos_cookies: flip(&self.neg_cookies),
            neg_cookies: flip(&self.pos_cookies),
        }
    }

    /// `X` and `-X` have the same law: `p_{i,-} = 1 - p_{i,+}` for every `i`, fair tails
    /// included.
    pub fn is_mirror_symmetric(&self) -> bool {
        let tol = F::lit(BOUNDARY_TOLERANCE);
        let half = F::lit(0.5);
        let n = self.pos_cookies.len().max(self.neg_cookies.len());
        (0..n).all(|i| {
            let p = self.pos_cookies.get(i).copied().unwrap_or(half);
            let q = self.neg_cookies.get(i).copied().unwrap_or(half);
            (q - (F::one() - p)).abs() <= tol
        })
    }

    /// Every cookie of `self` is at least the corresponding cookie of `other` (fair tails
    /// included), on both sides.
    pub fn dominates(&self, other: &Self) -> bool {
        let half = F::lit(0.5);
        let ge = |a: &[F], b: &[F]| {
            (0..a.len().max(b.len())).all(|i| {
                a.get(i).copied().unwrap_or(half) >= b.get(i).copied().unwrap_or(half)
            })
        };
        ge(&self.pos_cookies, &other.pos_cookies) && ge(&self.neg_cookies, &other.neg_cookies)
    }

    /// Regime of this environment. Requires the sign-consistency hypothesis.
    pub fn classify(&self) -> Result<Regime<F>> {
        if !self.hypothesis_holds() {
            return Err(Error::HypothesisViolated);
        }
        let (alpha, beta) = (self.alpha(), self.beta());
        Ok(Regime {
            kind: classify_parameters(alpha, beta, self.is_mirror_symmetric()),
            alpha,
            beta,
        })
    }

    /// Converts the stored probabilities to another scalar type.
    pub fn cast<G: Scalar>(&self) -> CookieEnvironment<G> {
        let conv = |s: &[F]| s.iter().map(|&p| G::lit(p.to_f64_lossy())).collect();
        CookieEnvironment {
            pos_cookies: conv(&self.pos_cookies),
            neg_cookies: conv(&self.neg_cookies),
        }
    }
}

fn check_stack<F: Scalar>(side: &'static str, stack: &[F]) -> Result<()> {
    for (index, &p) in stack.iter().enumerate() {
        if !(p > F::zero() && p < F::one()) {
            return Err(Error::ProbabilityOutOfRange {
                side,
                index,
                value: p.to_f64_lossy(),
            });
        }
    }
    Ok(())
}
