//! Limit theory: the hitting function of perturbed Brownian motion, its fixed point, and the
//! predicted limit of the normalized right boundary for every regime.
//!
//! For `alpha, beta < 1`,
//! `h(x) = P(T_x < T_{x-1}) = I_{1-x}(1 - alpha, 1 - beta)`,
//! the Beta(1 - alpha, 1 - beta) distribution function evaluated at `1 - x`.

mod special;

use serde::{Deserialize, Serialize};

use crate::env::{CookieEnvironment, RegimeKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use special::{beta_reg, ln_beta, ln_gamma};

/// Parameters of one evaluation of the hitting function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct HQuery<F: Scalar = f64> {
    alpha: F,
    beta: F,
    x: F,
}

pub(crate) fn check_below_one<F: Scalar>(name: &'static str, v: F) -> Result<()> {
    if v < F::one() {
        Ok(())
    } else {
        Err(Error::ParameterNotBelowOne {
            name,
            value: v.to_f64_lossy(),
        })
    }
}

impl<F: Scalar> HQuery<F> {
    pub fn new(alpha: F, beta: F, x: F) -> Result<Self> {
        check_below_one("alpha", alpha)?;
        check_below_one("beta", beta)?;
        if !(x >= F::zero() && x <= F::one()) {
            return Err(Error::InvalidArgument(format!(
                "x = {x} must lie in [0, 1]"
            )));
        }
        Ok(HQuery { alpha, beta, x })
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn x(&self) -> F {
        self.x
    }
}

/// `h_(alpha, beta)(x)`: probability that the perturbed Brownian motion reaches `x` before
/// `x - 1`.
pub fn h_exact<F: Scalar>(q: &HQuery<F>) -> F {
    let one = F::one();
    beta_reg(one - q.alpha, one - q.beta, one - q.x)
}

/// Convenience wrapper around [`HQuery::new`] and [`h_exact`].
pub fn h<F: Scalar>(alpha: F, beta: F, x: F) -> Result<F> {
    HQuery::new(alpha, beta, x).map(|q| h_exact(&q))
}

/// The unique solution of `h_(alpha, beta)(p) = p`, by bisection of the decreasing map
/// `h(x) - x` on `[0, 1]`.
pub fn fixed_point<F: Scalar>(alpha: F, beta: F) -> Result<F> {
    check_below_one("alpha", alpha)?;
    check_below_one("beta", beta)?;
    let one = F::one();
    let (a, b) = (one - alpha, one - beta);
    let gap = |x: F| beta_reg(a, b, one - x) - x;
    let width = F::lit(1e-12).max(F::epsilon() * F::lit(4.0));
    let (mut lo, mut hi) = (F::zero(), one);
    while hi - lo > width {
        let mid = (lo + hi) * F::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if gap(lo).abs() <= gap(hi).abs() { lo } else { hi })
}

/// What the law of large numbers says about `lim x_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredictionKind {
    /// The fixed point of `h_(alpha, beta)`.
    ExactFixedPoint,
    One,
    Zero,
    Half,
    /// `P(X_n -> +inf)`, strictly inside (0, 1) but without a formula.
    MonteCarloOnly,
    /// No theorem covers this environment.
    Unknown,
    /// A reference value computed directly (closed form or quadrature), not a limit of `x_n`.
    Reference,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Prediction<F: Scalar = f64> {
    kind: PredictionKind,
    p: Option<F>,
}

impl<F: Scalar> Prediction<F> {
    pub fn fixed_point(p: F) -> Self {
        Prediction {
            kind: PredictionKind::ExactFixedPoint,
            p: Some(p),
        }
    }

    pub fn of_kind(kind: PredictionKind) -> Self {
        let p = match kind {
            PredictionKind::One => Some(F::one()),
            PredictionKind::Zero => Some(F::zero()),
            PredictionKind::Half => Some(F::lit(0.5)),
            _ => None,
        };
        debug_assert!(!matches!(kind, PredictionKind::ExactFixedPoint | PredictionKind::Reference));
        Prediction { kind, p }
    }

    pub fn reference(p: F) -> Self {
        Prediction {
            kind: PredictionKind::Reference,
            p: Some(p),
        }
    }

    pub fn kind(&self) -> PredictionKind {
        self.kind
    }

    /// Predicted limit, when the theory provides a number.
    pub fn p(&self) -> Option<F> {
        self.p
    }
}

/// Predicted limit of `x_n` for an environment satisfying the sign-consistency hypothesis.
pub fn predict<F: Scalar>(env: &CookieEnvironment<F>) -> Result<Prediction<F>> {
    let regime = env.classify()?;
    Ok(match regime.kind {
        RegimeKind::FixedPoint => Prediction::fixed_point(fixed_point(regime.alpha, regime.beta)?),
        RegimeKind::BoundaryRight | RegimeKind::TransientRight => {
            Prediction::of_kind(PredictionKind::One)
        }
        RegimeKind::BoundaryLeft | RegimeKind::TransientLeft => {
            Prediction::of_kind(PredictionKind::Zero)
        }
        RegimeKind::TransientBoth => Prediction::of_kind(PredictionKind::MonteCarloOnly),
        RegimeKind::SymmetricCritical => Prediction::of_kind(PredictionKind::Half),
        RegimeKind::UnknownCritical => Prediction::of_kind(PredictionKind::Unknown),
    })
}
