//! Internal diffusion-limited aggregation on `Z` driven by excited (cookie) random walks.
//!
//! * [`env`] – cookie environments, their drift parameters and regime classification;
//! * [`walk`] – the excited walk itself and exit-side sampling;
//! * [`idla`] – growth of the cluster and its normalized right boundary;
//! * [`pbm`] – perturbed Brownian motion, the scaling limit of recurrent walks;
//! * [`theory`] – the incomplete-Beta hitting function, its fixed point, predictions;
//! * [`harness`] – Monte Carlo experiments that check the limit theorems;
//! * [`cli`] – the command-line front end.
//!
//! Math that does not involve the lattice is generic over [`Scalar`] (`f32` / `f64`); the
//! aliases below fix the double-precision versions used by the harness and the CLI.

pub mod cli;
pub mod env;
pub mod error;
pub mod harness;
pub mod idla;
pub mod pbm;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod theory;
pub mod walk;

pub use error::{Error, Result};
pub use rng::RandomStream;
pub use scalar::Scalar;

/// Double-precision cookie environment.
pub type Environment = env::CookieEnvironment<f64>;
/// Single-precision cookie environment.
pub type Environment32 = env::CookieEnvironment<f32>;
pub type Regime = env::Regime<f64>;
pub type HQuery = theory::HQuery<f64>;
pub type Prediction = theory::Prediction<f64>;
pub type PbmState = pbm::PbmState<f64>;
pub type PbmState32 = pbm::PbmState<f32>;
pub type PbmParams = pbm::PbmParams<f64>;
