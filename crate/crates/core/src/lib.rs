//! Truncated trapezoidal cubature on `R^s` at extended precision.
//!
//! The pipeline: describe how an integrand and its Fourier transform decay
//! ([`decay_model`]), turn a point budget into step sizes and a truncation
//! box ([`planner`]), optionally reshape a slowly decaying integrand with a
//! change of variables ([`transforms`]), sum the lattice ([`quadrature`]),
//! and measure convergence rates on a catalog of test integrands
//! ([`harness`]).

pub mod decay_model;
pub mod error;
pub mod harness;
pub mod integrand;
pub mod numerics;
pub mod planner;
pub mod quadrature;
pub mod transforms;
mod wire;

pub use decay_model::{DecayProfile, FourierDecay, FunctionDecay};
pub use error::{Error, Result};
pub use integrand::{Domain, Integrand};
pub use numerics::{PrecisionContext, Real};
pub use planner::{Balance, ErrorBoundReport, QuadraturePlan};
pub use quadrature::{AxisExtent, QuadratureResult};
pub use transforms::{Transform1D, TransformChain};
