//! Deterministic higher-order quasi-Monte Carlo point sets.
//!
//! Digit-interlaced Chen–Skriganov digital nets over a prime field, together with
//! the tooling to audit them: dual-net enumeration and minimum metrics, t-value
//! verification, Walsh coefficients of Bernoulli polynomials and of the Sobolev
//! kernel, and worst-case error evaluation in the Sobolev space of smoothness
//! `α`.

pub mod bernoulli;
pub mod digits;
pub mod dual;
pub mod error;
pub mod ff;
pub mod nets;
pub mod sweep;
pub mod walsh;
pub mod wce;

pub use digits::{DigitVector, Metric, MultiIndex};
pub use error::{Error, Result};
pub use ff::{FieldMatrix, PrimeBase};
pub use nets::{ConstructionParams, DigitalNet, NetPoint, Provenance};
pub use walsh::WalshCoefficient;
pub use wce::{BoundBreakdown, WceMethod, WceReport};
