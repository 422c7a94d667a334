//! Poisson-binomial distributions, their informational distances to the
//! matched Poisson law, and a certification harness for the explicit
//! inequality envelopes relating those distances to the regime quantities
//! F and Q.
//!
//! Everything numerical is generic over the scalar type ([`scalar::Real`]);
//! the two instantiations are `f64` (binary64) and
//! [`scalar::DoubleDouble`] (extended, ~31 decimal digits).

pub mod bernoulli;
pub mod bounds;
pub mod contour;
mod cx;
pub mod divergence;
pub mod error;
pub mod harness;
pub mod io;
pub mod pmf;
pub mod poisson;
pub mod policy;
pub mod saddle;
pub mod scalar;

pub use bernoulli::{BernoulliVector, InstanceSummary};
pub use error::{Error, Result};
pub use policy::{PrecisionMode, PrecisionPolicy, TruncationPolicy};
pub use scalar::{DoubleDouble, Real};

/// Binary64 working scalar.
pub type Binary64 = f64;
/// Extended working scalar (double-double, ~31 decimal digits).
pub type Extended = DoubleDouble;

/// Concrete aliases for the two precision lanes.
pub type BernoulliVector64 = BernoulliVector<Binary64>;
pub type BernoulliVectorExt = BernoulliVector<Extended>;
pub type LogPmf64 = pmf::LogPmf<Binary64>;
pub type LogPmfExt = pmf::LogPmf<Extended>;
