//! Exact and multiprecision machinery for Ramanujan's formula for odd zeta
//! values, its coth form and Lerch's special case.
//!
//! * [`exact`]: Bernoulli numbers and every identity that holds over the
//!   rationals.
//! * [`realseries`]: certified multiprecision series (zeta, Lambert-type sums,
//!   coth sums) plus oracle-grade partial sums.
//! * [`identities`]: both sides of each identity, verification reports, and
//!   the fast `zeta(4m+3)` evaluator.

pub mod error;
pub mod exact;
pub mod identities;
pub mod realseries;

pub use error::{Error, Result};
pub use exact::{BernoulliCache, Rational};
pub use identities::{IdentityName, IdentityParams, IdentityReport, NegativeControl};
pub use realseries::{Real, SeriesTruncation, GUARD_BITS};
pub use rug::Float;
