//! Exact q-series arithmetic, eta-quotient modularity and cusp orders,
//! valence-formula identity certificates, the `U_p` operator calculus at
//! level 10, and the rank parity congruence harness built on top of them.
//!
//! Everything is exact: coefficients are arbitrary-precision integers and
//! every exponent, order and bound is a rational number.

pub mod cusps;
pub mod error;
pub mod etaq;
pub mod identities;
pub mod orders;
pub mod prover;
pub mod ranktheorems;
pub mod series;
pub mod specfile;
pub mod upalgebra;

mod arith;
mod ser;

pub use cusps::{Cusp, CuspTable, Group};
pub use error::{Error, Result};
pub use etaq::{EtaQuotient, GenEtaQuotient, LinearCombination, Term};
pub use orders::OrderReport;
pub use prover::{ProofCertificate, Verdict};
pub use series::ExactSeries;
pub use upalgebra::TPoly;

/// Exact rational exponent (orders, prefactors, bounds).
pub type Exponent = num_rational::Ratio<i64>;
