//! Executable local-global principles for Mordell-Weil type groups over ℚ.
//!
//! Two concrete groups are supported: the multiplicative group ℚ* (optionally
//! restricted to S-units) and the rational points of an elliptic curve given
//! in long Weierstrass form. On top of the group abstraction the crate
//! provides
//!
//! * exact per-prime tests of the support-problem conditions together with
//!   range scanners that produce re-verifiable witnesses ([`support`]),
//! * a search for primes realizing a prescribed `l`-adic valuation pattern on
//!   the orders of reduced points ([`primesearch`]),
//! * detection of linear dependence by reduction maps, with exact relation
//!   certificates ([`dependence`]).

pub mod dependence;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod mwgroup;
pub mod numth;
pub mod primesearch;
pub mod report;
pub mod scan;
pub mod support;

pub use error::{Error, Result};
pub use mwgroup::{
    Backend, CurvePoint, EcPoint, MordellWeil, Multiplicative, NonZeroRational, Reduction,
    WeierstrassCurve,
};
pub use numth::{Factorization, PrimeRange};
pub use report::{ConditionId, ConditionReport, RelationCertificate, Verdict, Witness};
pub use scan::ScanOptions;
