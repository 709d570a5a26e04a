//! Exact machinery for Sturmian subshifts of irrational slope.
//!
//! Continued fractions and convergents ([`cf_engine`]), Sturmian words
//! built two independent ways ([`words`]), the repetitivity, repulsiveness
//! and power functionals ([`complexity`]), the weighted ultrametric and
//! the spectral metric with regularity probes ([`spectral`]), and Jarnik
//! approximation queries with dimension estimates ([`jarnik`]).

pub mod banding;
pub mod cf_engine;
pub mod complexity;
pub mod error;
pub mod jarnik;
pub mod numeric;
pub mod spectral;
pub mod words;

pub use banding::{BandRule, Verdict};
pub use cf_engine::{ContinuedFraction, ConvergentTable};
pub use error::{Error, Result};
pub use words::BinaryWord;
