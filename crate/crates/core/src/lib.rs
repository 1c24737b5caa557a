//! Colombeau generalized numbers, strongly internal sets and generalized
//! smooth functions as executable objects.
//!
//! Nets `eps -> value` are inspectable expression trees ([`net::NetExpr`]).
//! The [`asymptotics`] layer decides moderateness, negligibility and
//! valuations, exactly on a canonical subalgebra and by tail regression
//! elsewhere. [`setnets`], [`topology`] and [`gsf`] build the set, topology
//! and calculus layers on top.

pub mod asymptotics;
pub mod error;
pub mod gsf;
pub mod jet;
pub mod logmag;
pub mod net;
pub mod setnets;
pub mod sexpr;
pub mod scenario;
pub mod smooth;
pub mod suites;
pub mod topology;

pub use error::{Error, Result};
