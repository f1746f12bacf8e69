//! Fair division of a one-dimensional cake or pie under separation
//! constraints: maximin shares, allocation protocols over Robertson–Webb
//! queries, approximate envy-free and equitable solvers, and adversaries.

pub mod adversary;
pub mod cake;
pub mod error;
pub mod exact;
pub mod fairness;
pub mod lp;
pub mod oracle;
pub mod partition;
pub mod pie;
pub mod random;
pub mod rational;
pub mod valuation;

pub use cake::{Decision, Relation};
pub use error::{Error, Result};
pub use oracle::{ArcView, Flipped, QueryKind, QueryRecord, QuerySession, RwOracle, Span};
pub use partition::{Allocation, Partition};
pub use rational::Q;
pub use valuation::{Instance, Interval, Topology, Valuation};
