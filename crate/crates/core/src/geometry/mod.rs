//! Convex bodies and potentials behind counted oracles.

mod body;
mod descriptor;
mod ledger;
mod potential;

pub use body::{
    ball_truncation_level, epigraph_body, logconcave_truncation_level, truncate_for_logconcave, truncate_to_ball,
    Body, MembershipFn,
};
pub use descriptor::TargetDescriptor;
pub use ledger::{LedgerSnapshot, QueryLedger};
pub use potential::{EvalFn, Potential};
pub(crate) use potential::random_unit;
