//! Proximal samplers for convex bodies and logconcave densities that only
//! see the target through membership and evaluation oracles.
//!
//! - [`geometry`]: bodies, potentials, query-counting oracles, epigraphs.
//! - [`proximal`]: the forward/backward proximal step and chains built on it.
//! - [`schedule`]: step sizes, rejection caps and annealing plans.
//! - [`pipelines`]: cold-start samplers for uniform, truncated-Gaussian and
//!   logconcave targets.
//! - [`diagnostics`]: quadrature, Rényi divergences, KS tests and the
//!   covariance-weight experiment.
//! - [`cli`]: the `lcsamp` command line, its config format and reports.
//!
//! Every random draw comes from a ChaCha8 stream keyed by `(seed, stream)`,
//! so runs with the same seed are bit-for-bit reproducible.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod pipelines;
pub mod proximal;
pub mod rng;
pub mod schedule;
pub mod special;

pub use error::{Error, Result};
