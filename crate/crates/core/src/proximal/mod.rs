//! Proximal samplers: the Gaussian forward step, the four restricted
//! backward steps, and chains built from them.

mod chain;
mod step;

pub use chain::{run_chain, ChainOptions, ChainReport, ProxParams};
pub use step::{
    backward_step, exact_local_conductance_box, forward_step, make_backward_proposal, BackwardProposal, ProxKind,
    StepOutcome,
};
