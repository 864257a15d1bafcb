//! Step sizes, rejection caps and iteration counts: the exact theory
//! formulas, and the practical scaling used to make runs feasible.
//!
//!     cargo run --release --example parameter_plan

use lcsamp::proximal::ProxKind;
use lcsamp::schedule::{ps_params, uniform_plan, Mode, PlanSettings, ASSUMED_M2};

fn main() -> lcsamp::Result<()> {
    for kind in [ProxKind::Unif, ProxKind::Gauss { sigma2: 1.0 }, ProxKind::Exp, ProxKind::Ann { sigma2: 1.0, rho: 1.0 }]
    {
        let p = ps_params(&kind, 10, 1000, 2.0, 0.01)?;
        println!("{:>5}: h = {:.3e}, N = {:.3e}, q needs ≥ {:?}", kind.name(), p.h, p.n_cap, p.q_required);
    }

    for (label, mode) in [("theory", Mode::Theory), ("practical", Mode::practical(100.0, 100.0))] {
        let plan = uniform_plan(5, 1.0, &PlanSettings::new(0.1, 0.1, mode))?;
        let total: u64 = plan.steps.iter().map(|s| s.params.k).sum();
        println!(
            "{label}: cube n=5 → {} steps, q = {:.2}, total k = {total}, M2 assumed {:.3}",
            plan.predicted_phase_count, plan.q, ASSUMED_M2
        );
        let last = plan.steps.last().unwrap();
        println!("  final step: {:?} h = {:.3e}, k = {}", last.phase, last.params.h, last.params.k);
    }
    let plan = uniform_plan(5, 1.0, &PlanSettings::new(0.1, 0.1, Mode::practical(100.0, 100.0)))?;
    println!("{}", serde_json::to_string(&plan.steps[0]).unwrap());
    Ok(())
}
