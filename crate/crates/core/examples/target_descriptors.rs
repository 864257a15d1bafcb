//! Bodies and potentials from JSON descriptors, with oracle query counts.
//!
//!     cargo run --release --example target_descriptors

use lcsamp::geometry::TargetDescriptor;

fn main() -> lcsamp::Result<()> {
    let texts = [
        r#"{"kind": "axis_box", "n": 3, "params": {"lo": [0, 0, 0], "hi": [1, 2, 3]}}"#,
        r#"{"kind": "ellipsoid", "n": 2, "params": {"semi_axes": [3, 0.5]}}"#,
        r#"{"kind": "polytope", "n": 2, "params": {"a": [1, 0, 0, 1, -1, -1], "b": [1, 1, 1], "center": [0, 0], "r_bound": 1.5}}"#,
        r#"{"kind": "intersection_with_ball", "n": 2, "params": {"body": {"kind": "simplex", "n": 2}, "radius": 0.5}}"#,
    ];
    for t in texts {
        let body = TargetDescriptor::from_json(t)?.to_body()?;
        let inside = body.contains(body.center())?;
        println!(
            "{:<24} n={} r={:.3} R={:?} center inside: {inside}, queries so far {}",
            body.label(),
            body.dim(),
            body.inner_radius(),
            body.r_bound(),
            body.ledger().membership_queries()
        );
    }
    let pot = TargetDescriptor::from_json(r#"{"kind": "potential_l1", "n": 4, "params": {"scale": 2}}"#)?.to_potential()?;
    println!("l1 potential at (1,1,1,1): {}  evaluations {}", pot.evaluate(&[1.0; 4])?, pot.ledger().evaluation_queries());
    Ok(())
}
