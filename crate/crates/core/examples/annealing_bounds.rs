//! Rényi divergences between neighbouring annealing targets, by quadrature,
//! next to the closed-form bounds the schedules rely on.
//!
//!     cargo run --release --example annealing_bounds

use lcsamp::diagnostics::{default_annealing_cases, AnnealingCase, Potential1D};

fn main() -> lcsamp::Result<()> {
    let row = AnnealingCase::Global { potential: Potential1D::laplace(), q: 2.0, alpha: 0.2, delta: 0.0 }.check()?;
    let exact = ((2.0 / 1.4) * 2.0 / (2.0f64 / 1.2).powi(2)).ln();
    println!("R_2(e^(-1.2|x|) || e^(-|x|)) = {:.6} (closed form {exact:.6}, bound {})", row.quadrature, row.bound);

    let rows: Vec<_> = default_annealing_cases(1, 10).iter().map(|c| c.check()).collect::<Result<_, _>>()?;
    let worst = rows.iter().map(|r| r.quadrature / r.bound).fold(0.0, f64::max);
    println!("{} cases, all within bound: {}, worst ratio {worst:.3}", rows.len(), rows.iter().all(|r| r.holds));
    for r in rows.iter().filter(|r| matches!(r.case, AnnealingCase::Variance { .. })) {
        if let AnnealingCase::Variance { sigma2, q, alpha, .. } = r.case {
            println!("  variance σ²={sigma2} q={q} α={alpha}: {:.3e} ≤ {:.3e}", r.quadrature, r.bound);
        }
    }
    Ok(())
}
