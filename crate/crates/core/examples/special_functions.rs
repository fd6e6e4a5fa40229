//! Regularized incomplete gamma, Gauss hypergeometric and the power-law
//! interference integral.

use coxnet::special::{gauss_2f1_unit_a, powerlaw_integral_term, reg_upper_gamma, Limit};

fn main() -> coxnet::Result<()> {
    println!("Q(L, x), the Poisson tail P[N < L] with mean x:");
    for (l, x) in [(1, 1.0), (10, 5.0), (500, 450.0), (500, 550.0)] {
        println!("  Q({l}, {x}) = {:.6e}", reg_upper_gamma(l, x)?);
    }
    println!("2F1(1, b; b+1; z):");
    for (b, z) in [(0.5, -1.0), (0.5, -1e4), (0.75, -1e8)] {
        println!("  b = {b}, z = {z:e}: {:.10}", gauss_2f1_unit_a(b, z)?);
    }
    println!("∫ r^(κ+1) γ/(r^α + γ) dr with κ = -0.5, α = 4, γ = 1e4:");
    for r in [10.0, 100.0, 1e4] {
        println!("  up to {r:e}: {:.10}", powerlaw_integral_term(-0.5, 4.0, 1e4, Limit::Finite(r))?);
    }
    println!("  up to ∞: {:.10}", powerlaw_integral_term(-0.5, 4.0, 1e4, Limit::Infinite)?);
    Ok(())
}
