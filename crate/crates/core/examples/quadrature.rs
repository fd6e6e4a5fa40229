//! Adaptive Gauss–Kronrod integration on finite, singular and semi-infinite
//! ranges.

use coxnet::quadrature::{integrate_finite, integrate_finite_singular, integrate_to_infinity, Singularity};

fn main() -> coxnet::Result<()> {
    let r = integrate_finite(|x: f64| x / (x.powi(4) + 1.0), 0.0, 10.0, 1e-10)?;
    println!("∫₀¹⁰ x/(x⁴+1) dx = {:.12} (exact {:.12}), error estimate {:.1e}, {} evaluations", r.value, 100f64.atan() / 2.0, r.abs_error_estimate, r.evaluations);
    let r = integrate_finite_singular(|x: f64| x.powf(-0.9), 0.0, 1.0, 1e-10, Singularity::Left)?;
    println!("∫₀¹ x^-0.9 dx = {:.12} (exact 10)", r.value);
    let r = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x * x), &[0.0, 1.0], 1.0, 1e-10)?;
    println!("∫₀^∞ 1/(1+x²) dx = {:.12} (exact {:.12})", r.value, std::f64::consts::FRAC_PI_2);
    Ok(())
}
