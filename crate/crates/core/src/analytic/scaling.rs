//! Large-array scaling limit: with `L = ℓ⁻¹β` antennas against intensity
//! `β λ_c`, the SIR concentrates at `ψ_c⁻¹(1/ℓ) r_T^{−α}`.

use super::model::IntensityModel;
use super::psi::psi;
use crate::error::{domain, Error, Result};

const BRACKET: (f64, f64) = (1e-12, 1e12);

/// Solve `ψ(γ*; λ_c) = 1/ℓ` and return the limiting SIR `γ* r_T^{−α}`.
pub fn scaling_limit_sir(model: &IntensityModel, ell_ratio: f64, alpha: f64, r_t: f64) -> Result<f64> {
    if !(ell_ratio > 0.0) || !(r_t > 0.0) {
        return domain(format!("scaling limit needs ℓ > 0 and r_T > 0, got ℓ = {ell_ratio}, r_T = {r_t}"));
    }
    model.validate(alpha)?;
    let gamma = solve_psi(model, alpha, 1.0 / ell_ratio)?;
    Ok(gamma * r_t.powf(-alpha))
}

/// Invert the monotone `ψ(·; model)` at `target` by bisection in `ln γ`.
pub fn solve_psi(model: &IntensityModel, alpha: f64, target: f64) -> Result<f64> {
    let f = |g: f64| psi(model, alpha, g).map(|p| p - target);
    let (mut lo, mut hi) = BRACKET;
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(Error::Numeric(format!(
            "ψ(γ) = {target} not bracketed in [{lo:e}, {hi:e}] (ψ ranges {} .. {})",
            flo + target,
            fhi + target
        )));
    }
    while hi / lo - 1.0 > 1e-11 {
        let mid = (lo * hi).sqrt();
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn closed_form_gamma(eps: f64, alpha: f64, ell: f64) -> f64 {
        let csc = 1.0 / (PI * (eps + 2.0) / alpha).sin();
        (alpha / (2.0 * PI * PI * ell * csc)).powf(alpha / (eps + 2.0))
    }

    #[test]
    fn power_law_limit_matches_inversion() {
        let m = IntensityModel::power_law(1.0, -0.5);
        for ell in [0.0125, 0.05, 1.0] {
            let sir = scaling_limit_sir(&m, ell, 4.0, 10.0).unwrap();
            let expected = closed_form_gamma(-0.5, 4.0, ell) * 1e-4;
            assert!(((sir - expected) / expected).abs() < 1e-9);
        }
    }

    #[test]
    fn large_l_sir_approximation() {
        let (rho, l, eps, alpha, r_t): (f64, f64, f64, f64, f64) = (0.5, 40.0, -0.5, 4.0, 10.0);
        let csc = 1.0 / (PI * (eps + 2.0) / alpha).sin();
        let approx = (2.0 * PI * PI * rho * csc / (alpha * l)).powf(-alpha / (eps + 2.0)) * r_t.powf(-alpha);
        let sir = scaling_limit_sir(&IntensityModel::power_law(1.0, eps), rho / l, alpha, r_t).unwrap();
        assert!(((sir - approx) / approx).abs() < 1e-9);
    }

    #[test]
    fn limit_grows_as_ell_shrinks() {
        let m = IntensityModel::Strip { half_width: 10.0, density: 1.0 };
        let mut prev = 0.0;
        for ell in [1.0, 0.1, 0.01, 0.001] {
            let v = scaling_limit_sir(&m, ell, 4.0, 10.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn unbracketed_root_is_an_error() {
        let m = IntensityModel::homogeneous(1e-30);
        assert!(scaling_limit_sir(&m, 1e-9, 4.0, 1.0).is_err());
    }
}
