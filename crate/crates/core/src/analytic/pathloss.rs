//! Generalized path loss: a homogeneous network under `φ(r)` is equivalent,
//! at the origin, to a non-homogeneous network under `r^{−α}`.

use std::f64::consts::PI;

use super::model::{IntensityModel, PathLoss, RadialProfile};
use super::psi::psi;
use crate::error::{domain, Result};
use crate::quadrature::{integrate_to_infinity, DEFAULT_REL_TOL};

/// Equivalent radial profile `λ_S` of a homogeneous network of density
/// `base_density` under `pathloss`, for `r^{−α}` path loss.
pub fn equivalent_intensity(pathloss: &PathLoss, base_density: f64, alpha: f64) -> Result<IntensityModel> {
    if !(alpha > 2.0) {
        return domain(format!("α must exceed 2, got {alpha}"));
    }
    pathloss.check_monotone()?;
    let profile = match pathloss {
        PathLoss::Exponential { decay } => RadialProfile::DispersiveExponential { density: base_density, decay: *decay },
        other => RadialProfile::Equivalent { base_density, pathloss: other.clone() },
    };
    let model = IntensityModel::CustomRadialProfile { profile };
    model.validate(alpha)?;
    Ok(model)
}

/// `ψ(γ) = 2πρ ∫ r γφ(r)/(1 + γφ(r)) dr`, computed directly in the original
/// geometry.
pub fn psi_with_pathloss(pathloss: &PathLoss, base_density: f64, gamma: f64) -> Result<f64> {
    pathloss.validate()?;
    if gamma == 0.0 || base_density == 0.0 {
        return Ok(0.0);
    }
    let f = |r: f64| {
        let lg = pathloss.ln_gain(r) + gamma.ln();
        // γφ/(1+γφ) = 1/(1 + e^{−ln γφ})
        2.0 * PI * base_density * r / (1.0 + (-lg).exp())
    };
    let knee = pathloss.inverse_ln(-gamma.ln())?.max(1.0);
    integrate_to_infinity(f, &[0.0, knee], knee, DEFAULT_REL_TOL).map(|r| r.value)
}

/// ψ of the equivalent model, for convenience.
pub fn psi_equivalent(pathloss: &PathLoss, base_density: f64, alpha: f64, gamma: f64) -> Result<f64> {
    psi(&equivalent_intensity(pathloss, base_density, alpha)?, alpha, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_equivalence_on_gamma_grid() {
        let pl = PathLoss::Exponential { decay: 0.01 };
        for k in 0..12 {
            let g = 10f64.powf(k as f64);
            let direct = psi_with_pathloss(&pl, 1e-5, g).unwrap();
            let eq = psi_equivalent(&pl, 1e-5, 4.0, g).unwrap();
            assert!(((direct - eq) / direct).abs() < 1e-8, "γ={g}: {direct} vs {eq}");
        }
    }

    #[test]
    fn power_law_identity_transform() {
        let pl = PathLoss::PowerLaw { exponent: 4.0 };
        let m = equivalent_intensity(&pl, 2e-3, 4.0).unwrap();
        let g = 1e4;
        let h = psi(&IntensityModel::homogeneous(2e-3), 4.0, g).unwrap();
        assert!(((psi(&m, 4.0, g).unwrap() - h) / h).abs() < 1e-8);
    }

    #[test]
    fn bounded_and_tabulated_equivalence() {
        let bounded = PathLoss::Bounded { exponent: 3.0 };
        let radii: Vec<f64> = (0..=300).map(|k| (k as f64 * 0.05).exp() - 1.0).collect();
        let gain: Vec<f64> = radii.iter().map(|r| (1.0 + r).powf(-3.0) * (1.0 + 0.1 / (1.0 + r))).collect();
        let tab = PathLoss::Tabulated { radii, gain };
        for pl in [bounded, tab] {
            for g in [1.0, 1e3, 1e6] {
                let direct = psi_with_pathloss(&pl, 1e-3, g).unwrap();
                let eq = psi_equivalent(&pl, 1e-3, 4.0, g).unwrap();
                assert!(((direct - eq) / direct).abs() < 1e-6, "{pl:?} γ={g}: {direct} vs {eq}");
            }
        }
    }
}
