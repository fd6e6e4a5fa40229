//! Guard-zone tuning for hard-core networks via the spectral efficiency
//! density `η = ρ(R₁) log₂(1 + SINR)`.

use super::model::{hard_core_density, GuardCenter, IntensityModel};
use super::psi::psi;
use super::{cdf_nonhomog, SystemParams};
use crate::error::{domain, Error, Result};

/// Receiver-centred hard-core approximation with guard radius `r1`.
pub fn receiver_guard_model(params: &SystemParams, parent_density: f64, r1: f64) -> IntensityModel {
    IntensityModel::HardCoreApprox {
        parent_density,
        guard_radius: r1,
        guard_center: GuardCenter::Receiver,
        link_distance: params.link_distance,
    }
}

fn sinr_cdf(params: &SystemParams, model: &IntensityModel, sinr: f64) -> Result<f64> {
    let gamma = params.to_gamma(sinr);
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    cdf_nonhomog(params, psi(model, params.alpha, gamma)?, gamma)
}

/// `F_η(η) = F_SINR(2^{η/ρ(R₁)} − 1)` with the guard zone around the receiver.
pub fn spectral_efficiency_cdf(params: &SystemParams, parent_density: f64, r1: f64, eta: f64) -> Result<f64> {
    params.validate()?;
    if !(eta >= 0.0) {
        return domain(format!("η must be nonnegative, got {eta}"));
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    let rho = hard_core_density(parent_density, r1);
    if rho == 0.0 {
        return Ok(1.0);
    }
    let sinr = (eta / rho * std::f64::consts::LN_2).exp_m1();
    if !sinr.is_finite() {
        return Ok(1.0);
    }
    sinr_cdf(params, &receiver_guard_model(params, parent_density, r1), sinr)
}

/// Largest `η` with `F_η(η; R₁) ≤ target` (the SINR quantile mapped to η).
pub fn eta_at_outage(params: &SystemParams, parent_density: f64, r1: f64, target: f64) -> Result<f64> {
    let model = receiver_guard_model(params, parent_density, r1);
    let rho = hard_core_density(parent_density, r1);
    let (mut lo, mut hi) = (1e-30f64, 1e30f64);
    let flo = sinr_cdf(params, &model, lo)?;
    let fhi = sinr_cdf(params, &model, hi)?;
    if !(flo < target && fhi > target) {
        return Err(Error::Numeric(format!("outage target {target} is not attained (CDF spans {flo} .. {fhi})")));
    }
    while hi / lo - 1.0 > 1e-12 {
        let mid = (lo * hi).sqrt();
        if sinr_cdf(params, &model, mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(rho * lo.ln_1p() / std::f64::consts::LN_2)
}

/// Result of guard-zone optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardOptimum {
    pub radius: f64,
    pub eta: f64,
    /// `(R₁, η(R₁))` on the search grid.
    pub grid: Vec<(f64, f64)>,
    /// Set when η varies by less than 1e-9 relative over the grid.
    pub flat_objective: bool,
}

/// Maximize `η(R₁)` at fixed outage over `R₁ ∈ [0, r_max]`: grid search
/// followed by golden-section refinement around the best grid point.
pub fn optimize_guard_zone(params: &SystemParams, parent_density: f64, target: f64, r_max: f64, grid_points: usize) -> Result<GuardOptimum> {
    params.validate()?;
    if !(target > 0.0 && target < 1.0) {
        return domain(format!("outage target must lie in (0, 1), got {target}"));
    }
    if !(r_max > 0.0) || grid_points < 3 {
        return domain("guard search needs r_max > 0 and at least 3 grid points");
    }
    let objective = |r1: f64| eta_at_outage(params, parent_density, r1, target);
    let step = r_max / (grid_points - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..grid_points)
        .map(|k| {
            let r = k as f64 * step;
            objective(r).map(|e| (r, e))
        })
        .collect::<Result<_>>()?;
    let &(mut best_r, mut best_eta) = grid.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("grid is nonempty");
    let min_eta = grid.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    let flat_objective = !(best_eta > 0.0) || (best_eta - min_eta) <= 1e-9 * best_eta;

    if !flat_objective {
        let (mut a, mut b) = (best_r - step, best_r + step);
        a = a.max(0.0);
        b = b.min(r_max);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (objective(c)?, objective(d)?);
        while b - a > 1e-8 * r_max {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = objective(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = objective(d)?;
            }
        }
        for (r, e) in [(c, fc), (d, fd)] {
            if e > best_eta {
                best_eta = e;
                best_r = r;
            }
        }
    }
    Ok(GuardOptimum { radius: best_r, eta: best_eta, grid, flat_objective })
}
