//! Truncation windows for simulation.
//!
//! Interferers beyond the window radius `R` are not sampled; their mean
//! received power is added to the noise instead. For a deterministic
//! intensity this replaces `∫_R m(r) γg/(1 + γg) dr` in the CDF exponent by
//! its linearization `γ ∫_R m g dr`, an overestimate by at most
//! `δ(γ) = γ² ∫_R m g² dr`. The window is the smallest radius for which
//! `δ(γ)` times the sensitivity of `Q(L, ·)` stays below a CDF tolerance on
//! the whole `γ` range of interest.

use std::f64::consts::PI;

use crate::analytic::model::{hard_core_density, IntensityModel, PathLoss, PowerLawSegment, RadialProfile};
use crate::analytic::{psi, psi_with_pathloss, SystemParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, DEFAULT_REL_TOL};
use crate::special::{ln_factorial, reg_upper_gamma};

/// Default bound on the CDF bias introduced by truncation.
pub const DEFAULT_BIAS_TOL: f64 = 1e-4;
const MAX_RADIUS: f64 = 1e9;

/// Sampling region and the compensating far-field noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimWindow {
    pub outer_radius: f64,
    /// Mean interference power from beyond `outer_radius`.
    pub far_field_power: f64,
}

impl SimWindow {
    /// A window with no far-field compensation.
    pub fn exact(outer_radius: f64) -> Self {
        SimWindow { outer_radius, far_field_power: 0.0 }
    }
}

/// Interferer gain law used by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum Gain {
    PowerLaw(f64),
    Custom(PathLoss),
}

impl Gain {
    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        match self {
            Gain::PowerLaw(alpha) => r.powf(-alpha),
            Gain::Custom(p) => p.gain(r),
        }
    }
}

/// Radial mass function used for tail integrals: for Matérn clusters the mean
/// daughter intensity beyond the origin cluster.
fn mean_radial_mass(model: &IntensityModel, alpha: f64, r: f64) -> Result<f64> {
    Ok(match model {
        IntensityModel::MaternClusterConditioned { parent_density, mean_daughters, .. } => 2.0 * PI * parent_density * mean_daughters * r,
        IntensityModel::HardCoreApprox { parent_density, guard_radius, .. } => {
            // the exact sampler and the approximation share the asymptotic density
            2.0 * PI * hard_core_density(*parent_density, *guard_radius) * r
        }
        IntensityModel::Superposition { members } => {
            let mut m = 0.0;
            for x in members {
                m += mean_radial_mass(x, alpha, r)?;
            }
            m
        }
        other => other.radial_mass(r, alpha).ok_or_else(|| Error::Config(format!("no radial mass for {other:?}")))?,
    })
}

/// Mean-field ψ used to locate the sensitive region of `Q(L, ·)`.
fn mean_psi(model: &IntensityModel, params: &SystemParams, gain: &Gain, gamma: f64) -> Result<f64> {
    let alpha = params.alpha;
    if let Gain::Custom(p) = gain {
        let rho = match model {
            IntensityModel::PiecewisePowerLaw { segments } if segments.len() == 1 && segments[0].exponent == 0.0 => segments[0].density,
            _ => return Err(Error::Config("custom path loss is simulated for homogeneous networks only".into())),
        };
        return psi_with_pathloss(p, rho, gamma);
    }
    Ok(match model {
        IntensityModel::MaternClusterConditioned { parent_density, cluster_radius, mean_daughters } => {
            let origin = IntensityModel::DiskCluster {
                center_distance: 0.0,
                radius: *cluster_radius,
                density: (mean_daughters - 1.0) / (PI * cluster_radius * cluster_radius),
            };
            psi(&origin, alpha, gamma)? + psi(&IntensityModel::homogeneous(parent_density * mean_daughters), alpha, gamma)?
        }
        IntensityModel::Superposition { members } => {
            let mut s = 0.0;
            for m in members {
                s += mean_psi(m, params, gain, gamma)?;
            }
            s
        }
        IntensityModel::RandomCenterGaussianCluster { .. } => 0.0,
        other => psi(other, alpha, gamma)?,
    })
}

fn tail_integral<F: Fn(f64) -> f64>(f: F, r: f64) -> Result<f64> {
    Ok(integrate_to_infinity(f, &[r], r.max(1.0), DEFAULT_REL_TOL)?.value)
}

/// First and second power moments of the interference beyond `r`:
/// `(∫_r m g, ∫_r m g² + clustering excess)`.
fn tail_moments(model: &IntensityModel, alpha: f64, gain: &Gain, r: f64) -> Result<(f64, f64)> {
    let m = |x: f64| mean_radial_mass(model, alpha, x).unwrap_or(f64::NAN);
    let first = tail_integral(|x| m(x) * gain.at(x), r)?;
    let mut second = tail_integral(|x| m(x) * gain.at(x).powi(2), r)?;
    // Cluster processes: a parent at distance u contributes at most
    // μ_d·max(u − R_d, r)^{−α} of far power; its variance adds (μ_d·that)².
    if let Some((rho_p, r_d, mu)) = matern_parts(model) {
        let f = |u: f64| 2.0 * PI * rho_p * u * (mu * gain.at((u - r_d).max(r))).powi(2);
        second += tail_integral(f, (r - r_d).max(0.0))?;
    }
    Ok((first, second))
}

fn matern_parts(model: &IntensityModel) -> Option<(f64, f64, f64)> {
    match model {
        IntensityModel::MaternClusterConditioned { parent_density, cluster_radius, mean_daughters } => {
            Some((*parent_density, *cluster_radius, *mean_daughters))
        }
        IntensityModel::Superposition { members } => members.iter().find_map(matern_parts),
        _ => None,
    }
}

/// Largest radius below which the model must always be sampled exactly.
fn minimum_radius(model: &IntensityModel, alpha: f64) -> f64 {
    let mut r = model.breakpoints(alpha).into_iter().fold(1.0f64, f64::max);
    if let IntensityModel::HardCoreApprox { guard_radius, link_distance, .. } = model {
        r = r.max(link_distance + guard_radius);
    }
    if let Some((_, r_d, _)) = matern_parts(model) {
        r = r.max(r_d);
    }
    if let IntensityModel::Superposition { members } = model {
        for m in members {
            r = r.max(minimum_radius(m, alpha));
        }
    }
    r
}

/// Support radius when the model has (numerically) bounded support.
fn bounded_support(model: &IntensityModel) -> Option<f64> {
    match model {
        IntensityModel::GaussianCluster { center_distance, width, .. } => Some(center_distance + 40.0 * width),
        IntensityModel::RandomCenterGaussianCluster { center, width, .. } => {
            use crate::analytic::model::CenterDistribution as C;
            let far = match center {
                C::PointMass { distance } => *distance,
                C::UniformDisk { radius } => *radius,
                C::Tabulated { radii, .. } => *radii.last()?,
            };
            Some(far + 40.0 * width)
        }
        IntensityModel::DiskCluster { center_distance, radius, .. } => Some(center_distance + radius),
        IntensityModel::PiecewisePowerLaw { segments } => {
            let last: &PowerLawSegment = segments.iter().rfind(|s| s.density > 0.0)?;
            last.outer
        }
        IntensityModel::CustomRadialProfile { profile: RadialProfile::Tabulated { radii, .. } } => radii.last().copied(),
        IntensityModel::Superposition { members } => {
            let mut r: f64 = 0.0;
            for m in members {
                r = r.max(bounded_support(m)?);
            }
            Some(r)
        }
        _ => None,
    }
}

/// Worst-case CDF bias of truncating at `r` over a log grid of `γ ≤ gamma_max`.
pub fn truncation_bias(model: &IntensityModel, params: &SystemParams, gain: &Gain, gamma_max: f64, r: f64) -> Result<f64> {
    let (_, second) = tail_moments(model, params.alpha, gain, r)?;
    let l = params.antennas as u64;
    let mut worst: f64 = 0.0;
    for k in 0..=60 {
        let g = gamma_max * 10f64.powf(-6.0 * (60 - k) as f64 / 60.0);
        let x = mean_psi(model, params, gain, g)? + params.noise * g;
        // sensitivity of Q(L, x) in x is the Poisson pmf at L − 1
        let sens = if x > 0.0 { ((l - 1) as f64 * x.ln() - x - ln_factorial(l - 1)).exp() } else if l == 1 { 1.0 } else { 0.0 };
        worst = worst.max(g * g * second * sens.min(1.0));
    }
    Ok(worst)
}

/// Smallest decade `γ` at which the mean-field CDF exceeds `1 − 1e-9`,
/// a natural upper end for window validation.
pub fn saturation_gamma(model: &IntensityModel, params: &SystemParams, gain: &Gain) -> Result<f64> {
    let mut g = 1e-6;
    while g < 1e40 {
        let x = mean_psi(model, params, gain, g)? + params.noise * g;
        if reg_upper_gamma(params.antennas, x)? < 1e-9 {
            return Ok(g);
        }
        g *= 10.0;
    }
    Err(Error::Config("the SINR distribution does not saturate below γ = 1e40".into()))
}

/// Choose the simulation window for `model` so that truncation bias on the
/// CDF over `γ ≤ gamma_max` stays below `bias_tol`.
pub fn validate_window(model: &IntensityModel, params: &SystemParams, gain: &Gain, gamma_max: f64, bias_tol: f64) -> Result<SimWindow> {
    params.validate()?;
    model.validate(params.alpha)?;
    if !(gamma_max > 0.0) || !(bias_tol > 0.0) {
        return Err(Error::Config("window search needs γ_max > 0 and a positive tolerance".into()));
    }
    let alpha = params.alpha;
    if let (Some(r), Gain::PowerLaw(_)) = (bounded_support(model), gain) {
        if !model.is_random() || matches!(model, IntensityModel::RandomCenterGaussianCluster { .. }) {
            return Ok(SimWindow::exact(r));
        }
    }
    let ok = |r: f64| truncation_bias(model, params, gain, gamma_max, r).map(|b| b <= bias_tol);
    let mut hi = minimum_radius(model, alpha);
    while !ok(hi)? {
        hi *= 2.0;
        if hi > MAX_RADIUS {
            return Err(Error::Config(format!("no window below {MAX_RADIUS:e} m meets the truncation tolerance")));
        }
    }
    let mut lo = (hi / 2.0).max(minimum_radius(model, alpha));
    if lo < hi && !ok(lo)? {
        while hi / lo > 1.01 {
            let mid = 0.5 * (lo + hi);
            if ok(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    } else {
        hi = lo;
    }
    let (far, _) = tail_moments(model, alpha, gain, hi)?;
    Ok(SimWindow { outer_radius: hi, far_field_power: far })
}
