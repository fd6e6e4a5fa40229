//! The interference functional `ψ(γ) = ∫∫ λ(r,θ) r γr^{−α}/(1 + γr^{−α}) dθ dr`.

use std::f64::consts::PI;

use super::model::{hard_core_density, GuardCenter, IntensityModel, PowerLawSegment, RadialProfile};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_points, integrate_to_infinity, Tolerance, DEFAULT_REL_TOL};
use crate::special::{powerlaw_integral_term, Limit};

/// How a ψ value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    ClosedForm,
    Hypergeometric,
    Quadrature,
}

/// `γ/(γ + r^α)`, the per-interferer weight inside ψ.
#[inline]
pub fn interference_weight(r: f64, alpha: f64, gamma: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    1.0 / (1.0 + r.powf(alpha) / gamma)
}

/// Homogeneous-unit-density ψ over the annulus `inner ≤ r < outer` with
/// radial weight `r^{1+κ}`, i.e. `∫ r^{κ+1} γ/(r^α + γ) dr`.
pub fn power_law_annulus(kappa: f64, alpha: f64, gamma: f64, inner: f64, outer: Limit) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if let Limit::Finite(o) = outer {
        if o <= inner {
            return Ok(0.0);
        }
    }
    let analytic = if kappa > -2.0 && (matches!(outer, Limit::Finite(_)) || kappa < alpha - 2.0) {
        let hi = powerlaw_integral_term(kappa, alpha, gamma, outer);
        let lo = powerlaw_integral_term(kappa, alpha, gamma, Limit::Finite(inner));
        match (hi, lo) {
            (Ok(h), Ok(l)) if h - l > 1e-6 * h.abs() => Some(h - l),
            _ => None,
        }
    } else {
        None
    };
    if let Some(v) = analytic {
        return Ok(v);
    }
    let f = |r: f64| r.powf(1.0 + kappa) * interference_weight(r, alpha, gamma);
    let knee = gamma.powf(1.0 / alpha);
    let mut pts = vec![inner];
    match outer {
        Limit::Finite(o) => {
            if knee > inner && knee < o {
                pts.push(knee);
            }
            pts.push(o);
            Ok(integrate_points(f, &pts, Tolerance::relative(DEFAULT_REL_TOL))?.value)
        }
        Limit::Infinite => {
            if kappa >= alpha - 2.0 {
                return domain(format!("∫ r^{{κ+1}}/(1+r^α/γ) diverges at infinity for κ = {kappa}, α = {alpha}"));
            }
            if knee > inner {
                pts.push(knee);
            }
            let scale = knee.max(inner).max(1e-300);
            Ok(integrate_to_infinity(f, &pts, scale, DEFAULT_REL_TOL)?.value)
        }
    }
}

/// Closed-form ψ of `λ(r) = ρ r^ε` on the whole plane:
/// `(2π²ρ/α) csc(π(ε+2)/α) γ^{(ε+2)/α}`.
pub fn psi_power_law(rho: f64, epsilon: f64, alpha: f64, gamma: f64) -> Result<f64> {
    if !(epsilon > -2.0 && epsilon < alpha - 2.0) {
        return domain(format!("power-law ψ needs −2 < ε < α − 2, got ε = {epsilon}"));
    }
    if gamma == 0.0 || rho == 0.0 {
        return Ok(0.0);
    }
    let b = (epsilon + 2.0) / alpha;
    Ok(2.0 * PI * PI * rho / alpha / (PI * b).sin() * gamma.powf(b))
}

/// `dψ/dγ` for `λ(r) = ρ r^ε` on the whole plane.
pub fn psi_power_law_derivative(rho: f64, epsilon: f64, alpha: f64, gamma: f64) -> Result<f64> {
    let b = (epsilon + 2.0) / alpha;
    let psi = psi_power_law(rho, epsilon, alpha, 1.0)?;
    Ok(psi * b * gamma.powf(b - 1.0))
}

fn piecewise_segment(seg: &PowerLawSegment, alpha: f64, gamma: f64) -> Result<f64> {
    if seg.density == 0.0 {
        return Ok(0.0);
    }
    let v = power_law_annulus(seg.exponent, alpha, gamma, seg.inner, Limit::from_option(seg.outer))?;
    Ok(2.0 * PI * seg.density * v)
}

/// `∫_{lo}^{hi} r ϑ(r) γ/(γ + r^α) dr` where `ϑ(r)` is the angle subtended
/// inside the disk `B(c, R)`, `|c| = d`.
fn arc_integral(lo: f64, hi: f64, d: f64, radius: f64, alpha: f64, gamma: f64, outside: bool) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    let f = |r: f64| {
        let inside = super::model::disk_arc_angle(r, d, radius);
        let angle = if outside { 2.0 * PI - inside } else { inside };
        r * angle * interference_weight(r, alpha, gamma)
    };
    let mut pts = vec![lo];
    let knee = gamma.powf(1.0 / alpha);
    if knee > lo && knee < hi {
        pts.push(knee);
    }
    if d > lo && d < hi {
        pts.push(d);
    }
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    Ok(integrate_points(f, &pts, Tolerance::relative(DEFAULT_REL_TOL))?.value)
}

/// Contribution `ζ` of a disk cluster of radius `radius` and density `density`
/// centred at distance `d` from the receiver.
pub fn zeta_disk(d: f64, radius: f64, density: f64, alpha: f64, gamma: f64) -> Result<f64> {
    if !(d >= 0.0) || !(radius > 0.0) {
        return domain(format!("zeta_disk needs d ≥ 0 and R_d > 0, got d = {d}, R_d = {radius}"));
    }
    if gamma == 0.0 || density == 0.0 {
        return Ok(0.0);
    }
    if d >= radius {
        Ok(density * arc_integral(d - radius, d + radius, d, radius, alpha, gamma, false)?)
    } else {
        let full = 2.0 * PI * powerlaw_integral_term(0.0, alpha, gamma, Limit::Finite(radius - d))?;
        let arc = if d > 0.0 { arc_integral(radius - d, radius + d, d, radius, alpha, gamma, false)? } else { 0.0 };
        Ok(density * (full + arc))
    }
}

/// ψ of the Rician-distance Gaussian cluster with centre at distance `x0`.
pub fn psi_gaussian_cluster(x0: f64, width: f64, mean_points: f64, alpha: f64, gamma: f64) -> Result<f64> {
    if gamma == 0.0 || mean_points == 0.0 {
        return Ok(0.0);
    }
    let model = IntensityModel::GaussianCluster { center_distance: x0, width, mean_points };
    let mut pts = vec![0.0];
    pts.extend(model.breakpoints(alpha));
    let knee = gamma.powf(1.0 / alpha);
    if knee < x0 + 40.0 * width {
        pts.push(knee);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let end = x0 + 40.0 * width;
    pts.retain(|p| *p <= end);
    if *pts.last().unwrap() < end {
        pts.push(end);
    }
    let f = |r: f64| mean_points * super::model::rician_pdf(r, x0, width) * interference_weight(r, alpha, gamma);
    Ok(integrate_points(f, &pts, Tolerance::relative(DEFAULT_REL_TOL))?.value)
}

fn psi_strip(a: f64, rho: f64, alpha: f64, gamma: f64) -> Result<f64> {
    let inner = 2.0 * PI * powerlaw_integral_term(0.0, alpha, gamma, Limit::Finite(a))?;
    let f = |r: f64| 4.0 * r * (a / r).min(1.0).asin() * interference_weight(r, alpha, gamma);
    let knee = gamma.powf(1.0 / alpha);
    let mut pts = vec![a];
    if knee > a {
        pts.push(knee);
    }
    let tail = integrate_to_infinity(f, &pts, knee.max(a), DEFAULT_REL_TOL)?.value;
    Ok(rho * (inner + tail))
}

fn psi_hard_core(parent_density: f64, guard_radius: f64, center: GuardCenter, r_t: f64, alpha: f64, gamma: f64) -> Result<f64> {
    let rho = hard_core_density(parent_density, guard_radius);
    if rho == 0.0 {
        return Ok(0.0);
    }
    let r1 = guard_radius;
    let homog = |lo: f64, hi: Limit| power_law_annulus(0.0, alpha, gamma, lo, hi).map(|v| 2.0 * PI * v);
    if r1 == 0.0 {
        return Ok(rho * homog(0.0, Limit::Infinite)?);
    }
    let v = match center {
        GuardCenter::Receiver => homog(r1, Limit::Infinite)?,
        GuardCenter::Transmitter => {
            let outer = homog(r_t + r1, Limit::Infinite)?;
            let ring = arc_integral((r_t - r1).abs(), r_t + r1, r_t, r1, alpha, gamma, true)?;
            if r_t >= r1 {
                homog(0.0, Limit::Finite(r_t - r1))? + ring + outer
            } else {
                ring + outer
            }
        }
    };
    Ok(rho * v)
}

fn psi_profile(profile: &RadialProfile, alpha: f64, gamma: f64) -> Result<f64> {
    let knee = gamma.powf(1.0 / alpha);
    let mut pts = profile.breakpoints(alpha);
    let start = match profile {
        RadialProfile::Tabulated { radii, .. } => radii[0],
        RadialProfile::DispersiveExponential { .. } => 1.0,
        RadialProfile::Equivalent { .. } => pts.first().copied().unwrap_or(0.0),
    };
    pts.push(start);
    if knee > start {
        pts.push(knee);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |r: f64| profile.radial_mass(r, alpha) * interference_weight(r, alpha, gamma);
    match profile.support_end() {
        Some(end) => {
            pts.retain(|p| *p <= end);
            Ok(integrate_points(f, &pts, Tolerance::relative(DEFAULT_REL_TOL))?.value)
        }
        None => {
            let scale = knee.max(start).max(1.0);
            Ok(integrate_to_infinity(f, &pts, scale, DEFAULT_REL_TOL)?.value)
        }
    }
}

/// Evaluate `ψ(γ)` for a deterministic model. Cox models have no single ψ and
/// are rejected; use [`super::cdf`] for them.
pub fn psi(model: &IntensityModel, alpha: f64, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return domain(format!("ψ needs γ ≥ 0, got {gamma}"));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if gamma.is_infinite() {
        return Ok(f64::INFINITY);
    }
    match model {
        IntensityModel::PiecewisePowerLaw { segments } => {
            let mut total = 0.0;
            for s in segments {
                total += piecewise_segment(s, alpha, gamma)?;
            }
            Ok(total)
        }
        IntensityModel::GaussianCluster { center_distance, width, mean_points } => {
            psi_gaussian_cluster(*center_distance, *width, *mean_points, alpha, gamma)
        }
        IntensityModel::DiskCluster { center_distance, radius, density } => zeta_disk(*center_distance, *radius, *density, alpha, gamma),
        IntensityModel::Strip { half_width, density } => psi_strip(*half_width, *density, alpha, gamma),
        IntensityModel::HardCoreApprox { parent_density, guard_radius, guard_center, link_distance } => {
            psi_hard_core(*parent_density, *guard_radius, *guard_center, *link_distance, alpha, gamma)
        }
        IntensityModel::CustomRadialProfile { profile } => psi_profile(profile, alpha, gamma),
        IntensityModel::Superposition { members } => {
            let mut total = 0.0;
            for m in members {
                total += psi(m, alpha, gamma)?;
            }
            Ok(total)
        }
        IntensityModel::RandomCenterGaussianCluster { .. } | IntensityModel::MaternClusterConditioned { .. } => Err(Error::Config(
            "ψ is random for Cox models; evaluate the CDF instead".into(),
        )),
    }
}

/// Which evaluation route [`psi`] takes for `model`.
pub fn strategy(model: &IntensityModel) -> Strategy {
    match model {
        IntensityModel::PiecewisePowerLaw { segments } if segments.len() == 1 && segments[0].inner == 0.0 && segments[0].outer.is_none() => {
            Strategy::ClosedForm
        }
        IntensityModel::PiecewisePowerLaw { .. } => Strategy::Hypergeometric,
        IntensityModel::DiskCluster { center_distance, .. } if *center_distance == 0.0 => Strategy::Hypergeometric,
        IntensityModel::HardCoreApprox { guard_center: GuardCenter::Receiver, .. } => Strategy::Hypergeometric,
        _ => Strategy::Quadrature,
    }
}

/// `ψ(γ)` by direct quadrature of the radial mass, independent of the
/// per-variant closed forms.
pub fn psi_by_quadrature(model: &IntensityModel, alpha: f64, gamma: f64, rel_tol: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if model.is_random() {
        return Err(Error::Config("ψ is random for Cox models".into()));
    }
    let knee = gamma.powf(1.0 / alpha);
    let mut pts = vec![0.0];
    pts.extend(model.breakpoints(alpha));
    pts.push(knee);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    // Geometric refinement toward the origin for integrable r^{1+ε} behaviour.
    let first = pts.iter().copied().find(|p| *p > 0.0).unwrap_or(1.0);
    for k in 1..=30 {
        pts.push(first * 0.5f64.powi(k));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |r: f64| model.radial_mass(r, alpha).unwrap_or(0.0) * interference_weight(r, alpha, gamma);
    let tol = Tolerance::relative(rel_tol);
    match model.support_end() {
        Some(end) => {
            pts.retain(|p| *p <= end);
            if *pts.last().unwrap() < end {
                pts.push(end);
            }
            Ok(integrate_points(f, &pts, tol)?.value)
        }
        None => {
            let scale = pts.last().copied().unwrap_or(1.0).max(knee);
            Ok(integrate_to_infinity(f, &pts, scale, rel_tol)?.value)
        }
    }
}
