//! Interferer intensity models.
//!
//! Every deterministic variant exposes its *radial mass* `m(r)`, the
//! expected number of interferers per unit distance from the origin,
//! `m(r) = r ∫₀^{2π} λ(r, θ) dθ`. The interference functional is then
//! `ψ(γ) = ∫ m(r) γ/(γ + r^α) dr`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One radial band `inner ≤ r < outer` with intensity `density · r^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSegment {
    pub inner: f64,
    /// `None` extends the segment to infinity.
    #[serde(default)]
    pub outer: Option<f64>,
    pub density: f64,
    #[serde(default)]
    pub exponent: f64,
}

/// Distribution of the distance `|X₀|` of a random cluster centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CenterDistribution {
    PointMass { distance: f64 },
    /// Centre uniform in a disk of radius `radius` around the receiver.
    UniformDisk { radius: f64 },
    /// Piecewise-linear radial density through `(radii[i], density[i])`.
    Tabulated { radii: Vec<f64>, density: Vec<f64> },
}

/// Where the guard zone of the hard-core approximation is centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardCenter {
    Transmitter,
    Receiver,
}

/// Monotone decreasing path-loss function `φ(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathLoss {
    /// `r^{−exponent}`.
    PowerLaw { exponent: f64 },
    /// `e^{−decay·r}`.
    Exponential { decay: f64 },
    /// `(1 + r)^{−exponent}`.
    Bounded { exponent: f64 },
    /// Log-linear interpolation of `(radii[i], gain[i])`, extended beyond the
    /// last knot with the final slope.
    Tabulated { radii: Vec<f64>, gain: Vec<f64> },
}

/// Angular-integrated intensity `p(r) = ∫ λ(r, θ) dθ` for custom profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// Piecewise-linear `p(r)` through the knots, zero outside them.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
    /// `λ_S(r) = ρ α² ln(r) / (ν² r²)` on `r ≥ 1`: a homogeneous network under
    /// path loss `e^{−νr}` seen through `r^{−α}`.
    DispersiveExponential { density: f64, decay: f64 },
    /// Homogeneous density `base_density` under `pathloss`, mapped to the
    /// equivalent intensity for `r^{−α}` path loss.
    Equivalent { base_density: f64, pathloss: PathLoss },
}

/// Spatial model for the interferers seen by the receiver at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IntensityModel {
    PiecewisePowerLaw { segments: Vec<PowerLawSegment> },
    GaussianCluster { center_distance: f64, width: f64, mean_points: f64 },
    RandomCenterGaussianCluster { center: CenterDistribution, width: f64, mean_points: f64 },
    DiskCluster { center_distance: f64, radius: f64, density: f64 },
    Strip { half_width: f64, density: f64 },
    HardCoreApprox { parent_density: f64, guard_radius: f64, guard_center: GuardCenter, link_distance: f64 },
    MaternClusterConditioned { parent_density: f64, cluster_radius: f64, mean_daughters: f64 },
    CustomRadialProfile { profile: RadialProfile },
    Superposition { members: Vec<IntensityModel> },
}

fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return config(format!("{name} must be finite and nonnegative, got {v}"));
    }
    Ok(())
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return config(format!("{name} must be finite and positive, got {v}"));
    }
    Ok(())
}

fn check_knots(name: &str, xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return config(format!("{name}: need at least two knots with matching lengths"));
    }
    if xs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || xs.windows(2).any(|w| !(w[0] < w[1])) {
        return config(format!("{name}: radii must be nonnegative and strictly increasing"));
    }
    Ok(())
}

/// Effective Matérn type-II density `(1 − e^{−ρ_p π R₁²}) / (π R₁²)`.
pub fn hard_core_density(parent_density: f64, guard_radius: f64) -> f64 {
    let x = parent_density * PI * guard_radius * guard_radius;
    if x < 1e-12 {
        parent_density * (1.0 - 0.5 * x)
    } else {
        parent_density * (-(-x).exp_m1()) / x
    }
}

/// Length of the arc of the circle `|z| = r` inside the disk `B(c, R)` with
/// `|c| = d`, divided by `r`.
pub fn disk_arc_angle(r: f64, d: f64, radius: f64) -> f64 {
    if r <= 0.0 {
        return if d < radius { 2.0 * PI } else { 0.0 };
    }
    if r + d <= radius {
        return 2.0 * PI;
    }
    if r >= d + radius || r <= d - radius {
        return 0.0;
    }
    let c = ((r * r + d * d - radius * radius) / (2.0 * r * d)).clamp(-1.0, 1.0);
    2.0 * c.acos()
}

impl PathLoss {
    pub fn validate(&self) -> Result<()> {
        match self {
            PathLoss::PowerLaw { exponent } | PathLoss::Bounded { exponent } => check_pos("path-loss exponent", *exponent),
            PathLoss::Exponential { decay } => check_pos("decay", *decay),
            PathLoss::Tabulated { radii, gain } => {
                check_knots("tabulated path loss", radii, gain)?;
                if gain.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
                    return config("tabulated path loss gains must be positive");
                }
                if gain.windows(2).any(|w| !(w[1] < w[0])) {
                    return Err(Error::Domain("tabulated path loss is not strictly decreasing".into()));
                }
                Ok(())
            }
        }
    }

    /// `ln φ(r)`.
    pub fn ln_gain(&self, r: f64) -> f64 {
        match self {
            PathLoss::PowerLaw { exponent } => -exponent * r.ln(),
            PathLoss::Exponential { decay } => -decay * r,
            PathLoss::Bounded { exponent } => -exponent * r.ln_1p(),
            PathLoss::Tabulated { radii, gain } => {
                let n = radii.len();
                let seg = if r <= radii[0] {
                    0
                } else {
                    radii.partition_point(|x| *x <= r).min(n - 1) - 1
                };
                let (x0, x1) = (radii[seg], radii[seg + 1]);
                let (y0, y1) = (gain[seg].ln(), gain[seg + 1].ln());
                y0 + (y1 - y0) * (r - x0) / (x1 - x0)
            }
        }
    }

    pub fn gain(&self, r: f64) -> f64 {
        self.ln_gain(r).exp()
    }

    /// Distance at which `ln φ(r) = ln_target`.
    pub fn inverse_ln(&self, ln_target: f64) -> Result<f64> {
        match self {
            PathLoss::PowerLaw { exponent } => Ok((-ln_target / exponent).exp()),
            PathLoss::Exponential { decay } => Ok((-ln_target / decay).max(0.0)),
            PathLoss::Bounded { exponent } => Ok((-ln_target / exponent).exp_m1().max(0.0)),
            PathLoss::Tabulated { radii, gain } => {
                if ln_target >= self.ln_gain(radii[0]) {
                    return Ok(radii[0]);
                }
                // ln φ is piecewise linear and decreasing: locate the segment.
                let n = radii.len();
                let k = gain.partition_point(|g| g.ln() > ln_target).clamp(1, n - 1);
                let (x0, y0) = (radii[k - 1], gain[k - 1].ln());
                let slope = (gain[k].ln() - y0) / (radii[k] - x0);
                Ok(x0 + (ln_target - y0) / slope)
            }
        }
    }

    /// `d ln φ / dr`.
    pub fn ln_gain_slope(&self, r: f64) -> f64 {
        match self {
            PathLoss::PowerLaw { exponent } => -exponent / r,
            PathLoss::Exponential { decay } => -decay,
            PathLoss::Bounded { exponent } => -exponent / (1.0 + r),
            PathLoss::Tabulated { radii, gain } => {
                let n = radii.len();
                let k = radii.partition_point(|x| *x <= r).clamp(1, n - 1);
                (gain[k].ln() - gain[k - 1].ln()) / (radii[k] - radii[k - 1])
            }
        }
    }

    /// Sample `φ` on a log grid and reject non-monotone behaviour.
    pub fn check_monotone(&self) -> Result<()> {
        self.validate()?;
        let mut prev = f64::INFINITY;
        for k in 0..=400 {
            let r = 10f64.powf(-3.0 + 9.0 * k as f64 / 400.0);
            let v = self.ln_gain(r);
            if !(v < prev) {
                return Err(Error::Domain(format!("path loss is not strictly decreasing near r = {r}")));
            }
            prev = v;
        }
        Ok(())
    }
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Tabulated { radii, values } => {
                check_knots("tabulated profile", radii, values)?;
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return config("tabulated profile values must be nonnegative");
                }
                Ok(())
            }
            RadialProfile::DispersiveExponential { density, decay } => {
                check_nonneg("density", *density)?;
                check_pos("decay", *decay)
            }
            RadialProfile::Equivalent { base_density, pathloss } => {
                check_nonneg("base density", *base_density)?;
                pathloss.check_monotone()
            }
        }
    }

    /// Radial mass `r·p(r)` of the profile under `r^{−α}` path loss.
    pub fn radial_mass(&self, r: f64, alpha: f64) -> f64 {
        match self {
            RadialProfile::Tabulated { radii, values } => {
                let n = radii.len();
                if r < radii[0] || r > radii[n - 1] {
                    return 0.0;
                }
                let k = radii.partition_point(|x| *x <= r).clamp(1, n - 1);
                let (x0, x1) = (radii[k - 1], radii[k]);
                let t = (r - x0) / (x1 - x0);
                r * (values[k - 1] + t * (values[k] - values[k - 1]))
            }
            RadialProfile::DispersiveExponential { density, decay } => {
                if r < 1.0 {
                    0.0
                } else {
                    2.0 * PI * density * alpha * alpha * r.ln() / (decay * decay * r)
                }
            }
            RadialProfile::Equivalent { base_density, pathloss } => equivalent_radial_mass(*base_density, pathloss, alpha, r),
        }
    }

    /// Knots and support edges, used as quadrature breakpoints.
    pub fn breakpoints(&self, alpha: f64) -> Vec<f64> {
        match self {
            RadialProfile::Tabulated { radii, .. } => radii.clone(),
            RadialProfile::DispersiveExponential { .. } => vec![1.0],
            RadialProfile::Equivalent { pathloss, .. } => {
                let mut pts = vec![(-pathloss.ln_gain(0.0) / alpha).exp()];
                if let PathLoss::Tabulated { gain, .. } = pathloss {
                    pts.extend(gain.iter().map(|g| g.powf(-1.0 / alpha)));
                }
                pts.retain(|x| x.is_finite());
                pts
            }
        }
    }

    /// Outer edge of the support, if finite.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            RadialProfile::Tabulated { radii, .. } => radii.last().copied(),
            _ => None,
        }
    }
}

/// Radial mass at equivalent distance `s` of a homogeneous network of density
/// `rho` under path loss `φ`: points at distance `r` are mapped to
/// `s = φ(r)^{−1/α}`, so `m_S(s) = 2πρ r(s) dr/ds`.
pub fn equivalent_radial_mass(rho: f64, pathloss: &PathLoss, alpha: f64, s: f64) -> f64 {
    if !(s > 0.0) || rho == 0.0 {
        return 0.0;
    }
    let ln_s = s.ln();
    match pathloss {
        PathLoss::Exponential { decay } => {
            if s < 1.0 {
                0.0
            } else {
                2.0 * PI * rho * alpha * alpha * ln_s / (decay * decay * s)
            }
        }
        PathLoss::PowerLaw { exponent } => {
            // r = s^{α/β}
            let q = alpha / exponent;
            2.0 * PI * rho * q * (ln_s * (2.0 * q - 1.0)).exp()
        }
        PathLoss::Bounded { exponent } => {
            // r = s^{α/β} − 1
            let q = alpha / exponent;
            let sq = (q * ln_s).exp();
            if sq <= 1.0 {
                0.0
            } else {
                2.0 * PI * rho * (sq - 1.0) * q * sq / s
            }
        }
        PathLoss::Tabulated { .. } => {
            let s_min = (-pathloss.ln_gain(0.0) / alpha).exp();
            if s <= s_min {
                return 0.0;
            }
            let Ok(r) = pathloss.inverse_ln(-alpha * ln_s) else { return f64::NAN };
            // ln φ(r(s)) = −α ln s  ⇒  dr/ds = −α / (s · d ln φ/dr)
            let drds = -alpha / (s * pathloss.ln_gain_slope(r));
            2.0 * PI * rho * r * drds
        }
    }
}

impl IntensityModel {
    /// Homogeneous PPP of density `rho`.
    pub fn homogeneous(rho: f64) -> Self {
        Self::power_law(rho, 0.0)
    }

    /// `λ(r) = ρ r^ε` on the whole plane.
    pub fn power_law(rho: f64, epsilon: f64) -> Self {
        IntensityModel::PiecewisePowerLaw {
            segments: vec![PowerLawSegment { inner: 0.0, outer: None, density: rho, exponent: epsilon }],
        }
    }

    /// True for models whose intensity is itself random (Cox models).
    pub fn is_random(&self) -> bool {
        match self {
            IntensityModel::RandomCenterGaussianCluster { .. } | IntensityModel::MaternClusterConditioned { .. } => true,
            IntensityModel::Superposition { members } => members.iter().any(|m| m.is_random()),
            _ => false,
        }
    }

    /// Check parameter invariants, including the integrability conditions
    /// for path-loss exponent `alpha`.
    pub fn validate(&self, alpha: f64) -> Result<()> {
        if !(alpha > 2.0) {
            return config(format!("path-loss exponent must exceed 2, got {alpha}"));
        }
        match self {
            IntensityModel::PiecewisePowerLaw { segments } => {
                if segments.is_empty() {
                    return config("piecewise power law needs at least one segment");
                }
                let mut prev_outer = 0.0;
                for (k, s) in segments.iter().enumerate() {
                    check_nonneg("segment density", s.density)?;
                    check_nonneg("segment inner radius", s.inner)?;
                    if !s.exponent.is_finite() {
                        return config("segment exponent must be finite");
                    }
                    if s.inner < prev_outer {
                        return config(format!("segment {k} overlaps the previous one"));
                    }
                    match s.outer {
                        Some(o) => {
                            if !(o > s.inner) || !o.is_finite() {
                                return config(format!("segment {k}: outer radius must exceed inner radius"));
                            }
                            prev_outer = o;
                        }
                        None => {
                            if k + 1 != segments.len() {
                                return config("only the last segment may extend to infinity");
                            }
                            if s.density > 0.0 && !(s.exponent < alpha - 2.0) {
                                return config(format!(
                                    "unbounded segment needs exponent < α − 2 = {}, got {}",
                                    alpha - 2.0,
                                    s.exponent
                                ));
                            }
                        }
                    }
                    if s.inner == 0.0 && s.density > 0.0 && !(s.exponent > -2.0) {
                        return config(format!("segment starting at the origin needs exponent > −2, got {}", s.exponent));
                    }
                }
                Ok(())
            }
            IntensityModel::GaussianCluster { center_distance, width, mean_points } => {
                check_nonneg("center distance", *center_distance)?;
                check_pos("cluster width", *width)?;
                check_nonneg("mean points", *mean_points)
            }
            IntensityModel::RandomCenterGaussianCluster { center, width, mean_points } => {
                check_pos("cluster width", *width)?;
                check_nonneg("mean points", *mean_points)?;
                center.validate()
            }
            IntensityModel::DiskCluster { center_distance, radius, density } => {
                check_nonneg("center distance", *center_distance)?;
                check_pos("cluster radius", *radius)?;
                check_nonneg("cluster density", *density)
            }
            IntensityModel::Strip { half_width, density } => {
                check_pos("strip half width", *half_width)?;
                check_nonneg("strip density", *density)
            }
            IntensityModel::HardCoreApprox { parent_density, guard_radius, link_distance, .. } => {
                check_nonneg("parent density", *parent_density)?;
                check_nonneg("guard radius", *guard_radius)?;
                check_pos("link distance", *link_distance)
            }
            IntensityModel::MaternClusterConditioned { parent_density, cluster_radius, mean_daughters } => {
                check_nonneg("parent density", *parent_density)?;
                check_pos("cluster radius", *cluster_radius)?;
                if !(*mean_daughters >= 1.0) || !mean_daughters.is_finite() {
                    return config(format!("mean daughters must be at least 1, got {mean_daughters}"));
                }
                Ok(())
            }
            IntensityModel::CustomRadialProfile { profile } => profile.validate(),
            IntensityModel::Superposition { members } => members.iter().try_for_each(|m| m.validate(alpha)),
        }
    }

    /// Radial mass `m(r)` of a deterministic model; `None` for Cox models.
    pub fn radial_mass(&self, r: f64, alpha: f64) -> Option<f64> {
        if r < 0.0 {
            return Some(0.0);
        }
        let m = match self {
            IntensityModel::PiecewisePowerLaw { segments } => {
                let mut m = 0.0;
                for s in segments {
                    let inside = r >= s.inner && s.outer.is_none_or(|o| r < o);
                    if inside && s.density > 0.0 {
                        m += 2.0 * PI * s.density * r.powf(1.0 + s.exponent);
                    }
                }
                m
            }
            IntensityModel::GaussianCluster { center_distance, width, mean_points } => {
                mean_points * rician_pdf(r, *center_distance, *width)
            }
            IntensityModel::DiskCluster { center_distance, radius, density } => {
                density * r * disk_arc_angle(r, *center_distance, *radius)
            }
            IntensityModel::Strip { half_width, density } => {
                if r <= *half_width {
                    2.0 * PI * density * r
                } else {
                    4.0 * density * r * (half_width / r).asin()
                }
            }
            IntensityModel::HardCoreApprox { parent_density, guard_radius, guard_center, link_distance } => {
                let rho = hard_core_density(*parent_density, *guard_radius);
                let d = match guard_center {
                    GuardCenter::Transmitter => *link_distance,
                    GuardCenter::Receiver => 0.0,
                };
                if *guard_radius == 0.0 {
                    2.0 * PI * rho * r
                } else {
                    rho * r * (2.0 * PI - disk_arc_angle(r, d, *guard_radius))
                }
            }
            IntensityModel::CustomRadialProfile { profile } => profile.radial_mass(r, alpha),
            IntensityModel::Superposition { members } => {
                let mut m = 0.0;
                for member in members {
                    m += member.radial_mass(r, alpha)?;
                }
                m
            }
            IntensityModel::RandomCenterGaussianCluster { .. } | IntensityModel::MaternClusterConditioned { .. } => {
                return None
            }
        };
        Some(m)
    }

    /// Radii where the radial mass has kinks or support edges.
    pub fn breakpoints(&self, alpha: f64) -> Vec<f64> {
        let mut pts = match self {
            IntensityModel::PiecewisePowerLaw { segments } => {
                segments.iter().flat_map(|s| std::iter::once(s.inner).chain(s.outer)).collect()
            }
            IntensityModel::GaussianCluster { center_distance, width, .. } => {
                let mut v = vec![*center_distance];
                for k in [2.0, 5.0, 10.0, 40.0] {
                    v.push(center_distance + k * width);
                    if *center_distance > k * width {
                        v.push(center_distance - k * width);
                    }
                }
                v
            }
            IntensityModel::DiskCluster { center_distance, radius, .. } => {
                vec![(center_distance - radius).abs(), center_distance + radius]
            }
            IntensityModel::Strip { half_width, .. } => vec![*half_width],
            IntensityModel::HardCoreApprox { guard_radius, guard_center, link_distance, .. } => match guard_center {
                GuardCenter::Transmitter => vec![(link_distance - guard_radius).abs(), link_distance + guard_radius],
                GuardCenter::Receiver => vec![*guard_radius],
            },
            IntensityModel::CustomRadialProfile { profile } => profile.breakpoints(alpha),
            IntensityModel::Superposition { members } => members.iter().flat_map(|m| m.breakpoints(alpha)).collect(),
            _ => Vec::new(),
        };
        pts.retain(|x| x.is_finite() && *x > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Outer edge of the support, `None` when unbounded.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            IntensityModel::PiecewisePowerLaw { segments } => {
                let last = segments.iter().rfind(|s| s.density > 0.0)?;
                last.outer
            }
            IntensityModel::DiskCluster { center_distance, radius, .. } => Some(center_distance + radius),
            IntensityModel::CustomRadialProfile { profile } => profile.support_end(),
            IntensityModel::Superposition { members } => {
                let mut end: f64 = 0.0;
                for m in members {
                    end = end.max(m.support_end()?);
                }
                Some(end)
            }
            _ => None,
        }
    }

    /// The model with every density multiplied by `beta` (`λ = β λ_c`).
    pub fn scaled(&self, beta: f64) -> Result<IntensityModel> {
        check_nonneg("scale factor", beta)?;
        Ok(match self {
            IntensityModel::PiecewisePowerLaw { segments } => IntensityModel::PiecewisePowerLaw {
                segments: segments.iter().map(|s| PowerLawSegment { density: s.density * beta, ..s.clone() }).collect(),
            },
            IntensityModel::GaussianCluster { center_distance, width, mean_points } => IntensityModel::GaussianCluster {
                center_distance: *center_distance,
                width: *width,
                mean_points: mean_points * beta,
            },
            IntensityModel::RandomCenterGaussianCluster { center, width, mean_points } => {
                IntensityModel::RandomCenterGaussianCluster { center: center.clone(), width: *width, mean_points: mean_points * beta }
            }
            IntensityModel::DiskCluster { center_distance, radius, density } => {
                IntensityModel::DiskCluster { center_distance: *center_distance, radius: *radius, density: density * beta }
            }
            IntensityModel::Strip { half_width, density } => IntensityModel::Strip { half_width: *half_width, density: density * beta },
            IntensityModel::CustomRadialProfile { profile } => IntensityModel::CustomRadialProfile {
                profile: match profile {
                    RadialProfile::Tabulated { radii, values } => {
                        RadialProfile::Tabulated { radii: radii.clone(), values: values.iter().map(|v| v * beta).collect() }
                    }
                    RadialProfile::DispersiveExponential { density, decay } => {
                        RadialProfile::DispersiveExponential { density: density * beta, decay: *decay }
                    }
                    RadialProfile::Equivalent { base_density, pathloss } => {
                        RadialProfile::Equivalent { base_density: base_density * beta, pathloss: pathloss.clone() }
                    }
                },
            },
            IntensityModel::Superposition { members } => {
                IntensityModel::Superposition { members: members.iter().map(|m| m.scaled(beta)).collect::<Result<_>>()? }
            }
            IntensityModel::HardCoreApprox { .. } | IntensityModel::MaternClusterConditioned { .. } => {
                return config("hard-core and Matérn cluster models do not scale linearly in density")
            }
        })
    }
}

impl CenterDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            CenterDistribution::PointMass { distance } => check_nonneg("center distance", *distance),
            CenterDistribution::UniformDisk { radius } => check_pos("center disk radius", *radius),
            CenterDistribution::Tabulated { radii, density } => {
                check_knots("center density", radii, density)?;
                if density.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return config("center density values must be nonnegative");
                }
                let mass: f64 = radii
                    .windows(2)
                    .zip(density.windows(2))
                    .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
                    .sum();
                if (mass - 1.0).abs() > 1e-6 {
                    return Err(Error::Domain(format!("center density integrates to {mass}, not 1")));
                }
                Ok(())
            }
        }
    }
}

/// Rician density of the distance to a point displaced from `|X₀| = x0` by a
/// circular Gaussian with per-coordinate standard deviation `nu`.
pub fn rician_pdf(r: f64, x0: f64, nu: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let v2 = nu * nu;
    let arg = r * x0 / v2;
    let scaled = crate::special::bessel_i0_scaled(arg).unwrap_or(0.0);
    let d = r - x0;
    r / v2 * (-d * d / (2.0 * v2)).exp() * scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_finite, integrate_semi_infinite_scaled};

    #[test]
    fn rician_integrates_to_one() {
        for x0 in [0.0, 50.0, 300.0, 5000.0] {
            let r = integrate_semi_infinite_scaled(|r| rician_pdf(r, x0, 100.0), 0.0, 100.0 + x0, 1e-10).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "x0={x0}: {}", r.value);
        }
    }

    #[test]
    fn disk_arc_mass_equals_area() {
        for (d, rad) in [(0.0, 300.0), (100.0, 300.0), (400.0, 300.0), (301.0, 300.0)] {
            let m = IntensityModel::DiskCluster { center_distance: d, radius: rad, density: 1.0 };
            let r = integrate_finite(|r| m.radial_mass(r, 4.0).unwrap(), 0.0, d + rad, 1e-10).unwrap();
            assert!((r.value / (PI * rad * rad) - 1.0).abs() < 1e-7, "d={d}: {}", r.value);
        }
    }

    #[test]
    fn strip_mass_matches_band_aid_area() {
        let (a, big) = (25.0, 2000.0);
        let m = IntensityModel::Strip { half_width: a, density: 1.0 };
        let r = integrate_finite(|r| m.radial_mass(r, 4.0).unwrap(), 0.0, big, 1e-11).unwrap();
        let area = 2.0 * big * big * (a / big).asin() + 2.0 * a * (big * big - a * a).sqrt();
        assert!((r.value / area - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hard_core_density_limits() {
        assert!((hard_core_density(0.05, 0.0) - 0.05).abs() < 1e-15);
        let x: f64 = 0.05 * PI * 100.0;
        assert!((hard_core_density(0.05, 10.0) - (1.0 - (-x).exp()) / (PI * 100.0)).abs() < 1e-15);
    }

    #[test]
    fn validation_catches_divergent_power_law() {
        assert!(IntensityModel::power_law(1.0, 2.5).validate(4.0).is_err());
        assert!(IntensityModel::power_law(1.0, -2.0).validate(4.0).is_err());
        assert!(IntensityModel::power_law(1.0, -0.5).validate(4.0).is_ok());
        assert!(IntensityModel::homogeneous(1.0).validate(2.0).is_err());
    }

    #[test]
    fn equivalent_mass_of_power_law_is_power_law() {
        // exponent β = α gives the identity map
        let pl = PathLoss::PowerLaw { exponent: 4.0 };
        for s in [0.5, 3.0, 70.0] {
            assert!((equivalent_radial_mass(2e-3, &pl, 4.0, s) - 2.0 * PI * 2e-3 * s).abs() < 1e-15);
        }
        // numeric inversion path on a tabulated copy of e^{−νr}
        let nu: f64 = 0.01;
        let radii: Vec<f64> = (0..=400).map(|k| k as f64 * 10.0).collect();
        let gain: Vec<f64> = radii.iter().map(|r| (-nu * r).exp()).collect();
        let tab = PathLoss::Tabulated { radii, gain };
        let exp = PathLoss::Exponential { decay: nu };
        for s in [1.5, 10.0, 200.0] {
            let a = equivalent_radial_mass(1e-5, &tab, 4.0, s);
            let b = equivalent_radial_mass(1e-5, &exp, 4.0, s);
            assert!((a / b - 1.0).abs() < 1e-6, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn dispersive_profile_matches_worked_example() {
        let p = RadialProfile::DispersiveExponential { density: 1e-5, decay: 0.01 };
        for r in [2.0f64, 50.0, 1e3] {
            // λ_S = 1.6 ln r / r², radial mass = 2π r λ_S
            let expected = 2.0 * PI * r * 1.6 * r.ln() / (r * r);
            assert!((p.radial_mass(r, 4.0) / expected - 1.0).abs() < 1e-12);
        }
        assert_eq!(p.radial_mass(0.5, 4.0), 0.0);
    }

    #[test]
    fn non_monotone_tabulated_path_loss_rejected() {
        let bad = PathLoss::Tabulated { radii: vec![0.0, 1.0, 2.0], gain: vec![1.0, 0.5, 0.7] };
        assert!(bad.check_monotone().is_err());
    }

    #[test]
    fn config_round_trip() {
        let m = IntensityModel::Superposition {
            members: vec![
                IntensityModel::power_law(0.023, -0.5),
                IntensityModel::RandomCenterGaussianCluster {
                    center: CenterDistribution::UniformDisk { radius: 300.0 },
                    width: 100.0,
                    mean_points: 3140.0,
                },
            ],
        };
        let s = serde_json::to_string(&m).unwrap();
        let back: IntensityModel = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
