//! Seeded sampling of interferer configurations for every model.

pub mod window;

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::analytic::model::{CenterDistribution, GuardCenter, IntensityModel, RadialProfile};
use crate::error::{Error, Result};

pub use window::{saturation_gamma, truncation_bias, validate_window, Gain, SimWindow, DEFAULT_BIAS_TOL};

/// Generator for trial `stream` of a run seeded with `master`.
pub fn trial_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Identifies the generator stream a realization was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedInfo {
    pub master: u64,
    pub stream: u64,
}

/// Interferer positions for one trial, receiver at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub points: Vec<[f64; 2]>,
    pub seed_info: SeedInfo,
}

impl Realization {
    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0].hypot(p[1])).collect()
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    if !(mean > 0.0 && mean.is_finite()) || mean > 1e12 {
        return Err(Error::Config(format!("Poisson mean {mean} out of range for sampling")));
    }
    let d = Poisson::new(mean).map_err(|e| Error::Numeric(format!("Poisson({mean}): {e}")))?;
    Ok(d.sample(rng) as u64)
}

#[inline]
fn polar<R: Rng + ?Sized>(r: f64, rng: &mut R) -> [f64; 2] {
    let t = TAU * rng.random::<f64>();
    [r * t.cos(), r * t.sin()]
}

#[inline]
fn uniform_in_disk<R: Rng + ?Sized>(c: [f64; 2], radius: f64, rng: &mut R) -> [f64; 2] {
    let p = polar(radius * rng.random::<f64>().sqrt(), rng);
    [c[0] + p[0], c[1] + p[1]]
}

/// Mass of `2πρ r^{1+ε}` on `[a, b]`.
fn power_mass(rho: f64, eps: f64, a: f64, b: f64) -> f64 {
    let k = 2.0 + eps;
    if k.abs() < 1e-12 {
        TAU * rho * (b / a).ln()
    } else {
        TAU * rho * (b.powf(k) - a.powf(k)) / k
    }
}

/// Inverse CDF of the radial density `∝ r^{1+ε}` on `[a, b]`.
fn power_quantile(eps: f64, a: f64, b: f64, u: f64) -> f64 {
    let k = 2.0 + eps;
    if k.abs() < 1e-12 {
        a * (b / a).powf(u)
    } else {
        let (ak, bk) = (a.powf(k), b.powf(k));
        ((bk - ak) * u + ak).powf(1.0 / k)
    }
}

fn sample_center<R: Rng + ?Sized>(center: &CenterDistribution, rng: &mut R) -> f64 {
    match center {
        CenterDistribution::PointMass { distance } => *distance,
        CenterDistribution::UniformDisk { radius } => radius * rng.random::<f64>().sqrt(),
        CenterDistribution::Tabulated { radii, density } => {
            let masses: Vec<f64> = radii
                .windows(2)
                .zip(density.windows(2))
                .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
                .collect();
            let total: f64 = masses.iter().sum();
            let mut u = rng.random::<f64>() * total;
            let mut k = 0;
            while k + 1 < masses.len() && u > masses[k] {
                u -= masses[k];
                k += 1;
            }
            // linear density y0 + (y1 − y0)t on t ∈ [0, 1]
            let (y0, y1) = (density[k], density[k + 1]);
            let w = radii[k + 1] - radii[k];
            let target = u / w;
            let slope = y1 - y0;
            let t = if slope.abs() < 1e-14 * (y0 + y1).max(1e-300) {
                target / y0
            } else {
                (-y0 + (y0 * y0 + 2.0 * slope * target).max(0.0).sqrt()) / slope
            };
            radii[k] + w * t.clamp(0.0, 1.0)
        }
    }
}

/// Matérn type-II hard-core points of candidate density `rho_p` inside the
/// disk of radius `extent`, followed by deletion of the representative
/// guard disk at `guard_center`.
fn matern_type_ii<R: Rng + ?Sized>(
    rho_p: f64,
    r1: f64,
    guard_center: [f64; 2],
    extent: f64,
    keep_radius: f64,
    rng: &mut R,
    out: &mut Vec<[f64; 2]>,
) -> Result<()> {
    let pad = extent + r1;
    let n = poisson(rho_p * PI * pad * pad, rng)? as usize;
    let mut cand: Vec<([f64; 2], f64)> = Vec::with_capacity(n);
    for _ in 0..n {
        let p = uniform_in_disk([0.0, 0.0], pad, rng);
        cand.push((p, rng.random::<f64>()));
    }
    if r1 == 0.0 {
        out.extend(cand.iter().map(|c| c.0).filter(|p| p[0].hypot(p[1]) < keep_radius));
        return Ok(());
    }
    // bucket grid with cell size r1
    let cells = ((2.0 * pad / r1).ceil() as usize).max(1);
    let cell_of = |p: [f64; 2]| -> (usize, usize) {
        let cx = (((p[0] + pad) / r1) as usize).min(cells - 1);
        let cy = (((p[1] + pad) / r1) as usize).min(cells - 1);
        (cx, cy)
    };
    let mut heads = vec![usize::MAX; cells * cells];
    let mut next = vec![usize::MAX; n];
    for (i, c) in cand.iter().enumerate() {
        let (cx, cy) = cell_of(c.0);
        next[i] = heads[cy * cells + cx];
        heads[cy * cells + cx] = i;
    }
    let r1sq = r1 * r1;
    for (i, &(p, mark)) in cand.iter().enumerate() {
        let rp = p[0].hypot(p[1]);
        if rp >= keep_radius {
            continue;
        }
        let gx = p[0] - guard_center[0];
        let gy = p[1] - guard_center[1];
        if gx * gx + gy * gy < r1sq {
            continue;
        }
        let (cx, cy) = cell_of(p);
        let mut retained = true;
        'scan: for yy in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
            for xx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                let mut j = heads[yy * cells + xx];
                while j != usize::MAX {
                    if j != i {
                        let (q, mq) = cand[j];
                        let dx = q[0] - p[0];
                        let dy = q[1] - p[1];
                        if dx * dx + dy * dy < r1sq && (mq < mark || (mq == mark && j < i)) {
                            retained = false;
                            break 'scan;
                        }
                    }
                    j = next[j];
                }
            }
        }
        if retained {
            out.push(p);
        }
    }
    Ok(())
}

/// Append one realization of `model` within `window` to `out`.
pub fn sample<R: Rng + ?Sized>(model: &IntensityModel, window: &SimWindow, alpha: f64, rng: &mut R, out: &mut Vec<[f64; 2]>) -> Result<()> {
    let big_r = window.outer_radius;
    if !(big_r > 0.0) {
        return Err(Error::Config(format!("window radius must be positive, got {big_r}")));
    }
    match model {
        IntensityModel::PiecewisePowerLaw { segments } => {
            for s in segments {
                if s.density == 0.0 || s.inner >= big_r {
                    continue;
                }
                let b = s.outer.map_or(big_r, |o| o.min(big_r));
                let n = poisson(power_mass(s.density, s.exponent, s.inner, b), rng)?;
                for _ in 0..n {
                    let r = power_quantile(s.exponent, s.inner, b, rng.random::<f64>());
                    out.push(polar(r, rng));
                }
            }
        }
        IntensityModel::GaussianCluster { center_distance, width, mean_points } => {
            let n = poisson(*mean_points, rng)?;
            gaussian_points([*center_distance, 0.0], *width, n, rng, out);
        }
        IntensityModel::RandomCenterGaussianCluster { center, width, mean_points } => {
            let tau = sample_center(center, rng);
            let c = polar(tau, rng);
            let n = poisson(*mean_points, rng)?;
            gaussian_points(c, *width, n, rng, out);
        }
        IntensityModel::DiskCluster { center_distance, radius, density } => {
            let n = poisson(density * PI * radius * radius, rng)?;
            for _ in 0..n {
                out.push(uniform_in_disk([*center_distance, 0.0], *radius, rng));
            }
        }
        IntensityModel::Strip { half_width, density } => {
            let a = half_width.min(big_r);
            let area = 2.0 * big_r * big_r * (a / big_r).asin() + 2.0 * a * (big_r * big_r - a * a).sqrt();
            let n = poisson(density * area, rng)?;
            let mut k = 0;
            while k < n {
                let x = big_r * (2.0 * rng.random::<f64>() - 1.0);
                let y = a * (2.0 * rng.random::<f64>() - 1.0);
                if x * x + y * y <= big_r * big_r {
                    out.push([x, y]);
                    k += 1;
                }
            }
        }
        IntensityModel::HardCoreApprox { parent_density, guard_radius, guard_center, link_distance } => {
            let c = match guard_center {
                GuardCenter::Transmitter => [*link_distance, 0.0],
                GuardCenter::Receiver => [0.0, 0.0],
            };
            matern_type_ii(*parent_density, *guard_radius, c, big_r, big_r, rng, out)?;
        }
        IntensityModel::MaternClusterConditioned { parent_density, cluster_radius, mean_daughters } => {
            let rd = *cluster_radius;
            let n0 = poisson(mean_daughters - 1.0, rng)?;
            for _ in 0..n0 {
                out.push(uniform_in_disk([0.0, 0.0], rd, rng));
            }
            let pad = big_r + rd;
            let parents = poisson(parent_density * PI * pad * pad, rng)?;
            let r2 = big_r * big_r;
            for _ in 0..parents {
                let c = uniform_in_disk([0.0, 0.0], pad, rng);
                let nd = poisson(*mean_daughters, rng)?;
                for _ in 0..nd {
                    let p = uniform_in_disk(c, rd, rng);
                    if p[0] * p[0] + p[1] * p[1] < r2 {
                        out.push(p);
                    }
                }
            }
        }
        IntensityModel::CustomRadialProfile { profile } => sample_profile(profile, big_r, alpha, rng, out)?,
        IntensityModel::Superposition { members } => {
            for m in members {
                sample(m, window, alpha, rng, out)?;
            }
        }
    }
    Ok(())
}

fn gaussian_points<R: Rng + ?Sized>(c: [f64; 2], width: f64, n: u64, rng: &mut R, out: &mut Vec<[f64; 2]>) {
    for _ in 0..n {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        out.push([c[0] + width * x, c[1] + width * y]);
    }
}

fn sample_profile<R: Rng + ?Sized>(profile: &RadialProfile, big_r: f64, alpha: f64, rng: &mut R, out: &mut Vec<[f64; 2]>) -> Result<()> {
    match profile {
        RadialProfile::DispersiveExponential { density, decay } => {
            if big_r <= 1.0 {
                return Ok(());
            }
            let ln_r = big_r.ln();
            let mass = PI * density * alpha * alpha * ln_r * ln_r / (decay * decay);
            let n = poisson(mass, rng)?;
            for _ in 0..n {
                let s = (rng.random::<f64>().sqrt() * ln_r).exp();
                out.push(polar(s, rng));
            }
        }
        RadialProfile::Equivalent { base_density, pathloss } => {
            // sample in the original geometry, then map r ↦ φ(r)^{−1/α}
            let r_max = pathloss.inverse_ln(-alpha * big_r.ln())?;
            let n = poisson(base_density * PI * r_max * r_max, rng)?;
            for _ in 0..n {
                let r = r_max * rng.random::<f64>().sqrt();
                let s = (-pathloss.ln_gain(r) / alpha).exp();
                out.push(polar(s, rng));
            }
        }
        RadialProfile::Tabulated { radii, values } => {
            // per segment: radial mass r·p(r) by rejection under its maximum
            for k in 1..radii.len() {
                let (a, b) = (radii[k - 1], radii[k].min(big_r));
                if a >= b {
                    break;
                }
                let m = |r: f64| profile.radial_mass(r, alpha);
                let slope = (values[k] - values[k - 1]) / (radii[k] - radii[k - 1]);
                let mut bound = m(a).max(m(b));
                if slope < 0.0 {
                    // r(v0 + s(r − a)) peaks at r* = (s a − v0)/(2s)
                    let r_star = (slope * a - values[k - 1]) / (2.0 * slope);
                    if r_star > a && r_star < b {
                        bound = bound.max(m(r_star));
                    }
                }
                if bound <= 0.0 {
                    continue;
                }
                // ∫ r (v0 + s r) dr with the line extended through r = 0
                let v0 = values[k - 1] - slope * radii[k - 1];
                let mass = v0 * (b * b - a * a) / 2.0 + slope * (b * b * b - a * a * a) / 3.0;
                let n = poisson(mass.max(0.0), rng)?;
                let mut got = 0;
                while got < n {
                    let r = a + (b - a) * rng.random::<f64>();
                    if rng.random::<f64>() * bound <= m(r) {
                        out.push(polar(r, rng));
                        got += 1;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Homogeneous PPP of density `rho` in the disk of radius `window.outer_radius`.
pub fn sample_homogeneous<R: Rng + ?Sized>(rho: f64, radius: f64, rng: &mut R, out: &mut Vec<[f64; 2]>) -> Result<()> {
    let n = poisson(rho * PI * radius * radius, rng)?;
    for _ in 0..n {
        out.push(uniform_in_disk([0.0, 0.0], radius, rng));
    }
    Ok(())
}

/// Draw the realization for trial `stream` of a run seeded with `master`.
pub fn sample_realization(model: &IntensityModel, window: &SimWindow, alpha: f64, master: u64, stream: u64) -> Result<Realization> {
    let mut rng = trial_rng(master, stream);
    let mut points = Vec::new();
    sample(model, window, alpha, &mut rng, &mut points)?;
    Ok(Realization { points, seed_info: SeedInfo { master, stream } })
}

/// Write realizations as CSV rows `trial_index,point_index,x,y`.
pub fn write_realizations_csv<W: Write>(mut w: W, realizations: &[Realization]) -> Result<()> {
    writeln!(w, "trial_index,point_index,x,y")?;
    for r in realizations {
        for (i, p) in r.points.iter().enumerate() {
            writeln!(w, "{},{},{},{}", r.seed_info.stream, i, p[0], p[1])?;
        }
    }
    Ok(())
}
