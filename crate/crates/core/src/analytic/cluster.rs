//! Cluster processes: a single randomly located Gaussian cluster and the
//! Matérn cluster process conditioned on a cluster at the receiver.

use std::f64::consts::PI;

use super::model::CenterDistribution;
use super::psi::{psi_gaussian_cluster, zeta_disk};
use super::{cdf_nonhomog, SystemParams};
use crate::error::{domain, Result};
use crate::quadrature::{integrate_points, integrate_vec_points, Tolerance};
use crate::special::ln_factorial;

/// Largest `ℓ` for which partitions are enumerated.
pub const PARTITION_CAP: usize = 64;

/// Multiplicities `(m₁, …, m_ℓ)` with `Σ j·m_j = ℓ`.
pub type PartitionMultiset = Vec<u32>;

/// All `(m₁, …, m_ℓ)` with `Σ j·m_j = ℓ`.
pub fn enumerate_partitions(ell: usize) -> Result<Vec<PartitionMultiset>> {
    if ell > PARTITION_CAP {
        return domain(format!("partition enumeration capped at ℓ = {PARTITION_CAP}, got {ell}"));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; ell];
    fill(ell, ell, &mut current, &mut out);
    Ok(out)
}

// Choose m_j for j = part, part−1, …, 1 with `remaining` left to cover.
fn fill(part: usize, remaining: usize, current: &mut Vec<u32>, out: &mut Vec<PartitionMultiset>) {
    if part == 0 {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if part == 1 {
        current[0] = remaining as u32;
        out.push(current.clone());
        current[0] = 0;
        return;
    }
    for m in (0..=remaining / part).rev() {
        current[part - 1] = m as u32;
        fill(part - 1, remaining - m * part, current, out);
    }
    current[part - 1] = 0;
}

/// `Σ_{M_ℓ} Π_j J_j^{m_j} / (m_j! (j!)^{m_j})`; `moments[j − 1] = J_j`.
pub fn partition_sum(ell: usize, moments: &[f64]) -> Result<f64> {
    if moments.len() < ell {
        return domain(format!("need {ell} moment integrals, got {}", moments.len()));
    }
    let mut total = 0.0;
    for p in enumerate_partitions(ell)? {
        let mut ln_term = 0.0;
        let mut zero = false;
        for (idx, &m) in p.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let j = idx + 1;
            let jj = moments[idx];
            if jj == 0.0 {
                zero = true;
                break;
            }
            ln_term += m as f64 * (jj.ln() - ln_factorial(j as u64)) - ln_factorial(m as u64);
        }
        if !zero {
            total += ln_term.exp();
        }
    }
    Ok(total)
}

/// `E[Ξ^ℓ e^{−Ξ}]` for `Ξ = Σ_{X∈Π} ζ(X)` over a PPP `Π`, given the moment
/// integrals `J_j = ∫ ζ^j e^{−ζ} λ*` and the exposure `E = ∫ (e^{−ζ} − 1) λ*`.
pub fn neyman_scott_expectation(ell: usize, moments: &[f64], exposure: f64) -> Result<f64> {
    if moments.iter().take(ell).any(|j| !(*j >= 0.0)) || exposure > 0.0 {
        return domain("moment integrals must be nonnegative and the exposure nonpositive");
    }
    let s = partition_sum(ell, moments)?;
    Ok((ln_factorial(ell as u64) + exposure).exp() * s)
}

/// Exposure `E` and moments `J_1..J_n` of a radially symmetric `ζ` for a
/// homogeneous parent process of density `rho_p`. `breakpoints` must start
/// at 0 and contain every kink of `ζ`; the last one bounds the support.
pub fn cluster_moments<Z>(zeta: Z, rho_p: f64, n: usize, breakpoints: &[f64], rel_tol: f64) -> Result<(f64, Vec<f64>)>
where
    Z: Fn(f64) -> f64,
{
    let dim = n + 1;
    let f = |r: f64, out: &mut [f64]| {
        let z = zeta(r);
        let w = 2.0 * PI * rho_p * r;
        let ez = (-z).exp();
        out[0] = w * (-z).exp_m1();
        let mut zp = 1.0;
        for slot in out.iter_mut().skip(1) {
            zp *= z;
            *slot = w * zp * ez;
        }
    };
    let tol = Tolerance { rel: rel_tol, abs: 1e-15, max_subdivisions: 6000 };
    let (v, _, _) = integrate_vec_points(f, dim, breakpoints, tol)?;
    Ok((v[0], v[1..].to_vec()))
}

/// Outage CDF of the Matérn cluster process conditioned on a cluster at
/// the receiver, plus any extra deterministic `psi_extra`.
pub fn cdf_neyman_scott(
    params: &SystemParams,
    parent_density: f64,
    cluster_radius: f64,
    mean_daughters: f64,
    gamma: f64,
    psi_extra: f64,
) -> Result<f64> {
    params.validate()?;
    let l = params.antennas as usize;
    if l - 1 > PARTITION_CAP {
        return domain(format!("Theorem-3 sum needs L − 1 ≤ {PARTITION_CAP}, got L = {l}"));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let alpha = params.alpha;
    let area = PI * cluster_radius * cluster_radius;
    let rho_d = mean_daughters / area;
    let rho_origin = (mean_daughters - 1.0) / area;
    let psi_p = zeta_disk(0.0, cluster_radius, rho_origin, alpha, gamma)? + psi_extra;
    let a = psi_p + params.noise * gamma;

    let n = l - 1;
    let (exposure, moments) = if parent_density > 0.0 {
        let zeta = |r: f64| zeta_disk(r, cluster_radius, rho_d, alpha, gamma).unwrap_or(f64::NAN);
        let r_max = cluster_radius + (mean_daughters * gamma / 1e-12).powf(1.0 / alpha);
        let mut pts = vec![0.0, cluster_radius];
        let mut r = 2.0 * cluster_radius;
        while r < r_max {
            pts.push(r);
            r *= 2.0;
        }
        pts.push(r_max);
        let (e, mut j) = cluster_moments(zeta, parent_density, n, &pts, 1e-10)?;
        // Far field: ζ ≈ μ_d γ r^{−α}, so 1 − e^{−ζ} ≈ ζ and ζ^j e^{−ζ} is negligible.
        let tail = 2.0 * PI * parent_density * mean_daughters * gamma * r_max.powf(2.0 - alpha) / (alpha - 2.0);
        j.iter_mut().take(1).for_each(|v| *v += tail);
        (e - tail, j)
    } else {
        (0.0, vec![0.0; n])
    };

    let s: Vec<f64> = (0..=n).map(|ell| partition_sum(ell, &moments)).collect::<Result<_>>()?;
    let mut survive = 0.0;
    for k in 0..l {
        for (ell, s_ell) in s.iter().enumerate().take(k + 1) {
            if *s_ell == 0.0 {
                continue;
            }
            let m = (k - ell) as u64;
            let ln_poisson = if a == 0.0 {
                if m == 0 {
                    0.0
                } else {
                    continue;
                }
            } else {
                m as f64 * a.ln() - a - ln_factorial(m)
            };
            survive += (ln_poisson + exposure).exp() * s_ell;
        }
    }
    Ok((1.0 - survive).clamp(0.0, 1.0))
}

/// CDF of the SINR when the interferers form one Gaussian cluster whose
/// centre distance is drawn from `center`, plus deterministic `psi_extra(γ)`.
pub fn cdf_single_random_cluster(
    params: &SystemParams,
    center: &CenterDistribution,
    width: f64,
    mean_points: f64,
    gamma: f64,
    psi_extra: f64,
) -> Result<f64> {
    params.validate()?;
    center.validate()?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let conditional = |tau: f64| -> Result<f64> {
        let p = psi_gaussian_cluster(tau, width, mean_points, params.alpha, gamma)? + psi_extra;
        cdf_nonhomog(params, p, gamma)
    };
    match center {
        CenterDistribution::PointMass { distance } => conditional(*distance),
        CenterDistribution::UniformDisk { radius } => {
            let mut err = None;
            let f = |tau: f64| match conditional(tau) {
                Ok(v) => 2.0 * tau / (radius * radius) * v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            };
            let pts: Vec<f64> = (0..=8).map(|k| radius * k as f64 / 8.0).collect();
            let r = integrate_points(f, &pts, Tolerance { rel: 1e-8, abs: 1e-12, max_subdivisions: 2000 });
            if let Some(e) = err {
                return Err(e);
            }
            Ok(r?.value.clamp(0.0, 1.0))
        }
        CenterDistribution::Tabulated { radii, density } => {
            let mut total = 0.0;
            for (x, y) in radii.windows(2).zip(density.windows(2)) {
                let mut err = None;
                let f = |tau: f64| {
                    let w = y[0] + (y[1] - y[0]) * (tau - x[0]) / (x[1] - x[0]);
                    match conditional(tau) {
                        Ok(v) => w * v,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::NAN
                        }
                    }
                };
                let r = integrate_points(f, &[x[0], x[1]], Tolerance { rel: 1e-8, abs: 1e-12, max_subdivisions: 2000 });
                if let Some(e) = err {
                    return Err(e);
                }
                total += r?.value;
            }
            Ok(total.clamp(0.0, 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::model::IntensityModel;
    use crate::analytic::psi::psi;

    fn partition_count(n: usize) -> usize {
        // p(n) via the pentagonal-number recurrence
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut k: i64 = 1;
            let mut acc = 0i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * p[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    acc += sign * p[m - g2];
                }
                k += 1;
            }
            p[m] = acc;
        }
        p[n] as usize
    }

    #[test]
    fn partitions_small_cases() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Vec::<u32>::new()]);
        let mut three = enumerate_partitions(3).unwrap();
        three.sort();
        assert_eq!(three, vec![vec![0, 0, 1], vec![1, 1, 0], vec![3, 0, 0]]);
        assert_eq!(enumerate_partitions(10).unwrap().len(), 42);
        for n in 0..=30 {
            assert_eq!(enumerate_partitions(n).unwrap().len(), partition_count(n));
        }
        assert!(enumerate_partitions(65).is_err());
    }

    #[test]
    fn partition_sum_matches_exponential_formula() {
        // coefficients of exp(Σ c_j x^j), c_j = J_j / j!: ℓ b_ℓ = Σ j c_j b_{ℓ−j}
        let moments: Vec<f64> = (1..=12).map(|j| 0.3 + 0.7 * (j as f64).sqrt()).collect();
        let mut b = vec![1.0];
        let mut fact = 1.0;
        let c: Vec<f64> = moments
            .iter()
            .enumerate()
            .map(|(i, jj)| {
                fact *= (i + 1) as f64;
                jj / fact
            })
            .collect();
        for l in 1..=12 {
            let s: f64 = (1..=l).map(|j| j as f64 * c[j - 1] * b[l - j]).sum();
            b.push(s / l as f64);
        }
        for l in 0..=12 {
            let v = partition_sum(l, &moments).unwrap();
            assert!(((v - b[l]) / b[l]).abs() < 1e-12, "ℓ={l}");
        }
    }

    #[test]
    fn expectation_low_orders() {
        let e = -0.7;
        assert!((neyman_scott_expectation(0, &[], e).unwrap() - e.exp()).abs() < 1e-15);
        assert!((neyman_scott_expectation(1, &[0.4], e).unwrap() - e.exp() * 0.4).abs() < 1e-15);
    }

    #[test]
    fn empty_parent_process_reduces_to_deterministic_cluster() {
        let params = SystemParams { antennas: 4, alpha: 4.0, noise: 1e-5, link_distance: 10.0 };
        let det = IntensityModel::DiskCluster { center_distance: 0.0, radius: 300.0, density: 199.0 / (PI * 9e4) };
        for g in [1e2, 1e4, 1e5] {
            let a = cdf_neyman_scott(&params, 0.0, 300.0, 200.0, g, 0.0).unwrap();
            let b = cdf_nonhomog(&params, psi(&det, 4.0, g).unwrap(), g).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(cdf_neyman_scott(&params, 1.6e-5, 300.0, 200.0, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn neyman_scott_cdf_is_monotone_in_gamma_and_antennas() {
        let mut prev_l = [1.0; 8];
        for l in 1..=4u32 {
            let params = SystemParams { antennas: l, alpha: 4.0, noise: 1e-5, link_distance: 10.0 };
            let mut prev = 0.0;
            for (i, g) in [1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9].iter().enumerate() {
                let v = cdf_neyman_scott(&params, 1.6e-5, 300.0, 200.0, *g, 0.0).unwrap();
                assert!(v >= prev - 1e-12 && (0.0..=1.0).contains(&v));
                assert!(v <= prev_l[i] + 1e-12);
                prev_l[i] = v;
                prev = v;
            }
        }
    }

    #[test]
    fn point_mass_center_is_deterministic_cluster() {
        let params = SystemParams { antennas: 10, alpha: 4.0, noise: 1e-14, link_distance: 10.0 };
        let c = CenterDistribution::PointMass { distance: 0.0 };
        let m = IntensityModel::GaussianCluster { center_distance: 0.0, width: 100.0, mean_points: 3140.0 };
        let g = 1e3;
        let a = cdf_single_random_cluster(&params, &c, 100.0, 3140.0, g, 0.0).unwrap();
        let b = cdf_nonhomog(&params, psi(&m, 4.0, g).unwrap(), g).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn non_normalized_center_density_rejected() {
        let params = SystemParams { antennas: 2, alpha: 4.0, noise: 0.0, link_distance: 1.0 };
        let c = CenterDistribution::Tabulated { radii: vec![0.0, 1.0], density: vec![1.0, 1.0 + 1e-3] };
        assert!(cdf_single_random_cluster(&params, &c, 1.0, 1.0, 1.0, 0.0).is_err());
        let ok = CenterDistribution::Tabulated { radii: vec![0.0, 300.0], density: vec![0.0, 2.0 / 300.0] };
        let disk = CenterDistribution::UniformDisk { radius: 300.0 };
        let p10 = SystemParams { antennas: 10, alpha: 4.0, noise: 1e-14, link_distance: 10.0 };
        let a = cdf_single_random_cluster(&p10, &ok, 100.0, 3140.0, 1e3, 0.0).unwrap();
        let b = cdf_single_random_cluster(&p10, &disk, 100.0, 3140.0, 1e3, 0.0).unwrap();
        assert!((a - b).abs() < 1e-8);
    }
}
