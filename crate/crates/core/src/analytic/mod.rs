//! Analytic SINR distributions for the MMSE receiver.
//!
//! Every formula is expressed in terms of the distance-normalized SINR
//! `γ = SINR · r_T^α`. Given the interference functional `ψ(γ)` of a
//! deterministic intensity, the CDF is `1 − Q(L, ψ(γ) + σ²γ)`; Cox models
//! average that expression over the random intensity.

pub mod cluster;
pub mod guard;
pub mod model;
pub mod pathloss;
pub mod psi;
pub mod scaling;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::{ln_factorial, reg_lower_gamma};

pub use cluster::{
    cdf_neyman_scott, cdf_single_random_cluster, enumerate_partitions, neyman_scott_expectation, PartitionMultiset,
};
pub use guard::{optimize_guard_zone, spectral_efficiency_cdf, GuardOptimum};
pub use model::{CenterDistribution, GuardCenter, IntensityModel, PathLoss, PowerLawSegment, RadialProfile};
pub use pathloss::{equivalent_intensity, psi_with_pathloss};
pub use psi::{psi, psi_by_quadrature, psi_power_law, zeta_disk, Strategy};
pub use scaling::scaling_limit_sir;

/// Receiver and link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Number of receive antennas `L`.
    pub antennas: u32,
    /// Path-loss exponent `α > 2`.
    pub alpha: f64,
    /// Noise power per complex dimension `σ²`.
    pub noise: f64,
    /// Link distance `r_T`.
    pub link_distance: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::Config("antenna count must be at least 1".into()));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("path-loss exponent must exceed 2, got {}", self.alpha)));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::Config(format!("noise power must be nonnegative, got {}", self.noise)));
        }
        if !(self.link_distance > 0.0) || !self.link_distance.is_finite() {
            return Err(Error::Config(format!("link distance must be positive, got {}", self.link_distance)));
        }
        Ok(())
    }

    /// `r_T^{−α}`, the mean received signal power.
    pub fn signal_gain(&self) -> f64 {
        self.link_distance.powf(-self.alpha)
    }

    /// Convert an SINR threshold to the distance-normalized `γ`.
    pub fn to_gamma(&self, sinr: f64) -> f64 {
        sinr * self.link_distance.powf(self.alpha)
    }

    /// Convert a distance-normalized `γ` back to SINR.
    pub fn to_sinr(&self, gamma: f64) -> f64 {
        gamma * self.signal_gain()
    }
}

/// `F(γ) = 1 − Q(L, ψ(γ) + σ²γ)` for a deterministic intensity.
pub fn cdf_nonhomog(params: &SystemParams, psi_value: f64, gamma: f64) -> Result<f64> {
    if !(psi_value >= 0.0) || !(gamma >= 0.0) {
        return domain(format!("cdf needs ψ ≥ 0 and γ ≥ 0, got ψ = {psi_value}, γ = {gamma}"));
    }
    let x = psi_value + params.noise * gamma;
    if x.is_infinite() {
        return Ok(1.0);
    }
    reg_lower_gamma(params.antennas, x)
}

/// SINR density in the γ domain,
/// `(ψ + σ²γ)^{L−1} e^{−ψ−σ²γ} (σ² + ψ′) / (L−1)!`.
pub fn pdf_nonhomog(params: &SystemParams, model: &IntensityModel, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return domain(format!("pdf needs γ > 0, got {gamma}"));
    }
    let alpha = params.alpha;
    let p = psi(model, alpha, gamma)?;
    let dp = match model {
        IntensityModel::PiecewisePowerLaw { segments }
            if segments.len() == 1 && segments[0].inner == 0.0 && segments[0].outer.is_none() =>
        {
            psi::psi_power_law_derivative(segments[0].density, segments[0].exponent, alpha, gamma)?
        }
        _ => {
            let h = (1e-6 * gamma).max(1e-9);
            let lo = (gamma - h).max(0.0);
            (psi(model, alpha, gamma + h)? - psi(model, alpha, lo)?) / (gamma + h - lo)
        }
    };
    let x = p + params.noise * gamma;
    let l = params.antennas as u64;
    let ln_body = if x == 0.0 {
        if l == 1 {
            0.0
        } else {
            return Ok(0.0);
        }
    } else {
        (l - 1) as f64 * x.ln() - x - ln_factorial(l - 1)
    };
    Ok(ln_body.exp() * (params.noise + dp))
}

/// Closed-form CDF for `λ(r) = ρ r^ε`, `−2 < ε ≤ 0`.
pub fn cdf_power_law_closed_form(params: &SystemParams, rho: f64, epsilon: f64, gamma: f64) -> Result<f64> {
    if !(epsilon > -2.0 && epsilon <= 0.0) {
        return domain(format!("closed-form power-law CDF needs −2 < ε ≤ 0, got {epsilon}"));
    }
    if !(gamma >= 0.0) {
        return domain(format!("γ must be nonnegative, got {gamma}"));
    }
    let b = (epsilon + 2.0) / params.alpha;
    let csc = 1.0 / (std::f64::consts::PI * b).sin();
    let x = 2.0 * std::f64::consts::PI.powi(2) * rho / params.alpha * csc * gamma.powf(b) + params.noise * gamma;
    reg_lower_gamma(params.antennas, x)
}

/// Convex combination `Σ wᵢ Fᵢ` of per-realization CDF values.
pub fn cdf_mixture(weights: &[f64], cdfs: &[f64]) -> Result<f64> {
    if weights.len() != cdfs.len() || weights.is_empty() {
        return domain("mixture needs one weight per component");
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return domain("mixture weights must be nonnegative and sum to 1");
    }
    Ok(weights.iter().zip(cdfs).map(|(w, f)| w * f).sum::<f64>().clamp(0.0, 1.0))
}

/// CDF of the distance-normalized SINR for any model, dispatching to the
/// appropriate formula. A superposition may contain at most one Cox member;
/// its deterministic members enter as an additive ψ.
pub fn cdf(params: &SystemParams, model: &IntensityModel, gamma: f64) -> Result<f64> {
    params.validate()?;
    if !(gamma >= 0.0) {
        return domain(format!("γ must be nonnegative, got {gamma}"));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let alpha = params.alpha;
    let (random, deterministic): (Vec<&IntensityModel>, Vec<&IntensityModel>) = match model {
        IntensityModel::Superposition { members } => members.iter().partition(|m| m.is_random()),
        m if m.is_random() => (vec![m], vec![]),
        m => (vec![], vec![m]),
    };
    let mut psi_det = 0.0;
    for m in &deterministic {
        psi_det += psi(m, alpha, gamma)?;
    }
    match random.as_slice() {
        [] => cdf_nonhomog(params, psi_det, gamma),
        [IntensityModel::RandomCenterGaussianCluster { center, width, mean_points }] => {
            cdf_single_random_cluster(params, center, *width, *mean_points, gamma, psi_det)
        }
        [IntensityModel::MaternClusterConditioned { parent_density, cluster_radius, mean_daughters }] => {
            cdf_neyman_scott(params, *parent_density, *cluster_radius, *mean_daughters, gamma, psi_det)
        }
        _ => Err(Error::Config("a superposition may contain at most one random (Cox) member".into())),
    }
}

/// Analytic CDF sampled on a grid of distance-normalized SINR values.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrCdfCurve {
    pub gamma_grid: Vec<f64>,
    pub cdf_values: Vec<f64>,
    pub params: SystemParams,
    pub model: IntensityModel,
}

impl SinrCdfCurve {
    /// Evaluate [`cdf`] on `gamma_grid` (sorted ascending), in parallel.
    pub fn evaluate(params: &SystemParams, model: &IntensityModel, gamma_grid: &[f64]) -> Result<Self> {
        params.validate()?;
        model.validate(params.alpha)?;
        if gamma_grid.is_empty() {
            return Err(Error::Config("γ grid is empty".into()));
        }
        if gamma_grid.windows(2).any(|w| !(w[0] <= w[1])) || gamma_grid[0] < 0.0 {
            return Err(Error::Config("γ grid must be nonnegative and sorted ascending".into()));
        }
        let mut values: Vec<f64> = gamma_grid.par_iter().map(|g| cdf(params, model, *g)).collect::<Result<_>>()?;
        // Quadrature noise can break monotonicity at the 1e-12 level.
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        Ok(SinrCdfCurve { gamma_grid: gamma_grid.to_vec(), cdf_values: values, params: *params, model: model.clone() })
    }

    /// Evaluate on `[lo, hi]` with a log grid refined until consecutive CDF
    /// values differ by at most `max_jump`.
    pub fn adaptive(params: &SystemParams, model: &IntensityModel, lo: f64, hi: f64, max_jump: f64) -> Result<Self> {
        params.validate()?;
        model.validate(params.alpha)?;
        let (grid, values) = refine_curve(|g| cdf(params, model, g), lo, hi, max_jump)?;
        Ok(SinrCdfCurve { gamma_grid: grid, cdf_values: values, params: *params, model: model.clone() })
    }

    /// Linear interpolation in `ln γ`, clamped to the end values.
    pub fn value_at(&self, gamma: f64) -> f64 {
        let g = &self.gamma_grid;
        let n = g.len();
        if gamma <= g[0] {
            return self.cdf_values[0];
        }
        if gamma >= g[n - 1] {
            return self.cdf_values[n - 1];
        }
        let k = g.partition_point(|x| *x <= gamma);
        let (x0, x1) = (g[k - 1], g[k]);
        let t = if x0 > 0.0 { (gamma / x0).ln() / (x1 / x0).ln() } else { (gamma - x0) / (x1 - x0) };
        self.cdf_values[k - 1] + t * (self.cdf_values[k] - self.cdf_values[k - 1])
    }
}

/// Tabulate a monotone function of `γ > 0` on `[lo, hi]`, bisecting in
/// `ln γ` wherever consecutive values jump by more than `max_jump`.
pub fn refine_curve<F>(f: F, lo: f64, hi: f64, max_jump: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || !(max_jump > 0.0) {
        return domain(format!("refinement needs 0 < lo ≤ hi < ∞ and a positive step, got [{lo}, {hi}]"));
    }
    let n0 = 33;
    let ratio = (hi / lo).ln();
    let mut grid: Vec<f64> = (0..n0).map(|k| lo * (ratio * k as f64 / (n0 - 1) as f64).exp()).collect();
    grid.dedup();
    let mut values: Vec<f64> = grid.par_iter().map(|g| f(*g)).collect::<Result<_>>()?;
    for _ in 0..40 {
        let mids: Vec<(usize, f64)> = (1..grid.len())
            .filter(|&k| (values[k] - values[k - 1]).abs() > max_jump && grid[k] / grid[k - 1] > 1.0 + 1e-9)
            .map(|k| (k, (grid[k] * grid[k - 1]).sqrt()))
            .collect();
        if mids.is_empty() {
            break;
        }
        let new_values: Vec<f64> = mids.par_iter().map(|(_, g)| f(*g)).collect::<Result<_>>()?;
        let mut g2 = Vec::with_capacity(grid.len() + mids.len());
        let mut v2 = Vec::with_capacity(grid.len() + mids.len());
        let mut m = 0;
        for k in 0..grid.len() {
            if m < mids.len() && mids[m].0 == k {
                g2.push(mids[m].1);
                v2.push(new_values[m]);
                m += 1;
            }
            g2.push(grid[k]);
            v2.push(values[k]);
        }
        grid = g2;
        values = v2;
    }
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    Ok((grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_finite_singular;
    use crate::quadrature::Singularity;

    fn reference_link() -> (SystemParams, IntensityModel) {
        (SystemParams { antennas: 10, alpha: 4.0, noise: 1e-12, link_distance: 10.0 }, IntensityModel::power_law(0.023, -0.5))
    }

    #[test]
    fn cdf_nonhomog_examples() {
        let p = SystemParams { antennas: 1, alpha: 4.0, noise: 0.0, link_distance: 1.0 };
        assert_eq!(cdf_nonhomog(&p, 0.0, 0.0).unwrap(), 0.0);
        assert!((cdf_nonhomog(&p, 2f64.ln(), 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_generic_path() {
        let (p, m) = reference_link();
        for g in [1.0, 1e2, 1e4, 1e5, 1e6] {
            let a = cdf_power_law_closed_form(&p, 0.023, -0.5, g).unwrap();
            let b = cdf(&p, &m, g).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        assert!(cdf_power_law_closed_form(&p, 0.023, 0.5, 1.0).is_err());
        // single-term reduction
        let p1 = SystemParams { antennas: 1, alpha: 4.0, noise: 0.0, link_distance: 1.0 };
        let g: f64 = 77.0;
        let v = cdf_power_law_closed_form(&p1, 0.01, 0.0, g).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((v - (1.0 - (-(pi2 * 0.01 / 2.0) * g.sqrt()).exp())).abs() < 1e-15);
    }

    #[test]
    fn pdf_integrates_to_cdf() {
        let (p, m) = reference_link();
        let g_max = 2e5;
        let r = integrate_finite_singular(|g| pdf_nonhomog(&p, &m, g).unwrap_or(f64::NAN), 1e-300, g_max, 1e-10, Singularity::Left).unwrap();
        assert!((r.value - cdf(&p, &m, g_max).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn pdf_finite_difference_matches_closed_form_derivative() {
        let (p, m) = reference_link();
        // Wrapping in a superposition forces the finite-difference path.
        let wrapped = IntensityModel::Superposition { members: vec![m.clone()] };
        for g in [1e2, 1e4, 3e5] {
            let a = pdf_nonhomog(&p, &m, g).unwrap();
            let b = pdf_nonhomog(&p, &wrapped, g).unwrap();
            assert!(((a - b) / a).abs() < 1e-5, "γ={g}");
        }
    }

    #[test]
    fn mixture_is_a_valid_cdf() {
        let p = SystemParams { antennas: 4, alpha: 4.0, noise: 1e-12, link_distance: 10.0 };
        let mut prev = 0.0;
        for k in 0..60 {
            let g = 10f64.powf(-1.0 + k as f64 * 0.15);
            let f1 = cdf_power_law_closed_form(&p, 0.02, -1.0, g).unwrap();
            let f0 = cdf_power_law_closed_form(&p, 0.01, 0.0, g).unwrap();
            let v = cdf_mixture(&[0.3, 0.7], &[f1, f0]).unwrap();
            assert!(v >= prev && v <= 1.0);
            prev = v;
        }
        assert!(prev > 0.999);
        assert!(cdf_mixture(&[0.5, 0.6], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn curve_rejects_empty_grid() {
        let (p, m) = reference_link();
        assert!(SinrCdfCurve::evaluate(&p, &m, &[]).is_err());
        let c = SinrCdfCurve::evaluate(&p, &m, &[1.0, 10.0, 100.0]).unwrap();
        assert!((c.value_at(10.0) - c.cdf_values[1]).abs() < 1e-15);
    }

    #[test]
    fn superposition_with_one_cox_member() {
        let p = SystemParams { antennas: 3, alpha: 4.0, noise: 1e-5, link_distance: 10.0 };
        let extra = IntensityModel::homogeneous(1e-4);
        let matern = IntensityModel::MaternClusterConditioned { parent_density: 1e-5, cluster_radius: 300.0, mean_daughters: 50.0 };
        let sup = IntensityModel::Superposition { members: vec![extra.clone(), matern] };
        let g = 1e4;
        let direct = cdf_neyman_scott(&p, 1e-5, 300.0, 50.0, g, psi(&extra, 4.0, g).unwrap()).unwrap();
        assert!((cdf(&p, &sup, g).unwrap() - direct).abs() < 1e-15);
        let two = IntensityModel::Superposition { members: vec![sup.clone(), sup] };
        assert!(cdf(&p, &two, g).is_err());
    }

    #[test]
    fn adaptive_curve_interpolates_within_step() {
        let (p, m) = reference_link();
        let curve = SinrCdfCurve::adaptive(&p, &m, 1e2, 1e8, 0.002).unwrap();
        assert!(curve.cdf_values.windows(2).all(|w| w[1] - w[0] <= 0.002));
        for k in 0..200 {
            let g = 1e2 * 10f64.powf(6.0 * (k as f64 + 0.37) / 200.0);
            assert!((curve.value_at(g) - cdf(&p, &m, g).unwrap()).abs() < 2e-4);
        }
    }
}
