//! Linear-MMSE SINR under Rayleigh fading and Monte Carlo aggregation.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic::{IntensityModel, SinrCdfCurve, SystemParams};
use crate::error::{Error, Result};
use crate::sim::{sample, trial_rng, Gain, SimWindow};

/// Largest accepted squared ratio of Cholesky pivots.
pub const MAX_CONDITION: f64 = 1e15;
/// Largest accepted fraction of discarded trials.
pub const MAX_DISCARD_RATE: f64 = 1e-4;

/// Unit-variance circular complex Gaussian.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

/// Target channel and interferer channels (one column per interferer).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub target: Vec<Complex64>,
    pub interferers: Vec<Vec<Complex64>>,
}

impl ChannelDraw {
    pub fn sample<R: Rng + ?Sized>(antennas: usize, n: usize, rng: &mut R) -> Self {
        let target = (0..antennas).map(|_| complex_normal(rng)).collect();
        let interferers = (0..n).map(|_| (0..antennas).map(|_| complex_normal(rng)).collect()).collect();
        ChannelDraw { target, interferers }
    }
}

/// Outcome of one SINR evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SinrOutcome {
    Value(f64),
    /// Ill-conditioned interference-plus-noise matrix.
    Singular,
}

/// Lower triangle of `σ²I + Σ pᵢ hᵢhᵢ†`, real and imaginary parts apart.
struct Covariance {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    rank_hint: usize,
}

impl Covariance {
    fn new(n: usize, noise: f64) -> Self {
        let mut re = vec![0.0; n * n];
        for i in 0..n {
            re[i * n + i] = noise;
        }
        Covariance { n, re, im: vec![0.0; n * n], rank_hint: 0 }
    }

    #[inline]
    fn add(&mut self, p: f64, h: &[Complex64]) {
        let n = self.n;
        for i in 0..n {
            let a = h[i] * p;
            let row = i * n;
            for j in 0..=i {
                // a·conj(h_j)
                let b = h[j];
                self.re[row + j] += a.re * b.re + a.im * b.im;
                self.im[row + j] += a.im * b.re - a.re * b.im;
            }
        }
        self.rank_hint += 1;
    }

    /// `g† A⁻¹ g` through an in-place Cholesky factorization.
    fn quadratic_form(mut self, g: &[Complex64]) -> SinrOutcome {
        let n = self.n;
        let (re, im) = (&mut self.re, &mut self.im);
        let mut pivots = vec![0.0; n];
        for j in 0..n {
            let mut d = re[j * n + j];
            for k in 0..j {
                d -= re[j * n + k] * re[j * n + k] + im[j * n + k] * im[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return SinrOutcome::Singular;
            }
            let ljj = d.sqrt();
            pivots[j] = ljj;
            re[j * n + j] = ljj;
            for i in j + 1..n {
                let (mut sr, mut si) = (re[i * n + j], im[i * n + j]);
                for k in 0..j {
                    // L_ik · conj(L_jk)
                    let (ar, ai) = (re[i * n + k], im[i * n + k]);
                    let (br, bi) = (re[j * n + k], im[j * n + k]);
                    sr -= ar * br + ai * bi;
                    si -= ai * br - ar * bi;
                }
                re[i * n + j] = sr / ljj;
                im[i * n + j] = si / ljj;
            }
        }
        let (pmax, pmin) = pivots.iter().fold((0.0f64, f64::INFINITY), |(a, b), &p| (a.max(p), b.min(p)));
        if (pmax / pmin).powi(2) > MAX_CONDITION {
            return SinrOutcome::Singular;
        }
        // forward substitution L y = g, result ‖y‖²
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        let mut norm = 0.0;
        for i in 0..n {
            let mut s = g[i];
            for k in 0..i {
                s -= Complex64::new(re[i * n + k], im[i * n + k]) * y[k];
            }
            y[i] = s / re[i * n + i];
            norm += y[i].norm_sqr();
        }
        SinrOutcome::Value(norm)
    }
}

fn finish(cov: Covariance, g: &[Complex64], noise: f64, signal_gain: f64) -> SinrOutcome {
    if noise == 0.0 && cov.rank_hint < cov.n {
        // the target channel almost surely leaves the interference span
        return SinrOutcome::Value(f64::INFINITY);
    }
    match cov.quadratic_form(g) {
        SinrOutcome::Value(q) => SinrOutcome::Value(signal_gain * q),
        s => s,
    }
}

/// `r_T^{−α} g_T†(G P G† + σ²I)^{−1} g_T` with `P = diag(powers)`.
pub fn mmse_sinr_with_powers(draw: &ChannelDraw, powers: &[f64], params: &SystemParams) -> Result<SinrOutcome> {
    let l = params.antennas as usize;
    if draw.target.len() != l || draw.interferers.len() != powers.len() || draw.interferers.iter().any(|h| h.len() != l) {
        return Err(Error::Config("channel draw dimensions do not match the system".into()));
    }
    let mut cov = Covariance::new(l, params.noise);
    for (h, &p) in draw.interferers.iter().zip(powers) {
        cov.add(p, h);
    }
    Ok(finish(cov, &draw.target, params.noise, params.signal_gain()))
}

/// MMSE SINR for interferers at `distances` under `r^{−α}` path loss.
pub fn mmse_sinr(draw: &ChannelDraw, distances: &[f64], params: &SystemParams) -> Result<SinrOutcome> {
    let powers: Vec<f64> = distances.iter().map(|r| r.powf(-params.alpha)).collect();
    mmse_sinr_with_powers(draw, &powers, params)
}

/// Sorted Monte Carlo SINR samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub sorted_samples: Vec<f64>,
    pub trial_count: usize,
    pub discarded: usize,
}

impl EmpiricalCdf {
    pub fn from_samples(mut samples: Vec<f64>, discarded: usize) -> Self {
        samples.sort_by(f64::total_cmp);
        let trial_count = samples.len();
        EmpiricalCdf { sorted_samples: samples, trial_count, discarded }
    }

    /// Fraction of samples `≤ x`.
    pub fn value_at(&self, x: f64) -> f64 {
        if self.trial_count == 0 {
            return 0.0;
        }
        self.sorted_samples.partition_point(|s| *s <= x) as f64 / self.trial_count as f64
    }

    /// Empirical quantile (lower, no interpolation).
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.trial_count;
        let k = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.sorted_samples[k - 1]
    }
}

/// Simulation settings beyond the system parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub window: SimWindow,
    pub gain: Gain,
    pub trials: usize,
    pub master_seed: u64,
}

/// Run independent trials in parallel; results do not depend on scheduling.
pub fn run_trials(model: &IntensityModel, params: &SystemParams, setup: &TrialSetup) -> Result<EmpiricalCdf> {
    params.validate()?;
    if setup.trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let l = params.antennas as usize;
    let noise = params.noise + setup.window.far_field_power;
    let signal = params.signal_gain();
    let discarded = AtomicU64::new(0);
    let samples: Vec<Option<f64>> = (0..setup.trials as u64)
        .into_par_iter()
        .map_init(
            || (Vec::<[f64; 2]>::new(), vec![Complex64::new(0.0, 0.0); l]),
            |(points, h), t| -> Result<Option<f64>> {
                let mut rng = trial_rng(setup.master_seed, t);
                points.clear();
                sample(model, &setup.window, params.alpha, &mut rng, points)?;
                let target: Vec<Complex64> = (0..l).map(|_| complex_normal(&mut rng)).collect();
                let mut cov = Covariance::new(l, noise);
                for p in points.iter() {
                    let r = p[0].hypot(p[1]);
                    for x in h.iter_mut() {
                        *x = complex_normal(&mut rng);
                    }
                    cov.add(setup.gain.at(r), h);
                }
                Ok(match finish(cov, &target, noise, signal) {
                    SinrOutcome::Value(v) => Some(v),
                    SinrOutcome::Singular => {
                        discarded.fetch_add(1, Ordering::Relaxed);
                        None
                    }
                })
            },
        )
        .collect::<Result<_>>()?;
    let discarded = discarded.into_inner() as usize;
    if discarded as f64 > MAX_DISCARD_RATE * setup.trials as f64 {
        return Err(Error::Numeric(format!("{discarded} of {} trials were numerically singular", setup.trials)));
    }
    Ok(EmpiricalCdf::from_samples(samples.into_iter().flatten().collect(), discarded))
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn sup_deviation<F: FnMut(f64) -> f64>(emp: &EmpiricalCdf, mut analytic: F) -> f64 {
    let n = emp.trial_count as f64;
    let s = &emp.sorted_samples;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        // group ties
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = analytic(s[i]);
        worst = worst.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    worst
}

/// Analytic CDF of the SINR, tabulated over the sample range of `emp`
/// with steps of at most `max_jump`.
pub fn analytic_curve_for(emp: &EmpiricalCdf, params: &SystemParams, model: &IntensityModel, max_jump: f64) -> Result<SinrCdfCurve> {
    let finite: Vec<f64> = emp.sorted_samples.iter().copied().filter(|s| s.is_finite() && *s > 0.0).collect();
    let (lo, hi) = match (finite.first(), finite.last()) {
        (Some(a), Some(b)) => (params.to_gamma(*a), params.to_gamma(*b)),
        _ => (1.0, 1.0),
    };
    SinrCdfCurve::adaptive(params, model, lo, hi, max_jump)
}

/// Kolmogorov–Smirnov distance between simulated SINR and the analytic CDF.
pub fn sup_deviation_from_model(emp: &EmpiricalCdf, params: &SystemParams, model: &IntensityModel) -> Result<f64> {
    let curve = analytic_curve_for(emp, params, model, 1e-3)?;
    Ok(sup_deviation(emp, |s| if s.is_infinite() { 1.0 } else { curve.value_at(params.to_gamma(s)) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn params(l: u32, noise: f64) -> SystemParams {
        SystemParams { antennas: l, alpha: 4.0, noise, link_distance: 10.0 }
    }

    fn explicit_inverse(draw: &ChannelDraw, distances: &[f64], p: &SystemParams) -> f64 {
        let l = p.antennas as usize;
        let mut a = DMatrix::<Complex64>::identity(l, l) * Complex64::new(p.noise, 0.0);
        for (h, r) in draw.interferers.iter().zip(distances) {
            let v = DVector::from_column_slice(h);
            a += &v * v.adjoint() * Complex64::new(r.powf(-p.alpha), 0.0);
        }
        let g = DVector::from_column_slice(&draw.target);
        // pivoted LU; the small-matrix cofactor path of try_inverse is unstable
        let inv = a.full_piv_lu().try_inverse().unwrap();
        (g.adjoint() * inv * &g)[(0, 0)].re * p.signal_gain()
    }

    #[test]
    fn solve_matches_explicit_inverse() {
        let mut rng = trial_rng(5, 0);
        for k in 0..1000 {
            let l = 1 + k % 8;
            let n = rng.random_range(0..=3 * l);
            let p = params(l as u32, 1e-3);
            let draw = ChannelDraw::sample(l, n, &mut rng);
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..20.0)).collect();
            let SinrOutcome::Value(v) = mmse_sinr(&draw, &d, &p).unwrap() else { panic!("singular") };
            let oracle = explicit_inverse(&draw, &d, &p);
            assert!(((v - oracle) / oracle).abs() < 1e-10, "{v} vs {oracle}");
        }
    }

    #[test]
    fn noise_only_mean() {
        let (l, noise) = (4u32, 1e-4);
        let p = params(l, noise);
        let mut rng = trial_rng(1, 1);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let draw = ChannelDraw::sample(l as usize, 0, &mut rng);
            let SinrOutcome::Value(v) = mmse_sinr(&draw, &[], &p).unwrap() else { unreachable!() };
            sum += v;
        }
        let expected = l as f64 * p.signal_gain() / noise;
        assert!((sum / n as f64 / expected - 1.0).abs() < 0.02);
    }

    #[test]
    fn interference_only_degrades_and_is_monotone() {
        let p = params(3, 1e-2);
        let mut rng = trial_rng(2, 0);
        for _ in 0..200 {
            let draw = ChannelDraw::sample(3, 4, &mut rng);
            let mut d = vec![3.0, 5.0, 8.0, 12.0];
            let SinrOutcome::Value(v) = mmse_sinr(&draw, &d, &p).unwrap() else { unreachable!() };
            let bound = p.signal_gain() * draw.target.iter().map(|x| x.norm_sqr()).sum::<f64>() / p.noise;
            assert!(v <= bound);
            d[1] = 4.0;
            let SinrOutcome::Value(w) = mmse_sinr(&draw, &d, &p).unwrap() else { unreachable!() };
            assert!(w < v);
        }
    }

    #[test]
    fn strong_noise_dominates() {
        let p = params(2, 1e6);
        let mut rng = trial_rng(3, 0);
        let draw = ChannelDraw::sample(2, 1, &mut rng);
        let SinrOutcome::Value(v) = mmse_sinr(&draw, &[10.0], &p).unwrap() else { unreachable!() };
        let bound = p.signal_gain() * draw.target.iter().map(|x| x.norm_sqr()).sum::<f64>() / p.noise;
        assert!((v / bound - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_noise_underdetermined_is_infinite() {
        let p = params(4, 0.0);
        let mut rng = trial_rng(4, 0);
        let draw = ChannelDraw::sample(4, 2, &mut rng);
        assert_eq!(mmse_sinr(&draw, &[5.0, 6.0], &p).unwrap(), SinrOutcome::Value(f64::INFINITY));
        let draw = ChannelDraw::sample(4, 6, &mut rng);
        let SinrOutcome::Value(v) = mmse_sinr(&draw, &[5.0, 6.0, 7.0, 8.0, 9.0, 10.0], &p).unwrap() else { unreachable!() };
        assert!(v.is_finite() && v > 0.0);
    }

    fn setup(trials: usize, seed: u64) -> TrialSetup {
        TrialSetup { window: SimWindow::exact(200.0), gain: Gain::PowerLaw(4.0), trials, master_seed: seed }
    }

    #[test]
    fn single_trial_and_determinism() {
        let m = IntensityModel::homogeneous(1e-3);
        let p = params(4, 1e-12);
        assert_eq!(run_trials(&m, &p, &setup(1, 9)).unwrap().trial_count, 1);
        let a = run_trials(&m, &p, &setup(500, 9)).unwrap();
        let b = run_trials(&m, &p, &setup(500, 9)).unwrap();
        assert_eq!(a, b);
        assert!(a.sorted_samples.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn distance_normalization_consistency() {
        let m = IntensityModel::homogeneous(1e-3);
        let p = params(4, 1e-12);
        let p1 = SystemParams { link_distance: 1.0, ..p };
        let a = run_trials(&m, &p, &setup(200, 3)).unwrap();
        let b = run_trials(&m, &p1, &setup(200, 3)).unwrap();
        for (x, y) in a.sorted_samples.iter().zip(&b.sorted_samples) {
            assert!((x * 1e4 / y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ks_of_inverse_sampled_exponential() {
        let mut rng = trial_rng(8, 0);
        let n = 100_000;
        let samples: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let emp = EmpiricalCdf::from_samples(samples, 0);
        let d = sup_deviation(&emp, |x| 1.0 - (-x).exp());
        assert!(d < 1.95 / (n as f64).sqrt(), "{d}");
        assert!(sup_deviation(&emp, |x| 1.0 - (-x / 10.0).exp()) > 0.05);
    }

    #[test]
    fn ks_degenerate_is_step_granularity() {
        let emp = EmpiricalCdf::from_samples((1..=100).map(|k| k as f64).collect(), 0);
        let d = sup_deviation(&emp, |x| (x / 100.0).clamp(0.0, 1.0));
        assert!(d <= 0.01 + 1e-15);
        assert_eq!(emp.value_at(50.0), 0.5);
        assert_eq!(emp.quantile(0.5), 50.0);
    }
}
