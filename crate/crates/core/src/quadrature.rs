//! Adaptive Gauss–Kronrod (10/21-point) integration on finite and
//! semi-infinite intervals.
//!
//! The engine keeps a max-heap of subintervals keyed by their error estimate
//! and bisects the worst one until the total error meets
//! `rel_tol·|value| + abs_tol`. Initial breakpoints (kinks, support edges,
//! geometric refinement toward a singular endpoint) can be supplied up front.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Default relative tolerance for interference-functional evaluations.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Absolute error floor.
pub const ABS_FLOOR: f64 = 1e-14;
const MAX_SUBDIVISIONS: usize = 4000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Which endpoint of a finite interval carries an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singularity {
    None,
    Left,
    Right,
    Both,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One 21-point Kronrod panel on `[a, b]` for a vector-valued integrand.
/// Writes integral estimates into `out` and returns the per-component errors.
fn panel_vec<F>(f: &mut F, a: f64, b: f64, dim: usize, out: &mut [f64], err: &mut [f64], scratch: &mut [f64])
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // scratch layout: 21 rows of `dim` values, row 0 = center
    let (fc, rest) = scratch.split_at_mut(dim);
    f(center, fc);
    for j in 0..10 {
        let dx = half * XGK[j];
        let (row_lo, row_hi) = rest[2 * j * dim..(2 * j + 2) * dim].split_at_mut(dim);
        f(center - dx, row_lo);
        f(center + dx, row_hi);
    }
    for c in 0..dim {
        let fcv = scratch[c];
        let mut res_k = WGK[10] * fcv;
        let mut res_g = 0.0;
        let mut res_abs = (WGK[10] * fcv).abs();
        for j in 0..10 {
            let f1 = scratch[dim + 2 * j * dim + c];
            let f2 = scratch[dim + (2 * j + 1) * dim + c];
            res_k += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[10] * (fcv - mean).abs();
        for j in 0..10 {
            let f1 = scratch[dim + 2 * j * dim + c];
            let f2 = scratch[dim + (2 * j + 1) * dim + c];
            res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let h = half.abs();
        out[c] = res_k * half;
        err[c] = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    key: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Tolerance settings for the adaptive engine.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: ABS_FLOOR, max_subdivisions: MAX_SUBDIVISIONS }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::relative(DEFAULT_REL_TOL)
    }
}

/// Vector-valued adaptive integration over consecutive finite panels given by
/// `points` (sorted, at least two). Convergence is judged per component.
pub fn integrate_vec_points<F>(mut f: F, dim: usize, points: &[f64], tol: Tolerance) -> Result<(Vec<f64>, Vec<f64>, usize)>
where
    F: FnMut(f64, &mut [f64]),
{
    if points.len() < 2 {
        return domain("integration needs at least two breakpoints");
    }
    for w in points.windows(2) {
        if !(w[0] <= w[1]) || !w[1].is_finite() || !w[0].is_finite() {
            return domain(format!("bad integration breakpoints {} .. {}", w[0], w[1]));
        }
    }
    let mut scratch = vec![0.0; 21 * dim];
    let mut heap = BinaryHeap::new();
    let mut frozen_value = vec![0.0; dim];
    let mut frozen_error = vec![0.0; dim];
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    let mut evals = 0usize;

    let key_of = |err: &[f64], val: &[f64]| -> f64 {
        err.iter()
            .zip(val)
            .map(|(e, v)| e / (tol.rel * v.abs() + tol.abs))
            .fold(0.0, f64::max)
    };

    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let mut v = vec![0.0; dim];
        let mut e = vec![0.0; dim];
        panel_vec(&mut f, w[0], w[1], dim, &mut v, &mut e, &mut scratch);
        evals += 21;
        for c in 0..dim {
            total[c] += v[c];
            total_err[c] += e[c];
        }
        let key = key_of(&e, &v);
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e, key });
    }

    let converged = |total: &[f64], total_err: &[f64]| {
        total
            .iter()
            .zip(total_err)
            .all(|(v, e)| *e <= tol.rel * v.abs() + tol.abs)
    };

    let mut subdivisions = heap.len();
    let mut lv = vec![0.0; dim];
    let mut le = vec![0.0; dim];
    let mut rv = vec![0.0; dim];
    let mut re = vec![0.0; dim];
    while !converged(&total, &total_err) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if subdivisions >= tol.max_subdivisions {
            heap.push(worst);
            let (value, error) = sum_panels(&heap, &frozen_value, &frozen_error, dim);
            return Err(Error::NotConverged {
                estimate: value[0],
                error: error.iter().cloned().fold(0.0, f64::max),
            });
        }
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e-14 * mid.abs().max(1e-300) {
            // Panel cannot be refined further in floating point.
            for c in 0..dim {
                frozen_value[c] += worst.value[c];
                frozen_error[c] += worst.error[c];
            }
            continue;
        }
        panel_vec(&mut f, worst.a, mid, dim, &mut lv, &mut le, &mut scratch);
        panel_vec(&mut f, mid, worst.b, dim, &mut rv, &mut re, &mut scratch);
        evals += 42;
        subdivisions += 1;
        for c in 0..dim {
            total[c] += lv[c] + rv[c] - worst.value[c];
            total_err[c] += le[c] + re[c] - worst.error[c];
        }
        heap.push(Panel { a: worst.a, b: mid, value: lv.clone(), error: le.clone(), key: key_of(&le, &lv) });
        heap.push(Panel { a: mid, b: worst.b, value: rv.clone(), error: re.clone(), key: key_of(&re, &rv) });
    }
    // Re-sum from the panels to shed accumulated cancellation in the running totals.
    let (value, error) = sum_panels(&heap, &frozen_value, &frozen_error, dim);
    if !converged(&value, &error) && heap.is_empty() {
        let bad = value.iter().zip(&error).all(|(v, e)| e.is_finite() && *e <= 1e3 * (tol.rel * v.abs() + tol.abs));
        if !bad {
            return Err(Error::NotConverged { estimate: value[0], error: error[0] });
        }
    }
    Ok((value, error, evals))
}

fn sum_panels(heap: &BinaryHeap<Panel>, frozen_v: &[f64], frozen_e: &[f64], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = frozen_v.to_vec();
    let mut e = frozen_e.to_vec();
    // Sum small contributions first.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    for p in panels {
        for c in 0..dim {
            v[c] += p.value[c];
            e[c] += p.error[c];
        }
    }
    (v, e)
}

/// Scalar integration over consecutive finite panels.
pub fn integrate_points<F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    let (v, e, n) = integrate_vec_points(|x, out: &mut [f64]| out[0] = f(x), 1, points, tol)?;
    Ok(IntegrationResult { value: v[0], abs_error_estimate: e[0], evaluations: n })
}

/// `∫_a^b f` with the default engine settings and relative tolerance `rel_tol`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    if !(a <= b) {
        return domain(format!("integration interval [{a}, {b}] is reversed"));
    }
    check_tol(rel_tol)?;
    integrate_points(f, &[a, b], Tolerance::relative(rel_tol))
}

/// Like [`integrate_finite`], with the interval pre-split geometrically toward
/// the singular endpoint(s) before adaptive refinement starts.
pub fn integrate_finite_singular<F>(f: F, a: f64, b: f64, rel_tol: f64, singular: Singularity) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    if !(a <= b) {
        return domain(format!("integration interval [{a}, {b}] is reversed"));
    }
    check_tol(rel_tol)?;
    let points = geometric_points(a, b, singular, 40);
    integrate_points(f, &points, Tolerance::relative(rel_tol))
}

/// Breakpoints `a < … < b` refined by halving toward singular endpoints.
pub fn geometric_points(a: f64, b: f64, singular: Singularity, levels: usize) -> Vec<f64> {
    let width = b - a;
    let mut pts = vec![a, b];
    let (left, right) = match singular {
        Singularity::None => (false, false),
        Singularity::Left => (true, false),
        Singularity::Right => (false, true),
        Singularity::Both => (true, true),
    };
    let half = if left && right { 0.5 } else { 1.0 };
    for k in 1..=levels {
        let s = half * 0.5f64.powi(k as i32) * width;
        if left {
            pts.push(a + s);
        }
        if right {
            pts.push(b - s);
        }
    }
    if left && right {
        pts.push(a + 0.5 * width);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫_a^∞ f` via `r = a + (t/(1−t))²`, `t ∈ [0, 1)`.
pub fn integrate_semi_infinite<F>(f: F, a: f64, rel_tol: f64) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    integrate_semi_infinite_scaled(f, a, 1.0, rel_tol)
}

/// `∫_a^∞ f` via `r = a + s·(t/(1−t))²`; `scale` should be the length scale
/// on which `f` decays.
pub fn integrate_semi_infinite_scaled<F>(mut f: F, a: f64, scale: f64, rel_tol: f64) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    if !a.is_finite() || !(scale > 0.0) {
        return domain(format!("semi-infinite integration needs finite start and positive scale (a={a}, s={scale})"));
    }
    check_tol(rel_tol)?;
    let g = |t: f64| {
        // r = a + s·(t/(1−t))² keeps algebraic tails r^{−p}, p > 3/2, regular at t = 1
        let one_minus = 1.0 - t;
        let u = t / one_minus;
        let r = a + scale * u * u;
        if !r.is_finite() {
            return 0.0;
        }
        let v = f(r);
        if v == 0.0 {
            0.0
        } else {
            v * 2.0 * scale * u / (one_minus * one_minus)
        }
    };
    let points = [0.0, 0.5, 0.75, 0.875, 0.9375, 0.96875, 1.0];
    integrate_points(g, &points, Tolerance::relative(rel_tol))
}

/// `∫_{p₀}^{∞}` split at the given finite breakpoints, the last segment
/// semi-infinite. `points` must be sorted and finite.
pub fn integrate_to_infinity<F>(mut f: F, points: &[f64], scale: f64, rel_tol: f64) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    let Some(&last) = points.last() else {
        return domain("need at least one breakpoint");
    };
    let mut head = IntegrationResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    if points.len() >= 2 {
        head = integrate_points(&mut f, points, Tolerance::relative(rel_tol))?;
    }
    let tail = integrate_semi_infinite_scaled(&mut f, last, scale, rel_tol)?;
    Ok(IntegrationResult {
        value: head.value + tail.value,
        abs_error_estimate: head.abs_error_estimate + tail.abs_error_estimate,
        evaluations: head.evaluations + tail.evaluations,
    })
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0) {
        return domain(format!("relative tolerance must be positive, got {rel_tol}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_finite(|x| x, 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert!(r.evaluations >= 21);
        assert!(r.abs_error_estimate >= 0.0);
    }

    #[test]
    fn rational_integrand_against_antiderivative() {
        let r = integrate_finite(|x| x / (x.powi(4) + 1.0), 0.0, 10.0, 1e-10).unwrap();
        let exact = 100f64.atan() / 2.0;
        assert!(((r.value - exact) / exact).abs() < 1e-10);
        assert!((exact - 0.780398).abs() < 1e-6);
    }

    #[test]
    fn semi_infinite_examples() {
        let r = integrate_semi_infinite(|x| (-x).exp(), 0.0, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let r = integrate_semi_infinite(|x| x * x.powi(-4) / (1.0 + x.powi(-4)), 0.0, 1e-10).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        // ∫₀¹ x^{-0.9} = 10
        let r = integrate_finite_singular(|x| x.powf(-0.9), 0.0, 1.0, 1e-10, Singularity::Left).unwrap();
        assert!((r.value - 10.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let tol = Tolerance { rel: 1e-14, abs: 0.0, max_subdivisions: 3 };
        let out = integrate_points(|x: f64| (50.0 * x).sin().abs(), &[0.0, 7.0], tol);
        assert!(matches!(out, Err(Error::NotConverged { .. })));
    }

    #[test]
    fn vector_integrand_converges_per_component() {
        let (v, _, _) = integrate_vec_points(
            |x, out: &mut [f64]| {
                out[0] = x.cos();
                out[1] = 1e-6 * x * x;
            },
            2,
            &[0.0, 1.0],
            Tolerance::relative(1e-12),
        )
        .unwrap();
        assert!((v[0] - 1f64.sin()).abs() < 1e-14);
        assert!((v[1] - 1e-6 / 3.0).abs() < 1e-18);
    }

    #[test]
    fn reversed_interval_rejected() {
        assert!(integrate_finite(|x| x, 1.0, 0.0, 1e-9).is_err());
    }
}
