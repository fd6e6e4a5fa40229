//! Scalar special functions used by the outage formulas.
//!
//! Everything here is a pure function of its arguments. The hypergeometric
//! function is only provided for the `₂F₁(1, b; b + 1; z)` family with
//! `z ≤ 0`, which is all that radial power-law integrals require.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

/// Relative size below which a series term no longer contributes.
const SERIES_EPS: f64 = 1e-16;
/// Hard cap on the number of series terms.
const SERIES_MAX_TERMS: usize = 10_000;

const LN_FACTORIAL_TABLE: usize = 256;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..LN_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`, exact summation for small `n` and a Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACTORIAL_TABLE {
        return ln_factorial_table()[n as usize];
    }
    let z = n as f64 + 1.0;
    let z2 = z * z;
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2)
        + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2)
}

/// Both tails of the Poisson(x) distribution split at `l`:
/// returns `(Pr{N ≤ l-1}, Pr{N ≥ l})`. The smaller-index tail that does not
/// contain the bulk is summed directly and the other one is its complement.
fn poisson_split(l: u64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (1.0, 0.0);
    }
    let log_term = |k: u64| -x + k as f64 * x.ln() - ln_factorial(k);
    if (l - 1) as f64 <= x {
        // Left tail k = 0..l-1, terms increase with k.
        let top = l - 1;
        let log_top = log_term(top);
        let mut rel = 1.0;
        let mut sum = 1.0;
        let mut k = top;
        while k > 0 {
            rel *= k as f64 / x;
            sum += rel;
            if rel < SERIES_EPS * sum {
                break;
            }
            k -= 1;
        }
        let lower = (log_top + sum.ln()).exp().min(1.0);
        (lower, 1.0 - lower)
    } else {
        // Right tail k = l.., terms decrease with k.
        let log_first = log_term(l);
        let mut rel = 1.0;
        let mut sum = 1.0;
        let mut k = l;
        loop {
            k += 1;
            rel *= x / k as f64;
            sum += rel;
            if rel < SERIES_EPS * sum {
                break;
            }
        }
        let upper = (log_first + sum.ln()).exp().min(1.0);
        (1.0 - upper, upper)
    }
}

/// Upper regularized gamma function `Q(L, x) = Γ(L, x) / Γ(L)` for integer `L`,
/// i.e. `Pr{Poisson(x) ≤ L − 1}`.
pub fn reg_upper_gamma(l: u32, x: f64) -> Result<f64> {
    check_gamma_args(l, x)?;
    Ok(poisson_split(l as u64, x).0)
}

/// Lower regularized gamma function `P(L, x) = 1 − Q(L, x)`, summed directly
/// when it is the small tail so that outage probabilities near zero keep their
/// relative accuracy.
pub fn reg_lower_gamma(l: u32, x: f64) -> Result<f64> {
    check_gamma_args(l, x)?;
    Ok(poisson_split(l as u64, x).1)
}

fn check_gamma_args(l: u32, x: f64) -> Result<()> {
    if l == 0 {
        return domain("regularized gamma needs L ≥ 1");
    }
    if x.is_nan() || x < 0.0 {
        return domain(format!("regularized gamma needs x ≥ 0, got {x}"));
    }
    Ok(())
}

/// `₂F₁(1, b; b + 1; z)` for `b > 0` and `z ≤ 0`.
///
/// Regions: direct series for `|z| ≤ 0.9`, Pfaff transformation for
/// `−3 ≤ z < −0.9`, and the `1/z` connection formula for `z < −3`
/// (with upward recurrence in `b` when `b > 1`).
pub fn gauss_2f1_unit_a(b: f64, z: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return domain(format!("2F1(1,b;b+1;z) needs b > 0, got {b}"));
    }
    if z.is_nan() || z > 0.0 {
        return domain(format!("2F1(1,b;b+1;z) is only provided for z ≤ 0, got {z}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z >= -0.9 {
        return series_direct(b, z);
    }
    if z >= -3.0 {
        return series_pfaff(b, z);
    }
    if z == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if b <= 1.5 {
        return connection_large_z(b, z);
    }
    // Reduce to b0 ∈ (0.5, 1.5], then F(b+1) = (b+1)/(b z) · (F(b) − 1).
    let steps = (b - 1.5).ceil();
    let mut bb = b - steps;
    let mut f = connection_large_z(bb, z)?;
    while bb + 0.5 < b {
        f = (bb + 1.0) / (bb * z) * (f - 1.0);
        bb += 1.0;
    }
    Ok(f)
}

fn series_direct(b: f64, z: f64) -> Result<f64> {
    // Σ b/(b+n) zⁿ
    let mut sum = 0.0;
    let mut zn = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let term = b / (b + n as f64) * zn;
        sum += term;
        if term.abs() < SERIES_EPS * sum.abs() {
            return Ok(sum);
        }
        zn *= z;
    }
    Err(Error::Numeric(format!("2F1 direct series did not converge (b={b}, z={z})")))
}

fn series_pfaff(b: f64, z: f64) -> Result<f64> {
    // (1−z)⁻¹ ₂F₁(1, 1; b+1; w), w = z/(z−1) ∈ (0, 1)
    let w = z / (z - 1.0);
    let mut sum = 0.0;
    let mut c = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        sum += c;
        if c < SERIES_EPS * sum {
            return Ok(sum / (1.0 - z));
        }
        c *= (n as f64 + 1.0) / (b + 1.0 + n as f64) * w;
    }
    Err(Error::Numeric(format!("2F1 Pfaff series did not converge (b={b}, z={z})")))
}

/// `πb/sin(πb)·x^{−b} − (b/x) Σₙ (−1/x)ⁿ/(n + 1 − b)` with `x = −z > 3`, b ∈ (0, 1.5].
/// The n = 0 term and the leading power are combined to stay finite at b = 1.
fn connection_large_z(b: f64, z: f64) -> Result<f64> {
    let x = -z;
    let delta = 1.0 - b;
    let ln_x = x.ln();
    let lead = if delta.abs() >= 0.25 {
        (b / x) * (PI * (delta * ln_x).exp() / (PI * delta).sin() - 1.0 / delta)
    } else {
        // (x^δ − 1)/δ + x^δ (π/sin(πδ) − 1/δ)
        let pow_minus_one = if delta == 0.0 {
            ln_x
        } else {
            (delta * ln_x).exp_m1() / delta
        };
        let s = PI * delta;
        let csc_excess = if delta == 0.0 {
            0.0
        } else {
            // π (s − sin s) / (s sin s), with (s − sin s)/s summed as a series.
            let s2 = s * s;
            let mut term = s2 / 6.0;
            let mut acc: f64 = 0.0;
            let mut k = 1.0;
            while term.abs() > 1e-18 * acc.abs().max(f64::MIN_POSITIVE) {
                acc += term;
                term *= -s2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
                k += 1.0;
            }
            PI * acc / s.sin()
        };
        (b / x) * (pow_minus_one + (delta * ln_x).exp() * csc_excess)
    };
    let u = -1.0 / x;
    let mut tail = 0.0;
    let mut un = u;
    for n in 1..SERIES_MAX_TERMS {
        let term = un / (n as f64 + 1.0 - b);
        tail += term;
        if term.abs() < SERIES_EPS * (lead.abs() + tail.abs()) {
            return Ok(lead - (b / x) * tail);
        }
        un *= u;
    }
    Err(Error::Numeric(format!("2F1 connection series did not converge (b={b}, z={z})")))
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("I0 needs x ≥ 0, got {x}"));
    }
    if x <= 15.0 {
        Ok(i0_series(x))
    } else {
        Ok(i0_asymptotic_scaled(x) * x.exp())
    }
}

/// `e^{−x} I₀(x)`, finite for arbitrarily large `x`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("I0 needs x ≥ 0, got {x}"));
    }
    if x <= 15.0 {
        Ok(i0_series(x) * (-x).exp())
    } else {
        Ok(i0_asymptotic_scaled(x))
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < SERIES_EPS * sum {
            return sum;
        }
        k += 1.0;
    }
}

fn i0_asymptotic_scaled(x: f64) -> f64 {
    // Σ ((2k−1)!!)² / (k! 8ᵏ xᵏ), truncated at its smallest term.
    let mut term = 1.0f64;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if next.abs() >= term.abs() || next < SERIES_EPS * sum {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Upper integration limit for [`powerlaw_integral_term`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite(f64),
    Infinite,
}

impl Limit {
    pub fn from_option(r: Option<f64>) -> Self {
        match r {
            Some(v) if v.is_finite() => Limit::Finite(v),
            _ => Limit::Infinite,
        }
    }
}

/// Antiderivative of `r^{κ+1} γ / (r^α + γ)` (taken to vanish at the origin)
/// evaluated at `limit`.
///
/// Finite limits need `κ > −2`; the infinite limit needs `−2 < κ < α − 2`.
pub fn powerlaw_integral_term(kappa: f64, alpha: f64, gamma: f64, limit: Limit) -> Result<f64> {
    if !(alpha > 2.0) {
        return domain(format!("path-loss exponent must exceed 2, got {alpha}"));
    }
    if gamma.is_nan() || gamma < 0.0 {
        return domain(format!("γ must be nonnegative, got {gamma}"));
    }
    match limit {
        Limit::Finite(r) if r == 0.0 => Ok(0.0),
        Limit::Finite(r) => {
            if !(r > 0.0) {
                return domain(format!("radial limit must be ≥ 0, got {r}"));
            }
            if !(kappa > -2.0) {
                return domain(format!("integral diverges at the origin for κ = {kappa}"));
            }
            if gamma == 0.0 {
                return Ok(0.0);
            }
            let k2 = kappa + 2.0;
            let z = -(alpha * r.ln() - gamma.ln()).exp();
            Ok(r.powf(k2) / k2 * gauss_2f1_unit_a(k2 / alpha, z)?)
        }
        Limit::Infinite => {
            if !(kappa > -2.0 && kappa < alpha - 2.0) {
                return domain(format!(
                    "integral to infinity needs −2 < κ < α − 2, got κ = {kappa}, α = {alpha}"
                ));
            }
            let u = (kappa + 2.0) / alpha;
            let s = (PI * u).sin();
            if s.abs() < 1e-12 {
                return domain(format!("csc(π·{u}) is singular"));
            }
            if gamma == 0.0 {
                return Ok(0.0);
            }
            Ok(PI / alpha * gamma.powf(u) / s)
        }
    }
}
