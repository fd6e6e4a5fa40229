//! With density growing in proportion to the antenna count, the SIR
//! concentrates at a deterministic limit.

use coxnet::analytic::{cdf, scaling_limit_sir, IntensityModel, SystemParams};

fn main() -> coxnet::Result<()> {
    let base = IntensityModel::power_law(1.0, -0.5);
    let (ell, alpha, r_t) = (0.0125, 4.0, 10.0);
    let limit = scaling_limit_sir(&base, ell, alpha, r_t)?;
    println!("limiting SIR {limit:.5}");
    for l in [2u32, 10, 40, 200, 1000, 5000] {
        let p = SystemParams { antennas: l, alpha, noise: 0.0, link_distance: r_t };
        let m = base.scaled(ell * l as f64)?;
        let lo = cdf(&p, &m, p.to_gamma(0.8 * limit))?;
        let hi = cdf(&p, &m, p.to_gamma(1.25 * limit))?;
        println!("L = {l:>5}: P[SIR ≤ 0.8·limit] = {lo:.4}, P[SIR ≤ 1.25·limit] = {hi:.4}");
    }
    Ok(())
}
