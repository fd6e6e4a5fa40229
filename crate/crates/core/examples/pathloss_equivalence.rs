//! A homogeneous network under exponential path loss has the same SINR law as
//! an r^-α network with a transformed intensity.

use coxnet::analytic::{cdf, equivalent_intensity, psi, psi_with_pathloss, PathLoss, SystemParams};

fn main() -> coxnet::Result<()> {
    let p = SystemParams { antennas: 4, alpha: 4.0, noise: 1e-5, link_distance: 10.0 };
    let pl = PathLoss::Exponential { decay: 0.01 };
    let rho = 1e-5;
    let eq = equivalent_intensity(&pl, rho, p.alpha)?;
    println!("{:>10} {:>16} {:>16} {:>10}", "γ", "ψ direct", "ψ equivalent", "CDF");
    for k in 0..=8 {
        let g = 10f64.powf(0.5 * k as f64);
        println!("{g:>10.1} {:>16.10} {:>16.10} {:>10.6}", psi_with_pathloss(&pl, rho, g)?, psi(&eq, p.alpha, g)?, cdf(&p, &eq, g)?);
    }
    Ok(())
}
